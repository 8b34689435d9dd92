#include "ctsdr/forces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace ctsdr {

namespace {

std::vector<double> moving_average(const std::vector<double>& x, int window) {
    const auto n = static_cast<std::int64_t>(x.size());
    const std::int64_t half = (window - 1) / 2;
    std::vector<double> out(x.size());
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t k = std::min({i, n - 1 - i, half});
        double sum = 0.0;
        for (std::int64_t j = i - k; j <= i + k; ++j) sum += x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(2 * k + 1);
    }
    return out;
}

double parse_number(const std::string& token, std::size_t line_no) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !std::isfinite(value))
        throw std::runtime_error("force CSV: malformed number '" + token + "' at line " +
                                 std::to_string(line_no));
    return value;
}

}  // namespace

void ForceSeries::validate() const {
    if (fx_n.empty()) throw std::invalid_argument("ForceSeries: empty series");
    if (fy_n.size() != fx_n.size() || fz_n.size() != fx_n.size())
        throw std::invalid_argument("ForceSeries: force channels must have equal length");
    if (!t_s.empty() && t_s.size() != fx_n.size())
        throw std::invalid_argument("ForceSeries: time column length mismatch");
    if (has_torques() &&
        (tx_nm.size() != fx_n.size() || ty_nm.size() != fx_n.size() || tz_nm.size() != fx_n.size()))
        throw std::invalid_argument("ForceSeries: torque channels must have equal length");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("ForceSeries: sample rate must be > 0");
}

ForceSeries smooth_forces(const ForceSeries& series, int span) {
    series.validate();
    if (span < 1) throw std::invalid_argument("smooth_forces: span must be >= 1");
    const int window = span % 2 == 0 ? span - 1 : span;

    ForceSeries out = series;
    out.fx_n = moving_average(series.fx_n, window);
    out.fy_n = moving_average(series.fy_n, window);
    out.fz_n = moving_average(series.fz_n, window);
    if (series.has_torques()) {
        out.tx_nm = moving_average(series.tx_nm, window);
        out.ty_nm = moving_average(series.ty_nm, window);
        out.tz_nm = moving_average(series.tz_nm, window);
    }
    return out;
}

double max_force_magnitude(const ForceSeries& series, int span) {
    const ForceSeries smooth = smooth_forces(series, span);
    double best = 0.0;
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        const double mag = std::sqrt(smooth.fx_n[i] * smooth.fx_n[i] +
                                     smooth.fy_n[i] * smooth.fy_n[i] +
                                     smooth.fz_n[i] * smooth.fz_n[i]);
        best = std::max(best, mag);
    }
    return best;
}

ForceSeries read_force_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("force CSV: cannot open " + path.string());

    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw std::runtime_error("force CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool torques = false;
    if (line == "t_s,fx_n,fy_n,fz_n")
        torques = false;
    else if (line == "t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm")
        torques = true;
    else
        throw std::runtime_error(
            "force CSV: header must be t_s,fx_n,fy_n,fz_n[,tx_nm,ty_nm,tz_nm] (line 1)");

    ForceSeries series;
    const std::size_t columns = torques ? 7 : 4;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        tokens.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            tokens.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (tokens.size() != columns)
            throw std::runtime_error("force CSV: expected " + std::to_string(columns) +
                                     " columns at line " + std::to_string(line_no));
        const double t = parse_number(tokens[0], line_no);
        if (!series.t_s.empty() && t <= series.t_s.back())
            throw std::runtime_error("force CSV: time must increase monotonically (line " +
                                     std::to_string(line_no) + ")");
        series.t_s.push_back(t);
        series.fx_n.push_back(parse_number(tokens[1], line_no));
        series.fy_n.push_back(parse_number(tokens[2], line_no));
        series.fz_n.push_back(parse_number(tokens[3], line_no));
        if (torques) {
            series.tx_nm.push_back(parse_number(tokens[4], line_no));
            series.ty_nm.push_back(parse_number(tokens[5], line_no));
            series.tz_nm.push_back(parse_number(tokens[6], line_no));
        }
    }
    if (series.fx_n.empty()) throw std::runtime_error("force CSV: no samples");
    if (series.t_s.size() >= 2) {
        const double dt = series.t_s[1] - series.t_s[0];
        if (dt > 0.0) series.sample_rate_hz = 1.0 / dt;
    }
    series.validate();
    return series;
}

void write_force_csv(const std::filesystem::path& path, const ForceSeries& series) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("force CSV: cannot open " + path.string() + " for write");
    out << (series.has_torques() ? "t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm" : "t_s,fx_n,fy_n,fz_n")
        << "\n";
    char buf[256];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series.t_s.empty()
                             ? static_cast<double>(i) / series.sample_rate_hz
                             : series.t_s[i];
        if (series.has_torques())
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t,
                          series.fx_n[i], series.fy_n[i], series.fz_n[i], series.tx_nm[i],
                          series.ty_nm[i], series.tz_nm[i]);
        else
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", t, series.fx_n[i],
                          series.fy_n[i], series.fz_n[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("force CSV: write failed for " + path.string());
}

ForceSummary summarize_forces(const ForceSeries& raw, int span) {
    const ForceSeries smooth = smooth_forces(raw, span);
    ForceSummary summary;
    summary.span = span;
    summary.samples = smooth.size();
    summary.sample_rate_hz = smooth.sample_rate_hz;
    summary.max_magnitude_n = max_force_magnitude(raw, span);

    auto add_channel = [&](const std::string& name, const std::vector<double>& data) {
        const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
        summary.channels.push_back({name, *lo, *hi});
    };
    add_channel("fx_n", smooth.fx_n);
    add_channel("fy_n", smooth.fy_n);
    add_channel("fz_n", smooth.fz_n);
    if (smooth.has_torques()) {
        add_channel("tx_nm", smooth.tx_nm);
        add_channel("ty_nm", smooth.ty_nm);
        add_channel("tz_nm", smooth.tz_nm);
    }
    return summary;
}

}  // namespace ctsdr
