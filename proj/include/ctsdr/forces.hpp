#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctsdr {

/// Recorded load-cell channels. Torque channels are optional and carried
/// through smoothing untouched by the force metrics.
struct ForceSeries {
    double sample_rate_hz = 1000.0;
    std::vector<double> t_s;
    std::vector<double> fx_n, fy_n, fz_n;
    std::vector<double> tx_nm, ty_nm, tz_nm;

    std::size_t size() const { return fx_n.size(); }
    bool has_torques() const { return !tx_nm.empty(); }
    void validate() const;
};

/// Centered moving average in the style of the usual smoothing tools: an
/// even span is reduced by one (span 100 -> 99-wide window) and the window
/// shrinks symmetrically at the edges, so the first and last samples keep
/// their raw values.
ForceSeries smooth_forces(const ForceSeries& series, int span = 100);

/// Maximum of sqrt(fx^2 + fy^2 + fz^2) over the smoothed samples.
double max_force_magnitude(const ForceSeries& series, int span = 100);

/// CSV with header t_s,fx_n,fy_n,fz_n[,tx_nm,ty_nm,tz_nm] and strictly
/// increasing time. Parse errors carry the offending line number.
ForceSeries read_force_csv(const std::filesystem::path& path);
void write_force_csv(const std::filesystem::path& path, const ForceSeries& series);

struct ChannelRange {
    std::string name;
    double min = 0.0;
    double max = 0.0;
};

struct ForceSummary {
    double max_magnitude_n = 0.0;
    std::vector<ChannelRange> channels;  // ranges of the smoothed channels
    int span = 100;
    std::size_t samples = 0;
    double sample_rate_hz = 0.0;
};

ForceSummary summarize_forces(const ForceSeries& raw, int span = 100);

}  // namespace ctsdr
