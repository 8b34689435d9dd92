#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>

#include "ctsdr/forces.hpp"
#include "ctsdr/mesh.hpp"
#include "ctsdr/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int run_command(const std::string& scenario_path, const std::string& out_override, int workers) {
    ctsdr::Scenario scenario = ctsdr::parse_scenario_file(scenario_path);
    if (!out_override.empty()) scenario.output_dir = out_override;
    const ctsdr::RunArtifacts artifacts = ctsdr::run_scenario(scenario, workers);
    std::cout << "run complete: " << artifacts.report.plan_label << "\n"
              << "  removed volume  " << artifacts.report.removed_volume_mm3 << " mm^3\n"
              << "  entry diameter  " << artifacts.report.entry_diameter_mm << " mm\n"
              << "  max reach       " << artifacts.report.max_lateral_reach_mm << " mm\n"
              << "  report          " << artifacts.report_json.string() << "\n";
    return kExitOk;
}

int check_command(const std::string& scenario_path) {
    const ctsdr::Scenario scenario = ctsdr::parse_scenario_file(scenario_path);
    (void)ctsdr::make_plan(scenario);  // constructs and validates
    std::cout << "scenario ok: plan " << scenario.plan.type << ", guide R="
              << scenario.guide.curve_radius_mm << " mm, L="
              << scenario.guide.deployable_length_mm << " mm\n";
    for (const std::string& key : scenario.defaulted_keys)
        std::cout << "  defaulted: " << key << "\n";
    return kExitOk;
}

int forces_command(const std::string& csv_path, int span, std::string out_dir) {
    namespace fs = std::filesystem;
    const fs::path input(csv_path);
    if (out_dir.empty()) out_dir = input.parent_path().string();
    if (!out_dir.empty()) fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / input.stem();

    const ctsdr::ForceSeries raw = ctsdr::read_force_csv(input);
    const ctsdr::ForceSeries smooth = ctsdr::smooth_forces(raw, span);
    const ctsdr::ForceSummary summary = ctsdr::summarize_forces(raw, span);

    const fs::path smoothed_path = base.string() + "_smoothed.csv";
    ctsdr::write_force_csv(smoothed_path, smooth);

    nlohmann::ordered_json j;
    j["max_magnitude_n"] = summary.max_magnitude_n;
    nlohmann::ordered_json channels;
    for (const ctsdr::ChannelRange& ch : summary.channels)
        channels[ch.name] = {{"min", ch.min}, {"max", ch.max}};
    j["channels"] = channels;
    j["span"] = summary.span;
    j["samples"] = summary.samples;
    j["sample_rate_hz"] = summary.sample_rate_hz;
    const fs::path summary_path = base.string() + "_summary.json";
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot open " + summary_path.string() + " for write");
    out << j.dump(2) << "\n";

    std::cout << "max |F| = " << summary.max_magnitude_n << " N over " << summary.samples
              << " samples (span " << span << ")\n"
              << "  smoothed " << smoothed_path.string() << "\n"
              << "  summary  " << summary_path.string() << "\n";
    return kExitOk;
}

int mesh_command(const std::string& mask_path, std::string out_path) {
    namespace fs = std::filesystem;
    if (out_path.empty()) out_path = fs::path(mask_path).replace_extension(".ply").string();
    const ctsdr::MaskData mask = ctsdr::read_mask(mask_path);
    const ctsdr::TriangleMesh mesh = ctsdr::extract_cavity_mesh(mask);
    if (fs::path(out_path).extension() == ".stl")
        ctsdr::write_stl(out_path, mesh);
    else
        ctsdr::write_ply(out_path, mesh);
    std::cout << "mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
              << " triangles -> " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concentric-tube steerable drilling simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_override, csv_path, mask_path, mesh_out, forces_out;
    int workers = 0;
    int span = 100;

    CLI::App* run = app.add_subcommand("run", "execute a scenario and write all artifacts");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_override, "override the scenario's output directory");
    run->add_option("--workers", workers, "carve worker threads (default: CTSDR_WORKERS or 1)");

    CLI::App* check = app.add_subcommand("check", "parse and validate a scenario");
    check->add_option("scenario", scenario_path, "scenario file")->required();

    CLI::App* forces = app.add_subcommand("forces", "smooth a recorded force CSV and summarize");
    forces->add_option("csv", csv_path, "force recording CSV")->required();
    forces->add_option("--span", span, "smoothing span (default 100)");
    forces->add_option("--out-dir", forces_out, "output directory (default: beside the input)");

    CLI::App* mesh = app.add_subcommand("mesh", "re-export a cavity surface from a mask file");
    mesh->add_option("mask", mask_path, "mask.bin produced by run")->required();
    mesh->add_option("-o,--output", mesh_out, "output mesh path (.ply or .stl)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_command(scenario_path, out_override, workers);
        if (check->parsed()) return check_command(scenario_path);
        if (forces->parsed()) return forces_command(csv_path, span, forces_out);
        if (mesh->parsed()) return mesh_command(mask_path, mesh_out);
        return kExitValidation;
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? kExitOk : kExitValidation;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error (validation): " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& err) {
        std::cerr << "error (validation): " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitRuntime;
    }
}
