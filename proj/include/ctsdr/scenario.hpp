#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctsdr/analysis.hpp"
#include "ctsdr/carve.hpp"
#include "ctsdr/motion.hpp"
#include "ctsdr/types.hpp"

namespace ctsdr {

/// Scenario text was rejected; treated as a validation failure (exit 2).
class ScenarioError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Declarative plan description with all defaults resolved at parse time.
struct PlanSpec {
    std::string type;  // j_shape | u_shape | branches | stepped_rotation | spiral
    double depth_mm = 0.0;
    int n_branches = 3;
    double delta_phi_deg = 120.0;
    double step_mm = 10.0;
    int n_steps = 0;
    double sweep_deg = 360.0;
    std::string sweep_mode = "alternate";  // alternate | same_direction
    double v_ins_mm_per_s = 0.0;
    double v_retract_mm_per_s = 1.6;
    double w_deg_per_s = 0.0;

    bool operator==(const PlanSpec&) const = default;
};

/// One fully resolved experiment description: guide, tool, block, plan and
/// simulation settings. parse/serialize round-trip exactly.
struct Scenario {
    SteeringGuide guide;
    DrillTool tool;
    BoneBlock block;
    PlanSpec plan;
    double dt_s = 0.001;
    double h_mm = 0.25;
    bool strict = false;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    // keys the parser filled from defaults, echoed into run.log
    std::vector<std::string> defaulted_keys;

    bool operator==(const Scenario& other) const;
};

Scenario parse_scenario(const std::string& text);
Scenario parse_scenario_file(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

/// Builds the MotionPlan described by the scenario (validates everything).
MotionPlan make_plan(const Scenario& scenario);

struct RunArtifacts {
    std::filesystem::path trajectory_csv;
    std::filesystem::path cavity_ply;
    std::filesystem::path mask_bin;
    std::filesystem::path report_json;
    std::filesystem::path run_log;
    CavityReport report;
    CarveResult carve_result;
    bool timeline_clamped = false;
};

/// Runs the full plan -> integrate -> carve -> report pipeline and writes
/// trajectory.csv, cavity.ply, mask.bin, report.json and run.log into the
/// scenario's output directory. Identical inputs produce byte-identical
/// trajectory.csv, mask.bin and report.json for any worker count. On
/// failure all partial outputs are removed. workers <= 0 reads the
/// CTSDR_WORKERS environment variable (default 1).
RunArtifacts run_scenario(const Scenario& scenario, int workers = 0);

}  // namespace ctsdr
