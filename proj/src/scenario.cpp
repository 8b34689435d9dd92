#include "ctsdr/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ctsdr/kinematics.hpp"
#include "ctsdr/mesh.hpp"

namespace ctsdr {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kSections = {"guide", "tool", "block", "plan", "sim", "output"};
const char* kPlanTypes = "j_shape, u_shape, branches, stepped_rotation, spiral";

struct RawValue {
    std::string text;
    std::size_t line = 0;
};

using SectionMap = std::map<std::string, std::map<std::string, RawValue>>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_number(const RawValue& raw, const std::string& key) {
    char* end = nullptr;
    const double value = std::strtod(raw.text.c_str(), &end);
    if (end == raw.text.c_str() || !trim(end).empty() || !std::isfinite(value))
        throw ScenarioError("malformed number for " + key + " at line " +
                            std::to_string(raw.line));
    return value;
}

int to_int(const RawValue& raw, const std::string& key) {
    const double value = to_number(raw, key);
    if (value != std::floor(value))
        throw ScenarioError(key + " must be an integer (line " + std::to_string(raw.line) + ")");
    return static_cast<int>(value);
}

bool to_bool(const RawValue& raw, const std::string& key) {
    if (raw.text == "true") return true;
    if (raw.text == "false") return false;
    throw ScenarioError(key + " must be true or false (line " + std::to_string(raw.line) + ")");
}

Vec3 to_vec3(const RawValue& raw, const std::string& key) {
    std::istringstream fields(raw.text);
    Vec3 v;
    if (!(fields >> v.x() >> v.y() >> v.z()))
        throw ScenarioError(key + " needs three numbers (line " + std::to_string(raw.line) + ")");
    std::string extra;
    if (fields >> extra)
        throw ScenarioError(key + " needs exactly three numbers (line " +
                            std::to_string(raw.line) + ")");
    return v;
}

/// Pulls a key out of a section; when absent, records the key as defaulted.
class KeyReader {
  public:
    KeyReader(SectionMap& sections, const std::string& section, Scenario& scenario)
        : map_(sections[section]), section_(section), scenario_(scenario) {}

    ~KeyReader() {
        // leftover keys were never consumed: unknown for this section
    }

    bool has(const std::string& key) const { return map_.count(key) > 0; }

    RawValue take(const std::string& key) {
        auto it = map_.find(key);
        RawValue raw = it->second;
        map_.erase(it);
        return raw;
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return mark_default(key), fallback;
        return to_number(take(key), qualified(key));
    }
    double required_number(const std::string& key) {
        if (!has(key)) throw ScenarioError(qualified(key) + " required");
        return to_number(take(key), qualified(key));
    }
    int integer(const std::string& key, int fallback) {
        if (!has(key)) return mark_default(key), fallback;
        return to_int(take(key), qualified(key));
    }
    int required_integer(const std::string& key) {
        if (!has(key)) throw ScenarioError(qualified(key) + " required");
        return to_int(take(key), qualified(key));
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return mark_default(key), fallback;
        return to_bool(take(key), qualified(key));
    }
    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return mark_default(key), fallback;
        return take(key).text;
    }
    std::string required_text(const std::string& key) {
        if (!has(key)) throw ScenarioError(qualified(key) + " required");
        return take(key).text;
    }
    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        if (!has(key)) return mark_default(key), fallback;
        return to_vec3(take(key), qualified(key));
    }

    std::string qualified(const std::string& key) const { return section_ + "." + key; }

  private:
    void mark_default(const std::string& key) {
        scenario_.defaulted_keys.push_back(qualified(key));
    }

    std::map<std::string, RawValue>& map_;
    std::string section_;
    Scenario& scenario_;
};

void reject_leftovers(const SectionMap& sections) {
    for (const auto& [section, keys] : sections)
        for (const auto& [key, raw] : keys)
            throw ScenarioError("unknown key " + section + "." + key + " (line " +
                                std::to_string(raw.line) + ")");
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

bool Scenario::operator==(const Scenario& other) const {
    return guide.curve_radius_mm == other.guide.curve_radius_mm &&
           guide.deployable_length_mm == other.guide.deployable_length_mm &&
           guide.name == other.guide.name &&
           tool.cutter_diameter_mm == other.tool.cutter_diameter_mm &&
           tool.cutter_length_mm == other.tool.cutter_length_mm &&
           tool.shank_length_mm == other.tool.shank_length_mm &&
           tool.shank_diameter_mm == other.tool.shank_diameter_mm &&
           tool.torque_coil_length_mm == other.tool.torque_coil_length_mm &&
           tool.spindle_rpm == other.tool.spindle_rpm &&
           block.size_mm == other.block.size_mm && block.origin_mm == other.block.origin_mm &&
           block.density_pcf == other.block.density_pcf &&
           block.entry_face == other.block.entry_face && plan == other.plan &&
           dt_s == other.dt_s && h_mm == other.h_mm && strict == other.strict &&
           output_dir == other.output_dir && seed == other.seed;
}

Scenario parse_scenario(const std::string& text) {
    SectionMap sections;
    {
        std::istringstream stream(text);
        std::string line;
        std::string section;
        std::size_t line_no = 0;
        while (std::getline(stream, line)) {
            ++line_no;
            const auto comment = line.find('#');
            if (comment != std::string::npos) line.erase(comment);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ScenarioError("unterminated section header at line " +
                                        std::to_string(line_no));
                section = trim(line.substr(1, line.size() - 2));
                if (!kSections.count(section))
                    throw ScenarioError("unknown section [" + section + "] at line " +
                                        std::to_string(line_no));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ScenarioError("expected key = value at line " + std::to_string(line_no));
            if (section.empty())
                throw ScenarioError("key outside any section at line " + std::to_string(line_no));
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ScenarioError("empty key or value at line " + std::to_string(line_no));
            if (!sections[section].emplace(key, RawValue{value, line_no}).second)
                throw ScenarioError("duplicate key " + section + "." + key + " at line " +
                                    std::to_string(line_no));
        }
    }

    Scenario sc;
    {
        KeyReader guide(sections, "guide", sc);
        sc.guide.curve_radius_mm = guide.required_number("curve_radius_mm");
        sc.guide.deployable_length_mm = guide.required_number("deployable_length_mm");
        sc.guide.name = guide.text("name", "");
    }
    {
        KeyReader tool(sections, "tool", sc);
        sc.tool.cutter_diameter_mm = tool.number("cutter_diameter_mm", 6.75);
        sc.tool.cutter_length_mm = tool.number("cutter_length_mm", 10.0);
        sc.tool.shank_length_mm = tool.number("shank_length_mm", 8.0);
        sc.tool.shank_diameter_mm = tool.number("shank_diameter_mm", 1.75);
        sc.tool.torque_coil_length_mm = tool.number("torque_coil_length_mm", 115.0);
        sc.tool.spindle_rpm = tool.number("spindle_rpm", 8250.0);
    }
    {
        KeyReader block(sections, "block", sc);
        sc.block.size_mm = block.vec3("size_mm", Vec3(60.0, 60.0, 90.0));
        // default placement: centered on the insertion axis, entry face
        // 5 mm beyond the cutter's initial distal point
        const Vec3 default_origin(-0.5 * sc.block.size_mm.x(), -0.5 * sc.block.size_mm.y(),
                                  sc.tool.cutter_length_mm + 5.0);
        sc.block.origin_mm = block.vec3("origin_mm", default_origin);
        sc.block.density_pcf = block.text("density_pcf", "10");
        sc.block.entry_face = block.text("entry_face", "-z");
    }
    {
        KeyReader plan(sections, "plan", sc);
        sc.plan.type = plan.required_text("type");
        const std::string& type = sc.plan.type;
        if (type == "j_shape" || type == "u_shape") {
            sc.plan.depth_mm = (type == "u_shape")
                                   ? plan.number("depth_mm", sc.guide.deployable_length_mm)
                                   : plan.required_number("depth_mm");
            sc.plan.v_ins_mm_per_s = plan.number("v_ins_mm_per_s", 1.6);
        } else if (type == "branches") {
            sc.plan.depth_mm = plan.required_number("depth_mm");
            sc.plan.n_branches = plan.integer("n_branches", 3);
            sc.plan.delta_phi_deg = plan.number("delta_phi_deg", 120.0);
            sc.plan.v_ins_mm_per_s = plan.number("v_ins_mm_per_s", 1.6);
            sc.plan.v_retract_mm_per_s = plan.number("v_retract_mm_per_s", 1.6);
            sc.plan.w_deg_per_s = plan.number("w_deg_per_s", 9.6);
        } else if (type == "stepped_rotation") {
            sc.plan.step_mm = plan.number("step_mm", 10.0);
            sc.plan.n_steps = plan.required_integer("n_steps");
            sc.plan.sweep_deg = plan.number("sweep_deg", 360.0);
            sc.plan.sweep_mode = plan.text("sweep_mode", "alternate");
            sc.plan.v_ins_mm_per_s = plan.number("v_ins_mm_per_s", 1.6);
            sc.plan.w_deg_per_s = plan.number("w_deg_per_s", 9.6);
            if (sc.plan.sweep_mode != "alternate" && sc.plan.sweep_mode != "same_direction")
                throw ScenarioError("plan.sweep_mode must be alternate or same_direction");
        } else if (type == "spiral") {
            sc.plan.depth_mm = plan.required_number("depth_mm");
            sc.plan.v_ins_mm_per_s = plan.number("v_ins_mm_per_s", 0.96);
            sc.plan.w_deg_per_s = plan.number("w_deg_per_s", 4.7);
        } else {
            throw ScenarioError("unknown plan type '" + type + "'; valid types: " + kPlanTypes);
        }
    }
    {
        KeyReader sim(sections, "sim", sc);
        sc.dt_s = sim.number("dt_s", 0.001);
        sc.h_mm = sim.number("h_mm", 0.25);
        sc.strict = sim.boolean("strict", false);
        if (!(sc.dt_s > 0.0)) throw ScenarioError("sim.dt_s must be > 0");
        if (!(sc.h_mm > 0.0)) throw ScenarioError("sim.h_mm must be > 0");
    }
    {
        KeyReader output(sections, "output", sc);
        sc.output_dir = output.text("dir", "out");
        const double seed = output.number("seed", 0.0);
        if (seed < 0.0 || seed != std::floor(seed))
            throw ScenarioError("output.seed must be a non-negative integer");
        sc.seed = static_cast<std::uint64_t>(seed);
    }
    reject_leftovers(sections);

    sc.guide.validate();
    sc.tool.validate();
    sc.block.validate();
    return sc;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "[guide]\n";
    out << "curve_radius_mm = " << format_number(sc.guide.curve_radius_mm) << "\n";
    out << "deployable_length_mm = " << format_number(sc.guide.deployable_length_mm) << "\n";
    if (!sc.guide.name.empty()) out << "name = " << sc.guide.name << "\n";

    out << "\n[tool]\n";
    out << "cutter_diameter_mm = " << format_number(sc.tool.cutter_diameter_mm) << "\n";
    out << "cutter_length_mm = " << format_number(sc.tool.cutter_length_mm) << "\n";
    out << "shank_length_mm = " << format_number(sc.tool.shank_length_mm) << "\n";
    out << "shank_diameter_mm = " << format_number(sc.tool.shank_diameter_mm) << "\n";
    out << "torque_coil_length_mm = " << format_number(sc.tool.torque_coil_length_mm) << "\n";
    out << "spindle_rpm = " << format_number(sc.tool.spindle_rpm) << "\n";

    out << "\n[block]\n";
    out << "size_mm = " << format_number(sc.block.size_mm.x()) << " "
        << format_number(sc.block.size_mm.y()) << " " << format_number(sc.block.size_mm.z())
        << "\n";
    out << "origin_mm = " << format_number(sc.block.origin_mm.x()) << " "
        << format_number(sc.block.origin_mm.y()) << " " << format_number(sc.block.origin_mm.z())
        << "\n";
    out << "density_pcf = " << sc.block.density_pcf << "\n";
    out << "entry_face = " << sc.block.entry_face << "\n";

    out << "\n[plan]\n";
    out << "type = " << sc.plan.type << "\n";
    if (sc.plan.type == "j_shape" || sc.plan.type == "u_shape") {
        out << "depth_mm = " << format_number(sc.plan.depth_mm) << "\n";
        out << "v_ins_mm_per_s = " << format_number(sc.plan.v_ins_mm_per_s) << "\n";
    } else if (sc.plan.type == "branches") {
        out << "depth_mm = " << format_number(sc.plan.depth_mm) << "\n";
        out << "n_branches = " << sc.plan.n_branches << "\n";
        out << "delta_phi_deg = " << format_number(sc.plan.delta_phi_deg) << "\n";
        out << "v_ins_mm_per_s = " << format_number(sc.plan.v_ins_mm_per_s) << "\n";
        out << "v_retract_mm_per_s = " << format_number(sc.plan.v_retract_mm_per_s) << "\n";
        out << "w_deg_per_s = " << format_number(sc.plan.w_deg_per_s) << "\n";
    } else if (sc.plan.type == "stepped_rotation") {
        out << "step_mm = " << format_number(sc.plan.step_mm) << "\n";
        out << "n_steps = " << sc.plan.n_steps << "\n";
        out << "sweep_deg = " << format_number(sc.plan.sweep_deg) << "\n";
        out << "sweep_mode = " << sc.plan.sweep_mode << "\n";
        out << "v_ins_mm_per_s = " << format_number(sc.plan.v_ins_mm_per_s) << "\n";
        out << "w_deg_per_s = " << format_number(sc.plan.w_deg_per_s) << "\n";
    } else if (sc.plan.type == "spiral") {
        out << "depth_mm = " << format_number(sc.plan.depth_mm) << "\n";
        out << "v_ins_mm_per_s = " << format_number(sc.plan.v_ins_mm_per_s) << "\n";
        out << "w_deg_per_s = " << format_number(sc.plan.w_deg_per_s) << "\n";
    }

    out << "\n[sim]\n";
    out << "dt_s = " << format_number(sc.dt_s) << "\n";
    out << "h_mm = " << format_number(sc.h_mm) << "\n";
    out << "strict = " << (sc.strict ? "true" : "false") << "\n";

    out << "\n[output]\n";
    out << "dir = " << sc.output_dir << "\n";
    out << "seed = " << sc.seed << "\n";
    return out.str();
}

MotionPlan make_plan(const Scenario& sc) {
    const PlanSpec& p = sc.plan;
    if (p.type == "j_shape" || p.type == "u_shape")
        return plan_j_or_u_shape(sc.guide, sc.tool, p.depth_mm, p.v_ins_mm_per_s);
    if (p.type == "branches")
        return plan_branches(sc.guide, sc.tool, p.depth_mm, p.n_branches, p.delta_phi_deg,
                             p.v_ins_mm_per_s, p.v_retract_mm_per_s, p.w_deg_per_s);
    if (p.type == "stepped_rotation")
        return plan_stepped_rotation(sc.guide, sc.tool, p.step_mm, p.n_steps, p.sweep_deg,
                                     p.v_ins_mm_per_s, p.w_deg_per_s,
                                     p.sweep_mode == "same_direction"
                                         ? SweepMode::kSameDirection
                                         : SweepMode::kAlternate);
    if (p.type == "spiral")
        return plan_spiral(sc.guide, sc.tool, p.depth_mm, p.v_ins_mm_per_s, p.w_deg_per_s);
    throw ScenarioError("unknown plan type '" + p.type + "'; valid types: " + kPlanTypes);
}

namespace {

void write_trajectory_csv(const std::filesystem::path& path, const ConfigTimeline& timeline,
                          const MotionPlan& plan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for write");
    out << "t_s,s_mm,phi_deg,guide_x_mm,guide_y_mm,guide_z_mm,"
           "tip_x_mm,tip_y_mm,tip_z_mm,tan_x,tan_y,tan_z,label\n";
    char buf[512];
    for (const TimelineSample& sample : timeline.samples) {
        const Pose guide = guide_tip_pose(plan.guide(), sample.config());
        const Vec3 tip = guide.position_mm + plan.tool().cutter_length_mm * guide.tangent;
        std::snprintf(buf, sizeof(buf),
                      "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n",
                      sample.t_s, sample.s_mm, sample.phi_deg, guide.position_mm.x(),
                      guide.position_mm.y(), guide.position_mm.z(), tip.x(), tip.y(), tip.z(),
                      guide.tangent.x(), guide.tangent.y(), guide.tangent.z(),
                      plan.segments()[static_cast<std::size_t>(sample.segment)].label.c_str());
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

ordered_json plan_echo_json(const Scenario& sc) {
    ordered_json j;
    j["type"] = sc.plan.type;
    j["guide_radius_mm"] = sc.guide.curve_radius_mm;
    j["guide_length_mm"] = sc.guide.deployable_length_mm;
    j["cutter_diameter_mm"] = sc.tool.cutter_diameter_mm;
    j["cutter_length_mm"] = sc.tool.cutter_length_mm;
    if (sc.plan.type == "j_shape" || sc.plan.type == "u_shape" || sc.plan.type == "branches" ||
        sc.plan.type == "spiral")
        j["depth_mm"] = sc.plan.depth_mm;
    if (sc.plan.type == "branches") {
        j["n_branches"] = sc.plan.n_branches;
        j["delta_phi_deg"] = sc.plan.delta_phi_deg;
        j["v_retract_mm_per_s"] = sc.plan.v_retract_mm_per_s;
    }
    if (sc.plan.type == "stepped_rotation") {
        j["step_mm"] = sc.plan.step_mm;
        j["n_steps"] = sc.plan.n_steps;
        j["sweep_deg"] = sc.plan.sweep_deg;
        j["sweep_mode"] = sc.plan.sweep_mode;
    }
    j["v_ins_mm_per_s"] = sc.plan.v_ins_mm_per_s;
    if (sc.plan.type == "branches" || sc.plan.type == "stepped_rotation" ||
        sc.plan.type == "spiral")
        j["w_deg_per_s"] = sc.plan.w_deg_per_s;
    j["dt_s"] = sc.dt_s;
    j["h_mm"] = sc.h_mm;
    return j;
}

ordered_json report_to_json(const CavityReport& report) {
    ordered_json j;
    j["plan_label"] = report.plan_label;
    j["entry_diameter_mm"] = report.entry_diameter_mm;
    ordered_json slices = ordered_json::array();
    for (const SliceDiameterEntry& entry : report.slice_diameters)
        slices.push_back({{"depth_mm", entry.depth_mm}, {"diameter_mm", entry.diameter_mm}});
    j["slice_diameters"] = slices;
    j["max_lateral_reach_mm"] = report.max_lateral_reach_mm;
    j["final_lateral_reach_mm"] = report.final_lateral_reach_mm;
    j["tip_angle_change_deg"] = report.tip_angle_change_deg;
    j["removed_volume_mm3"] = report.removed_volume_mm3;
    j["fitted_radius_mm"] = report.fitted_radius_mm;
    j["radius_deviation_pct"] = report.radius_deviation_pct;
    if (report.fitted_radius_voxel_mm)
        j["fitted_radius_voxel_mm"] = *report.fitted_radius_voxel_mm;
    j["notes"] = report.notes;
    return j;
}

}  // namespace

RunArtifacts run_scenario(const Scenario& sc, int workers) {
    namespace fs = std::filesystem;
    if (workers <= 0) {
        workers = 1;
        if (const char* env = std::getenv("CTSDR_WORKERS")) {
            const int parsed = std::atoi(env);
            if (parsed >= 1) workers = parsed;
        }
    }

    const MotionPlan plan = make_plan(sc);
    const ConfigTimeline timeline = integrate_plan(plan, sc.dt_s, Config{}, sc.strict);

    VoxelGrid grid(sc.block, sc.h_mm);
    const CarveResult carved = carve(grid, timeline, sc.guide, sc.tool, workers);

    CavityReport report = build_cavity_report(grid, timeline, plan, sc.plan.type);
    if (timeline.clamped())
        report.notes.push_back("arc length was clamped to the deployable range during "
                               "integration");
    if (carved.boundary_warning)
        report.notes.push_back("cutter initially overlapped a block face other than the "
                               "entry face");

    ordered_json report_json = report_to_json(report);
    report_json["plan"] = plan_echo_json(sc);
    if (sc.plan.type == "spiral") {
        const SpiralPitch pitch =
            check_spiral_pitch(sc.plan.v_ins_mm_per_s, sc.plan.w_deg_per_s, sc.tool);
        report_json["pitch_check"] = {{"pitch_mm", pitch.pitch_mm},
                                      {"satisfied", pitch.satisfied}};
        const SpiralRadii radii = spiral_radii(timeline, sc.guide, sc.tool, sc.block);
        report_json["spiral_radii_mm"] = {{"initial", radii.initial_radius_mm},
                                          {"final", radii.final_radius_mm}};
    }
    report_json["removed_voxel_count"] = grid.removed_count();
    report_json["clamped"] = timeline.clamped();
    report_json["boundary_warning"] = carved.boundary_warning;

    const fs::path out_dir(sc.output_dir);
    fs::create_directories(out_dir);
    RunArtifacts artifacts;
    artifacts.trajectory_csv = out_dir / "trajectory.csv";
    artifacts.cavity_ply = out_dir / "cavity.ply";
    artifacts.mask_bin = out_dir / "mask.bin";
    artifacts.report_json = out_dir / "report.json";
    artifacts.run_log = out_dir / "run.log";
    artifacts.report = report;
    artifacts.carve_result = carved;
    artifacts.timeline_clamped = timeline.clamped();

    std::vector<fs::path> written;
    try {
        write_trajectory_csv(artifacts.trajectory_csv, timeline, plan);
        written.push_back(artifacts.trajectory_csv);

        const TriangleMesh mesh = extract_cavity_mesh(grid);
        write_ply(artifacts.cavity_ply, mesh);
        written.push_back(artifacts.cavity_ply);

        write_mask(artifacts.mask_bin, grid);
        written.push_back(artifacts.mask_bin);

        {
            std::ofstream out(artifacts.report_json);
            if (!out) throw std::runtime_error("cannot open report.json for write");
            out << report_json.dump(2) << "\n";
            if (!out) throw std::runtime_error("write failed for report.json");
        }
        written.push_back(artifacts.report_json);

        {
            std::ofstream log(artifacts.run_log);
            if (!log) throw std::runtime_error("cannot open run.log for write");
            log << "# effective scenario (defaults applied)\n"
                << serialize_scenario(sc) << "\n";
            log << "# defaulted keys\n";
            for (const std::string& key : sc.defaulted_keys) log << "#   " << key << "\n";
            log << "samples " << timeline.samples.size() << "\n";
            log << "removed_voxels " << grid.removed_count() << "\n";
            log << "removed_volume_mm3 " << grid.removed_volume_mm3() << "\n";
            log << "mesh_vertices " << mesh.vertices.size() << "\n";
            log << "mesh_triangles " << mesh.triangles.size() << "\n";
            log << "clamped " << (timeline.clamped() ? "true" : "false") << "\n";
            log << "boundary_warning " << (carved.boundary_warning ? "true" : "false") << "\n";
            log << "workers " << workers << " (no effect on results)\n";
            if (!log) throw std::runtime_error("write failed for run.log");
        }
        written.push_back(artifacts.run_log);
    } catch (...) {
        for (const fs::path& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
    return artifacts;
}

}  // namespace ctsdr
