// Acceptance suite: runs the bundled scenario corpus end to end and checks
// every published target at its stated tolerance, one line per criterion.
// Usage: acceptance <scenario_dir> <scratch_dir>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ctsdr/analysis.hpp"
#include "ctsdr/carve.hpp"
#include "ctsdr/forces.hpp"
#include "ctsdr/kinematics.hpp"
#include "ctsdr/motion.hpp"
#include "ctsdr/scenario.hpp"

using namespace ctsdr;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_lines;

void record(int id, const std::string& label, bool passed, const std::string& detail) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "[%s] C%d %s: %s", passed ? "PASS" : "FAIL", id,
                  label.c_str(), detail.c_str());
    std::puts(buf);
    std::fflush(stdout);
    if (!passed) ++g_failures;
}

void criterion(int id, const std::string& label, const std::function<std::string()>& body) {
    try {
        record(id, label, true, body());
    } catch (const std::exception& err) {
        record(id, label, false, err.what());
    }
}

void expect(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

struct BundledRun {
    Scenario scenario;
    RunArtifacts artifacts;
    double wall_seconds = 0.0;
};

BundledRun run_bundled(const fs::path& scenario_dir, const fs::path& scratch,
                       const std::string& name) {
    BundledRun run;
    run.scenario = parse_scenario_file(scenario_dir / (name + ".scn"));
    run.scenario.output_dir = (scratch / name).string();
    const auto start = std::chrono::steady_clock::now();
    run.artifacts = run_scenario(run.scenario, 0);
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

Scenario j_shape_scenario(const fs::path& scratch) {
    Scenario sc = parse_scenario(R"(
[guide]
curve_radius_mm = 71.1
deployable_length_mm = 120

[block]
size_mm = 26 14 56
origin_mm = -7 -7 0
density_pcf = custom

[plan]
type = j_shape
depth_mm = 45
)");
    sc.output_dir = (scratch / "j_shape").string();
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <scenario_dir> <scratch_dir>\n");
        return 64;
    }
    const fs::path scenario_dir(argv[1]);
    const fs::path scratch(argv[2]);
    fs::create_directories(scratch);

    // The five bundled runs feed several criteria; run them once up front.
    BundledRun u_shape, branches, stepped_full, stepped_partial, spiral;
    try {
        u_shape = run_bundled(scenario_dir, scratch, "u_shape");
        branches = run_bundled(scenario_dir, scratch, "branches");
        stepped_full = run_bundled(scenario_dir, scratch, "stepped_rotation_full");
        stepped_partial = run_bundled(scenario_dir, scratch, "stepped_rotation_partial");
        spiral = run_bundled(scenario_dir, scratch, "spiral");
    } catch (const std::exception& err) {
        std::fprintf(stderr, "fatal: bundled scenario corpus failed to run: %s\n", err.what());
        return 1;
    }

    criterion(1, "u-shape reach", [&] {
        const CavityReport& report = u_shape.artifacts.report;
        const double theta = 120.0 / 39.9;
        const double closed_form = 39.9 * (1.0 - std::cos(theta)) + 10.0 * std::sin(theta);
        const double vs_measured = std::abs(report.max_lateral_reach_mm - 82.0) / 82.0;
        expect(vs_measured <= 0.10, fmt("max reach %.3f mm is %.1f%% from 82 mm",
                                        report.max_lateral_reach_mm, 100.0 * vs_measured));
        const double vs_oracle =
            std::abs(report.final_lateral_reach_mm - closed_form) / closed_form;
        expect(vs_oracle <= 0.001, fmt("final reach %.6f mm vs closed form %.6f mm",
                                       report.final_lateral_reach_mm, closed_form));
        expect(u_shape.wall_seconds < 60.0,
               fmt("run took %.1f s (budget 60 s)", u_shape.wall_seconds));
        expect(u_shape.scenario.h_mm == 0.25, "scenario resolution drifted from 0.25 mm");
        return fmt("max reach %.3f mm (%.1f%% of 82 mm), closed form %.4f matched to %.1e, "
                   "%.1f s at h=0.25",
                   report.max_lateral_reach_mm, 100.0 * vs_measured, closed_form, vs_oracle,
                   u_shape.wall_seconds);
    });

    criterion(2, "u-shape tip orientation", [&] {
        const CavityReport& report = u_shape.artifacts.report;
        const double ideal = rad_to_deg(120.0 / 39.9);
        expect(std::abs(report.tip_angle_change_deg - ideal) <= 1e-6,
               fmt("angle %.9f deg vs closed form %.9f deg", report.tip_angle_change_deg, ideal));
        const double vs_measured = std::abs(report.tip_angle_change_deg - 153.0) / 153.0;
        expect(vs_measured <= 0.15,
               fmt("angle %.2f deg is %.1f%% from the measured 153 deg",
                   report.tip_angle_change_deg, 100.0 * vs_measured));
        bool documented = false;
        for (const std::string& note : report.notes)
            if (note.find("ideal") != std::string::npos) documented = true;
        expect(documented, "report notes do not document the ideal-vs-measured gap");
        return fmt("angle %.4f deg (closed form to 1e-6, %.1f%% from 153 deg, noted in report)",
                   report.tip_angle_change_deg, 100.0 * vs_measured);
    });

    criterion(3, "stepped-rotation ring diameters", [&] {
        const auto& slices = stepped_full.artifacts.report.slice_diameters;
        expect(slices.size() >= 3, fmt("expected >=3 ring slices, got %zu", slices.size()));
        const double first = slices[0].diameter_mm;
        const double third = slices[2].diameter_mm;
        const double dev1 = std::abs(first - 10.34) / 10.34;
        const double dev3 = std::abs(third - 26.64) / 26.64;
        expect(dev1 <= 0.15, fmt("first ring %.2f mm is %.1f%% from 10.34", first, 100 * dev1));
        expect(dev3 <= 0.15, fmt("third ring %.2f mm is %.1f%% from 26.64", third, 100 * dev3));
        for (std::size_t i = 1; i < slices.size(); ++i)
            expect(slices[i].diameter_mm > slices[i - 1].diameter_mm,
                   fmt("ring %zu (%.2f) not wider than ring %zu (%.2f)", i + 1,
                       slices[i].diameter_mm, i, slices[i - 1].diameter_mm));
        // the ideal model must not exceed the physical system's 3.4% radius
        // deviation on the same procedure
        expect(stepped_full.artifacts.report.radius_deviation_pct <= 3.4,
               fmt("stepped-run radius deviation %.3f%% exceeds 3.4%%",
                   stepped_full.artifacts.report.radius_deviation_pct));
        return fmt("rings %.2f / %.2f / %.2f / %.2f mm; first %.1f%% of 10.34, third %.1f%% of "
                   "26.64, strictly increasing",
                   slices[0].diameter_mm, slices[1].diameter_mm, slices[2].diameter_mm,
                   slices.size() > 3 ? slices[3].diameter_mm : 0.0, 100 * dev1, 100 * dev3);
    });

    criterion(4, "radius metrology", [&] {
        const double branch_dev = branches.artifacts.report.radius_deviation_pct;
        expect(branch_dev <= 1.0,
               fmt("branches trajectory fit off by %.3f%% (limit 1%%)", branch_dev));

        Scenario j = j_shape_scenario(scratch);
        const RunArtifacts artifacts = run_scenario(j, 0);
        expect(artifacts.report.fitted_radius_voxel_mm.has_value(),
               "voxel-centerline cross-check missing from the j-shape report");
        const double voxel_dev =
            100.0 * std::abs(*artifacts.report.fitted_radius_voxel_mm - 71.1) / 71.1;
        expect(voxel_dev <= 1.0, fmt("voxel centerline fit off by %.3f%%", voxel_dev));
        return fmt("branches trajectory fit %.4f%% off the guide; j-shape voxel centerline "
                   "%.3f%% off (both under the 1%% bound, tighter than the physical 2.6/3.4%%)",
                   branch_dev, voxel_dev);
    });

    criterion(5, "spiral properties", [&] {
        const Scenario& sc = spiral.scenario;
        const MotionPlan plan = make_plan(sc);
        const ConfigTimeline timeline = integrate_plan(plan, sc.dt_s);
        const double expected_pitch = sc.plan.v_ins_mm_per_s * 360.0 / sc.plan.w_deg_per_s;
        const double measured_pitch =
            timeline.back().s_mm / timeline.back().phi_deg * 360.0;
        expect(std::abs(measured_pitch - expected_pitch) / expected_pitch <= 0.01,
               fmt("trajectory pitch %.3f vs v*360/w %.3f", measured_pitch, expected_pitch));

        double prev = -1.0;
        for (const TimelineSample& sample : timeline.samples) {
            const double reach = lateral_reach(cutter_pose(sc.guide, sc.tool, sample.config()));
            expect(reach >= prev - 1e-9, fmt("lateral radius shrank at t=%.3f s", sample.t_s));
            prev = reach;
        }

        const SpiralPitch pitch =
            check_spiral_pitch(sc.plan.v_ins_mm_per_s, sc.plan.w_deg_per_s, sc.tool);
        expect(std::abs(pitch.pitch_mm - 73.53) <= 0.01,
               fmt("pitch check %.4f mm, expected 73.53", pitch.pitch_mm));
        expect(!pitch.satisfied, "pitch check should report the speed pairing as violated");
        return fmt("helix pitch %.2f mm (= v*360/w within 1%%), lateral radius monotone, pitch "
                   "check reports 73.53 mm violated; reference spiral radii not reproducible "
                   "(source run's total depth unrecorded), property checks substitute",
                   measured_pitch);
    });

    criterion(6, "carve fidelity", [&] {
        const DrillTool tool{};
        const SteeringGuide straight{1e6, 100.0, "straight"};
        BoneBlock block;
        block.size_mm = Vec3(12.0, 12.0, 30.0);
        block.origin_mm = Vec3(-6.0, -6.0, tool.cylinder_length_mm());
        block.density_pcf = "custom";
        const double r = tool.ball_radius_mm();
        const double analytic = kPi * r * r * 20.0 + (2.0 / 3.0) * kPi * r * r * r;
        const ConfigTimeline timeline =
            integrate_plan(plan_j_or_u_shape(straight, tool, 20.0), 0.001);

        VoxelGrid coarse(block, 0.25);
        carve(coarse, timeline, straight, tool, 2);
        const double dev_coarse = std::abs(coarse.removed_volume_mm3() - analytic) / analytic;
        expect(dev_coarse <= 0.05,
               fmt("h=0.25 volume off by %.2f%% (limit 5%%)", 100 * dev_coarse));

        VoxelGrid fine(block, 0.125);
        carve(fine, timeline, straight, tool, 2);
        const double dev_fine = std::abs(fine.removed_volume_mm3() - analytic) / analytic;
        expect(dev_fine <= 0.03, fmt("h=0.125 volume off by %.2f%% (limit 3%%)", 100 * dev_fine));

        const CarveResult again = carve(coarse, timeline, straight, tool, 2);
        expect(again.removed_count == 0, "re-carving removed voxels (not idempotent)");

        VoxelGrid w1(block, 0.25), w2(block, 0.25), w8(block, 0.25);
        carve(w1, timeline, straight, tool, 1);
        carve(w2, timeline, straight, tool, 2);
        carve(w8, timeline, straight, tool, 8);
        expect(w1.mask() == w2.mask() && w1.mask() == w8.mask(),
               "masks differ across 1/2/8 workers");
        expect(w1.removed_count() == w8.removed_count(), "counts differ across workers");
        return fmt("volume %.1f mm^3 vs analytic %.1f: %.2f%% at h=0.25, %.2f%% at h=0.125; "
                   "idempotent; masks bit-identical across 1/2/8 workers",
                   coarse.removed_volume_mm3(), analytic, 100 * dev_coarse, 100 * dev_fine);
    });

    criterion(7, "branches and entry holes", [&] {
        const MotionPlan plan = make_plan(branches.scenario);
        const ConfigTimeline timeline = integrate_plan(plan, branches.scenario.dt_s);
        const std::vector<CircleFit> fits = insertion_segment_fits(timeline, plan);
        expect(fits.size() == 3, fmt("expected 3 branch fits, got %zu", fits.size()));
        for (const CircleFit& fit : fits) {
            const double dev = std::abs(fit.radius - 71.1) / 71.1;
            expect(dev <= 0.01, fmt("branch radius %.3f off the guide by %.2f%%", fit.radius,
                                    100 * dev));
        }
        for (std::size_t i = 0; i < fits.size(); ++i)
            for (std::size_t j = i + 1; j < fits.size(); ++j) {
                const double gap = std::abs(fits[i].radius - fits[j].radius) / fits[j].radius;
                expect(gap <= 0.005, fmt("branch fits %zu and %zu disagree by %.3f%%", i + 1,
                                         j + 1, 100 * gap));
            }

        const Scenario j = j_shape_scenario(scratch);
        const RunArtifacts j_run = run_scenario(j, 0);
        struct Entry {
            const char* name;
            double diameter;
            double h;
        };
        const Entry entries[] = {
            {"u_shape", u_shape.artifacts.report.entry_diameter_mm, u_shape.scenario.h_mm},
            {"branches", branches.artifacts.report.entry_diameter_mm, branches.scenario.h_mm},
            {"stepped_full", stepped_full.artifacts.report.entry_diameter_mm,
             stepped_full.scenario.h_mm},
            {"stepped_partial", stepped_partial.artifacts.report.entry_diameter_mm,
             stepped_partial.scenario.h_mm},
            {"spiral", spiral.artifacts.report.entry_diameter_mm, spiral.scenario.h_mm},
            {"j_shape", j_run.report.entry_diameter_mm, j.h_mm},
        };
        double lo = 1e9, hi = 0.0;
        for (const Entry& entry : entries) {
            expect(std::abs(entry.diameter - 6.75) <= 2.0 * entry.h,
                   fmt("%s entry hole %.3f mm outside 6.75 +/- %.2f", entry.name, entry.diameter,
                       2.0 * entry.h));
            lo = std::min(lo, entry.diameter);
            hi = std::max(hi, entry.diameter);
        }
        return fmt("3 branch fits agree within 0.5%% and sit within 1%% of the guide; entry "
                   "holes %.3f-%.3f mm across all six plan runs (band 6.75 +/- 0.5)",
                   lo, hi);
    });

    criterion(8, "force smoothing fixtures", [&] {
        ForceSeries constant;
        constant.fx_n.assign(400, 5.0);
        constant.fy_n.assign(400, 0.0);
        constant.fz_n.assign(400, 0.0);
        const ForceSeries smooth_const = smooth_forces(constant, 100);
        for (double v : smooth_const.fx_n)
            expect(v == 5.0, "constant series changed under smoothing");

        ForceSeries impulse;
        impulse.fx_n.assign(1000, 0.0);
        impulse.fy_n.assign(1000, 0.0);
        impulse.fz_n.assign(1000, 0.0);
        impulse.fx_n[500] = 1.0;
        const double peak = smooth_forces(impulse, 100).fx_n[500];
        expect(std::abs(peak - 1.0 / 99.0) <= 1e-15,
               fmt("impulse response %.17g != 1/99", peak));

        std::mt19937 rng(17);
        std::uniform_real_distribution<double> draw(-3.0, 3.0);
        ForceSeries a, b, combo;
        for (int i = 0; i < 512; ++i) {
            a.fx_n.push_back(draw(rng));
            a.fy_n.push_back(draw(rng));
            a.fz_n.push_back(draw(rng));
            b.fx_n.push_back(draw(rng));
            b.fy_n.push_back(draw(rng));
            b.fz_n.push_back(draw(rng));
        }
        combo = a;
        for (std::size_t i = 0; i < combo.size(); ++i) {
            combo.fx_n[i] = 1.75 * a.fx_n[i] - 0.5 * b.fx_n[i];
            combo.fy_n[i] = 1.75 * a.fy_n[i] - 0.5 * b.fy_n[i];
            combo.fz_n[i] = 1.75 * a.fz_n[i] - 0.5 * b.fz_n[i];
        }
        const ForceSeries sa = smooth_forces(a, 100);
        const ForceSeries sb = smooth_forces(b, 100);
        const ForceSeries sc = smooth_forces(combo, 100);
        for (std::size_t i = 0; i < sc.size(); ++i)
            expect(std::abs(sc.fx_n[i] - (1.75 * sa.fx_n[i] - 0.5 * sb.fx_n[i])) <= 1e-12,
                   "smoothing is not linear within 1e-12");
        return "constant invariance exact, mid-series impulse -> 1/99, linearity within 1e-12; "
               "recorded-drilling max-force reference excluded (source data unavailable)";
    });

    criterion(9, "kinematics and plan property suites", [&] {
        std::mt19937 rng(60601);
        std::uniform_real_distribution<double> r_draw(5.0, 200.0);
        std::uniform_real_distribution<double> frac(0.0, 1.0);
        std::uniform_real_distribution<double> phi_draw(-720.0, 720.0);

        for (int i = 0; i < 1000; ++i) {  // rotation equivariance, 1e-12
            const double radius = r_draw(rng);
            const SteeringGuide g{radius, radius * 2.0 * kPi * 0.99, ""};
            const double s = frac(rng) * radius * 2.0;
            const double phi = phi_draw(rng);
            const Pose base = guide_tip_pose(g, {s, 0.0});
            const Pose rot = guide_tip_pose(g, {s, phi});
            const double c = std::cos(deg_to_rad(phi)), si = std::sin(deg_to_rad(phi));
            const Vec3 expected(c * base.position_mm.x() - si * base.position_mm.y(),
                                si * base.position_mm.x() + c * base.position_mm.y(),
                                base.position_mm.z());
            expect((rot.position_mm - expected).norm() <= 1e-12,
                   "rotation equivariance broken beyond 1e-12");
        }

        for (int i = 0; i < 1000; ++i) {  // chord identity, 1e-9
            const double radius = r_draw(rng);
            const SteeringGuide guide{radius, radius * 2.0 * kPi * 0.99, ""};
            const double s = frac(rng) * guide.deployable_length_mm;
            const Pose pose = guide_tip_pose(guide, {s, phi_draw(rng)});
            const double chord = 2.0 * radius * std::abs(std::sin(s / (2.0 * radius)));
            expect(std::abs(pose.position_mm.norm() - chord) <= 1e-9,
                   "chord identity broken beyond 1e-9");
        }

        std::uniform_real_distribution<double> expo(-12.0, -4.0);
        for (int i = 0; i < 1000; ++i) {  // small-angle limit
            const double radius = r_draw(rng);
            const SteeringGuide guide{radius, radius, ""};
            const double s = radius * std::pow(10.0, expo(rng));
            const Pose pose = guide_tip_pose(guide, {s, 0.0});
            const double err = (pose.position_mm - Vec3(0, 0, s)).norm();
            expect(err <= std::max(1e-6 * s, 0.51 * s * s / radius),
                   "small-angle limit bound exceeded");
        }

        const SteeringGuide guide{39.9, 120.0, ""};
        const DrillTool tool{};
        std::uniform_real_distribution<double> dur(0.2, 6.0);
        std::uniform_real_distribution<double> w_draw(-20.0, 20.0);
        for (int trial = 0; trial < 1000; ++trial) {  // plan reversibility, 1e-9
            std::vector<MotionSegment> segments;
            double s = 0.0;
            const int n = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < n; ++i) {
                const double target = (0.05 + 0.9 * frac(rng)) * 120.0;
                const double duration = dur(rng);
                segments.push_back({duration, (target - s) / duration, w_draw(rng), "seg"});
                s = target;
            }
            std::vector<MotionSegment> reversed(segments.rbegin(), segments.rend());
            for (MotionSegment& seg : reversed) {
                seg.v_ins_mm_per_s = -seg.v_ins_mm_per_s;
                seg.w_deg_per_s = -seg.w_deg_per_s;
            }
            std::vector<MotionSegment> round_trip = segments;
            round_trip.insert(round_trip.end(), reversed.begin(), reversed.end());
            const ConfigTimeline timeline =
                integrate_plan(MotionPlan(guide, tool, round_trip), 0.05);
            expect(std::abs(timeline.back().s_mm) <= 1e-9 &&
                       std::abs(timeline.back().phi_deg) <= 1e-9,
                   "plan reversibility broken beyond 1e-9");
        }
        return "rotation equivariance (1e-12), chord identity (1e-9), small-angle limit and "
               "plan reversibility (1e-9): 1000 randomized cases each";
    });

    if (g_failures == 0)
        std::puts("acceptance: all criteria passed");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
