#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctsdr/types.hpp"

namespace ctsdr {

/// One timed stretch of piecewise-constant actuation rates.
struct MotionSegment {
    double duration_s = 0.0;
    double v_ins_mm_per_s = 0.0;  // signed insertion rate
    double w_deg_per_s = 0.0;     // signed axial rotation rate
    std::string label;
};

/// An ordered list of segments bound to a guide and tool. Construction
/// verifies that the integrated arc length stays inside
/// [0, deployable_length] at every segment boundary (starting from s = 0).
class MotionPlan {
  public:
    MotionPlan(SteeringGuide guide, DrillTool tool, std::vector<MotionSegment> segments);

    const SteeringGuide& guide() const { return guide_; }
    const DrillTool& tool() const { return tool_; }
    const std::vector<MotionSegment>& segments() const { return segments_; }
    double total_duration_s() const;

  private:
    SteeringGuide guide_;
    DrillTool tool_;
    std::vector<MotionSegment> segments_;
};

struct TimelineSample {
    double t_s = 0.0;
    double s_mm = 0.0;
    double phi_deg = 0.0;
    std::int32_t segment = 0;  // index into the originating plan's segments

    Config config() const { return Config{s_mm, phi_deg}; }
};

struct ClampEvent {
    double t_s = 0.0;
    std::int32_t segment = 0;
    double overrun_mm = 0.0;  // how far the unclamped value left the range
};

/// Integrated configuration samples. Spacing is dt_s within a segment; a
/// shortened final step lands each segment boundary exactly, so boundary
/// configs are independent of dt.
struct ConfigTimeline {
    double dt_s = 0.0;
    std::vector<TimelineSample> samples;
    std::vector<ClampEvent> clamps;

    bool clamped() const { return !clamps.empty(); }
    const TimelineSample& front() const { return samples.front(); }
    const TimelineSample& back() const { return samples.back(); }
};

/// Exact per-segment integration of the plan's piecewise-constant rates.
/// Arc length is clamped to [0, deployable_length]; each clamp is recorded,
/// and throws instead when strict is set.
ConfigTimeline integrate_plan(const MotionPlan& plan, double dt_s, Config initial = {},
                              bool strict = false);

// ---- plan generators for the drilling procedures ----

/// Single constant-rate insertion to depth_mm. A U-shape is the special
/// case depth = full deployable length of a long guide.
MotionPlan plan_j_or_u_shape(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                             double v_ins_mm_per_s = 1.6);

/// n_branches repetitions of [insert, retract fully, reorient by
/// delta_phi]; the reorientation after the last branch is omitted, so the
/// plan has 3n-1 segments. Rotations happen only at s = 0.
MotionPlan plan_branches(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                         int n_branches = 3, double delta_phi_deg = 120.0,
                         double v_ins_mm_per_s = 1.6, double v_retract_mm_per_s = 1.6,
                         double w_reorient_deg_per_s = 9.6);

enum class SweepMode {
    kAlternate,      // partial sweeps reverse direction on every step
    kSameDirection,  // every sweep uses the same sign
};

/// Alternating [insert step_mm, pause-and-sweep sweep_deg] pairs,
/// n_steps times (2n segments). Full 360-degree sweeps always run in one
/// direction; partial sweeps follow SweepMode.
MotionPlan plan_stepped_rotation(const SteeringGuide& guide, const DrillTool& tool,
                                 double step_mm, int n_steps, double sweep_deg = 360.0,
                                 double v_ins_mm_per_s = 1.6, double w_deg_per_s = 9.6,
                                 SweepMode mode = SweepMode::kAlternate);

/// One segment with both rates active, producing a helical tip path.
MotionPlan plan_spiral(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                       double v_ins_mm_per_s = 0.96, double w_deg_per_s = 4.7);

struct SpiralPitch {
    double pitch_mm = 0.0;  // insertion advance per full revolution
    bool satisfied = false; // pitch <= cutter length
};

/// pitch = v * 360 / |w|; satisfied when one revolution completes before
/// the tool advances a full cutter length.
SpiralPitch check_spiral_pitch(double v_ins_mm_per_s, double w_deg_per_s, const DrillTool& tool);

}  // namespace ctsdr
