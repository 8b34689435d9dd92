#include "ctsdr/motion.hpp"

#include <cmath>
#include <cstdio>

namespace ctsdr {

namespace {

double snap_to_range(double value, double lo, double hi) {
    if (std::abs(value - lo) <= kSnapTol) return lo;
    if (std::abs(value - hi) <= kSnapTol) return hi;
    return value;
}

std::string indexed_label(const char* stem, int index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%d", stem, index);
    return buf;
}

}  // namespace

MotionPlan::MotionPlan(SteeringGuide guide, DrillTool tool, std::vector<MotionSegment> segments)
    : guide_(std::move(guide)), tool_(tool), segments_(std::move(segments)) {
    guide_.validate();
    tool_.validate();
    if (segments_.empty()) throw std::invalid_argument("MotionPlan: no segments");

    double s = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const MotionSegment& seg = segments_[i];
        if (!(seg.duration_s > 0.0))
            throw std::invalid_argument("MotionPlan: segment duration must be > 0");
        if (!std::isfinite(seg.v_ins_mm_per_s) || !std::isfinite(seg.w_deg_per_s))
            throw std::invalid_argument("MotionPlan: segment rates must be finite");
        s = snap_to_range(s + seg.v_ins_mm_per_s * seg.duration_s, 0.0,
                          guide_.deployable_length_mm);
        if (s < 0.0 || s > guide_.deployable_length_mm)
            throw std::invalid_argument("MotionPlan: integrated arc length leaves [0, "
                                        "deployable_length] at a segment boundary");
    }
}

double MotionPlan::total_duration_s() const {
    double total = 0.0;
    for (const MotionSegment& seg : segments_) total += seg.duration_s;
    return total;
}

ConfigTimeline integrate_plan(const MotionPlan& plan, double dt_s, Config initial, bool strict) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("integrate_plan: dt_s must be > 0");
    const double length = plan.guide().deployable_length_mm;
    if (initial.s_mm < -kSnapTol || initial.s_mm > length + kSnapTol)
        throw std::invalid_argument("integrate_plan: initial arc length out of range");

    ConfigTimeline timeline;
    timeline.dt_s = dt_s;
    std::size_t total = 1;
    for (const MotionSegment& seg : plan.segments())
        total += static_cast<std::size_t>(seg.duration_s / dt_s) + 2;
    timeline.samples.reserve(total);

    double t0 = 0.0;
    double s0 = snap_to_range(initial.s_mm, 0.0, length);
    double phi0 = initial.phi_deg;
    timeline.samples.push_back({0.0, s0, phi0, 0});

    for (std::size_t i = 0; i < plan.segments().size(); ++i) {
        const MotionSegment& seg = plan.segments()[i];
        const auto seg_idx = static_cast<std::int32_t>(i);
        bool clamp_recorded = false;

        auto emit = [&](double t, double s_raw, double phi) {
            double s = snap_to_range(s_raw, 0.0, length);
            if (s < 0.0 || s > length) {
                const double clamped_s = std::clamp(s, 0.0, length);
                if (!clamp_recorded) {
                    timeline.clamps.push_back({t, seg_idx, s - clamped_s});
                    clamp_recorded = true;
                    if (strict)
                        throw std::runtime_error(
                            "integrate_plan: arc length clamped in segment '" + seg.label +
                            "' (strict mode)");
                }
                s = clamped_s;
            }
            timeline.samples.push_back({t, s, phi, seg_idx});
        };

        const auto n_full = static_cast<std::int64_t>(seg.duration_s / dt_s + kSnapTol);
        const double remainder = seg.duration_s - static_cast<double>(n_full) * dt_s;
        const bool partial = remainder > kSnapTol * std::max(1.0, seg.duration_s);
        const std::int64_t n_interior = partial ? n_full : n_full - 1;

        for (std::int64_t k = 1; k <= n_interior; ++k) {
            const double dt_k = static_cast<double>(k) * dt_s;
            emit(t0 + dt_k, s0 + seg.v_ins_mm_per_s * dt_k, phi0 + seg.w_deg_per_s * dt_k);
        }
        // land the boundary exactly, in closed form from the segment start
        emit(t0 + seg.duration_s, s0 + seg.v_ins_mm_per_s * seg.duration_s,
             phi0 + seg.w_deg_per_s * seg.duration_s);

        t0 += seg.duration_s;
        s0 = timeline.samples.back().s_mm;
        phi0 = timeline.samples.back().phi_deg;
    }
    return timeline;
}

MotionPlan plan_j_or_u_shape(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                             double v_ins_mm_per_s) {
    if (!(depth_mm > 0.0)) throw std::invalid_argument("plan_j_or_u_shape: depth_mm must be > 0");
    if (depth_mm > guide.deployable_length_mm + kSnapTol)
        throw std::invalid_argument("plan_j_or_u_shape: depth_mm exceeds deployable length");
    if (!(v_ins_mm_per_s > 0.0))
        throw std::invalid_argument("plan_j_or_u_shape: insertion speed must be > 0");
    return MotionPlan(guide, tool,
                      {{depth_mm / v_ins_mm_per_s, v_ins_mm_per_s, 0.0, "insert"}});
}

MotionPlan plan_branches(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                         int n_branches, double delta_phi_deg, double v_ins_mm_per_s,
                         double v_retract_mm_per_s, double w_reorient_deg_per_s) {
    if (n_branches < 1) throw std::invalid_argument("plan_branches: n_branches must be >= 1");
    if (!(depth_mm > 0.0) || depth_mm > guide.deployable_length_mm + kSnapTol)
        throw std::invalid_argument("plan_branches: invalid depth_mm");
    if (!(v_ins_mm_per_s > 0.0) || !(v_retract_mm_per_s > 0.0))
        throw std::invalid_argument("plan_branches: speeds must be > 0");
    if (n_branches > 1) {
        if (!std::isfinite(delta_phi_deg) || delta_phi_deg == 0.0)
            throw std::invalid_argument("plan_branches: delta_phi_deg must be nonzero");
        if (!(w_reorient_deg_per_s > 0.0))
            throw std::invalid_argument("plan_branches: reorientation speed must be > 0");
    }

    std::vector<MotionSegment> segments;
    segments.reserve(static_cast<std::size_t>(n_branches) * 3 - 1);
    const double w_signed = delta_phi_deg >= 0.0 ? w_reorient_deg_per_s : -w_reorient_deg_per_s;
    for (int b = 1; b <= n_branches; ++b) {
        segments.push_back({depth_mm / v_ins_mm_per_s, v_ins_mm_per_s, 0.0,
                            indexed_label("branch_insert_", b)});
        segments.push_back({depth_mm / v_retract_mm_per_s, -v_retract_mm_per_s, 0.0,
                            indexed_label("branch_retract_", b)});
        if (b < n_branches)
            segments.push_back({std::abs(delta_phi_deg) / w_reorient_deg_per_s, 0.0, w_signed,
                                indexed_label("reorient_", b)});
    }
    return MotionPlan(guide, tool, std::move(segments));
}

MotionPlan plan_stepped_rotation(const SteeringGuide& guide, const DrillTool& tool, double step_mm,
                                 int n_steps, double sweep_deg, double v_ins_mm_per_s,
                                 double w_deg_per_s, SweepMode mode) {
    if (n_steps < 1) throw std::invalid_argument("plan_stepped_rotation: n_steps must be >= 1");
    if (!(step_mm > 0.0)) throw std::invalid_argument("plan_stepped_rotation: step_mm must be > 0");
    if (step_mm * n_steps > guide.deployable_length_mm + kSnapTol)
        throw std::invalid_argument(
            "plan_stepped_rotation: n_steps * step_mm exceeds deployable length");
    if (!(sweep_deg > 0.0) || sweep_deg > 360.0)
        throw std::invalid_argument("plan_stepped_rotation: sweep_deg must be in (0, 360]");
    if (!(v_ins_mm_per_s > 0.0) || !(w_deg_per_s > 0.0))
        throw std::invalid_argument("plan_stepped_rotation: speeds must be > 0");

    const bool alternate = mode == SweepMode::kAlternate && sweep_deg < 360.0;
    std::vector<MotionSegment> segments;
    segments.reserve(static_cast<std::size_t>(2 * n_steps));
    for (int k = 1; k <= n_steps; ++k) {
        segments.push_back({step_mm / v_ins_mm_per_s, v_ins_mm_per_s, 0.0,
                            indexed_label("step_insert_", k)});
        const double sign = (alternate && k % 2 == 0) ? -1.0 : 1.0;
        segments.push_back({sweep_deg / w_deg_per_s, 0.0, sign * w_deg_per_s,
                            indexed_label("step_sweep_", k)});
    }
    return MotionPlan(guide, tool, std::move(segments));
}

MotionPlan plan_spiral(const SteeringGuide& guide, const DrillTool& tool, double depth_mm,
                       double v_ins_mm_per_s, double w_deg_per_s) {
    if (!(depth_mm > 0.0) || depth_mm > guide.deployable_length_mm + kSnapTol)
        throw std::invalid_argument("plan_spiral: invalid depth_mm");
    if (!(v_ins_mm_per_s > 0.0))
        throw std::invalid_argument("plan_spiral: insertion speed must be > 0");
    if (w_deg_per_s == 0.0 || !std::isfinite(w_deg_per_s))
        throw std::invalid_argument("plan_spiral: rotation speed must be nonzero");
    return MotionPlan(guide, tool,
                      {{depth_mm / v_ins_mm_per_s, v_ins_mm_per_s, w_deg_per_s, "spiral"}});
}

SpiralPitch check_spiral_pitch(double v_ins_mm_per_s, double w_deg_per_s, const DrillTool& tool) {
    if (w_deg_per_s == 0.0)
        throw std::domain_error("check_spiral_pitch: rotation speed is zero (infinite pitch)");
    SpiralPitch result;
    result.pitch_mm = v_ins_mm_per_s * 360.0 / std::abs(w_deg_per_s);
    result.satisfied = result.pitch_mm <= tool.cutter_length_mm + 1e-12;
    return result;
}

}  // namespace ctsdr
