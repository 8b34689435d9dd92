#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctsdr/carve.hpp"
#include "ctsdr/motion.hpp"
#include "ctsdr/types.hpp"

namespace ctsdr {

struct CircleFit {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    double rms_mm = 0.0;  // RMS of |p - center| - radius
    int iterations = 0;
};

/// Least-squares circle through 2-D points: algebraic (Kasa) initialization
/// refined by geometric Levenberg-Marquardt on sum(|p - c| - r)^2,
/// converged to 1e-10. Throws on fewer than three points or on inputs
/// collinear within 1e-9.
CircleFit fit_circle(const std::vector<Vec2>& points);

/// Guide-tip position at every timeline sample (trajectory-mode centerline).
std::vector<Vec3> centerline_from_trajectory(const ConfigTimeline& timeline,
                                             const SteeringGuide& guide);

/// Per-z-slice centroids of the removed voxels (voxel-mode centerline).
/// Slices within trim_mm of the occupied z-extremes are dropped to avoid
/// end-cap bias. Throws when a slice is branched (multiple blobs) or far
/// wider than the cutter - the centerline is ambiguous for cavities.
std::vector<Vec3> centerline_from_grid(const VoxelGrid& grid, const DrillTool& tool,
                                       double trim_mm = 0.0);

struct SliceDiameterEntry {
    double depth_mm = 0.0;
    double diameter_mm = 0.0;
};

/// Metrology extracted from one completed run.
struct CavityReport {
    std::string plan_label;
    double entry_diameter_mm = 0.0;
    std::vector<SliceDiameterEntry> slice_diameters;
    double max_lateral_reach_mm = 0.0;
    double final_lateral_reach_mm = 0.0;  // cutter tip reach at the last sample
    double tip_angle_change_deg = 0.0;
    double removed_volume_mm3 = 0.0;
    double fitted_radius_mm = 0.0;
    double radius_deviation_pct = 0.0;
    std::optional<double> fitted_radius_voxel_mm;  // voxel-centerline cross-check
    std::vector<std::string> notes;
};

/// Populates every report field from a carved grid plus the timeline that
/// produced it. Reach and angle metrics come from the trajectory (the model
/// of record); diameters and volume come from the voxel mask. For stepped
/// plans the slice planes sit at each sweep's ball-center height, otherwise
/// at five evenly spaced depths through the cavity.
CavityReport build_cavity_report(const VoxelGrid& grid, const ConfigTimeline& timeline,
                                 const MotionPlan& plan, const std::string& plan_label);

/// Circle fit of each insertion stretch (v > 0, w = 0) of the timeline,
/// in bending-plane coordinates (lateral distance, z). For a branches plan
/// this yields one fit per branch.
std::vector<CircleFit> insertion_segment_fits(const ConfigTimeline& timeline,
                                              const MotionPlan& plan);

struct SpiralRadii {
    double initial_radius_mm = 0.0;
    double final_radius_mm = 0.0;
};

/// Lateral reach of the cutter tip at the first and last samples whose tip
/// lies inside the block. Throws if the tip never enters the block.
SpiralRadii spiral_radii(const ConfigTimeline& timeline, const SteeringGuide& guide,
                         const DrillTool& tool, const BoneBlock& block);

}  // namespace ctsdr
