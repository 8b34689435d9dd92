#pragma once

#include "ctsdr/types.hpp"

namespace ctsdr {

/// Pose of the guide tip for configuration q under the constant-curvature
/// deployment model. The deployed arc lies in the x-z plane before the
/// axial rotation phi is applied about z.
///
/// theta = s/R; position = Rot_z(phi) * (R(1-cos theta), 0, R sin theta);
/// tangent = Rot_z(phi) * (sin theta, 0, cos theta).
Pose guide_tip_pose(const SteeringGuide& guide, const Config& q);

/// Pose of the cutter's distal reference point: the guide tip translated by
/// cutter_length_mm along the tip tangent. The tangent is unchanged.
Pose cutter_pose(const SteeringGuide& guide, const DrillTool& tool, const Config& q);

/// Center of the cutter's distal hemisphere: guide tip + cylinder_length
/// along the tangent.
Vec3 ball_center(const SteeringGuide& guide, const DrillTool& tool, const Config& q);

/// Distance of a pose's position from the insertion axis: sqrt(x^2 + y^2).
double lateral_reach(const Pose& pose);

/// Angle in degrees, in [0, 180], between the tip tangents at q0 and q1.
double tip_angle_change_deg(const SteeringGuide& guide, const Config& q0, const Config& q1);

}  // namespace ctsdr
