#include "ctsdr/kinematics.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace ctsdr {

namespace {

double checked_arc_length(const SteeringGuide& guide, const Config& q) {
    if (!(guide.curve_radius_mm > 0.0))
        throw std::domain_error("guide_tip_pose: curve radius must be > 0");
    if (q.s_mm < -kSnapTol || q.s_mm > guide.deployable_length_mm + kSnapTol)
        throw std::domain_error("guide_tip_pose: insertion arc length out of range");
    return std::clamp(q.s_mm, 0.0, guide.deployable_length_mm);
}

}  // namespace

Pose guide_tip_pose(const SteeringGuide& guide, const Config& q) {
    const double s = checked_arc_length(guide, q);
    const double radius = guide.curve_radius_mm;
    const double theta = s / radius;
    const double phi = deg_to_rad(q.phi_deg);

    // 2 sin^2(theta/2) == 1 - cos(theta), accurate for small arcs.
    const double half = std::sin(0.5 * theta);
    const double x = radius * 2.0 * half * half;
    const double z = radius * std::sin(theta);

    const double c = std::cos(phi);
    const double si = std::sin(phi);
    Pose pose;
    pose.position_mm = Vec3(c * x, si * x, z);
    pose.tangent = Vec3(c * std::sin(theta), si * std::sin(theta), std::cos(theta));
    return pose;
}

Pose cutter_pose(const SteeringGuide& guide, const DrillTool& tool, const Config& q) {
    Pose pose = guide_tip_pose(guide, q);
    pose.position_mm += tool.cutter_length_mm * pose.tangent;
    return pose;
}

Vec3 ball_center(const SteeringGuide& guide, const DrillTool& tool, const Config& q) {
    const Pose pose = guide_tip_pose(guide, q);
    return pose.position_mm + tool.cylinder_length_mm() * pose.tangent;
}

double lateral_reach(const Pose& pose) {
    return std::hypot(pose.position_mm.x(), pose.position_mm.y());
}

double tip_angle_change_deg(const SteeringGuide& guide, const Config& q0, const Config& q1) {
    const Vec3 t0 = guide_tip_pose(guide, q0).tangent;
    const Vec3 t1 = guide_tip_pose(guide, q1).tangent;
    return rad_to_deg(std::atan2(t0.cross(t1).norm(), t0.dot(t1)));
}

}  // namespace ctsdr
