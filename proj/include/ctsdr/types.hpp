#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctsdr {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerance used to absorb floating-point rounding at interval bounds
// (e.g. a retraction landing at s = -1e-15 instead of 0).
inline constexpr double kSnapTol = 1e-9;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Pre-curved inner guide tube. The deployed portion relaxes to a circular
/// arc of radius curve_radius_mm; the portion still inside the outer tube
/// stays straight.
struct SteeringGuide {
    double curve_radius_mm = 0.0;
    double deployable_length_mm = 0.0;  // maximum insertion arc length
    std::string name;

    void validate() const {
        if (!(curve_radius_mm > 0.0))
            throw std::invalid_argument("SteeringGuide: curve_radius_mm must be > 0");
        if (!(deployable_length_mm > 0.0))
            throw std::invalid_argument("SteeringGuide: deployable_length_mm must be > 0");
        // arc must not overlap itself
        if (deployable_length_mm / curve_radius_mm > 2.0 * kPi + kSnapTol)
            throw std::invalid_argument(
                "SteeringGuide: deployable_length_mm / curve_radius_mm exceeds 2*pi");
    }
};

/// Ball-nose cutter mounted rigidly at the guide tip. Shank and torque coil
/// travel inside the already-drilled channel and are metadata only.
struct DrillTool {
    double cutter_diameter_mm = 6.75;
    double cutter_length_mm = 10.0;  // rigid extension beyond the guide tip
    double shank_length_mm = 8.0;
    double shank_diameter_mm = 1.75;
    double torque_coil_length_mm = 115.0;
    double spindle_rpm = 8250.0;

    double ball_radius_mm() const { return 0.5 * cutter_diameter_mm; }
    // straight cylindrical section before the hemispherical cap
    double cylinder_length_mm() const { return cutter_length_mm - ball_radius_mm(); }

    void validate() const {
        if (!(cutter_diameter_mm > 0.0))
            throw std::invalid_argument("DrillTool: cutter_diameter_mm must be > 0");
        if (cutter_length_mm < 0.5 * cutter_diameter_mm)
            throw std::invalid_argument(
                "DrillTool: cutter_length_mm must be >= cutter_diameter_mm/2");
        if (spindle_rpm < 0.0)
            throw std::invalid_argument("DrillTool: spindle_rpm must be >= 0");
    }
};

/// Robot configuration: exposed guide arc length and axial rotation.
/// phi_deg is unbounded; the geometry wraps it mod 360 internally.
struct Config {
    double s_mm = 0.0;
    double phi_deg = 0.0;
};

/// Position plus unit drilling direction, in the base frame
/// (origin at the outer-tube distal opening, z along the insertion axis).
struct Pose {
    Vec3 position_mm = Vec3::Zero();
    Vec3 tangent = Vec3::UnitZ();

    void validate() const {
        if (std::abs(tangent.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("Pose: tangent must be a unit vector");
    }
};

}  // namespace ctsdr
