#include "ctsdr/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ctsdr/kinematics.hpp"

namespace ctsdr {

namespace {

bool collinear_within(const std::vector<Vec2>& points, double tol) {
    Vec2 mean = Vec2::Zero();
    for (const Vec2& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const Vec2& p : points) {
        const Vec2 d = p - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const Vec2 normal = eig.eigenvectors().col(0);  // direction of least spread
    double max_dev = 0.0;
    for (const Vec2& p : points) max_dev = std::max(max_dev, std::abs(normal.dot(p - mean)));
    return max_dev <= tol;
}

}  // namespace

CircleFit fit_circle(const std::vector<Vec2>& points) {
    const auto n = points.size();
    if (n < 3) throw std::invalid_argument("fit_circle: need at least 3 points");
    if (collinear_within(points, 1e-9))
        throw std::invalid_argument("fit_circle: points are collinear");

    // Kasa algebraic fit: |p|^2 = 2 c.x x + 2 c.y y + (r^2 - |c|^2)
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(static_cast<Eigen::Index>(i), 0) = 2.0 * points[i].x();
        a(static_cast<Eigen::Index>(i), 1) = 2.0 * points[i].y();
        a(static_cast<Eigen::Index>(i), 2) = 1.0;
        b(static_cast<Eigen::Index>(i)) = points[i].squaredNorm();
    }
    const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
    Vec2 center(sol(0), sol(1));
    double radius = std::sqrt(std::max(0.0, sol(2) + center.squaredNorm()));

    // Geometric refinement: Levenberg-Marquardt on residuals |p - c| - r.
    const double tol = 1e-10;
    double lambda = 1e-6;
    int iterations = 0;
    auto sum_sq = [&](const Vec2& c, double r) {
        double s = 0.0;
        for (const Vec2& p : points) {
            const double d = (p - c).norm() - r;
            s += d * d;
        }
        return s;
    };
    double cost = sum_sq(center, radius);
    for (; iterations < 200; ++iterations) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (const Vec2& p : points) {
            const Vec2 d = p - center;
            const double dist = std::max(d.norm(), 1e-300);
            const Eigen::Vector3d jac(-d.x() / dist, -d.y() / dist, -1.0);
            const double res = dist - radius;
            jtj += jac * jac.transpose();
            jtr += jac * res;
        }
        Eigen::Matrix3d damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal();
        const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
        const Vec2 new_center = center + step.head<2>();
        const double new_radius = radius + step(2);
        const double new_cost = sum_sq(new_center, new_radius);
        if (new_cost <= cost) {
            center = new_center;
            radius = new_radius;
            const bool converged = step.norm() <= tol * (1.0 + radius);
            cost = new_cost;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (converged) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    CircleFit fit;
    fit.center = center;
    fit.radius = radius;
    fit.rms_mm = std::sqrt(cost / static_cast<double>(n));
    fit.iterations = iterations;
    return fit;
}

std::vector<Vec3> centerline_from_trajectory(const ConfigTimeline& timeline,
                                             const SteeringGuide& guide) {
    std::vector<Vec3> points;
    points.reserve(timeline.samples.size());
    for (const TimelineSample& sample : timeline.samples)
        points.push_back(guide_tip_pose(guide, sample.config()).position_mm);
    return points;
}

std::vector<Vec3> centerline_from_grid(const VoxelGrid& grid, const DrillTool& tool,
                                       double trim_mm) {
    // occupied z-range first, for end-cap trimming
    int iz_min = grid.nz(), iz_max = -1;
    for (int iz = 0; iz < grid.nz(); ++iz) {
        bool occupied = false;
        for (int iy = 0; iy < grid.ny() && !occupied; ++iy)
            for (int ix = 0; ix < grid.nx() && !occupied; ++ix)
                occupied = grid.removed(ix, iy, iz);
        if (occupied) {
            iz_min = std::min(iz_min, iz);
            iz_max = std::max(iz_max, iz);
        }
    }
    if (iz_max < 0) throw std::runtime_error("centerline_from_grid: no removed voxels");

    const int trim = static_cast<int>(std::ceil(trim_mm / grid.h_mm()));
    std::vector<Vec3> centroids;
    std::vector<int> slice_x, slice_y;
    for (int iz = iz_min + trim; iz <= iz_max - trim; ++iz) {
        slice_x.clear();
        slice_y.clear();
        for (int iy = 0; iy < grid.ny(); ++iy)
            for (int ix = 0; ix < grid.nx(); ++ix)
                if (grid.removed(ix, iy, iz)) {
                    slice_x.push_back(ix);
                    slice_y.push_back(iy);
                }
        if (slice_x.empty()) continue;

        // in-plane footprint must look like a single channel cross-section
        const auto [min_x, max_x] = std::minmax_element(slice_x.begin(), slice_x.end());
        const auto [min_y, max_y] = std::minmax_element(slice_y.begin(), slice_y.end());
        const double ex = (*max_x - *min_x + 1) * grid.h_mm();
        const double ey = (*max_y - *min_y + 1) * grid.h_mm();
        if (std::hypot(ex, ey) > 3.0 * tool.cutter_diameter_mm)
            throw std::runtime_error(
                "centerline_from_grid: slice far wider than the cutter (cavity input?)");

        // connected components over the slice, 8-neighborhood
        std::vector<int> label(slice_x.size(), -1);
        int components = 0;
        std::vector<std::size_t> stack;
        for (std::size_t seed = 0; seed < slice_x.size(); ++seed) {
            if (label[seed] >= 0) continue;
            label[seed] = components;
            stack.assign(1, seed);
            while (!stack.empty()) {
                const std::size_t cur = stack.back();
                stack.pop_back();
                for (std::size_t other = 0; other < slice_x.size(); ++other) {
                    if (label[other] >= 0) continue;
                    if (std::abs(slice_x[cur] - slice_x[other]) <= 1 &&
                        std::abs(slice_y[cur] - slice_y[other]) <= 1) {
                        label[other] = components;
                        stack.push_back(other);
                    }
                }
            }
            ++components;
        }
        if (components > 1)
            throw std::runtime_error(
                "centerline_from_grid: slice has multiple blobs (branched input?)");

        Vec3 centroid = Vec3::Zero();
        for (std::size_t i = 0; i < slice_x.size(); ++i)
            centroid += grid.voxel_center(slice_x[i], slice_y[i], iz);
        centroids.push_back(centroid / static_cast<double>(slice_x.size()));
    }
    if (centroids.size() < 3)
        throw std::runtime_error("centerline_from_grid: too few slices for a centerline");
    return centroids;
}

std::vector<CircleFit> insertion_segment_fits(const ConfigTimeline& timeline,
                                              const MotionPlan& plan) {
    std::vector<CircleFit> fits;
    const auto& segments = plan.segments();
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!(segments[i].v_ins_mm_per_s > 0.0) || segments[i].w_deg_per_s != 0.0) continue;
        pts.clear();
        for (const TimelineSample& sample : timeline.samples) {
            if (sample.segment != static_cast<std::int32_t>(i)) continue;
            const Pose pose = guide_tip_pose(plan.guide(), sample.config());
            pts.emplace_back(lateral_reach(pose), pose.position_mm.z());
        }
        if (pts.size() >= 3) fits.push_back(fit_circle(pts));
    }
    return fits;
}

SpiralRadii spiral_radii(const ConfigTimeline& timeline, const SteeringGuide& guide,
                         const DrillTool& tool, const BoneBlock& block) {
    const Vec3 lo = block.origin_mm;
    const Vec3 hi = block.origin_mm + block.size_mm;
    const TimelineSample* first = nullptr;
    const TimelineSample* last = nullptr;
    for (const TimelineSample& sample : timeline.samples) {
        const Vec3 p = cutter_pose(guide, tool, sample.config()).position_mm;
        const bool inside = (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
        if (!inside) continue;
        if (!first) first = &sample;
        last = &sample;
    }
    if (!first) throw std::runtime_error("spiral_radii: cutter tip never enters the block");
    SpiralRadii radii;
    radii.initial_radius_mm = lateral_reach(cutter_pose(guide, tool, first->config()));
    radii.final_radius_mm = lateral_reach(cutter_pose(guide, tool, last->config()));
    return radii;
}

CavityReport build_cavity_report(const VoxelGrid& grid, const ConfigTimeline& timeline,
                                 const MotionPlan& plan, const std::string& plan_label) {
    if (grid.removed_count() == 0)
        throw std::runtime_error("build_cavity_report: empty cavity (no material removed)");
    if (timeline.samples.empty())
        throw std::invalid_argument("build_cavity_report: empty timeline");

    const SteeringGuide& guide = plan.guide();
    const DrillTool& tool = plan.tool();
    CavityReport report;
    report.plan_label = plan_label;
    report.entry_diameter_mm = entry_hole_diameter(grid);
    report.removed_volume_mm3 = grid.removed_volume_mm3();

    // trajectory metrics
    double max_reach = 0.0;
    double max_s = -1.0;
    Config peak = timeline.samples.front().config();
    for (const TimelineSample& sample : timeline.samples) {
        const Pose tip = cutter_pose(guide, tool, sample.config());
        max_reach = std::max(max_reach, lateral_reach(tip));
        if (sample.s_mm > max_s) {
            max_s = sample.s_mm;
            peak = sample.config();
        }
    }
    report.max_lateral_reach_mm = max_reach;
    report.final_lateral_reach_mm =
        lateral_reach(cutter_pose(guide, tool, timeline.samples.back().config()));
    report.tip_angle_change_deg =
        tip_angle_change_deg(guide, timeline.samples.front().config(), peak);
    report.notes.push_back(
        "tip_angle_change_deg is the ideal constant-curvature value between the initial "
        "drilling direction and the direction at peak insertion; physical systems "
        "typically realize a smaller angle because of deflection and slip");

    // fitted radius from the bending-plane projection of the guide-tip path;
    // (lateral, z) lies on the deployment circle for every phi
    {
        std::vector<Vec2> pts;
        pts.reserve(timeline.samples.size());
        for (const TimelineSample& sample : timeline.samples) {
            const Pose pose = guide_tip_pose(guide, sample.config());
            pts.emplace_back(lateral_reach(pose), pose.position_mm.z());
        }
        const CircleFit fit = fit_circle(pts);
        report.fitted_radius_mm = fit.radius;
        report.radius_deviation_pct =
            100.0 * std::abs(fit.radius - guide.curve_radius_mm) / guide.curve_radius_mm;
    }

    // slice planes: sweep ball-center heights for stepped plans, else an
    // even spread through the occupied depth range
    std::vector<double> depths;
    const double entry_z = grid.block().entry_plane_z();
    bool stepped = false;
    for (std::size_t i = 0; i < plan.segments().size(); ++i) {
        const MotionSegment& seg = plan.segments()[i];
        if (seg.v_ins_mm_per_s != 0.0 || seg.w_deg_per_s == 0.0) continue;
        for (const TimelineSample& sample : timeline.samples) {
            if (sample.segment != static_cast<std::int32_t>(i)) continue;
            if (sample.s_mm > kSnapTol) {
                depths.push_back(ball_center(guide, tool, sample.config()).z() - entry_z);
                stepped = true;
            }
            break;
        }
    }
    if (!stepped) {
        int iz_min = grid.nz(), iz_max = -1;
        for (int iz = 0; iz < grid.nz(); ++iz) {
            bool occupied = false;
            for (int iy = 0; iy < grid.ny() && !occupied; ++iy)
                for (int ix = 0; ix < grid.nx() && !occupied; ++ix)
                    occupied = grid.removed(ix, iy, iz);
            if (occupied) {
                if (iz_min > iz) iz_min = iz;
                iz_max = iz;
            }
        }
        for (int k = 1; k <= 5; ++k)
            depths.push_back((iz_min + (iz_max - iz_min) * (k / 6.0) + 0.5) * grid.h_mm());
    }
    for (double depth : depths) {
        if (depth < 0.0 || depth > grid.block().size_mm.z()) continue;
        try {
            report.slice_diameters.push_back({depth, slice_diameter(grid, depth)});
        } catch (const std::runtime_error&) {
            // plane carries no removed material (clipped by the block)
        }
    }

    // voxel-centerline cross-check for single-channel runs that progress
    // along z (slicing breaks down past ~75 degrees of arc)
    const bool single_insertion =
        plan.segments().size() == 1 && plan.segments()[0].v_ins_mm_per_s > 0.0 &&
        plan.segments()[0].w_deg_per_s == 0.0;
    if (single_insertion && max_s / guide.curve_radius_mm <= 1.3) {
        try {
            const std::vector<Vec3> centerline =
                centerline_from_grid(grid, tool, tool.cutter_length_mm);
            std::vector<Vec2> pts;
            pts.reserve(centerline.size());
            for (const Vec3& p : centerline)
                pts.emplace_back(std::hypot(p.x(), p.y()), p.z());
            report.fitted_radius_voxel_mm = fit_circle(pts).radius;
        } catch (const std::exception& err) {
            report.notes.push_back(std::string("voxel centerline cross-check skipped: ") +
                                   err.what());
        }
    }
    return report;
}

}  // namespace ctsdr
