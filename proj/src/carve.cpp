#include "ctsdr/carve.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ctsdr/kinematics.hpp"

namespace ctsdr {

namespace {

struct SamplePose {
    Vec3 base;    // guide tip = proximal cutter point
    Vec3 axis;    // unit tangent
    Vec3 center;  // distal ball center = base + cyl_len * axis
};

struct Aabb {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};

    void grow(double margin) {
        lo.array() -= margin;
        hi.array() += margin;
    }
};

Aabb solid_aabb(const SamplePose& pose, double cyl_len, double ball_r) {
    Aabb box;
    for (int a = 0; a < 3; ++a) {
        // per-axis half-width of the cylinder cross-section
        const double w = ball_r * std::sqrt(std::max(0.0, 1.0 - pose.axis[a] * pose.axis[a]));
        const double b0 = pose.base[a];
        const double b1 = pose.base[a] + cyl_len * pose.axis[a];
        box.lo[a] = std::min({b0 - w, b1 - w, b1 - ball_r});
        box.hi[a] = std::max({b0 + w, b1 + w, b1 + ball_r});
    }
    return box;
}

inline bool inside_solid(const Vec3& p, const SamplePose& pose, double cyl_len, double r2) {
    const double qx = p.x() - pose.base.x();
    const double qy = p.y() - pose.base.y();
    const double qz = p.z() - pose.base.z();
    const double u = qx * pose.axis.x() + qy * pose.axis.y() + qz * pose.axis.z();
    if (u < 0.0) return false;  // behind the flat base
    if (u <= cyl_len) return qx * qx + qy * qy + qz * qz - u * u <= r2;
    const double sx = p.x() - pose.center.x();
    const double sy = p.y() - pose.center.y();
    const double sz = p.z() - pose.center.z();
    return sx * sx + sy * sy + sz * sz <= r2;
}

// squared distance from p to the segment base -> center
inline double segment_dist2(const Vec3& p, const SamplePose& pose, double cyl_len) {
    const Vec3 q = p - pose.base;
    const double u = std::clamp(q.dot(pose.axis), 0.0, cyl_len);
    return (q - u * pose.axis).squaredNorm();
}

}  // namespace

VoxelGrid::VoxelGrid(BoneBlock block, double h_mm) : block_(std::move(block)), h_(h_mm) {
    block_.validate();
    if (!(h_ > 0.0)) throw std::invalid_argument("VoxelGrid: voxel edge length must be > 0");
    auto cells = [this](double extent) {
        return std::max(1, static_cast<int>(std::ceil(extent / h_ - 1e-9)));
    };
    nx_ = cells(block_.size_mm.x());
    ny_ = cells(block_.size_mm.y());
    nz_ = cells(block_.size_mm.z());
    mask_.assign(static_cast<std::size_t>(nx_) * ny_ * nz_, 0);
}

bool point_in_cutter(const Vec3& point, const SteeringGuide& guide, const DrillTool& tool,
                     const Config& q) {
    const Pose tip = guide_tip_pose(guide, q);
    SamplePose pose{tip.position_mm, tip.tangent,
                    tip.position_mm + tool.cylinder_length_mm() * tip.tangent};
    const double r = tool.ball_radius_mm();
    return inside_solid(point, pose, tool.cylinder_length_mm(), r * r);
}

CarveResult carve(VoxelGrid& grid, const ConfigTimeline& timeline, const SteeringGuide& guide,
                  const DrillTool& tool, int workers) {
    if (timeline.samples.empty()) throw std::invalid_argument("carve: empty timeline");
    guide.validate();
    tool.validate();
    if (workers < 1) workers = 1;

    const double cyl_len = tool.cylinder_length_mm();
    const double ball_r = tool.ball_radius_mm();
    const double r2 = ball_r * ball_r;
    const double h = grid.h_mm();
    const double cutter_len = tool.cutter_length_mm;

    // Pose cache plus per-step motion bound: the solid's axis is a straight
    // segment, so no material point moves farther than the larger endpoint
    // displacement max(|d base|, |d tip|).
    const std::size_t n = timeline.samples.size();
    std::vector<SamplePose> poses(n);
    std::vector<double> step_motion(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Pose tip = guide_tip_pose(guide, timeline.samples[i].config());
        poses[i] = {tip.position_mm, tip.tangent,
                    tip.position_mm + cyl_len * tip.tangent};
        if (i > 0) {
            const Vec3 d_base = poses[i].base - poses[i - 1].base;
            const Vec3 d_tip = (poses[i].base + cutter_len * poses[i].axis) -
                               (poses[i - 1].base + cutter_len * poses[i - 1].axis);
            step_motion[i] = std::max(d_base.norm(), d_tip.norm());
            if (step_motion[i] > 0.25 * tool.cutter_diameter_mm)
                throw std::runtime_error(
                    "carve: consecutive cutter poses move farther than cutter_diameter/4; "
                    "reduce dt");
        }
    }

    CarveResult result;

    // Boundary check at the initial pose: poking through any face other
    // than the entry face earns a warning.
    {
        const Aabb box = solid_aabb(poses[0], cyl_len, ball_r);
        const Vec3 lo = grid.block().origin_mm;
        const Vec3 hi = lo + grid.block().size_mm;
        const bool overlaps = (box.hi.x() > lo.x() && box.lo.x() < hi.x() &&
                               box.hi.y() > lo.y() && box.lo.y() < hi.y() &&
                               box.hi.z() > lo.z() && box.lo.z() < hi.z());
        if (overlaps &&
            (box.lo.x() < lo.x() || box.hi.x() > hi.x() || box.lo.y() < lo.y() ||
             box.hi.y() > hi.y() || box.hi.z() > hi.z()))
            result.boundary_warning = true;  // entry face (-z) is exempt
    }

    // Group samples into chunks of bounded total motion. Every chunk
    // sample's solid stays within chunk_motion of the first sample's
    // solid, which gives a safe reject test against its axis segment.
    struct Chunk {
        std::size_t first, last;  // inclusive sample range
        double motion;            // cumulative motion bound within chunk
        int ix0, ix1, iy0, iy1, iz0, iz1;
    };
    const double kChunkMotionCap = 0.5;  // mm
    const std::size_t kChunkSamplesCap = 8192;
    std::vector<Chunk> chunks;
    {
        const Vec3 lo = grid.block().origin_mm;
        std::size_t first = 0;
        while (first < n) {
            std::size_t last = first;
            double motion = 0.0;
            while (last + 1 < n && last + 1 - first < kChunkSamplesCap &&
                   motion + step_motion[last + 1] <= kChunkMotionCap) {
                ++last;
                motion += step_motion[last];
            }
            Aabb box = solid_aabb(poses[first], cyl_len, ball_r);
            box.grow(motion + 0.5 * h);
            Chunk c{first, last, motion, 0, 0, 0, 0, 0, 0};
            auto lo_cell = [&](double v, double o, int nmax) {
                return std::clamp(static_cast<int>(std::floor((v - o) / h - 0.5)), 0, nmax - 1);
            };
            auto hi_cell = [&](double v, double o, int nmax) {
                return std::clamp(static_cast<int>(std::ceil((v - o) / h - 0.5)), 0, nmax - 1);
            };
            c.ix0 = lo_cell(box.lo.x(), lo.x(), grid.nx());
            c.ix1 = hi_cell(box.hi.x(), lo.x(), grid.nx());
            c.iy0 = lo_cell(box.lo.y(), lo.y(), grid.ny());
            c.iy1 = hi_cell(box.hi.y(), lo.y(), grid.ny());
            c.iz0 = lo_cell(box.lo.z(), lo.z(), grid.nz());
            c.iz1 = hi_cell(box.hi.z(), lo.z(), grid.nz());
            const bool inside_grid =
                box.hi.x() > lo.x() && box.lo.x() < lo.x() + h * grid.nx() &&
                box.hi.y() > lo.y() && box.lo.y() < lo.y() + h * grid.ny() &&
                box.hi.z() > lo.z() && box.lo.z() < lo.z() + h * grid.nz();
            if (inside_grid) chunks.push_back(c);
            first = last + 1;
        }
    }

    // Workers own contiguous z-slabs, so every mask byte has exactly one
    // writer and the result is schedule-independent. Each worker counts its
    // own removals; the grid tally is reconciled after the join.
    std::uint8_t* mask = grid.raw_mask();
    auto carve_slab = [&](int iz_begin, int iz_end, std::size_t& newly_removed) {
        std::size_t count = 0;
        for (const Chunk& c : chunks) {
            const int z0 = std::max(c.iz0, iz_begin);
            const int z1 = std::min(c.iz1, iz_end - 1);
            for (int iz = z0; iz <= z1; ++iz) {
                for (int iy = c.iy0; iy <= c.iy1; ++iy) {
                    for (int ix = c.ix0; ix <= c.ix1; ++ix) {
                        std::uint8_t& cell = mask[grid.index(ix, iy, iz)];
                        if (cell) continue;
                        const Vec3 p = grid.voxel_center(ix, iy, iz);
                        const double reach = ball_r + c.motion;
                        if (segment_dist2(p, poses[c.first], cyl_len) > reach * reach) continue;
                        for (std::size_t i = c.first; i <= c.last; ++i) {
                            if (inside_solid(p, poses[i], cyl_len, r2)) {
                                cell = 1;
                                ++count;
                                break;
                            }
                        }
                    }
                }
            }
        }
        newly_removed = count;
    };

    workers = std::min(workers, grid.nz());
    if (workers == 1) {
        carve_slab(0, grid.nz(), result.removed_count);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::size_t> counts(static_cast<std::size_t>(workers), 0);
        for (int w = 0; w < workers; ++w) {
            const int z0 = grid.nz() * w / workers;
            const int z1 = grid.nz() * (w + 1) / workers;
            pool.emplace_back(carve_slab, z0, z1, std::ref(counts[static_cast<std::size_t>(w)]));
        }
        for (std::thread& t : pool) t.join();
        for (std::size_t c : counts) result.removed_count += c;
    }
    grid.add_removed(result.removed_count);
    return result;
}

double entry_hole_diameter(const VoxelGrid& grid) {
    std::vector<Vec2> pts;
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix)
            if (grid.removed(ix, iy, 0)) {
                const Vec3 c = grid.voxel_center(ix, iy, 0);
                pts.emplace_back(c.x(), c.y());
            }
    if (pts.empty())
        throw std::runtime_error("entry_hole_diameter: no removed voxels on the entry slice");

    // diameter of the point set; convex hull keeps the pair scan small
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);

    double best2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best2 = std::max(best2, (hull[i] - hull[j]).squaredNorm());
    return std::sqrt(best2) + grid.h_mm();
}

double slice_diameter(const VoxelGrid& grid, double depth_mm) {
    if (depth_mm < 0.0 || depth_mm > grid.block().size_mm.z())
        throw std::domain_error("slice_diameter: depth outside the block");
    int iz = static_cast<int>(std::floor(depth_mm / grid.h_mm()));
    iz = std::clamp(iz, 0, grid.nz() - 1);

    double best2 = -1.0;
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix)
            if (grid.removed(ix, iy, iz)) {
                const Vec3 c = grid.voxel_center(ix, iy, iz);
                best2 = std::max(best2, c.x() * c.x() + c.y() * c.y());
            }
    if (best2 < 0.0) throw std::runtime_error("slice_diameter: slice has no removed voxels");
    return 2.0 * std::sqrt(best2) + grid.h_mm();
}

}  // namespace ctsdr
