#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ctsdr/motion.hpp"
#include "ctsdr/types.hpp"

namespace ctsdr {

/// Axis-aligned bone phantom block in the base frame. The density grade is
/// a material label with no geometric effect. The entry face is the block
/// face the cutter drills through; only "-z" (outward normal toward the
/// robot) is meaningful for this insertion axis.
struct BoneBlock {
    Vec3 size_mm{60.0, 60.0, 90.0};
    Vec3 origin_mm{-30.0, -30.0, 15.0};  // minimum corner
    std::string density_pcf = "10";      // "5", "10" or "custom"
    std::string entry_face = "-z";

    double entry_plane_z() const { return origin_mm.z(); }

    void validate() const {
        if (!(size_mm.x() > 0.0 && size_mm.y() > 0.0 && size_mm.z() > 0.0))
            throw std::invalid_argument("BoneBlock: all sizes must be > 0");
        if (density_pcf != "5" && density_pcf != "10" && density_pcf != "custom")
            throw std::invalid_argument("BoneBlock: density_pcf must be 5, 10 or custom");
        if (entry_face != "-z")
            throw std::invalid_argument(
                "BoneBlock: entry_face must be -z (insertion runs along +z)");
    }
};

class VoxelGrid;

struct CarveResult {
    std::size_t removed_count = 0;   // voxels newly removed by this call
    bool boundary_warning = false;   // cutter initially pokes a non-entry face
};

CarveResult carve(VoxelGrid& grid, const ConfigTimeline& timeline, const SteeringGuide& guide,
                  const DrillTool& tool, int workers);

/// Occupancy grid over a BoneBlock: one byte per voxel, x-fastest storage,
/// voxel centers at origin + (i + 0.5) h.
class VoxelGrid {
  public:
    VoxelGrid(BoneBlock block, double h_mm);

    const BoneBlock& block() const { return block_; }
    double h_mm() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    std::size_t voxel_count() const { return mask_.size(); }

    std::size_t index(int ix, int iy, int iz) const {
        return static_cast<std::size_t>(ix) +
               static_cast<std::size_t>(nx_) *
                   (static_cast<std::size_t>(iy) + static_cast<std::size_t>(ny_) * iz);
    }
    bool removed(int ix, int iy, int iz) const { return mask_[index(ix, iy, iz)] != 0; }
    Vec3 voxel_center(int ix, int iy, int iz) const {
        return block_.origin_mm + h_ * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
    }

    std::size_t removed_count() const { return removed_count_; }
    double removed_volume_mm3() const { return static_cast<double>(removed_count_) * h_ * h_ * h_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    /// Marks one voxel removed; returns true if it was intact. Single
    /// mutator for callers outside carve(), which writes slabs directly.
    bool mark_removed(int ix, int iy, int iz) {
        std::uint8_t& cell = mask_[index(ix, iy, iz)];
        if (cell) return false;
        cell = 1;
        ++removed_count_;
        return true;
    }

  private:
    // carve() workers write disjoint z-slabs of the mask and reconcile the
    // removal count once after joining.
    friend CarveResult carve(VoxelGrid&, const ConfigTimeline&, const SteeringGuide&,
                             const DrillTool&, int);
    std::uint8_t* raw_mask() { return mask_.data(); }
    void add_removed(std::size_t n) { removed_count_ += n; }

    BoneBlock block_;
    double h_;
    int nx_, ny_, nz_;
    std::vector<std::uint8_t> mask_;
    std::size_t removed_count_ = 0;
};

/// Removes every voxel whose center lies inside the cutter solid at any
/// timeline sample. Removal is monotone and idempotent, and the final mask
/// is identical for any sample order or worker count. Throws when
/// consecutive poses are farther apart than cutter_diameter/4
/// (under-sampled sweep).
CarveResult carve(VoxelGrid& grid, const ConfigTimeline& timeline, const SteeringGuide& guide,
                  const DrillTool& tool, int workers = 1);

/// Diameter of the hole in the first voxel layer inside the entry face:
/// maximum pairwise distance between removed-voxel centers, plus h.
double entry_hole_diameter(const VoxelGrid& grid);

/// Cavity diameter in the plane perpendicular to the insertion axis at
/// depth_mm past the entry face: twice the maximum radial distance of
/// removed-voxel centers from the axis, plus h.
double slice_diameter(const VoxelGrid& grid, double depth_mm);

/// True if point lies inside the cutter solid (flat-based cylinder plus
/// distal hemisphere) at configuration q; exposed for tests.
bool point_in_cutter(const Vec3& point, const SteeringGuide& guide, const DrillTool& tool,
                     const Config& q);

}  // namespace ctsdr
