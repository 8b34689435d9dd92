#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctsdr/carve.hpp"
#include "ctsdr/types.hpp"

namespace ctsdr {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// Standalone removal mask, as stored in a mask file: enough to rebuild the
/// cavity surface without the original scenario.
struct MaskData {
    int nx = 0, ny = 0, nz = 0;
    double h_mm = 0.0;
    Vec3 origin_mm = Vec3::Zero();
    std::vector<std::uint8_t> mask;  // x-fastest

    bool removed(int ix, int iy, int iz) const {
        return mask[static_cast<std::size_t>(ix) +
                    static_cast<std::size_t>(nx) *
                        (static_cast<std::size_t>(iy) + static_cast<std::size_t>(ny) * iz)] != 0;
    }
};

/// Watertight triangle surface of the removed region: every voxel face that
/// borders intact material or the grid boundary becomes two triangles with
/// outward winding. Vertex and triangle order are deterministic.
TriangleMesh extract_cavity_mesh(const VoxelGrid& grid);
TriangleMesh extract_cavity_mesh(const MaskData& data);

double mesh_area(const TriangleMesh& mesh);

/// V - E + F with vertices deduplicated by construction and edges counted
/// once per undirected pair.
long euler_characteristic(const TriangleMesh& mesh);

void write_ply(const std::filesystem::path& path, const TriangleMesh& mesh);
void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Mask file: text header (dims, voxel edge, origin) followed by the raw
/// x-fastest uint8 occupancy bytes.
void write_mask(const std::filesystem::path& path, const VoxelGrid& grid);
MaskData read_mask(const std::filesystem::path& path);

}  // namespace ctsdr
