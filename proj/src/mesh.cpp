#include "ctsdr/mesh.hpp"

#include <Eigen/Geometry>

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ctsdr {

namespace {

// Corner offsets for each of the six faces, ordered so the two triangles
// (0,1,2) and (0,2,3) wind counter-clockwise seen from outside the solid.
struct FaceSpec {
    int dx, dy, dz;                    // neighbor direction
    std::array<std::array<int, 3>, 4> corner;
};

constexpr std::array<FaceSpec, 6> kFaces = {{
    {-1, 0, 0, {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}}}},
    {+1, 0, 0, {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}}}},
    {0, -1, 0, {{{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}}},
    {0, +1, 0, {{{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}}}},
    {0, 0, -1, {{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}}},
    {0, 0, +1, {{{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}}},
}};

template <typename RemovedFn>
TriangleMesh extract_faces(int nx, int ny, int nz, double h, const Vec3& origin,
                           RemovedFn removed) {
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> vertex_ids;
    auto vertex = [&](int cx, int cy, int cz) {
        const std::uint64_t key = (static_cast<std::uint64_t>(cx) << 42) |
                                  (static_cast<std::uint64_t>(cy) << 21) |
                                  static_cast<std::uint64_t>(cz);
        auto [it, inserted] = vertex_ids.try_emplace(
            key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) mesh.vertices.push_back(origin + h * Vec3(cx, cy, cz));
        return it->second;
    };

    bool any = false;
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                if (!removed(ix, iy, iz)) continue;
                any = true;
                for (const FaceSpec& face : kFaces) {
                    const int jx = ix + face.dx, jy = iy + face.dy, jz = iz + face.dz;
                    const bool open = jx < 0 || jx >= nx || jy < 0 || jy >= ny || jz < 0 ||
                                      jz >= nz || !removed(jx, jy, jz);
                    if (!open) continue;
                    std::array<std::uint32_t, 4> v{};
                    for (int c = 0; c < 4; ++c)
                        v[static_cast<std::size_t>(c)] =
                            vertex(ix + face.corner[static_cast<std::size_t>(c)][0],
                                   iy + face.corner[static_cast<std::size_t>(c)][1],
                                   iz + face.corner[static_cast<std::size_t>(c)][2]);
                    mesh.triangles.push_back({v[0], v[1], v[2]});
                    mesh.triangles.push_back({v[0], v[2], v[3]});
                }
            }
    if (!any) throw std::runtime_error("extract_cavity_mesh: empty cavity");
    return mesh;
}

}  // namespace

TriangleMesh extract_cavity_mesh(const VoxelGrid& grid) {
    return extract_faces(grid.nx(), grid.ny(), grid.nz(), grid.h_mm(), grid.block().origin_mm,
                         [&](int ix, int iy, int iz) { return grid.removed(ix, iy, iz); });
}

TriangleMesh extract_cavity_mesh(const MaskData& data) {
    return extract_faces(data.nx, data.ny, data.nz, data.h_mm, data.origin_mm,
                         [&](int ix, int iy, int iz) { return data.removed(ix, iy, iz); });
}

double mesh_area(const TriangleMesh& mesh) {
    double area = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

long euler_characteristic(const TriangleMesh& mesh) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            std::uint32_t a = tri[static_cast<std::size_t>(e)];
            std::uint32_t b = tri[static_cast<std::size_t>((e + 1) % 3)];
            if (a > b) std::swap(a, b);
            edges.emplace(a, b);
        }
    return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(mesh.triangles.size());
}

void write_ply(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ply: cannot open " + path.string());
    out << "ply\nformat binary_little_endian 1.0\n"
        << "comment cavity surface, millimetres\n"
        << "element vertex " << mesh.vertices.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    for (const Vec3& v : mesh.vertices) {
        const float xyz[3] = {static_cast<float>(v.x()), static_cast<float>(v.y()),
                              static_cast<float>(v.z())};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
    for (const auto& tri : mesh.triangles) {
        const std::uint8_t three = 3;
        const std::int32_t idx[3] = {static_cast<std::int32_t>(tri[0]),
                                     static_cast<std::int32_t>(tri[1]),
                                     static_cast<std::int32_t>(tri[2])};
        out.write(reinterpret_cast<const char*>(&three), 1);
        out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
    if (!out) throw std::runtime_error("write_ply: write failed for " + path.string());
}

void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_stl: cannot open " + path.string());
    char header[80] = {};
    std::strncpy(header, "ctsdr cavity surface (mm)", sizeof(header) - 1);
    out.write(header, sizeof(header));
    const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        Vec3 n = (b - a).cross(c - a);
        const double len = n.norm();
        if (len > 0.0) n /= len;
        float rec[12] = {static_cast<float>(n.x()), static_cast<float>(n.y()),
                         static_cast<float>(n.z()), static_cast<float>(a.x()),
                         static_cast<float>(a.y()), static_cast<float>(a.z()),
                         static_cast<float>(b.x()), static_cast<float>(b.y()),
                         static_cast<float>(b.z()), static_cast<float>(c.x()),
                         static_cast<float>(c.y()), static_cast<float>(c.z())};
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
        out.write(reinterpret_cast<const char*>(&attr), sizeof(attr));
    }
    if (!out) throw std::runtime_error("write_stl: write failed for " + path.string());
}

void write_mask(const std::filesystem::path& path, const VoxelGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_mask: cannot open " + path.string());
    char header[256];
    const Vec3& o = grid.block().origin_mm;
    std::snprintf(header, sizeof(header),
                  "ctsdr-mask v1\ndims %d %d %d\nh_mm %.17g\norigin_mm %.17g %.17g %.17g\n"
                  "order x-fastest uint8\nend\n",
                  grid.nx(), grid.ny(), grid.nz(), grid.h_mm(), o.x(), o.y(), o.z());
    out << header;
    out.write(reinterpret_cast<const char*>(grid.mask().data()),
              static_cast<std::streamsize>(grid.mask().size()));
    if (!out) throw std::runtime_error("write_mask: write failed for " + path.string());
}

MaskData read_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_mask: cannot open " + path.string());
    MaskData data;
    std::string line;
    if (!std::getline(in, line) || line != "ctsdr-mask v1")
        throw std::runtime_error("read_mask: not a ctsdr mask file");
    bool have_dims = false, have_h = false, have_origin = false;
    while (std::getline(in, line) && line != "end") {
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "dims") {
            have_dims = static_cast<bool>(fields >> data.nx >> data.ny >> data.nz);
        } else if (key == "h_mm") {
            have_h = static_cast<bool>(fields >> data.h_mm);
        } else if (key == "origin_mm") {
            have_origin = static_cast<bool>(fields >> data.origin_mm.x() >>
                                            data.origin_mm.y() >> data.origin_mm.z());
        } else if (key == "order") {
            // fixed in v1
        } else {
            throw std::runtime_error("read_mask: unknown header field '" + key + "'");
        }
    }
    if (!have_dims || !have_h || !have_origin || data.nx <= 0 || data.ny <= 0 || data.nz <= 0 ||
        data.h_mm <= 0.0)
        throw std::runtime_error("read_mask: incomplete header");
    const std::size_t total = static_cast<std::size_t>(data.nx) *
                              static_cast<std::size_t>(data.ny) *
                              static_cast<std::size_t>(data.nz);
    data.mask.resize(total);
    in.read(reinterpret_cast<char*>(data.mask.data()), static_cast<std::streamsize>(total));
    if (static_cast<std::size_t>(in.gcount()) != total)
        throw std::runtime_error("read_mask: truncated voxel data");
    return data;
}

}  // namespace ctsdr
