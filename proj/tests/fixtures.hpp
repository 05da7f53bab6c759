#pragma once

#include <cstdint>
#include <vector>

#include "icp/planar_map.hpp"

namespace fixture {

using icp::PlanarMap;
using icp::Topology;

// Tetrahedron with one face removed: a disk of three triangles around vertex 0.
inline PlanarMap tetra_disk() { return PlanarMap::from_faces({{0, 1, 2}, {0, 2, 3}, {0, 3, 1}}, 0, Topology::DiskPatch); }

inline PlanarMap single_square() { return PlanarMap::from_faces({{0, 1, 2, 3}}, 0, Topology::DiskPatch); }

inline PlanarMap two_triangles() { return PlanarMap::from_faces({{0, 1, 2}, {1, 0, 3}}, 0, Topology::DiskPatch); }

// Octahedron with one face removed: 7 triangles on 6 vertices.
inline PlanarMap octa_disk()
{
    return PlanarMap::from_faces({{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}, {5, 2, 1}, {5, 3, 2}, {5, 4, 3}}, 0,
                                 Topology::DiskPatch);
}

// 2x2 block of squares rooted at the centre.
inline PlanarMap grid2x2()
{
    return PlanarMap::from_faces({{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}}, 4, Topology::DiskPatch);
}

// Mixed faces: a pentagon with a triangle and a square glued to it.
inline PlanarMap mixed()
{
    return PlanarMap::from_faces({{0, 1, 2, 3, 4}, {1, 0, 5}, {2, 1, 5, 6}}, 0, Topology::DiskPatch);
}

// 4 x 5 triangulated torus, vertex (i, j) labelled 5 i + j.
inline PlanarMap torus_4x5()
{
    std::vector<std::vector<std::int64_t>> faces;
    auto id = [](int i, int j) { return std::int64_t{5 * ((i + 4) % 4) + (j + 5) % 5}; };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return PlanarMap::from_faces(faces, 0, Topology::Torus);
}

}  // namespace fixture
