#include <doctest.h>

#include <numeric>

#include "fixtures.hpp"
#include "icp/errors.hpp"
#include "icp/planar_map.hpp"

using namespace icp;

namespace {

int euler(const PlanarMap& m) { return m.vertex_count() - m.edge_count() + m.face_count(); }

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("tetrahedron minus a face")
{
    auto m = fixture::tetra_disk();
    CHECK(m.vertex_count() == 4);
    CHECK(m.edge_count() == 6);
    CHECK(m.face_count() == 3);
    CHECK(euler(m) == 1);
    CHECK(m.boundary().size() == 3);
    CHECK_FALSE(m.is_boundary(0));
    CHECK(m.interior_depth()[0] == 1);
}

TEST_CASE("torus grid counts")
{
    for (int n : {3, 4, 5}) {
        auto m = generate_torus_quotient(4, 4, n);
        CHECK(m.vertex_count() == n * n);
        CHECK(m.edge_count() == 2 * n * n);
        CHECK(m.face_count() == n * n);
        CHECK(euler(m) == 0);
        CHECK(m.topology() == Topology::Torus);
    }
}

TEST_CASE("invalid inputs are rejected")
{
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2, 1}}, 0, Topology::DiskPatch); }) ==
          ErrorCode::InconsistentIncidence);
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1}}, 0, Topology::DiskPatch); }) == ErrorCode::NonSimpleGraph);
    // edge 0-1 in three faces
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}, 0, Topology::DiskPatch); }) ==
          ErrorCode::InconsistentIncidence);
    // a disk declared as a torus leaves edges with one face
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2}}, 0, Topology::Torus); }) ==
          ErrorCode::InconsistentIncidence);
    // a sphere declared as a torus
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}, 0, Topology::Torus); }) ==
          ErrorCode::EulerMismatch);
    // two disjoint triangles
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2}, {3, 4, 5}}, 0, Topology::DiskPatch); }) ==
          ErrorCode::EulerMismatch);
    CHECK(code_of([] { PlanarMap::from_faces({{0, 1, 2}}, 7, Topology::DiskPatch); }) == ErrorCode::UnknownVertex);
}

TEST_CASE("orientation is repaired")
{
    // second face given clockwise relative to the first
    auto m = PlanarMap::from_faces({{0, 1, 2}, {0, 1, 3}}, 0, Topology::DiskPatch);
    auto e = m.edge_between(0, 1);
    auto [l, r] = m.edge_faces(e);
    CHECK(l != kNone);
    CHECK(r != kNone);
}

TEST_CASE("degree sums")
{
    for (auto m : {generate_regular_patch(3, 6, 3), generate_regular_patch(3, 7, 3), generate_regular_patch(4, 4, 3),
                   fixture::mixed()}) {
        int sv = 0, sf = 0;
        for (VertexId v = 0; v < m.vertex_count(); ++v) sv += m.degree(v);
        for (FaceId f = 0; f < m.face_count(); ++f) sf += m.face_degree(f);
        CHECK(sv == 2 * m.edge_count());
        CHECK(sf == 2 * m.edge_count() - m.boundary_edge_count());
        CHECK(euler(m) == 1);
    }
    for (auto [p, q] : {std::pair{3, 6}, {4, 4}, {6, 3}}) {
        auto m = generate_torus_quotient(p, q, 4);
        int sf = 0;
        for (FaceId f = 0; f < m.face_count(); ++f) sf += m.face_degree(f);
        CHECK(sf == 2 * m.edge_count());
    }
}

TEST_CASE("dual skeleton")
{
    auto sq = dual_skeleton(fixture::single_square());
    CHECK(sq.vertex_count == 1);
    CHECK(sq.edge_count() == 0);

    auto two = dual_skeleton(fixture::two_triangles());
    CHECK(two.vertex_count == 2);
    REQUIRE(two.edge_count() == 1);
    auto m2 = fixture::two_triangles();
    CHECK(two.primal_edge[0] == m2.edge_between(m2.index_of(0), m2.index_of(1)));

    for (int n : {3, 4, 5}) {
        auto t = generate_torus_quotient(4, 4, n);
        auto d = dual_skeleton(t);
        CHECK(d.vertex_count == n * n);
        CHECK(d.edge_count() == t.edge_count());
        std::vector<int> deg(d.vertex_count, 0);
        for (auto [a, b] : d.edges) {
            ++deg[a];
            ++deg[b];
        }
        CHECK(std::all_of(deg.begin(), deg.end(), [](int x) { return x == 4; }));
    }
}

TEST_CASE("dual of the dual is isomorphic to the map")
{
    for (int n : {3, 4})
        for (auto [p, q] : {std::pair{3, 6}, {4, 4}, {6, 3}}) {
            auto m = generate_torus_quotient(p, q, n);
            auto dd = dual_map(dual_map(m));
            CHECK(canonical_code(dd) == canonical_code(m));
            if (p != q) CHECK(canonical_code(dual_map(m)) != canonical_code(m));
        }
    // {3,6} and {6,3} quotients are duals of each other
    CHECK(canonical_code(dual_map(generate_torus_quotient(3, 6, 3))) == canonical_code(generate_torus_quotient(6, 3, 3)));
}

TEST_CASE("canonical code ignores labels")
{
    auto a = PlanarMap::from_faces({{0, 1, 2}, {0, 2, 3}, {0, 3, 1}}, 0, Topology::DiskPatch);
    auto b = PlanarMap::from_faces({{10, 30, 20}, {10, 20, 40}, {10, 40, 30}}, 10, Topology::DiskPatch);
    CHECK(canonical_code(a) == canonical_code(b));
    CHECK(canonical_code(a) != canonical_code(fixture::octa_disk()));
}

TEST_CASE("regular patches")
{
    auto p36 = generate_regular_patch(3, 6, 2);
    for (VertexId v = 0; v < p36.vertex_count(); ++v)
        if (!p36.is_boundary(v)) CHECK(p36.degree(v) == 6);
    for (FaceId f = 0; f < p36.face_count(); ++f) CHECK(p36.face_degree(f) == 3);

    auto p37 = generate_regular_patch(3, 7, 2);
    CHECK(p37.degree(p37.root()) == 7);
    CHECK(euler(p37) == 1);

    auto g = generate_regular_patch(4, 4, 1);
    CHECK(g.vertex_count() == 9);
    CHECK(g.face_count() == 4);
    CHECK(g.degree(g.root()) == 4);
    CHECK_FALSE(g.is_boundary(g.root()));

    // {4,5} and {5,4} exercise non-triangular hyperbolic faces
    auto h = generate_regular_patch(5, 4, 3);
    for (VertexId v = 0; v < h.vertex_count(); ++v)
        if (!h.is_boundary(v)) CHECK(h.degree(v) == 4);
}

TEST_CASE("generation is deterministic")
{
    auto a = generate_regular_patch(3, 7, 4);
    auto b = generate_regular_patch(3, 7, 4);
    CHECK(a.labelled_faces() == b.labelled_faces());
    CHECK(a.labels() == b.labels());
}

TEST_CASE("spherical and unsupported parameters")
{
    // {3,5} closes up into the icosahedron after a few generations
    CHECK(code_of([] { generate_regular_patch(3, 5, 6); }) == ErrorCode::UnsupportedParameters);
    CHECK(code_of([] { generate_regular_patch(2, 5, 1); }) == ErrorCode::UnsupportedParameters);
    CHECK(code_of([] { generate_torus_quotient(3, 7, 3); }) == ErrorCode::UnsupportedParameters);
    CHECK(code_of([] { generate_torus_quotient(4, 4, 2); }) == ErrorCode::UnsupportedParameters);
    auto small = generate_regular_patch(3, 5, 1);
    CHECK(small.degree(small.root()) == 5);
}

TEST_CASE("torus quotients")
{
    auto t44 = generate_torus_quotient(4, 4, 3);
    CHECK(t44.vertex_count() == 9);
    CHECK(t44.face_count() == 9);
    auto t36 = generate_torus_quotient(3, 6, 3);
    CHECK(t36.vertex_count() == 9);
    CHECK(t36.face_count() == 18);
    for (VertexId v = 0; v < 9; ++v) {
        CHECK(t44.degree(v) == 4);
        CHECK(t36.degree(v) == 6);
    }
    auto t63 = generate_torus_quotient(6, 3, 3);
    for (VertexId v = 0; v < t63.vertex_count(); ++v) CHECK(t63.degree(v) == 3);
}

TEST_CASE("flower degree")
{
    auto p = generate_regular_patch(3, 6, 3);
    CHECK(flower_degree(p, p.root()) == 36);
    auto t = generate_torus_quotient(4, 4, 4);
    CHECK(flower_degree(t, 0) == 16);
    auto h = generate_regular_patch(3, 7, 3);
    CHECK(flower_degree(h, h.root()) == 49);
    CHECK(code_of([&] { flower_degree(t, 99); }) == ErrorCode::UnknownVertex);
}

TEST_CASE("edge flip keeps a torus triangulation")
{
    auto t = generate_torus_quotient(3, 6, 5);
    auto f = flip_edge(t, 0);
    CHECK(f.vertex_count() == t.vertex_count());
    CHECK(f.edge_count() == t.edge_count());
    CHECK(euler(f) == 0);
    int sv = 0;
    for (VertexId v = 0; v < f.vertex_count(); ++v) sv += f.degree(v);
    CHECK(sv == 6 * f.vertex_count());
    CHECK(canonical_code(f) != canonical_code(t));
}

TEST_CASE("rotation fans")
{
    auto p = generate_regular_patch(3, 7, 3);
    for (VertexId v = 0; v < p.vertex_count(); ++v) {
        auto nb = p.neighbors(v);
        auto cf = p.corner_faces(v);
        CHECK(cf.size() == (p.is_boundary(v) ? nb.size() - 1 : nb.size()));
        for (std::size_t i = 0; i < cf.size(); ++i) {
            auto face = p.face(cf[i]);
            // corner i is bounded by neighbours i and i+1
            CHECK(std::find(face.begin(), face.end(), nb[i]) != face.end());
            CHECK(std::find(face.begin(), face.end(), nb[(i + 1) % nb.size()]) != face.end());
        }
    }
}
