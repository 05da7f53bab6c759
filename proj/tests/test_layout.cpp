#include <doctest.h>

#include <cmath>
#include <sstream>

#include "icp/errors.hpp"
#include "icp/layout.hpp"
#include "icp/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace icp;
using std::numbers::pi;

namespace {

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

struct Solved {
    PlanarMap map;
    AngleAssignment theta;
    PackingMetric metric;
};

Solved solved(int p, int q, int g, double tol = 1e-12)
{
    auto m = generate_regular_patch(p, q, g);
    auto th = AngleAssignment::regular(m);
    SolverConfig cfg;
    cfg.method = SolveMethod::FixedPoint;
    cfg.tol = tol;
    auto res = solve(m, th, PackingMetric::uniform(m), cfg);
    REQUIRE(res.converged);
    return {m, th, res.metric};
}

}  // namespace

TEST_CASE("two circles")
{
    auto m = fixture::two_triangles();
    auto th = AngleAssignment::uniform(m, pi / 3);
    auto lay = layout_embed(m, th, PackingMetric::uniform(m));
    VertexId a = m.index_of(0), b = m.index_of(1);
    CHECK(std::abs(lay.center[a]) < 1e-15);
    CHECK(std::abs(lay.center[b]) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    auto [l, r] = m.edge_faces(m.edge_between(a, b));
    for (FaceId f : {l, r}) {
        CHECK(std::abs(lay.dual_point[f] - lay.center[a]) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(lay.dual_point[f] - lay.center[b]) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // the two intersection points of the circles, a chord of length 1
    CHECK(std::abs(lay.dual_point[l] - lay.dual_point[r]) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("{4,4} layout is the sqrt 2 grid")
{
    auto m = generate_regular_patch(4, 4, 4);
    auto th = AngleAssignment::uniform(m, pi / 2);
    auto lay = layout_embed(m, th, PackingMetric::uniform(m));
    const double s = std::sqrt(2.0);
    for (VertexId v = 0; v < m.vertex_count(); ++v) {
        Point z = lay.center[v] / s;
        CHECK(std::abs(z.real() - std::round(z.real())) < 1e-9);
        CHECK(std::abs(z.imag() - std::round(z.imag())) < 1e-9);
    }
    VertexId first = m.neighbors(m.root())[0];
    CHECK(std::abs(lay.center[first] - Point(s, 0)) < 1e-15);
    auto rep = consistency_check(lay, m, th);
    CHECK(rep.max_edge_dev_rel < 1e-12);
    CHECK(rep.max_dual_spread_rel < 1e-12);
    CHECK(rep.overlapping_pairs == 0);
}

TEST_CASE("{3,6} layout is the triangular lattice")
{
    auto m = generate_regular_patch(3, 6, 4);
    auto th = AngleAssignment::uniform(m, pi / 3);
    auto lay = layout_embed(m, th, PackingMetric::uniform(m));
    const double s = std::sqrt(3.0);
    const Point w(0.5, std::sqrt(3.0) / 2);
    for (VertexId v = 0; v < m.vertex_count(); ++v) {
        Point z = lay.center[v] / s;
        double b = z.imag() / w.imag();
        double a = z.real() - b * w.real();
        CHECK(std::abs(a - std::round(a)) < 1e-9);
        CHECK(std::abs(b - std::round(b)) < 1e-9);
    }
}

TEST_CASE("solved hyperbolic patch is consistent")
{
    auto s = solved(3, 7, 4);
    auto lay = layout_embed(s.map, s.theta, s.metric);
    ConsistencyOptions o;
    o.full_overlap_check = true;
    auto rep = consistency_check(lay, s.map, s.theta, o);
    CHECK(rep.max_edge_dev_rel <= 1e-8);
    CHECK(rep.max_dual_spread_rel <= 1e-6);
    CHECK(rep.max_angle_sum_err <= 1e-7);
    CHECK(rep.overlapping_pairs == 0);
    CHECK(rep.full_overlap_check);
    CHECK(rep.flagged_edges.empty());

    // grid candidate pairs find the same (zero) overlaps
    auto quick = consistency_check(lay, s.map, s.theta);
    CHECK(quick.overlapping_pairs == 0);
    CHECK(quick.overlap_pairs_checked < rep.overlap_pairs_checked);
}

TEST_CASE("corrupted layouts are flagged")
{
    auto m = generate_regular_patch(3, 6, 3);
    auto th = AngleAssignment::uniform(m, pi / 3);
    auto lay = layout_embed(m, th, PackingMetric::uniform(m));
    VertexId v = m.neighbors(m.root())[2];
    lay.center[v] += Point(0.1, 0.0);
    auto rep = consistency_check(lay, m, th);
    CHECK(rep.flagged_edges.size() == static_cast<std::size_t>(m.degree(v)));
    for (EdgeId e : rep.flagged_edges) {
        auto [a, b] = m.edge(e);
        CHECK((a == v || b == v));
    }

    // swap two far-apart centres: kites must overlap
    auto lay2 = layout_embed(m, th, PackingMetric::uniform(m));
    std::swap(lay2.center[m.root()], lay2.center[m.boundary()[0]]);
    CHECK(consistency_check(lay2, m, th).overlapping_pairs > 0);
}

TEST_CASE("curved metric does not close up")
{
    auto m = generate_regular_patch(3, 7, 3);
    auto th = AngleAssignment::uniform(m, pi / 3);
    CHECK(code_of([&] { layout_embed(m, th, PackingMetric::uniform(m)); }) == ErrorCode::InconsistentHolonomy);
}

TEST_CASE("normalisation into the disk")
{
    Layout one;
    one.center = {Point(0, 0)};
    one.radius = {1.0};
    auto n = normalize_to_disk(one, 0);
    CHECK(n.radius[0] == doctest::Approx(1 - 1e-9).epsilon(1e-15));
    CHECK(n.frame == Frame::UnitDisk);

    auto s = solved(3, 7, 4);
    auto lay = layout_embed(s.map, s.theta, s.metric);
    auto d = normalize_to_disk(lay, s.map.root());
    double mx = 0.0;
    for (VertexId v = 0; v < s.map.vertex_count(); ++v) {
        mx = std::max(mx, std::abs(d.center[v]) + d.radius[v]);
        CHECK(std::abs(d.hyp_center[v] - d.center[v]) <= d.radius[v]);
    }
    CHECK(mx == doctest::Approx(1 - 1e-9).epsilon(1e-14));
    CHECK(std::abs(d.center[s.map.root()]) == 0.0);

    auto dd = normalize_to_disk(d, s.map.root());
    CHECK(dd.center == d.center);
    CHECK(dd.radius == d.radius);
    CHECK(dd.hyp_center == d.hyp_center);
}

TEST_CASE("hyperbolic centres")
{
    CHECK(hyperbolic_center(Point(0, 0), 0.5) == Point(0, 0));
    Point z = hyperbolic_center(Point(0.5, 0), 0.2);
    CHECK(z.imag() == 0.0);
    CHECK(z.real() == doctest::Approx(oracle::hyperbolic_midpoint_bisect(0.3, 0.7)).epsilon(1e-12));
    CHECK(z.real() == doctest::Approx(std::tanh((std::atanh(0.3) + std::atanh(0.7)) / 2)).epsilon(1e-14));
    // rotated input gives the rotated centre
    Point zr = hyperbolic_center(Point(0, 0.5), 0.2);
    CHECK(std::abs(zr - Point(0, z.real())) < 1e-15);

    CounterRng rng(99);
    for (int i = 0; i < 1000; ++i) {
        double d = 0.999 * rng.uniform();
        double r = (1 - d) * (0.001 + 0.998 * rng.uniform());
        double phi = 2 * pi * rng.uniform();
        Point c = std::polar(d, phi);
        Point h = hyperbolic_center(c, r);
        CHECK(std::abs(h - c) <= r);
    }
    CHECK(code_of([] { hyperbolic_center(Point(0.9, 0), 0.2); }) == ErrorCode::NotInsideDisk);
}

TEST_CASE("hyperbolic distance")
{
    CHECK(d_hyp(0, 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(d_hyp(Point(0.3, 0.2), Point(0.3, 0.2)) == 0.0);
    CHECK(code_of([] { d_hyp(0, Point(1, 0)); }) == ErrorCode::NotInsideDisk);
    CounterRng rng(4);
    auto sample = [&] { return std::polar(0.95 * std::sqrt(rng.uniform()), 2 * pi * rng.uniform()); };
    for (int i = 0; i < 500; ++i) {
        Point a = sample(), b = sample(), c = sample();
        CHECK(d_hyp(a, b) == doctest::Approx(d_hyp(b, a)).epsilon(1e-12));
        CHECK(d_hyp(a, b) == doctest::Approx(oracle::d_hyp_via_automorphism(a, b)).epsilon(1e-9));
        CHECK(d_hyp(a, c) <= d_hyp(a, b) + d_hyp(b, c) + 1e-12);
    }
}

TEST_CASE("SVG export")
{
    auto m = generate_regular_patch(3, 6, 2);
    Layout empty;
    empty.frame = Frame::UnitDisk;
    auto svg0 = to_svg(empty, m);
    CHECK(svg0.find("<svg") != std::string::npos);
    CHECK(svg0.find("class=\"frame\"") != std::string::npos);
    CHECK(svg0.find("</svg>") != std::string::npos);

    auto two = fixture::two_triangles();
    Layout l2;
    l2.center = {Point(0, 0), Point(1.5, 0), Point(0.5, 1), Point(0.5, -1)};
    l2.radius = {1.0, 0.5, 0.25, 0.25};
    auto svg2 = to_svg(l2, two);
    std::size_t circles = 0;
    for (std::size_t p = svg2.find("<circle"); p != std::string::npos; p = svg2.find("<circle", p + 1)) ++circles;
    CHECK(circles == 4);

    auto th = AngleAssignment::uniform(m, pi / 3);
    auto lay = normalize_to_disk(layout_embed(m, th, PackingMetric::uniform(m)), m.root());
    SvgOptions o;
    o.draw_edges = o.draw_dual_points = true;
    auto a = to_svg(lay, m, o);
    CHECK(a == to_svg(lay, m, o));
    CHECK(a.find("<line") != std::string::npos);
}

TEST_CASE("CSV round trip")
{
    auto s = solved(3, 7, 3);
    auto lay = layout_embed(s.map, s.theta, s.metric);
    std::stringstream ss;
    write_vertex_csv(ss, lay, s.map);
    auto back = read_vertex_csv(ss, s.map);
    CHECK(back.center == lay.center);
    CHECK(back.radius == lay.radius);
    std::stringstream bad("vertex,x,y,r\n0,1,2,3\n");
    CHECK(code_of([&] { read_vertex_csv(bad, s.map); }) == ErrorCode::UnknownVertex);
    std::stringstream junk("nope\n");
    CHECK(code_of([&] { read_vertex_csv(junk, s.map); }) == ErrorCode::ParseError);
}
