#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "icp/errors.hpp"
#include "icp/walker.hpp"

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

Layout flat_disk(const PlanarMap& m)
{
    auto th = AngleAssignment::regular(m);
    return normalize_to_disk(layout_embed(m, th, PackingMetric::uniform(m)), m.root());
}

}  // namespace

TEST_CASE("zero-step walk")
{
    auto m = generate_regular_patch(3, 6, 3);
    auto t = srw_walk(m, m.root(), 0, 7);
    CHECK(t.steps.size() == 1);
    CHECK(t.steps[0] == m.root());
    CHECK(t.length() == 0);
    CHECK_FALSE(t.stopped_at_boundary);
}

TEST_CASE("walks are deterministic in (seed, stream)")
{
    auto m = generate_regular_patch(3, 7, 4);
    auto a = srw_walk(m, m.root(), 1000, 11, 3);
    auto b = srw_walk(m, m.root(), 1000, 11, 3);
    auto c = srw_walk(m, m.root(), 1000, 11, 4);
    CHECK(a.steps == b.steps);
    CHECK(a.steps != c.steps);
    for (std::size_t i = 0; i + 1 < a.steps.size(); ++i) CHECK(m.find_edge(a.steps[i], a.steps[i + 1]).has_value());
}

TEST_CASE("walk stops at the boundary")
{
    auto m = generate_regular_patch(4, 4, 3);
    auto t = srw_walk(m, m.root(), 100000, 1);
    CHECK(t.stopped_at_boundary);
    CHECK(m.is_boundary(t.steps.back()));
    for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) CHECK_FALSE(m.is_boundary(t.steps[i]));

    auto torus = generate_torus_quotient(4, 4, 4);
    auto u = srw_walk(torus, torus.root(), 500, 1);
    CHECK(u.length() == 500);
    CHECK_FALSE(u.stopped_at_boundary);
}

TEST_CASE("first step is uniform over a degree-4 fan")
{
    auto m = generate_regular_patch(4, 4, 3);
    REQUIRE(m.degree(m.root()) == 4);
    const int n = 40000;
    std::map<VertexId, int> hits;
    for (int i = 0; i < n; ++i) ++hits[srw_walk(m, m.root(), 1, 5, i).steps[1]];
    CHECK(hits.size() == 4);
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    for (auto [v, k] : hits) CHECK(std::abs(k - n * 0.25) <= 3 * sigma);
}

TEST_CASE("transitions are uniform over neighbours")
{
    // degrees 5, 6, 7 after two flips
    auto m = fixture::torus_4x5();
    m = flip_edge(m, 0);
    m = flip_edge(m, m.edge_count() / 2);
    REQUIRE(m.vertex_count() == 20);

    // given the current vertex, the next one is a fresh categorical draw,
    // so the pooled statistic is an ordinary chi-squared
    auto t = srw_walk(m, m.root(), 100000, 2024);
    std::map<std::pair<VertexId, VertexId>, double> hits;
    std::vector<double> out(m.vertex_count(), 0.0);
    for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
        hits[{t.steps[i], t.steps[i + 1]}] += 1;
        out[t.steps[i]] += 1;
    }
    double chi2 = 0.0;
    int dof = 0;
    for (VertexId v = 0; v < m.vertex_count(); ++v) {
        const double e = out[v] / m.degree(v);
        for (VertexId w : m.neighbors(v)) {
            auto it = hits.find({v, w});
            const double o = it == hits.end() ? 0.0 : it->second;
            chi2 += (o - e) * (o - e) / e;
        }
        dof += m.degree(v) - 1;
    }
    CHECK(hits.size() == static_cast<std::size_t>(2 * m.edge_count()));
    boost::math::chi_squared dist(dof);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);
}

TEST_CASE("speed window")
{
    CHECK(speed_window(400, false) == std::pair<std::size_t, std::size_t>{100, 400});
    CHECK(speed_window(400, true) == std::pair<std::size_t, std::size_t>{100, 360});
}

TEST_CASE("speed estimation")
{
    auto m = generate_regular_patch(3, 6, 8);
    auto lay = flat_disk(m);
    auto shortt = srw_walk(m, m.root(), 10, 1);
    CHECK(code_of([&] { estimate_speed(shortt, lay); }) == ErrorCode::TooShort);
    CHECK(code_of([&] { estimate_speed(shortt, layout_embed(m, AngleAssignment::regular(m), PackingMetric::uniform(m))); }) ==
          ErrorCode::NotInsideDisk);

    // constant radii: the radius slope vanishes
    std::vector<WalkTrace> ts;
    for (int i = 0; i < 100; ++i) ts.push_back(srw_walk(m, m.root(), 5000, 9, i));
    auto s = estimate_speed_ensemble(ts, lay);
    CHECK(std::abs(s.lambda_radius) < 1e-12);
    CHECK(s.points >= 50);
}

TEST_CASE("observables")
{
    auto m = generate_regular_patch(3, 6, 4);
    auto lay = flat_disk(m);
    auto t = srw_walk(m, m.root(), 50, 3);
    auto o = observe(t, lay);
    REQUIRE(o.radius.size() == t.steps.size());
    CHECK(o.dist_hyp[0] == 0.0);
    CHECK(o.abs_z[0] == 0.0);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(o.radius[i] == lay.radius[t.steps[i]]);
        CHECK(o.dist_hyp[i] == doctest::Approx(d_hyp(lay.hyp_center[m.root()], lay.hyp_center[t.steps[i]])));
    }
    std::ostringstream os;
    write_trace_csv(os, t, o, m);
    CHECK(os.str().rfind("step,vertex,r,abs_z,d_hyp\n", 0) == 0);
}

TEST_CASE("exit histogram")
{
    auto m = generate_regular_patch(4, 4, 4);
    auto lay = flat_disk(m);
    auto one = exit_histogram(m, lay, 1, 100000, 8, 3);
    CHECK(one.sample_count == 1);
    CHECK(one.nonempty_bins() == 1);
    CHECK(one.max_fraction() == 1.0);
    auto t = srw_walk(m, m.root(), 100000, 3, 0);
    double a = std::arg(lay.center[t.steps.back()]);
    if (a < 0) a += 2 * pi;
    std::size_t bin = static_cast<std::size_t>(a / (2 * pi / 8));
    CHECK(one.counts[bin] == 1);

    auto many = exit_histogram(m, lay, 2000, 100000, 8, 3);
    CHECK(many.sample_count == 2000);
    CHECK(many.boundary_hits == 2000);
    CHECK(many.nonempty_bins() == 8);
    CHECK(code_of([&] { exit_histogram(m, lay, 1, 10, 0, 3); }) == ErrorCode::DomainError);
}

TEST_CASE("decay series")
{
    auto m = generate_regular_patch(3, 6, 5);
    auto lay = flat_disk(m);
    std::vector<WalkTrace> ts;
    for (int i = 0; i < 50; ++i) ts.push_back(srw_walk(m, m.root(), 10000, 8, i));
    auto d = radii_decay_series(ts, lay);
    REQUIRE_FALSE(d.rows.empty());
    CHECK(d.rows[0].alive == 50);
    CHECK(std::abs(d.slope) < 1e-12);
    for (std::size_t i = 1; i < d.rows.size(); ++i) CHECK(d.rows[i].alive <= d.rows[i - 1].alive);
}
