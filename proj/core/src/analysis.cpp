#include "icp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icp/errors.hpp"

namespace icp {

namespace {

constexpr double kPi = std::numbers::pi;

double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : std::nan("");
}

bool in_region(const PlanarMap& map, VertexId v, int depth)
{
    return map.interior_depth()[v] >= depth;
}

}  // namespace

double FamilySpec::angle() const { return std::isnan(theta) ? kPi - 2.0 * kPi / p : theta; }

std::string FamilySpec::name() const { return "{" + std::to_string(p) + "," + std::to_string(q) + "}"; }

std::string_view to_string(TypeDiagnosis d) noexcept
{
    switch (d) {
    case TypeDiagnosis::ParabolicLike: return "parabolic-like";
    case TypeDiagnosis::HyperbolicLike: return "hyperbolic-like";
    case TypeDiagnosis::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DichotomyReport dichotomy_experiment(const FamilySpec& family, const std::vector<int>& generations,
                                     const SolverConfig& cfg, const DiagnosisThresholds& thresholds)
{
    if (generations.empty()) throw Error(ErrorCode::DomainError, "no generations given");
    DichotomyReport rep;
    rep.family = family.name();
    rep.all_converged = true;
    std::vector<double> xs, ys;
    int largest = -1;

    for (int g : generations) {
        PlanarMap map = generate_regular_patch(family.p, family.q, g);
        AngleAssignment theta = AngleAssignment::uniform(map, family.angle());
        SolverConfig c = cfg;
        c.boundary = BoundaryMode::FixedRadii;
        SolveResult res = solve(map, theta, PackingMetric::uniform(map), c);

        GenerationFit fit;
        fit.generation = g;
        fit.vertices = map.vertex_count();
        fit.converged = res.converged;
        fit.iterations = res.iterations;
        fit.max_abs_K = res.curvature.max_abs();
        double sum = 0.0;
        for (VertexId v : map.boundary()) sum += res.metric[v];
        fit.boundary_radius = sum / static_cast<double>(map.boundary().size());
        rep.generations.push_back(fit);
        rep.all_converged = rep.all_converged && res.converged;
        xs.push_back(g);
        ys.push_back(std::log(fit.boundary_radius));

        if (g > largest) {
            largest = g;
            double sT = 0, sTh = 0, sD = 0;
            int n = 0;
            for (VertexId v = 0; v < map.vertex_count(); ++v) {
                if (map.is_boundary(v)) continue;
                sT += character_T(map, theta, v);
                sTh += comb_angle_theta(map, v);
                sD += map.degree(v);
                ++n;
            }
            if (n == 0) throw Error(ErrorCode::EmptyInterior, "patch has no interior vertex");
            rep.mean_T = sT / n;
            rep.mean_theta = sTh / n;
            rep.mean_deg = sD / n;
            rep.interior_vertices = n;
        }
    }
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) rep.successive_rates.push_back((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
    rep.rate = xs.size() >= 2 ? ols_slope(xs, ys) : std::nan("");

    const double two_pi = 2.0 * kPi;
    if (rep.rate < thresholds.hyperbolic_rate && rep.mean_T > two_pi + thresholds.mean_T_tol)
        rep.diagnosis = TypeDiagnosis::HyperbolicLike;
    else if (std::abs(rep.rate) < thresholds.parabolic_rate && std::abs(rep.mean_T - two_pi) < thresholds.mean_T_tol)
        rep.diagnosis = TypeDiagnosis::ParabolicLike;
    else
        rep.diagnosis = TypeDiagnosis::Inconclusive;
    return rep;
}

RingReport ring_check(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r,
                      const RingOptions& opts)
{
    require_angles(map, theta);
    RingReport rep;
    rep.required_depth = opts.min_depth;
    if (opts.ball_condition) {
        const double eps = theta.pinch();
        rep.required_depth = static_cast<int>(std::floor(6.0 * kPi / eps)) + 1;
    }
    double worst_score = -std::numeric_limits<double>::infinity();
    rep.lemma2_margin = std::numeric_limits<double>::infinity();
    for (VertexId u = 0; u < map.vertex_count(); ++u) {
        if (!in_region(map, u, rep.required_depth)) continue;
        ++rep.checked_vertices;
        const int S = flower_degree(map, u);
        double sum = 0.0, mx = 0.0;
        for (VertexId v : map.neighbors(u)) {
            RingEdge e{u, v, std::log(r[v] / r[u]), S};
            const double score = -e.log_ratio / S;
            if (score > worst_score) {
                worst_score = score;
                rep.worst = e;
            }
            rep.edges.push_back(e);
            sum += r[v];
            mx = std::max(mx, r[v]);
        }
        rep.lemma2_margin = std::min(rep.lemma2_margin, (sum - mx) / r[u]);
    }
    if (rep.checked_vertices == 0)
        throw Error(ErrorCode::EmptyInterior, "no vertex at interior depth >= " + std::to_string(rep.required_depth));
    rep.empirical_C = std::max(0.0, worst_score);
    rep.bound_holds = true;
    for (const auto& e : rep.edges) {
        const double floor = -rep.empirical_C * e.flower;
        if (!(e.log_ratio >= floor - 1e-12 * std::max(1.0, std::abs(floor)))) rep.bound_holds = false;
    }
    return rep;
}

Lemma2Report lemma2_check(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r, int min_depth)
{
    require_angles(map, theta);
    Lemma2Report rep;
    rep.margin_subtracted = rep.margin_plain = std::numeric_limits<double>::infinity();
    rep.epsilon1 = theta.pinch();
    rep.reference = 2.0 * rep.epsilon1 / kPi;
    for (VertexId u = 0; u < map.vertex_count(); ++u) {
        if (!in_region(map, u, min_depth)) continue;
        ++rep.checked_vertices;
        double sum = 0.0, mx = 0.0;
        for (VertexId v : map.neighbors(u)) {
            sum += r[v];
            mx = std::max(mx, r[v]);
        }
        const double sub = (sum - mx) / r[u];
        if (sub < rep.margin_subtracted) {
            rep.margin_subtracted = sub;
            rep.worst = u;
        }
        rep.margin_plain = std::min(rep.margin_plain, sum / r[u]);
    }
    if (rep.checked_vertices == 0)
        throw Error(ErrorCode::EmptyInterior, "no vertex at interior depth >= " + std::to_string(min_depth));
    return rep;
}

CountTable count_radii_check(const Layout& layout, double bound)
{
    if (layout.frame != Frame::UnitDisk) throw Error(ErrorCode::NotInsideDisk, "count check needs a unit-disk layout");
    CountTable t;
    t.bound = bound;
    if (layout.radius.empty()) return t;
    std::vector<double> r = layout.radius;
    std::sort(r.begin(), r.end(), std::greater<>());
    const int kmax = std::max(1, static_cast<int>(std::ceil(-std::log2(r.back()))) + 1);
    std::size_t prev = 0;
    for (int k = 1; k <= kmax; ++k) {
        CountRow row;
        row.k = k;
        row.tau = std::ldexp(1.0, -k);
        // r sorted descending: count of r >= tau
        row.N = static_cast<std::size_t>(
            std::upper_bound(r.begin(), r.end(), row.tau, [](double tau, double x) { return tau > x; }) - r.begin());
        row.scaled = static_cast<double>(row.N) * row.tau * row.tau;
        if (row.N < prev) t.monotone = false;
        prev = row.N;
        t.max_scaled = std::max(t.max_scaled, row.scaled);
        t.rows.push_back(row);
    }
    return t;
}

std::string_view to_string(VertexStatistic s) noexcept
{
    switch (s) {
    case VertexStatistic::T: return "T";
    case VertexStatistic::Theta: return "theta";
    case VertexStatistic::Degree: return "deg";
    case VertexStatistic::L: return "L";
    case VertexStatistic::K: return "k";
    }
    return "?";
}

VertexStatistic vertex_statistic_from_string(std::string_view s)
{
    for (auto v : {VertexStatistic::T, VertexStatistic::Theta, VertexStatistic::Degree, VertexStatistic::L,
                   VertexStatistic::K})
        if (s == to_string(v)) return v;
    throw Error(ErrorCode::ParseError, "unknown statistic '" + std::string(s) + "' (T, theta, deg, L, k)");
}

double vertex_statistic(const PlanarMap& map, const AngleAssignment& theta, VertexStatistic s, VertexId v)
{
    switch (s) {
    case VertexStatistic::T: return character_T(map, theta, v);
    case VertexStatistic::Theta: return comb_angle_theta(map, v);
    case VertexStatistic::Degree: return map.degree(v);
    case VertexStatistic::L: return character_L(map, theta, v);
    case VertexStatistic::K: return curvature_k(map, v);
    }
    return std::nan("");
}

double unimodular_average(const PlanarMap& map, const AngleAssignment& theta, VertexStatistic s)
{
    if (map.topology() != Topology::Torus) throw Error(ErrorCode::NotTorus, "unimodular average needs a torus map");
    require_angles(map, theta);
    double sum = 0.0;
    for (VertexId v = 0; v < map.vertex_count(); ++v) sum += vertex_statistic(map, theta, s, v);
    return sum / map.vertex_count();
}

}  // namespace icp
