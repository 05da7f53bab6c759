#include "icp/packing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "icp/errors.hpp"

namespace icp {

namespace {

constexpr double kPi = std::numbers::pi;

inline double wedge(double rv, double rw, double theta)
{
    return 2.0 * std::atan2(rw * std::sin(theta), rv + rw * std::cos(theta));
}

inline double wedge_dr_self(double rv, double rw, double theta)
{
    const double l2 = rv * rv + rw * rw + 2.0 * rv * rw * std::cos(theta);
    return -2.0 * rw * std::sin(theta) / l2;
}

void check_radii(double rv, double rw, double theta)
{
    if (!(rv > 0.0) || !(rw > 0.0) || !std::isfinite(rv) || !std::isfinite(rw))
        throw Error(ErrorCode::DomainError, "radii must be positive and finite");
    if (!(theta > 0.0 && theta < kPi)) throw Error(ErrorCode::DomainError, "angle must lie in (0, pi)");
}

// Sum of wedges at v for radius exp(s), and its derivative in s.
struct LocalAngle {
    double value;
    double slope;
};

class Evaluator {
public:
    Evaluator(const PlanarMap& map, const AngleAssignment& theta) : map_(map)
    {
        sin_.resize(map.edge_count());
        cos_.resize(map.edge_count());
        for (EdgeId e = 0; e < map.edge_count(); ++e) {
            sin_[e] = std::sin(theta[e]);
            cos_[e] = std::cos(theta[e]);
        }
    }

    double cone(const std::vector<double>& r, VertexId v) const
    {
        auto nb = map_.neighbors(v);
        auto ie = map_.incident_edges(v);
        double s = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double rw = r[nb[i]];
            s += 2.0 * std::atan2(rw * sin_[ie[i]], r[v] + rw * cos_[ie[i]]);
        }
        return s;
    }

    LocalAngle local(const std::vector<double>& r, VertexId v, double rv) const
    {
        auto nb = map_.neighbors(v);
        auto ie = map_.incident_edges(v);
        LocalAngle out{0.0, 0.0};
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double rw = r[nb[i]];
            const double sn = sin_[ie[i]], cs = cos_[ie[i]];
            out.value += 2.0 * std::atan2(rw * sn, rv + rw * cs);
            out.slope += rv * (-2.0 * rw * sn / (rv * rv + rw * rw + 2.0 * rv * rw * cs));
        }
        return out;
    }

    void curvature(const std::vector<double>& r, CurvatureField& out) const
    {
        const int n = map_.vertex_count();
        out.K.assign(n, std::nan(""));
        out.alpha.assign(n, std::nan(""));
        for (VertexId v = 0; v < n; ++v) {
            if (map_.is_boundary(v)) continue;
            out.alpha[v] = cone(r, v);
            out.K[v] = 2.0 * kPi - out.alpha[v];
        }
    }

private:
    const PlanarMap& map_;
    std::vector<double> sin_, cos_;
};

// Radius at v solving cone angle = 2 pi with neighbours frozen. The cone
// angle is strictly decreasing in r(v), from 2 T(v) at 0 to 0 at infinity.
double solve_local(const Evaluator& ev, const std::vector<double>& r, VertexId v)
{
    auto g = [&](double s) {
        auto la = ev.local(r, v, std::exp(s));
        return LocalAngle{la.value - 2.0 * kPi, la.slope};
    };
    double s0 = std::log(r[v]);
    auto g0 = g(s0);
    if (g0.value == 0.0) return r[v];
    double lo, hi;
    double step = 1.0;
    if (g0.value > 0.0) {
        lo = s0;
        hi = s0 + step;
        int tries = 0;
        while (g(hi).value > 0.0) {
            lo = hi;
            step *= 2.0;
            hi += step;
            if (++tries > 60) return std::exp(hi);
        }
    } else {
        hi = s0;
        lo = s0 - step;
        int tries = 0;
        while (g(lo).value < 0.0) {
            hi = lo;
            step *= 2.0;
            lo -= step;
            if (++tries > 60) return std::exp(lo);
        }
    }
    // Newton steps kept inside the bracket, bisection otherwise.
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        auto gs = g(s);
        if (gs.value == 0.0) break;
        if (gs.value > 0.0)
            lo = s;
        else
            hi = s;
        double next = gs.slope < 0.0 ? s - gs.value / gs.slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(s))) {
            s = next;
            break;
        }
        s = next;
    }
    return std::exp(s);
}

void relax_free_boundary(const PlanarMap& map, std::vector<double>& r)
{
    for (VertexId b : map.boundary()) {
        double acc = 0.0;
        for (VertexId w : map.neighbors(b)) acc += std::log(r[w]);
        r[b] = std::exp(acc / map.degree(b));
    }
}

}  // namespace

PackingMetric::PackingMetric(std::vector<double> r) : radius(std::move(r))
{
    for (double x : radius)
        if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::DomainError, "radii must be positive and finite");
}

PackingMetric PackingMetric::uniform(const PlanarMap& map, double r)
{
    return PackingMetric(std::vector<double>(map.vertex_count(), r));
}

PackingMetric PackingMetric::normalized_at(VertexId v) const
{
    PackingMetric out = *this;
    const double s = radius.at(v);
    for (double& x : out.radius) x /= s;
    return out;
}

double alpha_wedge(double r_v, double r_w, double theta)
{
    check_radii(r_v, r_w, theta);
    return wedge(r_v, r_w, theta);
}

double alpha_wedge_dr_self(double r_v, double r_w, double theta)
{
    check_radii(r_v, r_w, theta);
    return wedge_dr_self(r_v, r_w, theta);
}

double edge_length(double r_v, double r_w, double theta)
{
    check_radii(r_v, r_w, theta);
    return std::sqrt(std::max(0.0, r_v * r_v + r_w * r_w + 2.0 * r_v * r_w * std::cos(theta)));
}

double cone_angle(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r, VertexId v)
{
    require_angles(map, theta);
    if (map.is_boundary(v))
        throw Error(ErrorCode::BoundaryVertex, "cone angle is undefined at boundary vertex " + std::to_string(map.label(v)));
    double s = 0.0;
    auto nb = map.neighbors(v);
    auto ie = map.incident_edges(v);
    for (std::size_t i = 0; i < nb.size(); ++i) s += alpha_wedge(r[v], r[nb[i]], theta[ie[i]]);
    return s;
}

double CurvatureField::max_abs() const
{
    double m = 0.0;
    for (double k : K)
        if (!std::isnan(k)) m = std::max(m, std::abs(k));
    return m;
}

double CurvatureField::sum() const
{
    double s = 0.0;
    for (double k : K)
        if (!std::isnan(k)) s += k;
    return s;
}

CurvatureField curvature(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r)
{
    require_angles(map, theta);
    if (r.size() != static_cast<std::size_t>(map.vertex_count()))
        throw Error(ErrorCode::DomainError, "metric size does not match the map");
    Evaluator ev(map, theta);
    CurvatureField out;
    ev.curvature(r.radius, out);
    return out;
}

std::string_view to_string(SolveMethod m) noexcept { return m == SolveMethod::RicciFlow ? "ricci-flow" : "fixed-point"; }
std::string_view to_string(BoundaryMode m) noexcept { return m == BoundaryMode::FixedRadii ? "fixed-radii" : "free"; }

SolveMethod solve_method_from_string(std::string_view s)
{
    if (s == "ricci-flow") return SolveMethod::RicciFlow;
    if (s == "fixed-point") return SolveMethod::FixedPoint;
    throw Error(ErrorCode::ParseError, "unknown solver method '" + std::string(s) + "'");
}

BoundaryMode boundary_mode_from_string(std::string_view s)
{
    if (s == "fixed-radii" || s == "fixed") return BoundaryMode::FixedRadii;
    if (s == "free") return BoundaryMode::Free;
    throw Error(ErrorCode::ParseError, "unknown boundary mode '" + std::string(s) + "'");
}

SolveResult solve(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r0, const SolverConfig& cfg)
{
    require_angles(map, theta);
    if (r0.size() != static_cast<std::size_t>(map.vertex_count()))
        throw Error(ErrorCode::DomainError, "initial metric size does not match the map");
    if (!(cfg.tol > 0.0) || !(cfg.step > 0.0)) throw Error(ErrorCode::DomainError, "solver tol and step must be positive");
    auto c1 = check_c1(map, theta);
    if (!c1.c1_pass) throw Error(ErrorCode::C1Violated, "max |C1 residual| = " + std::to_string(c1.c1_max_abs));

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    const bool free_disk = cfg.boundary == BoundaryMode::Free && map.topology() == Topology::DiskPatch;
    std::vector<VertexId> flowing;
    for (VertexId v : map.bfs_order())
        if (!map.is_boundary(v)) flowing.push_back(v);

    Evaluator ev(map, theta);
    std::vector<double> r = r0.radius;
    if (free_disk) relax_free_boundary(map, r);

    SolveResult res;
    CurvatureField K;
    ev.curvature(r, K);
    double maxK = K.max_abs();
    res.log.push_back({0, maxK, cfg.step, elapsed()});

    std::vector<double> best_r = r;
    double best_K = maxK;
    int iter = 0;

    if (cfg.method == SolveMethod::RicciFlow) {
        double h = cfg.step;
        int streak = 0;
        double window_start = maxK;
        long attempts = 0;
        const long max_attempts = 20L * cfg.max_iters + 1000;
        std::vector<double> trial(r.size());
        CurvatureField trial_K;
        while (maxK > cfg.tol && iter < cfg.max_iters && attempts < max_attempts) {
            ++attempts;
            trial = r;
            for (VertexId v : flowing) {
                const double rv = r[v];
                trial[v] = rv * std::exp(-h * K.K[v] * std::sinh(rv) / rv);
            }
            if (free_disk) relax_free_boundary(map, trial);
            bool ok = true;
            for (VertexId v : flowing)
                if (!(trial[v] > 0.0) || !std::isfinite(trial[v])) ok = false;
            double trial_max = 0.0;
            if (ok) {
                ev.curvature(trial, trial_K);
                trial_max = trial_K.max_abs();
                ok = std::isfinite(trial_max) && trial_max <= 1.5 * maxK;
            }
            if (!ok) {
                h *= 0.5;
                streak = 0;
                if (h < 1e-300) break;
                continue;
            }
            r.swap(trial);
            std::swap(K, trial_K);
            maxK = trial_max;
            ++iter;
            res.log.push_back({iter, maxK, h, elapsed()});
            if (maxK < best_K) {
                best_K = maxK;
                best_r = r;
            }
            if (++streak == 10) {
                // Grow only if the last window made progress; a window without
                // net decrease means the step sits at the stability edge.
                h = maxK < window_start ? 2.0 * h : 0.5 * h;
                streak = 0;
                window_start = maxK;
            }
        }
    } else {
        while (maxK > cfg.tol && iter < cfg.max_iters) {
            for (VertexId v : flowing) r[v] = solve_local(ev, r, v);
            if (free_disk) relax_free_boundary(map, r);
            ev.curvature(r, K);
            maxK = K.max_abs();
            ++iter;
            res.log.push_back({iter, maxK, 0.0, elapsed()});
            if (maxK < best_K) {
                best_K = maxK;
                best_r = r;
            }
            if (!std::isfinite(maxK)) break;
        }
    }

    res.iterations = iter;
    res.converged = best_K <= cfg.tol;
    res.metric = PackingMetric(best_r).normalized_at(map.root());
    res.curvature = curvature(map, theta, res.metric);
    return res;
}

}  // namespace icp
