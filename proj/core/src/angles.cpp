#include "icp/angles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "icp/errors.hpp"
#include "icp/random.hpp"

namespace icp {

namespace {
constexpr double kPi = std::numbers::pi;
}

AngleAssignment::AngleAssignment(std::vector<double> theta) : theta_(std::move(theta))
{
    for (std::size_t e = 0; e < theta_.size(); ++e)
        if (!(theta_[e] > 0.0 && theta_[e] < kPi))
            throw Error(ErrorCode::RangeViolated,
                        "theta[" + std::to_string(e) + "] = " + std::to_string(theta_[e]) + " is outside (0, pi)");
}

AngleAssignment AngleAssignment::uniform(const PlanarMap& map, double value)
{
    return AngleAssignment(std::vector<double>(map.edge_count(), value));
}

AngleAssignment AngleAssignment::regular(const PlanarMap& map)
{
    std::vector<double> theta(map.edge_count(), 0.0);
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        auto faces = map.edge_faces(e);
        FaceId f = faces[0] != kNone ? faces[0] : faces[1];
        theta[e] = kPi - kTwoPi / map.face_degree(f);
    }
    return AngleAssignment(std::move(theta));
}

double AngleAssignment::pinch() const
{
    double m = kPi;
    for (double t : theta_) m = std::min(m, kPi - t);
    return m;
}

void require_angles(const PlanarMap& map, const AngleAssignment& theta)
{
    if (theta.size() != static_cast<std::size_t>(map.edge_count()))
        throw Error(ErrorCode::MissingAngle, "angle assignment covers " + std::to_string(theta.size()) + " of " +
                                                 std::to_string(map.edge_count()) + " edges");
}

RivinReport check_c1(const PlanarMap& map, const AngleAssignment& theta, double tol)
{
    require_angles(map, theta);
    RivinReport r;
    r.tol = tol;
    r.c1_residuals.resize(map.face_count());
    for (FaceId f = 0; f < map.face_count(); ++f) {
        double s = 0.0;
        for (EdgeId e : map.face_edges(f)) s += kPi - theta[e];
        r.c1_residuals[f] = s - kTwoPi;
        r.c1_max_abs = std::max(r.c1_max_abs, std::abs(r.c1_residuals[f]));
    }
    r.c1_pass = r.c1_max_abs <= tol;
    return r;
}

RivinReport check_rivin(const PlanarMap& map, const AngleAssignment& theta, double tol, const CycleSearchOptions& opts)
{
    RivinReport r = check_c1(map, theta, tol);
    auto cyc = min_nonfacial_cycle_weight(map, theta, opts);
    r.c2_checked = true;
    r.c2_min_weight = cyc.weight;
    r.c2_cycle = std::move(cyc.cycle);
    r.epsilon0 = r.c2_min_weight - kTwoPi;
    r.c2_prime_pass = r.epsilon0 > 0.0;
    return r;
}

double character_T(const PlanarMap& map, const AngleAssignment& theta, VertexId v)
{
    require_angles(map, theta);
    double s = 0.0;
    for (EdgeId e : map.incident_edges(v)) s += theta[e];
    return s;
}

double comb_angle_theta(const PlanarMap& map, VertexId v)
{
    if (map.is_boundary(v))
        throw Error(ErrorCode::BoundaryVertex, "vertex " + std::to_string(map.label(v)) + " lies on the boundary");
    double s = 0.0;
    for (FaceId f : map.corner_faces(v)) {
        const double d = map.face_degree(f);
        s += (d - 2.0) * kPi / d;
    }
    return s;
}

double curvature_k(const PlanarMap& map, VertexId v) { return kTwoPi - comb_angle_theta(map, v); }

double character_L(const PlanarMap& map, const AngleAssignment& theta, VertexId v)
{
    return (character_T(map, theta, v) - kTwoPi) / map.degree(v);
}

MassTransportReport mass_transport_check(const PlanarMap& map, const AngleAssignment& theta, double c1_tol)
{
    if (map.topology() != Topology::Torus)
        throw Error(ErrorCode::NotTorus, "mass transport check needs a torus map");
    auto c1 = check_c1(map, theta, c1_tol);
    if (!c1.c1_pass)
        throw Error(ErrorCode::C1Violated, "max |C1 residual| = " + std::to_string(c1.c1_max_abs));

    // m(u, v): every endpoint u of every boundary edge e of f sends
    // theta_e / (2 deg f) to every boundary occurrence v of f.
    const auto nv = static_cast<std::uint64_t>(map.vertex_count());
    std::unordered_map<std::uint64_t, double> m;
    for (FaceId f = 0; f < map.face_count(); ++f) {
        const double deg = map.face_degree(f);
        for (VertexId v : map.face(f))
            for (EdgeId e : map.face_edges(f))
                for (VertexId u : map.edge(e)) m[static_cast<std::uint64_t>(u) * nv + v] += theta[e] / (2.0 * deg);
    }

    MassTransportReport r;
    r.outgoing.assign(nv, 0.0);
    r.incoming.assign(nv, 0.0);
    r.T.resize(nv);
    r.theta.resize(nv);
    r.nonzero_pairs = m.size();
    // Sum in a fixed order so results do not depend on hash iteration.
    std::vector<std::pair<std::uint64_t, double>> entries(m.begin(), m.end());
    std::sort(entries.begin(), entries.end());
    for (auto [key, mass] : entries) {
        r.outgoing[key / nv] += mass;
        r.incoming[key % nv] += mass;
    }
    for (VertexId v = 0; v < map.vertex_count(); ++v) {
        r.T[v] = character_T(map, theta, v);
        r.theta[v] = comb_angle_theta(map, v);
        r.max_outgoing_dev = std::max(r.max_outgoing_dev, std::abs(r.outgoing[v] - r.T[v]));
        r.max_incoming_dev = std::max(r.max_incoming_dev, std::abs(r.incoming[v] - r.theta[v]));
        r.sum_T += r.T[v];
        r.sum_theta += r.theta[v];
    }
    return r;
}

AngleAssignment perturb_theta_on_c1(const PlanarMap& map, const AngleAssignment& theta, double magnitude,
                                    std::uint64_t seed)
{
    require_angles(map, theta);
    if (magnitude == 0.0) return theta;
    if (!(magnitude > 0.0)) throw Error(ErrorCode::RangeViolated, "perturbation magnitude must be non-negative");

    const int nf = map.face_count();
    const int ne = map.edge_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, ne);
    for (FaceId f = 0; f < nf; ++f)
        for (EdgeId e : map.face_edges(f)) a(f, e) = 1.0;

    CounterRng rng(seed);
    Eigen::VectorXd x(ne);
    for (int i = 0; i < ne; ++i) x[i] = rng.normal();

    // Project x onto ker(a): remove its component in the row space.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = (sv.size() > 0 ? sv[0] : 0.0) * 1e-12 * std::max(nf, ne);
    const Eigen::MatrixXd& v = svd.matrixV();
    for (int k = 0; k < sv.size(); ++k)
        if (sv[k] > cutoff) x -= v.col(k) * v.col(k).dot(x);

    const double sup = x.cwiseAbs().maxCoeff();
    if (!(sup > 1e-300)) return theta;
    x *= magnitude / sup;

    std::vector<double> out(ne);
    for (int e = 0; e < ne; ++e) {
        out[e] = theta[e] + x[e];
        if (!(out[e] > 0.0 && out[e] < kPi))
            throw Error(ErrorCode::RangeViolated, "perturbed angle on edge " + std::to_string(e) + " leaves (0, pi)");
    }
    return AngleAssignment(std::move(out));
}

}  // namespace icp
