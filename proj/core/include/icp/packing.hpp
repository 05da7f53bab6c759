#pragma once

#include <string_view>
#include <vector>

#include "icp/angles.hpp"
#include "icp/planar_map.hpp"

namespace icp {

/// Positive radius per vertex. Only ratios matter to the wedge angles.
struct PackingMetric {
    std::vector<double> radius;

    PackingMetric() = default;
    /// Throws DomainError on non-positive or non-finite radii.
    explicit PackingMetric(std::vector<double> r);

    static PackingMetric uniform(const PlanarMap& map, double r = 1.0);

    [[nodiscard]] double operator[](VertexId v) const { return radius.at(v); }
    [[nodiscard]] std::size_t size() const noexcept { return radius.size(); }

    /// Copy rescaled so that radius[v] == 1.
    [[nodiscard]] PackingMetric normalized_at(VertexId v) const;
};

/// Angle at v of the kite over edge vw: 2 arccos((r_v + r_w cos t) / |vw|),
/// evaluated as 2 atan2(r_w sin t, r_v + r_w cos t). Throws DomainError on
/// non-positive radii.
double alpha_wedge(double r_v, double r_w, double theta);

/// d alpha_wedge / d r_v = -2 r_w sin(theta) / |vw|^2.
double alpha_wedge_dr_self(double r_v, double r_w, double theta);

/// Distance between the centres of two circles meeting at angle theta.
double edge_length(double r_v, double r_w, double theta);

/// Sum of wedge angles at an interior vertex. Throws BoundaryVertex.
double cone_angle(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r, VertexId v);

/// Cone angle and curvature at interior vertices; NaN at boundary vertices.
struct CurvatureField {
    std::vector<double> K;
    std::vector<double> alpha;

    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double sum() const;
};

CurvatureField curvature(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r);

enum class SolveMethod { RicciFlow, FixedPoint };
enum class BoundaryMode { FixedRadii, Free };

std::string_view to_string(SolveMethod m) noexcept;
std::string_view to_string(BoundaryMode m) noexcept;
SolveMethod solve_method_from_string(std::string_view s);
BoundaryMode boundary_mode_from_string(std::string_view s);

struct SolverConfig {
    SolveMethod method = SolveMethod::RicciFlow;
    double step = 0.1;
    double tol = 1e-9;
    int max_iters = 100000;
    BoundaryMode boundary = BoundaryMode::FixedRadii;
};

struct SolverLogEntry {
    int iteration = 0;
    double max_abs_K = 0.0;
    double step = 0.0;
    double elapsed_s = 0.0;
};

struct SolveResult {
    PackingMetric metric;  // normalised so the root radius is 1
    CurvatureField curvature;
    std::vector<SolverLogEntry> log;
    int iterations = 0;
    bool converged = false;
};

/// Drives interior curvature to zero. Ricci flow integrates
/// d(log r)/dt = -K sinh(r) / r with adaptive explicit steps; the fixed-point
/// method sweeps vertices in BFS order solving cone_angle(v) = 2 pi for r(v)
/// with the neighbours frozen. Non-convergence is reported through
/// `converged`, with the best iterate returned. Throws C1Violated.
SolveResult solve(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r0,
                  const SolverConfig& cfg = {});

}  // namespace icp
