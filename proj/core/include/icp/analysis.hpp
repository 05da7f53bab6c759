#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "icp/angles.hpp"
#include "icp/layout.hpp"
#include "icp/packing.hpp"
#include "icp/planar_map.hpp"

namespace icp {

/// A regular {p,q} family with a constant angle on every edge.
struct FamilySpec {
    int p = 3;
    int q = 6;
    /// NaN selects pi - 2 pi / p, the value that satisfies C1.
    double theta = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] double angle() const;
    [[nodiscard]] std::string name() const;
};

struct DiagnosisThresholds {
    double hyperbolic_rate = -0.1;  // fitted rate must be below this
    double parabolic_rate = 0.02;   // |rate| below this
    double mean_T_tol = 0.01;
};

enum class TypeDiagnosis { ParabolicLike, HyperbolicLike, Inconclusive };
std::string_view to_string(TypeDiagnosis d) noexcept;

struct GenerationFit {
    int generation = 0;
    int vertices = 0;
    double boundary_radius = 0.0;  // mean over boundary vertices, root radius 1
    double max_abs_K = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct DichotomyReport {
    std::string family;
    double mean_T = 0.0;
    double mean_theta = 0.0;
    double mean_deg = 0.0;
    int interior_vertices = 0;
    std::vector<GenerationFit> generations;
    /// OLS slope of log boundary_radius against generation.
    double rate = 0.0;
    /// log(R_{g+1} / R_g) for consecutive generations.
    std::vector<double> successive_rates;
    TypeDiagnosis diagnosis = TypeDiagnosis::Inconclusive;
    bool all_converged = false;
};

/// Solves each generation's patch with boundary radii fixed at 1, normalises
/// the root radius to 1 and tracks the mean boundary radius. Means of T,
/// theta and degree are over interior vertices of the largest patch.
/// Throws C1Violated.
DichotomyReport dichotomy_experiment(const FamilySpec& family, const std::vector<int>& generations,
                                     const SolverConfig& cfg = {SolveMethod::FixedPoint},
                                     const DiagnosisThresholds& thresholds = {});

struct RingOptions {
    int min_depth = 2;
    /// Use the ball condition depth > 6 pi / eps (eps the angle pinch)
    /// instead of min_depth.
    bool ball_condition = false;
};

struct RingEdge {
    VertexId u = kNone;
    VertexId v = kNone;
    double log_ratio = 0.0;  // log(r(v) / r(u))
    int flower = 0;          // S(u)
};

struct RingReport {
    std::vector<RingEdge> edges;  // directed, u in the checked region
    int checked_vertices = 0;
    int required_depth = 0;
    double empirical_C = 0.0;  // max(0, max -log_ratio / S(u))
    RingEdge worst;
    /// r(v)/r(u) >= exp(-C S(u)) on every checked edge, up to roundoff.
    bool bound_holds = false;
    double lemma2_margin = 0.0;  // over the checked region
};

/// Throws EmptyInterior when no vertex meets the depth requirement.
RingReport ring_check(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r,
                      const RingOptions& opts = {});

struct Lemma2Report {
    double margin_subtracted = 0.0;  // min (sum r_v - max r_v) / r_u
    double margin_plain = 0.0;       // min sum r_v / r_u
    VertexId worst = kNone;
    double epsilon1 = 0.0;           // min (pi - theta)
    double reference = 0.0;          // 2 epsilon1 / pi
    int checked_vertices = 0;

    [[nodiscard]] bool positive() const noexcept { return margin_subtracted > 0.0; }
    [[nodiscard]] bool plain_exceeds_reference() const noexcept { return margin_plain > reference; }
};

/// Over vertices of interior depth >= min_depth. Throws EmptyInterior.
Lemma2Report lemma2_check(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r,
                          int min_depth = 1);

struct CountRow {
    int k = 0;
    double tau = 0.0;  // 2^-k
    std::size_t N = 0;  // #{v : r(v) >= tau}
    double scaled = 0.0;  // N tau^2
};

struct CountTable {
    std::vector<CountRow> rows;
    double max_scaled = 0.0;
    bool monotone = true;  // N nonincreasing in tau
    double bound = 100.0;

    [[nodiscard]] bool pass() const noexcept { return monotone && max_scaled <= bound; }
};

/// Rows for k = 1 .. one past the smallest radius. Throws NotInsideDisk for
/// a plane-frame layout.
CountTable count_radii_check(const Layout& layout, double bound = 100.0);

enum class VertexStatistic { T, Theta, Degree, L, K };
std::string_view to_string(VertexStatistic s) noexcept;
VertexStatistic vertex_statistic_from_string(std::string_view s);

double vertex_statistic(const PlanarMap& map, const AngleAssignment& theta, VertexStatistic s, VertexId v);

/// Mean of the statistic over all vertices, the expectation under a uniform
/// root. Throws NotTorus.
double unimodular_average(const PlanarMap& map, const AngleAssignment& theta, VertexStatistic s);

}  // namespace icp
