#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "icp/planar_map.hpp"

namespace icp {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Intersection angle per edge, each strictly inside (0, pi).
class AngleAssignment {
public:
    AngleAssignment() = default;
    /// Throws RangeViolated if any value leaves (0, pi).
    explicit AngleAssignment(std::vector<double> theta);

    static AngleAssignment uniform(const PlanarMap& map, double value);
    /// pi - 2 pi / deg(f) on every edge; satisfies C1 on maps whose faces all
    /// have the same degree.
    static AngleAssignment regular(const PlanarMap& map);

    [[nodiscard]] double operator[](EdgeId e) const { return theta_.at(e); }
    [[nodiscard]] std::size_t size() const noexcept { return theta_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return theta_; }

    /// min_e (pi - theta(e)): the pinch away from pi.
    [[nodiscard]] double pinch() const;

private:
    std::vector<double> theta_;
};

/// Throws MissingAngle if theta does not cover every edge of map.
void require_angles(const PlanarMap& map, const AngleAssignment& theta);

struct NonfacialCycle {
    double weight = std::numeric_limits<double>::infinity();
    std::vector<VertexId> cycle;  // empty when no non-facial cycle exists
};

struct CycleSearchOptions {
    /// Ignore cycles with more edges than this (0 = no cap).
    int max_len = 0;
    /// Only consider cycles that separate the surface (on the torus: the
    /// contractible ones). Always true for cycles on a disk-patch.
    bool contractible_only = false;
};

struct RivinReport {
    double tol = 1e-9;
    std::vector<double> c1_residuals;  // per face
    double c1_max_abs = 0.0;
    bool c1_pass = false;

    bool c2_checked = false;
    double c2_min_weight = std::numeric_limits<double>::infinity();
    std::vector<VertexId> c2_cycle;
    double epsilon0 = std::numeric_limits<double>::infinity();
    bool c2_prime_pass = false;

    // Disclosures carried into every emitted report.
    static constexpr std::string_view kCycleReduction =
        "C2 is evaluated over simple non-facial cycles only (positive weights: any non-facial closed walk "
        "contains such a cycle or traces at least two faces)";
    static constexpr std::string_view kPatchRestricted =
        "epsilon0 is restricted to the examined finite map; it does not certify an infinite graph";
};

/// Residual sum_{e in f} (pi - theta(e)) - 2 pi per face.
RivinReport check_c1(const PlanarMap& map, const AngleAssignment& theta, double tol = 1e-9);

/// Minimum of sum (pi - theta(e)) over simple cycles that bound no face.
/// The outer boundary of a disk-patch counts as non-facial.
NonfacialCycle min_nonfacial_cycle_weight(const PlanarMap& map, const AngleAssignment& theta,
                                          const CycleSearchOptions& opts = {});

/// C1 plus the cycle search for C2'.
RivinReport check_rivin(const PlanarMap& map, const AngleAssignment& theta, double tol = 1e-9,
                        const CycleSearchOptions& opts = {});

/// True if removing the cycle's edges disconnects the faces (plus the outer
/// region on a disk-patch).
bool cycle_separates(const PlanarMap& map, std::span<const VertexId> cycle);

/// True if the vertex cycle is the boundary of some face (either direction).
bool is_facial_cycle(const PlanarMap& map, std::span<const VertexId> cycle);

// Vertex statistics.

/// T(v): sum of theta over edges at v.
double character_T(const PlanarMap& map, const AngleAssignment& theta, VertexId v);
/// theta(v): sum over incident faces of (deg f - 2) pi / deg f. Interior vertices only.
double comb_angle_theta(const PlanarMap& map, VertexId v);
/// k(v) = 2 pi - theta(v).
double curvature_k(const PlanarMap& map, VertexId v);
/// L(v) = (T(v) - 2 pi) / deg(v).
double character_L(const PlanarMap& map, const AngleAssignment& theta, VertexId v);

struct MassTransportReport {
    std::vector<double> outgoing;  // sum_v m(u, v)
    std::vector<double> incoming;  // sum_u m(u, v)
    std::vector<double> T;
    std::vector<double> theta;
    double max_outgoing_dev = 0.0;  // max |outgoing - T|
    double max_incoming_dev = 0.0;  // max |incoming - theta|
    double sum_T = 0.0;
    double sum_theta = 0.0;
    std::size_t nonzero_pairs = 0;

    [[nodiscard]] double mean_T() const { return sum_T / static_cast<double>(T.size()); }
    [[nodiscard]] double mean_theta() const { return sum_theta / static_cast<double>(theta.size()); }
};

/// Builds the face-incidence transport m(u, v) on a torus and compares its
/// marginals with T and theta. Throws NotTorus, C1Violated.
MassTransportReport mass_transport_check(const PlanarMap& map, const AngleAssignment& theta, double c1_tol = 1e-9);

/// Adds a random vector from the null space of the face-sum constraints,
/// scaled to sup-norm `magnitude`. Throws RangeViolated if an angle leaves (0, pi).
AngleAssignment perturb_theta_on_c1(const PlanarMap& map, const AngleAssignment& theta, double magnitude,
                                    std::uint64_t seed);

}  // namespace icp
