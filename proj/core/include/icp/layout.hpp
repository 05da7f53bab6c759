#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icp/angles.hpp"
#include "icp/packing.hpp"
#include "icp/planar_map.hpp"

namespace icp {

using Point = std::complex<double>;

enum class Frame { Plane, UnitDisk };

struct Layout {
    std::vector<Point> center;
    std::vector<double> radius;
    std::vector<Point> dual_point;  // per face
    Frame frame = Frame::Plane;
    std::vector<Point> hyp_center;  // unit-disk frame only

    [[nodiscard]] std::size_t vertex_count() const noexcept { return center.size(); }
};

/// Places every circle of a flat metric: root at the origin, its first
/// neighbour on the positive real axis, further vertices by BFS along edges
/// using edge lengths and accumulated half-wedges. Dual points are the
/// intersections of adjacent circles on the face's side of each edge,
/// averaged over the face. Throws InconsistentHolonomy when a vertex is
/// reached twice at positions more than holonomy_tol * r apart.
Layout layout_embed(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r,
                    double holonomy_tol = 1e-6);

struct ConsistencyOptions {
    /// Edges whose relative length error exceeds this are flagged.
    double flag_tol = 1e-8;
    /// Check every pair of kites instead of grid-neighbouring pairs.
    /// Only honoured for maps with at most 1000 edges.
    bool full_overlap_check = false;
};

struct ConsistencyReport {
    double max_edge_dev_rel = 0.0;
    EdgeId worst_edge = kNone;
    std::vector<EdgeId> flagged_edges;
    double max_dual_spread_rel = 0.0;  // relative to the largest radius on the face
    FaceId worst_face = kNone;
    double max_angle_sum_err = 0.0;    // interior vertices, |sum of placed corner angles - 2 pi|
    std::size_t overlap_pairs_checked = 0;
    std::size_t overlapping_pairs = 0;
    bool full_overlap_check = false;
};

ConsistencyReport consistency_check(const Layout& layout, const PlanarMap& map, const AngleAssignment& theta,
                                    const ConsistencyOptions& opts = {});

/// Translates the root to the origin and scales so max(|z| + r) = 1 - 1e-9.
/// Also fills hyperbolic centres.
Layout normalize_to_disk(const Layout& layout, VertexId root);

/// Centre, in the Poincare disk, of the Euclidean circle (z, r) viewed as a
/// hyperbolic circle. Throws NotInsideDisk unless |z| + r < 1.
Point hyperbolic_center(Point z, double r);

/// Poincare distance 2 artanh(|z1 - z2| / |1 - conj(z1) z2|). Throws NotInsideDisk.
double d_hyp(Point z1, Point z2);

struct SvgOptions {
    double size_px = 800.0;
    bool draw_edges = false;
    bool draw_dual_points = false;
    int precision = 6;
};

std::string to_svg(const Layout& layout, const PlanarMap& map, const SvgOptions& opts = {});
/// Throws IoError.
void export_svg(const Layout& layout, const PlanarMap& map, const std::filesystem::path& path,
                const SvgOptions& opts = {});

/// CSV dumps: "vertex,x,y,r" and "face,x,y". Full round-trip precision.
void write_vertex_csv(std::ostream& os, const Layout& layout, const PlanarMap& map);
void write_dual_csv(std::ostream& os, const Layout& layout);

/// Reads a vertex CSV written by write_vertex_csv into a plane-frame layout
/// (dual points left empty). Throws ParseError, UnknownVertex.
Layout read_vertex_csv(std::istream& is, const PlanarMap& map);

}  // namespace icp
