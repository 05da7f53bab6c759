#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icp {

// Dense indices. External (file) vertex ids are kept separately as labels.
using VertexId = std::int32_t;
using EdgeId = std::int32_t;
using FaceId = std::int32_t;

inline constexpr std::int32_t kNone = -1;
inline constexpr int kUnboundedDepth = std::numeric_limits<int>::max();

enum class Topology { DiskPatch, Torus };

std::string_view to_string(Topology t) noexcept;
Topology topology_from_string(std::string_view s);

/// Finite cellular decomposition of a closed disk (outer region excluded
/// from the face set) or of the torus.
///
/// Faces are simple vertex cycles, oriented consistently so that each face
/// lies to the left of its directed boundary edges. Each vertex carries its
/// neighbours in counter-clockwise fan order: `corner_faces(v)[i]` is the face
/// between `neighbors(v)[i]` and `neighbors(v)[i+1]`. For boundary vertices the
/// fan is open, starts and ends at the two boundary neighbours, and has one
/// fewer corner than neighbours.
///
/// Maps are immutable once built.
class PlanarMap {
public:
    /// Validates and builds a map from face cycles given in external labels.
    /// Labels are compacted to dense indices in ascending order. Face
    /// orientation is made consistent by flipping cycles where required.
    static PlanarMap from_faces(const std::vector<std::vector<std::int64_t>>& face_cycles,
                                std::int64_t root_label, Topology topology);

    [[nodiscard]] int vertex_count() const noexcept { return static_cast<int>(labels_.size()); }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] int face_count() const noexcept { return static_cast<int>(faces_.size()); }

    [[nodiscard]] Topology topology() const noexcept { return topology_; }
    [[nodiscard]] VertexId root() const noexcept { return root_; }

    [[nodiscard]] std::span<const VertexId> face(FaceId f) const { return faces_.at(f); }
    [[nodiscard]] std::span<const EdgeId> face_edges(FaceId f) const { return face_edges_.at(f); }
    [[nodiscard]] int face_degree(FaceId f) const { return static_cast<int>(faces_.at(f).size()); }

    /// Endpoints with the smaller index first.
    [[nodiscard]] const std::array<VertexId, 2>& edge(EdgeId e) const { return edges_.at(e); }
    /// Faces on the left and right of the directed edge edge(e)[0] -> edge(e)[1];
    /// kNone where the outer region of a disk-patch lies.
    [[nodiscard]] const std::array<FaceId, 2>& edge_faces(EdgeId e) const { return edge_faces_.at(e); }
    [[nodiscard]] bool is_boundary_edge(EdgeId e) const;

    [[nodiscard]] std::optional<EdgeId> find_edge(VertexId u, VertexId v) const;
    /// Throws UnknownVertex when u and v are not adjacent.
    [[nodiscard]] EdgeId edge_between(VertexId u, VertexId v) const;

    [[nodiscard]] std::span<const VertexId> neighbors(VertexId v) const { return nbrs_.at(check(v)); }
    [[nodiscard]] std::span<const EdgeId> incident_edges(VertexId v) const { return inc_edges_.at(check(v)); }
    [[nodiscard]] std::span<const FaceId> corner_faces(VertexId v) const { return corners_.at(check(v)); }
    [[nodiscard]] int degree(VertexId v) const { return static_cast<int>(nbrs_.at(check(v)).size()); }

    [[nodiscard]] bool is_boundary(VertexId v) const { return on_boundary_.at(check(v)) != 0; }
    /// Outer boundary cycle of a disk-patch, interior on the left; empty on the torus.
    [[nodiscard]] std::span<const VertexId> boundary() const noexcept { return boundary_; }
    [[nodiscard]] int boundary_edge_count() const noexcept { return static_cast<int>(boundary_.size()); }

    [[nodiscard]] std::int64_t label(VertexId v) const { return labels_.at(check(v)); }
    [[nodiscard]] const std::vector<std::int64_t>& labels() const noexcept { return labels_; }
    /// Throws UnknownVertex for labels not in the map.
    [[nodiscard]] VertexId index_of(std::int64_t label) const;

    /// Graph distance to the nearest boundary vertex (0 on the boundary).
    /// kUnboundedDepth everywhere on the torus.
    [[nodiscard]] const std::vector<int>& interior_depth() const noexcept { return depth_; }
    /// BFS graph distances from `source`.
    [[nodiscard]] std::vector<int> distances_from(VertexId source) const;
    /// Vertices sorted by (distance from root, index).
    [[nodiscard]] std::vector<VertexId> bfs_order() const;

    /// Face cycles in external labels, in stored order and orientation.
    [[nodiscard]] std::vector<std::vector<std::int64_t>> labelled_faces() const;

    /// Throws UnknownVertex if v is out of range.
    VertexId check(VertexId v) const;

private:
    PlanarMap() = default;

    Topology topology_ = Topology::DiskPatch;
    VertexId root_ = 0;
    std::vector<std::int64_t> labels_;
    std::vector<std::vector<VertexId>> faces_;
    std::vector<std::vector<EdgeId>> face_edges_;
    std::vector<std::array<VertexId, 2>> edges_;
    std::vector<std::array<FaceId, 2>> edge_faces_;
    std::vector<std::vector<VertexId>> nbrs_;
    std::vector<std::vector<EdgeId>> inc_edges_;
    std::vector<std::vector<FaceId>> corners_;
    std::vector<char> on_boundary_;
    std::vector<VertexId> boundary_;
    std::vector<int> depth_;
};

/// Dual 1-skeleton: one vertex per face, one edge per primal edge that has two
/// incident faces.
struct DualSkeleton {
    int vertex_count = 0;
    std::vector<std::array<FaceId, 2>> edges;
    /// primal_edge[i] is the primal edge e crossed by dual edge i (e <-> e*).
    std::vector<EdgeId> primal_edge;
    /// Face of the primal map playing the role of the dual root.
    FaceId root = kNone;
    /// Dual face cycles, one per interior primal vertex, in primal vertex order.
    std::vector<std::vector<FaceId>> faces;
    std::vector<VertexId> face_vertex;

    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges.size()); }
};

DualSkeleton dual_skeleton(const PlanarMap& map);

/// The dual as a map in its own right. Only defined for torus maps.
PlanarMap dual_map(const PlanarMap& map);

/// Sum of neighbour degrees.
int flower_degree(const PlanarMap& map, VertexId u);

/// Canonical encoding of the rotation system, minimised over all starting
/// darts and both orientations; equal codes iff the maps are isomorphic
/// (ignoring labels and root). Quadratic in the edge count.
std::vector<int> canonical_code(const PlanarMap& map);

/// BFS-grown patch of the regular {p,q} tessellation: all faces incident to
/// vertices within graph distance generations-1 of the root.
PlanarMap generate_regular_patch(int p, int q, int generations);

/// Vertex-transitive n x n quotient of the flat {3,6}, {4,4} or {6,3} tiling.
PlanarMap generate_torus_quotient(int p, int q, int n);

/// Replaces the diagonal e of the two triangles sharing it by the other
/// diagonal. Throws UnsupportedParameters unless both faces are triangles,
/// NonSimpleGraph if the new diagonal is already an edge.
PlanarMap flip_edge(const PlanarMap& map, EdgeId e);

}  // namespace icp
