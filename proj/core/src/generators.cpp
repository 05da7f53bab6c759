#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <unordered_map>

#include "icp/errors.hpp"
#include "icp/planar_map.hpp"

namespace icp {

namespace {

using Point = std::complex<double>;

// Vertex positions of a regular tessellation in a conformal model of its
// geometry: Poincare disk (curvature +1 below), Euclidean plane (0) or the
// stereographic sphere (-1). The isometry moving v to the origin is
// z -> (z - v) / (1 - curvature * conj(v) z).
class TilingModel {
public:
    TilingModel(int p, int q)
    {
        const int excess = (p - 2) * (q - 2) - 4;
        curvature_ = excess > 0 ? 1 : (excess == 0 ? 0 : -1);
        const double c = std::cos(std::numbers::pi / p) / std::sin(std::numbers::pi / q);
        if (curvature_ > 0)
            edge_radius_ = std::tanh(std::acosh(c));
        else if (curvature_ < 0)
            edge_radius_ = std::tan(std::acos(c));
        else
            edge_radius_ = 1.0;
    }

    [[nodiscard]] int curvature() const { return curvature_; }
    [[nodiscard]] double edge_radius() const { return edge_radius_; }

    [[nodiscard]] Point to_origin(Point v, Point z) const
    {
        return (z - v) / (1.0 - double(curvature_) * std::conj(v) * z);
    }
    [[nodiscard]] Point from_origin(Point v, Point w) const
    {
        return (w + v) / (1.0 + double(curvature_) * std::conj(v) * w);
    }

private:
    int curvature_ = 0;
    double edge_radius_ = 1.0;
};

class PointIndex {
public:
    explicit PointIndex(double tol) : tol_(tol), cell_(tol * 64) {}

    // Returns the id of a stored point within tol of z, or -1.
    int find(Point z) const
    {
        auto [cx, cy] = cell_of(z);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (auto [id, w] : it->second)
                    if (std::abs(w - z) <= tol_) return id;
            }
        return -1;
    }

    void insert(int id, Point z)
    {
        auto [cx, cy] = cell_of(z);
        cells_[key(cx, cy)].push_back({id, z});
    }

private:
    std::pair<long, long> cell_of(Point z) const
    {
        return {static_cast<long>(std::floor(z.real() / cell_)), static_cast<long>(std::floor(z.imag() / cell_))};
    }
    static std::uint64_t key(long x, long y)
    {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) ^
               static_cast<std::uint32_t>(y);
    }

    double tol_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, Point>>> cells_;
};

[[noreturn]] void unsupported(const std::string& why)
{
    throw Error(ErrorCode::UnsupportedParameters, why);
}

}  // namespace

PlanarMap generate_regular_patch(int p, int q, int generations)
{
    if (p < 3 || q < 3 || generations < 1)
        unsupported("regular patch needs p >= 3, q >= 3, generations >= 1");

    const TilingModel model(p, q);
    const int max_expand = generations - 1 + p / 2;

    std::vector<Point> pos{Point(0.0, 0.0)};
    std::vector<int> depth{0};
    std::vector<int> parent{-1};
    std::vector<std::vector<int>> nbrs(1);
    PointIndex index(1e-9);
    index.insert(0, pos[0]);

    for (std::size_t v = 0; v < pos.size(); ++v) {
        if (depth[v] > max_expand) break;  // ids are assigned in BFS order
        Point ref;
        if (v == 0) {
            ref = Point(model.edge_radius(), 0.0);
        } else {
            ref = model.to_origin(pos[v], pos[parent[v]]);
        }
        for (int j = 0; j < q; ++j) {
            Point w = model.from_origin(pos[v], ref * std::polar(1.0, 2.0 * std::numbers::pi * j / q));
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > 1e3)
                unsupported("the spherical {" + std::to_string(p) + "," + std::to_string(q) +
                            "} tessellation is exhausted at this generation count");
            int id = index.find(w);
            if (id < 0) {
                id = static_cast<int>(pos.size());
                pos.push_back(w);
                depth.push_back(depth[v] + 1);
                parent.push_back(static_cast<int>(v));
                nbrs.emplace_back();
                index.insert(id, w);
            }
            nbrs[v].push_back(id);
        }
    }

    std::vector<std::vector<std::int64_t>> faces;
    std::set<std::vector<int>> seen;
    for (std::size_t v = 0; v < pos.size() && depth[v] <= generations - 1; ++v) {
        for (int j = 0; j < q; ++j) {
            std::vector<int> cyc{static_cast<int>(v)};
            int a = static_cast<int>(v), b = nbrs[v][j];
            while (b != static_cast<int>(v)) {
                if (static_cast<int>(cyc.size()) >= p || nbrs[b].size() != static_cast<std::size_t>(q))
                    unsupported("face tracing failed; the tessellation does not close up as a patch");
                cyc.push_back(b);
                auto& nb = nbrs[b];
                int idx = static_cast<int>(std::find(nb.begin(), nb.end(), a) - nb.begin());
                if (idx == q) unsupported("inconsistent neighbourhood while tracing faces");
                a = b;
                b = nb[(idx + q - 1) % q];
            }
            if (static_cast<int>(cyc.size()) != p) unsupported("traced face has the wrong degree");
            auto key = cyc;
            std::rotate(key.begin(), std::min_element(key.begin(), key.end()), key.end());
            if (seen.insert(key).second) faces.emplace_back(cyc.begin(), cyc.end());
        }
    }

    // Compact ids to the vertices actually used, preserving BFS order.
    std::vector<std::int64_t> used;
    for (const auto& f : faces) used.insert(used.end(), f.begin(), f.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (auto& f : faces)
        for (auto& x : f) x = std::lower_bound(used.begin(), used.end(), x) - used.begin();

    try {
        return PlanarMap::from_faces(faces, 0, Topology::DiskPatch);
    } catch (const Error& e) {
        unsupported(std::string("generated patch is not a disk: ") + e.what());
    }
}

PlanarMap generate_torus_quotient(int p, int q, int n)
{
    if (n < 3) unsupported("torus quotient needs period n >= 3");
    auto v = [n](int i, int j) -> std::int64_t { return ((i % n + n) % n) + n * ((j % n + n) % n); };
    std::vector<std::vector<std::int64_t>> faces;
    if (p == 4 && q == 4) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) faces.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)});
    } else if (p == 3 && q == 6) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                faces.push_back({v(i, j), v(i + 1, j), v(i, j + 1)});
                faces.push_back({v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)});
            }
    } else if (p == 6 && q == 3) {
        // Honeycomb as the dual of the triangular lattice: one hexagon per
        // lattice point, its vertices the six triangles around it.
        auto up = [&](int i, int j) { return 2 * v(i, j); };
        auto down = [&](int i, int j) { return 2 * v(i, j) + 1; };
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                faces.push_back({up(i, j), down(i - 1, j), up(i - 1, j), down(i - 1, j - 1), up(i, j - 1),
                                 down(i, j - 1)});
    } else {
        unsupported("no flat torus quotient for {" + std::to_string(p) + "," + std::to_string(q) + "}");
    }
    return PlanarMap::from_faces(faces, 0, Topology::Torus);
}

PlanarMap flip_edge(const PlanarMap& map, EdgeId e)
{
    auto [left, right] = map.edge_faces(e);
    if (left == kNone || right == kNone || map.face_degree(left) != 3 || map.face_degree(right) != 3)
        unsupported("flip needs an edge between two triangles");
    auto [a, b] = map.edge(e);
    auto apex = [&](FaceId f) {
        for (VertexId x : map.face(f))
            if (x != a && x != b) return x;
        return kNone;
    };
    const VertexId c = apex(left), d = apex(right);
    if (map.find_edge(c, d)) throw Error(ErrorCode::NonSimpleGraph, "flipped diagonal already exists");
    // left of a->b is (a, b, c); right is (b, a, d); the quad reads a, d, b, c.
    auto faces = map.labelled_faces();
    const auto L = [&](VertexId x) { return map.label(x); };
    faces[left] = {L(a), L(d), L(c)};
    faces[right] = {L(d), L(b), L(c)};
    return PlanarMap::from_faces(faces, map.label(map.root()), map.topology());
}

}  // namespace icp
