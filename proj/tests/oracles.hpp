// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library code they are compared against.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "icp/planar_map.hpp"

namespace oracle {

using icp::EdgeId;
using icp::PlanarMap;
using icp::VertexId;

inline constexpr double kPi = std::numbers::pi;

// Edge sets of all faces, as sorted vertex-pair lists built from the cycles.
inline std::set<std::vector<std::pair<int, int>>> face_edge_sets(const PlanarMap& map)
{
    std::set<std::vector<std::pair<int, int>>> out;
    for (int f = 0; f < map.face_count(); ++f) {
        auto cyc = map.face(f);
        std::vector<std::pair<int, int>> es;
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            es.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(es.begin(), es.end());
        out.insert(es);
    }
    return out;
}

// True if deleting the cycle's edges splits faces (plus the outer region of
// a disk-patch) into more than one class. Union-find over edge adjacency.
inline bool separates(const PlanarMap& map, const std::vector<std::pair<int, int>>& cycle_edges)
{
    const int outer = map.face_count();
    const int n = outer + 1;
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    // which faces contain each vertex pair
    std::map<std::pair<int, int>, std::vector<int>> owners;
    for (int f = 0; f < map.face_count(); ++f) {
        auto cyc = map.face(f);
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            owners[{std::min(a, b), std::max(a, b)}].push_back(f);
        }
    }
    for (auto& [e, fs] : owners) {
        if (std::binary_search(cycle_edges.begin(), cycle_edges.end(), e)) continue;
        int a = fs[0];
        int b = fs.size() > 1 ? fs[1] : outer;
        parent[find(a)] = find(b);
    }
    const bool has_outer = map.topology() == icp::Topology::DiskPatch;
    std::set<int> roots;
    for (int f = 0; f < map.face_count(); ++f) roots.insert(find(f));
    if (has_outer) roots.insert(find(outer));
    return roots.size() > 1;
}

// Exhaustive minimum of sum(pi - theta) over simple cycles that are not face
// boundaries. Each cycle is enumerated once from its smallest vertex.
inline double min_nonfacial_cycle(const PlanarMap& map, const std::vector<double>& theta, bool contractible_only = false,
                                  int max_len = 0)
{
    const int n = map.vertex_count();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        auto [a, b] = map.edge(e);
        adj[a].push_back({b, kPi - theta[e]});
        adj[b].push_back({a, kPi - theta[e]});
    }
    const auto faces = face_edge_sets(map);
    const bool need_sep = contractible_only && map.topology() == icp::Topology::Torus;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> path;
    std::vector<char> on(n, 0);

    std::function<void(int, int, double)> dfs = [&](int start, int v, double w) {
        for (auto [x, wx] : adj[v]) {
            if (x == start && path.size() >= 3) {
                // each cycle appears in both directions; keep one
                if (path[1] > path.back()) continue;
                if (max_len > 0 && static_cast<int>(path.size()) > max_len) continue;
                std::vector<std::pair<int, int>> es;
                for (std::size_t i = 0; i < path.size(); ++i) {
                    int a = path[i], b = path[(i + 1) % path.size()];
                    es.emplace_back(std::min(a, b), std::max(a, b));
                }
                std::sort(es.begin(), es.end());
                if (faces.count(es)) continue;
                if (need_sep && !separates(map, es)) continue;
                best = std::min(best, w + wx);
                continue;
            }
            if (x <= start || on[x]) continue;
            on[x] = 1;
            path.push_back(x);
            dfs(start, x, w + wx);
            path.pop_back();
            on[x] = 0;
        }
    };
    for (int s = 0; s < n; ++s) {
        path.assign(1, s);
        on.assign(n, 0);
        on[s] = 1;
        dfs(s, s, 0.0);
    }
    return best;
}

// Wedge angle at v from explicit circle geometry: place v at the origin with
// radius rv, w on the x-axis at distance sqrt(rv^2 + rw^2 + 2 rv rw cos t),
// intersect the circles and measure the angle between the two intersection
// points as seen from v.
inline double wedge_from_circles(double rv, double rw, double t)
{
    const double d = std::sqrt(rv * rv + rw * rw + 2 * rv * rw * std::cos(t));
    const double x = (d * d + rv * rv - rw * rw) / (2 * d);
    const double h = std::sqrt(std::max(0.0, rv * rv - x * x));
    std::complex<double> p1(x, h), p2(x, -h);
    double a = std::arg(p1) - std::arg(p2);
    if (a < 0) a += 2 * kPi;
    return a;
}

// Poincare distance from the origin (closed form) composed with the disk
// automorphism sending a to 0.
inline double d_hyp_via_automorphism(std::complex<double> a, std::complex<double> z)
{
    const std::complex<double> w = (z - a) / (1.0 - std::conj(a) * z);
    const double r = std::abs(w);
    return std::log((1 + r) / (1 - r));
}

// Point on the positive real axis equidistant (hyperbolically) from lo and hi,
// 0 <= lo < hi < 1, by bisection.
inline double hyperbolic_midpoint_bisect(double lo, double hi)
{
    auto d = [](double x, double y) { return std::abs(std::log((1 + y) / (1 - y)) - std::log((1 + x) / (1 - x))); };
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (d(lo, m) < d(m, hi)) a = m;
        else b = m;
    }
    return 0.5 * (a + b);
}

// Dense transport m(u, v) summed literally: for each face, each occurrence v_i
// of a boundary vertex, each boundary edge e (consecutive pair in the cycle),
// each endpoint u of e: theta_e / (2 deg f).
struct Transport {
    std::vector<double> outgoing, incoming;
};

inline Transport dense_transport(const PlanarMap& map, const std::vector<double>& theta)
{
    const int n = map.vertex_count();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int f = 0; f < map.face_count(); ++f) {
        auto cyc = map.face(f);
        const double deg = static_cast<double>(cyc.size());
        for (VertexId vi : cyc)
            for (std::size_t k = 0; k < cyc.size(); ++k) {
                VertexId a = cyc[k], b = cyc[(k + 1) % cyc.size()];
                double th = theta[map.edge_between(a, b)];
                m[a][vi] += th / (2 * deg);
                m[b][vi] += th / (2 * deg);
            }
    }
    Transport t{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            t.outgoing[u] += m[u][v];
            t.incoming[v] += m[u][v];
        }
    return t;
}

}  // namespace oracle
