// Minimum-weight non-facial cycle search.
//
// For every edge e = uv the lightest non-facial cycle through e is
// (u-v path avoiding e) + e. At most two cycles through e are facial, so
// enumerating u-v simple paths in order of weight (Yen) finds it after a few
// paths; the global best so far bounds every Dijkstra run.

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <set>

#include "icp/angles.hpp"
#include "icp/errors.hpp"

namespace icp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxPathsPerEdge = 200000;

struct Path {
    double weight = 0.0;
    std::vector<VertexId> vertices;

    bool operator<(const Path& o) const
    {
        if (weight != o.weight) return weight < o.weight;
        return vertices < o.vertices;
    }
};

class PathSearch {
public:
    PathSearch(const PlanarMap& map, const std::vector<double>& w)
        : map_(map), w_(w), dist_(map.vertex_count(), kInf), prev_(map.vertex_count(), kNone),
          banned_v_(map.vertex_count(), 0), banned_e_(map.edge_count(), 0)
    {
    }

    // Shortest path src -> dst avoiding banned vertices/edges, or nullopt if
    // none lighter than bound exists.
    std::optional<Path> shortest(VertexId src, VertexId dst, double bound)
    {
        touched_.clear();
        using Item = std::pair<double, VertexId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        set_dist(src, 0.0, kNone);
        pq.push({0.0, src});
        bool found = false;
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist_[v]) continue;
            if (d >= bound) break;
            if (v == dst) {
                found = true;
                break;
            }
            auto nb = map_.neighbors(v);
            auto ie = map_.incident_edges(v);
            for (std::size_t i = 0; i < nb.size(); ++i) {
                VertexId x = nb[i];
                EdgeId e = ie[i];
                if (banned_v_[x] || banned_e_[e]) continue;
                double nd = d + w_[e];
                if (nd < dist_[x]) {
                    set_dist(x, nd, v);
                    pq.push({nd, x});
                }
            }
        }
        std::optional<Path> out;
        if (found) {
            Path p;
            p.weight = dist_[dst];
            for (VertexId v = dst; v != kNone; v = prev_[v]) p.vertices.push_back(v);
            std::reverse(p.vertices.begin(), p.vertices.end());
            out = std::move(p);
        }
        for (VertexId v : touched_) {
            dist_[v] = kInf;
            prev_[v] = kNone;
        }
        return out;
    }

    void ban_vertex(VertexId v, bool on) { banned_v_[v] = on ? 1 : 0; }
    void ban_edge(EdgeId e, bool on) { banned_e_[e] = on ? 1 : 0; }

private:
    void set_dist(VertexId v, double d, VertexId p)
    {
        if (dist_[v] == kInf) touched_.push_back(v);
        dist_[v] = d;
        prev_[v] = p;
    }

    const PlanarMap& map_;
    const std::vector<double>& w_;
    std::vector<double> dist_;
    std::vector<VertexId> prev_;
    std::vector<char> banned_v_;
    std::vector<char> banned_e_;
    std::vector<VertexId> touched_;
};

double path_weight(const PlanarMap& map, const std::vector<double>& w, std::span<const VertexId> vs)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) s += w[map.edge_between(vs[i], vs[i + 1])];
    return s;
}

}  // namespace

bool is_facial_cycle(const PlanarMap& map, std::span<const VertexId> cycle)
{
    if (cycle.size() < 3) return false;
    EdgeId e0 = map.edge_between(cycle[0], cycle[1]);
    for (FaceId f : map.edge_faces(e0)) {
        if (f == kNone || map.face_degree(f) != static_cast<int>(cycle.size())) continue;
        auto fe = map.face_edges(f);
        bool all = true;
        for (std::size_t i = 0; i < cycle.size() && all; ++i) {
            EdgeId e = map.edge_between(cycle[i], cycle[(i + 1) % cycle.size()]);
            all = std::find(fe.begin(), fe.end(), e) != fe.end();
        }
        if (all) return true;
    }
    return false;
}

bool cycle_separates(const PlanarMap& map, std::span<const VertexId> cycle)
{
    // Regions: faces plus one node for the outer region of a disk-patch.
    const int outer = map.face_count();
    const int nregions = map.face_count() + (map.topology() == Topology::DiskPatch ? 1 : 0);
    std::vector<char> cut(map.edge_count(), 0);
    for (std::size_t i = 0; i < cycle.size(); ++i) cut[map.edge_between(cycle[i], cycle[(i + 1) % cycle.size()])] = 1;

    std::vector<std::vector<int>> adj(nregions);
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        if (cut[e]) continue;
        auto [l, r] = map.edge_faces(e);
        int a = l == kNone ? outer : l;
        int b = r == kNone ? outer : r;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(nregions, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = 1;
                ++count;
                q.push_back(y);
            }
    }
    return count < nregions;
}

NonfacialCycle min_nonfacial_cycle_weight(const PlanarMap& map, const AngleAssignment& theta,
                                          const CycleSearchOptions& opts)
{
    require_angles(map, theta);
    std::vector<double> w(map.edge_count());
    for (EdgeId e = 0; e < map.edge_count(); ++e) w[e] = std::numbers::pi - theta[e];

    const bool need_separation = opts.contractible_only && map.topology() == Topology::Torus;
    auto acceptable = [&](const std::vector<VertexId>& cyc) {
        if (opts.max_len > 0 && static_cast<int>(cyc.size()) > opts.max_len) return false;
        if (is_facial_cycle(map, cyc)) return false;
        if (need_separation && !cycle_separates(map, cyc)) return false;
        return true;
    };

    NonfacialCycle best;
    PathSearch search(map, w);

    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        const auto [u, v] = map.edge(e);
        const double we = w[e];
        if (we >= best.weight) continue;
        search.ban_edge(e, true);

        std::vector<Path> accepted;
        std::set<Path> candidates;
        auto first = search.shortest(u, v, best.weight - we);
        if (first) candidates.insert(std::move(*first));

        std::size_t produced = 0;
        while (!candidates.empty()) {
            Path p = *candidates.begin();
            candidates.erase(candidates.begin());
            if (p.weight + we >= best.weight) break;
            if (acceptable(p.vertices)) {
                best.weight = p.weight + we;
                best.cycle = p.vertices;
                break;
            }
            if (++produced > kMaxPathsPerEdge)
                throw Error(ErrorCode::UnsupportedParameters, "cycle search exceeded its path budget; lower max_len");
            accepted.push_back(p);

            // Yen spur step from every prefix of the path just taken.
            const auto& pv = p.vertices;
            for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
                const VertexId spur = pv[i];
                std::span<const VertexId> root(pv.data(), i + 1);
                std::vector<EdgeId> banned_edges;
                for (const auto& q : accepted) {
                    if (q.vertices.size() > i + 1 && std::equal(root.begin(), root.end(), q.vertices.begin())) {
                        EdgeId be = map.edge_between(q.vertices[i], q.vertices[i + 1]);
                        search.ban_edge(be, true);
                        banned_edges.push_back(be);
                    }
                }
                for (std::size_t k = 0; k < i; ++k) search.ban_vertex(pv[k], true);

                const double root_w = path_weight(map, w, root);
                auto spur_path = search.shortest(spur, v, best.weight - we - root_w);

                for (std::size_t k = 0; k < i; ++k) search.ban_vertex(pv[k], false);
                for (EdgeId be : banned_edges)
                    if (be != e) search.ban_edge(be, false);

                if (spur_path) {
                    Path cand;
                    cand.vertices.assign(root.begin(), root.end() - 1);
                    cand.vertices.insert(cand.vertices.end(), spur_path->vertices.begin(), spur_path->vertices.end());
                    cand.weight = path_weight(map, w, cand.vertices);
                    candidates.insert(std::move(cand));
                }
            }
        }
        search.ban_edge(e, false);
    }
    return best;
}

}  // namespace icp
