#include "icp/planar_map.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

#include "icp/errors.hpp"

namespace icp {

namespace {

std::uint64_t pair_key(VertexId a, VertexId b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

void reverse_keep_first(std::vector<VertexId>& cycle)
{
    std::reverse(cycle.begin() + 1, cycle.end());
}

}  // namespace

std::string_view to_string(Topology t) noexcept
{
    return t == Topology::Torus ? "torus" : "disk-patch";
}

Topology topology_from_string(std::string_view s)
{
    if (s == "torus") return Topology::Torus;
    if (s == "disk-patch" || s == "disk") return Topology::DiskPatch;
    throw Error(ErrorCode::ParseError, "unknown topology '" + std::string(s) + "'");
}

PlanarMap PlanarMap::from_faces(const std::vector<std::vector<std::int64_t>>& face_cycles,
                                std::int64_t root_label, Topology topology)
{
    PlanarMap m;
    m.topology_ = topology;

    if (face_cycles.empty()) throw Error(ErrorCode::EulerMismatch, "map has no faces");

    for (const auto& cyc : face_cycles)
        for (auto l : cyc) {
            if (l < 0) throw Error(ErrorCode::ParseError, "vertex ids must be non-negative");
            m.labels_.push_back(l);
        }
    std::sort(m.labels_.begin(), m.labels_.end());
    m.labels_.erase(std::unique(m.labels_.begin(), m.labels_.end()), m.labels_.end());
    if (m.labels_.size() > static_cast<std::size_t>(std::numeric_limits<VertexId>::max()))
        throw Error(ErrorCode::UnsupportedParameters, "too many vertices");

    auto dense = [&](std::int64_t l) {
        auto it = std::lower_bound(m.labels_.begin(), m.labels_.end(), l);
        return static_cast<VertexId>(it - m.labels_.begin());
    };

    m.faces_.reserve(face_cycles.size());
    for (const auto& cyc : face_cycles) {
        if (cyc.size() < 3)
            throw Error(ErrorCode::NonSimpleGraph,
                        "face with " + std::to_string(cyc.size()) + " vertices implies a loop or multi-edge");
        std::vector<VertexId> f;
        f.reserve(cyc.size());
        for (auto l : cyc) f.push_back(dense(l));
        auto sorted = f;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::InconsistentIncidence, "face boundary repeats a vertex");
        m.faces_.push_back(std::move(f));
    }

    // Edges in order of first appearance; record (face, forward?) incidences.
    struct Incidence {
        FaceId face;
        bool forward;  // face traverses min -> max
    };
    std::unordered_map<std::uint64_t, EdgeId> edge_index;
    std::vector<std::vector<Incidence>> incid;
    for (FaceId f = 0; f < m.face_count(); ++f) {
        const auto& cyc = m.faces_[f];
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            VertexId a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            auto [it, inserted] = edge_index.try_emplace(pair_key(a, b), static_cast<EdgeId>(m.edges_.size()));
            if (inserted) {
                m.edges_.push_back({std::min(a, b), std::max(a, b)});
                incid.emplace_back();
            }
            auto& inc = incid[it->second];
            if (inc.size() == 2)
                throw Error(ErrorCode::InconsistentIncidence,
                            "vertex pair (" + std::to_string(m.labels_[a]) + "," + std::to_string(m.labels_[b]) +
                                ") lies on more than two faces");
            inc.push_back({f, a < b});
        }
    }

    // Orient faces consistently, one connected component at a time.
    {
        std::vector<std::vector<std::pair<FaceId, EdgeId>>> face_adj(m.faces_.size());
        for (EdgeId e = 0; e < static_cast<EdgeId>(incid.size()); ++e)
            if (incid[e].size() == 2) {
                face_adj[incid[e][0].face].push_back({incid[e][1].face, e});
                face_adj[incid[e][1].face].push_back({incid[e][0].face, e});
            }
        std::vector<int> flip(m.faces_.size(), -1);
        for (FaceId s = 0; s < m.face_count(); ++s) {
            if (flip[s] != -1) continue;
            flip[s] = 0;
            std::deque<FaceId> queue{s};
            while (!queue.empty()) {
                FaceId f = queue.front();
                queue.pop_front();
                for (auto [g, e] : face_adj[f]) {
                    const auto& inc = incid[e];
                    bool fdir = (inc[0].face == f ? inc[0].forward : inc[1].forward) != (flip[f] == 1);
                    bool graw = inc[0].face == g ? inc[0].forward : inc[1].forward;
                    int need = (graw == fdir) ? 1 : 0;  // opposite directions required
                    if (flip[g] == -1) {
                        flip[g] = need;
                        queue.push_back(g);
                    } else if (flip[g] != need) {
                        throw Error(ErrorCode::InconsistentIncidence, "face orientations cannot be made consistent");
                    }
                }
            }
        }
        for (FaceId f = 0; f < m.face_count(); ++f)
            if (flip[f] == 1) reverse_keep_first(m.faces_[f]);
    }

    m.edge_faces_.assign(m.edges_.size(), {kNone, kNone});
    m.face_edges_.resize(m.faces_.size());
    for (FaceId f = 0; f < m.face_count(); ++f) {
        const auto& cyc = m.faces_[f];
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            VertexId a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            EdgeId e = edge_index.at(pair_key(a, b));
            m.face_edges_[f].push_back(e);
            int side = a < b ? 0 : 1;
            if (m.edge_faces_[e][side] != kNone)
                throw Error(ErrorCode::InconsistentIncidence, "two faces traverse an edge in the same direction");
            m.edge_faces_[e][side] = f;
        }
    }

    // Rotation system: at v, face f spans the corner from next(v) to prev(v).
    const int nv = m.vertex_count();
    struct Corner {
        VertexId from, to;
        FaceId face;
    };
    std::vector<std::vector<Corner>> corners(nv);
    for (FaceId f = 0; f < m.face_count(); ++f) {
        const auto& cyc = m.faces_[f];
        const std::size_t k = cyc.size();
        for (std::size_t i = 0; i < k; ++i)
            corners[cyc[i]].push_back({cyc[(i + 1) % k], cyc[(i + k - 1) % k], f});
    }
    std::vector<std::vector<VertexId>> adjacency(nv);
    for (const auto& e : m.edges_) {
        adjacency[e[0]].push_back(e[1]);
        adjacency[e[1]].push_back(e[0]);
    }

    m.nbrs_.resize(nv);
    m.inc_edges_.resize(nv);
    m.corners_.resize(nv);
    m.on_boundary_.assign(nv, 0);
    for (VertexId v = 0; v < nv; ++v) {
        auto& cs = corners[v];
        std::sort(cs.begin(), cs.end(), [](const Corner& a, const Corner& b) { return a.from < b.from; });
        for (std::size_t i = 1; i < cs.size(); ++i)
            if (cs[i].from == cs[i - 1].from)
                throw Error(ErrorCode::InconsistentIncidence, "vertex link is not a path or cycle");
        auto succ = [&](VertexId from) -> const Corner* {
            auto it = std::lower_bound(cs.begin(), cs.end(), from,
                                       [](const Corner& c, VertexId x) { return c.from < x; });
            return (it != cs.end() && it->from == from) ? &*it : nullptr;
        };
        std::vector<VertexId> has_pred;
        for (const auto& c : cs) has_pred.push_back(c.to);
        std::sort(has_pred.begin(), has_pred.end());

        auto& adj = adjacency[v];
        std::sort(adj.begin(), adj.end());
        VertexId start = kNone;
        int open_starts = 0;
        for (VertexId w : adj)
            if (!std::binary_search(has_pred.begin(), has_pred.end(), w)) {
                ++open_starts;
                if (start == kNone) start = w;
            }
        const bool open = open_starts > 0;
        if (open_starts > 1)
            throw Error(ErrorCode::InconsistentIncidence,
                        "vertex " + std::to_string(m.labels_[v]) + " is pinched (link not connected)");
        if (!open) start = adj.front();

        auto& nb = m.nbrs_[v];
        auto& fc = m.corners_[v];
        VertexId cur = start;
        nb.push_back(cur);
        while (true) {
            const Corner* c = succ(cur);
            if (c == nullptr) break;
            if (c->to == start) {
                fc.push_back(c->face);
                break;
            }
            fc.push_back(c->face);
            cur = c->to;
            nb.push_back(cur);
            if (nb.size() > adj.size()) break;
        }
        if (nb.size() != adj.size() || fc.size() != cs.size())
            throw Error(ErrorCode::InconsistentIncidence,
                        "vertex " + std::to_string(m.labels_[v]) + " link is not a single path or cycle");
        m.on_boundary_[v] = open ? 1 : 0;
        for (VertexId w : nb) m.inc_edges_[v].push_back(edge_index.at(pair_key(v, w)));
    }

    // Connectivity.
    {
        std::vector<char> seen(nv, 0);
        std::deque<VertexId> q{0};
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            for (VertexId w : adjacency[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    q.push_back(w);
                }
        }
        if (count != nv) throw Error(ErrorCode::EulerMismatch, "map is not connected");
    }

    const int euler = m.vertex_count() - m.edge_count() + m.face_count();
    if (topology == Topology::Torus) {
        for (EdgeId e = 0; e < m.edge_count(); ++e)
            if (m.is_boundary_edge(e))
                throw Error(ErrorCode::InconsistentIncidence, "torus map has an edge on a single face");
        if (euler != 0)
            throw Error(ErrorCode::EulerMismatch, "torus requires V-E+F=0, got " + std::to_string(euler));
    } else {
        std::vector<VertexId> next(nv, kNone);
        int boundary_edges = 0;
        for (EdgeId e = 0; e < m.edge_count(); ++e) {
            if (!m.is_boundary_edge(e)) continue;
            ++boundary_edges;
            auto [a, b] = m.edges_[e];
            // The boundary runs in the direction its single face traverses it.
            if (m.edge_faces_[e][0] == kNone) std::swap(a, b);
            next[a] = b;
        }
        if (boundary_edges == 0) throw Error(ErrorCode::EulerMismatch, "disk-patch has no boundary");
        VertexId s = 0;
        while (next[s] == kNone) ++s;
        VertexId cur = s;
        do {
            m.boundary_.push_back(cur);
            cur = next[cur];
        } while (cur != s && static_cast<int>(m.boundary_.size()) <= boundary_edges);
        if (static_cast<int>(m.boundary_.size()) != boundary_edges)
            throw Error(ErrorCode::EulerMismatch, "disk-patch boundary is not a single cycle");
        if (euler != 1)
            throw Error(ErrorCode::EulerMismatch, "disk-patch requires V-E+F=1, got " + std::to_string(euler));
    }

    auto it = std::lower_bound(m.labels_.begin(), m.labels_.end(), root_label);
    if (it == m.labels_.end() || *it != root_label)
        throw Error(ErrorCode::UnknownVertex, "root " + std::to_string(root_label) + " is not a vertex");
    m.root_ = static_cast<VertexId>(it - m.labels_.begin());

    m.depth_.assign(nv, kUnboundedDepth);
    if (topology == Topology::DiskPatch) {
        std::deque<VertexId> q;
        for (VertexId v : m.boundary_) {
            m.depth_[v] = 0;
            q.push_back(v);
        }
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            for (VertexId w : m.nbrs_[v])
                if (m.depth_[w] == kUnboundedDepth) {
                    m.depth_[w] = m.depth_[v] + 1;
                    q.push_back(w);
                }
        }
    }
    return m;
}

bool PlanarMap::is_boundary_edge(EdgeId e) const
{
    const auto& f = edge_faces_.at(e);
    return f[0] == kNone || f[1] == kNone;
}

std::optional<EdgeId> PlanarMap::find_edge(VertexId u, VertexId v) const
{
    const auto& nb = nbrs_.at(check(u));
    for (std::size_t i = 0; i < nb.size(); ++i)
        if (nb[i] == v) return inc_edges_[u][i];
    return std::nullopt;
}

EdgeId PlanarMap::edge_between(VertexId u, VertexId v) const
{
    auto e = find_edge(u, v);
    if (!e) throw Error(ErrorCode::UnknownVertex, "vertices are not adjacent");
    return *e;
}

VertexId PlanarMap::index_of(std::int64_t label) const
{
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label)
        throw Error(ErrorCode::UnknownVertex, "no vertex with id " + std::to_string(label));
    return static_cast<VertexId>(it - labels_.begin());
}

VertexId PlanarMap::check(VertexId v) const
{
    if (v < 0 || v >= vertex_count())
        throw Error(ErrorCode::UnknownVertex, "vertex index " + std::to_string(v) + " out of range");
    return v;
}

std::vector<int> PlanarMap::distances_from(VertexId source) const
{
    std::vector<int> dist(vertex_count(), kUnboundedDepth);
    dist[check(source)] = 0;
    std::deque<VertexId> q{source};
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop_front();
        for (VertexId w : nbrs_[v])
            if (dist[w] == kUnboundedDepth) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

std::vector<VertexId> PlanarMap::bfs_order() const
{
    auto dist = distances_from(root_);
    std::vector<VertexId> order(vertex_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return dist[a] < dist[b]; });
    return order;
}

std::vector<std::vector<std::int64_t>> PlanarMap::labelled_faces() const
{
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(faces_.size());
    for (const auto& f : faces_) {
        std::vector<std::int64_t> cyc;
        cyc.reserve(f.size());
        for (VertexId v : f) cyc.push_back(labels_[v]);
        out.push_back(std::move(cyc));
    }
    return out;
}

DualSkeleton dual_skeleton(const PlanarMap& map)
{
    DualSkeleton d;
    d.vertex_count = map.face_count();
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        if (map.is_boundary_edge(e)) continue;
        d.edges.push_back(map.edge_faces(e));
        d.primal_edge.push_back(e);
    }
    auto root_corners = map.corner_faces(map.root());
    d.root = root_corners.empty() ? kNone : root_corners.front();
    for (VertexId v = 0; v < map.vertex_count(); ++v) {
        if (map.is_boundary(v)) continue;
        auto cf = map.corner_faces(v);
        d.faces.emplace_back(cf.begin(), cf.end());
        d.face_vertex.push_back(v);
    }
    return d;
}

PlanarMap dual_map(const PlanarMap& map)
{
    if (map.topology() != Topology::Torus) throw Error(ErrorCode::NotTorus, "dual_map requires a torus map");
    auto d = dual_skeleton(map);
    std::vector<std::vector<std::int64_t>> cycles;
    cycles.reserve(d.faces.size());
    for (const auto& f : d.faces) cycles.emplace_back(f.begin(), f.end());
    return PlanarMap::from_faces(cycles, d.root, Topology::Torus);
}

int flower_degree(const PlanarMap& map, VertexId u)
{
    int s = 0;
    for (VertexId w : map.neighbors(u)) s += map.degree(w);
    return s;
}

std::vector<int> canonical_code(const PlanarMap& map)
{
    const int nv = map.vertex_count();
    std::vector<int> best;
    std::vector<int> label(nv);
    std::vector<int> entry(nv);
    std::vector<int> code;
    std::vector<VertexId> order;

    for (int orient : {1, -1}) {
        for (VertexId s = 0; s < nv; ++s) {
            for (int si = 0; si < map.degree(s); ++si) {
                std::fill(label.begin(), label.end(), -1);
                code.clear();
                order.clear();
                label[s] = 0;
                entry[s] = si;
                order.push_back(s);
                bool worse = false;
                for (std::size_t k = 0; k < order.size() && !worse; ++k) {
                    VertexId v = order[k];
                    auto nb = map.neighbors(v);
                    const int deg = static_cast<int>(nb.size());
                    const bool open = map.is_boundary(v);
                    code.push_back(deg);
                    code.push_back(open ? 1 : 0);
                    for (int j = 0; j < deg; ++j) {
                        int idx;
                        if (open)
                            idx = orient == 1 ? j : deg - 1 - j;
                        else
                            idx = ((entry[v] + orient * j) % deg + deg) % deg;
                        VertexId w = nb[idx];
                        if (label[w] < 0) {
                            label[w] = static_cast<int>(order.size());
                            // entry dart at w points back to v
                            auto nw = map.neighbors(w);
                            entry[w] = static_cast<int>(std::find(nw.begin(), nw.end(), v) - nw.begin());
                            order.push_back(w);
                        }
                        code.push_back(label[w]);
                    }
                    // Early exit when this prefix already exceeds the best code.
                    if (!best.empty()) {
                        auto n = std::min(code.size(), best.size());
                        auto cmp = std::lexicographical_compare_three_way(code.begin(), code.begin() + n,
                                                                          best.begin(), best.begin() + n);
                        if (cmp > 0) worse = true;
                    }
                }
                if (!worse && (best.empty() || code < best)) best = code;
            }
        }
    }
    return best;
}

}  // namespace icp
