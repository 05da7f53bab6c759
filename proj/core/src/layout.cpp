#include "icp/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "icp/errors.hpp"

namespace icp {

namespace {

constexpr double kPi = std::numbers::pi;

// Intersection of circles (a, ra) and (b, rb) to the left of a -> b.
Point left_intersection(Point a, double ra, Point b, double rb)
{
    const Point ab = b - a;
    const double d = std::abs(ab);
    const Point u = ab / d;
    const double x = (d * d + ra * ra - rb * rb) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, ra * ra - x * x));
    return a + Point(x, h) * u;
}

// Per-edge dual point candidates for face f.
template <class Fn>
void for_each_dual_candidate(const PlanarMap& map, const std::vector<Point>& z, const std::vector<double>& r, FaceId f,
                             Fn&& fn)
{
    auto cyc = map.face(f);
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        VertexId a = cyc[i], b = cyc[(i + 1) % cyc.size()];
        fn(left_intersection(z[a], r[a], z[b], r[b]));
    }
}

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

struct Polygon {
    std::vector<Point> pts;
    Point sample;  // strictly interior point
    Point lo, hi;  // bounding box
};

// Signed distance of c from the line through a, b (positive on the left).
double side(Point a, Point b, Point c)
{
    const double len = std::abs(b - a);
    return len > 0.0 ? cross(b - a, c - a) / len : 0.0;
}

bool strictly_inside(const Polygon& poly, Point p, double eps)
{
    const auto& v = poly.pts;
    int winding = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point a = v[i], b = v[(i + 1) % v.size()];
        // distance to segment
        Point ab = b - a;
        double t = std::clamp(std::real((p - a) * std::conj(ab)) / std::norm(ab), 0.0, 1.0);
        if (std::abs(p - (a + t * ab)) <= eps) return false;
        if (a.imag() <= p.imag()) {
            if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++winding;
        } else if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) {
            --winding;
        }
    }
    return winding != 0;
}

bool interiors_overlap(const Polygon& p, const Polygon& q)
{
    const double scale = std::max(std::abs(p.hi - p.lo), std::abs(q.hi - q.lo));
    const double eps = 1e-9 * scale;
    for (std::size_t i = 0; i < p.pts.size(); ++i) {
        Point a = p.pts[i], b = p.pts[(i + 1) % p.pts.size()];
        for (std::size_t j = 0; j < q.pts.size(); ++j) {
            Point c = q.pts[j], d = q.pts[(j + 1) % q.pts.size()];
            double s1 = side(a, b, c), s2 = side(a, b, d);
            double s3 = side(c, d, a), s4 = side(c, d, b);
            bool cross_ab = (s1 > eps && s2 < -eps) || (s1 < -eps && s2 > eps);
            bool cross_cd = (s3 > eps && s4 < -eps) || (s3 < -eps && s4 > eps);
            if (cross_ab && cross_cd) return true;
        }
    }
    return strictly_inside(q, p.sample, eps) || strictly_inside(p, q.sample, eps);
}

std::vector<Polygon> kites(const Layout& layout, const PlanarMap& map)
{
    std::vector<Polygon> out;
    out.reserve(map.edge_count());
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        auto [a, b] = map.edge(e);
        auto [left, right] = map.edge_faces(e);
        Polygon poly;
        poly.pts.push_back(layout.center[a]);
        if (right != kNone) poly.pts.push_back(layout.dual_point[right]);
        poly.pts.push_back(layout.center[b]);
        if (left != kNone) poly.pts.push_back(layout.dual_point[left]);
        if (poly.pts.size() == 4) {
            poly.sample = 0.5 * (layout.center[a] + layout.center[b]);
        } else {
            poly.sample = (poly.pts[0] + poly.pts[1] + poly.pts[2]) / 3.0;
        }
        poly.lo = poly.hi = poly.pts[0];
        for (Point p : poly.pts) {
            poly.lo = {std::min(poly.lo.real(), p.real()), std::min(poly.lo.imag(), p.imag())};
            poly.hi = {std::max(poly.hi.real(), p.real()), std::max(poly.hi.imag(), p.imag())};
        }
        out.push_back(std::move(poly));
    }
    return out;
}

bool boxes_overlap(const Polygon& p, const Polygon& q)
{
    return p.lo.real() <= q.hi.real() && q.lo.real() <= p.hi.real() && p.lo.imag() <= q.hi.imag() &&
           q.lo.imag() <= p.hi.imag();
}

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Layout layout_embed(const PlanarMap& map, const AngleAssignment& theta, const PackingMetric& r, double holonomy_tol)
{
    require_angles(map, theta);
    const int nv = map.vertex_count();
    if (r.size() != static_cast<std::size_t>(nv)) throw Error(ErrorCode::DomainError, "metric size does not match the map");

    // Fan offsets: angle of neighbour i measured from neighbour 0.
    std::vector<std::vector<double>> offset(nv);
    for (VertexId v = 0; v < nv; ++v) {
        auto nb = map.neighbors(v);
        auto ie = map.incident_edges(v);
        auto& off = offset[v];
        off.resize(nb.size());
        double prev_half = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double half = 0.5 * alpha_wedge(r[v], r[nb[i]], theta[ie[i]]);
            off[i] = i == 0 ? 0.0 : off[i - 1] + prev_half + half;
            prev_half = half;
        }
    }

    Layout out;
    out.center.assign(nv, Point(0.0, 0.0));
    out.radius = r.radius;
    std::vector<char> placed(nv, 0);
    std::vector<int> ref_index(nv, 0);
    std::vector<double> ref_angle(nv, 0.0);

    const VertexId root = map.root();
    placed[root] = 1;
    std::deque<VertexId> queue{root};
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        auto nb = map.neighbors(v);
        auto ie = map.incident_edges(v);
        const auto& off = offset[v];
        for (std::size_t i = 0; i < nb.size(); ++i) {
            VertexId w = nb[i];
            const double phi = ref_angle[v] + off[i] - off[ref_index[v]];
            const Point zw = out.center[v] + std::polar(edge_length(r[v], r[w], theta[ie[i]]), phi);
            if (!placed[w]) {
                placed[w] = 1;
                out.center[w] = zw;
                auto nw = map.neighbors(w);
                ref_index[w] = static_cast<int>(std::find(nw.begin(), nw.end(), v) - nw.begin());
                ref_angle[w] = phi + kPi;
                queue.push_back(w);
            } else if (std::abs(out.center[w] - zw) > holonomy_tol * r[w]) {
                throw Error(ErrorCode::InconsistentHolonomy,
                            "vertex " + std::to_string(map.label(w)) + " revisited " +
                                std::to_string(std::abs(out.center[w] - zw) / r[w]) + " radii away from its placement");
            }
        }
    }

    out.dual_point.assign(map.face_count(), Point(0.0, 0.0));
    for (FaceId f = 0; f < map.face_count(); ++f) {
        Point acc(0.0, 0.0);
        int k = 0;
        for_each_dual_candidate(map, out.center, out.radius, f, [&](Point p) {
            acc += p;
            ++k;
        });
        out.dual_point[f] = acc / double(k);
    }
    return out;
}

ConsistencyReport consistency_check(const Layout& layout, const PlanarMap& map, const AngleAssignment& theta,
                                    const ConsistencyOptions& opts)
{
    require_angles(map, theta);
    ConsistencyReport rep;
    const auto& z = layout.center;
    const auto& r = layout.radius;

    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        auto [a, b] = map.edge(e);
        const double expect = edge_length(r[a], r[b], theta[e]);
        const double dev = std::abs(std::abs(z[a] - z[b]) - expect) / expect;
        if (dev > rep.max_edge_dev_rel) {
            rep.max_edge_dev_rel = dev;
            rep.worst_edge = e;
        }
        if (dev > opts.flag_tol) rep.flagged_edges.push_back(e);
    }

    if (layout.dual_point.size() == static_cast<std::size_t>(map.face_count())) {
        for (FaceId f = 0; f < map.face_count(); ++f) {
            double rmax = 0.0;
            for (VertexId v : map.face(f)) rmax = std::max(rmax, r[v]);
            double spread = 0.0;
            for_each_dual_candidate(map, z, r, f,
                                    [&](Point p) { spread = std::max(spread, std::abs(p - layout.dual_point[f])); });
            if (spread / rmax > rep.max_dual_spread_rel) {
                rep.max_dual_spread_rel = spread / rmax;
                rep.worst_face = f;
            }
        }
    }

    for (VertexId v = 0; v < map.vertex_count(); ++v) {
        if (map.is_boundary(v)) continue;
        auto nb = map.neighbors(v);
        double total = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            Point d0 = z[nb[i]] - z[v];
            Point d1 = z[nb[(i + 1) % nb.size()]] - z[v];
            double a = std::arg(d1 / d0);
            if (a <= 0.0) a += 2.0 * kPi;
            total += a;
        }
        rep.max_angle_sum_err = std::max(rep.max_angle_sum_err, std::abs(total - 2.0 * kPi));
    }

    if (layout.dual_point.size() == static_cast<std::size_t>(map.face_count())) {
        auto polys = kites(layout, map);
        auto test_pair = [&](std::size_t i, std::size_t j) {
            ++rep.overlap_pairs_checked;
            if (interiors_overlap(polys[i], polys[j])) ++rep.overlapping_pairs;
        };
        rep.full_overlap_check = opts.full_overlap_check && map.edge_count() <= 1000;
        if (rep.full_overlap_check) {
            for (std::size_t i = 0; i < polys.size(); ++i)
                for (std::size_t j = i + 1; j < polys.size(); ++j) test_pair(i, j);
        } else if (!polys.empty()) {
            std::vector<double> sizes;
            for (const auto& p : polys) sizes.push_back(std::max(p.hi.real() - p.lo.real(), p.hi.imag() - p.lo.imag()));
            std::nth_element(sizes.begin(), sizes.begin() + sizes.size() / 2, sizes.end());
            const double cell = std::max(sizes[sizes.size() / 2], 1e-300);
            std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
            auto key = [](long x, long y) {
                return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) ^ static_cast<std::uint32_t>(y);
            };
            std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
            for (std::uint32_t i = 0; i < polys.size(); ++i) {
                const auto& p = polys[i];
                long x0 = std::lround(std::floor(p.lo.real() / cell)), x1 = std::lround(std::floor(p.hi.real() / cell));
                long y0 = std::lround(std::floor(p.lo.imag() / cell)), y1 = std::lround(std::floor(p.hi.imag() / cell));
                // Very large kites relative to the median are compared by box only.
                if ((x1 - x0 + 1) * (y1 - y0 + 1) > 4096) {
                    for (std::uint32_t j = 0; j < polys.size(); ++j)
                        if (j != i && boxes_overlap(p, polys[j])) pairs.push_back({std::min(i, j), std::max(i, j)});
                    continue;
                }
                for (long x = x0; x <= x1; ++x)
                    for (long y = y0; y <= y1; ++y) {
                        auto& bucket = grid[key(x, y)];
                        for (std::uint32_t j : bucket)
                            if (boxes_overlap(p, polys[j])) pairs.push_back({j, i});
                        bucket.push_back(i);
                    }
            }
            std::sort(pairs.begin(), pairs.end());
            pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
            for (auto [i, j] : pairs) test_pair(i, j);
        }
    }
    return rep;
}

Layout normalize_to_disk(const Layout& layout, VertexId root)
{
    Layout out = layout;
    const Point shift = layout.center.empty() ? Point(0.0, 0.0) : layout.center.at(root);
    double extent = 0.0;
    for (std::size_t v = 0; v < layout.center.size(); ++v)
        extent = std::max(extent, std::abs(layout.center[v] - shift) + layout.radius[v]);
    const double target = 1.0 - 1e-9;
    double s = extent > 0.0 ? target / extent : 1.0;
    // Already normalised: leave the numbers untouched so the map is idempotent.
    if (shift == Point(0.0, 0.0) && std::abs(s - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon()) s = 1.0;
    if (shift != Point(0.0, 0.0) || s != 1.0) {
        for (auto& z : out.center) z = (z - shift) * s;
        for (auto& x : out.radius) x *= s;
        for (auto& p : out.dual_point) p = (p - shift) * s;
    }
    out.frame = Frame::UnitDisk;
    out.hyp_center.resize(out.center.size());
    for (std::size_t v = 0; v < out.center.size(); ++v) out.hyp_center[v] = hyperbolic_center(out.center[v], out.radius[v]);
    return out;
}

Point hyperbolic_center(Point z, double r)
{
    const double d = std::abs(z);
    if (!(r > 0.0) || !(d + r < 1.0))
        throw Error(ErrorCode::NotInsideDisk, "circle is not inside the unit disk");
    if (d == 0.0) return Point(0.0, 0.0);
    const double t = std::tanh(0.5 * (std::atanh(d - r) + std::atanh(d + r)));
    return z / d * t;
}

double d_hyp(Point z1, Point z2)
{
    const double a1 = std::abs(z1), a2 = std::abs(z2);
    if (!(a1 < 1.0) || !(a2 < 1.0)) throw Error(ErrorCode::NotInsideDisk, "point is not inside the unit disk");
    if (z1 == Point(0.0, 0.0)) return std::log((1.0 + a2) / (1.0 - a2));
    if (z2 == Point(0.0, 0.0)) return std::log((1.0 + a1) / (1.0 - a1));
    const double q = std::abs(z1 - z2) / std::abs(1.0 - std::conj(z1) * z2);
    return 2.0 * std::atanh(std::min(q, 1.0));
}

void write_vertex_csv(std::ostream& os, const Layout& layout, const PlanarMap& map)
{
    os << "vertex,x,y,r\n";
    for (VertexId v = 0; v < static_cast<VertexId>(layout.center.size()); ++v)
        os << map.label(v) << ',' << fmt17(layout.center[v].real()) << ',' << fmt17(layout.center[v].imag()) << ','
           << fmt17(layout.radius[v]) << '\n';
}

void write_dual_csv(std::ostream& os, const Layout& layout)
{
    os << "face,x,y\n";
    for (std::size_t f = 0; f < layout.dual_point.size(); ++f)
        os << f << ',' << fmt17(layout.dual_point[f].real()) << ',' << fmt17(layout.dual_point[f].imag()) << '\n';
}

Layout read_vertex_csv(std::istream& is, const PlanarMap& map)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("vertex,x,y,r", 0) != 0)
        throw Error(ErrorCode::ParseError, "layout CSV must start with the header vertex,x,y,r");
    Layout out;
    const int nv = map.vertex_count();
    out.center.assign(nv, Point(0.0, 0.0));
    out.radius.assign(nv, 0.0);
    std::vector<char> seen(nv, 0);
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell[4];
        for (auto& c : cell)
            if (!std::getline(ss, c, ',')) throw Error(ErrorCode::ParseError, "short row " + std::to_string(row));
        try {
            VertexId v = map.index_of(std::stoll(cell[0]));
            out.center[v] = Point(std::stod(cell[1]), std::stod(cell[2]));
            out.radius[v] = std::stod(cell[3]);
            seen[v] = 1;
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ParseError, "bad number in row " + std::to_string(row));
        }
    }
    for (VertexId v = 0; v < nv; ++v)
        if (!seen[v]) throw Error(ErrorCode::UnknownVertex, "layout has no row for vertex " + std::to_string(map.label(v)));
    return out;
}

}  // namespace icp
