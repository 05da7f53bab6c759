#include "icp/walker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "icp/errors.hpp"
#include "icp/random.hpp"

namespace icp {

namespace {

constexpr std::size_t kMinFitPoints = 50;

struct Ols {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;

    void add(double x, double y)
    {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }

    // slope and its standard error
    std::pair<double, double> fit() const
    {
        const double dn = static_cast<double>(n);
        const double vx = sxx - sx * sx / dn;
        if (n < 2 || vx <= 0.0) return {std::nan(""), std::nan("")};
        const double cxy = sxy - sx * sy / dn;
        const double slope = cxy / vx;
        if (n < 3) return {slope, std::nan("")};
        const double ssr = std::max(0.0, (syy - sy * sy / dn) - slope * cxy);
        return {slope, std::sqrt(ssr / (dn - 2.0) / vx)};
    }
};

void require_disk(const Layout& layout)
{
    if (layout.frame != Frame::UnitDisk || layout.hyp_center.size() != layout.center.size())
        throw Error(ErrorCode::NotInsideDisk, "a unit-disk layout with hyperbolic centres is required");
}

double quantile(std::vector<double>& xs, double q)
{
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

WalkTrace srw_walk(const PlanarMap& map, VertexId root, std::size_t n, std::uint64_t seed, std::uint64_t stream)
{
    map.check(root);
    WalkTrace t;
    t.seed = seed;
    t.stream = stream;
    t.steps.reserve(n + 1);
    t.steps.push_back(root);
    CounterRng rng(seed, stream);
    VertexId x = root;
    for (std::size_t i = 0; i < n; ++i) {
        if (map.is_boundary(x)) break;
        auto nb = map.neighbors(x);
        x = nb[rng.below(nb.size())];
        t.steps.push_back(x);
    }
    t.stopped_at_boundary = map.is_boundary(x);
    return t;
}

WalkObservables observe(const WalkTrace& trace, const Layout& layout)
{
    WalkObservables o;
    const bool disk = layout.frame == Frame::UnitDisk && layout.hyp_center.size() == layout.center.size();
    const Point origin = disk && !trace.steps.empty() ? layout.hyp_center.at(trace.steps.front()) : Point();
    for (VertexId v : trace.steps) {
        o.radius.push_back(layout.radius.at(v));
        o.abs_z.push_back(std::abs(layout.center.at(v)));
        o.dist_hyp.push_back(disk ? d_hyp(origin, layout.hyp_center[v]) : std::nan(""));
    }
    return o;
}

void write_trace_csv(std::ostream& os, const WalkTrace& trace, const WalkObservables& obs, const PlanarMap& map)
{
    os << "step,vertex,r,abs_z,d_hyp\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        os << i << ',' << map.label(trace.steps[i]) << ',' << g17(obs.radius[i]) << ',' << g17(obs.abs_z[i]) << ','
           << g17(obs.dist_hyp[i]) << '\n';
}

std::pair<std::size_t, std::size_t> speed_window(std::size_t length, bool stopped_at_boundary)
{
    const std::size_t end = stopped_at_boundary ? static_cast<std::size_t>(std::floor(0.9 * double(length))) : length;
    return {length / 4, end};
}

SpeedEstimate estimate_speed(const WalkTrace& trace, const Layout& layout)
{
    return estimate_speed_ensemble(std::span<const WalkTrace>(&trace, 1), layout);
}

SpeedEstimate estimate_speed_ensemble(std::span<const WalkTrace> traces, const Layout& layout)
{
    require_disk(layout);
    Ols rad, hyp;
    SpeedEstimate s;
    s.window_begin = std::numeric_limits<std::size_t>::max();
    for (const auto& t : traces) {
        if (t.steps.empty()) continue;
        auto [b, e] = speed_window(t.length(), t.stopped_at_boundary);
        if (b > e) continue;
        const Point origin = layout.hyp_center.at(t.steps.front());
        for (std::size_t i = b; i <= e; ++i) {
            VertexId v = t.steps[i];
            rad.add(double(i), -std::log(layout.radius.at(v)));
            hyp.add(double(i), d_hyp(origin, layout.hyp_center[v]));
        }
        s.window_begin = std::min(s.window_begin, b);
        s.window_end = std::max(s.window_end, e);
    }
    s.points = rad.n;
    if (s.points < kMinFitPoints)
        throw Error(ErrorCode::TooShort, std::to_string(s.points) + " usable steps, at least " +
                                             std::to_string(kMinFitPoints) + " needed");
    std::tie(s.lambda_radius, s.stderr_radius) = rad.fit();
    std::tie(s.lambda_hyp, s.stderr_hyp) = hyp.fit();
    return s;
}

std::size_t ExitHistogram::nonempty_bins() const
{
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

double ExitHistogram::max_fraction() const
{
    if (sample_count == 0) return 0.0;
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) / static_cast<double>(sample_count);
}

ExitHistogram exit_histogram(const PlanarMap& map, const Layout& layout, std::size_t samples, std::size_t n_max,
                             std::size_t bins, std::uint64_t seed)
{
    if (bins == 0) throw Error(ErrorCode::DomainError, "bins must be positive");
    ExitHistogram h;
    h.counts.assign(bins, 0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t s = 0; s < samples; ++s) {
        WalkTrace t = srw_walk(map, map.root(), n_max, seed, s);
        double a = std::arg(layout.center.at(t.steps.back()));
        if (a < 0.0) a += two_pi;
        auto bin = static_cast<std::size_t>(a / two_pi * double(bins));
        h.counts[std::min(bin, bins - 1)] += 1;
        h.sample_count += 1;
        if (t.stopped_at_boundary) h.boundary_hits += 1;
    }
    return h;
}

void write_histogram_csv(std::ostream& os, const ExitHistogram& h)
{
    os << "bin_low,bin_high,count\n";
    const double w = 2.0 * std::numbers::pi / double(h.bin_count());
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        os << g17(w * double(i)) << ',' << g17(w * double(i + 1)) << ',' << h.counts[i] << '\n';
}

DecaySeries radii_decay_series(std::span<const WalkTrace> traces, const Layout& layout)
{
    require_disk(layout);
    DecaySeries out;
    std::size_t longest = 0;
    for (const auto& t : traces) longest = std::max(longest, t.steps.size());
    std::vector<double> vals;
    for (std::size_t i = 0; i < longest; ++i) {
        vals.clear();
        for (const auto& t : traces)
            if (i < t.steps.size()) vals.push_back(std::log(layout.radius.at(t.steps[i])));
        DecayRow row;
        row.step = i;
        row.alive = vals.size();
        double sum = 0.0;
        for (double x : vals) sum += x;
        row.mean_log_r = sum / double(vals.size());
        row.q10 = quantile(vals, 0.1);
        row.q50 = quantile(vals, 0.5);
        row.q90 = quantile(vals, 0.9);
        out.rows.push_back(row);
    }
    std::size_t last = 0;
    for (const auto& row : out.rows)
        if (2 * row.alive >= traces.size()) last = row.step;
    out.window_begin = last / 4;
    out.window_end = last;
    Ols fit;
    for (std::size_t i = out.window_begin; i <= out.window_end && i < out.rows.size(); ++i)
        fit.add(double(i), out.rows[i].mean_log_r);
    out.slope = fit.fit().first;
    return out;
}

void write_decay_csv(std::ostream& os, const DecaySeries& s)
{
    os << "step,alive,mean_log_r,q10,q50,q90\n";
    for (const auto& r : s.rows)
        os << r.step << ',' << r.alive << ',' << g17(r.mean_log_r) << ',' << g17(r.q10) << ',' << g17(r.q50) << ','
           << g17(r.q90) << '\n';
}

}  // namespace icp
