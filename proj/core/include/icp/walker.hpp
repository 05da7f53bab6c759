#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "icp/layout.hpp"
#include "icp/planar_map.hpp"

namespace icp {

/// X_0 = root, X_{i+1} uniform among the neighbours of X_i. Stops at the
/// first boundary vertex of a disk-patch or after n steps.
struct WalkTrace {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<VertexId> steps;
    bool stopped_at_boundary = false;

    [[nodiscard]] std::size_t length() const noexcept { return steps.empty() ? 0 : steps.size() - 1; }
};

/// Draws come from CounterRng(seed, stream).
WalkTrace srw_walk(const PlanarMap& map, VertexId root, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// Per-step r(X_i), |z(X_i)| and d_hyp(z_h(X_0), z_h(X_i)). The hyperbolic
/// column needs a unit-disk layout and is NaN otherwise.
struct WalkObservables {
    std::vector<double> radius;
    std::vector<double> abs_z;
    std::vector<double> dist_hyp;
};

WalkObservables observe(const WalkTrace& trace, const Layout& layout);

/// "step,vertex,r,abs_z,d_hyp" with external vertex labels.
void write_trace_csv(std::ostream& os, const WalkTrace& trace, const WalkObservables& obs, const PlanarMap& map);

struct SpeedEstimate {
    double lambda_radius = 0.0;  // slope of -log r(X_i)
    double lambda_hyp = 0.0;     // slope of d_hyp(z_h(X_0), z_h(X_i))
    double stderr_radius = 0.0;
    double stderr_hyp = 0.0;
    std::size_t window_begin = 0;  // inclusive step range (per trace)
    std::size_t window_end = 0;
    std::size_t points = 0;

    [[nodiscard]] double difference() const noexcept { return lambda_radius - lambda_hyp; }
};

/// Fit window for a trace of `length` steps: [length / 4, length], or
/// [length / 4, floor(0.9 length)] when the walk was absorbed at the boundary.
std::pair<std::size_t, std::size_t> speed_window(std::size_t length, bool stopped_at_boundary);

/// Least-squares slopes on speed_window. Throws TooShort when the window
/// holds fewer than 50 steps, NotInsideDisk for a plane-frame layout.
SpeedEstimate estimate_speed(const WalkTrace& trace, const Layout& layout);

/// Pools the (step, value) pairs from every trace's window into one fit.
/// Walks on finite patches are short; pooling lets an ensemble of them carry
/// a slope no single trace could. Throws TooShort when fewer than 50 points
/// are pooled. window_begin/end report the smallest and largest step used.
SpeedEstimate estimate_speed_ensemble(std::span<const WalkTrace> traces, const Layout& layout);

struct ExitHistogram {
    std::vector<std::size_t> counts;  // bin i covers [2 pi i / bins, 2 pi (i + 1) / bins)
    std::size_t sample_count = 0;
    std::size_t boundary_hits = 0;

    [[nodiscard]] std::size_t bin_count() const noexcept { return counts.size(); }
    [[nodiscard]] std::size_t nonempty_bins() const;
    [[nodiscard]] double max_fraction() const;
};

/// `samples` walks from the root (walk i uses stream i), each for at most
/// n_max steps; records arg z(X) at the stopping vertex.
ExitHistogram exit_histogram(const PlanarMap& map, const Layout& layout, std::size_t samples, std::size_t n_max,
                             std::size_t bins, std::uint64_t seed);

/// "bin_low,bin_high,count".
void write_histogram_csv(std::ostream& os, const ExitHistogram& h);

struct DecayRow {
    std::size_t step = 0;
    std::size_t alive = 0;  // traces that have not stopped before this step
    double mean_log_r = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

struct DecaySeries {
    std::vector<DecayRow> rows;
    /// OLS slope of mean_log_r over [N / 4, N], N the last step at which at
    /// least half the traces are still running. NaN with fewer than 2 points.
    double slope = 0.0;
    std::size_t window_begin = 0;
    std::size_t window_end = 0;
};

DecaySeries radii_decay_series(std::span<const WalkTrace> traces, const Layout& layout);

/// "step,alive,mean_log_r,q10,q50,q90".
void write_decay_csv(std::ostream& os, const DecaySeries& s);

}  // namespace icp
