#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "icp/analysis.hpp"
#include "icp/errors.hpp"
#include "icp/layout.hpp"
#include "icp/map_io.hpp"
#include "icp/packing.hpp"
#include "icp/random.hpp"
#include "icp/walker.hpp"

#ifndef ICP_VERSION
#define ICP_VERSION "0.0.0"
#endif

namespace icp::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Output {
    std::string name;
    bool deterministic = true;
};

// Everything a command reports back for the manifest.
struct Run {
    fs::path out_dir;
    std::vector<std::string> inputs;
    std::vector<Output> outputs;
    std::optional<std::uint64_t> seed;

    void write(const std::string& name, const std::string& content, bool deterministic = true)
    {
        write_text_file(out_dir / name, content);
        outputs.push_back({name, deterministic});
    }
    void write_json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }
};

std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json labels_of(const PlanarMap& map, std::span<const VertexId> vs)
{
    ordered_json a = ordered_json::array();
    for (VertexId v : vs) a.push_back(map.label(v));
    return a;
}

// Options shared by the subcommands, bound once per invocation.
struct Options {
    std::string out_dir = ".";
    std::string map, theta, metric, layout, manifest;
    std::uint64_t seed = 0;

    // generate
    std::string kind = "patch";
    int p = 3, q = 6, generations = 3, n = 3, flips = 0;
    std::string theta_spec = "regular";
    double perturb = 0.0;
    std::string name = "map.json";

    // validate
    double tol = 1e-9;
    int max_cycle_len = 0;
    bool contractible_only = false;

    // solve
    std::string method = "ricci-flow";
    std::string boundary = "fixed-radii";
    std::string r0 = "uniform";
    double step = 0.1;
    int max_iters = 100000;
    std::optional<double> boundary_radius;

    // layout
    bool disk = false;
    std::string svg;
    bool svg_edges = false, svg_dual = false;
    double holonomy_tol = 1e-6;
    bool full_overlap = false;

    // walk
    std::size_t samples = 100, steps = 10000, bins = 16, traces = 1;

    // analyze
    std::vector<int> gens{2, 3, 4, 5};
    double family_theta = std::nan("");
    double hyp_rate = -0.1, par_rate = 0.02, mean_T_tol = 0.01;
    bool ball = false;
    int min_depth = 2;
    double count_bound = 100.0;
};

struct Loaded {
    PlanarMap map;
    AngleAssignment theta;
};

Loaded load_map_and_theta(const Options& o, Run& run, bool need_theta = true)
{
    run.inputs.push_back(o.map);
    MapDocument doc = read_map(fs::path(o.map));
    std::optional<AngleAssignment> theta = doc.theta;
    if (!o.theta.empty()) {
        run.inputs.push_back(o.theta);
        theta = read_theta(fs::path(o.theta), doc.map);
    }
    if (!theta && need_theta) throw Error(ErrorCode::MissingAngle, "no theta in the map file and no --theta given");
    return {doc.map, theta ? *theta : AngleAssignment()};
}

Layout load_disk_layout(const Options& o, const PlanarMap& map, Run& run)
{
    run.inputs.push_back(o.layout);
    std::istringstream is(read_text_file(o.layout));
    return normalize_to_disk(read_vertex_csv(is, map), map.root());
}

// ---------------------------------------------------------------- commands

int cmd_generate(const Options& o, Run& run)
{
    PlanarMap map = o.kind == "torus" ? generate_torus_quotient(o.p, o.q, o.n)
                    : o.kind == "patch" ? generate_regular_patch(o.p, o.q, o.generations)
                                        : throw Error(ErrorCode::ParseError, "--kind must be patch or torus");
    if (o.flips > 0) {
        CounterRng rng(o.seed, 1);
        int done = 0;
        for (int attempt = 0; done < o.flips && attempt < 100 * o.flips; ++attempt) {
            auto e = static_cast<EdgeId>(rng.below(static_cast<std::uint64_t>(map.edge_count())));
            try {
                map = flip_edge(map, e);
                ++done;
            } catch (const Error&) {
            }
        }
        if (done < o.flips) throw Error(ErrorCode::UnsupportedParameters, "could not perform the requested flips");
        run.seed = o.seed;
    }
    AngleAssignment theta = o.theta_spec == "regular" ? AngleAssignment::regular(map)
                                                      : AngleAssignment::uniform(map, std::stod(o.theta_spec));
    if (o.perturb != 0.0) {
        theta = perturb_theta_on_c1(map, theta, o.perturb, o.seed);
        run.seed = o.seed;
    }
    run.write(o.name, write_map(map, &theta));
    std::cout << o.name << ": V=" << map.vertex_count() << " E=" << map.edge_count() << " F=" << map.face_count()
              << " topology=" << to_string(map.topology()) << "\n";
    return kOk;
}

int cmd_validate(const Options& o, Run& run)
{
    auto [map, theta] = load_map_and_theta(o, run);
    CycleSearchOptions cs;
    cs.max_len = o.max_cycle_len;
    cs.contractible_only = o.contractible_only;
    RivinReport rep = check_rivin(map, theta, o.tol, cs);

    ordered_json j;
    j["tol"] = rep.tol;
    j["c1_pass"] = rep.c1_pass;
    j["c1_max_abs_residual"] = rep.c1_max_abs;
    j["c2_checked"] = rep.c2_checked;
    j["c2_min_weight"] = rep.c2_min_weight;
    j["c2_cycle"] = labels_of(map, rep.c2_cycle);
    j["epsilon0"] = rep.epsilon0;
    j["c2_prime_pass"] = rep.c2_prime_pass;
    j["max_cycle_len"] = o.max_cycle_len;
    j["contractible_only"] = o.contractible_only;
    j["notes"] = {std::string(RivinReport::kCycleReduction), std::string(RivinReport::kPatchRestricted)};
    run.write_json("rivin.json", j);

    std::string csv = "face,residual\n";
    for (std::size_t f = 0; f < rep.c1_residuals.size(); ++f) csv += std::to_string(f) + "," + g17(rep.c1_residuals[f]) + "\n";
    run.write("c1_residuals.csv", csv);

    std::cout << "C1 " << (rep.c1_pass ? "pass" : "FAIL") << " (max |residual| " << rep.c1_max_abs << ")\n";
    if (!rep.c1_pass) {
        for (std::size_t f = 0; f < rep.c1_residuals.size(); ++f)
            if (std::abs(rep.c1_residuals[f]) > rep.tol) std::cout << "  face " << f << ": " << rep.c1_residuals[f] << "\n";
    }
    if (rep.c2_checked)
        std::cout << "C2' " << (rep.c2_prime_pass ? "pass" : "FAIL") << " (min non-facial weight " << rep.c2_min_weight
                  << ", epsilon0 " << rep.epsilon0 << ")\n";
    return rep.c1_pass && rep.c2_prime_pass ? kOk : kAssertionFailed;
}

int cmd_solve(const Options& o, Run& run)
{
    auto [map, theta] = load_map_and_theta(o, run);
    std::vector<double> r0;
    if (o.r0 == "uniform") {
        r0.assign(map.vertex_count(), 1.0);
    } else if (o.r0 == "random") {
        CounterRng rng(o.seed);
        run.seed = o.seed;
        r0.resize(map.vertex_count());
        for (auto& x : r0) x = 0.5 + 1.5 * rng.uniform();
    } else {
        run.inputs.push_back(o.r0);
        r0 = read_metric(fs::path(o.r0), map).radius;
    }
    if (o.boundary_radius)
        for (VertexId v : map.boundary()) r0[v] = *o.boundary_radius;

    SolverConfig cfg;
    cfg.method = solve_method_from_string(o.method);
    cfg.boundary = boundary_mode_from_string(o.boundary);
    cfg.step = o.step;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iters;
    SolveResult res = solve(map, theta, PackingMetric(r0), cfg);

    run.write("metric.json", write_metric(map, res.metric));
    std::string log = "iteration,max_abs_K,step,elapsed_s\n";
    for (const auto& e : res.log)
        log += std::to_string(e.iteration) + "," + g17(e.max_abs_K) + "," + g17(e.step) + "," + g17(e.elapsed_s) + "\n";
    run.write("solver_log.csv", log, false);
    std::string curv = "vertex,alpha,K\n";
    for (VertexId v = 0; v < map.vertex_count(); ++v)
        curv += std::to_string(map.label(v)) + "," + g17(res.curvature.alpha[v]) + "," + g17(res.curvature.K[v]) + "\n";
    run.write("curvature.csv", curv);

    ordered_json j;
    j["method"] = o.method;
    j["boundary"] = o.boundary;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["max_abs_K"] = res.curvature.max_abs();
    j["tol"] = o.tol;
    run.write_json("solve.json", j);

    std::cout << (res.converged ? "converged" : "NOT converged") << " after " << res.iterations
              << " iterations, max |K| = " << res.curvature.max_abs() << "\n";
    return res.converged ? kOk : kNoConvergence;
}

int cmd_layout(const Options& o, Run& run)
{
    auto [map, theta] = load_map_and_theta(o, run);
    run.inputs.push_back(o.metric);
    PackingMetric r = read_metric(fs::path(o.metric), map);
    Layout lay = layout_embed(map, theta, r, o.holonomy_tol);
    ConsistencyOptions copts;
    copts.full_overlap_check = o.full_overlap;
    ConsistencyReport rep = consistency_check(lay, map, theta, copts);
    if (o.disk) lay = normalize_to_disk(lay, map.root());

    std::ostringstream vs, ds;
    write_vertex_csv(vs, lay, map);
    write_dual_csv(ds, lay);
    run.write("layout.csv", vs.str());
    run.write("dual.csv", ds.str());

    ordered_json j;
    j["frame"] = o.disk ? "unit-disk" : "plane";
    j["max_edge_dev_rel"] = rep.max_edge_dev_rel;
    j["flagged_edges"] = rep.flagged_edges.size();
    j["max_dual_spread_rel"] = rep.max_dual_spread_rel;
    j["max_angle_sum_err"] = rep.max_angle_sum_err;
    j["overlap_pairs_checked"] = rep.overlap_pairs_checked;
    j["overlapping_pairs"] = rep.overlapping_pairs;
    j["full_overlap_check"] = rep.full_overlap_check;
    run.write_json("consistency.json", j);

    if (!o.svg.empty()) {
        SvgOptions so;
        so.draw_edges = o.svg_edges;
        so.draw_dual_points = o.svg_dual;
        run.write(o.svg, to_svg(lay, map, so));
    }
    std::cout << "edge dev " << rep.max_edge_dev_rel << ", dual spread " << rep.max_dual_spread_rel << ", overlaps "
              << rep.overlapping_pairs << "/" << rep.overlap_pairs_checked << "\n";
    return kOk;
}

int cmd_walk(const Options& o, Run& run)
{
    run.inputs.push_back(o.map);
    PlanarMap map = read_map(fs::path(o.map)).map;
    Layout lay = load_disk_layout(o, map, run);
    run.seed = o.seed;

    std::vector<WalkTrace> traces;
    traces.reserve(o.samples);
    for (std::size_t s = 0; s < o.samples; ++s) traces.push_back(srw_walk(map, map.root(), o.steps, o.seed, s));

    for (std::size_t i = 0; i < std::min(o.traces, traces.size()); ++i) {
        std::ostringstream os;
        write_trace_csv(os, traces[i], observe(traces[i], lay), map);
        char name[32];
        std::snprintf(name, sizeof name, "trace_%03zu.csv", i);
        run.write(name, os.str());
    }

    ExitHistogram h = exit_histogram(map, lay, o.samples, o.steps, o.bins, o.seed);
    std::ostringstream hs;
    write_histogram_csv(hs, h);
    run.write("histogram.csv", hs.str());

    std::ostringstream dcsv;
    DecaySeries decay = traces.empty() ? DecaySeries{} : radii_decay_series(traces, lay);
    write_decay_csv(dcsv, decay);
    run.write("decay.csv", dcsv.str());

    ordered_json j;
    j["rng"] = std::string(CounterRng::kAlgorithm);
    j["samples"] = o.samples;
    j["boundary_hits"] = h.boundary_hits;
    try {
        SpeedEstimate s = estimate_speed_ensemble(traces, lay);
        j["status"] = "ok";
        j["lambda_radius"] = s.lambda_radius;
        j["lambda_hyp"] = s.lambda_hyp;
        j["stderr_radius"] = s.stderr_radius;
        j["stderr_hyp"] = s.stderr_hyp;
        j["relative_difference"] = std::abs(s.difference()) / std::abs(s.lambda_radius);
        j["points"] = s.points;
        j["window"] = {s.window_begin, s.window_end};
        std::cout << "lambda_radius " << s.lambda_radius << ", lambda_hyp " << s.lambda_hyp << " (" << s.points
                  << " pooled points)\n";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TooShort) throw;
        j["status"] = "too-short";
        j["message"] = e.what();
        std::cout << e.what() << "\n";
    }
    j["decay_slope"] = decay.slope;
    j["histogram_nonempty_bins"] = h.nonempty_bins();
    j["histogram_max_fraction"] = h.max_fraction();
    run.write_json("speed.json", j);
    std::cout << "exit histogram: " << h.nonempty_bins() << "/" << h.bin_count() << " bins occupied\n";
    return kOk;
}

int cmd_dichotomy(const Options& o, Run& run)
{
    FamilySpec fam{o.p, o.q, o.family_theta};
    SolverConfig cfg;
    cfg.method = solve_method_from_string(o.method);
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iters;
    DiagnosisThresholds th{o.hyp_rate, o.par_rate, o.mean_T_tol};
    DichotomyReport rep = dichotomy_experiment(fam, o.gens, cfg, th);

    ordered_json j;
    j["family"] = rep.family;
    j["theta"] = fam.angle();
    j["mean_T"] = rep.mean_T;
    j["mean_theta"] = rep.mean_theta;
    j["mean_deg"] = rep.mean_deg;
    j["interior_vertices"] = rep.interior_vertices;
    j["rate"] = rep.rate;
    j["successive_rates"] = rep.successive_rates;
    j["diagnosis"] = std::string(to_string(rep.diagnosis));
    j["all_converged"] = rep.all_converged;
    run.write_json("dichotomy.json", j);
    std::string csv = "generation,vertices,boundary_radius,max_abs_K,iterations,converged\n";
    for (const auto& g : rep.generations)
        csv += std::to_string(g.generation) + "," + std::to_string(g.vertices) + "," + g17(g.boundary_radius) + "," +
               g17(g.max_abs_K) + "," + std::to_string(g.iterations) + "," + (g.converged ? "1" : "0") + "\n";
    run.write("dichotomy.csv", csv);

    std::cout << rep.family << ": mean T " << rep.mean_T << ", rate " << rep.rate << " -> " << to_string(rep.diagnosis)
              << "\n";
    if (!rep.all_converged) return kNoConvergence;
    return rep.mean_T >= 2.0 * kPi - 1e-9 ? kOk : kAssertionFailed;
}

int cmd_ring(const Options& o, Run& run)
{
    auto [map, theta] = load_map_and_theta(o, run);
    run.inputs.push_back(o.metric);
    PackingMetric r = read_metric(fs::path(o.metric), map);
    RingOptions ro;
    ro.min_depth = o.min_depth;
    ro.ball_condition = o.ball;
    RingReport rep = ring_check(map, theta, r, ro);
    Lemma2Report l2 = lemma2_check(map, theta, r, ro.min_depth);

    ordered_json j;
    j["required_depth"] = rep.required_depth;
    j["checked_vertices"] = rep.checked_vertices;
    j["empirical_C"] = rep.empirical_C;
    j["bound_holds"] = rep.bound_holds;
    j["worst_edge"] = {map.label(rep.worst.u), map.label(rep.worst.v)};
    j["lemma2_margin_subtracted"] = l2.margin_subtracted;
    j["lemma2_margin_plain"] = l2.margin_plain;
    j["epsilon1"] = l2.epsilon1;
    j["two_epsilon1_over_pi"] = l2.reference;
    j["plain_margin_exceeds_reference"] = l2.plain_exceeds_reference();
    run.write_json("ring.json", j);
    std::string csv = "u,v,log_ratio,flower_degree\n";
    for (const auto& e : rep.edges)
        csv += std::to_string(map.label(e.u)) + "," + std::to_string(map.label(e.v)) + "," + g17(e.log_ratio) + "," +
               std::to_string(e.flower) + "\n";
    run.write("ring_edges.csv", csv);

    std::cout << "empirical C " << rep.empirical_C << ", neighbour-sum margin " << l2.margin_subtracted << "\n";
    return rep.bound_holds && l2.positive() ? kOk : kAssertionFailed;
}

int cmd_count(const Options& o, Run& run)
{
    run.inputs.push_back(o.map);
    PlanarMap map = read_map(fs::path(o.map)).map;
    Layout lay = load_disk_layout(o, map, run);
    CountTable t = count_radii_check(lay, o.count_bound);
    std::string csv = "k,tau,N,N_tau2\n";
    for (const auto& row : t.rows)
        csv += std::to_string(row.k) + "," + g17(row.tau) + "," + std::to_string(row.N) + "," + g17(row.scaled) + "\n";
    run.write("count.csv", csv);
    ordered_json j;
    j["max_N_tau2"] = t.max_scaled;
    j["bound"] = t.bound;
    j["monotone"] = t.monotone;
    j["pass"] = t.pass();
    run.write_json("count.json", j);
    std::cout << "max N(tau) tau^2 = " << t.max_scaled << (t.pass() ? " (pass)" : " (FAIL)") << "\n";
    return t.pass() ? kOk : kAssertionFailed;
}

int cmd_mtp(const Options& o, Run& run)
{
    auto [map, theta] = load_map_and_theta(o, run);
    MassTransportReport rep = mass_transport_check(map, theta);
    const double tol = o.tol;
    const double mean_gap = std::abs(rep.mean_T() - rep.mean_theta());
    ordered_json j;
    j["vertices"] = map.vertex_count();
    j["max_outgoing_dev"] = rep.max_outgoing_dev;
    j["max_incoming_dev"] = rep.max_incoming_dev;
    j["sum_T"] = rep.sum_T;
    j["sum_theta"] = rep.sum_theta;
    j["mean_T"] = rep.mean_T();
    j["mean_theta"] = rep.mean_theta();
    j["nonzero_pairs"] = rep.nonzero_pairs;
    for (auto s : {VertexStatistic::T, VertexStatistic::Theta, VertexStatistic::Degree, VertexStatistic::L,
                   VertexStatistic::K})
        j["average"][std::string(to_string(s))] = unimodular_average(map, theta, s);
    const bool pass = rep.max_outgoing_dev <= tol && rep.max_incoming_dev <= tol && mean_gap <= tol;
    j["tol"] = tol;
    j["pass"] = pass;
    run.write_json("mtp.json", j);
    std::string csv = "vertex,T,theta,outgoing,incoming\n";
    for (VertexId v = 0; v < map.vertex_count(); ++v)
        csv += std::to_string(map.label(v)) + "," + g17(rep.T[v]) + "," + g17(rep.theta[v]) + "," + g17(rep.outgoing[v]) +
               "," + g17(rep.incoming[v]) + "\n";
    run.write("mtp.csv", csv);
    std::cout << "mean T " << rep.mean_T() << ", mean theta " << rep.mean_theta() << ", max deviation "
              << std::max(rep.max_outgoing_dev, rep.max_incoming_dev) << (pass ? " (pass)" : " (FAIL)") << "\n";
    return pass ? kOk : kAssertionFailed;
}

int cmd_replay(const Options& o)
{
    const fs::path manifest_path = fs::absolute(o.manifest);
    ordered_json m;
    try {
        m = ordered_json::parse(read_text_file(manifest_path));
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    const fs::path new_out = fs::absolute(o.out_dir);
    const fs::path old_out = m.at("out_dir").get<std::string>();
    if (fs::weakly_canonical(new_out) == fs::weakly_canonical(old_out))
        throw Error(ErrorCode::DomainError, "replay needs an --out-dir different from the recorded one");

    std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir" && i + 1 < args.size()) args[i + 1] = new_out.string();
        else if (args[i].rfind("--out-dir=", 0) == 0) args[i] = "--out-dir=" + new_out.string();
    }
    if (std::find(args.begin(), args.end(), "--out-dir") == args.end() &&
        std::none_of(args.begin(), args.end(), [](const std::string& a) { return a.rfind("--out-dir=", 0) == 0; })) {
        args.push_back("--out-dir");
        args.push_back(new_out.string());
    }

    const fs::path here = fs::current_path();
    fs::current_path(m.at("cwd").get<std::string>());
    const int code = run(args);
    fs::current_path(here);

    int mismatches = 0;
    if (code != m.at("exit_code").get<int>()) {
        std::cout << "exit code " << code << " differs from recorded " << m.at("exit_code").get<int>() << "\n";
        ++mismatches;
    }
    for (const auto& out : m.at("outputs")) {
        const std::string name = out.at("path").get<std::string>();
        if (!out.at("deterministic").get<bool>()) {
            std::cout << "skip  " << name << " (not deterministic)\n";
            continue;
        }
        std::string a, b;
        try {
            a = read_text_file(old_out / name);
            b = read_text_file(new_out / name);
        } catch (const Error& e) {
            std::cout << "MISSING " << name << ": " << e.what() << "\n";
            ++mismatches;
            continue;
        }
        const bool same = a == b;
        std::cout << (same ? "same  " : "DIFF  ") << name << "\n";
        if (!same) ++mismatches;
    }
    return mismatches == 0 ? kOk : kAssertionFailed;
}

int exit_code_for(ErrorCode c)
{
    switch (c) {
    case ErrorCode::InconsistentHolonomy:
    case ErrorCode::TooShort: return kAssertionFailed;
    default: return kInputError;
    }
}

void add_out_dir(CLI::App* sc, Options& o)
{
    sc->add_option("--out-dir", o.out_dir, "Directory for outputs and the run manifest")->capture_default_str();
}

void add_map_theta(CLI::App* sc, Options& o)
{
    sc->add_option("--map", o.map, "Map JSON file")->required()->check(CLI::ExistingFile);
    sc->add_option("--theta", o.theta, "JSON file with a theta field (default: theta inside the map file)")
        ->check(CLI::ExistingFile);
}

}  // namespace

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Ideal circle packings of angle-weighted planar maps"};
    app.set_version_flag("--version", std::string(ICP_VERSION));
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "Generate a {p,q} patch or a flat torus quotient with angles");
    gen->add_option("--kind", o.kind, "patch or torus")->capture_default_str()->check(CLI::IsMember({"patch", "torus"}));
    gen->add_option("--p", o.p, "Face degree")->capture_default_str();
    gen->add_option("--q", o.q, "Vertex degree")->capture_default_str();
    gen->add_option("--generations", o.generations, "Patch generations")->capture_default_str();
    gen->add_option("--n", o.n, "Torus period")->capture_default_str();
    gen->add_option("--theta", o.theta_spec, "'regular' (pi - 2 pi / face degree) or a constant in radians")
        ->capture_default_str();
    gen->add_option("--perturb", o.perturb, "Sup-norm of a random C1-preserving perturbation")->capture_default_str();
    gen->add_option("--flips", o.flips, "Random edge flips applied before assigning angles (triangulations)")
        ->capture_default_str();
    gen->add_option("--seed", o.seed, "Seed for --perturb and --flips")->capture_default_str();
    gen->add_option("--name", o.name, "Output file name")->capture_default_str();
    add_out_dir(gen, o);

    auto* val = app.add_subcommand("validate", "Check C1 and C2' for a map with angles");
    add_map_theta(val, o);
    val->add_option("--tol", o.tol, "C1 tolerance (radians)")->capture_default_str();
    val->add_option("--max-cycle-len", o.max_cycle_len, "Ignore non-facial cycles longer than this (0: no cap)")
        ->capture_default_str();
    val->add_flag("--contractible-only", o.contractible_only, "On a torus, only consider contractible cycles");
    add_out_dir(val, o);

    auto* sol = app.add_subcommand("solve", "Compute a zero-curvature packing metric");
    add_map_theta(sol, o);
    sol->add_option("--method", o.method, "ricci-flow or fixed-point")
        ->capture_default_str()
        ->check(CLI::IsMember({"ricci-flow", "fixed-point"}));
    sol->add_option("--tol", o.tol, "Target max |K| at interior vertices")->capture_default_str();
    sol->add_option("--step", o.step, "Initial flow step")->capture_default_str();
    sol->add_option("--max-iters", o.max_iters, "Iteration cap")->capture_default_str();
    sol->add_option("--boundary", o.boundary, "fixed-radii or free")
        ->capture_default_str()
        ->check(CLI::IsMember({"fixed-radii", "free"}));
    sol->add_option("--r0", o.r0, "Initial radii: uniform, random (in [0.5, 2]) or a metric JSON file")
        ->capture_default_str();
    sol->add_option("--boundary-radius", o.boundary_radius, "Override the initial radius of every boundary vertex");
    sol->add_option("--seed", o.seed, "Seed for --r0 random")->capture_default_str();
    add_out_dir(sol, o);

    auto* lay = app.add_subcommand("layout", "Lay out the circles of a flat metric");
    add_map_theta(lay, o);
    lay->add_option("--metric", o.metric, "Metric JSON file")->required()->check(CLI::ExistingFile);
    lay->add_flag("--disk", o.disk, "Normalise into the unit disk");
    lay->add_option("--svg", o.svg, "Also write an SVG with this file name");
    lay->add_flag("--svg-edges", o.svg_edges, "Draw centre-to-centre edges in the SVG");
    lay->add_flag("--svg-dual", o.svg_dual, "Draw dual points in the SVG");
    lay->add_option("--holonomy-tol", o.holonomy_tol, "Revisit tolerance in units of the radius")->capture_default_str();
    lay->add_flag("--full-overlap", o.full_overlap, "Check every kite pair (maps with at most 1000 edges)");
    add_out_dir(lay, o);

    auto* walk = app.add_subcommand("walk", "Simple random walks on a laid-out map");
    walk->add_option("--map", o.map, "Map JSON file")->required()->check(CLI::ExistingFile);
    walk->add_option("--layout", o.layout, "Vertex layout CSV (normalised into the unit disk on load)")
        ->required()
        ->check(CLI::ExistingFile);
    walk->add_option("--samples", o.samples, "Number of walks")->capture_default_str();
    walk->add_option("--steps", o.steps, "Maximum steps per walk")->capture_default_str();
    walk->add_option("--seed", o.seed, "Seed; walk i uses stream i")->capture_default_str();
    walk->add_option("--bins", o.bins, "Exit-angle histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
    walk->add_option("--traces", o.traces, "Number of trace CSVs to write")->capture_default_str();
    add_out_dir(walk, o);

    auto* ana = app.add_subcommand("analyze", "Verification suites");
    ana->require_subcommand(1);
    auto* dich = ana->add_subcommand("dichotomy", "Type diagnosis from boundary-radius decay across generations");
    dich->add_option("--p", o.p, "Face degree")->capture_default_str();
    dich->add_option("--q", o.q, "Vertex degree")->capture_default_str();
    dich->add_option("--theta", o.family_theta, "Constant angle (default pi - 2 pi / p)");
    dich->add_option("--generations", o.gens, "Generations to solve")->delimiter(',')->capture_default_str();
    dich->add_option("--method", o.method, "Solver method")->check(CLI::IsMember({"ricci-flow", "fixed-point"}));
    dich->add_option("--tol", o.tol, "Solver tolerance")->capture_default_str();
    dich->add_option("--max-iters", o.max_iters, "Solver iteration cap")->capture_default_str();
    dich->add_option("--hyperbolic-rate", o.hyp_rate, "Rate below which decay counts as exponential")
        ->capture_default_str();
    dich->add_option("--parabolic-rate", o.par_rate, "|rate| below which decay counts as flat")->capture_default_str();
    dich->add_option("--mean-T-tol", o.mean_T_tol, "Tolerance on mean T against 2 pi")->capture_default_str();
    add_out_dir(dich, o);

    auto* ring = ana->add_subcommand("ring", "Ring lemma ratios and neighbour-sum margins on a solved metric");
    add_map_theta(ring, o);
    ring->add_option("--metric", o.metric, "Metric JSON file")->required()->check(CLI::ExistingFile);
    ring->add_option("--min-depth", o.min_depth, "Minimum interior depth of checked vertices")->capture_default_str();
    ring->add_flag("--ball", o.ball, "Require depth > 6 pi / eps instead of --min-depth");
    add_out_dir(ring, o);

    auto* count = ana->add_subcommand("count", "Dyadic radius counts N(tau) tau^2");
    count->add_option("--map", o.map, "Map JSON file")->required()->check(CLI::ExistingFile);
    count->add_option("--layout", o.layout, "Vertex layout CSV")->required()->check(CLI::ExistingFile);
    count->add_option("--bound", o.count_bound, "Asserted bound on N(tau) tau^2")->capture_default_str();
    add_out_dir(count, o);

    auto* mtp = ana->add_subcommand("mtp", "Mass transport marginals on a torus");
    add_map_theta(mtp, o);
    mtp->add_option("--tol", o.tol, "Tolerance on the identities")->capture_default_str();
    add_out_dir(mtp, o);

    auto* rep = app.add_subcommand("replay", "Re-run a manifest into a new directory and compare outputs");
    rep->add_option("--manifest", o.manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
    rep->add_option("--out-dir", o.out_dir, "Directory for the re-run")->required();

    // Subcommand-specific defaults that differ from the shared ones.
    bool mtp_tol_default = true;
    bool dich_method_default = true;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        mtp_tol_default = mtp->count("--tol") == 0;
        dich_method_default = dich->count("--method") == 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }
    if (*mtp && mtp_tol_default) o.tol = 1e-10;
    if (*dich && dich_method_default) o.method = "fixed-point";

    Run runrec;
    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    CLI::App* leaf = nullptr;
    try {
        if (*rep) return cmd_replay(o);
        runrec.out_dir = o.out_dir;
        fs::create_directories(runrec.out_dir);
        if (*gen) leaf = gen, code = cmd_generate(o, runrec);
        else if (*val) leaf = val, code = cmd_validate(o, runrec);
        else if (*sol) leaf = sol, code = cmd_solve(o, runrec);
        else if (*lay) leaf = lay, code = cmd_layout(o, runrec);
        else if (*walk) leaf = walk, code = cmd_walk(o, runrec);
        else if (*dich) leaf = dich, code = cmd_dichotomy(o, runrec);
        else if (*ring) leaf = ring, code = cmd_ring(o, runrec);
        else if (*count) leaf = count, code = cmd_count(o, runrec);
        else if (*mtp) leaf = mtp, code = cmd_mtp(o, runrec);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad number: " << e.what() << "\n";
        return kInputError;
    }

    ordered_json m;
    m["tool"] = "icp";
    m["version"] = ICP_VERSION;
    std::string command = leaf->get_name();
    if (leaf->get_parent() && leaf->get_parent() != &app) command = leaf->get_parent()->get_name() + " " + command;
    m["command"] = command;
    m["argv"] = args;
    m["cwd"] = fs::current_path().string();
    m["inputs"] = runrec.inputs;
    ordered_json params = ordered_json::object();
    for (const CLI::Option* opt : leaf->get_options()) {
        if (opt->get_name().empty() || opt->get_name() == "--help" || opt->get_name() == "-h") continue;
        auto res = opt->results();
        std::string key = opt->get_name();
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (!res.empty()) params[key] = res.size() == 1 ? ordered_json(res[0]) : ordered_json(res);
        else if (!opt->get_default_str().empty()) params[key] = opt->get_default_str();
    }
    m["params"] = params;
    m["seed"] = runrec.seed ? ordered_json(*runrec.seed) : ordered_json(nullptr);
    m["rng"] = std::string(CounterRng::kAlgorithm);
    m["out_dir"] = fs::absolute(runrec.out_dir).lexically_normal().string();
    ordered_json outs = ordered_json::array();
    for (const auto& out : runrec.outputs) outs.push_back({{"path", out.name}, {"deterministic", out.deterministic}});
    m["outputs"] = outs;
    m["exit_code"] = code;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_text_file(runrec.out_dir / "manifest.json", m.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return code;
}

}  // namespace icp::cli
