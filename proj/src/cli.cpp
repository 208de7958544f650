#include "gms/cli.hpp"

#include "gms/consistency.hpp"
#include "gms/continuum.hpp"
#include "gms/core.hpp"
#include "gms/datasets.hpp"
#include "gms/energy.hpp"
#include "gms/graph.hpp"
#include "gms/parallel.hpp"
#include "gms/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef GMS_VERSION
#define GMS_VERSION "unknown"
#endif

namespace gms {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::ifstream open_in(const std::string& path, const char* flag) {
    std::ifstream in(path);
    if (!in) throw ValidationError(std::string(flag) + ": cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path, const char* flag) {
    std::ofstream out(path);
    if (!out) throw ValidationError(std::string(flag) + ": cannot write '" + path + "'");
    return out;
}

std::string sibling(const std::string& base, const std::string& suffix) {
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? base.substr(0, dot) : base) + suffix;
}

struct SolverFlags {
    std::string zeta = "ms";
    double lambda = 1.0;
    double eps = 0.1;
    double sigma = 1.0;
    int k = 8;
    double delta = 0.001;
    double cg_tol = 1e-8;
    int cg_max_iter = 0;
    double irls_tol = 1e-6;
    int irls_max_iter = 100;
    double cutoff = 3.0;
    std::uint64_t seed = 0;
    bool sec1 = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--zeta", f.zeta, "Saturation profile")->check(CLI::IsMember({"ms", "tv", "lap"}))->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "Fidelity weight (divides the regularizer)")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--eps", f.eps, "Interaction length scale")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--sigma", f.sigma, "Gaussian kernel width in units of eps")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--k", f.k, "Nearest-neighbor cap per vertex")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--delta", f.delta, "Smoothing of the tv profile")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cg-tol", f.cg_tol, "Relative residual target of each linear solve")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cg-max-iter", f.cg_max_iter, "CG iteration cap (0 = 10 n)")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--irls-tol", f.irls_tol, "Relative energy decrease that stops the sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--irls-max-iter", f.irls_max_iter, "Maximum reweighting sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--cutoff", f.cutoff, "Kernel support in units of sigma * eps")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", f.seed, "Recorded in the manifest")->capture_default_str();
    cmd->add_flag("--sec1", f.sec1, "Report energies as (lambda/n) fidelity + GMS instead of the default scaling");
}

SolverConfig to_config(const SolverFlags& f) {
    SolverConfig c;
    c.lambda = f.lambda;
    c.eps = f.eps;
    c.sigma = f.sigma;
    c.k_max = f.k;
    c.cg_tol = f.cg_tol;
    c.cg_max_iter = f.cg_max_iter;
    c.irls_tol = f.irls_tol;
    c.irls_max_iter = f.irls_max_iter;
    c.seed = f.seed;
    c.cutoff_multiplier = f.cutoff;
    c.validate();
    return c;
}

json config_json(const SolverFlags& f) {
    json j;
    j["zeta"] = f.zeta;
    j["lambda"] = f.lambda;
    j["eps"] = f.eps;
    j["sigma"] = f.sigma;
    j["k"] = f.k;
    j["delta"] = f.delta;
    j["cg_tol"] = f.cg_tol;
    j["cg_max_iter"] = f.cg_max_iter;
    j["irls_tol"] = f.irls_tol;
    j["irls_max_iter"] = f.irls_max_iter;
    j["cutoff"] = f.cutoff;
    j["energy_convention"] = f.sec1 ? "sec1" : "default";
    return j;
}

struct Manifest {
    json doc;
    Clock::time_point start = Clock::now();

    Manifest(const std::string& command, const std::vector<std::string>& args) {
        doc["command"] = command;
        doc["argv"] = args;
        doc["version"] = GMS_VERSION;
        doc["threads"] = num_threads();
        doc["config"] = json::object();
        doc["inputs"] = json::object();
        doc["outputs"] = json::object();
    }

    void write(const std::string& path) {
        doc["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
        auto os = open_out(path, "--manifest");
        os << doc.dump(2) << '\n';
    }
};

std::vector<EnergyRecord> convert_trace(const std::vector<EnergyRecord>& trace, bool sec1, double lambda,
                                        std::size_t n) {
    if (!sec1) return trace;
    // For the quadratic penalty exponent used by the solver both totals differ by lambda / n.
    const double s = lambda / static_cast<double>(n);
    std::vector<EnergyRecord> out = trace;
    for (auto& r : out) {
        r.fidelity *= s;
        r.regularizer *= s;
        r.total *= s;
    }
    return out;
}

struct DenoiseResult {
    Solution solution;
    SparseGraph graph;
};

DenoiseResult denoise(const PointCloud& cloud, const SolverFlags& flags) {
    const SolverConfig config = to_config(flags);
    const ZetaSpec spec = parse_zeta(flags.zeta, flags.delta);
    DenoiseResult r;
    r.graph = build_geometric_graph(cloud, config);
    r.solution = irls_minimize(r.graph, cloud.labels(), spec, config);
    return r;
}

void write_solution_outputs(const DenoiseResult& r, const SolverFlags& flags, const std::string& out_path,
                            const std::string& trace_path, const std::string& graph_path, Manifest& manifest,
                            std::ostream& out, std::ostream& err) {
    {
        auto os = open_out(out_path, "--out");
        write_column_csv(os, "u", r.solution.u);
    }
    {
        auto os = open_out(trace_path, "--trace");
        write_trace_jsonl(os, convert_trace(r.solution.energy_trace, flags.sec1, flags.lambda, r.solution.u.size()));
    }
    manifest.doc["outputs"]["u"] = out_path;
    manifest.doc["outputs"]["trace"] = trace_path;
    if (!graph_path.empty()) {
        auto os = open_out(graph_path, "--graph-out");
        write_edge_list(os, r.graph);
        manifest.doc["outputs"]["graph"] = graph_path;
    }
    const auto& last = r.solution.energy_trace.back();
    const double scale = flags.sec1 ? flags.lambda / static_cast<double>(r.solution.u.size()) : 1.0;
    manifest.doc["result"]["iterations"] = r.solution.iterations;
    manifest.doc["result"]["converged"] = r.solution.converged;
    manifest.doc["result"]["energy"] = last.total * scale;
    manifest.doc["result"]["edges"] = r.graph.num_edges();
    out << "vertices " << r.solution.u.size() << "  edges " << r.graph.num_edges() << '\n';
    out << "iterations " << r.solution.iterations << "  converged " << (r.solution.converged ? "yes" : "no")
        << "  energy " << last.total * scale << '\n';
    if (!r.solution.converged)
        err << "warning: stopped after " << r.solution.iterations << " sweeps without meeting --irls-tol\n";
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size() || !(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ValidationError(std::string(flag) + ": '" + item + "' is not a positive integer");
        }
    }
    if (out.empty()) throw ValidationError(std::string(flag) + ": list is empty");
    return out;
}

struct EdgeRow {
    std::size_t i, j;
};

std::vector<EdgeRow> read_edge_csv(std::istream& is) {
    std::vector<EdgeRow> out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) return out;
    ++line_no;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        try {
            if (fields.size() < 2) throw std::invalid_argument("fields");
            out.push_back({std::stoul(fields[0]), std::stoul(fields[1])});
        } catch (const std::exception&) {
            throw ValidationError("--edges: line " + std::to_string(line_no) + " is not 'i,j,...'");
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void write_svg(std::ostream& os, const PointCloud& pts, const std::vector<double>& values,
               const std::vector<EdgeRow>& edges, double size) {
    const std::size_t n = pts.size();
    double xmin = pts.coord(0, 0), xmax = xmin, ymin = pts.coord(0, 1), ymax = ymin;
    for (std::size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, pts.coord(i, 0));
        xmax = std::max(xmax, pts.coord(i, 0));
        ymin = std::min(ymin, pts.coord(i, 1));
        ymax = std::max(ymax, pts.coord(i, 1));
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double margin = 10.0;
    const double scale = (size - 2.0 * margin) / span;
    auto px = [&](std::size_t i) { return margin + (pts.coord(i, 0) - xmin) * scale; };
    auto py = [&](std::size_t i) { return size - margin - (pts.coord(i, 1) - ymin) * scale; };

    const auto [vmin_it, vmax_it] = std::minmax_element(values.begin(), values.end());
    const double vmin = *vmin_it, vrange = *vmax_it - *vmin_it;
    const double radius = std::clamp(size / (2.0 * std::sqrt(static_cast<double>(n)) + 1.0) * 0.6, 0.6, 6.0);

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(size) << "\" height=\"" << fmt(size)
       << "\" viewBox=\"0 0 " << fmt(size) << ' ' << fmt(size) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(size) << "\" height=\"" << fmt(size) << "\" fill=\"#ffffff\"/>\n";
    os << "<g stroke=\"none\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double t = vrange > 0.0 ? (values[i] - vmin) / vrange : 0.5;
        os << "<circle cx=\"" << fmt(px(i)) << "\" cy=\"" << fmt(py(i)) << "\" r=\"" << fmt(radius) << "\" fill=\""
           << ramp_color(t) << "\"/>\n";
    }
    os << "</g>\n";
    if (!edges.empty()) {
        os << "<g stroke=\"#ff0000\" stroke-width=\"" << fmt(std::max(0.5, radius * 0.5)) << "\">\n";
        for (const auto& e : edges)
            os << "<line x1=\"" << fmt(px(e.i)) << "\" y1=\"" << fmt(py(e.i)) << "\" x2=\"" << fmt(px(e.j))
               << "\" y2=\"" << fmt(py(e.j)) << "\"/>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

const char* version() { return GMS_VERSION; }

std::string ramp_color(double t) {
    static constexpr std::array<std::array<int, 3>, 5> stops{{
        {0x44, 0x01, 0x54}, {0x3b, 0x52, 0x8b}, {0x21, 0x91, 0x8c}, {0x5e, 0xc9, 0x62}, {0xfd, 0xe7, 0x25}}};
    if (!std::isfinite(t)) t = 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double s = t * (stops.size() - 1);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(s), stops.size() - 2);
    const double a = s - static_cast<double>(k);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<int>(std::lround((1.0 - a) * stops[k][c] + a * stops[k + 1][c]));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph Mumford-Shah denoising on point clouds"};
    app.require_subcommand(1);
    app.set_version_flag("--version", GMS_VERSION);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = runtime default)")
        ->envname("GMS_THREADS")
        ->check(CLI::NonNegativeNumber);

    // denoise ---------------------------------------------------------------
    auto* cmd_denoise = app.add_subcommand("denoise", "Minimize the graph energy for labeled points");
    SolverFlags dn;
    std::string dn_input, dn_out = "u.csv", dn_trace, dn_manifest, dn_truth, dn_graph;
    cmd_denoise->add_option("--input", dn_input, "Point CSV x0,...,f")->required();
    add_solver_flags(cmd_denoise, dn);
    cmd_denoise->add_option("--out", dn_out, "Solution CSV")->capture_default_str();
    cmd_denoise->add_option("--trace", dn_trace, "Energy trace JSON lines (default <out>.trace.jsonl)");
    cmd_denoise->add_option("--manifest", dn_manifest, "Run manifest (default <out>.manifest.json)");
    cmd_denoise->add_option("--truth", dn_truth, "Ground-truth column CSV; reports the L1 error");
    cmd_denoise->add_option("--graph-out", dn_graph, "Write the graph as an edge list");

    // edges -----------------------------------------------------------------
    auto* cmd_edges = app.add_subcommand("edges", "List graph edges whose jump exceeds a threshold");
    std::string ed_solution, ed_graph, ed_out = "edges.csv", ed_manifest;
    double ed_jump = 0.075;
    cmd_edges->add_option("--solution", ed_solution, "Solution CSV")->required();
    cmd_edges->add_option("--graph", ed_graph, "Edge list written by denoise --graph-out")->required();
    cmd_edges->add_option("--jump", ed_jump, "Threshold on |u_i - u_j|")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_edges->add_option("--out", ed_out, "Edge CSV i,j,jump")->capture_default_str();
    cmd_edges->add_option("--manifest", ed_manifest, "Run manifest (default <out>.manifest.json)");

    // synth -----------------------------------------------------------------
    auto* cmd_synth = app.add_subcommand("synth", "Sample the piecewise-linear benchmark");
    std::size_t sy_n = 10000;
    double sy_noise = 0.2;
    std::uint64_t sy_seed = 1;
    std::string sy_out = "points.csv", sy_truth, sy_manifest;
    cmd_synth->add_option("--n", sy_n, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_synth->add_option("--noise", sy_noise, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_synth->add_option("--seed", sy_seed, "Random seed")->capture_default_str();
    cmd_synth->add_option("--out", sy_out, "Point CSV")->capture_default_str();
    cmd_synth->add_option("--truth", sy_truth, "Ground-truth CSV (default <out>.truth.csv)");
    cmd_synth->add_option("--manifest", sy_manifest, "Run manifest (default <out>.manifest.json)");

    // gamma -----------------------------------------------------------------
    auto* cmd_gamma = app.add_subcommand("gamma", "Compare discrete and continuum energies along n");
    std::string gm_case = "smooth", gm_n = "1000,4000,16000", gm_out = "gamma.csv", gm_manifest, gm_zeta = "ms";
    int gm_d = 2, gm_seeds = 1;
    std::uint64_t gm_seed = 0;
    double gm_scale = 0.7, gm_exponent = -0.25, gm_p = 2.0, gm_q = 0.0, gm_delta = 0.001;
    GammaOptions gm_opts;
    cmd_gamma->add_option("--case", gm_case, "Test function")->check(CLI::IsMember({"smooth", "step"}))->capture_default_str();
    cmd_gamma->add_option("--n", gm_n, "Comma-separated sample sizes")->capture_default_str();
    cmd_gamma->add_option("--d", gm_d, "Dimension")->check(CLI::Range(1, 3))->capture_default_str();
    cmd_gamma->add_option("--seed", gm_seed, "First seed")->capture_default_str();
    cmd_gamma->add_option("--seeds", gm_seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gamma->add_option("--eps-scale", gm_scale, "eps = scale * n^exponent")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gamma->add_option("--eps-exponent", gm_exponent, "eps = scale * n^exponent")->capture_default_str();
    cmd_gamma->add_option("--kernel-sigma", gm_opts.kernel_sigma, "Gaussian width of eta")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gamma->add_option("--cutoff", gm_opts.cutoff, "Kernel support in units of the kernel width")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gamma->add_option("--zeta", gm_zeta, "Saturation profile")->check(CLI::IsMember({"ms", "tv", "lap", "truncated"}))->capture_default_str();
    cmd_gamma->add_option("--delta", gm_delta, "Smoothing of the tv profile")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gamma->add_option("--p", gm_p, "Difference exponent")->capture_default_str();
    cmd_gamma->add_option("--q", gm_q, "Distance exponent")->capture_default_str();
    cmd_gamma->add_option("--out", gm_out, "Result CSV")->capture_default_str();
    cmd_gamma->add_option("--manifest", gm_manifest, "Run manifest (default <out>.manifest.json)");

    // noise -----------------------------------------------------------------
    auto* cmd_noise = app.add_subcommand("noise", "Mean discrete fidelity under bounded noise");
    std::size_t nz_n = 10000, nz_trials = 100;
    double nz_offset = 0.0, nz_halfwidth = 1.0;
    std::uint64_t nz_seed = 0;
    std::string nz_out = "noise.json";
    cmd_noise->add_option("--n", nz_n, "Samples per trial")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_noise->add_option("--trials", nz_trials, "Number of trials")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_noise->add_option("--offset", nz_offset, "Constant u - f")->capture_default_str();
    cmd_noise->add_option("--halfwidth", nz_halfwidth, "Noise is uniform on [-a, a]")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_noise->add_option("--seed", nz_seed, "Random seed")->capture_default_str();
    cmd_noise->add_option("--out", nz_out, "Result JSON (manifest included)")->capture_default_str();

    // consistency -----------------------------------------------------------
    auto* cmd_cons = app.add_subcommand("consistency", "Binning deviation curve or dyadic spike sequence");
    std::string cs_experiment = "binning", cs_n = "1000,10000,100000,1000000", cs_k = "3,4,5", cs_out, cs_manifest;
    std::uint64_t cs_seed = 0;
    double cs_b = 0.5, cs_alpha = 0.7;
    int cs_d = 0;
    CounterexampleOptions cs_opts;
    cmd_cons->add_option("--experiment", cs_experiment, "binning or dyadic")->check(CLI::IsMember({"binning", "dyadic"}))->capture_default_str();
    cmd_cons->add_option("--n", cs_n, "Sample sizes (binning)")->capture_default_str();
    cmd_cons->add_option("--seed", cs_seed, "Random seed (binning)")->capture_default_str();
    cmd_cons->add_option("--b-exponent", cs_b, "b_n = (ln n)^b (binning)")->capture_default_str();
    cmd_cons->add_option("--k", cs_k, "Dyadic levels (dyadic)")->capture_default_str();
    cmd_cons->add_option("--alpha", cs_alpha, "eps_k = 2^{-k alpha} (dyadic)")->capture_default_str();
    cmd_cons->add_option("--d", cs_d, "Dimension (default 2 for binning, 3 for dyadic)")->check(CLI::PositiveNumber);
    cmd_cons->add_option("--kernel-sigma", cs_opts.kernel_sigma, "Gaussian width of eta (dyadic)")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_cons->add_option("--out", cs_out, "CSV for binning, JSON lines for dyadic");
    cmd_cons->add_option("--manifest", cs_manifest, "Run manifest (default <out>.manifest.json)");

    // housing ---------------------------------------------------------------
    auto* cmd_housing = app.add_subcommand("housing", "Ingest housing records and denoise price per square foot");
    SolverFlags hs;
    hs.eps = 0.04;
    hs.lambda = 14.0;
    hs.sigma = 1.0;
    hs.k = 15;
    HousingOptions hs_opts;
    bool hs_raw = false;
    std::string hs_input, hs_out = "housing_u.csv", hs_points, hs_trace, hs_manifest, hs_graph;
    cmd_housing->add_option("--input", hs_input, "Housing CSV with long, lat, price, sqft_living")->required();
    cmd_housing->add_option("--max-longitude", hs_opts.max_longitude, "Drop rows east of this longitude")->capture_default_str();
    cmd_housing->add_flag("--raw-labels", hs_raw, "Keep price per square foot unnormalized");
    cmd_housing->add_flag("--rescale", hs_opts.rescale, "Equirectangular rescale of positions");
    add_solver_flags(cmd_housing, hs);
    cmd_housing->add_option("--out", hs_out, "Solution CSV")->capture_default_str();
    cmd_housing->add_option("--points-out", hs_points, "Ingested point CSV (default <out>.points.csv)");
    cmd_housing->add_option("--trace", hs_trace, "Energy trace (default <out>.trace.jsonl)");
    cmd_housing->add_option("--manifest", hs_manifest, "Run manifest (default <out>.manifest.json)");
    cmd_housing->add_option("--graph-out", hs_graph, "Write the graph as an edge list");

    // plot ------------------------------------------------------------------
    auto* cmd_plot = app.add_subcommand("plot", "SVG scatter of values with flagged edges in red");
    std::string pl_points, pl_values, pl_edges, pl_out = "plot.svg";
    double pl_size = 600.0;
    cmd_plot->add_option("--points", pl_points, "Point CSV x0,x1,...,f")->required();
    cmd_plot->add_option("--values", pl_values, "Column CSV of values (default: the labels)");
    cmd_plot->add_option("--edges", pl_edges, "Edge CSV i,j,jump drawn in red");
    cmd_plot->add_option("--out", pl_out, "SVG file")->capture_default_str();
    cmd_plot->add_option("--size", pl_size, "Canvas side in pixels")->check(CLI::PositiveNumber)->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    set_num_threads(threads);
    try {
        if (cmd_denoise->parsed()) {
            Manifest manifest("denoise", args);
            auto in = open_in(dn_input, "--input");
            const PointCloud cloud = read_point_csv(in);
            const auto result = denoise(cloud, dn);
            manifest.doc["config"] = config_json(dn);
            manifest.doc["seed"] = dn.seed;
            manifest.doc["inputs"]["points"] = dn_input;
            write_solution_outputs(result, dn, dn_out, dn_trace.empty() ? sibling(dn_out, ".trace.jsonl") : dn_trace,
                                   dn_graph, manifest, out, err);
            if (!dn_truth.empty()) {
                auto tin = open_in(dn_truth, "--truth");
                const auto truth = read_column_csv(tin);
                if (truth.size() != cloud.size())
                    throw ValidationError("--truth: " + std::to_string(truth.size()) + " values for " +
                                          std::to_string(cloud.size()) + " points");
                const double l1 = l1_error(result.solution.u, truth);
                manifest.doc["inputs"]["truth"] = dn_truth;
                manifest.doc["result"]["l1_error"] = l1;
                out << "l1_error " << l1 << '\n';
            }
            manifest.write(dn_manifest.empty() ? sibling(dn_out, ".manifest.json") : dn_manifest);
        } else if (cmd_edges->parsed()) {
            Manifest manifest("edges", args);
            auto sin = open_in(ed_solution, "--solution");
            const auto u = read_column_csv(sin);
            auto gin = open_in(ed_graph, "--graph");
            const SparseGraph graph = read_edge_list(gin);
            if (u.size() != graph.num_vertices())
                throw ValidationError("--solution: " + std::to_string(u.size()) + " values but --graph has " +
                                      std::to_string(graph.num_vertices()) + " vertices");
            const auto flagged = detect_edges(graph, u, ed_jump);
            {
                auto os = open_out(ed_out, "--out");
                os << "i,j,jump\n";
                os.precision(17);
                for (const auto& e : flagged) os << e.i << ',' << e.j << ',' << e.jump << '\n';
            }
            manifest.doc["config"]["jump"] = ed_jump;
            manifest.doc["inputs"]["solution"] = ed_solution;
            manifest.doc["inputs"]["graph"] = ed_graph;
            manifest.doc["outputs"]["edges"] = ed_out;
            manifest.doc["result"]["flagged"] = flagged.size();
            out << "flagged " << flagged.size() << " of " << graph.num_edges() << " edges\n";
            manifest.write(ed_manifest.empty() ? sibling(ed_out, ".manifest.json") : ed_manifest);
        } else if (cmd_synth->parsed()) {
            Manifest manifest("synth", args);
            const auto data = generate_synthetic(sy_n, sy_noise, sy_seed);
            const std::string truth_path = sy_truth.empty() ? sibling(sy_out, ".truth.csv") : sy_truth;
            {
                auto os = open_out(sy_out, "--out");
                write_point_csv(os, data.cloud);
            }
            {
                auto os = open_out(truth_path, "--truth");
                write_column_csv(os, "truth", data.truth);
            }
            manifest.doc["config"]["n"] = sy_n;
            manifest.doc["config"]["noise_std"] = sy_noise;
            manifest.doc["seed"] = sy_seed;
            manifest.doc["outputs"]["points"] = sy_out;
            manifest.doc["outputs"]["truth"] = truth_path;
            out << "wrote " << sy_n << " points to " << sy_out << '\n';
            manifest.write(sy_manifest.empty() ? sibling(sy_out, ".manifest.json") : sy_manifest);
        } else if (cmd_gamma->parsed()) {
            Manifest manifest("gamma", args);
            const auto n_list = parse_size_list(gm_n, "--n");
            const TestCase tc = gm_case == "smooth" ? TestCase::smooth(gm_d) : TestCase::step(gm_d);
            const ZetaSpec spec = parse_zeta(gm_zeta, gm_delta);
            const EpsRule rule{gm_scale, gm_exponent};
            std::vector<GammaRow> rows;
            for (int s = 0; s < gm_seeds; ++s) {
                auto part = gamma_experiment(tc, n_list, rule, spec, gm_p, gm_q, gm_seed + static_cast<std::uint64_t>(s), gm_opts);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            {
                auto os = open_out(gm_out, "--out");
                write_gamma_csv(os, rows);
            }
            for (std::size_t n : n_list) {
                std::vector<double> ratios;
                for (const auto& r : rows)
                    if (r.n == n) ratios.push_back(r.ratio);
                out << "n " << n << "  median ratio " << median(ratios) << '\n';
            }
            manifest.doc["config"] = {{"case", gm_case},        {"n", n_list},          {"d", gm_d},
                                      {"eps_scale", gm_scale},   {"eps_exponent", gm_exponent},
                                      {"kernel_sigma", gm_opts.kernel_sigma}, {"cutoff", gm_opts.cutoff},
                                      {"zeta", gm_zeta},         {"p", gm_p},            {"q", gm_q},
                                      {"seeds", gm_seeds}};
            manifest.doc["seed"] = gm_seed;
            manifest.doc["outputs"]["table"] = gm_out;
            manifest.write(gm_manifest.empty() ? sibling(gm_out, ".manifest.json") : gm_manifest);
        } else if (cmd_noise->parsed()) {
            Manifest manifest("noise", args);
            const auto res = noise_offset_experiment(TestCase::noisy_fidelity(2, nz_offset, nz_halfwidth), nz_n,
                                                     nz_trials, nz_seed);
            manifest.doc["config"] = {{"n", nz_n}, {"trials", nz_trials}, {"offset", nz_offset}, {"halfwidth", nz_halfwidth}};
            manifest.doc["seed"] = nz_seed;
            manifest.doc["result"] = {{"mean", res.mean},
                                      {"standard_error", res.standard_error},
                                      {"expected", res.expected},
                                      {"samples", res.samples}};
            out << "mean " << res.mean << "  expected " << res.expected << "  standard error " << res.standard_error
                << '\n';
            manifest.doc["outputs"]["result"] = nz_out;
            manifest.write(nz_out);
        } else if (cmd_cons->parsed()) {
            Manifest manifest("consistency", args);
            if (cs_experiment == "binning") {
                DeviationOptions opts;
                opts.d = cs_d > 0 ? cs_d : 2;
                opts.b_exponent = cs_b;
                const auto rows = density_deviation_curve(parse_size_list(cs_n, "--n"), cs_seed, opts);
                const std::string path = cs_out.empty() ? "binning.csv" : cs_out;
                {
                    auto os = open_out(path, "--out");
                    write_deviation_csv(os, rows);
                }
                for (const auto& r : rows)
                    out << "n " << r.n << "  m " << r.boxes_per_axis << "  sup_dev " << r.sup_deviation
                        << "  ell/eps " << r.ell_over_eps << '\n';
                manifest.doc["config"] = {{"experiment", "binning"}, {"d", opts.d}, {"b_exponent", cs_b}};
                manifest.doc["seed"] = cs_seed;
                manifest.doc["outputs"]["table"] = path;
                manifest.write(cs_manifest.empty() ? sibling(path, ".manifest.json") : cs_manifest);
            } else {
                const int d = cs_d > 0 ? cs_d : 3;
                const std::string path = cs_out.empty() ? "dyadic.jsonl" : cs_out;
                auto os = open_out(path, "--out");
                for (std::size_t k : parse_size_list(cs_k, "--k")) {
                    const auto r = dyadic_counterexample(static_cast<int>(k), cs_alpha, d, cs_opts);
                    write_counterexample_json(os, r);
                    out << "k " << r.k << "  l1 " << r.l1 << "  energy " << r.energy << "  max_u " << r.max_u << '\n';
                }
                manifest.doc["config"] = {{"experiment", "dyadic"}, {"d", d}, {"alpha", cs_alpha},
                                          {"kernel_sigma", cs_opts.kernel_sigma}};
                manifest.doc["outputs"]["results"] = path;
                manifest.write(cs_manifest.empty() ? sibling(path, ".manifest.json") : cs_manifest);
            }
        } else if (cmd_housing->parsed()) {
            Manifest manifest("housing", args);
            hs_opts.normalize = !hs_raw;
            const HousingData data = ingest_housing(hs_input, hs_opts);
            out << "records " << data.records.size() << "  (read " << data.rows_read << ", dropped "
                << data.dropped_longitude << " by longitude, " << data.dropped_sqft << " without square footage)\n";
            const std::string points_path = hs_points.empty() ? sibling(hs_out, ".points.csv") : hs_points;
            {
                auto os = open_out(points_path, "--points-out");
                write_point_csv(os, data.cloud);
            }
            const auto result = denoise(data.cloud, hs);
            manifest.doc["config"] = config_json(hs);
            manifest.doc["config"]["max_longitude"] = hs_opts.max_longitude;
            manifest.doc["config"]["normalize"] = hs_opts.normalize;
            manifest.doc["config"]["rescale"] = hs_opts.rescale;
            manifest.doc["seed"] = hs.seed;
            manifest.doc["inputs"]["csv"] = hs_input;
            manifest.doc["outputs"]["points"] = points_path;
            manifest.doc["result"]["records"] = data.records.size();
            manifest.doc["result"]["max_price_per_sqft"] = data.max_price_per_sqft;
            write_solution_outputs(result, hs, hs_out, hs_trace.empty() ? sibling(hs_out, ".trace.jsonl") : hs_trace,
                                   hs_graph, manifest, out, err);
            manifest.write(hs_manifest.empty() ? sibling(hs_out, ".manifest.json") : hs_manifest);
        } else if (cmd_plot->parsed()) {
            auto pin = open_in(pl_points, "--points");
            const PointCloud pts = read_point_csv(pin);
            if (pts.dim() < 2) throw ValidationError("--points: need at least two coordinates");
            std::vector<double> values = pts.labels();
            if (!pl_values.empty()) {
                auto vin = open_in(pl_values, "--values");
                values = read_column_csv(vin);
                if (values.size() != pts.size())
                    throw ValidationError("--values: " + std::to_string(values.size()) + " values for " +
                                          std::to_string(pts.size()) + " points");
            }
            std::vector<EdgeRow> edges;
            if (!pl_edges.empty()) {
                auto ein = open_in(pl_edges, "--edges");
                edges = read_edge_csv(ein);
                for (const auto& e : edges)
                    if (e.i >= pts.size() || e.j >= pts.size())
                        throw ValidationError("--edges: vertex index beyond the point count");
            }
            auto os = open_out(pl_out, "--out");
            write_svg(os, pts, values, edges, pl_size);
            out << "wrote " << pl_out << '\n';
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace gms
