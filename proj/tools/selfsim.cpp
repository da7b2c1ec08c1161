// selfsim: exact analysis of simple random walks on symmetrically self-similar
// graphs, from a finite cell-graph description.

#include "CLI11.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "selfsim/asymptotics.hpp"
#include "selfsim/blowup.hpp"
#include "selfsim/dynamics.hpp"
#include "selfsim/fixtures.hpp"
#include "selfsim/greens.hpp"
#include "selfsim/jsonio.hpp"
#include "selfsim/oracle.hpp"
#include "selfsim/walkfn.hpp"

namespace fs = std::filesystem;
using namespace selfsim;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------- plumbing ----------

uint64_t fnv64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Options {
    mpfr_prec_t precision = 256;
    uint64_t seed = 0;
    int levels = 3;
    int ncoeffs = -1;
    int fourier_k = 8;
    int samples = 64;
    int shift = 12;
    int threads = 1;
    int digits = 15;
    bool json = false;
    std::string out_dir;
};

struct RunManifest {
    std::string command_line;
    std::vector<std::pair<std::string, uint64_t>> inputs;  // label, digest
    Options opts;
    double wall_ms = 0.0;
    std::vector<std::pair<std::string, uint64_t>> outputs; // file, digest
};

// Sink: stdout by default, files under --out with a manifest alongside.
struct Sink {
    const Options& opts;
    RunManifest& manifest;

    void emit(const std::string& name, const std::string& content) {
        if (opts.out_dir.empty()) {
            std::fwrite(content.data(), 1, content.size(), stdout);
            return;
        }
        fs::create_directories(opts.out_dir);
        fs::path p = fs::path(opts.out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw ParseError("cannot write " + p.string());
        f << content;
        manifest.outputs.emplace_back(name, fnv64(content));
    }

    void finish() {
        if (opts.out_dir.empty()) return;
        json j;
        j["command_line"] = manifest.command_line;
        j["version"] = kVersion;
        j["precision"] = static_cast<long>(manifest.opts.precision);
        j["seed"] = manifest.opts.seed;
        j["threads"] = manifest.opts.threads;
        j["digits"] = manifest.opts.digits;
        j["wall_clock_ms"] = manifest.wall_ms;
        j["inputs"] = json::array();
        for (auto& [label, dig] : manifest.inputs)
            j["inputs"].push_back({{"name", label}, {"fnv64", dig}});
        j["outputs"] = json::array();
        for (auto& [name, dig] : manifest.outputs)
            j["outputs"].push_back({{"name", name}, {"fnv64", dig}});
        std::ofstream f(fs::path(opts.out_dir) / "manifest.json", std::ios::binary);
        f << j.dump(2) << "\n";
    }
};

std::string read_input(const std::string& path, RunManifest& manifest) {
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
        manifest.inputs.emplace_back("<stdin>", fnv64(text));
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw ParseError("cannot open input: " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
        manifest.inputs.emplace_back(path, fnv64(text));
    }
    return text;
}

CellGraph load_input_cell(const std::string& path, RunManifest& manifest) {
    return load_cell_any(read_input(path, manifest));
}

int default_base_clique(const CellGraph& g) {
    for (int i = 0; i < g.mu(); ++i) {
        int hits = 0;
        for (int v : g.cliques[i])
            if (g.is_boundary(v)) ++hits;
        if (hits == 1) return i;
    }
    return 0;
}

// one analysis bundle reused by several subcommands
struct Analysis {
    CellGraph cell;
    AxiomReport report;
    WalkFunctions wf;
    ScalingParams sp;
};

Analysis analyze_cell(CellGraph cell) {
    Analysis a{std::move(cell), {}, {}, {}};
    a.report = verify_symmetry(a.cell);
    if (!a.report.passed) {
        std::string msg = "cell fails the symmetry axioms:";
        for (auto& [code, text] : a.report.failures) msg += " [" + code + "] " + text;
        throw AxiomError(msg);
    }
    a.wf = transition_return_functions(a.cell);
    a.sp = scaling_parameters(a.cell, a.wf);
    return a;
}

json analysis_to_json(const Analysis& a, int digits) {
    json j;
    j["cell"] = cell_to_json(a.cell);
    j["theta"] = a.sp.theta;
    j["mu"] = a.sp.mu;
    j["beta"] = a.sp.beta;
    j["bipartite"] = a.report.bipartite;
    j["doubly_transitive"] = a.report.doubly_transitive;
    j["d"] = a.wf.transition.to_string();
    j["f"] = a.wf.return_fn.to_string();
    j["u"] = a.wf.first_return_avoiding.to_string();
    j["u_hat"] = a.wf.first_return.to_string();
    j["tau"] = rat_to_string(a.sp.tau);
    j["rho"] = rat_to_string(a.sp.rho);
    j["spectral_dimension"] = fmt_double(a.sp.spectral_dim, digits);
    j["alpha"] = fmt_double(a.sp.alpha, digits);
    return j;
}

Rat parse_rat_or_decimal(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return rat_from_string(s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac = s.size() - dot - 1;
    Rat r = rat_from_string(digits);
    Rat scale(1);
    for (size_t i = 0; i < frac; ++i) scale *= 10;
    return r / scale;
}

// ---------- subcommand bodies ----------

int cmd_fixtures(const std::string& family, const std::vector<int>& params, const Options& opts,
                 Sink& sink) {
    auto render = [&](const CellGraph& g) {
        return opts.json ? cell_to_json(g).dump(2) + "\n" : cell_to_format(g);
    };
    std::string text;
    if (family == "line") {
        if (params.size() != 1) throw ParseError("usage: fixtures line <n>");
        text = render(fixtures::line(params[0]));
    } else if (family == "flake") {
        if (params.size() != 1) throw ParseError("usage: fixtures flake <n>");
        text = render(fixtures::flake(params[0]));
    } else if (family == "sierpinski") {
        if (params.size() != 2) throw ParseError("usage: fixtures sierpinski <D> <L>");
        text = render(fixtures::sierpinski(params[0], params[1]));
    } else if (family == "bad-boundary") {
        text = fixtures::bad_adjacent_boundary();
    } else if (family == "bad-transitivity") {
        text = fixtures::bad_not_transitive();
    } else if (family == "bad-cover") {
        text = fixtures::bad_no_clique_cover();
    } else if (family == "bad-interior") {
        text = fixtures::bad_disconnected_interior();
    } else {
        throw ParseError("unknown fixture family: " + family);
    }
    sink.emit(opts.json ? "cell.json" : "cell.txt", text);
    return 0;
}

int cmd_analyze(const std::string& input, const Options& opts, Sink& sink,
                RunManifest& manifest) {
    Analysis a = analyze_cell(load_input_cell(input, manifest));
    if (opts.json) {
        sink.emit("analysis.json", analysis_to_json(a, opts.digits).dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "cell: " << a.cell.n << " vertices, " << a.cell.edges.size() << " edges\n";
    os << "theta " << a.sp.theta << "  mu " << a.sp.mu << "  beta " << a.sp.beta
       << "  bipartite " << (a.report.bipartite ? "yes" : "no") << "  doubly-transitive "
       << (a.report.doubly_transitive ? "yes" : "no") << "\n";
    os << "d(z)     = " << a.wf.transition.to_string() << "\n";
    os << "f(z)     = " << a.wf.return_fn.to_string() << "\n";
    os << "u(z)     = " << a.wf.first_return_avoiding.to_string() << "\n";
    os << "u_hat(z) = " << a.wf.first_return.to_string() << "\n";
    os << "tau = " << rat_to_string(a.sp.tau) << "  rho = " << rat_to_string(a.sp.rho)
       << "  d_s = " << fmt_double(a.sp.spectral_dim, opts.digits)
       << "  alpha = " << fmt_double(a.sp.alpha, opts.digits) << "\n";
    sink.emit("analysis.txt", os.str());
    return 0;
}

int cmd_blowup(const std::string& input, int base_1based, const std::string& format, bool summary,
               const Options& opts, Sink& sink, RunManifest& manifest) {
    CellGraph cell = load_input_cell(input, manifest);
    int base = base_1based > 0 ? base_1based - 1 : default_base_clique(cell);
    BlowupGraph b = blow_up(cell, base, opts.levels);
    if (summary) {
        json j;
        j["levels"] = b.levels;
        j["vertices"] = b.n_vertices;
        j["edges"] = static_cast<long>(b.edge_list(cell).size());
        j["cells"] = static_cast<long>(b.n_cells());
        j["base_clique"] = b.base_clique_index + 1;
        j["origin"] = b.origin >= 0 ? json(b.origin) : json(nullptr);
        if (b.origin >= 0) j["safe_ball_radius"] = safe_ball_radius(b, cell);
        sink.emit("blowup_summary.json", j.dump(2) + "\n");
        return 0;
    }
    GraphFormat fmt;
    std::string name;
    if (format == "edge-list") {
        fmt = GraphFormat::EdgeList;
        name = "blowup_edges.txt";
    } else if (format == "cell") {
        fmt = GraphFormat::CellFormat;
        name = "blowup_cell.txt";
    } else if (format == "json") {
        fmt = GraphFormat::AdjacencyJson;
        name = "blowup.json";
    } else {
        throw ParseError("unknown blow-up format: " + format);
    }
    sink.emit(name, export_graph(b, cell, fmt));
    return 0;
}

int cmd_coeffs(const std::string& input, const std::string& mode, const Options& opts, Sink& sink,
               RunManifest& manifest) {
    Analysis a = analyze_cell(load_input_cell(input, manifest));
    int n = opts.ncoeffs > 0 ? opts.ncoeffs : 64;
    std::ostringstream os;
    os << "n,p_n\n";
    if (mode == "exact") {
        GreenSeries gs = green_coefficients(a.wf, n, CoeffMode::Exact);
        for (int k = 0; k <= n; ++k) os << k << "," << rat_to_string(gs.exact[k]) << "\n";
    } else if (mode == "float") {
        GreenSeries gs = green_coefficients(a.wf, n, CoeffMode::Float, opts.precision);
        for (int k = 0; k <= n; ++k)
            os << k << "," << fmt_double(gs.values[k], opts.digits) << "\n";
    } else {
        throw ParseError("mode must be exact or float");
    }
    sink.emit("coeffs.csv", os.str());
    return 0;
}

int cmd_green(const std::string& input, const std::string& at, const std::string& imag,
              const Options& opts, Sink& sink, RunManifest& manifest) {
    Analysis a = analyze_cell(load_input_cell(input, manifest));
    Rat zr = parse_rat_or_decimal(at);
    Rat zi = imag.empty() ? Rat(0) : parse_rat_or_decimal(imag);
    Cplx z(Real(zr, opts.precision), Real(zi, opts.precision));
    GreenValue v = green_product(a.wf, z, opts.precision);
    if (opts.json) {
        json j;
        j["z"] = {{"re", rat_to_string(zr)}, {"im", rat_to_string(zi)}};
        j["value"] = {{"re", v.value.re.to_string(opts.digits)},
                      {"im", v.value.im.to_string(opts.digits)}};
        j["error_bound"] = fmt_double(v.error_bound, 3);
        j["factors"] = v.factors;
        sink.emit("green.json", j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "G(" << rat_to_string(zr);
        if (zi != 0) os << (zi > 0 ? "+" : "") << rat_to_string(zi) << "i";
        os << ") = " << v.value.re.to_string(opts.digits);
        double imd = v.value.im.to_double();
        if (imd != 0.0 || zi != 0) os << " + " << v.value.im.to_string(opts.digits) << " i";
        os << "   (error <= " << fmt_double(v.error_bound, 3) << ", " << v.factors
           << " factors)\n";
        sink.emit("green.txt", os.str());
    }
    return 0;
}

int cmd_julia(const std::string& input, int depth, int probes, const Options& opts, Sink& sink,
              RunManifest& manifest) {
    Analysis a = analyze_cell(load_input_cell(input, manifest));
    JuliaOptions jopt;
    jopt.backward_depth = depth;
    jopt.probes_per_gap = probes;
    JuliaVerdict v = julia_classify(a.wf.transition, jopt);
    json j;
    j["kind"] = v.kind == JuliaKind::Interval ? "Interval"
                : v.kind == JuliaKind::Cantor ? "Cantor"
                                              : "Unknown";
    j["notes"] = v.notes;
    if (v.witness) {
        j["witness"] = {{"z0", rat_to_string(v.witness->z0)},
                        {"steps", v.witness->steps},
                        {"value", rat_to_string(v.witness->value)}};
    }
    j["markers"] = json::array();
    for (const auto& m : v.markers) {
        json mj;
        mj["level"] = m.level;
        if (m.at_infinity)
            mj["at"] = "infinity";
        else if (m.exact)
            mj["at"] = rat_to_string(*m.exact);
        else
            mj["bracket"] = {rat_to_string(m.lo), rat_to_string(m.hi)};
        j["markers"].push_back(mj);
    }
    j["preimage_chain"] = json::array();
    for (const Real& r : v.preimage_chain) j["preimage_chain"].push_back(r.to_string(opts.digits));
    if (opts.json) {
        sink.emit("julia.json", j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "julia set: " << j["kind"].get<std::string>() << "\n";
    if (v.witness)
        os << "witness: z0 = " << rat_to_string(v.witness->z0) << ", d^" << v.witness->steps
           << "(z0) = " << rat_to_string(v.witness->value) << " inside (-1,1)\n";
    os << "backward iterates of 1 above 1:";
    if (v.markers.empty()) os << " none found";
    for (const auto& m : v.markers) {
        if (m.at_infinity)
            os << " infinity(level " << m.level << ")";
        else if (m.exact)
            os << " " << rat_to_string(*m.exact) << "(level " << m.level << ")";
        else
            os << " [" << rat_to_string(m.lo) << "," << rat_to_string(m.hi) << "](level "
               << m.level << ")";
    }
    os << "\n" << v.notes << "\n";
    sink.emit("julia.txt", os.str());
    return 0;
}

int cmd_asymptotics(const std::string& input, const Options& opts, Sink& sink,
                    RunManifest& manifest) {
    Analysis a = analyze_cell(load_input_cell(input, manifest));
    int n = opts.ncoeffs > 0 ? opts.ncoeffs : 4096;
    OmegaProfile prof =
        h_and_omega(a.wf, a.sp, opts.samples, opts.shift, opts.precision, opts.threads);
    AsymptoticProfile ap = fourier_omega(prof, a.sp, opts.fourier_k);
    sigma_from_omega(ap);
    GreenSeries gs = green_coefficients(a.wf, n, CoeffMode::Float,
                                        std::min<mpfr_prec_t>(opts.precision, 53));
    int fit_lo = std::min(64, std::max(2, n / 4));
    ResidualTable table = asymptotic_fit(gs, ap, fit_lo, n);

    const int digits = opts.digits;
    {
        std::ostringstream os;
        os << "k,re,im,abs\n";
        for (int k = -opts.fourier_k; k <= opts.fourier_k; ++k) {
            auto w = ap.omega_at(k);
            os << k << "," << fmt_double(w.real(), digits) << "," << fmt_double(w.imag(), digits)
               << "," << fmt_double(std::abs(w), digits) << "\n";
        }
        sink.emit("omega_hat.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "k,re,im,abs\n";
        for (int k = -opts.fourier_k; k <= opts.fourier_k; ++k) {
            auto s = ap.sigma_at(k);
            os << k << "," << fmt_double(s.real(), digits) << "," << fmt_double(s.imag(), digits)
               << "," << fmt_double(std::abs(s), digits) << "\n";
        }
        sink.emit("sigma_hat.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "t,sigma\n";
        const int grid = 256;
        for (int i = 0; i < grid; ++i) {
            double t = static_cast<double>(i) / grid;
            os << fmt_double(t, digits) << "," << fmt_double(ap.sigma(t), digits) << "\n";
        }
        sink.emit("sigma_samples.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "n,p_n,fitted,residual\n";
        for (const auto& row : table.rows)
            os << row.n << "," << fmt_double(row.p_n, digits) << ","
               << fmt_double(row.fitted, digits) << "," << fmt_double(row.residual, digits)
               << "\n";
        sink.emit("residuals.csv", os.str());
    }
    {
        json j;
        j["theta"] = a.sp.theta;
        j["mu"] = a.sp.mu;
        j["beta"] = a.sp.beta;
        j["tau"] = rat_to_string(a.sp.tau);
        j["rho"] = rat_to_string(a.sp.rho);
        j["spectral_dimension"] = fmt_double(ap.d_s, digits);
        j["bipartite"] = ap.bipartite;
        j["samples"] = prof.samples;
        j["shift"] = prof.shift;
        j["precision"] = static_cast<long>(prof.precision);
        j["fourier_k"] = ap.fourier_k;
        j["k_effective"] = ap.k_effective;
        j["strip_half_width"] = fmt_double(ap.strip_half_width, digits);
        j["error_budget"] = {{"sample_error", fmt_double(ap.sample_error, 6)},
                             {"aliasing", fmt_double(ap.aliasing_bound, 6)},
                             {"dft_roundoff", fmt_double(ap.dft_roundoff, 6)},
                             {"gamma", fmt_double(ap.gamma_error, 6)},
                             {"omega_total", fmt_double(ap.error_budget(), 6)},
                             {"sigma_transfer", fmt_double(ap.sigma_transfer_error, 6)},
                             {"fourier_tail", fmt_double(ap.fourier_tail, 6)},
                             {"sigma_total", fmt_double(ap.sigma_budget(), 6)}};
        j["omega_hat_1_abs"] = fmt_double(std::abs(ap.omega_at(1)), digits);
        j["residual_decay_exponent"] = fmt_double(table.decay_exponent, digits);
        j["residual_windows"] = json::array();
        for (const auto& w : table.windows)
            j["residual_windows"].push_back(
                {{"lo", w.lo}, {"hi", w.hi}, {"max", fmt_double(w.max_residual, digits)}});
        sink.emit("summary.json", j.dump(2) + "\n");
    }
    return 0;
}

int cmd_oracle_hit(const std::string& input, int start, long trials, const Options& opts,
                   Sink& sink, RunManifest& manifest) {
    CellGraph cell = load_input_cell(input, manifest);
    if (start < 0) start = cell.boundary[0];
    FirstHitStats st = monte_carlo_first_hit(cell, start, trials, opts.seed, opts.threads);
    std::ostringstream os;
    os << "t,count,pmf,se\n";
    for (auto [t, c] : st.hit_time_counts)
        os << t << "," << c << "," << fmt_double(st.pmf(t), opts.digits) << ","
           << fmt_double(st.pmf_se(t), 6) << "\n";
    os << "# trials," << st.trials << "\n";
    os << "# mean_hit_time," << fmt_double(st.mean_hit_time, opts.digits) << ",se,"
       << fmt_double(st.se_hit_time, 6) << "\n";
    os << "# mean_returns," << fmt_double(st.mean_returns, opts.digits) << ",se,"
       << fmt_double(st.se_returns, 6) << "\n";
    sink.emit("hit.csv", os.str());
    return 0;
}

int cmd_oracle_power(const std::string& input, int from, const std::string& mode,
                     const std::string& absorb, const Options& opts, Sink& sink,
                     RunManifest& manifest) {
    CellGraph cell = load_input_cell(input, manifest);
    int n = opts.ncoeffs > 0 ? opts.ncoeffs : 16;
    std::vector<int> absorbing;
    if (absorb == "boundary-except-start") {
        for (int v : cell.boundary)
            if (v != from) absorbing.push_back(v);
    } else if (!absorb.empty()) {
        std::istringstream ss(absorb);
        std::string tok;
        while (std::getline(ss, tok, ',')) absorbing.push_back(std::stoi(tok));
    }
    FiniteChain chain = FiniteChain::simple_walk(cell.n, cell.edges, absorbing);
    std::ostringstream os;
    os << "k";
    for (int v = 0; v < cell.n; ++v) os << ",p_" << v;
    os << "\n";
    if (mode == "exact") {
        auto hist = matrix_power_probabilities(chain, from, n);
        for (int k = 0; k <= n; ++k) {
            os << k;
            for (int v = 0; v < cell.n; ++v) os << "," << rat_to_string(hist[k][v]);
            os << "\n";
        }
    } else {
        std::vector<int> targets(cell.n);
        for (int v = 0; v < cell.n; ++v) targets[v] = v;
        auto hist = matrix_power_targets(chain, from, n, targets, opts.threads);
        for (int k = 0; k <= n; ++k) {
            os << k;
            for (int v = 0; v < cell.n; ++v) os << "," << fmt_double(hist[v][k], opts.digits);
            os << "\n";
        }
    }
    sink.emit("power.csv", os.str());
    return 0;
}

int cmd_oracle_geodesic(const std::string& input, int x, int y, const Options& opts, Sink& sink,
                        RunManifest& manifest) {
    CellGraph cell = load_input_cell(input, manifest);
    FiniteChain chain = FiniteChain::simple_walk(cell.n, cell.edges, {});
    GeodesicBound gb = geodesic_bound_check(chain, x, y);
    std::ostringstream os;
    os << "x,y,distance,lhs,bound,equality\n";
    os << x << "," << y << "," << gb.distance << "," << rat_to_string(gb.lhs) << ","
       << rat_to_string(gb.bound) << "," << (gb.equality ? "yes" : "no") << "\n";
    sink.emit("geodesic.csv", os.str());
    (void)opts;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact random-walk analysis of symmetrically self-similar graphs"};
    app.require_subcommand(1);
    Options opts;
    long precision_arg = 256;
    app.add_option("--precision", precision_arg, "working precision in bits")
        ->capture_default_str();
    app.add_option("--seed", opts.seed, "random seed for the Monte Carlo oracle")
        ->capture_default_str();
    app.add_option("--threads", opts.threads, "worker threads (results are independent of this)")
        ->capture_default_str();
    app.add_option("--digits", opts.digits, "significant digits in numeric output")
        ->capture_default_str();
    app.add_flag("--json", opts.json, "emit JSON instead of human-readable text");
    app.add_option("--out", opts.out_dir, "directory for outputs plus a run manifest");

    auto* fx = app.add_subcommand("fixtures", "emit a built-in cell graph");
    fx->fallthrough();
    std::string fx_family;
    std::vector<int> fx_params;
    fx->add_option("family", fx_family)->required();
    fx->add_option("params", fx_params);

    auto* an = app.add_subcommand("analyze", "axioms, walk functions, scaling parameters");
    an->fallthrough();
    std::string an_input;
    an->add_option("input", an_input, "cell file, JSON mirror, or - for stdin")->required();

    auto* bu = app.add_subcommand("blowup", "finite level-n approximation");
    bu->fallthrough();
    std::string bu_input, bu_format = "edge-list";
    int bu_base = 0;
    bool bu_summary = false;
    bu->add_option("input", bu_input)->required();
    bu->add_option("--levels", opts.levels, "construction depth")->capture_default_str();
    bu->add_option("--base", bu_base,
                   "1-based base clique index (default: first with a unique boundary vertex)");
    bu->add_option("--format", bu_format, "edge-list | cell | json")->capture_default_str();
    bu->add_flag("--summary", bu_summary, "print a JSON summary instead of the graph");

    auto* co = app.add_subcommand("coeffs", "return-probability coefficients");
    co->fallthrough();
    std::string co_input, co_mode = "exact";
    co->add_option("input", co_input)->required();
    co->add_option("-N", opts.ncoeffs, "highest coefficient order");
    co->add_option("--mode", co_mode, "exact | float")->capture_default_str();

    auto* gr = app.add_subcommand("green", "Green function value via the product");
    gr->fallthrough();
    std::string gr_input, gr_at, gr_imag;
    gr->add_option("input", gr_input)->required();
    gr->add_option("--at", gr_at, "real part (rational or decimal)")->required();
    gr->add_option("--imag", gr_imag, "imaginary part");

    auto* ju = app.add_subcommand("julia", "Julia set classification of the transition map");
    ju->fallthrough();
    std::string ju_input;
    int ju_depth = 3, ju_probes = 64;
    ju->add_option("input", ju_input)->required();
    ju->add_option("--depth", ju_depth, "backward iterate levels")->capture_default_str();
    ju->add_option("--probes", ju_probes, "rational probes per gap")->capture_default_str();

    auto* as = app.add_subcommand("asymptotics", "omega/sigma tables and residual fit");
    as->fallthrough();
    std::string as_input;
    as->add_option("input", as_input)->required();
    as->add_option("-N", opts.ncoeffs,
                   "coefficient order for the residual fit (series runs in double precision)");
    as->add_option("--fourier-k", opts.fourier_k, "Fourier truncation")->capture_default_str();
    as->add_option("--samples", opts.samples, "omega samples per period")->capture_default_str();
    as->add_option("--shift", opts.shift, "period shift T")->capture_default_str();

    auto* orc = app.add_subcommand("oracle", "brute-force ground truth");
    orc->fallthrough();
    orc->require_subcommand(1);
    auto* orc_hit = orc->add_subcommand("hit", "Monte Carlo first-hit distribution");
    orc_hit->fallthrough();
    std::string oh_input;
    int oh_start = -1;
    long oh_trials = 1000000;
    orc_hit->add_option("input", oh_input)->required();
    orc_hit->add_option("--start", oh_start, "start vertex (default: first boundary vertex)");
    orc_hit->add_option("--trials", oh_trials)->capture_default_str();
    auto* orc_pow = orc->add_subcommand("power", "matrix-power probabilities");
    orc_pow->fallthrough();
    std::string op_input, op_mode = "exact", op_absorb;
    int op_from = 0;
    orc_pow->add_option("input", op_input)->required();
    orc_pow->add_option("--from", op_from)->capture_default_str();
    orc_pow->add_option("-N", opts.ncoeffs, "steps");
    orc_pow->add_option("--mode", op_mode, "exact | float")->capture_default_str();
    orc_pow->add_option("--absorb", op_absorb,
                        "comma-separated vertices or boundary-except-start");
    auto* orc_geo = orc->add_subcommand("geodesic", "geodesic product bound");
    orc_geo->fallthrough();
    std::string og_input;
    int og_x = 0, og_y = 1;
    orc_geo->add_option("input", og_input)->required();
    orc_geo->add_option("--x", og_x)->required();
    orc_geo->add_option("--y", og_y)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    opts.precision = static_cast<mpfr_prec_t>(precision_arg);

    RunManifest manifest;
    {
        std::ostringstream cl;
        for (int i = 0; i < argc; ++i) cl << (i ? " " : "") << argv[i];
        manifest.command_line = cl.str();
    }
    manifest.opts = opts;
    Sink sink{opts, manifest};
    auto started = std::chrono::steady_clock::now();

    int code = 0;
    try {
        if (*fx) {
            code = cmd_fixtures(fx_family, fx_params, opts, sink);
        } else if (*an) {
            code = cmd_analyze(an_input, opts, sink, manifest);
        } else if (*bu) {
            code = cmd_blowup(bu_input, bu_base, bu_format, bu_summary, opts, sink, manifest);
        } else if (*co) {
            code = cmd_coeffs(co_input, co_mode, opts, sink, manifest);
        } else if (*gr) {
            code = cmd_green(gr_input, gr_at, gr_imag, opts, sink, manifest);
        } else if (*ju) {
            code = cmd_julia(ju_input, ju_depth, ju_probes, opts, sink, manifest);
        } else if (*as) {
            code = cmd_asymptotics(as_input, opts, sink, manifest);
        } else if (*orc) {
            if (*orc_hit)
                code = cmd_oracle_hit(oh_input, oh_start, oh_trials, opts, sink, manifest);
            else if (*orc_pow)
                code = cmd_oracle_power(op_input, op_from, op_mode, op_absorb, opts, sink,
                                        manifest);
            else
                code = cmd_oracle_geodesic(og_input, og_x, og_y, opts, sink, manifest);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const StructureError& e) {
        std::cerr << "structure error: " << e.what() << "\n";
        return 2;
    } catch (const AxiomError& e) {
        std::cerr << "axiom error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const TheoremViolation& e) {
        std::cerr << "theorem violation: " << e.what() << "\n";
        return 4;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    manifest.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    sink.finish();
    return code;
}
