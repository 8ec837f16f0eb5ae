// quadlab: batch front-end for the quadratic-character L'/L laboratory.
// Subcommands wire the library modules together and drop plot-ready CSV/JSON
// artifacts into --out. Everything is deterministic given (seed, parameters):
// rerunning a command reproduces its artifacts byte for byte.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "quadlab/quadlab.hpp"

namespace {

using namespace quadlab;

struct Options {
    double eps = 0.25;
    std::string nList = "10000";
    double lambda = 0.0;  // 0: per-N policy
    std::uint64_t primeCutoff = 100000;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 42;
    int threads = -1;  // -1: flag absent, consult QUADLAB_THREADS then auto
    std::string out = ".";
    bool includeD1 = true;
    std::string tauList;  // charfn; empty: built-in ladder
    int kmax = 3;         // moments
    std::string configPath;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Plain key=value config: one pair per line, # comments. A key is skipped when
// the matching flag was given on the command line, so explicit flags win.
// CLI11's own set_config only fires on the root app, not on subcommands, which
// is why this is done by hand.
void apply_config(const CLI::App& sub, Options& opt) {
    if (opt.configPath.empty()) return;
    if (!file_exists(opt.configPath))
        throw io_error("config: cannot read " + opt.configPath);
    std::string text = read_text_file(opt.configPath);
    auto given = [&sub](const std::string& flag) {
        const auto* o = sub.get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };
    size_t pos = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "eps") {
            if (!given("--eps")) opt.eps = parse_double(value, "eps");
        } else if (key == "N") {
            if (!given("--N")) opt.nList = value;
        } else if (key == "lambda") {
            if (!given("--lambda")) opt.lambda = parse_double(value, "lambda");
        } else if (key == "prime-cutoff") {
            if (!given("--prime-cutoff")) {
                long long v = parse_int(value, "prime-cutoff");
                if (v < 0) throw config_error("prime-cutoff: must be >= 0");
                opt.primeCutoff = std::uint64_t(v);
            }
        } else if (key == "samples") {
            if (!given("--samples")) {
                long long v = parse_int(value, "samples");
                if (v < 0) throw config_error("samples: must be >= 0");
                opt.samples = std::uint64_t(v);
            }
        } else if (key == "seed") {
            if (!given("--seed")) opt.seed = std::uint64_t(parse_int(value, "seed"));
        } else if (key == "threads") {
            if (!given("--threads")) {
                long long v = parse_int(value, "threads");
                if (v < 0) throw config_error("threads: must be >= 0");
                opt.threads = int(v);
            }
        } else if (key == "out") {
            if (!given("--out")) opt.out = value;
        } else if (key == "include-d1") {
            if (!given("--include-d1")) {
                if (value == "1" || value == "true") opt.includeD1 = true;
                else if (value == "0" || value == "false") opt.includeD1 = false;
                else throw config_error("include-d1: expected true/false, got " + value);
            }
        } else if (key == "tau") {
            if (!given("--tau")) opt.tauList = value;
        } else if (key == "kmax") {
            if (!given("--kmax")) opt.kmax = int(parse_int(value, "kmax"));
        } else {
            throw config_error("config: unknown key '" + key + "'");
        }
    }
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        parts.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return parts;
}

std::vector<std::int64_t> parse_n_list(const std::string& s) {
    std::vector<std::int64_t> ns;
    for (const auto& tok : split_commas(s)) {
        long long v = parse_int(tok, "N");
        if (v < 1) throw config_error("N: must be >= 1, got " + tok);
        ns.push_back(v);
    }
    if (ns.empty()) throw config_error("N: empty list");
    return ns;
}

std::vector<double> parse_tau_list(const std::string& s) {
    if (s.empty()) {
        // Built-in ladder: 0 plus a geometric sweep through the decay range.
        std::vector<double> taus{0.0};
        for (double t = 0.25; t <= 256.0; t *= 1.25) taus.push_back(t);
        return taus;
    }
    std::vector<double> taus;
    for (const auto& tok : split_commas(s)) taus.push_back(parse_double(tok, "tau"));
    return taus;
}

int resolve_thread_budget(int flagValue) {
    if (flagValue >= 0) return flagValue;
    const char* env = std::getenv("QUADLAB_THREADS");
    if (env && *env) {
        long long v = parse_int(env, "QUADLAB_THREADS");
        if (v < 0) throw config_error("QUADLAB_THREADS: must be >= 0, got " +
                                      std::string(env));
        return int(v);
    }
    return 0;  // auto
}

std::string out_path(const Options& opt, const std::string& name) {
    return (std::filesystem::path(opt.out) / name).string();
}

void ensure_out_dir(const Options& opt) {
    std::error_code ec;
    std::filesystem::create_directories(opt.out, ec);
    if (ec) throw io_error("out: cannot create directory " + opt.out + ": " +
                           ec.message());
}

TruncationParams params_for(const Options& opt, std::int64_t N) {
    TruncationParams p;
    p.epsilon = opt.eps;
    p.lambda = opt.lambda > 0.0 ? opt.lambda : lambda_policy(N);
    return p.resolved();
}

FamilyOptions family_options(const Options& opt) {
    FamilyOptions fo;
    fo.includeD1 = opt.includeD1;
    return fo;
}

ModelConfig model_config(const Options& opt) {
    ModelConfig cfg;
    cfg.epsilon = opt.eps;
    cfg.primeCutoff = opt.primeCutoff;
    cfg.seed = opt.seed;
    return cfg.validated();
}

FamilyEvaluation sweep_one(const Options& opt, std::int64_t N, int threads) {
    auto family = enumerate_family(N, family_options(opt));
    auto params = params_for(opt, N);
    std::string cache = out_path(opt, "sweep_N" + std::to_string(N) + ".cache");
    return evaluate_family(family, N, params, threads, cache);
}

int run_enumerate(const Options& opt) {
    for (std::int64_t N : parse_n_list(opt.nList)) {
        auto family = enumerate_family(N, family_options(opt));
        std::string path = out_path(opt, "family_N" + std::to_string(N) + ".txt");
        save_family(path, N, family);
        std::printf("N=%lld count=%zu -> %s\n", (long long)N, family.size(),
                    path.c_str());
    }
    return 0;
}

int run_sweep(const Options& opt, int threads) {
    for (std::int64_t N : parse_n_list(opt.nList)) {
        auto ev = sweep_one(opt, N, threads);
        std::string csv = out_path(opt, "sweep_N" + std::to_string(N) + ".csv");
        write_text_file(csv, sweep_to_csv(ev));
        std::printf("N=%lld size=%zu flagged=%lld lambda=%s eps=%s -> %s\n",
                    (long long)N, ev.values.size(), (long long)ev.flaggedCount,
                    fmt_double(ev.params.lambda).c_str(),
                    fmt_double(ev.params.epsilon).c_str(), csv.c_str());
    }
    return 0;
}

int run_sample(const Options& opt, int threads) {
    auto batch = sample_L(model_config(opt), opt.samples, threads);
    std::string bin = out_path(opt, "samples.bin");
    std::string csv = out_path(opt, "samples.csv");
    save_batch(bin, batch);
    write_text_file(csv, batch_to_csv(batch));
    auto mean = mc_moment(batch, 1);
    std::printf("samples=%zu P=%llu seed=%llu mean=%s stderr=%s tail=%s -> %s\n",
                batch.samples.size(), (unsigned long long)opt.primeCutoff,
                (unsigned long long)opt.seed, fmt_double(mean.value).c_str(),
                fmt_double(mean.stderrValue).c_str(),
                fmt_double(batch.tailEstimate).c_str(), bin.c_str());
    return 0;
}

int run_charfn(const Options& opt) {
    auto taus = parse_tau_list(opt.tauList);
    auto curve = char_fn_curve(opt.eps, opt.primeCutoff, taus);
    std::string csv = out_path(opt, "charfn.csv");
    write_text_file(csv, charfn_to_csv(curve));
    for (const auto& v : curve)
        std::printf("tau=%s re=%s im=%s tail=%s\n", fmt_double(v.tau).c_str(),
                    fmt_double(v.re).c_str(), fmt_double(v.im).c_str(),
                    fmt_double(v.tailEstimate).c_str());
    std::printf("rows=%zu -> %s\n", curve.size(), csv.c_str());
    return 0;
}

int run_density(const Options& opt) {
    CharFn phi(opt.eps, opt.primeCutoff);
    double T = choose_inversion_cutoff(phi);
    auto grid = make_grid(-14.0, 11.0, 251);
    auto curve = density_from_charfn(opt.eps, grid, T, opt.primeCutoff);
    std::string csv = out_path(opt, "density.csv");
    write_text_file(csv, density_to_csv(curve));
    std::printf("T=%s points=%zu integral=%s -> %s\n", fmt_double(T).c_str(),
                grid.size(), fmt_double(trapezoid_integral(curve)).c_str(),
                csv.c_str());
    return 0;
}

int run_compare(const Options& opt, int threads) {
    auto batch = sample_L(model_config(opt), opt.samples, threads);
    auto model = EmpiricalDistribution::from_model(batch);
    std::vector<DiscrepancyRow> rows;
    for (std::int64_t N : parse_n_list(opt.nList)) {
        auto ev = sweep_one(opt, N, threads);
        rows.push_back(discrepancy_row(ev, model));
        const auto& r = rows.back();
        std::printf("N=%lld familySize=%llu flagged=%lld ks=%s benchmark=%s\n",
                    (long long)r.N, (unsigned long long)r.familySize,
                    (long long)r.flagged, fmt_double(r.ks).c_str(),
                    fmt_double(r.benchmark).c_str());
    }
    write_text_file(out_path(opt, "discrepancy.csv"), discrepancy_to_csv(rows));
    write_text_file(out_path(opt, "discrepancy.json"), discrepancy_to_json(rows));
    return 0;
}

int run_moments(const Options& opt, int threads) {
    if (opt.kmax < 1 || opt.kmax > 8)
        throw config_error("kmax: supported range is 1..8, got " +
                           std::to_string(opt.kmax));
    std::int64_t N = parse_n_list(opt.nList).front();
    auto ev = sweep_one(opt, N, threads);
    auto batch = sample_L(model_config(opt), opt.samples, threads);
    std::vector<int> ks;
    for (int k = 1; k <= opt.kmax; ++k) ks.push_back(k);
    auto rows = moment_compare(ev, batch, ks);
    for (const auto& r : rows)
        std::printf("k=%d family=%s exact=%s mc=%s gapRoot=%s benchmark=%s\n",
                    r.k, fmt_double(r.familyMoment).c_str(),
                    fmt_double(r.exactMoment).c_str(),
                    fmt_double(r.mcMoment).c_str(), fmt_double(r.gapRoot).c_str(),
                    fmt_double(r.benchmark).c_str());
    write_text_file(out_path(opt, "moments.csv"), moments_to_csv(rows));
    write_text_file(out_path(opt, "moments.json"), moments_to_json(rows));
    return 0;
}

int run_tails(const Options& opt, int threads) {
    std::vector<TailRow> rows;
    for (std::int64_t N : parse_n_list(opt.nList)) {
        auto ev = sweep_one(opt, N, threads);
        rows.push_back(tail_frequency(ev));
        const auto& r = rows.back();
        std::printf("N=%lld threshold=%s frequency=%s\n", (long long)r.N,
                    fmt_double(r.threshold).c_str(),
                    fmt_double(r.frequency).c_str());
    }
    write_text_file(out_path(opt, "tails.csv"), tails_to_csv(rows));
    write_text_file(out_path(opt, "tails.json"), tails_to_json(rows));
    return 0;
}

int run_minima(const Options& opt, int threads) {
    std::vector<MinimaRow> rows;
    for (std::int64_t N : parse_n_list(opt.nList)) {
        auto ev = sweep_one(opt, N, threads);
        rows.push_back(min_abs_value(ev));
        const auto& r = rows.back();
        std::printf("N=%lld D=%lld min=%s benchmark=%s ratio=%s\n", (long long)r.N,
                    (long long)r.discriminant, fmt_double(r.minAbsValue).c_str(),
                    fmt_double(r.benchmark).c_str(), fmt_double(r.ratio).c_str());
    }
    write_text_file(out_path(opt, "minima.csv"), minima_to_csv(rows));
    write_text_file(out_path(opt, "minima.json"), minima_to_json(rows));
    return 0;
}

void add_common_options(CLI::App* sub, Options& opt) {
    sub->add_option("--eps", opt.eps, "evaluation offset in (0, 1/2)");
    sub->add_option("--N", opt.nList, "discriminant bound, or comma list for report commands");
    sub->add_option("--lambda", opt.lambda, "truncation cutoff (integer + 1/2); 0 uses the N^0.6 policy");
    sub->add_option("--prime-cutoff", opt.primeCutoff, "model prime cutoff P");
    sub->add_option("--samples", opt.samples, "Monte Carlo sample count");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--threads", opt.threads, "thread budget; 0 = all cores (env QUADLAB_THREADS as fallback)");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--include-d1,!--exclude-d1", opt.includeD1,
                  "keep the trivial character D=1 in families");
    sub->add_option("--config", opt.configPath,
                    "plain key=value config file; flags override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for L'/L value distributions over "
                 "quadratic character families"};
    app.require_subcommand(1);
    Options opt;

    auto* cEnumerate = app.add_subcommand("enumerate", "list fundamental discriminants |D| <= N");
    auto* cSweep = app.add_subcommand("sweep", "evaluate L'/L(1/2+eps) across a family (resumable)");
    auto* cSample = app.add_subcommand("sample", "draw Monte Carlo samples of the random Euler product");
    auto* cCharfn = app.add_subcommand("charfn", "tabulate the model characteristic function");
    auto* cDensity = app.add_subcommand("density", "invert the characteristic function to a density curve");
    auto* cCompare = app.add_subcommand("compare", "KS distance family vs model across N values");
    auto* cMoments = app.add_subcommand("moments", "family moments against exact and Monte Carlo model moments");
    auto* cTails = app.add_subcommand("tails", "large-value exceedance frequencies across N values");
    auto* cMinima = app.add_subcommand("minima", "smallest |L'/L| per family across N values");
    for (auto* sub : {cEnumerate, cSweep, cSample, cCharfn, cDensity, cCompare,
                      cMoments, cTails, cMinima})
        add_common_options(sub, opt);
    cCharfn->add_option("--tau", opt.tauList, "comma list of tau values (default: built-in ladder)");
    cMoments->add_option("--kmax", opt.kmax, "compare moments k = 1..kmax");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit 0; bad flags are config errors
    }

    try {
        auto parsed = app.get_subcommands();
        if (!parsed.empty()) apply_config(*parsed.front(), opt);
        ensure_out_dir(opt);
        int threads = resolve_thread_budget(opt.threads);
        if (cEnumerate->parsed()) return run_enumerate(opt);
        if (cSweep->parsed()) return run_sweep(opt, threads);
        if (cSample->parsed()) return run_sample(opt, threads);
        if (cCharfn->parsed()) return run_charfn(opt);
        if (cDensity->parsed()) return run_density(opt);
        if (cCompare->parsed()) return run_compare(opt, threads);
        if (cMoments->parsed()) return run_moments(opt, threads);
        if (cTails->parsed()) return run_tails(opt, threads);
        if (cMinima->parsed()) return run_minima(opt, threads);
        std::fprintf(stderr, "no command selected\n");
        return 1;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const resource_error& e) {
        // cutoff_error derives from resource_error: both are feasibility walls
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    }
}
