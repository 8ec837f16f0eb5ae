// Acceptance harness: one pass/fail line per criterion, artifacts under --out.
// Criteria 5 through 9 share one deterministic pipeline (model batches, an
// inversion density, three family sweeps); criterion 11 reruns that pipeline
// at thread counts 4 and 8 and byte-compares every artifact against the
// single-thread run. Any FAIL makes the process exit nonzero.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quadlab/quadlab.hpp"

#include "../oracles.hpp"

using namespace quadlab;

namespace {

struct PipelineResult {
    ModelSampleBatch batch42, batch43;
    EmpiricalDistribution modelEmp;  // batch42, arithmetic orientation
    double inversionT = 0.0;
    double routeGap = 0.0;
    std::vector<FamilyEvaluation> sweeps;  // N = 1e3, 1e4, 1e5
    std::vector<DiscrepancyRow> discRows;
    double slope = 0.0;
    double growthMax42 = 0.0, growthMax43 = 0.0;
    std::vector<MinimaRow> minRows;
};

const std::vector<std::int64_t> kSweepN{1000, 10000, 100000};
// Cutoffs grow faster than the N^0.6 policy so the truncation bias shrinks
// under each N's discrepancy scale; all stay within the lambda <= 1e6 budget.
const std::vector<double> kSweepLambda{1000.5, 31622.5, 999999.5};

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double growth_max(const ModelSampleBatch& batch, std::vector<double>& ratios) {
    double worst = 0.0;
    ratios.clear();
    for (int k = 2; k <= 20; ++k) {
        double m = mc_moment(batch, k, true).value;
        double ratio = std::pow(m, 1.0 / k) / std::pow(double(k), 0.25);
        ratios.push_back(ratio);
        worst = std::max(worst, ratio);
    }
    return worst;
}

PipelineResult run_pipeline(int threads, const std::string& dir) {
    std::filesystem::create_directories(dir);
    PipelineResult r;

    ModelConfig cfg;
    cfg.epsilon = 0.25;
    cfg.primeCutoff = 100000;
    cfg.seed = 42;
    r.batch42 = sample_L(cfg, 1000000, threads);
    save_batch(dir + "/samples_seed42.bin", r.batch42);
    cfg.seed = 43;
    r.batch43 = sample_L(cfg, 1000000, threads);
    save_batch(dir + "/samples_seed43.bin", r.batch43);
    r.modelEmp = EmpiricalDistribution::from_model(r.batch42);

    // Route two for the model distribution: inversion of the characteristic
    // function on a fixed grid, compared against the Monte Carlo CDF.
    CharFn phi(0.25, 100000);
    r.inversionT = choose_inversion_cutoff(phi);
    auto grid = make_grid(-14.0, 11.0, 251);
    auto curve = density_from_charfn(0.25, grid, r.inversionT, 100000);
    write_text_file(dir + "/density.csv", density_to_csv(curve));
    r.routeGap = sup_gap(grid, cdf_from_density(curve), r.modelEmp);

    // Decay-rate nodes double as the charfn artifact.
    std::vector<double> taus;
    for (double t = 10.0; t <= 200.0; t *= 1.2) taus.push_back(t);
    std::vector<double> xs, ys;
    std::vector<CharFnValue> charRows;
    for (double t : taus) {
        auto v = phi.eval(t);
        charRows.push_back(v);
        xs.push_back(std::log(t));
        ys.push_back(std::log(-v.logAbs));
    }
    write_text_file(dir + "/charfn.csv", charfn_to_csv(charRows));
    r.slope = fit_slope(xs, ys);

    for (size_t i = 0; i < kSweepN.size(); ++i) {
        std::int64_t N = kSweepN[i];
        TruncationParams params;
        params.epsilon = 0.25;
        params.lambda = kSweepLambda[i];
        auto family = enumerate_family(N);
        r.sweeps.push_back(evaluate_family(
            family, N, params, threads,
            dir + "/sweep_N" + std::to_string(N) + ".cache"));
    }
    r.discRows = discrepancy_report(r.sweeps, r.modelEmp);
    write_text_file(dir + "/discrepancy.csv", discrepancy_to_csv(r.discRows));
    write_text_file(dir + "/discrepancy.json", discrepancy_to_json(r.discRows));

    std::vector<double> ratios42, ratios43;
    r.growthMax42 = growth_max(r.batch42, ratios42);
    r.growthMax43 = growth_max(r.batch43, ratios43);
    std::string growth = "k,ratioSeed42,ratioSeed43\n";
    for (int k = 2; k <= 20; ++k)
        growth += std::to_string(k) + "," + fmt_double(ratios42[size_t(k - 2)]) +
                  "," + fmt_double(ratios43[size_t(k - 2)]) + "\n";
    write_text_file(dir + "/growth.csv", growth);

    // Family minima on nested slices of the deepest sweep: the family is in
    // ascending |D| order, so a bound on |D| is a prefix. One lambda for all
    // three slices keeps the minima comparable.
    const auto& deep = r.sweeps.back();
    for (std::int64_t bound : kSweepN) {
        FamilyEvaluation slice;
        slice.N = bound;
        slice.params = deep.params;
        slice.largeValueThreshold = deep.largeValueThreshold;
        for (const auto& v : deep.values) {
            if (std::llabs(v.discriminant) > bound) break;
            slice.values.push_back(v);
            if (v.flagged) ++slice.flaggedCount;
        }
        r.minRows.push_back(min_abs_value(slice));
    }
    write_text_file(dir + "/minima.csv", minima_to_csv(r.minRows));
    return r;
}

bool is_square(std::uint64_t n) {
    std::uint64_t r = std::uint64_t(std::sqrt(double(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

} // namespace

int main(int argc, char** argv) {
    std::string outDir = "acceptance_artifacts";
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--out") outDir = argv[i + 1];
    std::filesystem::create_directories(outDir);

    std::optional<PipelineResult> pipe;
    std::string pipeError;
    auto pipeline = [&]() -> PipelineResult& {
        if (!pipe) pipe = run_pipeline(1, outDir + "/threads1");
        return *pipe;
    };

    std::vector<std::function<Outcome()>> criteria;

    // 1: share of fundamental discriminants up to 10^6 against 6/pi^2.
    criteria.push_back([&]() -> Outcome {
        auto family = enumerate_family(1000000);
        double density = double(family.size()) / 1e6;
        char buf[128];
        std::snprintf(buf, sizeof buf, "density %.6f in [0.6069, 0.6089]", density);
        return {density >= 0.6069 && density <= 0.6089, buf};
    });

    // 2: kronecker against the definitional oracle on a full grid.
    criteria.push_back([&]() -> Outcome {
        long long checked = 0;
        for (std::int64_t a = -200; a <= 200; ++a)
            for (std::uint64_t n = 0; n <= 200; ++n) {
                if (kronecker(a, n) != oracle::kronecker_definitional(a, n))
                    return {false, "mismatch at (" + std::to_string(a) + ", " +
                                       std::to_string(n) + ")"};
                ++checked;
            }
        return {true, std::to_string(checked) + " symbol pairs match the oracle"};
    });

    // 3: exact_moment against brute-force tuple enumeration.
    criteria.push_back([&]() -> Outcome {
        double worst = 0.0;
        for (double lambda : {10.0, 20.0, 30.0})
            for (int k = 1; k <= 4; ++k)
                for (double eps : {0.1, 0.25, 0.4}) {
                    double fast = exact_moment(k, eps, lambda);
                    double brute = oracle::exact_moment_bruteforce(k, eps, lambda);
                    double scaled =
                        std::abs(fast - brute) / std::max(1.0, std::abs(brute));
                    worst = std::max(worst, scaled);
                }
        char buf[96];
        std::snprintf(buf, sizeof buf, "max relative gap %.3e <= 1e-12", worst);
        return {worst <= 1e-12, buf};
    });

    // 4: Lambda_k never exceeds (log n)^k.
    criteria.push_back([&]() -> Outcome {
        LambdaTable table(10000, 5);
        for (int k = 1; k <= 5; ++k)
            for (std::uint64_t n = 2; n <= 10000; ++n) {
                double bound = std::pow(std::log(double(n)), k) * (1.0 + 1e-9);
                if (table.lambda_k(k, n) > bound)
                    return {false, "violation at k=" + std::to_string(k) +
                                       ", n=" + std::to_string(n)};
            }
        return {true, "Lambda_k <= (log n)^k over n <= 1e4, k <= 5"};
    });

    // 5: Monte Carlo CDF vs inversion CDF, sup gap <= 0.01.
    criteria.push_back([&]() -> Outcome {
        auto& p = pipeline();
        char buf[96];
        std::snprintf(buf, sizeof buf, "sup gap %.4f <= 0.01 (T=%g)", p.routeGap,
                      p.inversionT);
        return {p.routeGap <= 0.01, buf};
    });

    // 6: KS(family, model) strictly decreasing over N and KS(1e5) <= 0.05.
    // The decrease holds with margin; the 0.05 endpoint does not at feasible
    // N. The family sits below the (log log N / log N)^{3/4} benchmark, but
    // that rate reaches 0.05 only at astronomically large N, and sqrt(N)
    // secondary terms in the fundamental-discriminant character averages
    // (visible as the first-moment gap printed below) decay like N^{-0.2} at
    // lambda = N^{1.2}. Reported as measured; the detail line carries the
    // benchmark ratios and the moment gap for context.
    criteria.push_back([&]() -> Outcome {
        auto& p = pipeline();
        double k3 = p.discRows[0].ks, k4 = p.discRows[1].ks, k5 = p.discRows[2].ks;
        double famM1 = family_moment(p.sweeps.back(), 1);
        double modelM1 = -exact_moment(1, 0.25, kSweepLambda.back());
        char buf[192];
        std::snprintf(buf, sizeof buf,
                      "ks %.4f > %.4f > %.4f (benchmarks %.3f/%.3f/%.3f), "
                      "ks(1e5) <= 0.05, m1 gap %.4f",
                      k3, k4, k5, p.discRows[0].benchmark,
                      p.discRows[1].benchmark, p.discRows[2].benchmark,
                      std::abs(famM1 - modelM1));
        return {k3 > k4 && k4 > k5 && k5 <= 0.05, buf};
    });

    // 7: characteristic-function decay exponent.
    criteria.push_back([&]() -> Outcome {
        auto& p = pipeline();
        char buf[96];
        std::snprintf(buf, sizeof buf, "slope %.4f within 0.15 of 4/3", p.slope);
        return {std::abs(p.slope - 4.0 / 3.0) <= 0.15, buf};
    });

    // 8: absolute-moment growth ratio bounded by 5 across two seeds.
    criteria.push_back([&]() -> Outcome {
        auto& p = pipeline();
        double worst = std::max(p.growthMax42, p.growthMax43);
        char buf[96];
        std::snprintf(buf, sizeof buf, "max growth ratio %.4f <= 5 (seeds 42, 43)",
                      worst);
        return {worst <= 5.0, buf};
    });

    // 9: family minima on the discrepancy scale: bounded ratio, nonincreasing.
    criteria.push_back([&]() -> Outcome {
        auto& p = pipeline();
        bool ok = true;
        double worst = 0.0;
        for (size_t i = 0; i < p.minRows.size(); ++i) {
            worst = std::max(worst, p.minRows[i].ratio);
            if (i > 0 && p.minRows[i].minAbsValue > p.minRows[i - 1].minAbsValue)
                ok = false;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "max m_N/benchmark %.4f <= 1, m_N nonincreasing", worst);
        return {ok && worst <= 1.0, buf};
    });

    // 10: character averages of non-squares vanish at the N^{-1/2} scale.
    criteria.push_back([&]() -> Outcome {
        auto family = enumerate_family(100000);
        double worst = 0.0;
        std::uint64_t worstN = 2;
        for (std::uint64_t n = 2; n <= 50; ++n) {
            if (is_square(n)) continue;
            double avg = character_average(n, family);
            double stat = std::abs(avg) * std::sqrt(1e5) /
                          (std::pow(double(n), 0.25) * std::log(double(n)));
            if (stat > worst) {
                worst = stat;
                worstN = n;
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "max |avg| sqrt(N)/(n^{1/4} log n) = %.3f at n=%llu",
                      worst, (unsigned long long)worstN);
        return {worst <= 10.0, buf};
    });

    // 11: artifacts byte-identical across thread counts 1, 4, 8.
    criteria.push_back([&]() -> Outcome {
        pipeline();  // ensure threads1 artifacts exist
        run_pipeline(4, outDir + "/threads4");
        run_pipeline(8, outDir + "/threads8");
        const char* files[] = {"samples_seed42.bin", "samples_seed43.bin",
                               "density.csv",        "charfn.csv",
                               "discrepancy.csv",    "discrepancy.json",
                               "growth.csv",         "minima.csv",
                               "sweep_N1000.cache",  "sweep_N10000.cache",
                               "sweep_N100000.cache"};
        for (const char* f : files) {
            std::string base = read_text_file(outDir + "/threads1/" + f);
            if (read_text_file(outDir + "/threads4/" + f) != base)
                return {false, std::string(f) + " differs at 4 threads"};
            if (read_text_file(outDir + "/threads8/" + f) != base)
                return {false, std::string(f) + " differs at 8 threads"};
        }
        return {true, "11 artifact files byte-identical at 1, 4, 8 threads"};
    });

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i]();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        std::printf("criterion %zu: %s - %s (%.1f s)\n", i + 1,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures) {
        std::printf("%d of 11 criteria failed\n", failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
