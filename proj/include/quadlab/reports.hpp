#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "quadlab/distribution.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/logderiv.hpp"
#include "quadlab/random_model.hpp"

namespace quadlab {

// (log log N / log N)^(1/2+eps): the discrepancy scale, also the scale for the
// family minimum. Natural logs throughout.
inline double discrepancy_benchmark(std::int64_t N, double epsilon) {
    if (N < 3) throw config_error("N: benchmark needs N >= 3, got " + std::to_string(N));
    double lg = std::log(double(N));
    return std::pow(std::log(lg) / lg, 0.5 + epsilon);
}

// Bare large-value scale (log N / log log N)^(1/2-eps), no calibration factor:
// this is the exceedance threshold the tail report quotes. The flagging cut in
// logderiv.hpp is 5x this; the two are intentionally different objects.
inline double tail_threshold(std::int64_t N, double epsilon) {
    if (N < 3) throw config_error("N: threshold needs N >= 3, got " + std::to_string(N));
    double lg = std::log(double(N));
    return std::pow(lg / std::log(lg), 0.5 - epsilon);
}

struct DiscrepancyRow {
    std::int64_t N = 0;
    std::uint64_t familySize = 0;
    std::int64_t flagged = 0;
    double ks = 0.0;
    double benchmark = 0.0;
};

inline DiscrepancyRow discrepancy_row(const FamilyEvaluation& ev,
                                      const EmpiricalDistribution& model) {
    DiscrepancyRow row;
    row.N = ev.N;
    row.familySize = ev.values.size();
    row.flagged = ev.flaggedCount;
    row.ks = ks_distance(EmpiricalDistribution::from_family(ev), model);
    row.benchmark = discrepancy_benchmark(ev.N, ev.params.epsilon);
    return row;
}

inline std::vector<DiscrepancyRow>
discrepancy_report(const std::vector<FamilyEvaluation>& evals,
                   const EmpiricalDistribution& model) {
    std::vector<DiscrepancyRow> rows;
    rows.reserve(evals.size());
    for (const auto& ev : evals) rows.push_back(discrepancy_row(ev, model));
    return rows;
}

inline std::string discrepancy_to_csv(const std::vector<DiscrepancyRow>& rows) {
    std::string out = "N,familySize,flagged,ks,benchmark\n";
    for (const auto& r : rows)
        out += std::to_string(r.N) + "," + std::to_string(r.familySize) + "," +
               std::to_string(r.flagged) + "," + fmt_double(r.ks) + "," +
               fmt_double(r.benchmark) + "\n";
    return out;
}

inline std::string discrepancy_to_json(const std::vector<DiscrepancyRow>& rows) {
    nlohmann::json j;
    j["report"] = "discrepancy";
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"N", r.N},
                             {"familySize", r.familySize},
                             {"flagged", r.flagged},
                             {"ks", r.ks},
                             {"benchmark", r.benchmark}});
    return j.dump(2) + "\n";
}

struct TailRow {
    std::int64_t N = 0;
    double threshold = 0.0;
    double frequency = 0.0;
};

// Fraction of unflagged values at or above the bare threshold. Note the
// denominator is the unflagged count (the flagged entries are excluded from
// both sides of the ratio).
inline TailRow tail_frequency(const FamilyEvaluation& ev) {
    TailRow row;
    row.N = ev.N;
    row.threshold = tail_threshold(ev.N, ev.params.epsilon);
    std::uint64_t unflagged = 0, above = 0;
    for (const auto& v : ev.values) {
        if (v.flagged) continue;
        ++unflagged;
        if (std::abs(v.value) >= row.threshold) ++above;
    }
    row.frequency = unflagged == 0 ? 0.0 : double(above) / double(unflagged);
    return row;
}

inline std::string tails_to_csv(const std::vector<TailRow>& rows) {
    std::string out = "N,threshold,frequency\n";
    for (const auto& r : rows)
        out += std::to_string(r.N) + "," + fmt_double(r.threshold) + "," +
               fmt_double(r.frequency) + "\n";
    return out;
}

inline std::string tails_to_json(const std::vector<TailRow>& rows) {
    nlohmann::json j;
    j["report"] = "tails";
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"N", r.N},
                             {"threshold", r.threshold},
                             {"frequency", r.frequency}});
    return j.dump(2) + "\n";
}

struct MinimaRow {
    std::int64_t N = 0;
    std::int64_t discriminant = 0;
    double minAbsValue = 0.0;
    double benchmark = 0.0;
    double ratio = 0.0;
};

// The unflagged entry of minimal |value|. Ties resolve to the first in family
// order, so the row is deterministic.
inline MinimaRow min_abs_value(const FamilyEvaluation& ev) {
    MinimaRow row;
    row.N = ev.N;
    bool found = false;
    for (const auto& v : ev.values) {
        if (v.flagged) continue;
        double a = std::abs(v.value);
        if (!found || a < row.minAbsValue) {
            row.minAbsValue = a;
            row.discriminant = v.discriminant;
            found = true;
        }
    }
    if (!found) throw config_error("minima: every value is flagged");
    row.benchmark = discrepancy_benchmark(ev.N, ev.params.epsilon);
    row.ratio = row.minAbsValue / row.benchmark;
    return row;
}

inline std::string minima_to_csv(const std::vector<MinimaRow>& rows) {
    std::string out = "N,discriminant,minAbsValue,benchmark,ratio\n";
    for (const auto& r : rows)
        out += std::to_string(r.N) + "," + std::to_string(r.discriminant) + "," +
               fmt_double(r.minAbsValue) + "," + fmt_double(r.benchmark) + "," +
               fmt_double(r.ratio) + "\n";
    return out;
}

inline std::string minima_to_json(const std::vector<MinimaRow>& rows) {
    nlohmann::json j;
    j["report"] = "minima";
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"N", r.N},
                             {"discriminant", r.discriminant},
                             {"minAbsValue", r.minAbsValue},
                             {"benchmark", r.benchmark},
                             {"ratio", r.ratio}});
    return j.dump(2) + "\n";
}

struct MomentRow {
    int k = 0;
    double familyMoment = 0.0;
    double exactMoment = 0.0;     // model, matching cutoff, arithmetic orientation
    double exactTailBound = 0.0;  // envelope of what the cutoff discards
    double mcMoment = 0.0;        // Monte Carlo, arithmetic orientation
    double mcStderr = 0.0;
    double gapRoot = 0.0;         // |familyMoment - exactMoment|^(1/k)
    double benchmark = 0.0;       // log N / N^(eps^2 (eps+3)/(12k))
};

// Family moments against the model's, k by k. The model quantities are
// computed in the model's own sign convention and multiplied by (-1)^k here:
// the arithmetic value is the negative of the modeled sum, so odd moments
// flip and even moments agree. exact_moment uses the family's own cutoff, so
// both sides truncate the same tail.
inline std::vector<MomentRow> moment_compare(const FamilyEvaluation& ev,
                                             const ModelSampleBatch& batch,
                                             const std::vector<int>& ks) {
    if (batch.config.epsilon != ev.params.epsilon)
        throw config_error("eps: family has " + fmt_double(ev.params.epsilon) +
                           ", batch has " + fmt_double(batch.config.epsilon));
    std::vector<MomentRow> rows;
    rows.reserve(ks.size());
    double eps = ev.params.epsilon;
    for (int k : ks) {
        MomentRow row;
        row.k = k;
        row.familyMoment = family_moment(ev, k);
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        row.exactMoment = sign * exact_moment(k, eps, ev.params.lambda);
        row.exactTailBound = exact_moment_tail_bound(k, eps, ev.params.lambda);
        auto mc = mc_moment(batch, k);
        row.mcMoment = sign * mc.value;
        row.mcStderr = mc.stderrValue;
        row.gapRoot = std::pow(std::abs(row.familyMoment - row.exactMoment),
                               1.0 / double(k));
        row.benchmark = std::log(double(ev.N)) /
                        std::pow(double(ev.N), eps * eps * (eps + 3.0) / (12.0 * k));
        rows.push_back(row);
    }
    return rows;
}

inline std::string moments_to_csv(const std::vector<MomentRow>& rows) {
    std::string out =
        "k,familyMoment,exactMoment,exactTailBound,mcMoment,mcStderr,gapRoot,benchmark\n";
    for (const auto& r : rows)
        out += std::to_string(r.k) + "," + fmt_double(r.familyMoment) + "," +
               fmt_double(r.exactMoment) + "," + fmt_double(r.exactTailBound) +
               "," + fmt_double(r.mcMoment) + "," + fmt_double(r.mcStderr) + "," +
               fmt_double(r.gapRoot) + "," + fmt_double(r.benchmark) + "\n";
    return out;
}

inline std::string moments_to_json(const std::vector<MomentRow>& rows) {
    nlohmann::json j;
    j["report"] = "moments";
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"k", r.k},
                             {"familyMoment", r.familyMoment},
                             {"exactMoment", r.exactMoment},
                             {"exactTailBound", r.exactTailBound},
                             {"mcMoment", r.mcMoment},
                             {"mcStderr", r.mcStderr},
                             {"gapRoot", r.gapRoot},
                             {"benchmark", r.benchmark}});
    return j.dump(2) + "\n";
}

} // namespace quadlab
