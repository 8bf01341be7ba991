#include "vsb/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "vsb/error.hpp"

namespace vsb {

namespace {

double delta_one(double m_real, double m_ai, double sign) {
    const double denom = m_real + m_ai;
    if (denom == 0.0) {
        return 0.0;
    }
    return 2.0 * sign * (m_real - m_ai) / denom * 100.0;
}

} // namespace

double mixr(const MetricVector& deltas) {
    return (deltas.r1 + deltas.med_r + deltas.mean_r) / 3.0;
}

MetricBundle metric_bundle(const RankTable& table) {
    if (table.ranks.empty()) {
        throw InputError("metric_bundle: empty rank table");
    }
    std::vector<uint32_t> ranks;
    ranks.reserve(table.ranks.size());
    double sum = 0.0;
    size_t at1 = 0, at5 = 0, at10 = 0;
    for (const auto& [qid, r] : table.ranks) {
        ranks.push_back(r);
        sum += r;
        if (r <= 1) ++at1;
        if (r <= 5) ++at5;
        if (r <= 10) ++at10;
    }
    const double n = static_cast<double>(ranks.size());
    std::sort(ranks.begin(), ranks.end());

    MetricBundle b;
    b.r1 = 100.0 * static_cast<double>(at1) / n;
    b.r5 = 100.0 * static_cast<double>(at5) / n;
    b.r10 = 100.0 * static_cast<double>(at10) / n;
    const size_t m = ranks.size();
    if (m % 2 == 1) {
        b.med_r = ranks[m / 2];
    } else {
        b.med_r = (static_cast<double>(ranks[m / 2 - 1]) + static_cast<double>(ranks[m / 2])) / 2.0;
    }
    b.mean_r = sum / n;
    return b;
}

MetricVector relative_delta(const MetricBundle& real, const MetricBundle& ai) {
    MetricVector d;
    d.r1 = delta_one(real.r1, ai.r1, 1.0);
    d.r5 = delta_one(real.r5, ai.r5, 1.0);
    d.r10 = delta_one(real.r10, ai.r10, 1.0);
    d.med_r = delta_one(real.med_r, ai.med_r, -1.0);
    d.mean_r = delta_one(real.mean_r, ai.mean_r, -1.0);
    return d;
}

std::pair<uint32_t, uint32_t> interleave_pair(uint32_t rank_real, uint32_t rank_ai, int c) {
    return {2 * rank_real - static_cast<uint32_t>(c),
            2 * rank_ai - static_cast<uint32_t>(1 - c)};
}

std::pair<RankTable, RankTable> simulate_interleaved(const RankTable& real_ranks,
                                                     const RankTable& ai_ranks,
                                                     uint64_t seed) {
    if (real_ranks.ranks.size() != ai_ranks.ranks.size()) {
        throw InputError("simulate_interleaved: tables cover different query sets");
    }
    Rng rng(seed);
    RankTable mixed_real;
    RankTable mixed_ai;
    mixed_real.corpus_size = real_ranks.corpus_size + ai_ranks.corpus_size;
    mixed_ai.corpus_size = mixed_real.corpus_size;

    // std::map iteration is query-id lexicographic, which pins the coin
    // draw order.
    for (const auto& [qid, r_real] : real_ranks.ranks) {
        auto it = ai_ranks.ranks.find(qid);
        if (it == ai_ranks.ranks.end()) {
            throw InputError("simulate_interleaved: query \"" + qid +
                             "\" missing from the AI table");
        }
        const int c = static_cast<int>(rng.next_below(2));
        const auto [mr, ma] = interleave_pair(r_real, it->second, c);
        mixed_real.ranks[qid] = mr;
        mixed_ai.ranks[qid] = ma;
    }
    return {std::move(mixed_real), std::move(mixed_ai)};
}

MetricVector location_delta(const RankTable& real_ranks,
                            const RankTable& ai_ranks,
                            uint64_t seed) {
    const auto [mixed_real, mixed_ai] = simulate_interleaved(real_ranks, ai_ranks, seed);
    return relative_delta(metric_bundle(mixed_real), metric_bundle(mixed_ai));
}

MetricVector location_delta_averaged(const RankTable& real_ranks,
                                     const RankTable& ai_ranks,
                                     uint64_t seed,
                                     size_t n_seeds) {
    if (n_seeds < 1) {
        throw InputError("location_delta_averaged: n_seeds must be >= 1");
    }
    if (n_seeds == 1) {
        return location_delta(real_ranks, ai_ranks, seed);
    }
    MetricVector acc;
    for (size_t i = 0; i < n_seeds; ++i) {
        const uint64_t child = derive_seed(seed, "interleave/" + std::to_string(i));
        const MetricVector d = location_delta(real_ranks, ai_ranks, child);
        acc.r1 += d.r1;
        acc.r5 += d.r5;
        acc.r10 += d.r10;
        acc.med_r += d.med_r;
        acc.mean_r += d.mean_r;
    }
    const double n = static_cast<double>(n_seeds);
    acc.r1 /= n;
    acc.r5 /= n;
    acc.r10 /= n;
    acc.med_r /= n;
    acc.mean_r /= n;
    return acc;
}

MetricVector normalized_delta(const MetricVector& relative, const MetricVector& location) {
    MetricVector d;
    d.r1 = relative.r1 - location.r1;
    d.r5 = relative.r5 - location.r5;
    d.r10 = relative.r10 - location.r10;
    d.med_r = relative.med_r - location.med_r;
    d.mean_r = relative.mean_r - location.mean_r;
    return d;
}

DeltaReport delta_report(const RankTable& real_ranks,
                         const RankTable& ai_ranks,
                         const RankTable& mixed_real_ranks,
                         const RankTable& mixed_ai_ranks,
                         uint64_t seed,
                         size_t n_seeds) {
    DeltaReport report;
    report.relative =
        relative_delta(metric_bundle(mixed_real_ranks), metric_bundle(mixed_ai_ranks));
    report.location = location_delta_averaged(real_ranks, ai_ranks, seed, n_seeds);
    report.normalized = normalized_delta(report.relative, report.location);
    report.mixr_relative = mixr(report.relative);
    report.mixr_location = mixr(report.location);
    report.mixr_normalized = mixr(report.normalized);
    return report;
}

} // namespace vsb
