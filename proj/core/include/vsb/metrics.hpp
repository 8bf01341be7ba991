#ifndef VSB_METRICS_HPP
#define VSB_METRICS_HPP

#include <cstdint>
#include <utility>

#include "vsb/ranking.hpp"

namespace vsb {

/// Standard retrieval summary of one rank table. R@k is a percentage in
/// [0, 100]; MedR is the midpoint median (average of the two central
/// order statistics for even query counts); MeanR the arithmetic mean.
struct MetricBundle {
    double r1 = 0.0;
    double r5 = 0.0;
    double r10 = 0.0;
    double med_r = 0.0;
    double mean_r = 0.0;
};

/// One signed delta per metric. For R@k larger is better (s = +1); for
/// MedR/MeanR smaller is better (s = -1). Values live in [-200, 200].
struct MetricVector {
    double r1 = 0.0;
    double r5 = 0.0;
    double r10 = 0.0;
    double med_r = 0.0;
    double mean_r = 0.0;
};

/// MixR = mean of the R@1, MedR and MeanR components of a delta vector.
double mixr(const MetricVector& deltas);

/// Full bias comparison. `normalized` is always the exact subtraction
/// relative - location, per metric.
struct DeltaReport {
    MetricVector relative;
    MetricVector location;
    MetricVector normalized;
    double mixr_relative = 0.0;
    double mixr_location = 0.0;
    double mixr_normalized = 0.0;
};

MetricBundle metric_bundle(const RankTable& ranks);

/// relative_delta = 2s(M_real - M_ai) / (M_real + M_ai) * 100 per metric.
/// A zero denominator (only reachable for R@k) yields 0: no signal.
MetricVector relative_delta(const MetricBundle& real, const MetricBundle& ai);

/// One interleaving step: with coin c in {0, 1},
///   mixed_real = 2*rank_real - c,  mixed_ai = 2*rank_ai - (1 - c).
std::pair<uint32_t, uint32_t> interleave_pair(uint32_t rank_real, uint32_t rank_ai, int c);

/// Simulate a mixed retrieval from two standalone rank tables by
/// interleaving. The coin is drawn per query, in lexicographic query-id
/// order, from Rng(seed).
std::pair<RankTable, RankTable> simulate_interleaved(const RankTable& real_ranks,
                                                     const RankTable& ai_ranks,
                                                     uint64_t seed);

/// Relative-delta formula applied to the simulated mixed tables.
MetricVector location_delta(const RankTable& real_ranks,
                            const RankTable& ai_ranks,
                            uint64_t seed);

/// Mean location delta over n_seeds derived child seeds.
MetricVector location_delta_averaged(const RankTable& real_ranks,
                                     const RankTable& ai_ranks,
                                     uint64_t seed,
                                     size_t n_seeds);

/// Exact per-metric subtraction (never recomputed any other way).
MetricVector normalized_delta(const MetricVector& relative, const MetricVector& location);

/// Assemble the full report from standalone and mixed rank tables.
DeltaReport delta_report(const RankTable& real_ranks,
                         const RankTable& ai_ranks,
                         const RankTable& mixed_real_ranks,
                         const RankTable& mixed_ai_ranks,
                         uint64_t seed,
                         size_t n_seeds = 1);

} // namespace vsb

#endif
