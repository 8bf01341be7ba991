#ifndef VSB_STATS_HPP
#define VSB_STATS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vsb {

struct TTestResult {
    double t_statistic = 0.0;
    size_t degrees_of_freedom = 0;
    double p_value = 1.0; // two-sided
};

/// Paired Student's t-test: t = mean(a-b) / (sd(a-b)/sqrt(n)), sample sd
/// with n-1 denominator, two-sided p via the Student-t CDF. Zero-variance
/// differences follow the convention t = +/-inf, p = 0 when the mean is
/// nonzero, else t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability of |T| >= |t| for Student's t with df
/// degrees of freedom, evaluated through the regularized incomplete beta
/// (continued fraction, absolute tolerance 1e-10).
double student_t_two_sided_p(double t, size_t df);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Shannon entropy (bits) of the histogram of flow magnitudes, with
/// `bins` uniform bins on [0, max(magnitude)]. All-zero grids score 0.
double flow_entropy(const std::vector<std::vector<double>>& magnitudes, size_t bins);

struct FlowEntropySummary {
    double mean_entropy_real = 0.0;
    double mean_entropy_ai = 0.0;
    size_t higher_count_real = 0;
    size_t higher_count_ai = 0; // ties count for neither side
};

/// Pairwise entropy comparison of two equally long grid lists.
FlowEntropySummary flow_summary(std::span<const std::vector<std::vector<double>>> real_flows,
                                std::span<const std::vector<std::vector<double>>> ai_flows,
                                size_t bins);

/// One grid per CSV file, rows of comma-separated magnitudes.
std::vector<std::vector<double>> load_flow_grid_csv(const std::string& path);

/// Synthetic paired flow grids: both sides share a base magnitude level,
/// the real side gets a 4x wider spread around it (richer histogram).
struct SynthFlowPair {
    std::vector<std::vector<double>> real;
    std::vector<std::vector<double>> ai;
};
std::vector<SynthFlowPair> synth_flow_pairs(size_t n_pairs, size_t rows, size_t cols,
                                            uint64_t seed);

} // namespace vsb

#endif
