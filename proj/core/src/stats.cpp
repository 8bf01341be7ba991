#include "vsb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vsb/error.hpp"
#include "vsb/rng.hpp"

namespace vsb {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kTol = 1e-10;
    constexpr double kTiny = 1e-30;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTol) {
            return h;
        }
    }
    return h; // converged to within the iteration budget
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) {
        throw Error("incomplete_beta: x outside [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, size_t df) {
    if (df == 0) {
        throw Error("student_t_two_sided_p: df must be >= 1");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    const double v = static_cast<double>(df);
    const double x = v / (v + t * t);
    return incomplete_beta(v / 2.0, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InputError("paired_t_test: length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw InputError("paired_t_test: need at least 2 pairs");
    }
    const size_t n = a.size();
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult r;
    r.degrees_of_freedom = n - 1;
    if (sd == 0.0) {
        if (mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
    return r;
}

double flow_entropy(const std::vector<std::vector<double>>& magnitudes, size_t bins) {
    if (bins < 2) {
        throw InputError("flow_entropy: bins must be >= 2");
    }
    if (magnitudes.empty() || magnitudes.front().empty()) {
        throw InputError("flow_entropy: empty grid");
    }
    double max_mag = 0.0;
    size_t count = 0;
    for (const auto& row : magnitudes) {
        for (double v : row) {
            if (v < 0.0 || !std::isfinite(v)) {
                throw InputError("flow_entropy: magnitudes must be finite and nonnegative");
            }
            max_mag = std::max(max_mag, v);
            ++count;
        }
    }
    if (max_mag == 0.0) {
        return 0.0;
    }
    std::vector<size_t> hist(bins, 0);
    for (const auto& row : magnitudes) {
        for (double v : row) {
            size_t idx = static_cast<size_t>(v / max_mag * static_cast<double>(bins));
            if (idx >= bins) idx = bins - 1; // v == max lands in the top bin
            ++hist[idx];
        }
    }
    double h = 0.0;
    for (size_t c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(count);
        h -= p * std::log2(p);
    }
    return h;
}

FlowEntropySummary flow_summary(std::span<const std::vector<std::vector<double>>> real_flows,
                                std::span<const std::vector<std::vector<double>>> ai_flows,
                                size_t bins) {
    if (real_flows.size() != ai_flows.size()) {
        throw InputError("flow_summary: paired lists must have equal length");
    }
    if (real_flows.empty()) {
        throw InputError("flow_summary: empty flow lists");
    }
    FlowEntropySummary s;
    for (size_t i = 0; i < real_flows.size(); ++i) {
        const double hr = flow_entropy(real_flows[i], bins);
        const double ha = flow_entropy(ai_flows[i], bins);
        s.mean_entropy_real += hr;
        s.mean_entropy_ai += ha;
        if (hr > ha) {
            ++s.higher_count_real;
        } else if (ha > hr) {
            ++s.higher_count_ai;
        }
    }
    s.mean_entropy_real /= static_cast<double>(real_flows.size());
    s.mean_entropy_ai /= static_cast<double>(real_flows.size());
    return s;
}

std::vector<std::vector<double>> load_flow_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    std::vector<std::vector<double>> grid;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("parse error at " + path + ":" + std::to_string(line_no) +
                                 ": bad magnitude \"" + cell + "\"");
            }
        }
        if (!row.empty()) {
            grid.push_back(std::move(row));
        }
    }
    if (grid.empty()) {
        throw InputError(path + ": empty flow grid");
    }
    return grid;
}

std::vector<SynthFlowPair> synth_flow_pairs(size_t n_pairs, size_t rows, size_t cols,
                                            uint64_t seed) {
    if (n_pairs == 0 || rows == 0 || cols == 0) {
        throw InputError("synth_flow_pairs: sizes must be positive");
    }
    Rng rng(seed);
    // A shared base level with a 4x wider spread on the real side; the
    // spread difference is what separates the histogram shapes once each
    // grid is normalized to its own maximum.
    constexpr double kBase = 1.0;
    constexpr double kRealSpread = 0.8;
    constexpr double kAiSpread = 0.2;
    std::vector<SynthFlowPair> pairs;
    pairs.reserve(n_pairs);
    for (size_t p = 0; p < n_pairs; ++p) {
        SynthFlowPair pair;
        pair.real.assign(rows, std::vector<double>(cols, 0.0));
        pair.ai.assign(rows, std::vector<double>(cols, 0.0));
        for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c < cols; ++c) {
                pair.real[r][c] = std::abs(kBase + kRealSpread * rng.next_gaussian());
                pair.ai[r][c] = std::abs(kBase + kAiSpread * rng.next_gaussian());
            }
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

} // namespace vsb
