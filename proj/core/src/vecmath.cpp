#include "vsb/vecmath.hpp"

#include <cmath>

#include "vsb/error.hpp"

namespace vsb {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

std::vector<double> normalized(std::span<const double> v, const std::string& context) {
    const double n = norm(v);
    if (!(n > 1e-300)) {
        throw InputError("degenerate embedding (zero vector): " + context);
    }
    std::vector<double> out(v.begin(), v.end());
    for (auto& x : out) {
        x /= n;
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (!(na > 1e-300) || !(nb > 1e-300)) {
        return 0.0;
    }
    return dot(a, b) / (na * nb);
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] += s * x[i];
    }
}

std::vector<double> mat_vec(std::span<const double> m, std::span<const double> v, size_t d) {
    std::vector<double> out(d, 0.0);
    for (size_t r = 0; r < d; ++r) {
        double s = 0.0;
        const double* row = m.data() + r * d;
        for (size_t c = 0; c < d; ++c) {
            s += row[c] * v[c];
        }
        out[r] = s;
    }
    return out;
}

} // namespace vsb
