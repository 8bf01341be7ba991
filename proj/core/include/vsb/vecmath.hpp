#ifndef VSB_VECMATH_HPP
#define VSB_VECMATH_HPP

#include <span>
#include <string>
#include <vector>

namespace vsb {

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

/// Returns v / ||v||. Throws InputError naming `context` when the norm
/// underflows (degenerate embedding).
std::vector<double> normalized(std::span<const double> v, const std::string& context);

/// Cosine of two arbitrary vectors; 0 when either norm underflows.
double cosine(std::span<const double> a, std::span<const double> b);

/// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);

/// Row-major (d x d) matrix times vector.
std::vector<double> mat_vec(std::span<const double> m, std::span<const double> v, size_t d);

} // namespace vsb

#endif
