#pragma once

namespace noma {

/// CDF of the noncentral chi-square distribution with 2 degrees of freedom.
/// Evaluated as a Poisson mixture of central chi-square CDFs summed outward
/// from the Poisson mode; absolute error below 1e-12.
double ncx2_cdf(double x, double noncentrality);

/// Density of the same distribution (used as the quantile derivative).
double ncx2_pdf(double x, double noncentrality);

/// Inverse CDF for p in [0, 1). ncx2_cdf(ncx2_quantile(p, l), l) = p to
/// better than 1e-10 absolute. Throws std::invalid_argument outside [0, 1).
double ncx2_quantile(double p, double noncentrality);

/// Regularized lower incomplete gamma P(a, x); exposed for tests.
double gamma_p(double a, double x);

}  // namespace noma
