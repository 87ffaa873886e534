#include "noma/ncx2.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace noma {

namespace {

constexpr int kMaxGammaIter = 500;
constexpr double kGammaEps = 1e-16;

// Series expansion of P(a, x), reliable for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxGammaIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kGammaEps) break;
  }
  double lg = std::lgamma(a);
  return sum * std::exp(-x + a * std::log(x) - lg);
}

// Continued fraction for Q(a, x) = 1 - P(a, x), reliable for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxGammaIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kGammaEps) break;
  }
  double lg = std::lgamma(a);
  return h * std::exp(-x + a * std::log(x) - lg);
}

// Poisson pmf exp(-h) h^j / j! evaluated through logs to avoid underflow.
double poisson_pmf(int j, double h) {
  if (h <= 0.0) return j == 0 ? 1.0 : 0.0;
  double lp = -h + j * std::log(h) - std::lgamma(static_cast<double>(j) + 1.0);
  return std::exp(lp);
}

constexpr double kTermEps = 1e-18;

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double ncx2_cdf(double x, double noncentrality) {
  if (noncentrality < 0.0) throw std::invalid_argument("ncx2_cdf: negative noncentrality");
  if (x <= 0.0) return 0.0;
  const double s = x / 2.0;
  const double h = noncentrality / 2.0;
  if (h == 0.0) return -std::expm1(-s);

  // Anchor at the Poisson mode and recur outward. F_j = P(j+1, s) obeys
  // F_{j+1} = F_j - w_{j+1} with w_j = s^j e^{-s} / j!.
  const int j0 = static_cast<int>(h);
  const double pois0 = poisson_pmf(j0, h);
  const double f0 = gamma_p(static_cast<double>(j0) + 1.0, s);
  const double lw0 = -s + j0 * std::log(s) - std::lgamma(static_cast<double>(j0) + 1.0);
  const double w0 = std::exp(lw0);

  double sum = pois0 * f0;

  // Upward sweep.
  {
    double pois = pois0;
    double f = f0;
    double w = w0;
    for (int j = j0; j < j0 + 200000; ++j) {
      pois *= h / (j + 1);
      w *= s / (j + 1);
      f -= w;
      if (f < 0.0) f = 0.0;
      double term = pois * f;
      sum += term;
      // pois bounds the remaining tail: sum_{k>j} pois_k * F_k <= tail(pois).
      if (pois < kTermEps && term < kTermEps) break;
    }
  }
  // Downward sweep.
  {
    double pois = pois0;
    double f = f0;
    double w = w0;
    for (int j = j0; j > 0; --j) {
      pois *= j / h;
      f += w;
      w *= j / s;
      if (f > 1.0) f = 1.0;
      double term = pois * f;
      sum += term;
      if (pois < kTermEps && term < kTermEps) break;
    }
  }
  if (sum < 0.0) return 0.0;
  if (sum > 1.0) return 1.0;
  return sum;
}

double ncx2_pdf(double x, double noncentrality) {
  if (noncentrality < 0.0) throw std::invalid_argument("ncx2_pdf: negative noncentrality");
  if (x < 0.0) return 0.0;
  const double h = noncentrality / 2.0;
  if (x == 0.0) return 0.5 * std::exp(-h);
  const double s = x / 2.0;
  // Mixture of gamma(j+1, scale 2) densities: pdf = 1/2 sum_j pois_j w_j.
  const int j0 = static_cast<int>(h);
  const double pois0 = poisson_pmf(j0, h);
  const double w0 = std::exp(-s + j0 * std::log(s) - std::lgamma(static_cast<double>(j0) + 1.0));

  double sum = pois0 * w0;
  {
    double pois = pois0, w = w0;
    for (int j = j0; j < j0 + 200000; ++j) {
      pois *= h / (j + 1);
      w *= s / (j + 1);
      double term = pois * w;
      sum += term;
      if (term < kTermEps * (1.0 + sum) && j > j0 + 4) break;
    }
  }
  {
    double pois = pois0, w = w0;
    for (int j = j0; j > 0; --j) {
      pois *= j / h;
      w *= j / s;
      double term = pois * w;
      sum += term;
      if (term < kTermEps * (1.0 + sum)) break;
    }
  }
  return 0.5 * sum;
}

double ncx2_quantile(double p, double noncentrality) {
  if (!(p >= 0.0) || p >= 1.0) throw std::invalid_argument("ncx2_quantile: p must be in [0, 1)");
  if (noncentrality < 0.0) throw std::invalid_argument("ncx2_quantile: negative noncentrality");
  if (p == 0.0) return 0.0;
  const double lambda = noncentrality;

  if (lambda == 0.0) {
    double x = -2.0 * std::log1p(-p);
    return x < 1e-300 ? 0.0 : x;
  }

  if (p < 1e-13) {
    // Deep left tail, below what the CDF series can resolve in doubles:
    // F(x) ~ e^{-lambda/2} x / 2, so x ~ 2 p e^{lambda/2}.
    double lx = std::log(2.0 * p) + lambda / 2.0;
    double x = lx < -700.0 ? 0.0 : std::exp(lx);
    return x < 1e-300 ? 0.0 : x;
  }

  // Bracket the root.
  double lo = 0.0;
  double hi = 2.0 + lambda + 10.0 * std::sqrt(2.0 * (2.0 + 2.0 * lambda)) + 10.0;
  for (int i = 0; i < 200 && ncx2_cdf(hi, lambda) < p; ++i) hi *= 2.0;

  // Safeguarded Newton on F(x) - p with bisection fallback.
  const double tol_p = std::max(1e-15, std::min(1e-12, 0.05 * p));
  double x = 0.5 * hi;
  double fx = ncx2_cdf(x, lambda) - p;
  for (int it = 0; it < 200; ++it) {
    if (std::fabs(fx) <= tol_p) break;
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double d = ncx2_pdf(x, lambda);
    double step_x = x - fx / d;
    if (!(d > 0.0) || step_x <= lo || step_x >= hi) {
      step_x = 0.5 * (lo + hi);
    }
    if (hi - lo < 1e-15 * (1.0 + hi)) {
      x = 0.5 * (lo + hi);
      break;
    }
    x = step_x;
    fx = ncx2_cdf(x, lambda) - p;
  }
  return x < 1e-300 ? 0.0 : x;
}

}  // namespace noma
