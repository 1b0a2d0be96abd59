#pragma once

// Special-function kernel: log-Gamma on the positive axis, modified Bessel
// functions of real order, Kummer 1F1, 0F1 and Jacobi polynomials. Everything
// is series/recurrence based and runs in double precision.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "istate/error.hpp"

namespace istate::specfun {

using cplx = std::complex<double>;

struct SeriesResult {
  cplx value{};
  std::size_t terms_used = 0;
  double truncation_estimate = 0.0;  // relative error bound: tail + accumulated rounding
  bool converged = true;
};

namespace detail {

constexpr double eps = std::numeric_limits<double>::epsilon();

// zeta(k) for k = 2..40
constexpr std::array<double, 39> zeta_values = {
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915, 1.0369277551433699263,
    1.0173430619844491397, 1.0083492773819228268, 1.0040773561979443394, 1.0020083928260822144,
    1.0009945751278180853, 1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519, 1.0000076371976378998,
    1.0000038172932649998, 1.0000019082127165539, 1.0000009539620338728, 1.0000004769329867878,
    1.0000002384505027277, 1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248, 1.0000000018626597235,
    1.0000000009313274324, 1.0000000004656629065, 1.0000000002328311834, 1.0000000001164155017,
    1.0000000000582077209, 1.0000000000291038504, 1.0000000000145519219, 1.0000000000072759598,
    1.0000000000036379795, 1.0000000000018189897, 1.0000000000009094948};

// Taylor coefficients of 1/Gamma(1+x) = sum_k rg[k] x^k
constexpr std::array<double, 28> rgamma1p = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18};

// log Gamma(1+e) for |e| <= 0.25
inline double log_gamma_1p_small(double e) {
  double sum = -std::numbers::egamma * e;
  double p = -e;  // (-e)^k
  for (std::size_t k = 2; k <= 40; ++k) {
    p *= -e;
    const double term = zeta_values[k - 2] * p / static_cast<double>(k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double log_gamma_stirling(double y) {
  // Bernoulli correction B_{2k}/(2k(2k-1) y^{2k-1}), k = 1..8
  static constexpr std::array<double, 8> c = {1.0 / 12.0,         -1.0 / 360.0,     1.0 / 1260.0,
                                              -1.0 / 1680.0,      1.0 / 1188.0,     -691.0 / 360360.0,
                                              1.0 / 156.0,        -3617.0 / 122400.0};
  const double iy = 1.0 / y, iy2 = iy * iy;
  double corr = 0.0, p = iy;
  for (double ck : c) {
    corr += ck * p;
    p *= iy2;
  }
  return (y - 0.5) * std::log(y) - y + 0.5 * std::log(2.0 * std::numbers::pi) + corr;
}

// 1/Gamma(1-mu) and 1/Gamma(1+mu) combinations used by the Temme series.
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  double even = 0.0, odd = 0.0;
  double p = 1.0;
  for (std::size_t k = 0; k < rgamma1p.size(); ++k) {
    if (k % 2 == 0) even += rgamma1p[k] * p;
    else odd += rgamma1p[k] * p;
    if (k % 2 == 1) p *= mu * mu;
  }
  // odd holds sum rg[2j+1] mu^{2j}
  gampl = even + odd * mu;  // 1/Gamma(1+mu)
  gammi = even - odd * mu;  // 1/Gamma(1-mu)
  gam1 = -odd;              // (gammi - gampl)/(2 mu)
  gam2 = even;              // (gammi + gampl)/2
}

inline void check_pole(cplx b, const char* who) {
  if (b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::round(b.real()))
    throw Error(Reason::InvalidArgument, std::string(who) + ": b is a non-positive integer");
}

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(Reason::InvalidArgument, "log_gamma needs a finite positive argument");
  if (std::abs(x - 1.0) <= 0.25) return detail::log_gamma_1p_small(x - 1.0);
  if (std::abs(x - 2.0) <= 0.25) return std::log1p(x - 2.0) + detail::log_gamma_1p_small(x - 2.0);
  if (x >= 10.0) return detail::log_gamma_stirling(x);
  double y = x, prod = 1.0;
  while (y < 10.0) {
    prod *= y;
    y += 1.0;
  }
  return detail::log_gamma_stirling(y) - std::log(prod);
}

inline double gamma(double x) { return std::exp(log_gamma(x)); }

/// log I_nu(x) from the ascending series; all terms are positive.
inline double log_bessel_i(double nu, double x) {
  if (!(x > 0.0)) throw Error(Reason::InvalidArgument, "bessel_i needs x > 0");
  if (nu < 0.0) throw Error(Reason::InvalidArgument, "bessel_i is implemented for nu >= 0");
  const double q = 0.25 * x * x;
  double log_scale = nu * std::log(0.5 * x) - log_gamma(nu + 1.0);
  double s = 1.0, t = 1.0;
  for (std::size_t k = 1; k < 100000; ++k) {
    const double kk = static_cast<double>(k);
    t *= q / (kk * (kk + nu));
    s += t;
    if (s > 1e280) {
      s *= 1e-280;
      t *= 1e-280;
      log_scale += 280.0 * std::numbers::ln10;
    }
    if (t < 0.5 * detail::eps * s && kk > 0.5 * x) break;
  }
  return log_scale + std::log(s);
}

inline double bessel_i(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return std::exp(log_bessel_i(nu, x));
}

/// e^{-x} I_nu(x)
inline double bessel_i_scaled(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return std::exp(log_bessel_i(nu, x) - x);
}

namespace detail {

// K_nu and K_{nu+1}, optionally times e^x. Temme series for x <= 2,
// Steed's continued fraction above, upward recurrence in order.
inline void bessel_k_pair(double nu, double x, bool scaled, double& k_nu, double& k_nu1) {
  if (!(x > 0.0)) throw Error(Reason::InvalidArgument, "bessel_k needs x > 0");
  nu = std::abs(nu);  // K_{-nu} = K_nu
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x, xi2 = 2.0 * xi;
  double rkmu, rk1;
  if (x <= 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < eps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i < 10000; ++i) {
      const double fi = i;
      ff = (fi * ff + p + q) / (fi * fi - mu2);
      c *= d / fi;
      p /= fi - mu;
      q /= fi + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - fi * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    rkmu = sum;
    rk1 = sum1 * xi2;
    if (scaled) {
      const double ex = std::exp(x);
      rkmu *= ex;
      rk1 *= ex;
    }
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 100000; ++i) {
      a -= 2.0 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    rkmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    if (!scaled) rkmu *= std::exp(-x);
    rk1 = rkmu * (mu + x + 0.5 - h) * xi;
  }
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = next;
  }
  k_nu = rkmu;
  k_nu1 = rk1;
}

}  // namespace detail

inline double bessel_k(double nu, double x) {
  double k, k1;
  detail::bessel_k_pair(nu, x, false, k, k1);
  return k;
}

/// e^{x} K_nu(x)
inline double bessel_k_scaled(double nu, double x) {
  double k, k1;
  detail::bessel_k_pair(nu, x, true, k, k1);
  return k;
}

namespace detail {

template <class Step>
SeriesResult sum_series(Step step, std::size_t max_terms = 200000) {
  SeriesResult r;
  cplx s = 1.0, t = 1.0;
  double sum_abs = 1.0;
  std::size_t n = 0;
  bool done = false;
  for (; n < max_terms; ++n) {
    const cplx ratio = step(n);
    t *= ratio;
    s += t;
    sum_abs += std::abs(t);
    const double rho = std::abs(ratio);
    if (t == 0.0) {
      r.truncation_estimate = 0.0;
      done = true;
      ++n;
      break;
    }
    if (std::abs(t) <= 0.25 * eps * std::abs(s) && rho < 0.5) {
      // the term ratio is decreasing from here on, so the tail is bounded
      // by a geometric series
      r.truncation_estimate = std::abs(t) * rho / (1.0 - rho) / std::abs(s);
      done = true;
      ++n;
      break;
    }
  }
  r.value = s;
  r.terms_used = n + 1;
  r.converged = done;
  const double mag = std::abs(s);
  r.truncation_estimate += mag > 0 ? 2.0 * static_cast<double>(n + 1) * eps * sum_abs / mag
                                   : std::numeric_limits<double>::infinity();
  return r;
}

inline SeriesResult hyp_1f1_direct(cplx a, cplx b, cplx x) {
  return sum_series([&](std::size_t n) {
    const double k = static_cast<double>(n);
    return (a + k) / (b + k) * x / (k + 1.0);
  });
}

}  // namespace detail

/// Kummer's function 1F1(a; b; x). For Re x < 0 both the direct series and
/// e^x 1F1(b-a; b; -x) are evaluated and the better conditioned one is kept.
inline SeriesResult hyp_1f1(cplx a, cplx b, cplx x) {
  detail::check_pole(b, "hyp_1f1");
  if (x == 0.0) return {cplx{1.0}, 1, 0.0, true};
  SeriesResult direct = detail::hyp_1f1_direct(a, b, x);
  if (x.real() >= 0.0 || std::abs(x) < 1.0) return direct;
  SeriesResult kummer = detail::hyp_1f1_direct(b - a, b, -x);
  kummer.value *= std::exp(x);
  if (!direct.converged || (kummer.converged && kummer.truncation_estimate < direct.truncation_estimate))
    return kummer;
  return direct;
}

/// 0F1(; b; x)
inline SeriesResult hyp_0f1(cplx b, cplx x) {
  detail::check_pole(b, "hyp_0f1");
  if (x == 0.0) return {cplx{1.0}, 1, 0.0, true};
  return detail::sum_series([&](std::size_t n) {
    const double k = static_cast<double>(n);
    return x / ((b + k) * (k + 1.0));
  });
}

/// Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.
inline double jacobi_p(std::size_t n, double a, double b, double x) {
  if (!(a > -1.0) || !(b > -1.0)) throw Error(Reason::InvalidArgument, "jacobi_p needs a, b > -1");
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
  const double ab = a + b;
  const double ab2 = a * a - b * b;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double c = 2.0 * kk + ab;
    const double A = 2.0 * kk * (kk + ab) * (c - 2.0);
    const double B = (c - 1.0) * (c * (c - 2.0) * x + ab2);
    const double C = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * c;
    const double p2 = (B * p1 - C * p0) / A;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace istate::specfun
