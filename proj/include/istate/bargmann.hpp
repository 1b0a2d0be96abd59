#pragma once

// Analytic (Fock-Bargmann) realization. A state sum_n c_n |psi_n> becomes
//   F(z) = sum_n e^{i alpha e_n} c_n z^n / sqrt(f(n)),
// a+ acts as multiplication by z, N as z d/dz and a- as z^{-1} g(z d/dz)
// with g(n) = e_n. States are held by their Taylor coefficients; the
// evaluator is a derived view.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "istate/error.hpp"
#include "istate/operators.hpp"
#include "istate/precision.hpp"
#include "istate/specfun.hpp"
#include "istate/spectrum.hpp"

namespace istate {

struct AnalyticState {
  std::vector<cplx> series;  // Taylor coefficients at 0
  std::function<cplx(cplx)> evaluator;
  double domain_radius = std::numeric_limits<double>::infinity();

  cplx operator()(cplx z) const { return evaluator ? evaluator(z) : series_value(z); }

  /// Horner sum of the stored coefficients.
  cplx series_value(cplx z) const {
    cplx s{};
    for (std::size_t k = series.size(); k-- > 0;) s = s * z + series[k];
    return s;
  }

  /// k-th derivative of the truncated series at z.
  cplx series_derivative(cplx z, std::size_t order) const {
    cplx s{};
    for (std::size_t n = series.size(); n-- > order;) {
      double fall = 1.0;
      for (std::size_t j = 0; j < order; ++j) fall *= static_cast<double>(n - j);
      s = s * z + fall * series[n];
    }
    return s;
  }

  /// Size of the last few stored terms at radius r; a heuristic for the
  /// error of the truncated series when coefficients decay fast.
  double truncation_bound(double r) const {
    double b = 0.0;
    const std::size_t N = series.size();
    for (std::size_t n = N >= 3 ? N - 3 : 0; n < N; ++n) b += std::abs(series[n]) * std::pow(r, static_cast<double>(n));
    return b;
  }
};

namespace detail {
inline AnalyticState polynomial_state(std::vector<cplx> series, double radius) {
  AnalyticState f;
  f.series = std::move(series);
  f.domain_radius = radius;
  f.evaluator = [coeffs = f.series](cplx z) {
    cplx s{};
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * z + coeffs[k];
    return s;
  };
  return f;
}

inline double bargmann_radius(const Spectrum& s) {
  const RadiusEstimate R = radius_of_convergence(s);
  if (R.infinite() || !R.converged) return std::numeric_limits<double>::infinity();
  return std::sqrt(R.value);
}
}  // namespace detail

/// F_n = e^{i alpha e_n} c_n / sqrt(f(n)).
inline AnalyticState bargmann_transform(const FockState& st, const Spectrum& s) {
  if (st.trunc() == 0) throw Error(Reason::InvalidArgument, "empty state");
  if (st.trunc() - 1 > s.max_index()) throw Error(Reason::TruncationMismatch, "state is longer than the spectrum");
  std::vector<cplx> F(st.trunc());
  for (std::size_t n = 0; n < F.size(); ++n)
    F[n] = st[n] * detail::phase(st.alpha * s[n]) * std::exp(-0.5 * s.log_f(n));
  return detail::polynomial_state(std::move(F), detail::bargmann_radius(s));
}

/// Inverse map: c_n = e^{-i alpha e_n} sqrt(f(n)) F_n for n < trunc (not renormalized).
inline FockState inverse_bargmann(const AnalyticState& f, const Spectrum& s, double alpha, std::size_t trunc) {
  if (trunc > f.series.size() || trunc == 0 || trunc - 1 > s.max_index())
    throw Error(Reason::TruncationMismatch, "trunc exceeds the stored series or spectrum");
  std::vector<cplx> c(trunc);
  for (std::size_t n = 0; n < trunc; ++n)
    c[n] = f.series[n] * std::exp(0.5 * s.log_f(n)) * detail::phase(-alpha * s[n]);
  return {std::move(c), alpha};
}

/// (a- F)_n = e_{n+1} F_{n+1}. Works for any stored spectrum.
inline AnalyticState apply_lowering_analytic(const AnalyticState& f, const Spectrum& s) {
  const std::size_t N = f.series.size();
  if (N == 0) return f;
  if (N - 1 > s.max_index()) throw Error(Reason::TruncationMismatch, "series is longer than the spectrum");
  std::vector<cplx> out(N, cplx{});
  for (std::size_t n = 0; n + 1 < N; ++n) out[n] = s[n + 1] * f.series[n + 1];
  return detail::polynomial_state(std::move(out), f.domain_radius);
}

/// (a+ F)(z) = z F(z). The stored length grows by one.
inline AnalyticState apply_raising_analytic(const AnalyticState& f) {
  std::vector<cplx> out(f.series.size() + 1, cplx{});
  for (std::size_t n = 0; n < f.series.size(); ++n) out[n + 1] = f.series[n];
  return detail::polynomial_state(std::move(out), f.domain_radius);
}

/// N = z d/dz
inline AnalyticState apply_number_analytic(const AnalyticState& f) {
  std::vector<cplx> out(f.series.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = static_cast<double>(n) * f.series[n];
  return detail::polynomial_state(std::move(out), f.domain_radius);
}

/// a- as a differential operator evaluated at z: d/dz for e_n = n,
/// z d^2/dz^2 + (v+1) d/dz for e_n = n(n+v). Custom spectra have no closed
/// differential form.
inline cplx lowering_differential(const AnalyticState& f, const Spectrum& s, cplx z) {
  switch (s.kind()) {
    case SpectrumKind::Harmonic: return f.series_derivative(z, 1);
    case SpectrumKind::InfiniteWell:
    case SpectrumKind::PoschlTeller:
      return z * f.series_derivative(z, 2) + (s.upsilon() + 1.0) * f.series_derivative(z, 1);
    case SpectrumKind::Custom: break;
  }
  throw Error(Reason::Unsupported, "custom spectra only support the coefficient-level lowering operator");
}

/// Sum_n conj(e^{i alpha e_n} c_n) w^n / sqrt(f(n)) = conj(F(conj w)).
inline cplx bargmann_overlap(const FockState& st, const Spectrum& s, cplx w) {
  const AnalyticState f = bargmann_transform(st, s);
  return std::conj(f.series_value(std::conj(w)));
}

// ---------------------------------------------------------------------------
// Poschl-Teller intelligent states from the Kummer equation. On e_n = n(n+v)
// the eigenvalue problem ((1+l) a- + (1-l) a+) F = 2 z' F reads
//   (1+l)(z F'' + (v+1) F') + (1-l) z F - 2 z' F = 0,
// solved by F = e^{cz} 1F1(a; v+1; -2cz) with c^2 = (l-1)/(l+1) and
// a = (v+1)/2 - z'/((1+l) c). Using (1+l)c instead of sqrt(l^2-1) keeps a
// tied to the chosen branch of c, so both branches give the same F.

struct PtKummerParams {
  cplx c{};
  cplx a{};
  double b = 0.0;
  bool confluent_limit = false;  // |l - 1| < 1e-8: F = 0F1(; v+1; z' z)
};

inline PtKummerParams pt_kummer_params(cplx z_prime, cplx lambda, double upsilon, int branch = +1) {
  if (!(lambda.real() > 0.0))
    throw Error(Reason::NonNormalizable,
                "Re lambda must be positive: the commutator mean <G> must stay positive for a normalizable state");
  if (!(upsilon >= 2.0)) throw Error(Reason::OutOfRange, "upsilon must be >= 2");
  if (branch != 1 && branch != -1) throw Error(Reason::InvalidArgument, "branch must be +1 or -1");
  PtKummerParams k;
  k.b = upsilon + 1.0;
  if (std::abs(lambda - 1.0) < 1e-8) {
    k.confluent_limit = true;
    return k;
  }
  k.c = static_cast<double>(branch) * std::sqrt((lambda - 1.0) / (lambda + 1.0));
  k.a = 0.5 * k.b - z_prime / ((1.0 + lambda) * k.c);
  return k;
}

/// Analytic GIS on the Poschl-Teller spectrum with F(0) = 1. Taylor
/// coefficients come from the Cauchy product of e^{cz} and the Kummer series
/// in 50-digit arithmetic; the evaluator uses the double-precision 1F1.
inline AnalyticState pt_gis_analytic(cplx z_prime, cplx lambda, double upsilon, std::size_t n_terms = 80,
                                     int branch = +1) {
  const PtKummerParams k = pt_kummer_params(z_prime, lambda, upsilon, branch);
  if (n_terms == 0) throw Error(Reason::InvalidArgument, "n_terms must be positive");
  AnalyticState f;
  f.series.resize(n_terms);
  if (k.confluent_limit) {
    // F_n = z'^n / (n! (v+1)_n)
    cplx t = 1.0;
    for (std::size_t n = 0; n < n_terms; ++n) {
      if (n > 0) t *= z_prime / (static_cast<double>(n) * (static_cast<double>(n) + upsilon));
      f.series[n] = t;
    }
    f.evaluator = [z_prime, b = k.b](cplx z) { return specfun::hyp_0f1(b, z_prime * z).value; };
    return f;
  }
  const ext_complex c = to_ext(k.c), a = to_ext(k.a), m2c = ext_complex(-2) * c;
  const ext_real b = k.b;
  std::vector<ext_complex> ec(n_terms), km(n_terms);
  ec[0] = ext_complex(1);
  km[0] = ext_complex(1);
  for (std::size_t j = 1; j < n_terms; ++j) {
    const ext_real jj = static_cast<double>(j);
    ec[j] = ec[j - 1] * c / jj;
    km[j] = km[j - 1] * (a + ext_real(jj - 1)) / (b + ext_real(jj - 1)) * m2c / jj;
  }
  for (std::size_t n = 0; n < n_terms; ++n) {
    ext_complex s(0);
    for (std::size_t j = 0; j <= n; ++j) s += ec[n - j] * km[j];
    f.series[n] = to_double(s);
  }
  f.evaluator = [c = k.c, a = k.a, b = k.b](cplx z) {
    return std::exp(c * z) * specfun::hyp_1f1(a, b, -2.0 * c * z).value;
  };
  return f;
}

/// conj(F(conj w)) from the closed form with conjugated parameters:
/// e^{c* w} 1F1(a*; v+1; -2 c* w), or 0F1(; v+1; conj(z') w) at l = 1.
inline cplx pt_gis_overlap(cplx z_prime, cplx lambda, double upsilon, cplx w) {
  const PtKummerParams k = pt_kummer_params(z_prime, lambda, upsilon);
  if (k.confluent_limit) return specfun::hyp_0f1(k.b, std::conj(z_prime) * w).value;
  const cplx cc = std::conj(k.c);
  return std::exp(cc * w) * specfun::hyp_1f1(std::conj(k.a), k.b, -2.0 * cc * w).value;
}

/// |(1+l)(z F'' + (v+1)F') + (1-l) z F - 2 z' F| relative to the sum of the
/// magnitudes of its three pieces, via series differentiation.
inline double pt_ode_residual(const AnalyticState& f, cplx z_prime, cplx lambda, double upsilon, cplx z) {
  const cplx F = f.series_value(z);
  const cplx d1 = f.series_derivative(z, 1), d2 = f.series_derivative(z, 2);
  const cplx p1 = (1.0 + lambda) * (z * d2 + (upsilon + 1.0) * d1);
  const cplx p2 = (1.0 - lambda) * z * F;
  const cplx p3 = -2.0 * z_prime * F;
  const double scale = std::abs(p1) + std::abs(p2) + std::abs(p3);
  return scale > 0.0 ? std::abs(p1 + p2 + p3) / scale : 0.0;
}

/// max_n |F_n sqrt(f(n)) - d_n| / max(|d_n|, floor max|d|) for n < n_max,
/// where d_n = e^{i alpha e_n} c_n / c_0 are the algebraic coefficients.
inline double analytic_vs_algebraic(const AnalyticState& f, const FockState& st, const Spectrum& s,
                                    std::size_t n_max, double floor = 1e-12) {
  const std::size_t N = std::min({n_max, f.series.size(), st.trunc()});
  if (N == 0 || st[0] == 0.0) throw Error(Reason::InvalidArgument, "need a state with c_0 != 0");
  std::vector<cplx> d(N), t(N);
  double top = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    d[n] = st[n] * detail::phase(st.alpha * s[n]) / st[0];
    t[n] = f.series[n] * std::exp(0.5 * s.log_f(n)) / f.series[0];
    top = std::max(top, std::abs(d[n]));
  }
  double worst = 0.0;
  for (std::size_t n = 0; n < N; ++n)
    worst = std::max(worst, std::abs(t[n] - d[n]) / std::max(std::abs(d[n]), floor * top));
  return worst;
}

}  // namespace istate
