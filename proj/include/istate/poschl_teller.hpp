#pragma once

// Trigonometric Poschl-Teller well on (0, pi a) and its infinite-well limit
// kappa = lambda = 1. Energies are in units of 1/a^2 (a = 1 gives the
// dimensionless spectrum n(n + kappa + lambda)).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "istate/error.hpp"
#include "istate/specfun.hpp"
#include "istate/spectrum.hpp"

namespace istate {

struct PtParams {
  double kappa = 1.5;
  double lambda_pot = 1.5;
  double a_scale = 1.0;

  double upsilon() const noexcept { return kappa + lambda_pot; }
  bool is_well() const noexcept { return kappa == 1.0 && lambda_pot == 1.0; }
  double width() const noexcept { return std::numbers::pi * a_scale; }

  static PtParams make(double kappa, double lambda_pot, double a_scale = 1.0) {
    PtParams p{kappa, lambda_pot, a_scale};
    p.validate();
    return p;
  }

  void validate() const {
    if (!(a_scale > 0.0) || !std::isfinite(a_scale)) throw Error(Reason::OutOfRange, "a must be positive");
    if (is_well()) return;
    if (!(kappa > 1.0) || !(lambda_pot > 1.0))
      throw Error(Reason::OutOfRange, "kappa and lambda must both exceed 1 (or both equal 1 for the infinite well)");
  }
};

inline Spectrum pt_spectrum(const PtParams& p, std::size_t n_max) {
  p.validate();
  return p.is_well() ? Spectrum::infinite_well(n_max) : Spectrum::poschl_teller(p.kappa, p.lambda_pot, n_max);
}

/// Spectrum e_n = n(n+v) from v alone (v = 2 is the infinite well).
inline Spectrum pt_spectrum_upsilon(double upsilon, std::size_t n_max) {
  if (upsilon == 2.0) return Spectrum::infinite_well(n_max);
  return Spectrum::poschl_teller(0.5 * upsilon, 0.5 * upsilon, n_max);
}

inline double pt_potential(double x, const PtParams& p) {
  if (x <= 0.0 || x >= p.width()) return std::numeric_limits<double>::infinity();
  const double t = x / (2.0 * p.a_scale);
  const double s = std::sin(t), c = std::cos(t);
  const double k = p.kappa, l = p.lambda_pot, a2 = p.a_scale * p.a_scale;
  return (k * (k - 1.0) / (s * s) + l * (l - 1.0) / (c * c)) / (4.0 * a2) - (k + l) * (k + l) / (4.0 * a2);
}

namespace detail {
inline double pt_inside(double x, const PtParams& p) {
  if (!(x > 0.0) || !(x < p.width())) throw Error(Reason::OutOfRange, "x must lie strictly inside (0, pi a)");
  return x / (2.0 * p.a_scale);
}
}  // namespace detail

/// W = (1/2a) [kappa cot(x/2a) - lambda tan(x/2a)]
inline double pt_superpotential(double x, const PtParams& p) {
  const double t = detail::pt_inside(x, p);
  return (p.kappa / std::tan(t) - p.lambda_pot * std::tan(t)) / (2.0 * p.a_scale);
}

/// dW/dx = -(1/4a^2) [kappa / sin^2 + lambda / cos^2]
inline double pt_superpotential_derivative(double x, const PtParams& p) {
  const double t = detail::pt_inside(x, p);
  const double s = std::sin(t), c = std::cos(t);
  return -(p.kappa / (s * s) + p.lambda_pot / (c * c)) / (4.0 * p.a_scale * p.a_scale);
}

/// log of the normalization constant c_n(kappa, lambda) as printed:
///   a Gamma(n+1) Gamma(k+1/2)^2 Gamma(n+l+1/2) / (Gamma(n+k+1/2) Gamma(n+k+l) Gamma(2n+k+l))
inline double pt_log_norm_constant_printed(std::size_t n, const PtParams& p) {
  using specfun::log_gamma;
  const double x = static_cast<double>(n), k = p.kappa, l = p.lambda_pot;
  return std::log(p.a_scale) + log_gamma(x + 1.0) + 2.0 * log_gamma(k + 0.5) + log_gamma(x + l + 0.5) -
         log_gamma(x + k + 0.5) - log_gamma(x + k + l) - log_gamma(2.0 * x + k + l);
}

/// Same constant with Gamma(2n+k+l) replaced by (2n+k+l); this is the value
/// that makes the wavefunctions unit-normalized on (0, pi a).
inline double pt_log_norm_constant_corrected(std::size_t n, const PtParams& p) {
  const double x = static_cast<double>(n), v = p.upsilon();
  return pt_log_norm_constant_printed(n, p) + specfun::log_gamma(2.0 * x + v) - std::log(2.0 * x + v);
}

namespace detail {
inline double pt_wavefunction_shape(std::size_t n, double x, const PtParams& p, double log_c) {
  if (n > 60) throw Error(Reason::OutOfRange, "wavefunctions are validated for n <= 60");
  const double t = pt_inside(x, p);
  const double k = p.kappa, l = p.lambda_pot;
  const double nn = static_cast<double>(n);
  const double log_pref = -0.5 * log_c + specfun::log_gamma(nn + 1.0) + specfun::log_gamma(k + 0.5) -
                          specfun::log_gamma(nn + k + 0.5);
  const double env = l * std::log(std::cos(t)) + k * std::log(std::sin(t));
  return std::exp(log_pref + env) * specfun::jacobi_p(n, k - 0.5, l - 0.5, std::cos(x / p.a_scale));
}
}  // namespace detail

/// psi_n(x) with the printed normalization constant and prefactor
/// n! Gamma(k+1/2) / Gamma(n+k+1/2).
inline double pt_wavefunction(std::size_t n, double x, const PtParams& p) {
  return detail::pt_wavefunction_shape(n, x, p, pt_log_norm_constant_printed(n, p));
}

inline double pt_wavefunction_normalized(std::size_t n, double x, const PtParams& p) {
  return detail::pt_wavefunction_shape(n, x, p, pt_log_norm_constant_corrected(n, p));
}

/// N(r) = sqrt(r^v / I_v(2r)), the normalization of
/// N sum_n z^n / sqrt(n! Gamma(n+v+1)) |psi_n>. N(0) = sqrt(Gamma(v+1)).
inline double pt_coherent_norm(double r, double upsilon) {
  if (r < 0.0) throw Error(Reason::InvalidArgument, "r must be non-negative");
  if (r == 0.0) return std::exp(0.5 * specfun::log_gamma(upsilon + 1.0));
  return std::exp(0.5 * (upsilon * std::log(r) - specfun::log_bessel_i(upsilon, 2.0 * r)));
}

/// c0(r) = 1/sqrt(sum r^{2n}/f(n)) for f(n) = e_1 ... e_n = n! Gamma(n+v+1)/Gamma(v+1);
/// differs from N(r) by the constant sqrt(Gamma(v+1)).
inline double pt_coherent_c0(double r, double upsilon) {
  return pt_coherent_norm(r, upsilon) * std::exp(-0.5 * specfun::log_gamma(upsilon + 1.0));
}

/// <G> = (1+v) + 2 r^2/(1+v) * 0F1(2+v; r^2) / 0F1(1+v; r^2) on Gazeau-Klauder states.
inline double pt_mean_G(double r, double upsilon) {
  if (r < 0.0) throw Error(Reason::InvalidArgument, "r must be non-negative");
  const double r2 = r * r;
  if (r2 == 0.0) return 1.0 + upsilon;
  const double num0 = specfun::hyp_0f1(2.0 + upsilon, r2).value.real();
  const double den = specfun::hyp_0f1(1.0 + upsilon, r2).value.real();
  return (1.0 + upsilon) + 2.0 * r2 / (1.0 + upsilon) * num0 / den;
}

}  // namespace istate
