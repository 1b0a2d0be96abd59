#pragma once

// Discrete non-degenerate spectra e_0 = 0 < e_1 < e_2 < ... and the
// factorial moment f(n) = e_1 e_2 ... e_n that governs every normalization.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "istate/error.hpp"

namespace istate {

enum class SpectrumKind { Harmonic, InfiniteWell, PoschlTeller, Custom };

constexpr const char* to_string(SpectrumKind k) noexcept {
  switch (k) {
    case SpectrumKind::Harmonic: return "harmonic";
    case SpectrumKind::InfiniteWell: return "infinite_well";
    case SpectrumKind::PoschlTeller: return "poschl_teller";
    case SpectrumKind::Custom: return "custom";
  }
  return "unknown";
}

struct FactorialMoment {
  std::size_t n = 0;
  double log_value = 0.0;  // log f(n)

  double value() const { return std::exp(log_value); }
};

class Spectrum {
 public:
  /// e_n = n.
  static Spectrum harmonic(std::size_t n_max) {
    require_n_max(n_max);
    std::vector<double> e(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) e[n] = static_cast<double>(n);
    return Spectrum(SpectrumKind::Harmonic, std::move(e), 0.0, 0.0);
  }

  /// e_n = n(n+2), the kappa = lambda = 1 limit of the trigonometric
  /// Poschl-Teller family.
  static Spectrum infinite_well(std::size_t n_max) {
    require_n_max(n_max);
    return Spectrum(SpectrumKind::InfiniteWell, pt_energies(2.0, n_max), 1.0, 1.0);
  }

  /// e_n = n(n + kappa + lambda) with kappa, lambda > 1.
  static Spectrum poschl_teller(double kappa, double lambda_pot, std::size_t n_max) {
    require_n_max(n_max);
    if (!(kappa > 1.0) || !(lambda_pot > 1.0) || !std::isfinite(kappa) || !std::isfinite(lambda_pot))
      throw Error(Reason::OutOfRange, "Poschl-Teller parameters require kappa > 1 and lambda > 1");
    return Spectrum(SpectrumKind::PoschlTeller, pt_energies(kappa + lambda_pot, n_max), kappa, lambda_pot);
  }

  /// Explicit energies; validated (e_0 = 0, strictly increasing, finite).
  static Spectrum custom(std::vector<double> energies) {
    if (energies.size() < 2)
      throw Error(Reason::InvalidSpectrum, "custom spectrum needs at least e_0 and e_1");
    return Spectrum(SpectrumKind::Custom, std::move(energies), 0.0, 0.0);
  }

  SpectrumKind kind() const noexcept { return kind_; }
  std::size_t max_index() const noexcept { return energies_.size() - 1; }
  std::span<const double> energies() const noexcept { return energies_; }

  /// Potential parameters; meaningful for PoschlTeller and InfiniteWell only.
  double kappa() const noexcept { return kappa_; }
  double lambda_pot() const noexcept { return lambda_pot_; }
  /// kappa + lambda for the trigonometric family, 0 otherwise.
  double upsilon() const noexcept { return kappa_ + lambda_pot_; }

  bool has_analytic_form() const noexcept { return kind_ != SpectrumKind::Custom; }

  double energy(std::size_t n) const {
    if (n > max_index())
      throw Error(Reason::OutOfRange, "energy index " + std::to_string(n) + " exceeds stored range " +
                                          std::to_string(max_index()));
    return energies_[n];
  }

  /// Unchecked access for hot loops that already validated the range.
  double operator[](std::size_t n) const noexcept { return energies_[n]; }

  /// log f(n), prefix sums of log e_k accumulated with compensation.
  double log_f(std::size_t n) const {
    if (n > max_index())
      throw Error(Reason::OutOfRange, "factorial moment index " + std::to_string(n) +
                                          " exceeds stored range " + std::to_string(max_index()));
    return log_f_[n];
  }

  std::span<const double> log_f_table() const noexcept { return log_f_; }

  /// The same analytic spectrum stored up to a different n_max.
  Spectrum resized(std::size_t n_max) const {
    switch (kind_) {
      case SpectrumKind::Harmonic: return harmonic(n_max);
      case SpectrumKind::InfiniteWell: return infinite_well(n_max);
      case SpectrumKind::PoschlTeller: return poschl_teller(kappa_, lambda_pot_, n_max);
      case SpectrumKind::Custom:
        if (n_max > max_index())
          throw Error(Reason::OutOfRange, "custom spectra cannot be extended beyond their stored energies");
        return custom(std::vector<double>(energies_.begin(), energies_.begin() + static_cast<long>(n_max) + 1));
    }
    return *this;
  }

  /// G(n) = e_{n+1} - e_n, the eigenvalues of the commutator [a-, a+].
  double gap(std::size_t n) const { return energy(n + 1) - energy(n); }

 private:
  Spectrum(SpectrumKind kind, std::vector<double> energies, double kappa, double lambda_pot)
      : kind_(kind), energies_(std::move(energies)), kappa_(kappa), lambda_pot_(lambda_pot) {
    validate();
    build_log_f();
  }

  static void require_n_max(std::size_t n_max) {
    if (n_max == 0) throw Error(Reason::InvalidArgument, "n_max must be at least 1");
  }

  static std::vector<double> pt_energies(double upsilon, std::size_t n_max) {
    std::vector<double> e(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double x = static_cast<double>(n);
      e[n] = x * (x + upsilon);
    }
    return e;
  }

  void validate() const {
    if (energies_.empty()) throw Error(Reason::InvalidSpectrum, "empty spectrum");
    if (energies_[0] != 0.0) throw Error(Reason::InvalidSpectrum, "ground state energy e_0 must be exactly 0");
    for (std::size_t n = 0; n < energies_.size(); ++n) {
      const double e = energies_[n];
      if (!std::isfinite(e) || e < 0.0)
        throw Error(Reason::InvalidSpectrum, "energy e_" + std::to_string(n) + " is negative or not finite");
      if (n > 0 && !(e > energies_[n - 1]))
        throw Error(Reason::InvalidSpectrum, "energies must be strictly increasing (violated at n=" +
                                                 std::to_string(n) + ")");
    }
  }

  void build_log_f() {
    log_f_.assign(energies_.size(), 0.0);
    double sum = 0.0, comp = 0.0;  // Neumaier summation
    for (std::size_t n = 1; n < energies_.size(); ++n) {
      const double term = std::log(energies_[n]);
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
      log_f_[n] = sum + comp;
    }
  }

  SpectrumKind kind_;
  std::vector<double> energies_;
  std::vector<double> log_f_;
  double kappa_ = 0.0;
  double lambda_pot_ = 0.0;
};

inline Spectrum make_builtin_spectrum(SpectrumKind kind, std::size_t n_max, double kappa = 0.0,
                                      double lambda_pot = 0.0) {
  switch (kind) {
    case SpectrumKind::Harmonic: return Spectrum::harmonic(n_max);
    case SpectrumKind::InfiniteWell: return Spectrum::infinite_well(n_max);
    case SpectrumKind::PoschlTeller: return Spectrum::poschl_teller(kappa, lambda_pot, n_max);
    case SpectrumKind::Custom: break;
  }
  throw Error(Reason::InvalidArgument, "custom spectra are built from explicit energies");
}

inline FactorialMoment factorial_moment(const Spectrum& s, std::size_t n) { return {n, s.log_f(n)}; }

struct RadiusEstimate {
  double value = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool converged = true;
  std::string note;

  bool infinite() const { return std::isinf(value); }
};

/// R = lim f(n)^{1/n}. Analytic spectra are known to give R = infinity.
/// Custom spectra are extrapolated from the last quarter of stored terms by
/// a least-squares fit f(n)^{1/n} ~ R + b/n; the interval combines the fit's
/// standard error with the spread between the full and half windows.
inline RadiusEstimate radius_of_convergence(const Spectrum& s) {
  RadiusEstimate out;
  if (s.has_analytic_form()) {
    out.note = "analytic: f(n)^(1/n) grows without bound";
    return out;
  }
  const std::size_t n_max = s.max_index();
  const std::size_t width = std::max<std::size_t>(n_max / 4, 4);
  if (n_max < 8 || width + 1 > n_max) {
    out.converged = false;
    out.value = out.lower = out.upper = std::numeric_limits<double>::quiet_NaN();
    out.note = "too few stored terms to estimate the radius";
    return out;
  }

  struct Fit {
    double intercept, stderr_intercept, log_slope;
  };
  auto fit_window = [&](std::size_t first) {
    // Linear regression of v_n = f(n)^(1/n) against x = 1/n, and of
    // L_n = log f(n)/n against log n (growth diagnostic).
    double sx = 0, sy = 0, sxx = 0, sxy = 0, slx = 0, sly = 0, slxx = 0, slxy = 0;
    const double m = static_cast<double>(n_max - first + 1);
    for (std::size_t n = first; n <= n_max; ++n) {
      const double L = s.log_f(n) / static_cast<double>(n);
      const double x = 1.0 / static_cast<double>(n);
      const double y = std::exp(L);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      const double lx = std::log(static_cast<double>(n));
      slx += lx; sly += L; slxx += lx * lx; slxy += lx * L;
    }
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / m;
    double ss = 0;
    for (std::size_t n = first; n <= n_max; ++n) {
      const double x = 1.0 / static_cast<double>(n);
      const double r = std::exp(s.log_f(n) / static_cast<double>(n)) - (intercept + slope * x);
      ss += r * r;
    }
    const double sigma2 = m > 2 ? ss / (m - 2) : 0.0;
    const double se = std::sqrt(sigma2 * sxx / det);
    const double log_slope = (m * slxy - slx * sly) / (m * slxx - slx * slx);
    return Fit{intercept, se, log_slope};
  };

  const Fit full = fit_window(n_max - width);
  const Fit half = fit_window(n_max - width / 2);
  if (full.log_slope > 0.05) {
    out.converged = false;
    out.value = out.lower = out.upper = std::numeric_limits<double>::infinity();
    out.note = "f(n)^(1/n) still growing like n^" + num(full.log_slope) + "; reported as divergent";
    return out;
  }
  const double half_width = 3.0 * full.stderr_intercept + std::abs(full.intercept - half.intercept);
  out.value = full.intercept;
  out.lower = full.intercept - half_width;
  out.upper = full.intercept + half_width;
  out.converged = half_width <= 1e-2 * std::abs(full.intercept);
  out.note = out.converged ? "extrapolated from last quarter of stored terms"
                           : "extrapolation not converged within stored range";
  return out;
}

}  // namespace istate
