#pragma once

// Resolution of unity for Gazeau-Klauder states. With
//   dmu(z) = c0(|z|)^{-2} h(r^2) r dr dphi,  c0^{-2} = sum_n r^{2n}/f(n),
// the angular integral kills off-diagonal terms and the diagonal becomes
//   (pi / f(n)) * int_0^{R^2} h(u) u^n du,
// so everything reduces to the moment condition int h(u) u^{n-1} du = f(n-1)/pi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "istate/error.hpp"
#include "istate/poschl_teller.hpp"
#include "istate/quadrature.hpp"
#include "istate/specfun.hpp"
#include "istate/spectrum.hpp"

namespace istate {

struct MeasureSpec {
  std::function<double(double)> density;  // u -> h(u), u >= 0
  double support_radius_sq = std::numeric_limits<double>::infinity();
  std::string description;

  static MeasureSpec analytic(std::function<double(double)> h, std::string desc,
                              double support = std::numeric_limits<double>::infinity()) {
    return {std::move(h), support, std::move(desc)};
  }

  /// Piecewise-linear interpolation of (u_i, h_i); zero past the last node.
  static MeasureSpec tabulated(std::vector<double> u, std::vector<double> h, std::string desc) {
    if (u.size() != h.size() || u.size() < 2) throw Error(Reason::InvalidArgument, "tabulated density needs matching grids");
    if (!std::is_sorted(u.begin(), u.end())) throw Error(Reason::InvalidArgument, "tabulated grid must be increasing");
    const double last = u.back();
    auto f = [u = std::move(u), h = std::move(h)](double x) {
      if (x < u.front() || x > u.back()) return 0.0;
      const auto it = std::upper_bound(u.begin(), u.end(), x);
      const std::size_t i = it == u.end() ? u.size() - 1 : static_cast<std::size_t>(it - u.begin());
      const double t = (x - u[i - 1]) / (u[i] - u[i - 1]);
      return h[i - 1] + t * (h[i] - h[i - 1]);
    };
    return {std::move(f), last, std::move(desc)};
  }

  /// h(u) = e^{-u}/pi, the harmonic-oscillator density.
  static MeasureSpec harmonic() {
    return analytic([](double u) { return std::exp(-u) / std::numbers::pi; }, "harmonic: exp(-u)/pi");
  }

  /// Throws unless h >= 0 on a log-spaced sample of (0, min(R^2, u_max)].
  void check_positive(double u_max = 2500.0, std::size_t samples = 400) const {
    const double top = std::min(support_radius_sq, u_max);
    for (std::size_t i = 0; i < samples; ++i) {
      const double u = top * std::pow(1e-8, 1.0 - static_cast<double>(i) / static_cast<double>(samples - 1));
      const double v = density(u);
      if (!(v >= 0.0)) throw Error(Reason::InvalidArgument, description + ": density negative or NaN at u=" + num(u));
    }
  }
};

struct MomentReport {
  std::vector<std::size_t> n;
  std::vector<double> numeric, target, rel_residual, error_estimate;

  double max_residual() const {
    double m = 0.0;
    for (double r : rel_residual) m = std::max(m, r);
    return m;
  }
};

namespace detail {
inline void require_infinite_radius(const Spectrum& s) {
  const RadiusEstimate R = radius_of_convergence(s);
  if (!R.infinite())
    throw Error(Reason::Unsupported, "resolution-of-unity checks need an infinite convergence radius");
}
}  // namespace detail

/// int_0^{R^2} h(u) u^k du
inline quad::QuadResult measure_moment(const MeasureSpec& m, std::size_t k, double tol = 1e-14) {
  const double p = static_cast<double>(k);
  auto f = [&](double u) {
    if (u <= 0.0) return k == 0 ? m.density(0.0) : 0.0;
    const double h = m.density(u);
    return h == 0.0 ? 0.0 : h * std::pow(u, p);
  };
  return quad::integrate_half_line(f, tol, 1e-17, m.support_radius_sq);
}

/// residual[n] = |int h u^{n-1} du - f(n-1)/pi| / (f(n-1)/pi), n = 1..n_max.
inline MomentReport moment_report(const MeasureSpec& m, const Spectrum& s, std::size_t n_max, double tol = 1e-14) {
  detail::require_infinite_radius(s);
  if (n_max == 0 || n_max > s.max_index() + 1) throw Error(Reason::OutOfRange, "n_max must lie in 1..max_index+1");
  MomentReport out;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto q = measure_moment(m, n - 1, tol);
    if (!q.converged)
      throw Error(Reason::NonConvergent, "moment " + std::to_string(n) + " quadrature did not converge (error estimate " +
                                             num(q.error) + ")");
    const double target = std::exp(s.log_f(n - 1)) / std::numbers::pi;
    out.n.push_back(n);
    out.numeric.push_back(q.value);
    out.target.push_back(target);
    out.rel_residual.push_back(std::abs(q.value - target) / target);
    out.error_estimate.push_back(q.error / target);
  }
  return out;
}

inline std::vector<double> moment_residuals(const MeasureSpec& m, const Spectrum& s, std::size_t n_max) {
  return moment_report(m, s, n_max).rel_residual;
}

struct UnityReport {
  std::vector<double> diagonal;  // (pi/f(n)) int h u^n du
  double max_deviation = 0.0;    // max |diag - 1|; off-diagonals vanish by the phi integral

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> M(diagonal.size(), std::vector<double>(diagonal.size(), 0.0));
    for (std::size_t i = 0; i < diagonal.size(); ++i) M[i][i] = diagonal[i];
    return M;
  }
};

/// The phase label alpha only enters through e^{-i alpha e_n}, which cancels
/// in |c_n|^2; it is accepted for interface symmetry.
inline UnityReport unity_resolution_check(const MeasureSpec& m, const Spectrum& s, double /*alpha*/,
                                          std::size_t trunc) {
  const MomentReport rep = moment_report(m, s, trunc);
  UnityReport out;
  for (std::size_t i = 0; i < rep.numeric.size(); ++i) {
    const double d = rep.numeric[i] / rep.target[i];
    out.diagonal.push_back(d);
    out.max_deviation = std::max(out.max_deviation, std::abs(d - 1.0));
  }
  return out;
}

/// Radial density (2/pi) I_v(2r) K_nu(2r) against r dr dphi.
inline double pt_measure_density_order(double r, double upsilon, double nu) {
  if (r < 0.0) throw Error(Reason::InvalidArgument, "radius must be non-negative");
  if (r == 0.0) {
    // I_v(2r) K_nu(2r) ~ r^{v-nu} Gamma(nu)/(2 Gamma(v+1)) near 0
    if (upsilon > nu) return 0.0;
    if (upsilon == nu) return (2.0 / std::numbers::pi) * 0.5 / upsilon;
    return std::numeric_limits<double>::infinity();
  }
  const double x = 2.0 * r;
  // scaled product keeps e^{x} e^{-x} out of the arithmetic
  return (2.0 / std::numbers::pi) * specfun::bessel_i_scaled(upsilon, x) * specfun::bessel_k_scaled(nu, x);
}

/// The closed form exactly as printed: K order (kappa+lambda)/2.
inline double pt_measure_density(double r, double upsilon) {
  if (!(upsilon >= 2.0)) throw Error(Reason::OutOfRange, "upsilon = kappa + lambda must be >= 2");
  return pt_measure_density_order(r, upsilon, 0.5 * upsilon);
}

/// h-form of the radial density above. Since c0^{-2}(r) = Gamma(v+1) r^{-v} I_v(2r)
/// for the spectrum e_n = n(n+v),
///   h(u) = (2 / (pi Gamma(v+1))) u^{v/2} K_nu(2 sqrt u).
inline MeasureSpec pt_measure_spec(double upsilon, double nu) {
  const double log_pref = std::log(2.0 / std::numbers::pi) - specfun::log_gamma(upsilon + 1.0);
  auto h = [=](double u) {
    if (u <= 0.0) {
      if (upsilon > nu) return 0.0;
      if (upsilon == nu) return std::exp(log_pref + specfun::log_gamma(nu) - std::log(2.0));
      return std::numeric_limits<double>::infinity();
    }
    const double t = 2.0 * std::sqrt(u);
    double log_k;
    if (t < 1e-8 && nu > 1e-3) {
      // leading small-argument term; avoids overflow of K itself
      log_k = specfun::log_gamma(nu) - std::log(2.0) - nu * std::log(0.5 * t);
    } else {
      log_k = std::log(specfun::bessel_k_scaled(nu, t)) - t;
    }
    return std::exp(log_pref + 0.5 * upsilon * std::log(u) + log_k);
  };
  return MeasureSpec::analytic(h, "poschl_teller: (2/pi) I_" + num(upsilon) + "(2r) K_" + num(nu) + "(2r)");
}

struct OrderFit {
  double nu = 0.0;
  double max_residual = 0.0;
  MomentReport report;
};

/// Least-squares fit of the K order against the moment condition for
/// n = 1..n_max. Each moment is monotone in nu, so a golden-section search on
/// the summed squared log-residuals is enough.
inline OrderFit fit_pt_measure_order(double upsilon, std::size_t n_max, double lo, double hi) {
  const Spectrum s = pt_spectrum_upsilon(upsilon, std::max<std::size_t>(n_max, 1));
  auto cost = [&](double nu) {
    const MomentReport rep = moment_report(pt_measure_spec(upsilon, nu), s, n_max, 1e-12);
    double c = 0.0;
    for (std::size_t i = 0; i < rep.numeric.size(); ++i) {
      const double l = std::log(rep.numeric[i] / rep.target[i]);
      c += l * l;
    }
    return c;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = cost(x1), f2 = cost(x2);
  while (b - a > 1e-9 * std::max(1.0, std::abs(a))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = cost(x2);
    }
  }
  OrderFit out;
  out.nu = 0.5 * (a + b);
  out.report = moment_report(pt_measure_spec(upsilon, out.nu), s, n_max);
  out.max_residual = out.report.max_residual();
  return out;
}

}  // namespace istate
