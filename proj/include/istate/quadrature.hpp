#pragma once

// Thin wrappers over Boost.Math quadrature: double-exponential rules on
// dyadic panels for half-line moment integrals, and graded composite
// Gauss-Legendre for finite intervals with algebraic endpoint behaviour.

#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace istate::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated error estimate reported by the rule
  double cutoff = 0.0;  // right end of the last panel used
  std::size_t panels = 0;
  bool converged = true;
};

namespace detail {
inline boost::math::quadrature::tanh_sinh<double>& ts_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}
}  // namespace detail

/// Integral of f over [a, b] with relative tolerance tol.
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-14) {
  QuadResult r;
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  try {
    r.value = detail::ts_rule().integrate(f, a, b, tol, &err, &l1, &levels);
  } catch (const boost::math::evaluation_error&) {
    // non-finite integrand value: not integrable at the requested accuracy
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.error = std::numeric_limits<double>::infinity();
    r.converged = false;
    return r;
  }
  r.error = err;  // |difference of the last two levels|, absolute
  r.cutoff = b;
  r.panels = 1;
  r.converged = std::isfinite(r.value) && err <= 10.0 * tol * l1;
  return r;
}

/// Integral of f over [0, upper) for integrands with a decaying tail.
/// Panels [0,1], [1,2], [2,4], ... are added until a panel beyond the peak
/// contributes less than tail_tol of the running total.
template <class F>
QuadResult integrate_half_line(F&& f, double tol = 1e-14, double tail_tol = 1e-17,
                               double upper = std::numeric_limits<double>::infinity()) {
  QuadResult total;
  double a = 0.0, b = std::min(1.0, upper);
  for (std::size_t k = 0; k < 2000; ++k) {
    const QuadResult p = integrate(f, a, b, tol);
    total.value += p.value;
    total.error += p.error;
    total.converged = total.converged && p.converged;
    total.cutoff = b;
    ++total.panels;
    if (b >= upper) return total;
    const bool decaying = std::abs(f(b)) <= std::abs(f(a)) || a == 0.0;
    if (b >= 4.0 && decaying && std::abs(p.value) <= tail_tol * std::abs(total.value)) return total;
    a = b;
    b = std::min(2.0 * b, upper);
  }
  total.converged = false;
  return total;
}

/// Composite 20-point Gauss-Legendre on [a, b]; panels shrink geometrically
/// towards both endpoints so algebraic endpoint factors stay resolved.
template <class F>
double gauss_legendre_graded(F&& f, double a, double b, std::size_t levels = 14, double ratio = 0.25,
                             std::size_t interior_panels = 16) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const double len = b - a;
  const double edge = 0.125 * len;  // width of each graded end zone
  double sum = 0.0;
  // interior
  const double lo = a + edge, hi = b - edge;
  const double h = (hi - lo) / static_cast<double>(interior_panels);
  for (std::size_t i = 0; i < interior_panels; ++i) sum += rule::integrate(f, lo + i * h, lo + (i + 1) * h);
  // graded end zones: [a + edge r^{k+1}, a + edge r^k]
  double outer = edge;
  for (std::size_t k = 0; k < levels; ++k) {
    const double inner = outer * ratio;
    sum += rule::integrate(f, a + inner, a + outer);
    sum += rule::integrate(f, b - outer, b - inner);
    outer = inner;
  }
  sum += rule::integrate(f, a, a + outer);
  sum += rule::integrate(f, b - outer, b);
  return sum;
}

}  // namespace istate::quad
