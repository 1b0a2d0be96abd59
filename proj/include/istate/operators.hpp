#pragma once

// Truncated Fock-space engine. States are coefficient vectors over the
// eigenbasis |psi_n>; the ladder operators carry the phase convention
//   a-|psi_n> = sqrt(e_n)     e^{ i alpha (e_n - e_{n-1})} |psi_{n-1}>
//   a+|psi_n> = sqrt(e_{n+1}) e^{-i alpha (e_{n+1} - e_n)} |psi_{n+1}>
// and all expectation values are explicit banded sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "istate/error.hpp"
#include "istate/spectrum.hpp"

namespace istate {

using cplx = std::complex<double>;

struct FockState {
  std::vector<cplx> coefficients;
  double tail_mass = 0.0;  // estimate of |c_n|^2 mass outside the stored range
  double alpha = 0.0;      // phase parameter of the ladder operators

  FockState() = default;
  FockState(std::vector<cplx> c, double alpha_, double tail = 0.0)
      : coefficients(std::move(c)), tail_mass(tail), alpha(alpha_) {}

  /// |psi_n> in a space of dimension trunc.
  static FockState basis(std::size_t n, std::size_t trunc, double alpha = 0.0) {
    if (n >= trunc) throw Error(Reason::OutOfRange, "basis index outside truncation");
    std::vector<cplx> c(trunc, cplx{});
    c[n] = 1.0;
    return {std::move(c), alpha};
  }

  std::size_t trunc() const noexcept { return coefficients.size(); }
  const cplx& operator[](std::size_t n) const { return coefficients[n]; }
  cplx& operator[](std::size_t n) { return coefficients[n]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : coefficients) s += std::norm(c);
    return s;
  }

  bool is_normalized(double tol = 1e-12) const { return std::abs(norm_squared() - 1.0) <= tol; }

  FockState& normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw Error(Reason::NonNormalizable, "cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : coefficients) c *= inv;
    return *this;
  }
};

inline cplx inner_product(const FockState& bra, const FockState& ket) {
  const std::size_t n = std::min(bra.trunc(), ket.trunc());
  cplx s{};
  for (std::size_t k = 0; k < n; ++k) s += std::conj(bra[k]) * ket[k];
  return s;
}

namespace detail {

inline void check_lowering_range(const FockState& st, const Spectrum& s) {
  if (st.trunc() == 0) throw Error(Reason::TruncationMismatch, "empty state");
  if (st.trunc() > s.max_index() + 1)
    throw Error(Reason::TruncationMismatch, "state truncation " + std::to_string(st.trunc()) +
                                                " exceeds spectrum range " + std::to_string(s.max_index()));
}

inline void check_raising_range(const FockState& st, const Spectrum& s) {
  if (st.trunc() == 0) throw Error(Reason::TruncationMismatch, "empty state");
  if (st.trunc() > s.max_index())
    throw Error(Reason::TruncationMismatch, "raising needs e_" + std::to_string(st.trunc()) +
                                                " but the spectrum stops at " + std::to_string(s.max_index()));
}

inline cplx phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace detail

/// (a-Psi)_n = c_{n+1} sqrt(e_{n+1}) e^{i alpha (e_{n+1}-e_n)}; the top
/// component has no stored source and is zero. Not renormalized.
inline FockState apply_lowering(const FockState& st, const Spectrum& s) {
  detail::check_lowering_range(st, s);
  const std::size_t T = st.trunc();
  FockState out(std::vector<cplx>(T, cplx{}), st.alpha, st.tail_mass);
  for (std::size_t n = 0; n + 1 < T; ++n) {
    const double e1 = s[n + 1];
    out[n] = st[n + 1] * std::sqrt(e1) * detail::phase(st.alpha * (e1 - s[n]));
  }
  return out;
}

/// (a+Psi)_n = c_{n-1} sqrt(e_n) e^{-i alpha (e_n-e_{n-1})}. The component
/// pushed past trunc-1 is dropped and its mass added to tail_mass.
inline FockState apply_raising(const FockState& st, const Spectrum& s) {
  detail::check_raising_range(st, s);
  const std::size_t T = st.trunc();
  FockState out(std::vector<cplx>(T, cplx{}), st.alpha, st.tail_mass);
  for (std::size_t n = 1; n < T; ++n) {
    const double en = s[n];
    out[n] = st[n - 1] * std::sqrt(en) * detail::phase(-st.alpha * (en - s[n - 1]));
  }
  out.tail_mass += std::norm(st[T - 1]) * s[T];
  return out;
}

/// A+ = (N / g(N)) a+ with g(N) = H, so that [a-, A+] = 1.
inline FockState apply_canonical_raising(const FockState& st, const Spectrum& s) {
  if (st.trunc() < 2) throw Error(Reason::TruncationMismatch, "canonical raising needs trunc >= 2");
  FockState out = apply_raising(st, s);
  // component 0 of a+Psi is always zero, so N/g(N) is only evaluated for n >= 1
  for (std::size_t n = 1; n < out.trunc(); ++n) out[n] *= static_cast<double>(n) / s[n];
  return out;
}

/// Schrodinger propagation e^{-iHt}: c_n -> e^{-i e_n t} c_n. The ladder
/// phase label advances with the state, so a Gazeau-Klauder state |z,alpha>
/// maps onto |z,alpha+t>.
inline FockState evolve(const FockState& st, const Spectrum& s, double t) {
  detail::check_lowering_range(st, s);
  FockState out = st;
  for (std::size_t n = 0; n < st.trunc(); ++n) out[n] = st[n] * detail::phase(-s[n] * t);
  out.alpha = st.alpha + t;
  return out;
}

/// <Psi| G(N) |Psi> from the diagonal eigenvalues e_{n+1} - e_n.
inline double mean_gap(const FockState& st, const Spectrum& s) {
  detail::check_raising_range(st, s);
  double g = 0.0;
  for (std::size_t n = 0; n < st.trunc(); ++n) g += std::norm(st[n]) * (s[n + 1] - s[n]);
  return g;
}

inline double mean_energy(const FockState& st, const Spectrum& s) {
  detail::check_lowering_range(st, s);
  double h = 0.0;
  for (std::size_t n = 0; n < st.trunc(); ++n) h += std::norm(st[n]) * s[n];
  return h;
}

/// || (1-lambda) a+Psi + (1+lambda) a-Psi - 2z Psi || over n < trunc-1.
inline double eigen_residual(const FockState& st, const Spectrum& s, cplx lambda, cplx z) {
  const FockState up = apply_raising(st, s);
  const FockState down = apply_lowering(st, s);
  double r2 = 0.0;
  for (std::size_t n = 0; n + 1 < st.trunc(); ++n)
    r2 += std::norm((1.0 - lambda) * up[n] + (1.0 + lambda) * down[n] - 2.0 * z * st[n]);
  return std::sqrt(r2);
}

/// || a-Psi - z Psi || over n < trunc-1.
inline double lowering_residual(const FockState& st, const Spectrum& s, cplx z) {
  const FockState down = apply_lowering(st, s);
  double r2 = 0.0;
  for (std::size_t n = 0; n + 1 < st.trunc(); ++n) r2 += std::norm(down[n] - z * st[n]);
  return std::sqrt(r2);
}

struct UncertaintyReport {
  double mean_w = 0, mean_p = 0;
  double var_w = 0, var_p = 0;
  double mean_g = 0, mean_f = 0;
  double rs_defect = 0;  // var_w var_p - (mean_g^2 + mean_f^2)/4
  double tail_mass = 0;

  /// Robertson-Schrodinger bound (<G>^2 + <F>^2)/4.
  double rs_bound() const { return 0.25 * (mean_g * mean_g + mean_f * mean_f); }

  /// rs_defect / max(var_w var_p, <G>^2/4).
  double normalized_defect() const {
    const double scale = std::max(var_w * var_p, 0.25 * mean_g * mean_g);
    return scale > 0.0 ? rs_defect / scale : rs_defect;
  }
};

/// Moments of W = (a- + a+)/sqrt2, P = i(a+ - a-)/sqrt2, G = [a-, a+] and
/// F = {W - <W>, P - <P>}, all built from ladder applications:
///   m = <a->, q = <a-^2>, <a+a-> = ||a-Psi||^2, <a-a+> = ||a+Psi||^2.
inline UncertaintyReport uncertainty_report(const FockState& st, const Spectrum& s) {
  if (!st.is_normalized(1e-10))
    throw Error(Reason::NotNormalized, "uncertainty_report expects a normalized state (norm^2 = " +
                                           num(st.norm_squared()) + ")");
  const FockState down = apply_lowering(st, s);
  const FockState up = apply_raising(st, s);
  const FockState down2 = apply_lowering(down, s);

  const cplx m = inner_product(st, down);
  const cplx q = inner_product(st, down2);
  const double n_down = down.norm_squared();                               // <a+ a->
  const double n_up = up.norm_squared() + (up.tail_mass - st.tail_mass);  // <a- a+>, incl. the dropped top component

  UncertaintyReport r;
  r.mean_w = std::numbers::sqrt2 * m.real();
  r.mean_p = std::numbers::sqrt2 * m.imag();
  const double anti = n_up + n_down;
  const double w2 = 0.5 * (2.0 * q.real() + anti);
  const double p2 = 0.5 * (anti - 2.0 * q.real());
  r.var_w = w2 - r.mean_w * r.mean_w;
  r.var_p = p2 - r.mean_p * r.mean_p;
  r.mean_g = n_up - n_down;
  r.mean_f = 2.0 * (q - m * m).imag();
  r.rs_defect = r.var_w * r.var_p - r.rs_bound();
  r.tail_mass = st.tail_mass;
  return r;
}

}  // namespace istate
