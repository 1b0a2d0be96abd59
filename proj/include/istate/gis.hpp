#pragma once

// Solutions of (1-lambda) a+ Psi + (1+lambda) a- Psi = 2z Psi.
//
// Every route produces the alpha-free sequence d_n with c_n = d_n e^{-i alpha e_n};
// the sequence is carried as (log|d_n|, arg d_n) so that neither f(n) nor the
// growth of intermediate brackets can overflow. A shared driver applies the
// adaptive truncation policy, growth detection and normalization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "istate/error.hpp"
#include "istate/operators.hpp"
#include "istate/precision.hpp"
#include "istate/spectrum.hpp"

namespace istate {

enum class GisClass { GazeauKlauder, GeneralizedCoherent, Squeezed, NonNormalizable, EvenState };

constexpr const char* to_string(GisClass c) noexcept {
  switch (c) {
    case GisClass::GazeauKlauder: return "gazeau_klauder";
    case GisClass::GeneralizedCoherent: return "generalized_coherent";
    case GisClass::Squeezed: return "squeezed";
    case GisClass::NonNormalizable: return "non_normalizable";
    case GisClass::EvenState: return "even_state";
  }
  return "unknown";
}

/// lambda = -1 is rejected for every z: with z != 0 all coefficients vanish,
/// with z = 0 the equation collapses to a+ Psi = 0.
inline GisClass classify(cplx lambda, cplx z, double tol = 1e-12) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || !std::isfinite(z.real()) ||
      !std::isfinite(z.imag()))
    throw Error(Reason::InvalidArgument, "lambda and z must be finite");
  if (std::abs(lambda + 1.0) <= tol) return GisClass::NonNormalizable;
  if (z == 0.0) return GisClass::EvenState;
  if (std::abs(lambda - 1.0) <= tol) return GisClass::GazeauKlauder;
  if (std::abs(std::abs(lambda) - 1.0) <= tol) return GisClass::GeneralizedCoherent;
  return GisClass::Squeezed;
}

struct GisParams {
  cplx lambda{1.0};
  cplx z{};
  double alpha = 0.0;
  GisClass classification = GisClass::EvenState;

  static GisParams make(cplx lambda, cplx z, double alpha = 0.0) {
    return {lambda, z, alpha, classify(lambda, z)};
  }
  /// (lambda-1)/(lambda+1)
  cplx ratio() const { return (lambda - 1.0) / (lambda + 1.0); }
};

enum class Route { Recurrence, ContinuedFraction, ClosedForm, Explicit };

constexpr const char* to_string(Route r) noexcept {
  switch (r) {
    case Route::Recurrence: return "recurrence";
    case Route::ContinuedFraction: return "continued_fraction";
    case Route::ClosedForm: return "closed_form";
    case Route::Explicit: return "explicit";
  }
  return "unknown";
}

struct TruncationPolicy {
  std::size_t fixed_trunc = 0;   // 0 = adaptive
  double rel_cutoff = 1e-16;     // |c_n|^2 relative to max |c_k|^2
  std::size_t cap = 4096;
  std::size_t min_trunc = 8;
  std::size_t cutoff_window = 8;
  std::size_t growth_window = 32;
  std::size_t tail_terms = 64;
  double tail_target = 1e-12;

  static TruncationPolicy fixed(std::size_t trunc) {
    TruncationPolicy p;
    p.fixed_trunc = trunc;
    return p;
  }
};

struct CoefficientSet {
  std::vector<double> log_magnitudes;  // log|c_n|; -inf marks an exact zero
  std::vector<double> phases;          // arg c_n, including the -alpha e_n factor
  double c0 = 0.0;
  Route route = Route::Recurrence;
  double alpha = 0.0;
  double tail_mass = 0.0;
  std::string note;

  std::size_t trunc() const noexcept { return log_magnitudes.size(); }

  cplx coefficient(std::size_t n) const {
    const double lm = log_magnitudes.at(n);
    if (std::isinf(lm) && lm < 0) return {};
    return std::polar(std::exp(lm), phases[n]);
  }

  FockState to_state() const {
    std::vector<cplx> c(trunc());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = coefficient(n);
    return {std::move(c), alpha, tail_mass};
  }
};

namespace detail {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

struct Term {
  double logmag = neg_inf;  // log|d_n|
  double phase = 0.0;       // arg d_n
};

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp2(const std::vector<Term>& t, std::size_t first, std::size_t last) {
  double m = neg_inf;
  for (std::size_t n = first; n < last; ++n) m = std::max(m, 2.0 * t[n].logmag);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (std::size_t n = first; n < last; ++n) s += std::exp(2.0 * t[n].logmag - m);
  return m + std::log(s);
}

/// Spectrum used for generation: analytic kinds are extended so the tail
/// estimate can look past the caller's stored range.
inline Spectrum working_spectrum(const Spectrum& s, std::size_t needed) {
  if (s.has_analytic_form() && needed > s.max_index()) return s.resized(needed);
  return s;
}

using ResidualFn = std::function<double(const std::vector<Term>&, std::size_t)>;

struct DriveResult {
  std::vector<Term> terms;
  std::size_t trunc = 0;
  double log_norm = 0.0;
  double tail_mass = 0.0;
};

template <class Gen>
DriveResult drive(const Spectrum& user, const Spectrum& work, Gen&& gen, const TruncationPolicy& pol,
                  bool check_growth, const ResidualFn& residual) {
  const std::size_t available = work.max_index();  // d_n needs e_n
  std::size_t limit;
  if (pol.fixed_trunc) {
    if (pol.fixed_trunc < 2) throw Error(Reason::InvalidArgument, "trunc must be at least 2");
    if (pol.fixed_trunc > user.max_index())
      throw Error(Reason::TruncationMismatch, "trunc " + std::to_string(pol.fixed_trunc) +
                                                  " needs energies up to e_" + std::to_string(pol.fixed_trunc) +
                                                  " but the spectrum stops at " + std::to_string(user.max_index()));
    limit = pol.fixed_trunc;
  } else {
    limit = std::min(pol.cap, user.max_index());
  }

  DriveResult out;
  auto& terms = out.terms;
  std::vector<double> pair;  // log(|d_n|^2 + |d_{n-1}|^2)
  double max2 = neg_inf;

  auto produce_until = [&](std::size_t count, bool in_range) {
    while (terms.size() < count && terms.size() <= available) {
      const std::size_t n = terms.size();
      terms.push_back(gen(n));
      const double l2 = 2.0 * terms.back().logmag;
      max2 = std::max(max2, l2);
      if (!in_range) continue;
      pair.push_back(n == 0 ? l2 : log_add(l2, 2.0 * terms[n - 1].logmag));
      const std::size_t w = pol.growth_window;
      if (!check_growth || pair.size() < w + 1) continue;
      const std::size_t base = pair.size() - (w + 1);
      double m1 = 0.0, m2 = 0.0;
      bool rising = true;
      for (std::size_t i = 0; i < w && rising; ++i) {
        const double d = pair[base + i + 1] - pair[base + i];
        if (!std::isfinite(d) || d < 0.0) rising = false;
        (i < w / 2 ? m1 : m2) += d;
      }
      m1 /= static_cast<double>(w / 2);
      m2 /= static_cast<double>(w - w / 2);
      if (rising && m1 > 0.0 && m2 >= 0.9 * m1)
        throw GrowthError("coefficients grow over " + std::to_string(w) + " consecutive indices ending at n=" +
                              std::to_string(n) + " (per-index factor " + num(std::exp(m2)) + ")",
                          n, std::exp(m2));
    }
  };

  auto below_cutoff = [&](std::size_t n) {
    if (n + 1 < pol.cutoff_window) return false;
    const double thresh = max2 + std::log(pol.rel_cutoff);
    for (std::size_t k = n + 1 - pol.cutoff_window; k <= n; ++k)
      if (2.0 * terms[k].logmag >= thresh) return false;
    return true;
  };

  std::size_t T = 0;
  if (pol.fixed_trunc) {
    produce_until(limit, true);
    T = limit;
  } else {
    std::size_t n = 0;
    for (;;) {
      T = 0;
      for (; n < limit; ++n) {
        produce_until(n + 1, true);
        if (terms.size() <= n) break;  // ran out of energies
        if (n + 1 >= pol.min_trunc && below_cutoff(n)) {
          T = n + 1;
          break;
        }
      }
      if (T == 0) {
        if (limit < pol.cap)
          throw Error(Reason::TruncationInsufficient,
                      "coefficients did not fall below the cutoff within the " + std::to_string(limit) +
                          " stored energies; build the spectrum with a larger n_max");
        throw Error(Reason::NonConvergent, "coefficients did not fall below " + num(pol.rel_cutoff) +
                                               " of their maximum within the cap of " + std::to_string(pol.cap) +
                                               " terms (last/max |c|^2 = " +
                                               num(std::exp(2.0 * terms.back().logmag - max2)) + ")");
      }
      if (residual) {
        for (int it = 0; it < 8; ++it) {
          const std::size_t T2 = std::min(limit, T + T / 4 + 8);
          if (T2 <= T) break;
          produce_until(T2, true);
          if (terms.size() < T2) break;
          const double r1 = residual(terms, T), r2 = residual(terms, T2);
          if (r1 > 1e-15 && r2 < 0.5 * r1) T = T2;
          else break;
        }
      }
      // tail check; a late rise past the cutoff restarts the search
      produce_until(T + pol.tail_terms, false);
      const double lt = log_sum_exp2(terms, T, terms.size());
      const double lh = log_sum_exp2(terms, 0, T);
      if (std::isinf(lt) || lt - lh < std::log(pol.tail_target) || terms.size() <= T) break;
      n = T;
      if (n >= limit) break;
    }
  }

  produce_until(T + pol.tail_terms, false);
  const std::size_t have = terms.size() > T ? terms.size() - T : 0;
  double log_tail = have ? log_sum_exp2(terms, T, terms.size()) : neg_inf;
  if (have < pol.tail_terms) {
    // out of energies: bound the missing part by the last known term
    const double last = 2.0 * terms.back().logmag;
    log_tail = log_add(log_tail, last + std::log(static_cast<double>(pol.tail_terms - have)));
  }
  const double log_head = log_sum_exp2(terms, 0, T);
  out.log_norm = log_add(log_head, log_tail);
  out.tail_mass = std::isinf(log_tail) ? 0.0 : std::exp(log_tail - out.log_norm);
  out.trunc = T;
  if (pol.fixed_trunc && out.tail_mass > pol.tail_target)
    throw Error(Reason::TruncationInsufficient, "trunc " + std::to_string(T) + " leaves tail mass " +
                                                    num(out.tail_mass) + " above the target");
  return out;
}

inline CoefficientSet finish(const DriveResult& r, const Spectrum& work, double alpha, Route route) {
  CoefficientSet cs;
  cs.route = route;
  cs.alpha = alpha;
  cs.tail_mass = r.tail_mass;
  cs.log_magnitudes.resize(r.trunc);
  cs.phases.resize(r.trunc);
  const double half = 0.5 * r.log_norm;
  for (std::size_t n = 0; n < r.trunc; ++n) {
    cs.log_magnitudes[n] = r.terms[n].logmag - half;
    cs.phases[n] = std::remainder(r.terms[n].phase - alpha * work[n], 2.0 * std::numbers::pi);
  }
  cs.c0 = std::exp(cs.log_magnitudes[0]);
  return cs;
}

/// Relative eigen-equation residual in the alpha-free frame; the e^{-i alpha e_n}
/// factor is common to all three terms of row n.
inline ResidualFn eigen_residual_fn(const Spectrum& work, cplx lambda, cplx z) {
  return [&work, lambda, z](const std::vector<Term>& t, std::size_t T) {
    double m = neg_inf;
    for (std::size_t n = 0; n < T; ++n) m = std::max(m, t[n].logmag);
    auto d = [&](std::size_t n) {
      return std::isinf(t[n].logmag) ? cplx{} : std::polar(std::exp(t[n].logmag - m), t[n].phase);
    };
    double r2 = 0.0, n2 = 0.0;
    for (std::size_t n = 0; n < T; ++n) n2 += std::norm(d(n));
    for (std::size_t n = 0; n + 1 < T; ++n) {
      cplx v = (1.0 + lambda) * std::sqrt(work[n + 1]) * d(n + 1) - 2.0 * z * d(n);
      if (n > 0) v += (1.0 - lambda) * std::sqrt(work[n]) * d(n - 1);
      r2 += std::norm(v);
    }
    return std::sqrt(r2 / n2);
  };
}

inline void reject_non_normalizable(const GisParams& p) {
  if (classify(p.lambda, p.z) == GisClass::NonNormalizable)
    throw Error(Reason::NonNormalizable,
                "lambda = -1 admits no normalizable solution (every coefficient vanishes or a+ Psi = 0)");
}

}  // namespace detail

/// c_n = c0 z^n e^{-i alpha e_n} / sqrt(f(n)).
inline CoefficientSet gk_coefficients(const Spectrum& s, cplx z, double alpha, const TruncationPolicy& pol = {}) {
  const RadiusEstimate R = radius_of_convergence(s);
  if (!R.infinite() && R.converged && std::norm(z) >= R.value)
    throw Error(Reason::OutOfRange, "|z|^2 = " + num(std::norm(z)) +
                                        " is outside the convergence radius " + num(R.value));
  const Spectrum work = detail::working_spectrum(s, std::max(pol.fixed_trunc, pol.cap) + pol.tail_terms + 1);
  if (z == 0.0) {
    const std::size_t T = pol.fixed_trunc ? pol.fixed_trunc : std::min(pol.min_trunc, s.max_index());
    CoefficientSet cs;
    cs.route = Route::Explicit;
    cs.alpha = alpha;
    cs.log_magnitudes.assign(T, detail::neg_inf);
    cs.phases.assign(T, 0.0);
    cs.log_magnitudes[0] = 0.0;
    cs.c0 = 1.0;
    return cs;
  }
  const double lz = std::log(std::abs(z)), az = std::arg(z);
  auto gen = [&](std::size_t n) {
    const double x = static_cast<double>(n);
    return detail::Term{x * lz - 0.5 * work.log_f(n), std::remainder(x * az, 2.0 * std::numbers::pi)};
  };
  const auto r = detail::drive(s, work, gen, pol, !R.infinite(), detail::eigen_residual_fn(work, 1.0, z));
  return detail::finish(r, work, alpha, Route::Explicit);
}

inline FockState gk_coherent(const Spectrum& s, cplx z, double alpha, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return gk_coefficients(s, z, alpha, pol).to_state();
}

/// z = 0: odd coefficients vanish and
/// c_{2k} = r^k sqrt(e_1 e_3 ... e_{2k-1} / (e_2 e_4 ... e_{2k})) e^{-i alpha e_{2k}} c0, r = (lambda-1)/(lambda+1).
/// c0 comes from the numerical normalization sum, which includes the k = 0 term.
inline CoefficientSet even_coefficients(const Spectrum& s, cplx lambda, double alpha,
                                        const TruncationPolicy& pol = {}) {
  const GisParams p = GisParams::make(lambda, 0.0, alpha);
  detail::reject_non_normalizable(p);
  const Spectrum work = detail::working_spectrum(s, std::max(pol.fixed_trunc, pol.cap) + pol.tail_terms + 1);
  const cplx r = p.ratio();
  const double lr = r == 0.0 ? detail::neg_inf : std::log(std::abs(r));
  const double ar = std::arg(r);
  double lm = 0.0, ph = 0.0;
  auto gen = [&](std::size_t n) {
    if (n == 0) return detail::Term{0.0, 0.0};
    if (n % 2 == 1) return detail::Term{detail::neg_inf, 0.0};
    lm += lr + 0.5 * (std::log(work[n - 1]) - std::log(work[n]));
    ph = std::remainder(ph + ar, 2.0 * std::numbers::pi);
    return detail::Term{lm, ph};
  };
  const auto res = detail::drive(s, work, gen, pol, true, detail::eigen_residual_fn(work, lambda, 0.0));
  return detail::finish(res, work, alpha, Route::Explicit);
}

inline FockState even_gis(const Spectrum& s, cplx lambda, double alpha, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return even_coefficients(s, lambda, alpha, pol).to_state();
}

/// Forward three-term recurrence
///   d_{n+1} = (2z d_n - (1-lambda) sqrt(e_n) d_{n-1}) / ((1+lambda) sqrt(e_{n+1})),
/// which is the printed recurrence with the common e^{-i alpha e_n} factor
/// pulled out. Working values are rescaled to stay inside double range.
inline CoefficientSet recurrence_coefficients(const Spectrum& s, const GisParams& p,
                                              const TruncationPolicy& pol = {}) {
  detail::reject_non_normalizable(p);
  const Spectrum work = detail::working_spectrum(s, std::max(pol.fixed_trunc, pol.cap) + pol.tail_terms + 1);
  const cplx lambda = p.lambda, z = p.z;
  cplx prev{}, cur{};
  double shift = 0.0;
  auto gen = [&](std::size_t n) {
    if (n == 0) {
      cur = 1.0;
      return detail::Term{0.0, 0.0};
    }
    cplx next = 2.0 * z * cur;
    if (n >= 2) next -= (1.0 - lambda) * std::sqrt(work[n - 1]) * prev;
    next /= (1.0 + lambda) * std::sqrt(work[n]);
    prev = cur;
    cur = next;
    const double m = std::max(std::abs(prev), std::abs(cur));
    if (m > 1e150 || (m > 0.0 && m < 1e-150)) {
      prev /= m;
      cur /= m;
      shift += std::log(m);
    }
    if (cur == 0.0) return detail::Term{detail::neg_inf, 0.0};
    return detail::Term{std::log(std::abs(cur)) + shift, std::arg(cur)};
  };
  const auto r = detail::drive(s, work, gen, pol, true, detail::eigen_residual_fn(work, lambda, z));
  return detail::finish(r, work, p.alpha, Route::Recurrence);
}

inline FockState gis_recurrence(const Spectrum& s, const GisParams& p, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return recurrence_coefficients(s, p, pol).to_state();
}

/// A_1 = 2z/(1+lambda), A_n = 2z/(1+lambda) + r e_{n-1}/A_{n-1}, iterated forward.
inline cplx continued_fraction_A(std::size_t n, const Spectrum& s, const GisParams& p) {
  if (n == 0) throw Error(Reason::InvalidArgument, "continued fraction index starts at 1");
  detail::reject_non_normalizable(p);
  if (p.z == 0.0)
    throw Error(Reason::SingularContinuedFraction, "A_1 = 0 for z = 0; use the even-state construction");
  const cplx beta = 2.0 * p.z / (1.0 + p.lambda), r = p.ratio();
  cplx A = beta;
  for (std::size_t k = 2; k <= n; ++k) {
    if (A == 0.0) throw Error(Reason::SingularContinuedFraction, "A_" + std::to_string(k - 1) + " = 0");
    A = beta + r * s.energy(k - 1) / A;
  }
  return A;
}

/// Coefficients from the ratio chain d_n = d_{n-1} A_n / sqrt(e_n). An exact
/// zero A_k breaks the chain; the recurrence route is used instead and the
/// fallback is recorded in the note.
inline CoefficientSet continued_fraction_coefficients(const Spectrum& s, const GisParams& p,
                                                      const TruncationPolicy& pol = {}) {
  detail::reject_non_normalizable(p);
  if (p.z == 0.0)
    throw Error(Reason::SingularContinuedFraction, "A_1 = 0 for z = 0; use the even-state construction");
  const Spectrum work = detail::working_spectrum(s, std::max(pol.fixed_trunc, pol.cap) + pol.tail_terms + 1);
  const cplx beta = 2.0 * p.z / (1.0 + p.lambda), r = p.ratio();
  cplx A{};
  double lm = 0.0, ph = 0.0;
  struct Node {
    std::size_t k;
  };
  auto gen = [&](std::size_t n) {
    if (n == 0) return detail::Term{0.0, 0.0};
    A = n == 1 ? beta : beta + r * work[n - 1] / A;
    if (A == 0.0) throw Node{n};
    lm += std::log(std::abs(A)) - 0.5 * std::log(work[n]);
    ph = std::remainder(ph + std::arg(A), 2.0 * std::numbers::pi);
    return detail::Term{lm, ph};
  };
  try {
    const auto res = detail::drive(s, work, gen, pol, true, detail::eigen_residual_fn(work, p.lambda, p.z));
    return detail::finish(res, work, p.alpha, Route::ContinuedFraction);
  } catch (const Node& node) {
    CoefficientSet cs = recurrence_coefficients(s, p, pol);
    cs.note = "A_" + std::to_string(node.k) + " = 0 (node); fell back to the recurrence route";
    return cs;
  }
}

inline FockState gis_continued_fraction(const Spectrum& s, const GisParams& p, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return continued_fraction_coefficients(s, p, pol).to_state();
}

/// Delta(n, h) for n = 0..n_max: sums of products of h energies e_j, j in
/// 1..n-1, with no two indices adjacent. Built by the prefix recurrence
///   D(n+1, h) = D(n, h) + e_n D(n-1, h-1),  D(0,0) = D(1,0) = 1,
/// splitting on whether index n is used.
template <class T = double>
std::vector<std::vector<T>> delta_table(const Spectrum& s, std::size_t n_max) {
  if (n_max > s.max_index() + 1) throw Error(Reason::OutOfRange, "delta_table needs e_{n_max-1}");
  std::vector<std::vector<T>> D(n_max + 1);
  D[0] = {T(1)};
  if (n_max >= 1) D[1] = {T(1)};
  for (std::size_t n = 1; n < n_max; ++n) {
    auto& row = D[n + 1];
    row.assign((n + 1) / 2 + 1, T(0));
    const T en = T(s[n]);
    for (std::size_t h = 0; h < row.size(); ++h) {
      if (h < D[n].size()) row[h] += D[n][h];
      if (h >= 1 && h - 1 < D[n - 1].size()) row[h] += en * D[n - 1][h - 1];
    }
  }
  return D;
}

inline double delta_sum(const Spectrum& s, std::size_t n, std::size_t h) {
  if (h > n / 2) throw Error(Reason::OutOfRange, "Delta(n,h) needs h <= floor(n/2)");
  return delta_table<double>(s, n)[n][h];
}

/// c_n = c0 (2z/(1+lambda))^n / sqrt(f(n)) * sum_h w^h Delta(n,h) * e^{-i alpha e_n},
/// w = (lambda^2-1)/(2z)^2. The alternating bracket is formed in 50-digit
/// arithmetic, rows of Delta are rolled forward two at a time.
inline CoefficientSet closed_form_coefficients(const Spectrum& s, const GisParams& p,
                                               const TruncationPolicy& pol = {}) {
  detail::reject_non_normalizable(p);
  if (p.z == 0.0) throw Error(Reason::InvalidArgument, "closed form needs z != 0; use the even-state construction");
  const Spectrum work = detail::working_spectrum(s, std::max(pol.fixed_trunc, pol.cap) + pol.tail_terms + 1);
  const cplx beta = 2.0 * p.z / (1.0 + p.lambda);
  const double lb = std::log(std::abs(beta)), ab = std::arg(beta);
  const ext_complex w = (to_ext(p.lambda) * to_ext(p.lambda) - ext_complex(1)) / (ext_complex(4) * to_ext(p.z) * to_ext(p.z));
  std::vector<ext_complex> wpow{ext_complex(1)};
  std::vector<ext_real> row_prev, row_cur;  // Delta(n-1, .), Delta(n, .)
  auto gen = [&](std::size_t n) {
    if (n == 0) {
      row_cur = {ext_real(1)};
      return detail::Term{0.0, 0.0};
    }
    if (n == 1) {
      row_prev = row_cur;
      row_cur = {ext_real(1)};
    } else {
      // Delta(n, h) = Delta(n-1, h) + e_{n-1} Delta(n-2, h-1)
      std::vector<ext_real> next(n / 2 + 1, ext_real(0));
      const ext_real e(work[n - 1]);
      for (std::size_t h = 0; h < next.size(); ++h) {
        if (h < row_cur.size()) next[h] += row_cur[h];
        if (h >= 1 && h - 1 < row_prev.size()) next[h] += e * row_prev[h - 1];
      }
      row_prev = std::move(row_cur);
      row_cur = std::move(next);
    }
    while (wpow.size() < row_cur.size()) wpow.push_back(wpow.back() * w);
    ext_complex B(0);
    for (std::size_t h = 0; h < row_cur.size(); ++h) B += wpow[h] * row_cur[h];
    const double x = static_cast<double>(n);
    if (B == ext_complex(0)) return detail::Term{detail::neg_inf, 0.0};
    const double logB = static_cast<double>(log(abs(B)));
    const double argB = static_cast<double>(atan2(B.imag(), B.real()));
    return detail::Term{x * lb - 0.5 * work.log_f(n) + logB, std::remainder(x * ab + argB, 2.0 * std::numbers::pi)};
  };
  const auto res = detail::drive(s, work, gen, pol, true, detail::eigen_residual_fn(work, p.lambda, p.z));
  return detail::finish(res, work, p.alpha, Route::ClosedForm);
}

inline FockState gis_closed_form(const Spectrum& s, const GisParams& p, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return closed_form_coefficients(s, p, pol).to_state();
}

/// Dispatch on the classification.
inline CoefficientSet build_coefficients(const Spectrum& s, const GisParams& p, const TruncationPolicy& pol = {}) {
  switch (classify(p.lambda, p.z)) {
    case GisClass::NonNormalizable: detail::reject_non_normalizable(p); break;
    case GisClass::EvenState: return even_coefficients(s, p.lambda, p.alpha, pol);
    case GisClass::GazeauKlauder: return gk_coefficients(s, p.z, p.alpha, pol);
    case GisClass::GeneralizedCoherent:
    case GisClass::Squeezed: return recurrence_coefficients(s, p, pol);
  }
  throw Error(Reason::NonNormalizable, "unreachable");
}

inline FockState build_gis(const Spectrum& s, const GisParams& p, std::size_t trunc = 0) {
  TruncationPolicy pol;
  pol.fixed_trunc = trunc;
  return build_coefficients(s, p, pol).to_state();
}

/// max_n |a_n - b_n| / |b_n| over n with |b_n| > floor * max|b|.
inline double max_relative_difference(const FockState& a, const FockState& b, double floor = 1e-12) {
  const std::size_t T = std::min(a.trunc(), b.trunc());
  double bmax = 0.0;
  for (std::size_t n = 0; n < T; ++n) bmax = std::max(bmax, std::abs(b[n]));
  double worst = 0.0;
  for (std::size_t n = 0; n < T; ++n) {
    const double bn = std::abs(b[n]);
    if (bn > floor * bmax) worst = std::max(worst, std::abs(a[n] - b[n]) / bn);
  }
  return worst;
}

/// The double-exponential harmonic form
///   c0 exp[r (a+)^2 / 2] exp[2z/(lambda+1) a+] |0>,  r = (lambda-1)/(lambda+1),
/// expanded term by term in a space of dimension trunc (alpha = 0). Raising
/// never lowers n, so components below trunc are exact; the sums run in
/// 50-digit arithmetic because the two exponentials cancel strongly.
inline FockState harmonic_squeezed_expansion(cplx z, cplx lambda, std::size_t trunc) {
  if (trunc < 2) throw Error(Reason::InvalidArgument, "trunc must be at least 2");
  detail::reject_non_normalizable(GisParams{lambda, z, 0.0, GisClass::Squeezed});
  const cplx r = (lambda - 1.0) / (lambda + 1.0);
  if (std::abs(r) >= 1.0)
    throw Error(Reason::NonConvergent, "|(lambda-1)/(lambda+1)| >= 1: the squeeze exponential does not converge");
  const ext_complex beta = ext_complex(2) * to_ext(z) / (to_ext(lambda) + ext_complex(1));
  const ext_complex half_r = to_ext(r) / ext_complex(2);
  std::vector<ext_real> sq(trunc + 2);
  for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = sqrt(ext_real(n));

  // exp(beta a+)|0>
  std::vector<ext_complex> v(trunc, ext_complex(0)), term(trunc, ext_complex(0));
  term[0] = v[0] = ext_complex(1);
  for (std::size_t m = 1; m < trunc; ++m) {
    for (std::size_t n = trunc - 1; n >= 1; --n) term[n] = term[n - 1] * sq[n] * beta / ext_complex(m);
    term[0] = ext_complex(0);
    for (std::size_t n = 0; n < trunc; ++n) v[n] += term[n];
  }
  // exp(r (a+)^2 / 2) v
  std::vector<ext_complex> out = v;
  term = v;
  for (std::size_t k = 1; 2 * k < trunc; ++k) {
    for (std::size_t n = trunc - 1; n >= 2; --n) term[n] = term[n - 2] * sq[n] * sq[n - 1] * half_r / ext_complex(k);
    term[0] = term[1] = ext_complex(0);
    for (std::size_t n = 0; n < trunc; ++n) out[n] += term[n];
  }
  std::vector<cplx> c(trunc);
  for (std::size_t n = 0; n < trunc; ++n) c[n] = to_double(out[n]);
  FockState st(std::move(c), 0.0);
  st.normalize();
  return st;
}

struct HarmonicCheck {
  FockState expansion;
  FockState recurrence;
  double max_rel_diff = 0.0;
};

/// Compares the double-exponential expansion with the recurrence on e_n = n;
/// both are renormalized over the same stored range first.
inline HarmonicCheck harmonic_squeezed_check(cplx z, cplx lambda, std::size_t trunc) {
  HarmonicCheck out;
  out.expansion = harmonic_squeezed_expansion(z, lambda, trunc);
  TruncationPolicy pol = TruncationPolicy::fixed(trunc);
  pol.tail_target = 1.0;  // the comparison renormalizes over the stored range
  out.recurrence = recurrence_coefficients(Spectrum::harmonic(trunc + 1), GisParams::make(lambda, z), pol).to_state();
  out.recurrence.normalize();
  out.recurrence.tail_mass = 0.0;
  out.max_rel_diff = max_relative_difference(out.expansion, out.recurrence);
  return out;
}

}  // namespace istate
