#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "istate/gis.hpp"

using istate::cplx;
using istate::FockState;
using istate::GisClass;
using istate::GisParams;
using istate::Spectrum;

namespace {

double max_abs_diff(const FockState& a, const FockState& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < std::min(a.trunc(), b.trunc()); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

// sum over index sets {j_1 < ... < j_h} in 1..n-1 with j_{k+1} >= j_k + 2
double delta_brute(const Spectrum& s, std::size_t n, std::size_t h) {
  if (n == 0) return h == 0 ? 1.0 : 0.0;
  const std::size_t m = n - 1;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != h || (mask & (mask >> 1))) continue;
    double p = 1.0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (1u << j)) p *= s[j + 1];
    total += p;
  }
  return total;
}

}  // namespace

TEST(Classify, Rules) {
  EXPECT_EQ(istate::classify(-1.0, 1.0), GisClass::NonNormalizable);
  EXPECT_EQ(istate::classify(-1.0, 0.0), GisClass::NonNormalizable);
  EXPECT_EQ(istate::classify(2.0, 0.0), GisClass::EvenState);
  EXPECT_EQ(istate::classify(1.0, 0.0), GisClass::EvenState);
  EXPECT_EQ(istate::classify(1.0, cplx{0.3, 0.1}), GisClass::GazeauKlauder);
  EXPECT_EQ(istate::classify(std::polar(1.0, 0.4), 1.0), GisClass::GeneralizedCoherent);
  EXPECT_EQ(istate::classify(cplx{2.0, 0.5}, 1.0), GisClass::Squeezed);
  EXPECT_THROW(istate::classify(cplx{NAN, 0}, 1.0), istate::Error);
}

TEST(GazeauKlauder, VacuumAtZero) {
  const auto st = istate::gk_coherent(Spectrum::harmonic(50), 0.0, 0.3);
  EXPECT_EQ(st[0], cplx(1.0));
  for (std::size_t n = 1; n < st.trunc(); ++n) EXPECT_EQ(st[n], cplx(0.0));
}

TEST(GazeauKlauder, HarmonicPoissonCoefficients) {
  const cplx z{1.1, -0.7};
  const auto st = istate::gk_coherent(Spectrum::harmonic(4200), z, 0.0);
  double logfact = 0.0;
  for (std::size_t n = 0; n < st.trunc(); ++n) {
    if (n) logfact += std::log(static_cast<double>(n));
    const cplx want = std::exp(-0.5 * std::norm(z)) * std::pow(z, static_cast<double>(n)) * std::exp(-0.5 * logfact);
    EXPECT_LT(std::abs(st[n] - want), 1e-14) << n;
  }
}

TEST(GazeauKlauder, ActionIdentityTemporalStabilityEigenstate) {
  for (const auto& s : {Spectrum::harmonic(4200), Spectrum::infinite_well(4200), Spectrum::poschl_teller(1.2, 3.3, 4200)})
    for (cplx z : {cplx{0.5, 0}, cplx{1.5, 0.8}, cplx{4.0, -1.0}}) {
      const auto cs = istate::gk_coefficients(s, z, 0.2);
      const auto st = cs.to_state();
      EXPECT_LT(std::abs(istate::mean_energy(st, s) - std::norm(z)) / std::norm(z), 1e-10);
      EXPECT_LT(istate::lowering_residual(st, s, z), 1e-10);
      const auto later = istate::gk_coherent(s, z, 0.2 + 0.7, st.trunc());
      EXPECT_LT(max_abs_diff(istate::evolve(st, s, 0.7), later), 1e-12);
      EXPECT_LT(cs.tail_mass, 1e-12);
    }
}

TEST(GazeauKlauder, RejectsOutsideRadius) {
  std::vector<double> e(51);
  for (std::size_t n = 0; n <= 50; ++n) e[n] = 1.0 - std::ldexp(1.0, -static_cast<int>(n));
  const auto s = Spectrum::custom(e);
  EXPECT_THROW(istate::gk_coefficients(s, 1.2, 0.0), istate::Error);
}

TEST(EvenStates, OddCoefficientsVanish) {
  const auto s = Spectrum::poschl_teller(1.5, 1.5, 4200);
  const auto st = istate::even_gis(s, cplx{2.0, 0.7}, 0.4);
  for (std::size_t n = 1; n < st.trunc(); n += 2) EXPECT_EQ(st[n], cplx(0.0));
}

TEST(EvenStates, LambdaOneIsVacuum) {
  const auto st = istate::even_gis(Spectrum::infinite_well(100), 1.0, 0.0);
  EXPECT_NEAR(std::abs(st[0]), 1.0, 1e-15);
  for (std::size_t n = 1; n < st.trunc(); ++n) EXPECT_EQ(st[n], cplx(0.0));
}

TEST(EvenStates, InfiniteWellSecondCoefficient) {
  const auto st = istate::even_gis(Spectrum::infinite_well(4200), 3.0, 0.0);
  EXPECT_NEAR(std::abs(st[2] / st[0] - 0.5 * std::sqrt(3.0 / 8.0)), 0.0, 1e-15);
}

TEST(EvenStates, SaturateAndMatchRecurrence) {
  const auto s = Spectrum::poschl_teller(2.0, 1.5, 4200);
  for (cplx lam : {cplx{0.4, 0.0}, cplx{3.0, -1.0}, cplx{0.2, 0.9}}) {
    const auto st = istate::even_gis(s, lam, 0.3);
    EXPECT_LT(std::abs(istate::uncertainty_report(st, s).normalized_defect()), 1e-9);
    const auto rec = istate::gis_recurrence(s, GisParams::make(lam, 0.0, 0.3), st.trunc());
    EXPECT_LT(max_abs_diff(st, rec), 1e-12);
  }
}

TEST(Recurrence, ReducesToGazeauKlauder) {
  const auto s = Spectrum::poschl_teller(1.5, 2.5, 4200);
  const cplx z{1.3, 0.4};
  const auto gk = istate::gk_coherent(s, z, 0.6);
  const auto rec = istate::gis_recurrence(s, GisParams{1.0, z, 0.6, GisClass::GazeauKlauder}, gk.trunc());
  EXPECT_LT(max_abs_diff(gk, rec), 1e-12);
}

TEST(Recurrence, SecondCoefficientFormula) {
  const auto s = Spectrum::infinite_well(4200);
  const cplx lam{1.7, 0.4}, z{0.9, -0.5};
  const double alpha = 0.35;
  const auto st = istate::gis_recurrence(s, GisParams::make(lam, z, alpha));
  const cplx c0 = st[0];
  const cplx c1 = 2.0 * z * std::polar(1.0, -alpha * s[1]) * c0 / ((1.0 + lam) * std::sqrt(s[1]));
  const cplx c2 = (2.0 * z) * (2.0 * z) / ((1.0 + lam) * (1.0 + lam) * std::sqrt(s[1] * s[2])) *
                  (1.0 + (lam * lam - 1.0) * s[1] / ((2.0 * z) * (2.0 * z))) * std::polar(1.0, -alpha * s[2]) * c0;
  EXPECT_LT(std::abs(st[1] - c1), 1e-14);
  EXPECT_LT(std::abs(st[2] - c2), 1e-14);
}

TEST(Recurrence, RejectsMinusOne) {
  EXPECT_THROW(istate::gis_recurrence(Spectrum::harmonic(100), GisParams::make(-1.0, 1.0)), istate::Error);
  try {
    istate::build_gis(Spectrum::harmonic(100), GisParams::make(-1.0, 0.5));
    FAIL();
  } catch (const istate::Error& e) {
    EXPECT_EQ(e.reason(), istate::Reason::NonNormalizable);
  }
}

TEST(Recurrence, DetectsGrowth) {
  const auto s = Spectrum::poschl_teller(1.5, 1.5, 4200);
  try {
    istate::gis_recurrence(s, GisParams::make(cplx{-0.5, 0.2}, 1.0));
    FAIL() << "expected growth detection";
  } catch (const istate::GrowthError& e) {
    EXPECT_EQ(e.reason(), istate::Reason::NonNormalizableNumerically);
    EXPECT_GT(e.growth_rate(), 1.0);
  }
}

TEST(Recurrence, FixedTruncationChecks) {
  const auto s = Spectrum::harmonic(30);
  EXPECT_THROW(istate::gis_recurrence(s, GisParams::make(2.0, 1.0), 31), istate::Error);
  try {
    istate::gis_recurrence(Spectrum::harmonic(4200), GisParams::make(2.0, 3.0), 5);
    FAIL();
  } catch (const istate::Error& e) {
    EXPECT_EQ(e.reason(), istate::Reason::TruncationInsufficient);
  }
}

TEST(ContinuedFraction, FirstTerms) {
  const auto s = Spectrum::poschl_teller(1.5, 1.5, 50);
  const auto p = GisParams::make(cplx{2.0, 0.3}, cplx{0.7, 0.2});
  const cplx A1 = 2.0 * p.z / (1.0 + p.lambda);
  EXPECT_LT(std::abs(istate::continued_fraction_A(1, s, p) - A1), 1e-15);
  const cplx A2 = A1 + p.ratio() * s[1] * (1.0 + p.lambda) / (2.0 * p.z);
  EXPECT_LT(std::abs(istate::continued_fraction_A(2, s, p) - A2), 1e-14);
  const auto gk = GisParams::make(1.0, cplx{0.7, 0.2});
  for (std::size_t n : {1, 5, 30}) EXPECT_LT(std::abs(istate::continued_fraction_A(n, s, gk) - gk.z), 1e-15);
  EXPECT_THROW(istate::continued_fraction_A(3, s, GisParams::make(2.0, 0.0)), istate::Error);
}

TEST(ContinuedFraction, ZeroNodeFallsBack) {
  // A_2 = beta + r e_1 / beta vanishes when beta^2 = -r e_1; on the well e_1 = 3, so lambda = 1/2
  // (r = -1/3) with beta = 1 gives an exact zero
  const auto s = Spectrum::infinite_well(4200);
  const cplx lam = 0.5;
  const cplx z = 0.75;
  const auto cs = istate::continued_fraction_coefficients(s, GisParams::make(lam, z));
  EXPECT_NE(cs.note.find("fell back"), std::string::npos);
  const auto rec = istate::gis_recurrence(s, GisParams::make(lam, z), cs.trunc());
  EXPECT_LT(max_abs_diff(cs.to_state(), rec), 1e-14);
}

TEST(Delta, ListedValues) {
  const auto s = Spectrum::poschl_teller(1.5, 2.5, 20);
  EXPECT_EQ(istate::delta_sum(s, 2, 1), s[1]);
  EXPECT_EQ(istate::delta_sum(s, 3, 1), s[1] + s[2]);
  EXPECT_EQ(istate::delta_sum(s, 4, 2), s[1] * s[3]);
  for (std::size_t n = 0; n < 12; ++n) EXPECT_EQ(istate::delta_sum(s, n, 0), 1.0);
  EXPECT_THROW(istate::delta_sum(s, 5, 3), istate::Error);
}

TEST(Delta, InfiniteWellSixTwo) {
  const auto s = Spectrum::infinite_well(20);
  double want = 0.0;
  for (std::size_t j1 = 1; j1 <= 3; ++j1)
    for (std::size_t j2 = j1 + 2; j2 <= 5; ++j2) want += s[j1] * s[j2];
  EXPECT_EQ(istate::delta_sum(s, 6, 2), want);
}

TEST(Delta, MatchesBruteForce) {
  // integer energies make both sides exact
  for (const auto& s : {Spectrum::harmonic(20), Spectrum::infinite_well(20), Spectrum::poschl_teller(1.5, 1.5, 20)})
    for (std::size_t n = 0; n <= 12; ++n)
      for (std::size_t h = 0; h <= std::min<std::size_t>(6, n / 2); ++h)
        EXPECT_EQ(istate::delta_sum(s, n, h), delta_brute(s, n, h)) << n << "," << h;
}

TEST(ClosedForm, FourthBracket) {
  const auto s = Spectrum::poschl_teller(1.5, 1.5, 4200);
  const cplx lam{2.2, -0.4}, z{1.1, 0.3};
  const auto st = istate::gis_closed_form(s, GisParams::make(lam, z));
  const cplx w = (lam * lam - 1.0) / ((2.0 * z) * (2.0 * z));
  const cplx bracket = 1.0 + w * (s[1] + s[2] + s[3]) + w * w * s[1] * s[3];
  const cplx beta = 2.0 * z / (1.0 + lam);
  const cplx want = st[0] * std::pow(beta, 4.0) / std::sqrt(s[1] * s[2] * s[3] * s[4]) * bracket;
  EXPECT_LT(std::abs(st[4] - want) / std::abs(want), 1e-13);
  const cplx c1 = 2.0 * z * st[0] / ((1.0 + lam) * std::sqrt(s[1]));
  EXPECT_LT(std::abs(st[1] - c1), 1e-15);
}

TEST(Routes, AgreeOnRandomDraws) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Spectrum spectra[] = {Spectrum::harmonic(4200), Spectrum::infinite_well(4200), Spectrum::poschl_teller(1.5, 1.5, 4200)};
  for (int i = 0; i < 30; ++i) {
    const auto& s = spectra[i % 3];
    const cplx lam{0.3 + 2.5 * U(g), -1.5 + 3.0 * U(g)};
    const cplx z{-2.0 + 4.0 * U(g), -2.0 + 4.0 * U(g)};
    const auto p = GisParams::make(lam, z, U(g));
    const auto rec = istate::recurrence_coefficients(s, p);
    const std::size_t T = rec.trunc();
    const auto cf = istate::gis_continued_fraction(s, p, T);
    const auto cl = istate::gis_closed_form(s, p, T);
    EXPECT_LT(istate::max_relative_difference(cf, rec.to_state()), 1e-9);
    EXPECT_LT(istate::max_relative_difference(cl, rec.to_state()), 1e-9);
    EXPECT_EQ(rec.route, istate::Route::Recurrence);
  }
}

TEST(Invariants, ResidualSaturationAndVarianceRatio) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto s = Spectrum::poschl_teller(2.0, 1.5, 4200);
  for (int i = 0; i < 20; ++i) {
    const cplx lam{0.2 + 3.0 * U(g), -2.0 + 4.0 * U(g)};
    const cplx z{-2.0 + 4.0 * U(g), -2.0 + 4.0 * U(g)};
    const auto p = GisParams::make(lam, z, 0.1 * i);
    const auto st = istate::build_gis(s, p);
    EXPECT_LT(istate::eigen_residual(st, s, lam, z), 1e-9);
    const auto u = istate::uncertainty_report(st, s);
    EXPECT_LT(std::abs(u.normalized_defect()), 1e-8);
    EXPECT_LT(std::abs(u.var_w / u.var_p - std::norm(lam)) / std::norm(lam), 1e-6);
    // var_W = |l| D, var_P = D/|l|, D = sqrt(<G>^2 + <F>^2)/2; Im(l)<G> = Re(l)<F>
    const double D = 0.5 * std::hypot(u.mean_g, u.mean_f);
    EXPECT_LT(std::abs(u.var_w - std::abs(lam) * D) / u.var_w, 1e-8);
    EXPECT_LT(std::abs(u.var_p - D / std::abs(lam)) / u.var_p, 1e-8);
    EXPECT_LT(std::abs(lam.imag() * u.mean_g - lam.real() * u.mean_f) / (std::abs(lam) * D), 1e-8);
    // var_W = Re(l)<G>/2 + Im(l)<F>/2 ... in the combined form |l|^2 var_P = var_W
    EXPECT_LT(std::abs(u.var_w - 0.5 * (lam.real() * u.mean_g + lam.imag() * u.mean_f)) / u.var_w, 1e-8);
    EXPECT_LT(std::abs(u.var_p - 0.5 * (lam.real() * u.mean_g + lam.imag() * u.mean_f) / std::norm(lam)) / u.var_p, 1e-8);
  }
}

TEST(Invariants, UnitModulusEqualVariances) {
  const auto s = Spectrum::infinite_well(4200);
  for (double th : {-1.0, -0.3, 0.5, 1.2}) {
    const auto st = istate::build_gis(s, GisParams::make(std::polar(1.0, th), cplx{0.8, 0.6}));
    const auto u = istate::uncertainty_report(st, s);
    EXPECT_LT(std::abs(u.var_w - u.var_p), 1e-8 * (u.var_w + u.var_p));
  }
}

TEST(HarmonicExpansion, MatchesRecurrence) {
  const auto gen = istate::harmonic_squeezed_check(cplx{1.0, 0.5}, 2.0, 61);
  EXPECT_LT(gen.max_rel_diff, 1e-9);
  const auto coh = istate::harmonic_squeezed_check(cplx{0.7, -0.2}, 1.0, 40);
  EXPECT_LT(coh.max_rel_diff, 1e-12);
}

TEST(HarmonicExpansion, SqueezedVacuum) {
  // z = 0, lambda = 3: c_{2k+2}/c_{2k} = r sqrt((2k+1)/(2k+2)), r = 1/2
  const auto st = istate::harmonic_squeezed_expansion(0.0, 3.0, 40);
  for (std::size_t k = 0; 2 * k + 2 < 40; ++k) {
    const double ratio = 0.5 * std::sqrt((2.0 * k + 1.0) / (2.0 * k + 2.0));
    EXPECT_LT(std::abs(st[2 * k + 2] - ratio * st[2 * k]), 1e-15);
    EXPECT_EQ(st[2 * k + 1], cplx(0.0));
  }
  EXPECT_THROW(istate::harmonic_squeezed_expansion(1.0, cplx{-0.5, 0.1}, 20), istate::Error);
}

TEST(CoefficientSet, RoundTripsToState) {
  const auto s = Spectrum::harmonic(4200);
  const auto cs = istate::build_coefficients(s, GisParams::make(cplx{1.5, 0.5}, 1.0, 0.3));
  const auto st = cs.to_state();
  EXPECT_EQ(st.trunc(), cs.trunc());
  EXPECT_NEAR(cs.c0, std::abs(st[0]), 1e-15);
  EXPECT_NEAR(st.norm_squared() + st.tail_mass, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(st.alpha, 0.3);
}
