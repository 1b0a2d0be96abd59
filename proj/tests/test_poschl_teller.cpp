#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "istate/gis.hpp"
#include "istate/poschl_teller.hpp"
#include "istate/quadrature.hpp"

using istate::cplx;
using istate::GisParams;
using istate::PtParams;
using istate::Spectrum;

namespace {

double overlap(std::size_t m, std::size_t n, const PtParams& p, bool corrected) {
  auto psi = [&](std::size_t k, double x) {
    return corrected ? istate::pt_wavefunction_normalized(k, x, p) : istate::pt_wavefunction(k, x, p);
  };
  return istate::quad::gauss_legendre_graded([&](double x) { return psi(m, x) * psi(n, x); }, 0.0, p.width(), 14,
                                             0.25, 48);
}

}  // namespace

TEST(PtSpectrum, Examples) {
  const auto s = istate::pt_spectrum(PtParams::make(1.5, 2.5), 10);
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 5.0);
  EXPECT_EQ(s[2], 12.0);
  const auto w = istate::pt_spectrum(PtParams::make(1.0, 1.0), 10);
  EXPECT_EQ(w.kind(), istate::SpectrumKind::InfiniteWell);
  EXPECT_EQ(w[3], 15.0);
  EXPECT_EQ(istate::pt_spectrum_upsilon(4.5, 5)[2], 2.0 * 6.5);
  EXPECT_THROW(PtParams::make(0.8, 2.0), istate::Error);
  EXPECT_THROW(PtParams::make(1.0, 2.0), istate::Error);
  EXPECT_THROW(PtParams::make(1.5, 1.5, 0.0), istate::Error);
}

TEST(PtPotential, MidpointAndWalls) {
  const auto p = PtParams::make(1.5, 1.5, 2.0);
  const double mid = 0.5 * p.width();
  // (2k(k-1) + 2l(l-1) - (k+l)^2) / (4a^2)
  EXPECT_NEAR(istate::pt_potential(mid, p), (1.5 + 1.5 - 9.0) / 16.0, 1e-15);
  EXPECT_TRUE(std::isinf(istate::pt_potential(0.0, p)));
  EXPECT_TRUE(std::isinf(istate::pt_potential(p.width(), p)));
  EXPECT_TRUE(std::isinf(istate::pt_potential(-1.0, p)));
  EXPECT_NEAR(istate::pt_superpotential(mid, p), 0.0, 1e-15);
  EXPECT_THROW(istate::pt_superpotential(0.0, p), istate::Error);
}

TEST(PtPotential, SuperpotentialFactorization) {
  for (const auto& p : {PtParams::make(1.5, 2.5), PtParams::make(3.0, 1.2, 0.7), PtParams::make(1.0, 1.0)})
    for (double frac : {0.05, 0.2, 0.5, 0.77, 0.95}) {
      const double x = frac * p.width();
      const double W = istate::pt_superpotential(x, p);
      const double dW = istate::pt_superpotential_derivative(x, p);
      const double h = 1e-5 * p.width();
      const double fd = (istate::pt_superpotential(x + h, p) - istate::pt_superpotential(x - h, p)) / (2 * h);
      EXPECT_LT(std::abs(fd - dW) / std::abs(dW), 1e-7);
      const double V = istate::pt_potential(x, p);
      EXPECT_LT(std::abs(W * W + dW - V), 1e-12 * std::max(1.0, std::abs(V)));
    }
}

TEST(PtWavefunction, NodeCount) {
  const auto p = PtParams::make(1.5, 2.5);
  for (std::size_t n = 0; n <= 10; ++n) {
    int changes = 0;
    double prev = istate::pt_wavefunction_normalized(n, 1e-6 * p.width(), p);
    for (int i = 1; i < 20000; ++i) {
      const double v = istate::pt_wavefunction_normalized(n, p.width() * (i + 0.5) / 20001.0, p);
      if (v * prev < 0) ++changes;
      if (v != 0.0) prev = v;
    }
    EXPECT_EQ(changes, static_cast<int>(n));
  }
}

TEST(PtWavefunction, CorrectedConstantIsOrthonormal) {
  for (const auto& p : {PtParams::make(1.5, 2.5), PtParams::make(1.0, 1.0), PtParams::make(2.25, 1.5, 1.3)})
    for (std::size_t m = 0; m <= 10; ++m)
      for (std::size_t n = m; n <= 10; ++n)
        EXPECT_NEAR(overlap(m, n, p, true), m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
}

TEST(PtWavefunction, HighOrderNorms) {
  const auto p = PtParams::make(1.5, 1.5);
  for (std::size_t n : {20, 35, 50, 60}) EXPECT_NEAR(overlap(n, n, p, true), 1.0, 1e-10) << n;
  EXPECT_THROW(istate::pt_wavefunction_normalized(61, 1.0, p), istate::Error);
}

TEST(PtWavefunction, PrintedConstantNormIsGammaRatio) {
  // the printed constant leaves a norm of Gamma(2n+v)/(2n+v)
  const auto p = PtParams::make(1.5, 2.5);
  for (std::size_t n = 0; n <= 8; ++n) {
    const double x = 2.0 * n + p.upsilon();
    const double want = std::exp(istate::specfun::log_gamma(x) - std::log(x));
    EXPECT_LT(std::abs(overlap(n, n, p, false) - want) / want, 1e-10) << n;
  }
}

TEST(PtCoherent, NormAgainstDirectSum) {
  for (double v : {2.0, 3.0, 4.5})
    for (double r : {0.0, 0.3, 1.0, 3.5, 8.0}) {
      double sum = 0.0;
      for (int n = 0; n < 300; ++n)
        sum += std::exp(2.0 * n * (r > 0 ? std::log(r) : -1e300) - std::lgamma(n + 1.0) - std::lgamma(n + v + 1.0));
      if (r == 0.0) sum = 1.0 / std::tgamma(v + 1.0);
      EXPECT_LT(std::abs(istate::pt_coherent_norm(r, v) - 1.0 / std::sqrt(sum)) * std::sqrt(sum), 1e-12) << v << " " << r;
    }
}

TEST(PtCoherent, C0MatchesLibraryState) {
  const double v = 3.0;
  const auto s = istate::pt_spectrum_upsilon(v, 4200);
  for (double r : {0.5, 2.0, 6.0}) {
    const auto st = istate::gk_coherent(s, cplx{r, 0.0}, 0.0);
    EXPECT_LT(std::abs(std::abs(st[0]) - istate::pt_coherent_c0(r, v)) / std::abs(st[0]), 1e-12);
  }
}

TEST(PtCoherent, MeanGMatchesOracleAndState) {
  for (const auto& row : fixtures::load("pt_mean_g.txt")) {
    const double v = row[0], r = row[1];
    EXPECT_LT(std::abs(istate::pt_mean_G(r, v) - row[2]) / row[2], 1e-12) << v << " " << r;
    const auto s = istate::pt_spectrum_upsilon(v, 4200);
    const auto u = istate::uncertainty_report(istate::gk_coherent(s, std::polar(r, 0.4), 0.3), s);
    EXPECT_LT(std::abs(u.mean_g - row[2]) / row[2], 1e-10);
  }
}

TEST(PtCoherent, MeanGMonotone) {
  for (double v : {2.0, 3.0, 4.5}) {
    double prev = istate::pt_mean_G(0.0, v);
    EXPECT_EQ(prev, 1.0 + v);
    for (double r = 0.1; r < 20.0; r += 0.1) {
      const double g = istate::pt_mean_G(r, v);
      EXPECT_GT(g, prev);
      EXPECT_GE(g, 1.0 + v);
      prev = g;
    }
  }
}

TEST(PtCases, UnitModulusFamily) {
  // lambda = e^{i theta}: var_W = var_P = <G>/(2|cos theta|), <F> = tan(theta) <G>
  const auto s = istate::pt_spectrum(PtParams::make(1.5, 2.5), 4200);
  for (double th : {-std::numbers::pi / 3, -std::numbers::pi / 6, std::numbers::pi / 6, std::numbers::pi / 3})
    for (cplx z : {cplx{0.7, 0.0}, cplx{1.2, -0.8}}) {
      const auto st = istate::build_gis(s, GisParams::make(std::polar(1.0, th), z));
      const auto u = istate::uncertainty_report(st, s);
      const double want = u.mean_g / (2.0 * std::abs(std::cos(th)));
      EXPECT_LT(std::abs(u.var_w - want) / want, 1e-8);
      EXPECT_LT(std::abs(u.var_p - want) / want, 1e-8);
      EXPECT_LT(std::abs(u.mean_f - std::tan(th) * u.mean_g) / u.mean_g, 1e-8);
    }
}

TEST(PtCases, ImaginaryLambdaHasNoNormalizableState) {
  const auto s = istate::pt_spectrum(PtParams::make(1.5, 2.5), 4200);
  for (cplx lam : {cplx{0.0, 1.0}, cplx{0.0, -2.0}}) {
    try {
      const auto st = istate::build_gis(s, GisParams::make(lam, cplx{0.8, 0.1}));
      EXPECT_LT(std::abs(istate::uncertainty_report(st, s).mean_g), 1e-8);
    } catch (const istate::Error& e) {
      EXPECT_TRUE(istate::is_numerical(e.reason()) || e.reason() == istate::Reason::NonNormalizable) << e.what();
    }
  }
}

TEST(PtCases, RealLambdaHasNoCorrelation) {
  const auto s = istate::pt_spectrum(PtParams::make(2.0, 1.5), 4200);
  for (double lam : {0.3, 1.0, 2.5})
    for (cplx z : {cplx{0.5, 0.0}, cplx{1.0, 1.5}}) {
      const auto u = istate::uncertainty_report(istate::build_gis(s, GisParams::make(lam, z)), s);
      EXPECT_LT(std::abs(u.mean_f), 1e-9 * u.mean_g);
    }
}

TEST(PtCases, SqueezingAsLambdaShrinks) {
  const auto s = istate::pt_spectrum(PtParams::make(1.5, 1.5), 4200);
  double prev = INFINITY;
  for (double lam : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const auto u = istate::uncertainty_report(istate::build_gis(s, GisParams::make(lam, 0.6)), s);
    EXPECT_LT(u.var_w, prev);
    EXPECT_LT(std::abs(u.var_w / u.var_p - lam * lam) / (lam * lam), 1e-7);
    EXPECT_LT(std::abs(u.normalized_defect()), 1e-8);
    prev = u.var_w;
  }
  EXPECT_LT(prev, 0.5 * istate::pt_mean_G(0.0, 3.0) / 2.0);
}
