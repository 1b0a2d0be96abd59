// istate command line: build, verify, sweep, measure-check, wavefunction.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 verification
// failure. Diagnostics go to stderr as "error: <reason_code>: <message>".

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "istate/istate.hpp"

namespace {

using json = nlohmann::json;
using istate::cplx;
using istate::io::Cell;
using istate::io::Table;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
  return x;
}

std::size_t count(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(what + " must be a non-negative integer");
  return j.get<std::size_t>();
}

/// 1.5, [re, im], {"re":..,"im":..} or {"abs":..,"arg":..}
cplx complex_value(const json& j, const std::string& what) {
  if (j.is_number()) return number(j, what);
  if (j.is_array() && j.size() == 2) return {number(j[0], what + "[0]"), number(j[1], what + "[1]")};
  if (j.is_object() && j.contains("abs"))
    return std::polar(number(j.at("abs"), what + ".abs"), number(require(j, "arg", what), what + ".arg"));
  if (j.is_object()) return {number(require(j, "re", what), what + ".re"), number(require(j, "im", what), what + ".im")};
  throw ConfigError(what + " must be a number, [re, im], {re, im} or {abs, arg}");
}

/// {"start", "stop", "steps"} (inclusive ends) or {"values": [...]}.
std::vector<double> range(const json& j, const std::string& what) {
  if (j.is_number()) return {number(j, what)};
  if (j.is_object() && j.contains("values")) {
    std::vector<double> v;
    for (const auto& x : j.at("values")) v.push_back(number(x, what + ".values"));
    if (v.empty()) throw ConfigError(what + ".values is empty");
    return v;
  }
  const double a = number(require(j, "start", what), what + ".start");
  const double b = number(require(j, "stop", what), what + ".stop");
  const std::size_t n = count(require(j, "steps", what), what + ".steps");
  if (n == 0) throw ConfigError(what + ".steps must be positive");
  if (b < a) throw ConfigError(what + ": stop must not be below start");
  if (n > 1 && !(b > a)) throw ConfigError(what + ": step must be positive");
  if (n > 100000) throw ConfigError(what + ": grid too large");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

/// Complex grid: {"re": range, "im": range}, {"abs": range, "arg": range} or {"values": [complex...]}.
std::vector<cplx> complex_grid(const json& j, const std::string& what) {
  std::vector<cplx> out;
  if (j.is_object() && j.contains("values")) {
    for (const auto& x : j.at("values")) out.push_back(complex_value(x, what + ".values"));
  } else if (j.is_object() && j.contains("abs")) {
    for (double r : range(j.at("abs"), what + ".abs"))
      for (double t : range(require(j, "arg", what), what + ".arg")) out.push_back(std::polar(r, t));
  } else if (j.is_object() && j.contains("re")) {
    for (double re : range(j.at("re"), what + ".re"))
      for (double im : range(require(j, "im", what), what + ".im")) out.emplace_back(re, im);
  } else {
    throw ConfigError(what + " must have values, re/im or abs/arg");
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

istate::Spectrum spectrum(const json& root) {
  const json& j = require(root, "spectrum", "config");
  const std::string kind = require(j, "kind", "spectrum").get<std::string>();
  if (kind == "custom") {
    std::vector<double> e;
    for (const auto& x : require(j, "energies", "spectrum")) e.push_back(number(x, "spectrum.energies"));
    return istate::Spectrum::custom(std::move(e));
  }
  const std::size_t n_max = count(require(j, "n_max", "spectrum"), "spectrum.n_max");
  if (kind == "harmonic") return istate::Spectrum::harmonic(n_max);
  if (kind == "infinite_well") return istate::Spectrum::infinite_well(n_max);
  if (kind == "poschl_teller")
    return istate::Spectrum::poschl_teller(number(require(j, "kappa", "spectrum"), "spectrum.kappa"),
                                           number(require(j, "lambda", "spectrum"), "spectrum.lambda"), n_max);
  throw ConfigError("spectrum.kind must be harmonic, infinite_well, poschl_teller or custom");
}

struct Options {
  json config;
  std::string out;
  istate::io::Format format = istate::io::Format::Csv;
  std::optional<std::size_t> trunc;
  std::optional<double> tol;

  double tolerance(double fallback) const {
    if (tol) return *tol;
    if (config.contains("tol")) return number(config.at("tol"), "tol");
    return fallback;
  }

  istate::TruncationPolicy policy() const {
    std::size_t t = 0;
    if (trunc) t = *trunc;
    else if (config.contains("trunc")) t = count(config.at("trunc"), "trunc");
    return istate::TruncationPolicy::fixed(t);
  }
};

struct StateConfig {
  istate::GisParams params;
  std::string route = "auto";
};

StateConfig state_config(const json& root) {
  const json& j = require(root, "state", "config");
  StateConfig sc;
  const cplx lambda = complex_value(require(j, "lambda", "state"), "state.lambda");
  const cplx z = complex_value(require(j, "z", "state"), "state.z");
  const double alpha = j.contains("alpha") ? number(j.at("alpha"), "state.alpha") : 0.0;
  sc.params = istate::GisParams::make(lambda, z, alpha);
  if (j.contains("route")) sc.route = j.at("route").get<std::string>();
  if (sc.route != "auto" && sc.route != "recurrence" && sc.route != "continued_fraction" && sc.route != "closed_form")
    throw ConfigError("state.route must be auto, recurrence, continued_fraction or closed_form");
  return sc;
}

istate::CoefficientSet build_state(const istate::Spectrum& s, const StateConfig& sc, const istate::TruncationPolicy& pol) {
  const auto cls = sc.params.classification;
  const bool generic = cls == istate::GisClass::Squeezed || cls == istate::GisClass::GeneralizedCoherent;
  if (sc.route == "auto" || !generic) return istate::build_coefficients(s, sc.params, pol);
  if (sc.route == "recurrence") return istate::recurrence_coefficients(s, sc.params, pol);
  if (sc.route == "continued_fraction") return istate::continued_fraction_coefficients(s, sc.params, pol);
  return istate::closed_form_coefficients(s, sc.params, pol);
}

void emit(const Options& o, const Table& t) {
  if (o.out.empty()) {
    istate::io::write_table(std::cout, t, o.format);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + o.out);
  istate::io::write_table(f, t, o.format);
  if (!f) throw ConfigError("failed writing " + o.out);
}

// ---------------------------------------------------------------------------

int cmd_build(const Options& o) {
  const istate::Spectrum s = spectrum(o.config);
  const StateConfig sc = state_config(o.config);
  const istate::CoefficientSet cs = build_state(s, sc, o.policy());
  const istate::FockState st = cs.to_state();
  Table t = istate::io::coefficient_table(cs, s, sc.params);
  if (st.trunc() <= s.max_index()) istate::io::append_uncertainty(t, istate::uncertainty_report(st, s));
  emit(o, t);
  return 0;
}

struct Check {
  std::string property;
  double value;
  double tolerance;
};

int cmd_verify(const Options& o) {
  const istate::Spectrum s = spectrum(o.config);
  const StateConfig sc = state_config(o.config);
  const double tol = o.tolerance(1e-9);
  const istate::GisParams& p = sc.params;
  const istate::CoefficientSet cs = build_state(s, sc, o.policy());
  const istate::FockState st = cs.to_state();
  if (st.trunc() > s.max_index())
    throw istate::Error(istate::Reason::TruncationInsufficient,
                        "verification needs e_" + std::to_string(st.trunc()) + "; raise spectrum.n_max");
  const istate::UncertaintyReport u = istate::uncertainty_report(st, s);
  const double zscale = std::max(1.0, 2.0 * std::abs(p.z));
  std::vector<Check> checks;
  checks.push_back({"normalization", std::abs(st.norm_squared() + st.tail_mass - 1.0), tol});
  checks.push_back({"eigen_residual", istate::eigen_residual(st, s, p.lambda, p.z) / zscale, tol});
  checks.push_back({"rs_saturation", std::abs(u.normalized_defect()), tol});

  // evolving by t must land on the same family with alpha + t
  const double t_evolve = 0.37;
  StateConfig moved = sc;
  moved.params.alpha += t_evolve;
  const istate::FockState later = build_state(s, moved, istate::TruncationPolicy::fixed(st.trunc())).to_state();
  const istate::FockState evolved = istate::evolve(st, s, t_evolve);
  double stab = 0.0;
  for (std::size_t n = 0; n < st.trunc(); ++n) stab = std::max(stab, std::abs(evolved[n] - later[n]));
  checks.push_back({"temporal_stability", stab, tol});

  if (p.classification == istate::GisClass::Squeezed || p.classification == istate::GisClass::GeneralizedCoherent) {
    const auto fixed = istate::TruncationPolicy::fixed(st.trunc());
    const auto rec = istate::recurrence_coefficients(s, p, fixed).to_state();
    const auto cf = istate::continued_fraction_coefficients(s, p, fixed).to_state();
    const auto closed = istate::closed_form_coefficients(s, p, fixed).to_state();
    checks.push_back({"route_agreement",
                      std::max(istate::max_relative_difference(cf, rec), istate::max_relative_difference(closed, rec)),
                      tol});
  }
  if (p.classification == istate::GisClass::GazeauKlauder) {
    const double z2 = std::norm(p.z);
    checks.push_back({"action_identity", std::abs(istate::mean_energy(st, s) - z2) / std::max(z2, 1e-300), tol});
    checks.push_back({"lowering_residual", istate::lowering_residual(st, s, p.z) / std::max(1.0, std::abs(p.z)), tol});
    checks.push_back({"mean_f_zero", std::abs(u.mean_f), tol});
    checks.push_back({"var_w_half_g", std::abs(u.var_w - 0.5 * u.mean_g) / u.mean_g, tol});
    checks.push_back({"var_p_half_g", std::abs(u.var_p - 0.5 * u.mean_g) / u.mean_g, tol});
  }
  if (p.classification == istate::GisClass::GeneralizedCoherent) {
    const double th = std::arg(p.lambda);
    checks.push_back({"var_equal", std::abs(u.var_w - u.var_p) / u.var_w, tol});
    checks.push_back({"var_vs_g", std::abs(u.var_w - u.mean_g / (2.0 * std::abs(std::cos(th)))) / u.var_w, tol});
    checks.push_back({"mean_f_tan", std::abs(u.mean_f - std::tan(th) * u.mean_g) / std::max(1.0, std::abs(u.mean_f)), tol});
  }
  if (p.lambda.imag() == 0.0 && p.z.imag() == 0.0) checks.push_back({"mean_f_real_lambda", std::abs(u.mean_f), tol});
  if (p.classification == istate::GisClass::EvenState) {
    double odd = 0.0;
    for (std::size_t n = 1; n < st.trunc(); n += 2) odd = std::max(odd, std::abs(st[n]));
    checks.push_back({"odd_coefficients_zero", odd, 0.0});
  }
  const bool pt_like = s.kind() == istate::SpectrumKind::PoschlTeller || s.kind() == istate::SpectrumKind::InfiniteWell;
  if (pt_like && p.lambda.real() > 0.0) {
    const auto f = istate::pt_gis_analytic(p.z, p.lambda, s.upsilon(), std::max<std::size_t>(st.trunc(), 41));
    checks.push_back({"bargmann_equivalence", istate::analytic_vs_algebraic(f, st, s, 41), std::max(tol, 1e-8)});
  }

  Table t = istate::io::coefficient_table(cs, s, p);
  t.columns = {"property", "value", "tolerance", "pass"};
  t.rows.clear();
  istate::io::append_uncertainty(t, u);
  bool all = true;
  for (const auto& c : checks) {
    const bool ok = c.value <= c.tolerance;
    all = all && ok;
    t.add_row({c.property, c.value, c.tolerance, ok});
  }
  emit(o, t);
  if (!all) throw VerificationFailed("at least one property failed");
  return 0;
}

int cmd_sweep(const Options& o) {
  const istate::Spectrum s = spectrum(o.config);
  const json& sw = require(o.config, "sweep", "config");
  const std::vector<cplx> lambdas = complex_grid(require(sw, "lambda", "sweep"), "sweep.lambda");
  const std::vector<cplx> zs = complex_grid(require(sw, "z", "sweep"), "sweep.z");
  const double alpha = sw.contains("alpha") ? number(sw.at("alpha"), "sweep.alpha") : 0.0;
  const istate::TruncationPolicy pol = o.policy();

  struct Row {
    cplx lambda, z;
    istate::UncertaintyReport u;
    std::string cls, status = "ok";
    bool ok = true;
  };
  std::vector<Row> rows;
  for (const cplx l : lambdas)
    for (const cplx z : zs) {
      Row r;
      r.lambda = l;
      r.z = z;
      rows.push_back(std::move(r));
    }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      Row& r = rows[i];
      try {
        const auto p = istate::GisParams::make(r.lambda, r.z, alpha);
        r.cls = istate::to_string(p.classification);
        const auto st = istate::build_coefficients(s, p, pol).to_state();
        if (st.trunc() > s.max_index())
          throw istate::Error(istate::Reason::TruncationInsufficient, "raise spectrum.n_max");
        r.u = istate::uncertainty_report(st, s);
      } catch (const istate::Error& e) {
        r.ok = false;
        r.status = std::string(istate::to_string(e.reason()));
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < nt; ++k) pool.emplace_back(work);
  }

  Table t;
  t.meta = {{"spectrum", std::string(istate::to_string(s.kind()))}, {"alpha", alpha}};
  t.columns = {"lambda_re", "lambda_im", "z_re", "z_im", "var_w", "var_p", "mean_g", "mean_f", "rs_defect",
               "classification", "status"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const Row& r : rows) {
    const auto& u = r.u;
    t.add_row({r.lambda.real(), r.lambda.imag(), r.z.real(), r.z.imag(), r.ok ? u.var_w : nan, r.ok ? u.var_p : nan,
               r.ok ? u.mean_g : nan, r.ok ? u.mean_f : nan, r.ok ? u.rs_defect : nan, r.cls, r.status});
  }
  emit(o, t);
  return 0;
}

int cmd_measure_check(const Options& o) {
  const istate::Spectrum s = spectrum(o.config);
  const json& m = require(o.config, "measure", "config");
  const std::string density = require(m, "density", "measure").get<std::string>();
  const std::size_t n_max = count(require(m, "n_max", "measure"), "measure.n_max");
  const double tol = o.tolerance(1e-9);
  Table t;
  istate::MomentReport rep;
  std::string desc;
  std::optional<double> fitted;
  if (density == "harmonic") {
    const auto spec = istate::MeasureSpec::harmonic();
    rep = istate::moment_report(spec, s, n_max);
    desc = spec.description;
  } else if (density == "poschl_teller") {
    const bool pt_like =
        s.kind() == istate::SpectrumKind::PoschlTeller || s.kind() == istate::SpectrumKind::InfiniteWell;
    if (!pt_like) throw ConfigError("the poschl_teller density needs a poschl_teller or infinite_well spectrum");
    const double v = s.upsilon();
    double nu = 0.5 * v;  // the closed form's K order
    if (m.contains("nu")) {
      if (m.at("nu").is_string() && m.at("nu").get<std::string>() == "fit") {
        const auto fit = istate::fit_pt_measure_order(v, n_max, 0.1, v + 1.9);
        nu = fit.nu;
        fitted = nu;
      } else {
        nu = number(m.at("nu"), "measure.nu");
      }
    }
    const auto spec = istate::pt_measure_spec(v, nu);
    rep = istate::moment_report(spec, s, n_max);
    desc = spec.description;
  } else if (density == "tabulated") {
    std::vector<double> u, h;
    for (const auto& x : require(m, "u", "measure")) u.push_back(number(x, "measure.u"));
    for (const auto& x : require(m, "h", "measure")) h.push_back(number(x, "measure.h"));
    const auto spec = istate::MeasureSpec::tabulated(std::move(u), std::move(h), "tabulated");
    rep = istate::moment_report(spec, s, n_max);
    desc = spec.description;
  } else {
    throw ConfigError("measure.density must be harmonic, poschl_teller or tabulated");
  }
  t = istate::io::moment_table(rep, desc);
  if (fitted) t.meta.emplace_back("fitted_nu", *fitted);
  t.meta.emplace_back("tolerance", tol);
  emit(o, t);
  if (rep.max_residual() > tol)
    throw VerificationFailed("moment residual " + istate::num(rep.max_residual()) + " exceeds " + istate::num(tol));
  return 0;
}

int cmd_wavefunction(const Options& o) {
  const json& w = require(o.config, "wavefunction", "config");
  const istate::PtParams pp =
      istate::PtParams::make(number(require(w, "kappa", "wavefunction"), "wavefunction.kappa"),
                             number(require(w, "lambda", "wavefunction"), "wavefunction.lambda"),
                             w.contains("a") ? number(w.at("a"), "wavefunction.a") : 1.0);
  const std::size_t points = count(require(w, "points", "wavefunction"), "wavefunction.points");
  if (points < 2 || points > 1000000) throw ConfigError("wavefunction.points must lie in 2..1000000");
  std::vector<std::size_t> levels;
  if (w.contains("n"))
    for (const auto& x : w.at("n")) levels.push_back(count(x, "wavefunction.n"));
  const std::string norm = w.contains("normalization") ? w.at("normalization").get<std::string>() : "corrected";
  if (norm != "printed" && norm != "corrected") throw ConfigError("wavefunction.normalization must be printed or corrected");
  const bool printed = norm == "printed";
  auto psi = [&](std::size_t n, double x) {
    return printed ? istate::pt_wavefunction(n, x, pp) : istate::pt_wavefunction_normalized(n, x, pp);
  };

  // optional superposition Psi(x) = sum_n c_n psi_n(x) for a built state
  std::vector<cplx> coeffs;
  Table t;
  t.meta = {{"kappa", pp.kappa}, {"lambda", pp.lambda_pot}, {"a", pp.a_scale}, {"normalization", norm}};
  if (o.config.contains("state")) {
    const StateConfig sc = state_config(o.config);
    const istate::Spectrum s = istate::pt_spectrum(pp, 4200);
    const auto cs = build_state(s, sc, o.policy());
    const auto st = cs.to_state();
    constexpr std::size_t max_levels = 61;
    double dropped = st.tail_mass;
    for (std::size_t n = 0; n < st.trunc(); ++n) {
      if (n < max_levels) coeffs.push_back(st[n]);
      else dropped += std::norm(st[n]);
    }
    const double tol = o.tolerance(1e-10);
    if (dropped > tol)
      throw istate::Error(istate::Reason::TruncationInsufficient,
                          "the state carries mass " + istate::num(dropped) + " beyond n = 60, where wavefunctions are not validated");
    t.meta.emplace_back("lambda_re", sc.params.lambda.real());
    t.meta.emplace_back("lambda_im", sc.params.lambda.imag());
    t.meta.emplace_back("z_re", sc.params.z.real());
    t.meta.emplace_back("z_im", sc.params.z.imag());
    t.meta.emplace_back("alpha", sc.params.alpha);
    t.meta.emplace_back("dropped_mass", dropped);
  }
  t.columns = {"x"};
  for (std::size_t n : levels) t.columns.push_back("psi_" + std::to_string(n));
  if (!coeffs.empty()) {
    t.columns.push_back("re_psi");
    t.columns.push_back("im_psi");
  }
  const double width = pp.width();
  for (std::size_t i = 0; i < points; ++i) {
    const double x = width * (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    std::vector<Cell> row{x};
    for (std::size_t n : levels) row.emplace_back(psi(n, x));
    if (!coeffs.empty()) {
      cplx v{};
      for (std::size_t n = 0; n < coeffs.size(); ++n) v += coeffs[n] * psi(n, x);
      row.emplace_back(v.real());
      row.emplace_back(v.imag());
    }
    t.add_row(std::move(row));
  }
  emit(o, t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized intelligent states: build, verify, sweep, measure-check, wavefunction"};
  app.require_subcommand(1);
  Options o;
  std::string config_path, format = "csv";
  std::optional<std::size_t> trunc;
  std::optional<double> tol;

  const char* verbs[][2] = {{"build", "coefficient dump and uncertainty report"},
                            {"verify", "run the invariant suite; exit 3 on failure"},
                            {"sweep", "uncertainty table over a (lambda, z) grid"},
                            {"measure-check", "moment residuals of a radial density"},
                            {"wavefunction", "position-space wavefunctions on the Poschl-Teller well"}};
  for (const auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v[0], v[1]);
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--trunc", trunc, "fixed truncation (overrides the config)");
    sub->add_option("--tol", tol, "verification tolerance (overrides the config)")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read " + config_path);
    try {
      o.config = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!o.config.is_object()) throw ConfigError("config must be a JSON object");
    if (o.config.contains("format") && format == "csv" && !app.get_subcommands().front()->count("--format"))
      format = o.config.at("format").get<std::string>();
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    o.format = format == "json" ? istate::io::Format::Json : istate::io::Format::Csv;
    o.trunc = trunc;
    o.tol = tol;

    const std::string verb = app.get_subcommands().front()->get_name();
    if (verb == "build") return cmd_build(o);
    if (verb == "verify") return cmd_verify(o);
    if (verb == "sweep") return cmd_sweep(o);
    if (verb == "measure-check") return cmd_measure_check(o);
    return cmd_wavefunction(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 1;
  } catch (const istate::Error& e) {
    std::cerr << "error: " << e.what() << '\n';  // what() starts with the reason code
    return istate::is_numerical(e.reason()) ? 2 : 1;
  } catch (const VerificationFailed& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 2;
  }
}
