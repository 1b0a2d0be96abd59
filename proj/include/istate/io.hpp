#pragma once

// Flat tables for export. CSV uses 17 significant digits in scientific
// notation via std::to_chars (locale independent); JSON goes through
// nlohmann::ordered_json so key order is fixed.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "istate/bargmann.hpp"
#include "istate/error.hpp"
#include "istate/gis.hpp"
#include "istate/measure.hpp"
#include "istate/operators.hpp"
#include "istate/spectrum.hpp"

namespace istate::io {

enum class Format { Csv, Json };

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

using Cell = std::variant<double, long long, std::string, bool>;

inline std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(V{}, c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  struct V {
    nlohmann::ordered_json operator()(double x) const {
      // JSON has no inf/nan literals
      if (!std::isfinite(x)) return format_double(x);
      return x;
    }
    nlohmann::ordered_json operator()(long long x) const { return x; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  };
  return std::visit(V{}, c);
}

struct Table {
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> r) {
    if (r.size() != columns.size()) throw Error(Reason::InvalidArgument, "row width does not match the header");
    rows.push_back(std::move(r));
  }
};

/// Metadata as "# key=value" lines, then the header and rows.
inline void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << cell_text(v) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = cell_json(v);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = cell_json(r[i]);
    rows.push_back(std::move(o));
  }
  return {{"meta", std::move(meta)}, {"rows", std::move(rows)}};
}

inline void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::Csv) write_csv(os, t);
  else os << to_json(t).dump(2) << '\n';
}

inline void append_uncertainty(Table& t, const UncertaintyReport& u) {
  t.meta.emplace_back("mean_w", u.mean_w);
  t.meta.emplace_back("mean_p", u.mean_p);
  t.meta.emplace_back("var_w", u.var_w);
  t.meta.emplace_back("var_p", u.var_p);
  t.meta.emplace_back("mean_g", u.mean_g);
  t.meta.emplace_back("mean_f", u.mean_f);
  t.meta.emplace_back("rs_defect", u.rs_defect);
  const bool has_tail = std::any_of(t.meta.begin(), t.meta.end(), [](const auto& kv) { return kv.first == "tail_mass"; });
  if (!has_tail) t.meta.emplace_back("tail_mass", u.tail_mass);
}

/// One-row table with the fixed uncertainty field names.
inline Table uncertainty_table(const UncertaintyReport& u) {
  Table t;
  t.columns = {"mean_w", "mean_p", "var_w", "var_p", "mean_g", "mean_f", "rs_defect", "tail_mass"};
  t.add_row({u.mean_w, u.mean_p, u.var_w, u.var_p, u.mean_g, u.mean_f, u.rs_defect, u.tail_mass});
  return t;
}

inline Table coefficient_table(const CoefficientSet& cs, const Spectrum& s, const GisParams& p) {
  Table t;
  t.meta = {{"spectrum", std::string(to_string(s.kind()))},
            {"lambda_re", p.lambda.real()},
            {"lambda_im", p.lambda.imag()},
            {"z_re", p.z.real()},
            {"z_im", p.z.imag()},
            {"alpha", cs.alpha},
            {"trunc", static_cast<long long>(cs.trunc())},
            {"tail_mass", cs.tail_mass},
            {"route", std::string(to_string(cs.route))},
            {"classification", std::string(to_string(p.classification))}};
  if (!cs.note.empty()) t.meta.emplace_back("note", cs.note);
  t.columns = {"n", "re_c", "im_c", "log_abs_c"};
  for (std::size_t n = 0; n < cs.trunc(); ++n) {
    const cplx c = cs.coefficient(n);
    t.add_row({static_cast<long long>(n), c.real(), c.imag(), cs.log_magnitudes[n]});
  }
  return t;
}

inline Table moment_table(const MomentReport& r, const std::string& description) {
  Table t;
  t.meta = {{"density", description}, {"max_rel_residual", r.max_residual()}};
  t.columns = {"n", "moment_numeric", "moment_target", "rel_residual"};
  for (std::size_t i = 0; i < r.n.size(); ++i)
    t.add_row({static_cast<long long>(r.n[i]), r.numeric[i], r.target[i], r.rel_residual[i]});
  return t;
}

inline Table series_table(const AnalyticState& f) {
  Table t;
  t.meta = {{"domain_radius", f.domain_radius}};
  t.columns = {"n", "re_coeff", "im_coeff"};
  for (std::size_t n = 0; n < f.series.size(); ++n)
    t.add_row({static_cast<long long>(n), f.series[n].real(), f.series[n].imag()});
  return t;
}

inline Table sample_table(const AnalyticState& f, const std::vector<cplx>& points) {
  Table t;
  t.columns = {"re_z", "im_z", "re_f", "im_f"};
  for (const cplx z : points) {
    const cplx v = f(z);
    t.add_row({z.real(), z.imag(), v.real(), v.imag()});
  }
  return t;
}

}  // namespace istate::io
