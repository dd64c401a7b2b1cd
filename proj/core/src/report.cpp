#include "thinspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "thinspec/errors.hpp"

namespace thinspec::report {
namespace {

using nlohmann::json;

json scan_json(const std::vector<ScanPoint>& scan) {
  json out = json::array();
  for (const auto& s : scan) out.push_back({{"x1", s.x1}, {"mu", s.mu}});
  return out;
}

std::string normalization_name(NormalizationMode m) {
  return m == NormalizationMode::kPaper ? "paper" : "unit";
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::kInvalidArgument, std::string("model JSON lacks numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const HypothesisReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"x1", s.x1},
                       {"lambda_min", s.lambda_min},
                       {"rho_min", s.rho_min},
                       {"rho_max", s.rho_max},
                       {"rho_average", s.average},
                       {"sign_change", s.sign_change}});
  }
  return {{"lambda_est", r.lambda_est},
          {"periodicity_defect", r.periodicity_defect},
          {"H1", to_string(r.h1)},
          {"H2", to_string(r.h2)},
          {"H3", to_string(r.h3)},
          {"H4", to_string(r.h4)},
          {"H5", to_string(r.h5)},
          {"all_pass", r.all_pass()},
          {"samples", samples}};
}

json to_json(const CellEigenpair& e) {
  return {{"x1", e.x1}, {"mu", e.mu}, {"residual", e.residual}, {"normalization", e.normalization}};
}

json to_json(const EffectiveModel& m) {
  return {{"schema_version", kSchemaVersion},
          {"mu0", m.mu0},
          {"mu2", m.mu2},
          {"mu2_coarse", m.mu2_coarse},
          {"mu2_fine", m.mu2_fine},
          {"a_eff", m.a_eff},
          {"a_eff_weighted", m.a_eff_weighted},
          {"a_eff_unweighted", m.a_eff_unweighted},
          {"aeff_unweighted_selected", m.aeff_unweighted},
          {"a_eff_matrix",
           {{m.a_eff_matrix(0, 0), m.a_eff_matrix(0, 1)}, {m.a_eff_matrix(1, 0), m.a_eff_matrix(1, 1)}}},
          {"c_eff", m.c_eff},
          {"rho_psi_avg", m.rho_psi_avg},
          {"cell_grid", {m.n1, m.n2}},
          {"h_mu2", m.h_mu2},
          {"h_psi", m.h_psi},
          {"scan", scan_json(m.scan)}};
}

json to_json(const OscillatorSpec& s) {
  return {{"a_eff", s.a_eff}, {"c_eff", s.c_eff}, {"mu2", s.mu2}, {"rho_avg", s.rho_avg}, {"theta", s.theta()}};
}

json to_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json fac = json::array();
    for (const auto& f : row.factorization) {
      fac.push_back({{"relative", f.relative}, {"scaled", f.scaled}, {"fit", f.fit}});
    }
    json loc = json::array();
    for (const auto& [w, frac] : row.localization) loc.push_back({{"window", w}, {"fraction", frac}});
    rows.push_back({{"eps", row.eps},
                    {"m1", row.m1},
                    {"m2", row.m2},
                    {"dofs", row.dofs},
                    {"lambda", row.lambda},
                    {"predicted", row.predicted},
                    {"leading_error", row.leading_error},
                    {"first_error", row.first_error},
                    {"residuals", row.residuals},
                    {"factorization", fac},
                    {"clustered", row.clustered},
                    {"localization", loc},
                    {"averaging", row.averaging},
                    {"negative_eigenvalue",
                     row.negative_eigenvalue ? json(*row.negative_eigenvalue) : json(nullptr)},
                    {"shift", row.shift},
                    {"iterations", row.iterations},
                    {"seconds", row.seconds}});
  }
  json out = {{"schema_version", kSchemaVersion},
              {"problem", r.problem},
              {"hypotheses", to_json(r.hypotheses)},
              {"model", to_json(r.model)},
              {"oscillator", to_json(r.spec)},
              {"nu", r.nu},
              {"rod_policy", {{"per_period", r.policy.per_period}, {"m2", r.policy.resolved_m2()}}},
              {"normalization", normalization_name(r.normalization)},
              {"factorization_skipped", r.factorization_skipped},
              {"rows", rows}};
  if (r.factorization_skipped) {
    out["notes"] = json::array(
        {"tensor-valued a: the product reference is not the limit profile, factorization errors omitted"});
  }
  return out;
}

OscillatorSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kInvalidArgument, "model JSON must be an object");
  OscillatorSpec s;
  s.a_eff = require_number(j, "a_eff");
  s.c_eff = require_number(j, "c_eff");
  s.mu2 = require_number(j, "mu2");
  s.rho_avg = j.contains("rho_avg") ? require_number(j, "rho_avg") : require_number(j, "rho_psi_avg");
  s.validate();
  return s;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  // snprintf honours LC_NUMERIC; force '.' as the decimal separator.
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return buf;
}

void write_csv(std::ostream& os, const Table& t) {
  const auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

std::map<std::string, Table> sweep_tables(const ConvergenceReport& r) {
  std::map<std::string, Table> out;
  Table& eig = out["eigenvalues"];
  eig.header = {"eps", "m1", "m2", "dofs", "j", "lambda", "eps2_lambda", "mu0", "leading_error",
                "predicted", "scaled_first_order", "nu", "first_error", "residual", "clustered"};
  Table& fac = out["factorization"];
  fac.header = {"eps", "j", "relative", "scaled", "fit"};
  Table& loc = out["localization"];
  loc.header = {"eps", "window", "fraction"};
  Table& avg = out["averaging"];
  avg.header = {"eps", "ratio", "negative_eigenvalue"};

  for (const auto& row : r.rows) {
    const std::string e = number(row.eps);
    for (std::size_t j = 0; j < row.lambda.size(); ++j) {
      const double lam = row.lambda[j];
      const bool clustered =
          std::find(row.clustered.begin(), row.clustered.end(), static_cast<int>(j)) != row.clustered.end() ||
          std::find(row.clustered.begin(), row.clustered.end(), static_cast<int>(j) - 1) != row.clustered.end();
      eig.rows.push_back({e, std::to_string(row.m1), std::to_string(row.m2), std::to_string(row.dofs),
                          std::to_string(j + 1), number(lam), number(row.eps * row.eps * lam), number(r.model.mu0),
                          number(row.leading_error[j]), number(row.predicted[j]),
                          number(row.eps * (lam - r.model.mu0 / (row.eps * row.eps))), number(r.nu[j]),
                          number(row.first_error[j]), number(row.residuals[j]), clustered ? "1" : "0"});
    }
    for (std::size_t j = 0; j < row.factorization.size(); ++j) {
      const auto& f = row.factorization[j];
      fac.rows.push_back({e, std::to_string(j + 1), number(f.relative), number(f.scaled), number(f.fit)});
    }
    for (const auto& [w, frac] : row.localization) loc.rows.push_back({e, number(w), number(frac)});
    avg.rows.push_back(
        {e, number(row.averaging), row.negative_eigenvalue ? number(*row.negative_eigenvalue) : "none"});
  }
  return out;
}

Table oscillator_table(const OscillatorSpec& s, int k, const TruncatedSolution* numeric) {
  Table t;
  t.header = {"j", "nu_closed_form"};
  if (numeric) {
    t.header.push_back("nu_numeric");
    t.header.push_back("rel_diff");
  }
  for (int j = 1; j <= k; ++j) {
    const double exact = nu_closed_form(s, j);
    std::vector<std::string> row = {std::to_string(j), number(exact)};
    if (numeric) {
      const double v = numeric->nu.at(j - 1);
      row.push_back(number(v));
      row.push_back(number(std::abs(v - exact) / std::max(std::abs(exact), 1e-300)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_sweep(const ConvergenceReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root / "tables", ec);
  if (ec) throw Error(ErrorKind::kInvalidArgument, "cannot create output directory " + dir + ": " + ec.message());

  std::ofstream js(root / "report.json", std::ios::binary);
  js << to_json(r).dump(2) << '\n';
  for (const auto& [stem, table] : sweep_tables(r)) {
    std::ofstream os(root / "tables" / (stem + ".csv"), std::ios::binary);
    write_csv(os, table);
    if (!os) throw Error(ErrorKind::kInvalidArgument, "failed writing " + stem + ".csv");
  }
  if (!js) throw Error(ErrorKind::kInvalidArgument, "failed writing report.json");
}

}  // namespace thinspec::report
