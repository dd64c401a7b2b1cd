#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thinspec/cell.hpp"
#include "thinspec/finescale.hpp"
#include "thinspec/hypotheses.hpp"
#include "thinspec/oscillator.hpp"

namespace thinspec::report {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const CellEigenpair& e);
nlohmann::json to_json(const EffectiveModel& m);
nlohmann::json to_json(const OscillatorSpec& s);
nlohmann::json to_json(const ConvergenceReport& r);

// Reads either an OscillatorSpec object (a_eff, c_eff, mu2, rho_avg) or an
// EffectiveModel object (rho_psi_avg in place of rho_avg).
OscillatorSpec spec_from_json(const nlohmann::json& j);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Fixed "%.12e" formatting, independent of the global locale.
std::string number(double v);
// Comma separated, header row first, LF line endings.
void write_csv(std::ostream& os, const Table& t);

// One table per metric, keyed by file stem: eigenvalues, factorization,
// localization, averaging.
std::map<std::string, Table> sweep_tables(const ConvergenceReport& r);

// j, nu_closed_form and, when `numeric` is given, nu_numeric and rel_diff.
Table oscillator_table(const OscillatorSpec& s, int k, const TruncatedSolution* numeric = nullptr);

// Writes dir/report.json and dir/tables/<stem>.csv.
void write_sweep(const ConvergenceReport& r, const std::string& dir);

}  // namespace thinspec::report
