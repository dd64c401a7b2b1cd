#include "thinspec/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "thinspec/errors.hpp"

namespace thinspec {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node* at, const std::string& msg) const {
    std::string where = source_;
    if (at) {
      const auto& b = at->source().begin;
      where += ":" + std::to_string(b.line) + ":" + std::to_string(b.column);
    }
    throw Error(ErrorKind::kConfig, where + ": " + msg);
  }

  void check_keys(const toml::table& t, const std::string& prefix, const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : t) {
      if (!allowed.count(std::string(k.str()))) {
        fail(&v, "unknown key '" + prefix + std::string(k.str()) + "'");
      }
    }
  }

  const toml::table* table(const toml::table& root, const char* name) const {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) fail(n, std::string("'") + name + "' must be a table");
    return n->as_table();
  }

  std::optional<std::string> str(const toml::table& t, const char* key) const {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) fail(n, std::string("'") + key + "' must be a string");
    return n->value<std::string>();
  }

  std::optional<double> num(const toml::table& t, const char* key) const {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_number()) fail(n, std::string("'") + key + "' must be a number");
    return n->value<double>();
  }

  std::optional<int> integer(const toml::table& t, const char* key) const {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_integer()) fail(n, std::string("'") + key + "' must be an integer");
    return static_cast<int>(*n->value<int64_t>());
  }

  std::optional<bool> boolean(const toml::table& t, const char* key) const {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) fail(n, std::string("'") + key + "' must be a boolean");
    return n->value<bool>();
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void read_problem(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "problem.", {"name", "description", "a", "a11", "a12", "a22", "rho"});
  const auto rho = r.str(t, "rho");
  if (!rho) r.fail(&t, "[problem] needs 'rho'");
  const auto a = r.str(t, "a");
  const auto a11 = r.str(t, "a11");
  const auto a12 = r.str(t, "a12");
  const auto a22 = r.str(t, "a22");
  const std::string name = r.str(t, "name").value_or("problem");
  try {
    if (a) {
      if (a11 || a12 || a22) r.fail(t.get("a"), "give either 'a' or 'a11', 'a12', 'a22', not both");
      cfg.problem = make_scalar_problem(name, *a, *rho);
    } else {
      if (!a11 || !a22) r.fail(&t, "[problem] needs 'a' or 'a11' and 'a22'");
      cfg.problem = make_tensor_problem(name, *a11, a12.value_or("0"), *a22, *rho);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    r.fail(&t, "[problem] " + std::string(e.what()));
  }
  cfg.problem.description = r.str(t, "description").value_or("");
}

void read_cell(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "cell.", {"grid", "h_mu2", "h_psi", "aeff_unweighted"});
  if (const toml::node* g = t.get("grid")) {
    const toml::array* arr = g->as_array();
    if (!arr || arr->size() != 2 || !(*arr)[0].is_integer() || !(*arr)[1].is_integer()) {
      r.fail(g, "'cell.grid' must be [n1, n2]");
    }
    cfg.cell.n1 = static_cast<int>(*(*arr)[0].value<int64_t>());
    cfg.cell.n2 = static_cast<int>(*(*arr)[1].value<int64_t>());
    if (cfg.cell.n1 < 4 || cfg.cell.n2 < 2) r.fail(g, "'cell.grid' too coarse");
  }
  if (auto v = r.num(t, "h_mu2")) {
    if (!(*v > 0.0 && *v <= 0.25)) r.fail(t.get("h_mu2"), "'cell.h_mu2' must be in (0, 0.25]");
    cfg.cell.h_mu2 = *v;
  }
  if (auto v = r.num(t, "h_psi")) {
    if (!(*v > 0.0 && *v < 1.0)) r.fail(t.get("h_psi"), "'cell.h_psi' must be in (0, 1)");
    cfg.cell.h_psi = *v;
  }
  if (auto v = r.boolean(t, "aeff_unweighted")) cfg.cell.aeff_unweighted = *v;
}

void read_rod(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "rod.", {"per_period", "m2"});
  if (auto v = r.integer(t, "per_period")) {
    if (*v < 1) r.fail(t.get("per_period"), "'rod.per_period' must be positive");
    cfg.sweep.policy.per_period = *v;
  }
  if (auto v = r.integer(t, "m2")) {
    if (*v < 4) r.fail(t.get("m2"), "'rod.m2' must be at least 4");
    cfg.sweep.policy.m2 = *v;
  }
}

void read_sweep(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "sweep.", {"eps", "jmax", "normalization", "shift_fraction"});
  if (const toml::node* n = t.get("eps")) {
    const toml::array* arr = n->as_array();
    if (!arr || arr->empty()) r.fail(n, "'sweep.eps' must be a nonempty array");
    cfg.sweep.eps.clear();
    for (const auto& item : *arr) {
      try {
        if (item.is_string()) {
          cfg.sweep.eps.push_back(parse_eps(*item.value<std::string>()));
        } else if (item.is_number()) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", *item.value<double>());
          cfg.sweep.eps.push_back(parse_eps(buf));
        } else {
          r.fail(&item, "'sweep.eps' entries must be strings or numbers");
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kConfig) throw;
        r.fail(&item, e.what());
      }
    }
  }
  if (auto v = r.integer(t, "jmax")) {
    if (*v < 1 || *v > kMaxHermiteIndex) r.fail(t.get("jmax"), "'sweep.jmax' out of range");
    cfg.sweep.j_max = *v;
  }
  if (auto v = r.str(t, "normalization")) {
    if (*v == "paper") {
      cfg.sweep.normalization = NormalizationMode::kPaper;
    } else if (*v == "unit") {
      cfg.sweep.normalization = NormalizationMode::kUnit;
    } else {
      r.fail(t.get("normalization"), "'sweep.normalization' must be \"paper\" or \"unit\"");
    }
  }
  if (auto v = r.num(t, "shift_fraction")) {
    if (!(*v >= 0.0 && *v < 1.0)) r.fail(t.get("shift_fraction"), "'sweep.shift_fraction' must be in [0, 1)");
    cfg.sweep.shift_fraction = *v;
  }
}

void read_solver(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "solver.", {"tol", "max_iter"});
  if (auto v = r.num(t, "tol")) {
    if (!(*v > 0.0 && *v < 1e-3)) r.fail(t.get("tol"), "'solver.tol' must be in (0, 1e-3)");
    cfg.sweep.tol = *v;
    cfg.cell.principal.eig.tol = *v;
  }
  if (auto v = r.integer(t, "max_iter")) {
    if (*v < 10) r.fail(t.get("max_iter"), "'solver.max_iter' must be at least 10");
    cfg.cell.principal.eig.max_iter = *v;
  }
}

void read_output(const Reader& r, const toml::table& t, RunConfig& cfg) {
  r.check_keys(t, "output.", {"dir", "dump_mm"});
  if (auto v = r.str(t, "dir")) cfg.output_dir = *v;
  if (auto v = r.boolean(t, "dump_mm")) cfg.dump_mm = *v;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
  const Reader r(source);
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw Error(ErrorKind::kConfig, source + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) +
                                        ": " + std::string(e.description()));
  }
  r.check_keys(root, "", {"problem", "cell", "rod", "sweep", "solver", "output"});

  RunConfig cfg;
  cfg.source = source;
  const toml::table* problem = r.table(root, "problem");
  if (!problem) r.fail(nullptr, "missing [problem] table");
  read_problem(r, *problem, cfg);
  if (const auto* t = r.table(root, "cell")) read_cell(r, *t, cfg);
  if (const auto* t = r.table(root, "rod")) read_rod(r, *t, cfg);
  if (const auto* t = r.table(root, "sweep")) read_sweep(r, *t, cfg);
  if (const auto* t = r.table(root, "solver")) read_solver(r, *t, cfg);
  if (const auto* t = r.table(root, "output")) read_output(r, *t, cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace thinspec
