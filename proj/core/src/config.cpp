#include "torusns/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace torusns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Extractor {
  std::map<std::string, std::string> kv;
  std::vector<std::string>* violations;
  std::vector<std::string> consumed;

  bool has(const std::string& key) {
    consumed.push_back(key);
    return kv.count(key) > 0;
  }
  template <typename T>
  void number(const std::string& key, T& out, double lo, double hi, const std::string& why) {
    if (!has(key)) return;
    std::istringstream in(kv[key]);
    double v;
    if (!(in >> v)) {
      violations->push_back(key + ": not a number ('" + kv[key] + "')");
      return;
    }
    if (v < lo || v > hi) {
      violations->push_back(key + ": " + why);
      return;
    }
    out = static_cast<T>(v);
  }
  void text(const std::string& key, std::string& out) {
    if (has(key)) out = trim(kv[key]);
  }
  void number_list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    std::vector<double> values;
    std::stringstream in(kv[key]);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        values.push_back(std::stod(trim(item)));
      } catch (...) {
        violations->push_back(key + ": bad list entry '" + trim(item) + "'");
        return;
      }
    }
    out = std::move(values);
  }
};

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  Extractor ex;
  ex.violations = &result.violations;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      result.violations.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    ex.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  RunConfig cfg;
  ex.number("grid.d", cfg.grid.d, 1, 3, "d must be 1, 2, or 3");
  ex.number("grid.n", cfg.grid.n, 4, 4096, "n must lie in [4, 4096]");
  ex.number("grid.dealias", cfg.grid.dealias_fraction, 1e-9, 1.0,
            "dealias fraction must lie in (0, 1]");
  if (cfg.grid.n % 2 != 0) result.violations.push_back("grid.n: must be even");

  ex.text("law.name", cfg.law.name);
  for (const char* key : {"mu", "lambda", "mu0", "coef", "exponent", "lambda0", "lambda_slope",
                          "delta", "p"}) {
    const std::string full = std::string("law.") + key;
    if (ex.has(full)) {
      try {
        cfg.law.params[key] = std::stod(ex.kv[full]);
      } catch (...) {
        result.violations.push_back(full + ": not a number");
      }
    }
  }
  ex.number("law.s_max", cfg.law.s_max, 1e-12, 1e12, "scan bound must be positive and finite");
  ex.number("law.r_max", cfg.law.r_max, 1e-12, 1e12, "scan bound must be positive and finite");
  if (ex.has("law.table")) {
    std::stringstream ts(ex.kv["law.table"]);
    std::string pair;
    while (std::getline(ts, pair, ',')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        result.violations.push_back("law.table: entries must be 's:mu'");
        break;
      }
      try {
        cfg.law.table.emplace_back(std::stod(trim(pair.substr(0, colon))),
                                   std::stod(trim(pair.substr(colon + 1))));
      } catch (...) {
        result.violations.push_back("law.table: bad numeric entry");
        break;
      }
    }
  }

  ex.text("pressure.name", cfg.pressure.name);
  for (const char* key : {"value", "K", "gamma"}) {
    const std::string full = std::string("pressure.") + key;
    if (ex.has(full)) {
      try {
        cfg.pressure.params[key] = std::stod(ex.kv[full]);
      } catch (...) {
        result.violations.push_back(full + ": not a number");
      }
    }
  }
  if (ex.has("scheme.lambda_bar")) {
    try {
      cfg.lambda_bar = std::stod(ex.kv["scheme.lambda_bar"]);
      if (!(*cfg.lambda_bar > -0.5))
        result.violations.push_back("scheme.lambda_bar: must exceed -1/2");
    } catch (...) {
      result.violations.push_back("scheme.lambda_bar: not a number");
    }
  }

  ex.text("data.rho0", cfg.rho0_preset);
  ex.number("data.rho0_value", cfg.rho0_value, 0.0, 1e12, "must be >= 0");
  ex.number("data.rho0_amplitude", cfg.rho0_amplitude, 0.0, 1e12, "must be >= 0");
  ex.number("data.bump_power", cfg.bump_power, 2, 64, "bump power must lie in [2, 64]");
  ex.text("data.g", cfg.g_preset);
  ex.number("data.g_amplitude", cfg.g_amplitude, -1e12, 1e12, "out of range");
  ex.number("data.g_wave", cfg.g_wave, 1, 1024, "wavenumber must be >= 1");
  ex.number("data.g_component", cfg.g_component, 0, 2, "component must be 0..2");
  ex.text("data.f", cfg.f_preset);
  ex.number("data.f_amplitude", cfg.f_amplitude, -1e12, 1e12, "out of range");
  ex.number("data.f_wave", cfg.f_wave, 1, 1024, "wavenumber must be >= 1");
  ex.number("data.f_component", cfg.f_component, 0, 2, "component must be 0..2");
  ex.number("data.q", cfg.q, 1.0, 64.0, "q out of range");
  ex.number("data.T", cfg.T, 1e-12, 1e6, "T must be positive");

  ex.number_list("scheme.delta_schedule", cfg.delta_schedule);
  ex.number("scheme.k_max", cfg.k_max, 1, 10000, "k_max must be >= 1");
  ex.number("scheme.tol", cfg.picard_tol, 0.0, 1e6, "tolerance must be positive");
  if (ex.kv.count("scheme.tol") && !(cfg.picard_tol > 0.0))
    result.violations.push_back("scheme.tol: tolerance must be positive");
  ex.number("scheme.dt", cfg.dt, 1e-12, 1e6, "dt must be positive");
  if (ex.kv.count("scheme.dt")) {
    try {
      if (!(std::stod(ex.kv["scheme.dt"]) > 0.0))
        result.violations.push_back("scheme.dt: dt must be positive");
    } catch (...) {
    }
  }
  ex.number("scheme.cfl_safety", cfg.cfl_safety, 1e-6, 1.0, "cfl_safety must lie in (0, 1]");
  ex.number("scheme.implicit_tol", cfg.implicit_tol, 0.0, 1.0, "must lie in (0, 1)");
  ex.number("scheme.implicit_max_iter", cfg.implicit_max_iter, 1, 100000, "must be >= 1");
  ex.number("scheme.cauchy_tol", cfg.cauchy_tol, 0.0, 1e6, "must be positive");
  ex.number("monitor.threshold_factor", cfg.blowup_threshold_factor, 1e-12, 1e300,
            "must be positive");
  ex.text("output.dir", cfg.output_dir);
  if (ex.has("output.checkpoints")) cfg.checkpoints = ex.kv["output.checkpoints"] != "off";
  if (ex.has("seed")) {
    try {
      cfg.seed = std::stoull(ex.kv["seed"]);
    } catch (...) {
      result.violations.push_back("seed: not an unsigned integer");
    }
  }

  // cross-field constraints from the theorem hypotheses
  const double q_needed = cfg.grid.d == 3 ? 3.0 : static_cast<double>(cfg.grid.d);
  if (!(cfg.q > q_needed))
    result.violations.push_back("data.q: q must exceed " +
                                (cfg.grid.d == 3 ? std::string("3") : std::to_string(cfg.grid.d)));
  for (std::size_t i = 1; i < cfg.delta_schedule.size(); ++i)
    if (!(cfg.delta_schedule[i] < cfg.delta_schedule[i - 1])) {
      result.violations.push_back("scheme.delta_schedule: must decrease strictly");
      break;
    }
  for (double dlt : cfg.delta_schedule)
    if (!(dlt > 0.0)) {
      result.violations.push_back("scheme.delta_schedule: entries must be positive");
      break;
    }
  if (cfg.rho0_preset == "random_band" && !(cfg.rho0_amplitude < cfg.rho0_value))
    result.violations.push_back(
        "data.rho0_amplitude: random fluctuation must stay below the base value");
  if (cfg.rho0_preset != "constant" && cfg.rho0_preset != "bump_with_vacuum" &&
      cfg.rho0_preset != "random_band")
    result.violations.push_back("data.rho0: unknown preset '" + cfg.rho0_preset + "'");
  if (cfg.g_preset != "zero" && cfg.g_preset != "single_mode" && cfg.g_preset != "random_band")
    result.violations.push_back("data.g: unknown preset '" + cfg.g_preset + "'");
  if (cfg.f_preset != "zero" && cfg.f_preset != "single_mode" && cfg.f_preset != "ramp")
    result.violations.push_back("data.f: unknown preset '" + cfg.f_preset + "'");
  if (cfg.g_component >= cfg.grid.d)
    result.violations.push_back("data.g_component: exceeds grid dimension");
  if (cfg.f_component >= cfg.grid.d)
    result.violations.push_back("data.f_component: exceeds grid dimension");

  // unknown keys
  for (const auto& [key, value] : ex.kv) {
    (void)value;
    bool known = false;
    for (const auto& k : ex.consumed)
      if (k == key) {
        known = true;
        break;
      }
    if (!known) result.violations.push_back("unknown key '" + key + "'");
  }

  if (result.violations.empty()) result.config = std::move(cfg);
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.violations.push_back("cannot open config file '" + path + "'");
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::canonical_text() const {
  std::ostringstream out;
  char buf[64];
  const auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    out << buf;
  };
  num("grid.d", grid.d);
  num("grid.n", grid.n);
  num("grid.dealias", grid.dealias_fraction);
  out << "law.name = " << law.name << "\n";
  for (const auto& [k, v] : law.params) num(("law." + k).c_str(), v);
  for (const auto& [s, m] : law.table) {
    num("law.table.s", s);
    num("law.table.mu", m);
  }
  num("law.s_max", law.s_max);
  num("law.r_max", law.r_max);
  out << "pressure.name = " << pressure.name << "\n";
  for (const auto& [k, v] : pressure.params) num(("pressure." + k).c_str(), v);
  if (lambda_bar) num("scheme.lambda_bar", *lambda_bar);
  out << "data.rho0 = " << rho0_preset << "\n";
  num("data.rho0_value", rho0_value);
  num("data.rho0_amplitude", rho0_amplitude);
  num("data.bump_power", bump_power);
  out << "data.g = " << g_preset << "\n";
  num("data.g_amplitude", g_amplitude);
  num("data.g_wave", g_wave);
  num("data.g_component", g_component);
  out << "data.f = " << f_preset << "\n";
  num("data.f_amplitude", f_amplitude);
  num("data.f_wave", f_wave);
  num("data.f_component", f_component);
  num("data.q", q);
  num("data.T", T);
  for (double dlt : delta_schedule) num("scheme.delta_schedule.entry", dlt);
  num("scheme.k_max", k_max);
  num("scheme.tol", picard_tol);
  num("scheme.dt", dt);
  num("scheme.cfl_safety", cfl_safety);
  num("scheme.implicit_tol", implicit_tol);
  num("scheme.implicit_max_iter", implicit_max_iter);
  num("scheme.cauchy_tol", cauchy_tol);
  num("monitor.threshold_factor", blowup_threshold_factor);
  num("seed", static_cast<double>(seed));
  return out.str();
}

}  // namespace torusns
