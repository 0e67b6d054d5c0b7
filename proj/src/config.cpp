#include "vislide/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace vislide {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws_or_comma(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!token.empty()) out.push_back(std::exchange(token, {}));
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config error: " + where + ": '" + s +
                      "' is not a number");
  }
}

long long parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config error: " + where + ": '" + s +
                      "' is not an integer");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config error: " + where + ": '" + s +
                      "' is not an unsigned integer");
  }
}

}  // namespace

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto sit = sections.find(section);
  return sit != sections.end() && sit->second.count(key) > 0;
}

const IniValue& IniFile::require(const std::string& section,
                                 const std::string& key) const {
  auto sit = sections.find(section);
  if (sit == sections.end()) {
    throw ConfigError("config error: missing section [" + section + "]");
  }
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) {
    throw ConfigError("config error: [" + section + "] missing required key '" +
                      key + "'");
  }
  return kit->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto sit = sections.find(section);
  if (sit == sections.end()) return fallback;
  auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second.text;
}

IniFile parse_ini(const std::string& text, const std::string& origin) {
  IniFile out;
  std::string current;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    // strip comments
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("config error: " + origin + ":" +
                          std::to_string(line_no) +
                          ": malformed section header '" + trim(raw) + "'");
      }
      current = trim(line.substr(1, line.size() - 2));
      out.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      const auto col = raw.find_first_not_of(" \t") + 1;
      throw ConfigError("config error: " + origin + ":" +
                        std::to_string(line_no) + ":" + std::to_string(col) +
                        ": expected 'key = value'");
    }
    if (current.empty()) {
      throw ConfigError("config error: " + origin + ":" +
                        std::to_string(line_no) +
                        ": key outside of any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config error: " + origin + ":" +
                        std::to_string(line_no) + ": empty key");
    }
    out.sections[current][key] = IniValue{value, line_no};
  }
  return out;
}

namespace {

std::vector<double> parse_broadcast(const IniFile& ini,
                                    const std::string& section,
                                    const std::string& key, std::size_t dim,
                                    double fallback) {
  if (!ini.has(section, key)) return std::vector<double>(dim, fallback);
  const std::string where = "[" + section + "] " + key;
  const auto tokens = split_ws_or_comma(ini.require(section, key).text);
  if (tokens.size() == 1) {
    return std::vector<double>(dim, parse_double(tokens[0], where));
  }
  if (tokens.size() != dim) {
    throw ConfigError("config error: " + where + ": expected 1 or " +
                      std::to_string(dim) + " values, got " +
                      std::to_string(tokens.size()));
  }
  std::vector<double> out;
  out.reserve(dim);
  for (const auto& t : tokens) out.push_back(parse_double(t, where));
  return out;
}

SetConfig parse_set(const IniFile& ini, const std::string& key) {
  SetConfig cfg;
  const std::string text = ini.get_or("problem", key, "box 0 1");
  const auto tokens = split_ws_or_comma(text);
  const std::string where = "[problem] " + key;
  if (tokens.empty()) throw ConfigError("config error: " + where + ": empty");
  if (tokens[0] == "box") {
    if (tokens.size() != 3) {
      throw ConfigError("config error: " + where + ": expected 'box <lo> <hi>'");
    }
    cfg.kind = SetKind::box;
    cfg.lo = parse_double(tokens[1], where);
    cfg.hi = parse_double(tokens[2], where);
  } else if (tokens[0] == "simplex") {
    cfg.kind = SetKind::simplex;
  } else if (tokens[0] == "ball") {
    if (tokens.size() != 2) {
      throw ConfigError("config error: " + where + ": expected 'ball <radius>'");
    }
    cfg.kind = SetKind::ball;
    cfg.radius = parse_double(tokens[1], where);
  } else {
    throw ConfigError("config error: " + where + ": unknown set kind '" +
                      tokens[0] + "' (box | simplex | ball)");
  }
  return cfg;
}

FeasibleSet realize_set(const SetConfig& cfg, std::size_t dim) {
  switch (cfg.kind) {
    case SetKind::box:
      return FeasibleSet::box_uniform(dim, cfg.lo, cfg.hi);
    case SetKind::simplex:
      return FeasibleSet::simplex(dim);
    case SetKind::ball:
      return FeasibleSet::ball(std::vector<double>(dim, 0.0), cfg.radius);
    default:
      throw ConfigError("config error: unsupported set kind");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const IniFile& ini) {
  ExperimentConfig cfg;

  // [problem]
  const std::string family = ini.require("problem", "family").text;
  if (family == "saddle") {
    cfg.problem.family = ProblemFamily::saddle;
  } else if (family == "matrix_game") {
    cfg.problem.family = ProblemFamily::matrix_game;
  } else {
    throw ConfigError(
        "config error: [problem] family must be saddle | matrix_game, got '" +
        family + "'");
  }
  cfg.problem.m =
      static_cast<std::size_t>(parse_int(ini.require("problem", "m").text,
                                         "[problem] m"));
  cfg.problem.n =
      static_cast<std::size_t>(parse_int(ini.require("problem", "n").text,
                                         "[problem] n"));
  if (cfg.problem.m == 0 || cfg.problem.n == 0) {
    throw ConfigError("config error: [problem] m and n must be positive");
  }

  const std::string k_source = ini.get_or("problem", "k_source", "random");
  if (k_source == "random") {
    cfg.problem.k_seed =
        parse_u64(ini.get_or("problem", "k_seed", "0"), "[problem] k_seed");
  } else if (k_source == "inline") {
    const std::string rows_text = ini.require("problem", "k_rows").text;
    std::vector<std::vector<double>> rows;
    std::string row_text;
    std::istringstream row_stream(rows_text);
    while (std::getline(row_stream, row_text, ';')) {
      std::vector<double> row;
      for (const auto& t : split_ws_or_comma(row_text)) {
        row.push_back(parse_double(t, "[problem] k_rows"));
      }
      if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.size() != cfg.problem.m) {
      throw ConfigError("config error: [problem] k_rows: expected " +
                        std::to_string(cfg.problem.m) + " rows, got " +
                        std::to_string(rows.size()));
    }
    for (const auto& row : rows) {
      if (row.size() != cfg.problem.n) {
        throw ConfigError("config error: [problem] k_rows: every row needs " +
                          std::to_string(cfg.problem.n) + " entries");
      }
    }
    cfg.problem.k_rows = std::move(rows);
  } else {
    throw ConfigError(
        "config error: [problem] k_source must be random | inline");
  }
  if (ini.has("problem", "k_scale_to")) {
    cfg.problem.k_scale_to = parse_double(
        ini.require("problem", "k_scale_to").text, "[problem] k_scale_to");
  }

  cfg.problem.fx_weights =
      parse_broadcast(ini, "problem", "fx_weights", cfg.problem.n, 0.0);
  cfg.problem.fx_targets =
      parse_broadcast(ini, "problem", "fx_targets", cfg.problem.n, 0.0);
  cfg.problem.gy_weights =
      parse_broadcast(ini, "problem", "gy_weights", cfg.problem.m, 0.0);
  cfg.problem.gy_targets =
      parse_broadcast(ini, "problem", "gy_targets", cfg.problem.m, 0.0);
  cfg.problem.x_set = parse_set(ini, "x_set");
  cfg.problem.y_set = parse_set(ini, "y_set");

  const std::string prox = ini.get_or("problem", "prox", "euclidean");
  if (prox == "euclidean") {
    cfg.problem.prox = ProxKind::euclidean;
  } else if (prox == "entropy") {
    cfg.problem.prox = ProxKind::entropy;
  } else {
    throw ConfigError("config error: [problem] prox must be euclidean | entropy");
  }

  const auto j_tokens = split_ws_or_comma(ini.get_or("problem", "j", "zero"));
  if (j_tokens.size() == 1 && j_tokens[0] == "zero") {
    cfg.problem.j = SimpleTerm::zero();
  } else if (j_tokens.size() == 2 && j_tokens[0] == "l1") {
    cfg.problem.j = SimpleTerm::l1(parse_double(j_tokens[1], "[problem] j"));
  } else {
    throw ConfigError("config error: [problem] j must be 'zero' or 'l1 <weight>'");
  }

  cfg.problem.sigma =
      parse_double(ini.get_or("problem", "sigma", "0"), "[problem] sigma");
  if (cfg.problem.sigma < 0.0) {
    throw ConfigError("config error: [problem] sigma must be >= 0");
  }
  const std::string noise =
      ini.get_or("problem", "noise", "gaussian_additive");
  if (noise == "gaussian_additive") {
    cfg.problem.noise = NoiseKind::gaussian_additive;
  } else if (noise == "coordinate_sparsified") {
    cfg.problem.noise = NoiseKind::coordinate_sparsified;
  } else {
    throw ConfigError(
        "config error: [problem] noise must be gaussian_additive | "
        "coordinate_sparsified");
  }

  // [solver]
  const std::string method = ini.require("solver", "method").text;
  if (method == "mps") {
    cfg.solver = SolverKind::mps;
  } else if (method == "smps") {
    cfg.solver = SolverKind::smps;
  } else if (method == "mirror_prox") {
    cfg.solver = SolverKind::mirror_prox;
  } else {
    throw ConfigError(
        "config error: [solver] method must be mps | smps | mirror_prox");
  }
  if (ini.has("solver", "step")) {
    cfg.mirror_prox_step =
        parse_double(ini.require("solver", "step").text, "[solver] step");
    if (!(*cfg.mirror_prox_step > 0.0)) {
      throw ConfigError("config error: [solver] step must be > 0");
    }
  }

  // [sweep]
  for (const auto& t : split_ws_or_comma(ini.require("sweep", "n").text)) {
    cfg.sweep.push_back(static_cast<int>(parse_int(t, "[sweep] n")));
  }
  if (cfg.sweep.empty()) {
    throw ConfigError("config error: [sweep] n must list at least one value");
  }
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    if (cfg.sweep[i] < 1) {
      throw ConfigError("config error: [sweep] n values must be >= 1");
    }
    if (i > 0 && cfg.sweep[i] <= cfg.sweep[i - 1]) {
      throw ConfigError(
          "config error: [sweep] n values must be strictly increasing");
    }
  }
  if (ini.has("sweep", "seeds")) {
    for (const auto& t : split_ws_or_comma(ini.require("sweep", "seeds").text)) {
      cfg.seeds.push_back(parse_u64(t, "[sweep] seeds"));
    }
  }
  if (cfg.seeds.empty()) cfg.seeds.push_back(0);

  // [output]
  cfg.out_dir = ini.get_or("output", "dir", "out");
  const std::string emit = ini.get_or("output", "emit", "csv");
  if (emit == "csv") {
    cfg.emit = EmitKind::csv;
  } else if (emit == "json") {
    cfg.emit = EmitKind::json;
  } else if (emit == "both") {
    cfg.emit = EmitKind::both;
  } else {
    throw ConfigError("config error: [output] emit must be csv | json | both");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config error: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(parse_ini(buffer.str(), path));
}

BuiltProblem build_problem(const ProblemConfig& cfg) {
  Matrix k(cfg.m, cfg.n);
  if (cfg.k_rows) {
    for (std::size_t i = 0; i < cfg.m; ++i) {
      for (std::size_t j = 0; j < cfg.n; ++j) k.at(i, j) = (*cfg.k_rows)[i][j];
    }
  } else {
    RngStream rng(cfg.k_seed, 0);
    for (std::size_t i = 0; i < cfg.m; ++i) {
      for (std::size_t j = 0; j < cfg.n; ++j) k.at(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  if (cfg.k_scale_to) {
    const double spectral = estimate_operator_norm(k, 1e-12);
    if (spectral == 0.0) {
      throw ConfigError("config error: cannot rescale a zero K matrix");
    }
    k.scale(*cfg.k_scale_to / spectral);
  }

  if (cfg.family == ProblemFamily::matrix_game) {
    SaddleBuild build = build_matrix_game(std::move(k));
    if (cfg.k_scale_to) build.spec.lipschitz_m = *cfg.k_scale_to;
    return BuiltProblem{std::move(build.spec), std::move(build.saddle)};
  }

  SaddleBuild build = build_saddle_problem(
      std::move(k), cfg.fx_weights, cfg.fx_targets, cfg.gy_weights,
      cfg.gy_targets, realize_set(cfg.x_set, cfg.n),
      realize_set(cfg.y_set, cfg.m), cfg.prox, cfg.j);
  if (cfg.k_scale_to) build.spec.lipschitz_m = *cfg.k_scale_to;
  return BuiltProblem{std::move(build.spec), std::move(build.saddle)};
}

}  // namespace vislide
