#include "tofrec/config.hpp"

#include "tofrec/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace tofrec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_num(const std::string& text, const std::string& path, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(path + ": malformed number '" + text + "' at line " +
                     std::to_string(line));
  return v;
}

int parse_int(const std::string& text, const std::string& path, int line) {
  const double v = parse_num(text, path, line);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError(path + ": expected an integer, got '" + text + "' at line " +
                     std::to_string(line));
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text, const std::string& path, int line) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError(path + ": expected true/false, got '" + text + "' at line " +
                   std::to_string(line));
}

}  // namespace

void RunConfig::require_keys(const std::set<std::string>& keys) const {
  for (const auto& key : keys) {
    if (key == "q_true") {  // satisfied by either q_true or q_true_file
      if (!has_q_true)
        throw std::invalid_argument("missing required key q_true (or q_true_file)");
      continue;
    }
    if (provided.find(key) == provided.end())
      throw std::invalid_argument("missing required key " + key);
  }
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[' && stripped.back() == ']') continue;  // section sugar
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ": missing '=' at line " + std::to_string(lineno));
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ParseError(path + ": empty key at line " + std::to_string(lineno));
    if (cfg.provided.count(key))
      throw std::invalid_argument("duplicate key " + key + " (line " +
                                  std::to_string(lineno) + ")");
    cfg.provided.insert(key);

    if (key == "rho") cfg.rho = parse_num(value, path, lineno);
    else if (key == "c") cfg.c = parse_num(value, path, lineno);
    else if (key == "k") cfg.k = parse_num(value, path, lineno);
    else if (key == "a") cfg.a = parse_num(value, path, lineno);
    else if (key == "b") cfg.b = parse_num(value, path, lineno);
    else if (key == "tau") cfg.tau = parse_num(value, path, lineno);
    else if (key == "M") cfg.M = parse_int(value, path, lineno);
    else if (key == "N") cfg.N = parse_int(value, path, lineno);
    else if (key == "T0") cfg.T0 = parse_num(value, path, lineno);
    else if (key == "L_true_mm") cfg.L_true = parse_num(value, path, lineno) * 1e-3;
    else if (key == "q_true") {
      cfg.q_true = FluxSpec::constant(parse_num(value, path, lineno));
      cfg.has_q_true = true;
    } else if (key == "q_true_file") {
      cfg.q_true = load_flux_table(value);
      cfg.has_q_true = true;
    } else if (key == "accuracy") cfg.accuracy = parse_num(value, path, lineno);
    else if (key == "temp_noise") cfg.temp_noise = parse_num(value, path, lineno);
    else if (key == "dither") cfg.dither = parse_bool(value, path, lineno);
    else if (key == "synth_refine") cfg.synth_refine = parse_int(value, path, lineno);
    else if (key == "q0") cfg.q0 = FluxSpec::constant(parse_num(value, path, lineno));
    else if (key == "q0_file") cfg.q0 = load_flux_table(value);
    else if (key == "L0_mm") {
      cfg.L0 = parse_num(value, path, lineno) * 1e-3;
      cfg.has_L0 = true;
    } else if (key == "L_min_mm") cfg.L_min = parse_num(value, path, lineno) * 1e-3;
    else if (key == "L_max_mm") cfg.L_max = parse_num(value, path, lineno) * 1e-3;
    else if (key == "alpha0") cfg.obj.alpha = parse_num(value, path, lineno);
    else if (key == "crl") cfg.obj.crl = parse_num(value, path, lineno);
    else if (key == "n_max") cfg.obj.n_max = parse_int(value, path, lineno);
    else if (key == "eps_stagnate_mm")
      cfg.obj.eps_stagnate = parse_num(value, path, lineno) * 1e-3;
    else if (key == "alpha_decay") cfg.obj.alpha_decay = parse_num(value, path, lineno);
    else if (key == "wolfe_rho") cfg.wolfe.rho = parse_num(value, path, lineno);
    else if (key == "wolfe_sigma") cfg.wolfe.sigma = parse_num(value, path, lineno);
    else if (key == "lambda_max") cfg.wolfe.lambda_max = parse_num(value, path, lineno);
    else if (key == "max_bisections")
      cfg.wolfe.max_bisections = parse_int(value, path, lineno);
    else if (key == "seed") {
      errno = 0;
      char* end = nullptr;
      cfg.seed = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(path + ": malformed seed at line " + std::to_string(lineno));
    } else {
      throw std::invalid_argument("unknown key " + key + " (line " +
                                  std::to_string(lineno) + ")");
    }
  }
  return cfg;
}

FluxSpec load_flux_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,q_W_per_m2")
    throw ParseError(path + ": unexpected header at line 1");
  std::vector<double> samples;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + ": expected 2 fields at line " + std::to_string(lineno));
    parse_num(line.substr(0, comma), path, lineno);  // the instant, shape-checked later
    samples.push_back(parse_num(line.substr(comma + 1), path, lineno));
  }
  if (samples.size() < 2)
    throw ParseError(path + ": flux table needs at least two rows");
  return FluxSpec::tabulated(std::move(samples));
}

}  // namespace tofrec
