#include "tofrec/measurement.hpp"

#include "tofrec/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "tofrec/forward.hpp"

namespace tofrec {

namespace {

// Deterministic uniform in [0, 1), identical across standard libraries
// (std::uniform_real_distribution is not pinned by the standard).
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One Box-Muller draw; the sine partner is discarded for determinism that
// does not depend on call pairing.
double normal01(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double round_half_even(double x) {
  const double fl = std::floor(x);
  const double fr = x - fl;
  if (fr > 0.5) return fl + 1.0;
  if (fr < 0.5) return fl;
  return (std::fmod(fl, 2.0) == 0.0) ? fl : fl + 1.0;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

FluxSpec FluxSpec::tabulated(std::vector<double> samples) {
  detail::require(samples.size() >= 2, "flux table needs at least two samples");
  return FluxSpec{Kind::Table, 0.0, std::move(samples)};
}

double FluxSpec::at(double t, double tau) const {
  if (kind == Kind::Constant) return value;
  const int segs = static_cast<int>(table.size()) - 1;
  const double pos = t / (tau / segs);
  if (pos <= 0.0) return table.front();
  if (pos >= segs) return table.back();
  const int i = static_cast<int>(pos);
  const double f = pos - i;
  return table[i] * (1.0 - f) + table[i + 1] * f;
}

FluxProfile FluxSpec::sample(double tau, int steps) const {
  detail::require(steps >= 1, "sample needs at least one interval");
  FluxProfile q;
  q.values.resize(static_cast<std::size_t>(steps) + 1);
  const double dt = tau / steps;
  for (int i = 0; i <= steps; ++i) q.values[i] = at(i * dt, tau);
  return q;
}

void SynthesisSpec::validate() const {
  detail::require(std::isfinite(true_L) && true_L > 0.0, "true_L must be positive");
  detail::require(std::isfinite(T0), "T0 must be finite");
  detail::require(std::isfinite(accuracy) && accuracy >= 0.0,
                  "accuracy must be non-negative");
  detail::require(std::isfinite(temp_noise) && temp_noise >= 0.0,
                  "temp_noise must be non-negative");
  detail::require(refine >= 1, "refine must be at least 1");
}

MeasurementSet synthesize(const SynthesisSpec& spec, const MaterialProps& props,
                          double tau, int M, int N) {
  spec.validate();
  props.validate();

  const SimGrid fine = make_grid(spec.true_L, tau, M * spec.refine, N * spec.refine);
  const FluxProfile q_fine = spec.true_q.sample(tau, fine.N);
  const TemperatureField field = solve_heat(props, fine, q_fine, spec.T0);
  const TimeSeries lam_fine = time_of_flight(field, props);
  const TimeSeries trace_fine = boundary_trace(field);

  MeasurementSet set;
  set.t.unit = SeriesUnit::Seconds;
  set.lambda_m.unit = SeriesUnit::Seconds;
  set.t_m.unit = SeriesUnit::Celsius;
  set.t.values.resize(static_cast<std::size_t>(N) + 1);
  set.lambda_m.values.resize(set.t.values.size());
  set.t_m.values.resize(set.t.values.size());

  std::mt19937_64 rng(spec.seed);
  const double dt = tau / N;
  for (int i = 0; i <= N; ++i) {
    set.t.values[i] = i * dt;
    set.lambda_m.values[i] = lam_fine.values[static_cast<std::size_t>(i) * spec.refine];
    set.t_m.values[i] = trace_fine.values[static_cast<std::size_t>(i) * spec.refine];
    if (spec.temp_noise > 0.0) set.t_m.values[i] += spec.temp_noise * normal01(rng);
  }
  if (spec.dither && spec.accuracy > 0.0) {
    for (double& v : set.lambda_m.values)
      v += spec.accuracy * (uniform01(rng) - 0.5);
  }
  set.lambda_m = quantize(set.lambda_m, spec.accuracy);
  set.accuracy = spec.accuracy;

  // Mean wall temperature at the final instant, a cheap energy cross-check.
  double mean_T = 0.0;
  {
    std::vector<double> last(field.slice(fine.N), field.slice(fine.N) + fine.nodes());
    mean_T = trapz(last, fine.h()) / fine.L;
  }

  set.meta["accuracy"] = fmt("%.17g", spec.accuracy);
  set.meta["seed"] = std::to_string(spec.seed);
  set.meta["refine"] = std::to_string(spec.refine);
  set.meta["tau"] = fmt("%.17g", tau);
  set.meta["M"] = std::to_string(M);
  set.meta["N"] = std::to_string(N);
  set.meta["T0"] = fmt("%.17g", spec.T0);
  set.meta["L_true_mm"] = fmt("%.17g", spec.true_L * 1e3);
  set.meta["temp_noise"] = fmt("%.17g", spec.temp_noise);
  set.meta["dither"] = spec.dither ? "true" : "false";
  set.meta["rho"] = fmt("%.17g", props.rho);
  set.meta["c"] = fmt("%.17g", props.c);
  set.meta["k"] = fmt("%.17g", props.k);
  set.meta["a"] = fmt("%.17g", props.a);
  set.meta["b"] = fmt("%.17g", props.b);
  set.meta["final_mean_T_C"] = fmt("%.17g", mean_T);
  if (spec.true_q.kind == FluxSpec::Kind::Constant)
    set.meta["q_true"] = fmt("%.17g", spec.true_q.value);
  else
    set.meta["q_true"] = "tabulated";
  return set;
}

TimeSeries quantize(const TimeSeries& series, double quantum) {
  detail::require(std::isfinite(quantum) && quantum >= 0.0,
                  "quantum must be non-negative");
  TimeSeries out = series;
  if (quantum == 0.0) return out;
  for (double& v : out.values) v = quantum * round_half_even(v / quantum);
  return out;
}

void save_measurements(const std::string& path, const MeasurementSet& set) {
  set.validate();
  std::ofstream csv(path);
  if (!csv) throw IoError("cannot open " + path + " for writing");
  csv << "t_s,lambda_s,T_L_C\n";
  char buf[192];
  for (std::size_t i = 0; i < set.t.values.size(); ++i) {
    // 24 decimals keep every bit of a time-of-flight down to ~1e-7 s.
    std::snprintf(buf, sizeof buf, "%.17g,%.24f,%.17g\n", set.t.values[i],
                  set.lambda_m.values[i], set.t_m.values[i]);
    csv << buf;
  }
  if (!csv.good()) throw IoError("write failed for " + path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw IoError("cannot open " + path + ".meta for writing");
  for (const auto& [key, value] : set.meta) meta << key << " = " << value << "\n";
  if (set.meta.find("accuracy") == set.meta.end())
    meta << "accuracy = " << set.accuracy << "\n";
  if (!meta.good()) throw IoError("write failed for " + path + ".meta");
}

namespace {

double parse_double_field(const std::string& text, const std::string& path, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(path + ": malformed numeric field '" + text + "' at line " +
                     std::to_string(line));
  return v;
}

}  // namespace

MeasurementSet load_measurements(const std::string& path) {
  std::ifstream csv(path);
  if (!csv) throw IoError("cannot open " + path);

  MeasurementSet set;
  set.t.unit = SeriesUnit::Seconds;
  set.lambda_m.unit = SeriesUnit::Seconds;
  set.t_m.unit = SeriesUnit::Celsius;

  std::string line;
  int lineno = 0;
  if (!std::getline(csv, line)) throw ParseError(path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,lambda_s,T_L_C")
    throw ParseError(path + ": unexpected header at line 1");

  while (std::getline(csv, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string fields[3];
    int nfield = 0;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        if (nfield >= 3)
          throw ParseError(path + ": expected 3 fields at line " + std::to_string(lineno));
        fields[nfield++] = line.substr(start, pos - start);
        start = pos + 1;
      }
    }
    if (nfield != 3)
      throw ParseError(path + ": expected 3 fields at line " + std::to_string(lineno));
    set.t.values.push_back(parse_double_field(fields[0], path, lineno));
    set.lambda_m.values.push_back(parse_double_field(fields[1], path, lineno));
    set.t_m.values.push_back(parse_double_field(fields[2], path, lineno));
  }

  std::ifstream meta(path + ".meta");
  if (meta) {
    int mline = 0;
    while (std::getline(meta, line)) {
      ++mline;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError(path + ".meta: missing '=' at line " + std::to_string(mline));
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      set.meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto it = set.meta.find("accuracy");
    if (it != set.meta.end())
      set.accuracy = parse_double_field(it->second, path + ".meta", 0);
  }

  set.validate();
  return set;
}

}  // namespace tofrec
