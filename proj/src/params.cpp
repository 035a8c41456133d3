#include "nucmem/params.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nucmem/errors.hpp"

namespace nucmem {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidParameter(message);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void validate(const PhysicalParams& p) {
  const double fields[] = {p.gamma,       p.kappa,        p.gamma_m,          p.gamma_f,
                           p.gamma_0,     p.omega_rabi,   p.delta_one_photon, p.delta_meta,
                           p.delta_ground, p.delta_cavity, p.g_coupling,      p.n_meta,
                           p.n_ground,    p.r_squeeze};
  for (double v : fields) require(std::isfinite(v), "non-finite parameter");
  require(p.gamma > 0.0, "gamma must be positive");
  require(p.kappa > 0.0, "kappa must be positive");
  require(p.gamma_m > 0.0, "gamma_m must be positive");
  require(p.gamma_f > 0.0, "gamma_f must be positive");
  require(p.gamma_0 >= 0.0, "gamma_0 must be non-negative");
  require(p.n_meta > 0.0, "n_meta must be positive");
  require(p.n_ground > 0.0, "n_ground must be positive");

  // gamma_f * N = gamma_m * n
  const double lhs = p.gamma_f * p.n_ground;
  const double rhs = p.gamma_m * p.n_meta;
  require(std::abs(lhs - rhs) <= kExchangeBalanceTolerance * std::abs(rhs),
          "gamma_f inconsistent with exchange balance gamma_m / gamma_f = N / n");
}

PhysicalParams with_balanced_exchange(PhysicalParams params) {
  require(params.n_ground > 0.0, "n_ground must be positive");
  params.gamma_f = params.gamma_m * params.n_meta / params.n_ground;
  return params;
}

InputFieldStats InputFieldStats::squeezed_vacuum(double r) {
  require(std::isfinite(r), "non-finite squeezing parameter");
  const double s = std::sinh(r);
  return {s * s, -s * std::cosh(r)};
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    config.values_[key] = value;
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  return parse(in);
}

std::optional<double> KeyValueConfig::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const char* begin = it->second.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
  }
  return v;
}

std::optional<std::string> KeyValueConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

PhysicalParams params_from_config(const KeyValueConfig& c, const PhysicalParams& defaults) {
  PhysicalParams p = defaults;
  p.gamma = c.number_or("gamma", p.gamma);
  p.kappa = c.number_or("kappa", p.kappa);
  p.gamma_m = c.number_or("gamma_m", p.gamma_m);
  p.gamma_0 = c.number_or("gamma_0", p.gamma_0);
  p.omega_rabi = c.number_or("omega_rabi", p.omega_rabi);
  p.delta_one_photon = c.number_or("delta_one_photon", p.delta_one_photon);
  p.delta_meta = c.number_or("delta_meta", p.delta_meta);
  p.delta_ground = c.number_or("delta_ground", p.delta_ground);
  p.delta_cavity = c.number_or("delta_cavity", p.delta_cavity);
  p.g_coupling = c.number_or("g_coupling", p.g_coupling);
  p.n_meta = c.number_or("n_meta", p.n_meta);
  p.n_ground = c.number_or("n_ground", p.n_ground);
  p.r_squeeze = c.number_or("r_squeeze", p.r_squeeze);
  if (const auto gf = c.number("gamma_f")) {
    p.gamma_f = *gf;
  } else if (p.n_ground > 0.0) {
    p = with_balanced_exchange(p);
  }
  try {
    validate(p);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("invalid physical parameters: ") + e.what());
  }
  return p;
}

}  // namespace nucmem
