#include "rtswe/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rtswe/rom.hpp"

namespace rtswe {

namespace {

constexpr double kSigmaFraction = 3.0 / 40.0;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError("invalid number for " + key + ": '" + value + "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || x < -2147483647L || x > 2147483647L) {
    throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  }
  return static_cast<int>(x);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void validate_newton(const NewtonConfig& c, const char* which) {
  if (!(c.tol > 0.0) || !std::isfinite(c.tol)) {
    throw ConfigError(std::string(which) + " tolerance must be positive");
  }
  if (c.max_iter < 1) throw ConfigError(std::string(which) + " max_iter must be at least 1");
}

}  // namespace

RunSettings::RunSettings() : rom_newton(rom_newton_defaults()) {}

void RunSettings::validate() const {
  bench.validate();
  validate_newton(fom_newton, "newton");
  validate_newton(rom_newton, "rom_newton");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

void apply_setting(RunSettings& s, const std::string& key, const std::string& value) {
  DoubleVortexConfig& b = s.bench;
  if (key == "L") {
    b.L = to_double(key, value);
    if (!s.sigma_x_explicit) b.sigma_x = kSigmaFraction * b.L;
    if (!s.sigma_y_explicit) b.sigma_y = kSigmaFraction * b.L;
  } else if (key == "f") {
    b.f = to_double(key, value);
  } else if (key == "g") {
    b.g = to_double(key, value);
  } else if (key == "H0") {
    b.H0 = to_double(key, value);
  } else if (key == "dh") {
    b.dh = to_double(key, value);
  } else if (key == "sigma_x") {
    b.sigma_x = to_double(key, value);
    s.sigma_x_explicit = true;
  } else if (key == "sigma_y") {
    b.sigma_y = to_double(key, value);
    s.sigma_y_explicit = true;
  } else if (key == "ox") {
    b.ox = to_double(key, value);
  } else if (key == "oy") {
    b.oy = to_double(key, value);
  } else if (key == "n") {
    b.n = to_int(key, value);
  } else if (key == "K") {
    b.K = to_int(key, value);
  } else if (key == "dt") {
    b.dt = to_double(key, value);
  } else if (key == "kappa_pod") {
    b.kappa_pod = to_double(key, value);
  } else if (key == "kappa_deim") {
    b.kappa_deim = to_double(key, value);
  } else if (key == "r" || key == "r_override") {
    b.r_override = to_int(key, value);
  } else if (key == "p" || key == "p_override") {
    b.p_override = to_int(key, value);
  } else if (key == "newton_tol") {
    s.fom_newton.tol = to_double(key, value);
  } else if (key == "newton_max_iter") {
    s.fom_newton.max_iter = to_int(key, value);
  } else if (key == "rom_newton_tol") {
    s.rom_newton.tol = to_double(key, value);
  } else if (key == "rom_newton_max_iter") {
    s.rom_newton.max_iter = to_int(key, value);
  } else if (key == "threads") {
    s.threads = to_int(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

RunSettings parse_settings(const std::string& text, RunSettings base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    }
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunSettings load_settings(const std::filesystem::path& path, RunSettings base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), std::move(base));
}

std::string format_settings(const RunSettings& s) {
  const DoubleVortexConfig& b = s.bench;
  std::ostringstream out;
  out << "L = " << fmt(b.L) << '\n'
      << "f = " << fmt(b.f) << '\n'
      << "g = " << fmt(b.g) << '\n'
      << "H0 = " << fmt(b.H0) << '\n'
      << "dh = " << fmt(b.dh) << '\n'
      << "sigma_x = " << fmt(b.sigma_x) << '\n'
      << "sigma_y = " << fmt(b.sigma_y) << '\n'
      << "ox = " << fmt(b.ox) << '\n'
      << "oy = " << fmt(b.oy) << '\n'
      << "n = " << b.n << '\n'
      << "K = " << b.K << '\n'
      << "dt = " << fmt(b.dt) << '\n'
      << "kappa_pod = " << fmt(b.kappa_pod) << '\n'
      << "kappa_deim = " << fmt(b.kappa_deim) << '\n';
  if (b.r_override) out << "r = " << *b.r_override << '\n';
  if (b.p_override) out << "p = " << *b.p_override << '\n';
  out << "newton_tol = " << fmt(s.fom_newton.tol) << '\n'
      << "newton_max_iter = " << s.fom_newton.max_iter << '\n'
      << "rom_newton_tol = " << fmt(s.rom_newton.tol) << '\n'
      << "rom_newton_max_iter = " << s.rom_newton.max_iter << '\n'
      << "threads = " << s.threads << '\n';
  return out.str();
}

}  // namespace rtswe
