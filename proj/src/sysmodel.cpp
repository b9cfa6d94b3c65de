#include "twr/sysmodel.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twr/rng.hpp"

namespace twr {

void SystemConfig::validate() const {
  if (M < 1 || R < 1 || d < 1 || K < 1)
    throw ConfigError("config: M, R, d, K must be positive");
  if (M < 2 * d) throw ConfigError("config: M >= 2d required");
  if (M < K * d) throw ConfigError("config: M >= Kd required");
  if (K * d > R) throw ConfigError("config: Kd <= R required");
  if (rho < 0.0 || rho > 1.0) throw ConfigError("config: rho must be in [0,1]");
  if (zeta < 0.0 || zeta > 1.0)
    throw ConfigError("config: zeta must be in [0,1]");
  if (P_r < 0.0 || sigma2 < 0.0 || sigmaR2 < 0.0 || delta2 < 0.0)
    throw ConfigError("config: powers and variances must be >= 0");
  const std::size_t n = static_cast<std::size_t>(users());
  if (P.size() != n) throw ConfigError("config: P must have 2K entries");
  if (beta_up.size() != n)
    throw ConfigError("config: beta_up must have 2K entries");
  if (beta_down.size() != n)
    throw ConfigError("config: beta_down must have 2K entries");
  for (double p : P)
    if (p < 0.0) throw ConfigError("config: P entries must be >= 0");
  for (double b : beta_up)
    if (b < 0.0) throw ConfigError("config: beta_up entries must be >= 0");
  for (double b : beta_down)
    if (b < 0.0) throw ConfigError("config: beta_down entries must be >= 0");
}

void SystemConfig::set_uniform_power(double p) {
  P.assign(static_cast<std::size_t>(users()), p);
  P_r = p;
}

SystemConfig default_config() {
  SystemConfig cfg;
  cfg.P.assign(static_cast<std::size_t>(cfg.users()), 1.0);
  cfg.beta_up.assign(static_cast<std::size_t>(cfg.users()), 1.0);
  cfg.beta_down.assign(static_cast<std::size_t>(cfg.users()), 1.0);
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<double> parse_list(const std::string& value,
                               const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config: empty entry in list for key '" + key + "'");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config: bad numeric value '" + item + "' for key '" +
                        key + "'");
    }
  }
  if (out.empty())
    throw ConfigError("config: no values given for key '" + key + "'");
  return out;
}

double parse_scalar(const std::string& value, const std::string& key) {
  const std::vector<double> v = parse_list(value, key);
  if (v.size() != 1)
    throw ConfigError("config: key '" + key + "' expects a single value");
  return v.front();
}

std::vector<double> broadcast(std::vector<double> v, std::size_t n,
                              const std::string& key) {
  if (v.size() == 1) v.assign(n, v.front());
  if (v.size() != n)
    throw ConfigError("config: key '" + key + "' expects 1 or 2K values");
  return v;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig cfg = default_config();
  std::vector<double> p_raw, bu_raw, bd_raw;
  bool has_p = false, has_bu = false, has_bd = false;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not of the form key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "M") {
      cfg.M = static_cast<int>(parse_scalar(value, key));
    } else if (key == "R") {
      cfg.R = static_cast<int>(parse_scalar(value, key));
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_scalar(value, key));
    } else if (key == "K") {
      cfg.K = static_cast<int>(parse_scalar(value, key));
    } else if (key == "P") {
      p_raw = parse_list(value, key);
      has_p = true;
    } else if (key == "P_r") {
      cfg.P_r = parse_scalar(value, key);
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_scalar(value, key);
    } else if (key == "sigmaR2") {
      cfg.sigmaR2 = parse_scalar(value, key);
    } else if (key == "delta2") {
      cfg.delta2 = parse_scalar(value, key);
    } else if (key == "rho") {
      cfg.rho = parse_scalar(value, key);
    } else if (key == "zeta") {
      cfg.zeta = parse_scalar(value, key);
    } else if (key == "beta_up") {
      bu_raw = parse_list(value, key);
      has_bu = true;
    } else if (key == "beta_down") {
      bd_raw = parse_list(value, key);
      has_bd = true;
    } else {
      throw ConfigError("config: unknown key '" + key + "' on line " +
                        std::to_string(lineno));
    }
  }

  const std::size_t n = static_cast<std::size_t>(cfg.users());
  cfg.P = has_p ? broadcast(p_raw, n, "P") : std::vector<double>(n, 1.0);
  cfg.beta_up =
      has_bu ? broadcast(bu_raw, n, "beta_up") : std::vector<double>(n, 1.0);
  cfg.beta_down =
      has_bd ? broadcast(bd_raw, n, "beta_down") : std::vector<double>(n, 1.0);
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

int pair_index(int k, int K) {
  if (k < 1 || k > 2 * K)
    throw OutOfRange("pair_index: user index out of range");
  return (k + K - 1) % (2 * K) + 1;
}

ChannelSet draw_channels(const SystemConfig& cfg, std::uint64_t seed) {
  const int n = cfg.users();
  ChannelSet ch;
  ch.H_up.reserve(n);
  ch.H_down.reserve(n);
  for (int j = 0; j < n; ++j) {
    Rng rng(seed, Stream::ChannelUp, static_cast<std::uint64_t>(j));
    CMatrix h(cfg.R, cfg.M);
    for (Eigen::Index r = 0; r < h.rows(); ++r)
      for (Eigen::Index c = 0; c < h.cols(); ++c)
        h(r, c) = rng.cgauss(cfg.beta_up[static_cast<std::size_t>(j)]);
    ch.H_up.push_back(std::move(h));
  }
  for (int k = 0; k < n; ++k) {
    Rng rng(seed, Stream::ChannelDown, static_cast<std::uint64_t>(k));
    CMatrix h(cfg.M, cfg.R);
    for (Eigen::Index r = 0; r < h.rows(); ++r)
      for (Eigen::Index c = 0; c < h.cols(); ++c)
        h(r, c) = rng.cgauss(cfg.beta_down[static_cast<std::size_t>(k)]);
    ch.H_down.push_back(std::move(h));
  }
  return ch;
}

CMatrix effective_channel(const ChannelSet& ch, double alpha, int k, int j) {
  return alpha * (ch.H_down[static_cast<std::size_t>(k)] *
                  ch.H_up[static_cast<std::size_t>(j)]);
}

double id_noise_variance(const SystemConfig& cfg) {
  if (cfg.rho >= 1.0)
    throw FullSplit("id_noise_variance: rho = 1 disables the ID branch");
  return cfg.sigmaR2 + cfg.delta2 / (1.0 - cfg.rho);
}

}  // namespace twr
