#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dirac1d/experiments.hpp"

namespace dirac1d {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(line, "expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> to_list(const std::string& s, std::size_t line) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(line, "expected [ ... ]");
  std::vector<std::string> out;
  const std::string body = trim(s.substr(1, s.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, "empty array element");
    out.push_back(item);
  }
  return out;
}

std::pair<double, double> to_pair(const std::string& s, std::size_t line) {
  const auto items = to_list(s, line);
  if (items.size() != 2) fail(line, "expected a two-element array");
  return {to_double(items[0], line), to_double(items[1], line)};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_name(PacketKind k) {
  switch (k) {
    case PacketKind::gaussian: return "gaussian";
    case PacketKind::compact_bump: return "compact_bump";
    case PacketKind::plane_superposition: return "plane_superposition";
  }
  return "gaussian";
}

PacketKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "gaussian") return PacketKind::gaussian;
  if (s == "compact_bump") return PacketKind::compact_bump;
  if (s == "plane_superposition") return PacketKind::plane_superposition;
  fail(line, "unknown packet kind '" + s + "'");
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

double CheckSpec::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  std::map<std::string, std::map<std::string, double>> check_params;
  bool have_checks = false;
  std::vector<std::string> check_names;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) fail(line_no, "empty key or value");
    if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");
    const std::size_t n = line_no;

    if (key == "grid.z_min") cfg.grid.z_min = to_double(val, n);
    else if (key == "grid.z_max") cfg.grid.z_max = to_double(val, n);
    else if (key == "grid.n_cells") cfg.grid.n_cells = to_uint(val, n);
    else if (key == "packet.kind") cfg.packet.kind = parse_kind(val, n);
    else if (key == "packet.z0") cfg.packet.z0 = to_double(val, n);
    else if (key == "packet.width") cfg.packet.width = to_double(val, n);
    else if (key == "packet.k0") cfg.packet.k0 = to_double(val, n);
    else if (key == "packet.mass") cfg.packet.mass = to_double(val, n);
    else if (key == "packet.k") cfg.packet.k = to_double(val, n);
    else if (key == "packet.p") cfg.packet.p = to_double(val, n);
    else if (key == "packet.support") std::tie(cfg.support_lo, cfg.support_hi) = to_pair(val, n);
    else if (key == "potential.v0") cfg.potential.v0 = to_double(val, n);
    else if (key == "potential.z_on") cfg.potential.z_on = to_double(val, n);
    else if (key == "potential.z_off") cfg.potential.z_off = to_double(val, n);
    else if (key == "potential.smoothing") cfg.potential.smoothing = to_double(val, n);
    else if (key == "perturbation.enabled") {
      if (val != "true" && val != "false") fail(n, "expected true or false");
      cfg.perturbation.enabled = val == "true";
    } else if (key == "perturbation.region") {
      std::tie(cfg.perturbation.z_a, cfg.perturbation.z_b) = to_pair(val, n);
    } else if (key == "perturbation.window") {
      std::tie(cfg.perturbation.t_a, cfg.perturbation.t_b) = to_pair(val, n);
    } else if (key == "perturbation.dv") {
      cfg.perturbation.dv = to_double(val, n);
    } else if (key == "scheme.splitting") {
      if (val == "strang") cfg.splitting = Splitting::strang;
      else if (val == "lie") cfg.splitting = Splitting::lie;
      else fail(n, "splitting must be strang or lie");
    } else if (key == "run.n_steps") cfg.n_steps = to_uint(val, n);
    else if (key == "run.stride") cfg.stride = to_uint(val, n);
    else if (key == "dumont.reference_arrival_time") cfg.reference_arrival_time = to_double(val, n);
    else if (key == "dumont.arrival_threshold_fraction") cfg.arrival_threshold_fraction = to_double(val, n);
    else if (key == "output.dir") cfg.out_dir = val;
    else if (key == "output.csv_z_stride") cfg.csv_z_stride = to_uint(val, n);
    else if (key == "seed") cfg.seed = to_uint(val, n);
    else if (key == "characteristics.samples") cfg.determinant_samples = to_uint(val, n);
    else if (key == "checks") {
      have_checks = true;
      check_names = to_list(val, n);
      std::set<std::string> uniq;
      for (const auto& c : check_names) {
        if (!valid_name(c)) fail(n, "bad check name '" + c + "'");
        if (!uniq.insert(c).second) fail(n, "check '" + c + "' listed twice");
      }
    } else if (key.rfind("check.", 0) == 0) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos || dot + 1 >= key.size()) {
        fail(n, "expected check.<name>.<param>");
      }
      check_params[key.substr(6, dot - 6)][key.substr(dot + 1)] = to_double(val, n);
    } else {
      fail(n, "unknown key '" + key + "'");
    }
  }
  if (have_checks) {
    for (const auto& name : check_names) {
      CheckSpec c{name, {}};
      if (auto it = check_params.find(name); it != check_params.end()) {
        c.params = std::move(it->second);
        check_params.erase(it);
      }
      cfg.checks.push_back(std::move(c));
    }
  }
  if (!check_params.empty()) {
    throw std::invalid_argument("config: parameters given for unlisted check '" +
                                check_params.begin()->first + "'");
  }
  if (cfg.stride == 0) throw std::invalid_argument("config: run.stride must be >= 1");
  if (cfg.csv_z_stride == 0) throw std::invalid_argument("config: output.csv_z_stride must be >= 1");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# dirac1d experiment\n";
  os << "grid.z_min = " << fmt(cfg.grid.z_min) << '\n';
  os << "grid.z_max = " << fmt(cfg.grid.z_max) << '\n';
  os << "grid.n_cells = " << cfg.grid.n_cells << '\n';
  os << "packet.kind = " << kind_name(cfg.packet.kind) << '\n';
  os << "packet.z0 = " << fmt(cfg.packet.z0) << '\n';
  os << "packet.width = " << fmt(cfg.packet.width) << '\n';
  os << "packet.k0 = " << fmt(cfg.packet.k0) << '\n';
  os << "packet.mass = " << fmt(cfg.packet.mass) << '\n';
  os << "packet.k = " << fmt(cfg.packet.k) << '\n';
  os << "packet.p = " << fmt(cfg.packet.p) << '\n';
  os << "packet.support = [" << fmt(cfg.support_lo) << ", " << fmt(cfg.support_hi) << "]\n";
  os << "potential.v0 = " << fmt(cfg.potential.v0) << '\n';
  os << "potential.z_on = " << fmt(cfg.potential.z_on) << '\n';
  os << "potential.z_off = " << fmt(cfg.potential.z_off) << '\n';
  os << "potential.smoothing = " << fmt(cfg.potential.smoothing) << '\n';
  os << "perturbation.enabled = " << (cfg.perturbation.enabled ? "true" : "false") << '\n';
  os << "perturbation.region = [" << fmt(cfg.perturbation.z_a) << ", "
     << fmt(cfg.perturbation.z_b) << "]\n";
  os << "perturbation.window = [" << fmt(cfg.perturbation.t_a) << ", "
     << fmt(cfg.perturbation.t_b) << "]\n";
  os << "perturbation.dv = " << fmt(cfg.perturbation.dv) << '\n';
  os << "scheme.splitting = " << (cfg.splitting == Splitting::strang ? "strang" : "lie") << '\n';
  os << "run.n_steps = " << cfg.n_steps << '\n';
  os << "run.stride = " << cfg.stride << '\n';
  os << "dumont.reference_arrival_time = " << fmt(cfg.reference_arrival_time) << '\n';
  os << "dumont.arrival_threshold_fraction = " << fmt(cfg.arrival_threshold_fraction) << '\n';
  os << "output.dir = " << cfg.out_dir << '\n';
  os << "output.csv_z_stride = " << cfg.csv_z_stride << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "characteristics.samples = " << cfg.determinant_samples << '\n';
  os << "checks = [";
  for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
    os << (i ? ", " : "") << cfg.checks[i].name;
  }
  os << "]\n";
  for (const auto& c : cfg.checks) {
    for (const auto& [k, v] : c.params) os << "check." << c.name << '.' << k << " = " << fmt(v) << '\n';
  }
  return os.str();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dirac1d
