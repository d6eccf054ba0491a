#include "latqmc/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace latqmc::config {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

KeyValue KeyValue::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

KeyValue KeyValue::parse_string(const std::string& text) {
  KeyValue kv;
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
      throw std::runtime_error("config: missing '=' on line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    kv.entries_[key] = value;
  }
  return kv;
}

bool KeyValue::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValue::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

std::string KeyValue::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValue::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::runtime_error("config: bad number for '" + key + "'");
  return x;
}

double KeyValue::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValue::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  std::size_t pos = 0;
  const long long x = std::stoll(v, &pos);
  if (pos != v.size()) throw std::runtime_error("config: bad integer for '" + key + "'");
  return x;
}

std::int64_t KeyValue::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValue::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::int64_t v = get_int(key);
  if (v < 0) throw std::runtime_error("config: negative value for '" + key + "'");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint32_t> KeyValue::get_uint_list(const std::string& key) const {
  std::vector<std::uint32_t> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  if (out.empty()) throw std::runtime_error("config: empty list for '" + key + "'");
  return out;
}

std::vector<int> KeyValue::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::runtime_error("config: empty list for '" + key + "'");
  return out;
}

std::string KeyValue::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

wavelet::WaveletModel model_from_config(const KeyValue& kv) {
  wavelet::WaveletModel m;
  m.d = static_cast<int>(kv.get_int("d", 1));
  m.beta0 = kv.get_double("beta0", 1.0);
  m.beta1 = kv.get_double("beta1");
  m.theta = kv.get_double("theta");
  m.ell0 = static_cast<int>(kv.get_int("ell0", 0));
  m.L = static_cast<int>(kv.get_int("L"));
  m.basis = wavelet::basis_from_string(kv.get_string("basis", "haar"));
  m.sigma_scale = kv.get_double("sigma_scale", 1.0);
  m.t_star = kv.get_double("t_star", 0.0);
  const std::string c = kv.get_string("c_rho", "auto");
  if (c == "auto") {
    m.c_rho = 0.5 * wavelet::c_rho_upper_bound(m);
  } else {
    m.c_rho = kv.get_double("c_rho");
  }
  m.validate();
  return m;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace latqmc::config
