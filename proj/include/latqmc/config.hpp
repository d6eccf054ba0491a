#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latqmc/wavelet.hpp"

namespace latqmc::config {

// Plain `key = value` text, one pair per line, '#' starts a comment.
class KeyValue {
 public:
  static KeyValue parse_file(const std::string& path);
  static KeyValue parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::vector<std::uint32_t> get_uint_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  // sorted `key = value` lines; the hashing input for reproducibility stamps
  std::string canonical() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Model keys: d, beta0, beta1, theta, c_rho (number or "auto" = half the
// admissible bound), ell0, L, basis (haar|hat), sigma_scale, t_star.
wavelet::WaveletModel model_from_config(const KeyValue& kv);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace latqmc::config
