#include "market_eq/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace market_eq {
namespace {

[[noreturn]] void syntax_error(int line, const std::string& message) {
  throw ConfigError({{IssueKind::kSyntax, "", 0, "line " + std::to_string(line) + ": " + message}});
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "user.3" -> 3
std::optional<std::size_t> section_index(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto digits = name.substr(prefix.size());
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return index;
}

void reject_unknown(const Section& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : s.entries)
    if (std::find(allowed.begin(), allowed.end(), kv.key) == allowed.end())
      syntax_error(kv.line, "unknown key '" + kv.key + "' in [" + s.name + "]");
}

const KeyValue* find(const Section& s, std::string_view key) {
  for (const auto& kv : s.entries)
    if (kv.key == key) return &kv;
  return nullptr;
}

const KeyValue& require(const Section& s, std::string_view key) {
  const KeyValue* kv = find(s, key);
  if (kv == nullptr) syntax_error(s.line, "[" + s.name + "] is missing '" + std::string(key) + "'");
  return *kv;
}

// Contiguous indices 0..n-1 from a map keyed by index.
template <typename T>
std::vector<T> dense_from(std::map<std::size_t, std::pair<T, int>>& by_index, const char* what) {
  std::vector<T> out;
  std::size_t expected = 0;
  for (auto& [index, entry] : by_index) {
    if (index != expected)
      syntax_error(entry.second, std::string(what) + " indices must be contiguous from 0; missing " +
                                     std::string(what) + "." + std::to_string(expected));
    out.push_back(std::move(entry.first));
    ++expected;
  }
  return out;
}

}  // namespace

std::vector<Section> parse_sections(std::string_view text) {
  std::vector<Section> sections(1);
  std::set<std::string> seen_sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') syntax_error(line_no, "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) syntax_error(line_no, "empty section name");
      if (!seen_sections.insert(name).second) syntax_error(line_no, "duplicate section [" + name + "]");
      sections.push_back({name, line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) syntax_error(line_no, "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) syntax_error(line_no, "missing key");
    if (value.empty()) syntax_error(line_no, "missing value for '" + key + "'");
    auto& current = sections.back();
    if (find(current, key) != nullptr) syntax_error(line_no, "duplicate key '" + key + "'");
    current.entries.push_back({std::move(key), std::move(value), line_no});
  }
  return sections;
}

double parse_number(const KeyValue& kv) {
  double v = 0.0;
  const char* first = kv.value.data();
  const char* last = first + kv.value.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    syntax_error(kv.line, "'" + kv.key + "' is not a number: " + kv.value);
  return v;
}

std::vector<double> parse_number_list(const KeyValue& kv) {
  std::vector<double> out;
  std::string_view rest = kv.value;
  while (true) {
    const auto comma = rest.find(',');
    KeyValue item{kv.key, std::string(trim(rest.substr(0, comma))), kv.line};
    if (item.value.empty()) syntax_error(kv.line, "empty entry in list '" + kv.key + "'");
    out.push_back(parse_number(item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

MarketConfig parse_config(std::string_view text) {
  const auto sections = parse_sections(text);
  if (!sections.front().entries.empty())
    syntax_error(sections.front().entries.front().line, "key outside of any section");

  MarketConfig cfg;
  double uniform_network = 0.0;
  std::map<std::size_t, std::pair<UserParams, int>> users;
  std::map<std::size_t, std::pair<std::optional<std::vector<double>>, int>> rows;
  std::map<std::size_t, std::pair<VendorParams, int>> vendors;

  for (std::size_t k = 1; k < sections.size(); ++k) {
    const Section& s = sections[k];
    if (s.name == "provider") {
      reject_unknown(s, {"price_min", "price_max"});
      if (const auto* kv = find(s, "price_min")) cfg.price_min = parse_number(*kv);
      if (const auto* kv = find(s, "price_max")) cfg.price_max = parse_number(*kv);
    } else if (s.name == "externalities") {
      reject_unknown(s, {"congestion", "indirect"});
      if (const auto* kv = find(s, "congestion")) cfg.externalities.congestion = parse_number(*kv);
      if (const auto* kv = find(s, "indirect")) cfg.externalities.indirect = parse_number(*kv);
    } else if (s.name == "network") {
      reject_unknown(s, {"uniform"});
      if (const auto* kv = find(s, "uniform")) uniform_network = parse_number(*kv);
    } else if (auto ui = section_index(s.name, "user.")) {
      reject_unknown(s, {"benefit", "saturation", "network"});
      UserParams u{parse_number(require(s, "benefit")), parse_number(require(s, "saturation"))};
      users[*ui] = {u, s.line};
      std::optional<std::vector<double>> row;
      if (const auto* kv = find(s, "network")) row = parse_number_list(*kv);
      rows[*ui] = {std::move(row), s.line};
    } else if (auto vi = section_index(s.name, "vendor.")) {
      reject_unknown(s, {"devices", "cost_per_device", "share", "sensitivity"});
      const KeyValue& devices = require(s, "devices");
      const double count = parse_number(devices);
      if (!(std::abs(count) < 1e9) || count != std::floor(count))
        syntax_error(devices.line, "'devices' must be an integer");
      VendorParams v;
      v.device_count = static_cast<int>(count);
      v.per_device_cost = parse_number(require(s, "cost_per_device"));
      v.share_weight = parse_number(require(s, "share"));
      v.reward_sensitivity = parse_number(require(s, "sensitivity"));
      vendors[*vi] = {v, s.line};
    } else {
      syntax_error(s.line, "unknown section [" + s.name + "]");
    }
  }

  cfg.users = dense_from(users, "user");
  cfg.vendors = dense_from(vendors, "vendor");
  const std::size_t n = cfg.users.size();
  cfg.network = NetworkEffectMatrix(n, uniform_network);
  for (auto& [i, entry] : rows) {
    if (!entry.first) continue;
    const auto& row = *entry.first;
    if (row.size() != n)
      syntax_error(entry.second, "user." + std::to_string(i) + " network row has " +
                                     std::to_string(row.size()) + " entries, expected " +
                                     std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) cfg.network(i, j) = row[j];
  }
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MarketConfig load_config(const std::filesystem::path& path) {
  return validate_config(parse_config(read_text_file(path)));
}

std::string format_config(const MarketConfig& cfg) {
  std::ostringstream out;
  out << "[provider]\nprice_min = " << format_double(cfg.price_min) << "\n";
  if (cfg.price_max) out << "price_max = " << format_double(*cfg.price_max) << "\n";
  out << "\n[externalities]\ncongestion = " << format_double(cfg.externalities.congestion)
      << "\nindirect = " << format_double(cfg.externalities.indirect) << "\n";
  for (std::size_t i = 0; i < cfg.user_count(); ++i) {
    out << "\n[user." << i << "]\nbenefit = " << format_double(cfg.users[i].benefit_slope)
        << "\nsaturation = " << format_double(cfg.users[i].saturation) << "\nnetwork = ";
    for (std::size_t j = 0; j < cfg.network.size(); ++j)
      out << (j ? ", " : "") << format_double(cfg.network(i, j));
    out << "\n";
  }
  for (std::size_t j = 0; j < cfg.vendor_count(); ++j) {
    const auto& v = cfg.vendors[j];
    out << "\n[vendor." << j << "]\ndevices = " << v.device_count
        << "\ncost_per_device = " << format_double(v.per_device_cost)
        << "\nshare = " << format_double(v.share_weight)
        << "\nsensitivity = " << format_double(v.reward_sensitivity) << "\n";
  }
  return out.str();
}

}  // namespace market_eq
