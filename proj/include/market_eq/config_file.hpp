#pragma once

// Sectioned key=value market description.
//
//   # comment (also ';')
//   [provider]        price_min, price_max            (both optional)
//   [externalities]   congestion, indirect            (default 0)
//   [network]         uniform                         (off-diagonal g, default 0)
//   [user.<k>]        benefit, saturation, network    (network: optional row of N values)
//   [vendor.<k>]      devices, cost_per_device, share, sensitivity
//
// User and vendor indices must be 0..N-1 and 0..M-1. Unknown sections or
// keys, duplicates and malformed numbers are rejected with their line number.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "market_eq/model.hpp"

namespace market_eq {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;  // empty for entries before the first header
  int line = 0;
  std::vector<KeyValue> entries;
};

// Splits text into sections; throws ConfigError(kSyntax) on malformed lines
// or duplicate section names/keys.
std::vector<Section> parse_sections(std::string_view text);

double parse_number(const KeyValue& kv);
std::vector<double> parse_number_list(const KeyValue& kv);

// Syntax only; invariants are checked by validate_config.
MarketConfig parse_config(std::string_view text);

// Reads, parses and validates. Throws IoError or ConfigError.
MarketConfig load_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

// Writes a config that parse_config reads back exactly.
std::string format_config(const MarketConfig& cfg);

}  // namespace market_eq
