#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "market_eq/experiments.hpp"

namespace market_eq {

// Line chart of the named columns against the swept parameter. NaN points
// are skipped. Throws std::invalid_argument for an empty or unknown column
// list.
std::string render_chart(const SweepResult& result, const std::vector<std::string>& columns);

// render_chart written to `path`; throws IoError when it cannot be written.
void emit_chart(const SweepResult& result, const std::vector<std::string>& columns,
                const std::filesystem::path& path);

}  // namespace market_eq
