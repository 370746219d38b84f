#pragma once

#include <filesystem>

#include "proxybench/series.hpp"

namespace proxybench {

// Target CSV: header "year,value", one row per year, UTF-8, '.' decimal
// separator. Rows may appear in any order; the loaded series is sorted.
TargetSeries load_target(const std::filesystem::path& path);
void write_target(const std::filesystem::path& path, const TargetSeries& series);

// Network CSV: header "year,<id1>,<id2>,...". An empty cell marks a missing
// observation. Column order is preserved from the file.
ProxyNetwork load_network(const std::filesystem::path& path);
void write_network(const std::filesystem::path& path, const ProxyNetwork& net);

}  // namespace proxybench
