#pragma once

#include <filesystem>
#include <string>

#include "dvspix/analysis.hpp"

// Minimal SVG output: one histogram-plus-fit figure per analysis cell, blue
// bars, red dashed inverse-Gaussian overlay, gap end marker.

namespace dvspix {

[[nodiscard]] std::string render_cell_svg(const CellStats& cell);

void write_cell_svg(const std::filesystem::path& path, const CellStats& cell);

}  // namespace dvspix
