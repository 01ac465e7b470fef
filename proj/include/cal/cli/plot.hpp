#pragma once

#include <span>
#include <string>

#include "cal/history.hpp"

namespace cal::cli {

/// Self-contained SVG with one panel (and exactly one polyline) per series: loss over
/// steps, threshold over steps when any record carries one, and precision over epochs
/// when snapshots are given. Output bytes depend only on the inputs.
/// Throws IoError if `records` is empty.
std::string render_training_svg(std::span<const HistoryRecord> records,
                                std::span<const EvalSnapshot> snapshots = {});

}  // namespace cal::cli
