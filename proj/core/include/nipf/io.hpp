#pragma once

// Legacy-VTK snapshots (STRUCTURED_POINTS, ASCII) of c, eta and u.

#include <filesystem>

#include "nipf/dvd.hpp"

namespace nipf::io {

struct Snapshot {
  dvd::DiscreteState state;
  double t = 0.0;
  long step = 0;
};

/// Values are written at the cell centers with 17 significant digits, one
/// per line, so a read returns the exact doubles.
void write_snapshot(const std::filesystem::path& path, const dvd::DiscreteState& s, double t, long step);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace nipf::io
