#pragma once

#include <filesystem>
#include <iosfwd>

#include "thermistor/stepper.hpp"

namespace thermistor {

/// Binary snapshot layout, all little-endian 8-byte fields:
///   uint64 nx, uint64 nt, uint64 n, float64 t,
///   float64 theta[nv], float64 phi[nv], float64 u[2 nv] (interleaved).
void write_snapshot(std::ostream& out, int nx, int nt, const Snapshot& snapshot);

struct SnapshotRecord {
  int nx = 0;
  int nt = 0;
  Snapshot snapshot;  // velocity is left empty
};

SnapshotRecord read_snapshot(std::istream& in);

/// Writes dir/step_<n>.bin per snapshot and dir/index.txt with lines
/// `n t file` after a `# nx nt k stride` header.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory);

}  // namespace thermistor
