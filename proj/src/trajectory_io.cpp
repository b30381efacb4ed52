#include "thermistor/trajectory_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  unsigned char bytes[8];
  std::memcpy(bytes, &value, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw InvalidArgument("truncated snapshot file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  T value;
  std::memcpy(&value, bytes, 8);
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, int nx, int nt, const Snapshot& snapshot) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(nx));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(nt));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(snapshot.n));
  put<double>(out, snapshot.t);
  for (double v : snapshot.theta) put(out, v);
  for (double v : snapshot.phi) put(out, v);
  for (double v : snapshot.u) put(out, v);
}

SnapshotRecord read_snapshot(std::istream& in) {
  SnapshotRecord rec;
  rec.nx = static_cast<int>(get<std::uint64_t>(in));
  rec.nt = static_cast<int>(get<std::uint64_t>(in));
  rec.snapshot.n = static_cast<int>(get<std::uint64_t>(in));
  rec.snapshot.t = get<double>(in);
  const std::size_t nv = static_cast<std::size_t>(rec.nx + 1) * (rec.nx + 1) +
                         static_cast<std::size_t>(rec.nx) * rec.nx;
  rec.snapshot.theta.resize(nv);
  rec.snapshot.phi.resize(nv);
  rec.snapshot.u.resize(2 * nv);
  for (double& v : rec.snapshot.theta) v = get<double>(in);
  for (double& v : rec.snapshot.phi) v = get<double>(in);
  for (double& v : rec.snapshot.u) v = get<double>(in);
  return rec;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt");
  if (!index) throw std::runtime_error(fmt::format("cannot write {}", (dir / "index.txt").string()));
  index << fmt::format("# nx={} nt={} k={:.17g} stride={}\n", trajectory.nx, trajectory.nt,
                       trajectory.k, trajectory.stride);
  for (const Snapshot& s : trajectory.snapshots) {
    const std::string name = fmt::format("step_{:06d}.bin", s.n);
    std::ofstream file(dir / name, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
    write_snapshot(file, trajectory.nx, trajectory.nt, s);
    index << fmt::format("{} {:.17g} {}\n", s.n, s.t, name);
  }
}

}  // namespace thermistor
