#pragma once

#include <iosfwd>
#include <string>

#include "tebd/mps.hpp"

namespace tebd {

/// Binary state snapshot. Layout, all integers uint32 and floats IEEE-754
/// doubles, little-endian:
///   magic "VMPSNAP1" (8 bytes)
///   n, d
///   n+1 cut sizes
///   n+1 lambda payloads (doubles)
///   n gamma payloads (interleaved re,im doubles, row-major (left,phys,right))
/// Round-trips bit-exactly on the same platform.
void write_snapshot(std::ostream& out, const VidalMps& state);
VidalMps read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const VidalMps& state);
VidalMps load_snapshot(const std::string& path);

}  // namespace tebd
