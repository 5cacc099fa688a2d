#include "tebd/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace tebd {

namespace {

constexpr char kMagic[8] = {'V', 'M', 'P', 'S', 'N', 'A', 'P', '1'};

void put_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t get_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("snapshot: truncated header");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& out, const VidalMps& state) {
  out.write(kMagic, sizeof kMagic);
  const int n = state.size();
  put_u32(out, static_cast<uint32_t>(n));
  put_u32(out, static_cast<uint32_t>(state.phys_dim()));
  for (int c = 0; c <= n; ++c) put_u32(out, static_cast<uint32_t>(state.lambda(c).size()));
  for (int c = 0; c <= n; ++c) {
    const RVector& lam = state.lambda(c);
    out.write(reinterpret_cast<const char*>(lam.data()),
              static_cast<std::streamsize>(lam.size() * sizeof(double)));
  }
  for (int l = 0; l < n; ++l) {
    const auto& data = state.gamma(l).data();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(Complex)));
  }
  if (!out) throw std::runtime_error("snapshot: write failed");
}

VidalMps read_snapshot(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("snapshot: bad magic");

  const int n = static_cast<int>(get_u32(in));
  const int d = static_cast<int>(get_u32(in));
  if (n < 2 || d < 2) throw std::runtime_error("snapshot: invalid dimensions");

  std::vector<uint32_t> cut(n + 1);
  for (int c = 0; c <= n; ++c) cut[c] = get_u32(in);
  if (cut[0] != 1 || cut[n] != 1)
    throw std::runtime_error("snapshot: boundary cuts must have size 1");

  // Assemble via a product state of the right shape, then overwrite payloads.
  std::vector<CVector> locals(n, [&] {
    CVector v = CVector::Zero(d);
    v[0] = 1.0;
    return v;
  }());
  VidalMps state = VidalMps::product_state(locals);

  for (int c = 0; c <= n; ++c) {
    RVector lam(cut[c]);
    in.read(reinterpret_cast<char*>(lam.data()),
            static_cast<std::streamsize>(lam.size() * sizeof(double)));
    if (!in) throw std::runtime_error("snapshot: truncated lambda payload");
    state.mutable_lambda(c) = std::move(lam);
  }
  for (int l = 0; l < n; ++l) {
    Tensor3 g(static_cast<int>(cut[l]), d, static_cast<int>(cut[l + 1]));
    in.read(reinterpret_cast<char*>(g.data().data()),
            static_cast<std::streamsize>(g.data().size() * sizeof(Complex)));
    if (!in) throw std::runtime_error("snapshot: truncated gamma payload");
    state.mutable_gamma(l) = std::move(g);
  }
  return state;
}

void save_snapshot(const std::string& path, const VidalMps& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
  write_snapshot(out, state);
}

VidalMps load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path);
  return read_snapshot(in);
}

}  // namespace tebd
