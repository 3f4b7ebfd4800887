#include "bhq/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "snapshot i/o writes native doubles and assumes a little-endian host");

namespace bhq {

namespace {

constexpr char kMagic[8] = {'B', 'H', 'Q', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("snapshot '" + path + "': " + what);
}

}  // namespace

void save_snapshot(const std::string& path, const Lattice& lattice, const SystemState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");

  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(lattice.dimension()));
  for (int d = 0; d < lattice.dimension(); ++d)
    put_u32(out, static_cast<std::uint32_t>(lattice.size(d)));
  put_u32(out, static_cast<std::uint32_t>(state.onsite.n_max));
  put_u32(out, state.pairs.layout == PairLayout::Full ? 1u : 0u);
  put_f64(out, state.time);
  for (double v : state.onsite.p) put_f64(out, v);
  for (const complexd& z : state.pairs.f) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  out.flush();
  if (!out) fail(path, "write failed");
}

SystemState load_snapshot(const std::string& path, const Lattice& lattice) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");

  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (!in || std::string_view(magic, 8) != std::string_view(kMagic, 8))
    fail(path, "bad magic, not a state snapshot");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    std::ostringstream msg;
    msg << "unsupported format version " << version;
    fail(path, msg.str());
  }
  const std::uint32_t dim = get_u32(in);
  if (dim != static_cast<std::uint32_t>(lattice.dimension()))
    fail(path, "lattice dimension mismatch");
  for (int d = 0; d < lattice.dimension(); ++d) {
    const std::uint32_t size = get_u32(in);
    if (size != static_cast<std::uint32_t>(lattice.size(d)))
      fail(path, "lattice size mismatch");
  }
  const std::uint32_t n_max = get_u32(in);
  if (n_max < 2 || n_max > 64) fail(path, "implausible n_max");
  const std::uint32_t layout_tag = get_u32(in);
  if (layout_tag > 1) fail(path, "unknown pair layout tag");
  const PairLayout layout =
      layout_tag == 1 ? PairLayout::Full : PairLayout::TranslationInvariant;

  // Size the containers exactly as initial_mott would, then overwrite.
  SystemState state = initial_mott(lattice, static_cast<int>(n_max), 1, layout);
  state.time = get_f64(in);
  for (double& v : state.onsite.p) v = get_f64(in);
  for (complexd& z : state.pairs.f) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = complexd(re, im);
  }
  if (!in) fail(path, "truncated file");
  in.peek();
  if (!in.eof()) fail(path, "trailing bytes after state payload");
  return state;
}

}  // namespace bhq
