#include "qtlr/qtns.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtlr/config.hpp"

namespace qtlr {

namespace {

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> bytes;
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (is.gcount() != static_cast<std::streamsize>(bytes.size())) throw IoError("QTNS: unexpected end of data");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

std::string core_path(const std::string& dir, std::size_t n) {
  return (std::filesystem::path(dir) / ("core_" + std::to_string(n + 1) + ".qtns")).string();
}

}  // namespace

void write_qtns(std::ostream& os, const QuaternionTensord& t) {
  os.write("QTNS", 4);
  put_le<std::uint32_t>(os, kQtnsVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.order()));
  for (Index d : t.dims()) put_le<std::uint64_t>(os, static_cast<std::uint64_t>(d));
  for (Index i = 0; i < t.size(); ++i)
    for (int c = 0; c < 4; ++c) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(t.plane(c)(i)));
  if (!os) throw IoError("QTNS: write failed");
}

QuaternionTensord read_qtns(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != "QTNS") throw IoError("QTNS: bad magic");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kQtnsVersion) throw IoError("QTNS: unsupported version " + std::to_string(version));
  const auto order = get_le<std::uint32_t>(is);
  if (order == 0 || order > 64) throw IoError("QTNS: implausible order " + std::to_string(order));
  Dims dims;
  double entries = 1;
  for (std::uint32_t n = 0; n < order; ++n) {
    const auto d = get_le<std::uint64_t>(is);
    if (d == 0) throw IoError("QTNS: zero dimension");
    dims.push_back(static_cast<Index>(d));
    entries *= static_cast<double>(d);
  }
  if (entries > 1e10) throw IoError("QTNS: tensor too large");
  QuaternionTensord t(dims);
  for (Index i = 0; i < t.size(); ++i)
    for (int c = 0; c < 4; ++c) t.plane(c)(i) = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return t;
}

void save_qtns(const std::string& path, const QuaternionTensord& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_qtns(os, t);
}

QuaternionTensord load_qtns(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  try {
    return read_qtns(is);
  } catch (const IoError& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

void save_cores(const std::string& dir, const QtlrCoresd& cores) {
  std::filesystem::create_directories(dir);
  for (std::size_t n = 0; n < cores.order(); ++n) save_qtns(core_path(dir, n), cores.core(n));
  std::ofstream os(std::filesystem::path(dir) / "cores.txt");
  if (!os) throw IoError("cannot write core manifest in '" + dir + "'");
  os << "order=" << cores.order() << "\nranks=" << join_indices(cores.ranks()) << '\n';
}

QtlrCoresd load_cores(const std::string& dir) {
  const auto kv = read_config_file((std::filesystem::path(dir) / "cores.txt").string());
  const Index order = kv.get_index("order");
  const auto ranks = kv.get_indices("ranks");
  if (order < 1 || static_cast<Index>(ranks.size()) != order)
    throw IoError("core manifest in '" + dir + "' lists " + std::to_string(ranks.size()) + " ranks for order " +
                  std::to_string(order));
  std::vector<QuaternionTensord> list;
  for (Index n = 0; n < order; ++n) {
    auto core = load_qtns(core_path(dir, n));
    if (core.order() != 3 || core.dim(0) != ranks[n])
      throw IoError("core " + std::to_string(n + 1) + " in '" + dir + "' disagrees with the manifest ranks");
    list.push_back(std::move(core));
  }
  try {
    return QtlrCoresd(std::move(list));
  } catch (const ShapeError& e) {
    throw IoError("cores in '" + dir + "' do not close a ring: " + e.what());
  }
}

}  // namespace qtlr
