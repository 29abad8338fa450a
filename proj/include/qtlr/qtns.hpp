#ifndef QTLR_QTNS_HPP
#define QTLR_QTNS_HPP

#include <iosfwd>
#include <string>

#include "qtlr/qtlr.hpp"
#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// Binary tensor container: "QTNS", u32 version (1), u32 order N, N x u64 dims,
// then column-major entries as four little-endian f64 (w, x, y, z).
inline constexpr std::uint32_t kQtnsVersion = 1;

void write_qtns(std::ostream& os, const QuaternionTensord& t);
QuaternionTensord read_qtns(std::istream& is);
void save_qtns(const std::string& path, const QuaternionTensord& t);
QuaternionTensord load_qtns(const std::string& path);

// Directory with core_<n>.qtns for n = 1..N and cores.txt holding
// "order=N" and "ranks=r1,...,rN".
void save_cores(const std::string& dir, const QtlrCoresd& cores);
QtlrCoresd load_cores(const std::string& dir);

}  // namespace qtlr

#endif  // QTLR_QTNS_HPP
