#ifndef PCMA_FIELD_IO_HPP
#define PCMA_FIELD_IO_HPP

#include <cstdint>
#include <string>

#include "pcma/field.hpp"

namespace pcma {

// Binary snapshot format, little-endian throughout:
//   byte  0: magic "PCMA"
//   byte  4: format version (u32)
//   byte  8: complex dimension n (u32)
//   byte 12: nodes per axis, 4 x u32 (axes beyond 2n store 1)
//   byte 28: grid spacing h (f64)
//   byte 36: snapshot time (f64)
//   byte 44: pole clip m_cap (f64)
//   byte 52: zero padding up to 64
// followed by one f64 per node in node order (axis 0 fastest).  Values round
// trip bit-exactly; floor flags are recomputed as value == -m_cap on load.
// The grid is reconstructed as the origin-centered domain with radius
// h (R-1)/2, so only origin-centered domains serialize.
inline constexpr uint32_t kFieldFormatVersion = 1;

void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);

}  // namespace pcma

#endif
