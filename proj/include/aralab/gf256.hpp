#pragma once

#include <cstddef>
#include <cstdint>

namespace aralab::gf256 {

/// Field reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
inline constexpr unsigned kPolynomial = 0x11d;

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
/// Multiplicative inverse; throws on zero.
std::uint8_t inv(std::uint8_t a);
std::uint8_t div(std::uint8_t a, std::uint8_t b);
/// Row of the multiplication table for a fixed factor.
const std::uint8_t* mul_row(std::uint8_t c);

/// dst[i] ^= c * src[i]
void axpy(std::uint8_t* dst, const std::uint8_t* src, std::uint8_t c, std::size_t n);
/// v[i] *= c
void scale(std::uint8_t* v, std::uint8_t c, std::size_t n);

}  // namespace aralab::gf256
