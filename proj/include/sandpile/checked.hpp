#pragma once

#include <cstdint>

#include "sandpile/error.hpp"

namespace sandpile::detail {

// Overflow-checked integer arithmetic. Heights and multiplicities never wrap.

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "64-bit addition overflowed");
  return r;
}

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "64-bit multiplication overflowed");
  return r;
}

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "signed 64-bit addition overflowed");
  return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(Errc::Overflow, "signed 64-bit subtraction overflowed");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "signed 64-bit multiplication overflowed");
  return r;
}

inline std::int64_t to_signed(std::uint64_t a) {
  if (a > static_cast<std::uint64_t>(INT64_MAX)) throw Error(Errc::Overflow, "value exceeds signed 64-bit range");
  return static_cast<std::int64_t>(a);
}

inline std::uint64_t to_unsigned(std::int64_t a) {
  if (a < 0) throw Error(Errc::Overflow, "negative value where a height was expected");
  return static_cast<std::uint64_t>(a);
}

/// Mathematical floor division (rounds toward negative infinity). d > 0.
constexpr std::int64_t floor_div(std::int64_t n, std::int64_t d) {
  std::int64_t q = n / d;
  if ((n % d != 0) && (n < 0)) --q;
  return q;
}

/// Non-negative remainder in [0, d). d > 0.
constexpr std::int64_t floor_mod(std::int64_t n, std::int64_t d) {
  std::int64_t r = n % d;
  return r < 0 ? r + d : r;
}

}  // namespace sandpile::detail
