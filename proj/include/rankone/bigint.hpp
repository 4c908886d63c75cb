#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace rankone {

/// Heights, spacers, exponents and word values. Never truncated.
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

inline std::size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

/// Least nonnegative residue of v modulo n (n > 0).
inline std::uint64_t mod_u64(const BigInt& v, std::uint64_t n) {
    BigInt r = v % n;
    if (r < 0) r += n;
    return r.convert_to<std::uint64_t>();
}

}  // namespace rankone
