#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dfas {

// Affine compositions grow coefficients without bound, so constants are
// arbitrary precision throughout.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

inline std::string to_string(const Int& v) { return v.str(); }

inline bool fits_int64(const Int& v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

// Floor-free exact division test; b must be non-zero.
inline bool divides(const Int& b, const Int& a) { return a % b == 0; }

inline Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = std::move(b);
        b = std::move(t);
    }
    return a;
}

} // namespace dfas
