#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>

namespace tmot {

// Exact rational numbers for exponents, valuations, precisions and slopes.
using Rat = boost::rational<long long>;

inline long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline long long rat_floor(const Rat& r) { return floor_div(r.numerator(), r.denominator()); }
inline long long rat_ceil(const Rat& r) { return -floor_div(-r.numerator(), r.denominator()); }

inline std::string to_string(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Precision of a truncated series: nullopt means the element is known exactly.
using Prec = std::optional<Rat>;

inline Prec min_prec(const Prec& a, const Prec& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
}

inline bool prec_lt(const Prec& a, const Prec& b) {
    // "a is a weaker precision than b"; exact (nullopt) is the strongest.
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
}

}  // namespace tmot
