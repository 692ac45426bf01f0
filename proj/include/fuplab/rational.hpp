#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

#include "fuplab/error.hpp"

namespace fuplab {

// et_off: arithmetic yields the number type itself, so std::min/max and
// ternaries work without wrapping every expression.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// "num/den" or plain "num"; used by the set JSON format.
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw ConfigError("rational", "zero denominator in '" + s + "'");
        return Rat(num, den);
    } catch (const std::exception& e) {
        throw ConfigError("rational", "cannot parse '" + s + "': " + e.what());
    }
}

inline std::string format_rat(const Rat& r) {
    BigInt num = numerator(r), den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// L^k for the cell grids; k small enough that this stays exact.
inline BigInt ipow(long long base, int exp) {
    BigInt r(1), b(base);
    for (int i = 0; i < exp; ++i) r *= b;
    return r;
}

inline long long to_ll(const BigInt& b) { return b.convert_to<long long>(); }

inline BigInt rat_floor(const Rat& r) {
    BigInt q = numerator(r) / denominator(r); // truncates toward zero
    if (Rat(q) > r) q -= 1;
    return q;
}

inline BigInt rat_ceil(const Rat& r) {
    BigInt q = numerator(r) / denominator(r);
    if (Rat(q) < r) q += 1;
    return q;
}

// Exact rational value of a double (every finite double is p / 2^k).
inline Rat rat_from_double(double v) {
    if (v == 0.0) return Rat(0);
    if (!std::isfinite(v)) throw ConfigError("rational", "value is not finite");
    int e = 0;
    double m = std::frexp(v, &e);
    BigInt num((long long)std::ldexp(m, 53));
    int shift = e - 53;
    if (shift >= 0) return Rat(num * ipow(2, shift));
    return Rat(num, ipow(2, -shift));
}

} // namespace fuplab
