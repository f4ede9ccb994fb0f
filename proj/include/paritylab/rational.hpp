#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "paritylab/random.hpp"

namespace plab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational pow2(long exponent) {
    BigInt p = 1;
    p <<= static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
    return exponent < 0 ? Rational(BigInt(1), p) : Rational(p);
}

inline Rational ratio(std::uint64_t num, std::uint64_t den) {
    return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const BigInt& v) { return v.str(); }

// "p/q" in lowest terms; integers print without a denominator.
inline std::string to_string(const Rational& r) {
    const BigInt den = denominator_of(r);
    if (den == 1) return numerator_of(r).str();
    return numerator_of(r).str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Uniform big integer in [0, bound).
inline BigInt uniform_below(Rng& rng, const BigInt& bound) {
    if (bound <= 1) return 0;
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(bound)) + 1;
    for (;;) {
        BigInt r = 0;
        for (unsigned got = 0; got < bits; got += 64) {
            r <<= 64;
            r |= BigInt(rng());
        }
        const unsigned extra = ((bits + 63) / 64) * 64 - bits;
        r >>= extra;
        if (r < bound) return r;
    }
}

}  // namespace plab
