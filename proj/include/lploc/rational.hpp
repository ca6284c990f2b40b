#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace lploc {

// Exact arithmetic carriers.  cpp_rational keeps values reduced with a
// positive denominator, which is exactly the contract the certification
// paths rely on.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline std::string fraction_string(const Rational& x) {
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        const BigInt num(s.substr(0, slash));
        const BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_rational: malformed rational '" + s + "'");
    }
}

/// Enclosure center +/- radius of an exactly computed quantity.
struct CertifiedValue {
    Rational center;
    Rational radius;

    CertifiedValue(Rational c, Rational r) : center(std::move(c)), radius(std::move(r)) {
        if (radius < 0)
            throw std::invalid_argument("CertifiedValue: negative radius");
    }

    Rational lower() const { return center - radius; }
    Rational upper() const { return center + radius; }
    bool contains(const Rational& x) const { return lower() <= x && x <= upper(); }
};

}  // namespace lploc
