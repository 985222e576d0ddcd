#pragma once

// Exact rationals for threshold algebra. Expression templates are disabled:
// boost::rational does not work with cpp_int expression types.

#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace gps {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational = boost::rational<BigInt>;

inline std::string to_string(const Rational& r) { return r.numerator().str() + "/" + r.denominator().str(); }

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace gps
