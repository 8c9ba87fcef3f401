#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <sstream>
#include <stdexcept>
#include <iomanip>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

namespace natext {

using quad = boost::multiprecision::float128;

template <class Real>
inline Real pi() { return boost::math::constants::pi<Real>(); }

template <class Real>
inline Real eps() { return std::numeric_limits<Real>::epsilon(); }

template <class Real>
inline double to_double(const Real& x) { return static_cast<double>(x); }

template <class Real>
inline Real from_double(double x) { return Real(x); }

// 17 significant digits for double, 36 for quad
template <class Real>
inline std::string to_string(const Real& x)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<Real>::max_digits10) << x;
    return os.str();
}

template <class Real>
inline Real parse_real(const std::string& s)
{
    if constexpr (std::is_same_v<Real, double>) {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
        return v;
    } else {
        return Real(s);
    }
}

} // namespace natext
