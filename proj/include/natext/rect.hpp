#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "real.hpp"

namespace natext {

struct infinite_mass : std::domain_error {
    using std::domain_error::domain_error;
};

template <class Real>
struct Rect {
    Real x1{0}, x2{0}, y1{0}, y2{0};
    std::string tag;  // where the edges come from

    Real width() const { return x2 - x1; }
    Real height() const { return y2 - y1; }
    bool contains(const Real& x, const Real& y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }
};

// mu(R) = log((1+x1 y1)(1+x2 y2) / ((1+x1 y2)(1+x2 y1))) for dmu = dx dy / (1+xy)^2
template <class Real>
Real mu_rect(const Rect<Real>& r)
{
    using std::log1p;
    if (r.x2 <= r.x1 || r.y2 <= r.y1) return Real(0);
    Real p11 = r.x1 * r.y1, p22 = r.x2 * r.y2, p12 = r.x1 * r.y2, p21 = r.x2 * r.y1;
    // 1 + xy is bilinear, so its minimum over the rectangle sits at a corner
    for (const Real& p : {p11, p22, p12, p21})
        if (!(1 + p > 0)) throw infinite_mass("rectangle meets the density pole 1 + xy = 0");
    Real m = log1p(p11) + log1p(p22) - log1p(p12) - log1p(p21);
    return m < 0 ? Real(0) : m;
}

// inner integral of the density over y in [y1, y2]
template <class Real>
Real fiber_density(const Real& x, const Real& y1, const Real& y2)
{
    return (y2 - y1) / ((1 + x * y1) * (1 + x * y2));
}

} // namespace natext
