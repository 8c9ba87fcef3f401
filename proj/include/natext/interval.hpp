#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "algebra.hpp"

namespace natext {

struct pole_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct Digit {
    int k = 0;
    int l = 1;
    bool operator==(const Digit&) const = default;
};

inline std::string format_digit(const Digit& d)
{
    return "(" + std::to_string(d.k) + "," + std::to_string(d.l) + ")";
}

// Left-to-right order of the cylinders: key (l, 1/k).
inline bool digit_less(const Digit& a, const Digit& b)
{
    if (a.l != b.l) return a.l < b.l;
    if (a.k == b.k) return false;
    if ((a.k < 0) != (b.k < 0)) return a.k < 0;
    return a.k > b.k;
}

template <class Real>
struct IntervalSpec {
    GroupParams<Real> params;
    Real alpha;
    Real ell0;
    Real r0;
    Real tol;  // tie tolerance, 1e-12 t

    const Real& t() const { return params.t; }
    bool in_interval(const Real& y) const { return y >= ell0 - tol && y < r0 - tol; }
};

template <class Real>
IntervalSpec<Real> make_spec(const GroupParams<Real>& g, const Real& alpha)
{
    if (!(alpha >= 0 && alpha <= 1)) throw std::domain_error("alpha must lie in [0,1]");
    IntervalSpec<Real> s;
    s.params = g;
    s.alpha = alpha;
    s.ell0 = (alpha - 1) * g.t;
    s.r0 = alpha * g.t;
    s.tol = Real(1e-12) * g.t;
    return s;
}

template <class Real>
struct DigitInfo {
    Digit d;
    Real image;
    bool tie = false;
};

template <class Real>
DigitInfo<Real> digit_info(const IntervalSpec<Real>& s, const Real& x)
{
    using std::abs;
    using std::floor;
    if (x < s.ell0 - s.tol || x > s.r0 + s.tol)
        throw std::domain_error("point " + to_string(x) + " outside the definition interval");
    if (x == 0) throw pole_error("x = 0 is a pole of the digit map");
    DigitInfo<Real> out;
    Real cx = (x - 1) / x;
    int l = s.in_interval(cx) ? 2 : 1;
    Real y;
    if (l == 1) {
        y = cx;
    } else {
        if (x == 1) throw pole_error("x = 1 is a pole of the digit map");
        y = 1 / (1 - x);
    }
    if (abs(y) > Real(1e15) * s.t()) throw pole_error("point too close to a pole of the digit map");
    Real q = floor((y - s.ell0) / s.t());
    long long k = -static_cast<long long>(to_double(q));
    Real img = y + Real(k) * s.t();
    if (img >= s.r0 - s.tol) { --k; img -= s.t(); }
    else if (img < s.ell0 - s.tol) { ++k; img += s.t(); }
    out.d = {static_cast<int>(k), l};
    out.image = img;
    out.tie = abs(img - s.ell0) <= s.tol || abs(cx - s.ell0) <= s.tol || abs(cx - s.r0) <= s.tol;
    return out;
}

template <class Real>
Digit digit(const IntervalSpec<Real>& s, const Real& x) { return digit_info(s, x).d; }

template <class Real>
Real step(const IntervalSpec<Real>& s, const Real& x) { return digit_info(s, x).image; }

template <class Real>
struct OrbitRecord {
    Real start;
    std::vector<Real> points;  // points[0] = start
    std::vector<Digit> digits; // digits[i] moves points[i] to points[i+1]
    std::vector<Real> err;     // first-order rounding error bound of points[i]
    bool truncated = false;    // stopped at the step cap
    bool hit_pole = false;
};

template <class Real>
OrbitRecord<Real> orbit(const IntervalSpec<Real>& s, const Real& x, int nmax = 512)
{
    OrbitRecord<Real> o;
    using std::abs;
    o.start = x;
    o.points.push_back(x);
    o.err.push_back(eps<Real>() * abs(x));
    Real cur = x;
    for (int i = 0; i < nmax; ++i) {
        try {
            auto di = digit_info(s, cur);
            Real den = di.d.l == 1 ? cur : cur - 1;
            o.err.push_back(o.err.back() / (den * den) + eps<Real>() * (abs(di.image) + s.t()));
            o.digits.push_back(di.d);
            cur = di.image;
            o.points.push_back(cur);
        } catch (const pole_error&) {
            o.hit_pole = true;
            return o;
        }
    }
    o.truncated = true;
    return o;
}

// Orbit driven by a prescribed digit word instead of T.
template <class Real>
std::vector<Real> orbit_by_word(const GroupParams<Real>& g, const Real& x, const std::vector<Digit>& word)
{
    std::vector<Real> pts{x};
    Real cur = x;
    for (const Digit& d : word) {
        cur = digit_matrix(g, d.k, d.l)(cur);
        pts.push_back(cur);
    }
    return pts;
}

template <class Real>
Mobius<Real> word_matrix(const GroupParams<Real>& g, const std::vector<Digit>& word)
{
    Mobius<Real> M;
    for (const Digit& d : word) M = digit_matrix(g, d.k, d.l) * M;
    return M;
}

template <class Real>
Real frak_b(const IntervalSpec<Real>& s) { return 1 / (1 - s.ell0); }

template <class Real>
struct Landmarks {
    Real gamma;
    Real epsilon;
};

template <class Real>
Landmarks<Real> landmarks(const GroupParams<Real>& g)
{
    using std::sqrt;
    const Real& t = g.t;
    // gamma: 1/(1 + t - u) = u with u = alpha t
    Real b = 1 + t;
    Real u1 = (b - sqrt(b * b - 4)) / 2;
    // epsilon: u^2 - u + (t + 1 - t^2) = 0
    Real disc = 1 - 4 * (t + 1 - t * t);
    Real u2 = (1 + sqrt(disc)) / 2;
    Landmarks<Real> L{u1 / t, u2 / t};
    if (!(L.gamma > 0 && L.gamma < 1 && L.epsilon > 0 && L.epsilon < 1))
        throw std::logic_error("landmark root outside (0,1)");
    return L;
}

template <class Real>
Real inverse_digit_apply(const GroupParams<Real>& g, const Digit& d, const Real& y)
{
    Real z = y - Real(d.k) * g.t;
    if (d.l == 1) return 1 / (1 - z);
    return (z - 1) / z;
}

template <class Real>
struct CylinderBounds {
    Real lambda;
    Real rho;
    bool full = false;
    bool empty = true;
};

template <class Real>
std::vector<Real> digit_breakpoints(const IntervalSpec<Real>& s, int K)
{
    using std::isfinite;
    std::vector<Real> pts{s.ell0, s.r0, Real(0), Real(1), frak_b(s)};
    if (s.r0 != 1) pts.push_back(1 / (1 - s.r0));
    for (int l = 1; l <= 2; ++l)
        for (int k = -K - 1; k <= K + 1; ++k) {
            Real z = s.r0 - Real(k) * s.t();
            if ((l == 1 && z == 1) || (l == 2 && z == 0)) continue;
            pts.push_back(inverse_digit_apply(s.params, Digit{k, l}, s.r0));
        }
    std::vector<Real> in;
    for (auto& p : pts)
        if (p >= s.ell0 && p <= s.r0) in.push_back(p);
    std::sort(in.begin(), in.end());
    std::vector<Real> out;
    for (auto& p : in)
        if (out.empty() || p - out.back() > s.tol) out.push_back(p);
    if (out.back() != s.r0) out.back() = s.r0;
    return out;
}

template <class Real>
CylinderBounds<Real> cylinder_bounds(const IntervalSpec<Real>& s, const Digit& d)
{
    using std::abs;
    int K = std::abs(d.k) + 1;
    auto pts = digit_breakpoints(s, K);
    CylinderBounds<Real> cb;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Real mid = (pts[i] + pts[i + 1]) / 2;
        if (mid == 0 || mid == 1) continue;
        Digit e;
        try { e = digit(s, mid); } catch (const pole_error&) { continue; }
        if (e == d) {
            if (cb.empty) { cb.lambda = pts[i]; cb.empty = false; }
            cb.rho = pts[i + 1];
        }
    }
    if (cb.empty) return cb;
    Mobius<Real> M = digit_matrix(s.params, d.k, d.l);
    Real tol = Real(1e-9) * s.t();
    auto lo = M.apply(ExtReal<Real>(cb.lambda));
    auto hi = M.apply(ExtReal<Real>(cb.rho));
    cb.full = !lo.inf && !hi.inf && abs(lo.value - s.ell0) < tol && abs(hi.value - s.r0) < tol;
    return cb;
}

// Consecutive x-pieces of constant digit; pieces adjacent to a pole whose digits exceed K are tails.
template <class Real>
struct CylinderPiece {
    Real lo, hi;
    Digit d;
    bool tail = false;
    Real pole{0};  // pole the tail accumulates at
};

template <class Real>
std::vector<CylinderPiece<Real>> cylinder_partition(const IntervalSpec<Real>& s, int K)
{
    using std::abs;
    auto pts = digit_breakpoints(s, K);
    std::vector<CylinderPiece<Real>> out;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Real a = pts[i], b = pts[i + 1];
        Real mid = (a + b) / 2;
        CylinderPiece<Real> p{a, b, Digit{}, false, Real(0)};
        try {
            p.d = digit(s, mid);
        } catch (const pole_error&) {
            p.d = Digit{0, 1};
        }
        if (std::abs(p.d.k) > K) {
            p.tail = true;
            Real ref = p.d.l == 1 ? Real(0) : Real(1);
            p.pole = ref;
        }
        if (!out.empty() && out.back().d == p.d && out.back().tail == p.tail) out.back().hi = b;
        else if (!out.empty() && p.tail && out.back().tail && out.back().pole == p.pole &&
                 ((out.back().hi <= p.pole) == (b <= p.pole)))
            out.back().hi = b;
        else out.push_back(p);
    }
    return out;
}

template <class Real>
Real tau_l(int l, const Real& x)
{
    using std::abs;
    using std::log;
    Real v = l == 1 ? abs(x) : abs(x - 1);
    if (v == 0) throw pole_error("tau is singular at this point");
    return -2 * log(v);
}

// tau(x) = -2 log |c x + d| with (c, d) the bottom row of the digit matrix
template <class Real>
Real tau(const IntervalSpec<Real>& s, const Real& x)
{
    Digit d = digit(s, x);
    return tau_l(d.l, x);
}

} // namespace natext
