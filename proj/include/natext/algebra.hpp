#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "real.hpp"

namespace natext {

struct invalid_index : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <class Real>
struct GroupParams {
    int n = 3;
    Real nu;  // 2 cos(pi/n)
    Real t;   // 1 + nu
};

template <class Real>
GroupParams<Real> group_params(int n)
{
    using std::cos;
    if (n < 3) throw invalid_index("group index n must be >= 3, got " + std::to_string(n));
    GroupParams<Real> g;
    g.n = n;
    g.nu = (n == 3) ? Real(1) : Real(2) * cos(pi<Real>() / n);
    g.t = Real(1) + g.nu;
    return g;
}

// Point of the extended real line.
template <class Real>
struct ExtReal {
    Real value{0};
    bool inf = false;

    static ExtReal infinity() { return ExtReal{Real(0), true}; }
    ExtReal() = default;
    ExtReal(Real v) : value(v) {}
    ExtReal(Real v, bool i) : value(v), inf(i) {}
};

template <class Real>
struct Mobius {
    Real a{1}, b{0}, c{0}, d{1};

    Mobius() = default;
    Mobius(Real a_, Real b_, Real c_, Real d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mobius identity() { return {}; }

    Real det() const { return a * d - b * c; }
    Real trace() const { return a + d; }

    Real operator()(const Real& x) const { return (a * x + b) / (c * x + d); }

    ExtReal<Real> apply(const ExtReal<Real>& x) const
    {
        using std::abs;
        if (x.inf) {
            if (c == 0) return ExtReal<Real>::infinity();
            return ExtReal<Real>(a / c);
        }
        Real den = c * x.value + d;
        if (den == 0) return ExtReal<Real>::infinity();
        return ExtReal<Real>((a * x.value + b) / den);
    }

    // derivative of x -> M.x
    Real derivative(const Real& x) const
    {
        Real den = c * x + d;
        return det() / (den * den);
    }

    // point sent to infinity, or infinity itself when c == 0
    ExtReal<Real> pole() const
    {
        if (c == 0) return ExtReal<Real>::infinity();
        return ExtReal<Real>(-d / c);
    }

    Mobius normalized() const
    {
        using std::abs;
        using std::sqrt;
        Real D = det();
        if (D == 0) throw std::domain_error("singular Mobius matrix");
        Real s = sqrt(abs(D));
        return {a / s, b / s, c / s, d / s};
    }

    Real max_entry() const
    {
        using std::abs;
        return std::max({abs(a), abs(b), abs(c), abs(d)});
    }
};

template <class Real>
Mobius<Real> operator*(const Mobius<Real>& M, const Mobius<Real>& N)
{
    return {M.a * N.a + M.b * N.c, M.a * N.b + M.b * N.d,
            M.c * N.a + M.d * N.c, M.c * N.b + M.d * N.d};
}

template <class Real>
Mobius<Real> compose(const Mobius<Real>& M1, const Mobius<Real>& M2) { return M1 * M2; }

template <class Real>
Mobius<Real> inverse(const Mobius<Real>& M)
{
    Real D = M.det();
    if (D == 0) throw std::domain_error("singular Mobius matrix");
    return {M.d / D, -M.b / D, -M.c / D, M.a / D};
}

template <class Real>
ExtReal<Real> apply(const Mobius<Real>& M, const ExtReal<Real>& x) { return M.apply(x); }

template <class Real>
Mobius<Real> power(const Mobius<Real>& M, int p)
{
    Mobius<Real> base = p < 0 ? inverse(M) : M;
    Mobius<Real> out;
    for (int i = 0, q = p < 0 ? -p : p; i < q; ++i) out = out * base;
    return out;
}

// Projective equality up to sign and scale. Tolerance is relative to the largest entry.
template <class Real>
bool proj_equal(const Mobius<Real>& M, const Mobius<Real>& N, Real tol = Real(1e-12))
{
    using std::abs;
    Mobius<Real> P = M.normalized(), Q = N.normalized();
    Real s = std::max({P.max_entry(), Q.max_entry(), Real(1)});
    auto diff = [&](int sg) {
        return std::max({abs(P.a - sg * Q.a), abs(P.b - sg * Q.b), abs(P.c - sg * Q.c), abs(P.d - sg * Q.d)});
    };
    return std::min(diff(1), diff(-1)) <= tol * s;
}

template <class Real>
struct Generators {
    Mobius<Real> A, C, R;
};

template <class Real>
Generators<Real> generators(const GroupParams<Real>& g)
{
    return {Mobius<Real>(1, g.t, 0, 1), Mobius<Real>(-1, 1, -1, 0), Mobius<Real>(0, -1, 1, 0)};
}

template <class Real>
Mobius<Real> gen_A(const GroupParams<Real>& g, int k = 1) { return Mobius<Real>(1, Real(k) * g.t, 0, 1); }

template <class Real>
Mobius<Real> gen_C() { return Mobius<Real>(-1, 1, -1, 0); }

template <class Real>
Mobius<Real> gen_R() { return Mobius<Real>(0, -1, 1, 0); }

// A^k C^l
template <class Real>
Mobius<Real> digit_matrix(const GroupParams<Real>& g, int k, int l)
{
    Mobius<Real> M = gen_A(g, k);
    for (int i = 0; i < l; ++i) M = M * gen_C<Real>();
    return M;
}

// R M R^{-1}: the y-coordinate action of the planar map
template <class Real>
Mobius<Real> conj_by_R(const Mobius<Real>& M)
{
    // R = (0 -1; 1 0), R^{-1} = (0 1; -1 0)
    return {M.d, -M.c, -M.b, M.a};
}

enum class FixedKind { attracting, repelling, parabolic };

template <class Real>
struct FixedPoint {
    Real root;
    FixedKind kind;
    Real multiplier;  // |M'(root)|
};

// Finite real fixed points of M. Empty for elliptic M or when the only fixed point is infinity.
template <class Real>
std::vector<FixedPoint<Real>> fixed_points(const Mobius<Real>& M0, Real parabolic_tol = Real(1e-8))
{
    using std::abs;
    using std::sqrt;
    Mobius<Real> M = M0.normalized();
    std::vector<Real> roots;
    // c x^2 + (d - a) x - b = 0
    Real qa = M.c, qb = M.d - M.a, qc = -M.b;
    Real scale = std::max({abs(qa), abs(qb), abs(qc)});
    if (scale == 0) return {};
    if (abs(qa) <= eps<Real>() * scale) {
        if (abs(qb) > eps<Real>() * scale) roots.push_back(-qc / qb);
    } else {
        Real disc = qb * qb - 4 * qa * qc;
        if (disc < 0) {
            if (disc > -Real(64) * eps<Real>() * scale * scale) disc = 0;
            else return {};
        }
        Real sq = sqrt(disc);
        Real q = -(qb + (qb >= 0 ? sq : -sq)) / 2;
        if (q != 0) {
            roots.push_back(q / qa);
            roots.push_back(qc / q);
        } else {
            roots.push_back(Real(0));
        }
        if (disc == 0 && roots.size() == 2) roots.pop_back();
    }
    std::vector<FixedPoint<Real>> out;
    for (const Real& x : roots) {
        Real d = abs(M.derivative(x));
        FixedKind k = FixedKind::parabolic;
        if (d > 1 + parabolic_tol) k = FixedKind::repelling;
        else if (d < 1 - parabolic_tol) k = FixedKind::attracting;
        out.push_back({x, k, d});
    }
    std::sort(out.begin(), out.end(), [](auto& p, auto& q) { return p.root < q.root; });
    return out;
}

} // namespace natext
