#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "measure.hpp"
#include "planar.hpp"

namespace natext {

struct expansive_inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Piece of E_k: on [a,b] the first k iterates are Mobius, chain[j] = T^j (j < k),
// and (T^k)'(x) = 1 / (c x + d)^2.
template <class Real>
struct EPiece {
    Real a{0}, b{0};
    int k = 1;
    Real c{0}, d{0};
    std::vector<Mobius<Real>> chain;
};

template <class Real>
struct ExpansivePartition {
    int r = 0;
    bool conclusive = false;
    std::vector<EPiece<Real>> pieces;  // sorted by a

    // E_k as x-intervals
    std::vector<std::pair<Real, Real>> E(int k) const
    {
        std::vector<std::pair<Real, Real>> out;
        for (const auto& p : pieces)
            if (p.k == k) out.push_back({p.a, p.b});
        return out;
    }
    // 0 when x lies in no piece (a boundary point)
    int index_of(const Real& x) const
    {
        auto it = std::upper_bound(pieces.begin(), pieces.end(), x, [](const Real& v, const EPiece<Real>& p) { return v < p.a; });
        if (it == pieces.begin()) return 0;
        --it;
        return x <= it->b ? it->k : 0;
    }
};

namespace detail {

template <class Real>
Mobius<Real> Cpow(int l)
{
    return l == 1 ? gen_C<Real>() : gen_C<Real>() * gen_C<Real>();
}

// l of the digit at y, with the poles resolved by side
template <class Real>
int l_at(const IntervalSpec<Real>& s, const Real& y)
{
    try {
        return digit(s, y).l;
    } catch (const pole_error&) {
        return y < Real(0.5) ? 1 : 2;
    }
}

// x in [a,b] where P x crosses one of the image points us
template <class Real>
std::vector<Real> pull_cuts(const Mobius<Real>& P, const Real& a, const Real& b, const std::vector<Real>& us)
{
    Mobius<Real> Pi = inverse(P);
    Real pa = P(a), pb = P(b);
    std::vector<Real> xs{a};
    for (const auto& u : us)
        if (u > pa && u < pb) {
            Real x = Pi(u);
            if (x > a && x < b) xs.push_back(x);
        }
    xs.push_back(b);
    std::sort(xs.begin(), xs.end());
    return xs;
}

} // namespace detail

// Smallest r with |(T^r)'| > 1 on all of I, by refining the non-expansive remainder cylinder by cylinder.
template <class Real>
ExpansivePartition<Real> expansivity_power(const IntervalSpec<Real>& s, int rmax = 12)
{
    using std::abs;
    struct Work {
        Real a, b;
        std::vector<Mobius<Real>> chain;
    };
    ExpansivePartition<Real> out;
    const Real wtol = Real(1e-13) * s.t();
    std::vector<Real> lcuts{Real(0), Real(1), frak_b(s)};
    if (s.r0 != 1) lcuts.push_back(1 / (1 - s.r0));
    std::vector<Work> queue{{s.ell0, s.r0, {Mobius<Real>::identity()}}};
    for (int m = 0; m < rmax && !queue.empty(); ++m) {
        std::vector<Work> next;
        for (const auto& w : queue) {
            const Mobius<Real>& P = w.chain.back();
            auto xs = detail::pull_cuts(P, w.a, w.b, lcuts);
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                Real a = xs[i], b = xs[i + 1];
                if (!(b - a > wtol)) continue;
                int l = detail::l_at(s, P((a + b) / 2));
                Mobius<Real> Q = detail::Cpow<Real>(l) * P;
                Real c = Q.c, d = Q.d;
                // |c x + d| < 1
                Real e1 = a, e2 = a;
                if (c != 0) {
                    Real u = (-1 - d) / c, v = (1 - d) / c;
                    e1 = std::max(a, std::min(u, v));
                    e2 = std::min(b, std::max(u, v));
                } else if (abs(d) < 1) {
                    e1 = a;
                    e2 = b;
                }
                if (e2 - e1 > wtol) out.pieces.push_back(EPiece<Real>{e1, e2, m + 1, c, d, w.chain});
                else e1 = e2 = a;
                std::vector<std::pair<Real, Real>> rem;
                if (e2 > e1) {
                    if (e1 - a > wtol) rem.push_back({a, e1});
                    if (b - e2 > wtol) rem.push_back({e2, b});
                } else {
                    rem.push_back({a, b});
                }
                for (auto [ra, rb] : rem) {
                    Real ya = P(ra), yb = P(rb);
                    int K = 1;
                    for (const Real& y : {ya, yb}) {
                        try {
                            K = std::max(K, std::abs(digit(s, y).k) + 1);
                        } catch (const pole_error&) {
                            throw expansive_inconclusive("non-expansive remainder reaches a pole");
                        }
                    }
                    if (K > 100000) throw expansive_inconclusive("non-expansive remainder too close to a pole");
                    auto bps = digit_breakpoints(s, K);
                    auto zs = detail::pull_cuts(P, ra, rb, bps);
                    for (std::size_t q = 0; q + 1 < zs.size(); ++q) {
                        Real za = zs[q], zb = zs[q + 1];
                        if (!(zb - za > wtol)) continue;
                        Digit dg = digit(s, P((za + zb) / 2));
                        auto chain = w.chain;
                        chain.push_back(digit_matrix(s.params, dg.k, dg.l) * P);
                        next.push_back(Work{za, zb, std::move(chain)});
                    }
                }
            }
        }
        queue = std::move(next);
        out.r = m + 1;
    }
    out.conclusive = queue.empty();
    std::sort(out.pieces.begin(), out.pieces.end(), [](const auto& p, const auto& q) { return p.a < q.a; });
    return out;
}

template <class Real>
Real abs_derivative(const IntervalSpec<Real>& s, const Real& x)
{
    int l = digit(s, x).l;
    Real u = l == 1 ? x : x - 1;
    return 1 / (u * u);
}

// least k with prod_{i<k} |T'(T^i x)| > 1
template <class Real>
int ell(const IntervalSpec<Real>& s, const Real& x, int cap = 64)
{
    Real prod = 1, y = x;
    for (int k = 1; k <= cap; ++k) {
        prod *= abs_derivative(s, y);
        if (prod > 1) return k;
        y = step(s, y);
    }
    throw expansive_inconclusive("expansion cap exceeded");
}

template <class Real>
Real U_apply(const IntervalSpec<Real>& s, const Real& x, int cap = 64)
{
    int k = ell(s, x, cap);
    Real y = x;
    for (int i = 0; i < k; ++i) y = step(s, y);
    return y;
}

namespace detail {

// A minus B as up to four rectangles
template <class Real>
void subtract(const Rect<Real>& A, const Rect<Real>& B, std::vector<Rect<Real>>& out, const Real& eps)
{
    using std::max;
    using std::min;
    Real ix1 = max(A.x1, B.x1), ix2 = min(A.x2, B.x2), iy1 = max(A.y1, B.y1), iy2 = min(A.y2, B.y2);
    if (!(ix2 - ix1 > eps && iy2 - iy1 > eps)) {
        out.push_back(A);
        return;
    }
    auto push = [&](Real x1, Real x2, Real y1, Real y2) {
        if (x2 - x1 > eps && y2 - y1 > eps) out.push_back(Rect<Real>{x1, x2, y1, y2, A.tag});
    };
    push(A.x1, ix1, A.y1, A.y2);
    push(ix2, A.x2, A.y1, A.y2);
    push(ix1, ix2, A.y1, iy1);
    push(ix1, ix2, iy2, A.y2);
}

} // namespace detail

// Images T^j(E_k cap Omega), 1 <= j < k
template <class Real>
std::vector<Rect<Real>> deleted_images(const Domain<Real>& D, const ExpansivePartition<Real>& P)
{
    std::vector<Rect<Real>> out;
    for (const auto& p : P.pieces) {
        if (p.k < 2) continue;
        auto base = detail::clip_x(D.rects(), p.a, p.b);
        for (int j = 1; j < p.k; ++j) {
            const Mobius<Real>& M = p.chain[j];
            Mobius<Real> N = conj_by_R(M);
            for (const auto& r : base) {
                Real x1 = M(r.x1), x2 = M(r.x2), y1 = N(r.y1), y2 = N(r.y2);
                out.push_back(Rect<Real>{std::min(x1, x2), std::max(x1, x2), std::min(y1, y2), std::max(y1, y2),
                                         "T^" + std::to_string(j) + "(E" + std::to_string(p.k) + ")"});
            }
        }
    }
    return out;
}

// F = Omega minus the images of E_k under T^1..T^{k-1}
template <class Real>
Domain<Real> induced_domain(const Domain<Real>& D, const IntervalSpec<Real>& s, const ExpansivePartition<Real>& P)
{
    if (!P.conclusive) throw expansive_inconclusive("expansivity power not established");
    bool full_in_E1 = false;
    for (const auto& c : cylinder_partition(s, 8)) {
        if (c.tail || !cylinder_bounds(s, c.d).full) continue;
        for (const auto& p : P.pieces)
            if (p.k == 1 && p.a <= c.lo && c.hi <= p.b) full_in_E1 = true;
    }
    if (!full_in_E1) throw std::invalid_argument("E_1 contains no full cylinder");
    Domain<Real> F = D;
    F.kind = DomainKind::custom;
    F.interval.reset();
    if (P.r == 1) {
        F.log.push_back("expansive: F = Omega");
        return F;
    }
    const Real eps = Real(1e-14) * s.t();
    auto del = deleted_images(D, P);
    std::vector<Rect<Real>> cur = D.rects();
    for (const auto& B : del) {
        std::vector<Rect<Real>> nxt;
        for (const auto& A : cur) detail::subtract(A, B, nxt, eps);
        cur = std::move(nxt);
    }
    F.upper.clear();
    F.lower.clear();
    for (auto& r : cur) (r.y1 >= 0 ? F.upper : F.lower).push_back(r);
    // removed images should be disjoint: compare their total mass with what actually went
    Real removed = 0;
    for (const auto& B : del) removed += mass_inside(B, D);
    Real went = mu_domain(D).mass - mu_domain(F).mass;
    using std::abs;
    F.residual = abs(removed - went);
    F.approximate = D.approximate || F.residual > Real(1e-9);
    F.log.push_back("induced: " + std::to_string(del.size()) + " deleted image rectangles");
    return F;
}

template <class Real>
struct AbramovResult {
    int r = 0;
    Real mass_F{0};
    Real induced_integral{0};
    Real rohlin{0};
    Real residual{0};
    Real error{0};
};

template <class Real>
AbramovResult<Real> abramov_check(const Domain<Real>& D, const Domain<Real>& F, const IntervalSpec<Real>& s,
                                  const ExpansivePartition<Real>& P)
{
    AbramovResult<Real> a;
    a.r = P.r;
    auto e = rohlin_integral(D, s);
    a.rohlin = e.integral;
    a.mass_F = mu_domain(F).mass;
    if (P.r == 1) {
        a.induced_integral = e.integral;
        a.residual = 0;
        a.error = e.quad_error;
        return a;
    }
    std::vector<LogPiece<Real>> lp;
    for (const auto& p : P.pieces) lp.push_back(LogPiece<Real>{p.a, p.b, p.c, p.d});
    auto I = integrate_log_pieces(F.rects(), lp);
    a.induced_integral = I.value;
    a.residual = I.value - e.integral;
    a.error = I.error + e.quad_error + F.residual;
    return a;
}

template <class Real>
struct PartitionLawReport {
    long checked = 0;
    long skipped = 0;  // within tolerance of a piece boundary
    long bad_index = 0;  // ell(x) differs from the piece index
    long bad_forward = 0;  // T(E_k) not inside the union of E_i, i < k
    long bad_last = 0;  // T^{k-1}(E_k) not inside E_1
    long over_r = 0;  // ell(x) > r
    long not_expanding = 0;  // |U'(x)| <= 1
    bool ok() const { return bad_index + bad_forward + bad_last + over_r + not_expanding == 0; }
};

template <class Real>
PartitionLawReport<Real> check_partition_laws(const IntervalSpec<Real>& s, const ExpansivePartition<Real>& P, long samples,
                                              std::uint64_t seed)
{
    using std::abs;
    PartitionLawReport<Real> rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Real guard = Real(1e-9) * s.t();
    auto near_edge = [&](const Real& x) {
        for (const auto& p : P.pieces)
            if (abs(x - p.a) < guard || abs(x - p.b) < guard) return true;
        return false;
    };
    for (long i = 0; i < samples; ++i) {
        Real x = s.ell0 + Real(U(rng)) * s.t();
        if (near_edge(x)) {
            ++rep.skipped;
            continue;
        }
        int k = P.index_of(x);
        int l;
        try {
            l = ell(s, x);
        } catch (const std::exception&) {
            ++rep.skipped;
            continue;
        }
        ++rep.checked;
        if (k != l) ++rep.bad_index;
        if (l > P.r) ++rep.over_r;
        Real y = x, prod = 1;
        for (int j = 0; j < l; ++j) {
            prod *= abs_derivative(s, y);
            y = step(s, y);
            if (j == 0 && l >= 2) {
                int kt = P.index_of(y);
                if (!near_edge(y) && !(kt >= 1 && kt < l)) ++rep.bad_forward;
            }
            if (j == l - 2 && l >= 2) {
                if (!near_edge(y) && P.index_of(y) != 1) ++rep.bad_last;
            }
        }
        if (!(prod > 1)) ++rep.not_expanding;
    }
    return rep;
}

// Fraction of mu-sampled points of F cap E_k whose first return to F happens at step k.
template <class Real>
Real first_return_fraction(const Domain<Real>& F, const IntervalSpec<Real>& s, const ExpansivePartition<Real>& P,
                           long samples, std::uint64_t seed)
{
    auto rects = F.rects();
    std::vector<double> w;
    for (const auto& r : rects) w.push_back(to_double(mu_rect(r)));
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const Real tol = Real(1e-9) * s.t();
    long good = 0, used = 0;
    for (long i = 0; i < samples; ++i) {
        auto [x, y] = sample_rect(rects[pick(rng)], rng);
        int k = P.index_of(x);
        if (k == 0) continue;
        ++used;
        Real u = x, v = y;
        int ret = 0;
        try {
            for (int j = 1; j <= P.r + 1; ++j) {
                std::tie(u, v) = planar_apply(s, u, v);
                if (domain_contains(F, u, v, -tol)) {
                    ret = j;
                    break;
                }
            }
        } catch (const pole_error&) {
        }
        if (ret == k) ++good;
    }
    return used ? Real(good) / Real(used) : Real(0);
}

} // namespace natext
