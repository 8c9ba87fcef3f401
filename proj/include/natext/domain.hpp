#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rect.hpp"
#include "sync.hpp"

namespace natext {

struct construction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DomainKind { interior_small, zeta_small, eta_small, large_left, large_right, delta, endpoint_large, sweep, custom };

inline const char* kind_name(DomainKind k)
{
    switch (k) {
    case DomainKind::interior_small: return "interior-small";
    case DomainKind::zeta_small: return "zeta-small";
    case DomainKind::eta_small: return "eta-small";
    case DomainKind::large_left: return "large-left";
    case DomainKind::large_right: return "large-right";
    case DomainKind::delta: return "delta";
    case DomainKind::endpoint_large: return "endpoint-large";
    case DomainKind::sweep: return "sweep";
    default: return "custom";
    }
}

inline DomainKind parse_kind(const std::string& s)
{
    for (auto k : {DomainKind::interior_small, DomainKind::zeta_small, DomainKind::eta_small, DomainKind::large_left,
                   DomainKind::large_right, DomainKind::delta, DomainKind::endpoint_large, DomainKind::sweep,
                   DomainKind::custom})
        if (s == kind_name(k)) return k;
    throw std::invalid_argument("unknown domain kind '" + s + "'");
}

template <class Real>
struct Domain {
    int n = 3;
    Real alpha{0};
    DomainKind kind = DomainKind::custom;
    std::vector<Rect<Real>> upper;  // [x1,x2] x [0,y]
    std::vector<Rect<Real>> lower;  // [x1,x2] x [y,0]
    std::optional<SyncInterval<Real>> interval;
    bool approximate = false;
    bool converged = true;
    Real residual{0};  // estimated missing mass of an approximate domain
    int iterations = 0;
    std::vector<std::string> log;

    std::vector<Rect<Real>> rects() const
    {
        std::vector<Rect<Real>> out = upper;
        out.insert(out.end(), lower.begin(), lower.end());
        return out;
    }
    size_t size() const { return upper.size() + lower.size(); }
};

template <class Real>
DomainKind resolve_kind(const SyncInterval<Real>& I, const Real& alpha, Real tol = Real(1e-12))
{
    using std::abs;
    if (!in_closure(I, alpha, tol)) throw std::out_of_range("alpha " + to_string(alpha) + " is outside the closure of the interval");
    if (!I.large()) {
        if (abs(alpha - I.zeta) <= tol) return DomainKind::zeta_small;
        if (abs(alpha - I.eta) <= tol) return DomainKind::eta_small;
        return DomainKind::interior_small;
    }
    if (abs(alpha - *I.delta) <= tol) return DomainKind::delta;
    if (abs(alpha - I.eta) <= tol || abs(alpha - I.zeta) <= tol) return DomainKind::endpoint_large;
    return alpha < *I.delta ? DomainKind::large_left : DomainKind::large_right;
}

namespace detail {

template <class Real>
std::vector<int> ascending_order(const std::vector<Real>& v)
{
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    return idx;
}

template <class Real>
void check_same_order(const std::vector<Real>& a, const std::vector<Real>& b, const Real& tol, const char* what)
{
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j)
            if (a[i] < a[j] - tol && b[i] > b[j] + tol)
                throw construction_error(std::string("orbit order at alpha differs from the endpoint orbit order (") + what + ")");
}

inline std::string idx_name(char c, int i) { return std::string(1, c) + std::to_string(i); }

} // namespace detail

template <class Real>
Mobius<Real> C2() { return gen_C<Real>() * gen_C<Real>(); }

// Closed-form domain on the closure of a matching interval.
template <class Real>
Domain<Real> build_closed_form(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& alpha)
{
    using std::abs;
    DomainKind kind = resolve_kind(I, alpha);
    auto s = make_spec(g, alpha);
    Domain<Real> D;
    D.n = g.n;
    D.alpha = alpha;
    D.kind = kind;
    D.interval = I;
    const Real drop = Real(1e-12) * g.t;
    const Real E = I.large() ? I.eta : I.zeta;  // endpoint carrying the upper heights

    const auto& lw = I.lower_word.symbols;
    const auto& rw = I.upper_word.symbols;
    auto ell = orbit_by_word(g, s.ell0, lw);
    auto ellE = orbit_by_word(g, (E - 1) * g.t, lw);
    auto r = orbit_by_word(g, s.r0, rw);
    auto rEta = orbit_by_word(g, I.eta * g.t, rw);
    const int Su = I.Sunder, Sb = I.Sbar;

    if (!I.large()) detail::check_same_order(ell, ellE, Real(1e-9) * g.t, "upper");

    auto add = [&](std::vector<Rect<Real>>& part, Rect<Real> R) {
        if (R.width() < drop || R.height() < drop) {
            D.log.push_back("dropped degenerate rectangle " + R.tag);
            return;
        }
        part.push_back(R);
    };

    // upper part
    auto up = detail::ascending_order(ell);
    for (int a = 0; a <= Su; ++a) {
        int i = up[a];
        Real x2 = a < Su ? ell[up[a + 1]] : s.r0;
        Real y = -ellE[Su - i];
        std::string tag = "K" + std::to_string(a + 1) + " x=[" + detail::idx_name('l', i) + "," +
                          (a < Su ? detail::idx_name('l', up[a + 1]) : std::string("r0")) + "] y=-" +
                          detail::idx_name('l', Su - i) + (I.large() ? "(eta)" : "(zeta)");
        add(D.upper, Rect<Real>{ell[i], x2, Real(0), y, tag});
    }

    // lower part: labels j_{-1}, j_{-2}, ... by descending r
    auto asc = detail::ascending_order(r);
    std::vector<int> jl(asc.rbegin(), asc.rend());  // jl[m-1] = j_{-m}
    auto j_of = [&](int b) { return jl[-b - 1]; };  // b = -1 .. -Sb-1

    std::vector<Real> yb(Sb + 2);  // yb[-b]
    std::vector<std::string> ytag(Sb + 2);
    if (!I.large()) {
        for (int b = -1; b >= -Sb - 1; --b) {
            int j = j_of(b);
            yb[-b] = -rEta[Sb - j];
            ytag[-b] = "-" + detail::idx_name('r', Sb - j) + "(eta)";
        }
    } else {
        Mobius<Real> C = gen_C<Real>();
        std::vector<Real> rhat(Sb + 1);
        for (int i = 0; i < Sb; ++i) rhat[i] = rw[i].l == 2 ? C(rEta[i]) : rEta[i];
        rhat[Sb] = 1 / (1 - (I.eta - 1) * g.t);
        const int e = I.e;
        for (int b = -1; b >= -Sb - 1; --b) {
            int m = b >= -e ? -(b + e + 1) : -(b + e + Sb + 2);
            int j = j_of(m);
            yb[-b] = -rhat[j];
            ytag[-b] = "-rhat" + std::to_string(j) + "(eta)";
        }
    }

    bool right = kind == DomainKind::large_right || (kind == DomainKind::endpoint_large && alpha > *I.delta);
    Real rnext{0};
    if (right) rnext = (gen_A(g) * C2<Real>())(r[Sb]);

    for (int b = -1; b >= -Sb - 1; --b) {
        Real x2 = r[j_of(b)];
        Real x1 = b > -Sb - 1 ? r[j_of(b - 1)] : (right ? rnext : s.ell0);
        std::string tag = "L" + std::to_string(b) + " x=[" +
                          (b > -Sb - 1 ? detail::idx_name('r', j_of(b - 1)) : std::string(right ? "r" + std::to_string(Sb + 1) : "l0")) +
                          "," + detail::idx_name('r', j_of(b)) + "] y=" + ytag[-b];
        add(D.lower, Rect<Real>{x1, x2, yb[-b], Real(0), tag});
    }
    if (right) {
        int bS = 0;
        for (int b = -1; b >= -Sb - 1; --b)
            if (j_of(b) == Sb) bS = b;
        Real y = conj_by_R(gen_A(g) * C2<Real>())(yb[-bS]);
        add(D.lower, Rect<Real>{s.ell0, rnext, y, Real(0),
                                "L" + std::to_string(-Sb - 2) + " x=[l0,r" + std::to_string(Sb + 1) + "] y=RAC^2R^-1 y" + std::to_string(bS)});
    }
    auto byx = [](const Rect<Real>& p, const Rect<Real>& q) { return p.x1 < q.x1; };
    std::sort(D.upper.begin(), D.upper.end(), byx);
    std::sort(D.lower.begin(), D.lower.end(), byx);
    return D;
}

template <class Real>
Domain<Real> build_small_interior(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& alpha)
{
    if (I.large()) throw std::invalid_argument("interval is in the large regime");
    auto D = build_closed_form(g, I, alpha);
    if (D.kind != DomainKind::interior_small) throw std::out_of_range("alpha is not interior to the interval");
    return D;
}

template <class Real>
Domain<Real> build_small_zeta(const GroupParams<Real>& g, const SyncInterval<Real>& I)
{
    if (I.large()) throw std::invalid_argument("interval is in the large regime");
    return build_closed_form(g, I, I.zeta);
}

template <class Real>
Domain<Real> build_small_eta(const GroupParams<Real>& g, const SyncInterval<Real>& I)
{
    if (I.large()) throw std::invalid_argument("interval is in the large regime");
    return build_closed_form(g, I, I.eta);
}

template <class Real>
Domain<Real> build_large(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& alpha)
{
    if (!I.large()) throw std::invalid_argument("interval is in the small regime");
    return build_closed_form(g, I, alpha);
}

// ---- sweep ----

// Fibers [lo_i, hi_i] (lo <= 0 <= hi) over [xs_i, xs_{i+1}).
template <class Real>
struct StepDomain {
    std::vector<Real> xs;
    std::vector<Real> hi, lo;

    size_t pieces() const { return hi.size(); }
};

template <class Real>
Real step_mass(const StepDomain<Real>& S)
{
    Real m{0};
    for (size_t i = 0; i < S.pieces(); ++i) {
        m += mu_rect(Rect<Real>{S.xs[i], S.xs[i + 1], Real(0), S.hi[i]});
        m += mu_rect(Rect<Real>{S.xs[i], S.xs[i + 1], S.lo[i], Real(0)});
    }
    return m;
}

template <class Real>
StepDomain<Real> make_step(const std::vector<Real>& xs, const std::vector<std::pair<Real, Real>>& fibers)
{
    StepDomain<Real> S;
    S.xs = xs;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] < xs[i + 1])) throw construction_error("seed breakpoints are not increasing");
        S.lo.push_back(std::min(fibers[i].first, Real(0)));
        S.hi.push_back(std::max(fibers[i].second, Real(0)));
    }
    return S;
}

template <class Real>
StepDomain<Real> seed_Z(const IntervalSpec<Real>& s)
{
    Digit d0 = digit(s, s.r0);
    int k = d0.k;
    if (d0.l != 1) {
        // gamma itself: C r0 sits on ell0, use the left-limit digit
        using std::ceil;
        Real y = (s.r0 - 1) / s.r0;
        k = static_cast<int>(to_double(ceil((s.ell0 - y) / s.t() + Real(1e-9))));
    }
    auto lam = cylinder_bounds(s, Digit{-3, 1});
    auto rho = cylinder_bounds(s, Digit{k + 2, 1});
    if (lam.empty || rho.empty) throw construction_error("seed cylinders are empty");
    Real phl = -s.r0, phh = -s.ell0;
    return make_step<Real>({s.ell0, lam.lambda, rho.rho, s.r0},
                           {{phl, -lam.lambda}, {phl, phh}, {-rho.rho, phh}});
}

template <class Real>
StepDomain<Real> seed_W(const IntervalSpec<Real>& s)
{
    Digit d0 = digit(s, s.ell0);
    if (d0.l != 1 || d0.k > -1) throw construction_error("left endpoint digit is not of the form (-k,1)");
    int k = -d0.k;
    Real b = frak_b(s);
    auto mu = [&](int d) { return 1 / (1 - b - Real(d) * s.t()); };
    Real ell1 = step(s, s.ell0);
    auto lam = cylinder_bounds(s, Digit{-k - 2, 1});
    auto r21 = cylinder_bounds(s, Digit{2, 1});
    auto r22 = cylinder_bounds(s, Digit{2, 2});
    if (lam.empty || r21.empty || r22.empty) throw construction_error("seed cylinders are empty");
    Real Cr0 = (s.r0 - 1) / s.r0;
    return make_step<Real>({s.ell0, ell1, lam.lambda, r21.rho, r22.rho, s.r0},
                           {{-b, -mu(k + 1)}, {-b, -mu(k)}, {-b, -s.ell0}, {-Cr0, -s.ell0}, {-r21.rho, -s.ell0}});
}

enum class SeedKind { small, large };

template <class Real>
struct SweepOptions {
    int max_iter = 400;
    Real mass_tol = Real(1e-10);
    size_t max_pieces = 6000;
};

namespace detail {

template <class Real>
void merge_equal(StepDomain<Real>& S, const Real& snap)
{
    using std::abs;
    StepDomain<Real> out;
    out.xs.push_back(S.xs.front());
    for (size_t i = 0; i < S.pieces(); ++i) {
        if (S.xs[i + 1] - out.xs.back() <= snap && i + 1 < S.pieces()) {
            // sliver: absorb into the next piece conservatively
            S.hi[i + 1] = std::min(S.hi[i + 1], S.hi[i]);
            S.lo[i + 1] = std::max(S.lo[i + 1], S.lo[i]);
            continue;
        }
        if (!out.hi.empty() && abs(out.hi.back() - S.hi[i]) <= snap && abs(out.lo.back() - S.lo[i]) <= snap) {
            out.hi.back() = std::min(out.hi.back(), S.hi[i]);
            out.lo.back() = std::max(out.lo.back(), S.lo[i]);
            out.xs.back() = S.xs[i + 1];
            continue;
        }
        out.hi.push_back(S.hi[i]);
        out.lo.push_back(S.lo[i]);
        out.xs.push_back(S.xs[i + 1]);
    }
    S = std::move(out);
}

// Merge neighbours with the smallest fiber difference until under the cap (inner approximation).
template <class Real>
void coarsen(StepDomain<Real>& S, size_t cap)
{
    using std::abs;
    while (S.pieces() > cap) {
        std::vector<Real> diffs;
        for (size_t i = 0; i + 1 < S.pieces(); ++i)
            diffs.push_back(abs(S.hi[i] - S.hi[i + 1]) + abs(S.lo[i] - S.lo[i + 1]));
        std::vector<Real> sorted = diffs;
        size_t target = S.pieces() - cap;
        std::nth_element(sorted.begin(), sorted.begin() + std::min(target, sorted.size() - 1), sorted.end());
        Real thr = sorted[std::min(target, sorted.size() - 1)];
        StepDomain<Real> out;
        out.xs.push_back(S.xs.front());
        out.hi.push_back(S.hi[0]);
        out.lo.push_back(S.lo[0]);
        out.xs.push_back(S.xs[1]);
        for (size_t i = 1; i < S.pieces(); ++i) {
            if (diffs[i - 1] <= thr && out.pieces() > 0 && target > 0) {
                out.hi.back() = std::min(out.hi.back(), S.hi[i]);
                out.lo.back() = std::max(out.lo.back(), S.lo[i]);
                out.xs.back() = S.xs[i + 1];
                --target;
                continue;
            }
            out.hi.push_back(S.hi[i]);
            out.lo.push_back(S.lo[i]);
            out.xs.push_back(S.xs[i + 1]);
        }
        S = std::move(out);
    }
}

} // namespace detail

template <class Real>
int sweep_cutoff(const StepDomain<Real>& S, const Real& t)
{
    using std::ceil;
    Real maxY{0}, minH = std::numeric_limits<Real>::max();
    for (size_t i = 0; i < S.pieces(); ++i) {
        maxY = std::max({maxY, S.hi[i], -S.lo[i]});
        minH = std::min({minH, S.hi[i], -S.lo[i]});
    }
    if (!(minH > 0)) minH = Real(1e-3);
    Real K = ceil((2 + 2 * maxY + 1 / minH) / t) + 3;
    return std::min(static_cast<int>(to_double(K)), 4000);
}

// One forward pass: S union hull(T(S)).
template <class Real>
StepDomain<Real> sweep_pass(const IntervalSpec<Real>& s, const StepDomain<Real>& S,
                            const std::vector<CylinderPiece<Real>>& cyl, size_t cap)
{
    const Real snap = Real(1e-11) * s.t();
    struct Img { Real x1, x2, y1, y2; };
    std::vector<Img> imgs;
    size_t c = 0;
    for (size_t i = 0; i < S.pieces(); ++i) {
        while (c < cyl.size() && cyl[c].hi <= S.xs[i]) ++c;
        for (size_t q = c; q < cyl.size() && cyl[q].lo < S.xs[i + 1]; ++q) {
            if (cyl[q].tail) continue;
            Real a = std::max(S.xs[i], cyl[q].lo), b = std::min(S.xs[i + 1], cyl[q].hi);
            if (b - a <= snap) continue;
            Mobius<Real> M = digit_matrix(s.params, cyl[q].d.k, cyl[q].d.l);
            Mobius<Real> N = conj_by_R(M);
            Img im{std::max(M(a), s.ell0), std::min(M(b), s.r0), N(S.lo[i]), N(S.hi[i])};
            if (im.x2 - im.x1 > snap) imgs.push_back(im);
        }
    }
    std::vector<Real> xs = S.xs;
    for (auto& im : imgs) {
        xs.push_back(im.x1);
        xs.push_back(im.x2);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Real> ux;
    for (auto& x : xs)
        if (ux.empty() || x - ux.back() > snap) ux.push_back(x);
    ux.back() = s.r0;
    ux.front() = s.ell0;

    StepDomain<Real> out;
    out.xs = ux;
    out.hi.resize(ux.size() - 1);
    out.lo.resize(ux.size() - 1);
    size_t p = 0;
    for (size_t i = 0; i + 1 < ux.size(); ++i) {
        Real mid = (ux[i] + ux[i + 1]) / 2;
        while (p + 1 < S.pieces() && S.xs[p + 1] <= mid) ++p;
        out.hi[i] = S.hi[p];
        out.lo[i] = S.lo[p];
    }
    for (auto& im : imgs) {
        size_t i0 = std::lower_bound(ux.begin(), ux.end(), im.x1 - snap) - ux.begin();
        for (size_t i = i0; i + 1 < ux.size() && ux[i + 1] <= im.x2 + snap; ++i) {
            if (im.y2 > 0) out.hi[i] = std::max(out.hi[i], im.y2);
            if (im.y1 < 0) out.lo[i] = std::min(out.lo[i], im.y1);
        }
    }
    detail::merge_equal(out, snap);
    detail::coarsen(out, cap);
    return out;
}

template <class Real>
Domain<Real> step_to_domain(const IntervalSpec<Real>& s, const StepDomain<Real>& S)
{
    Domain<Real> D;
    D.n = s.params.n;
    D.alpha = s.alpha;
    D.kind = DomainKind::sweep;
    const Real drop = Real(1e-12) * s.t();
    for (size_t i = 0; i < S.pieces(); ++i) {
        if (S.xs[i + 1] - S.xs[i] < drop) continue;
        if (S.hi[i] > drop) D.upper.push_back(Rect<Real>{S.xs[i], S.xs[i + 1], Real(0), S.hi[i], "sweep"});
        if (-S.lo[i] > drop) D.lower.push_back(Rect<Real>{S.xs[i], S.xs[i + 1], S.lo[i], Real(0), "sweep"});
    }
    return D;
}

template <class Real>
Domain<Real> build_sweep(const IntervalSpec<Real>& s, SeedKind seed, const SweepOptions<Real>& opt = {})
{
    using std::abs;
    StepDomain<Real> S = seed == SeedKind::small ? seed_Z(s) : seed_W(s);
    Real mass = step_mass(S);
    Real prev_inc{-1}, inc{0}, ratio{0};
    int it = 0;
    bool conv = false;
    for (; it < opt.max_iter; ++it) {
        int K = sweep_cutoff(S, s.t());
        auto cyl = cylinder_partition(s, K);
        StepDomain<Real> next = sweep_pass(s, S, cyl, opt.max_pieces);
        Real m2 = step_mass(next);
        inc = m2 - mass;
        S = std::move(next);
        mass = m2;
        if (prev_inc > 0 && inc > 0) ratio = inc / prev_inc;
        prev_inc = inc;
        if (abs(inc) < opt.mass_tol) {
            conv = true;
            ++it;
            break;
        }
    }
    Domain<Real> D = step_to_domain(s, S);
    D.approximate = true;
    D.converged = conv;
    D.iterations = it;
    Real r = abs(inc);
    if (ratio > 0 && ratio < 1) r = abs(inc) * ratio / (1 - ratio);
    D.residual = std::max(r, abs(inc));
    if (!conv) D.log.push_back("sweep stopped at max_iter without meeting mass_tol");
    return D;
}

struct unresolved_alpha : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Real>
struct AutoOptions {
    bool allow_sweep = true;
    bool force_sweep = false;
    SweepOptions<Real> sweep;
};

// Closed form when alpha lies in a certified matching interval, sweep otherwise.
template <class Real>
Domain<Real> build_auto(const GroupParams<Real>& g, const Real& alpha, const AutoOptions<Real>& opt = {})
{
    if (!opt.force_sweep) {
        auto I = locate(g, alpha);
        if (I && I->valid) return build_closed_form(g, *I, alpha);
    }
    if (!opt.allow_sweep)
        throw unresolved_alpha("alpha " + to_string(alpha) + " is not in a certified matching interval; use the sweep");
    auto s = make_spec(g, alpha);
    Real gam = landmarks(g).gamma;
    SeedKind seed = alpha <= gam + Real(1e-12) ? SeedKind::small : SeedKind::large;
    return build_sweep(s, seed, opt.sweep);
}

// ---- checks ----

template <class Real>
bool heights_monotone(const Domain<Real>& D, Real tol = Real(1e-9))
{
    for (size_t i = 0; i + 1 < D.upper.size(); ++i)
        if (D.upper[i + 1].y2 < D.upper[i].y2 - tol) return false;
    for (size_t i = 0; i + 1 < D.lower.size(); ++i)
        if (D.lower[i + 1].y1 < D.lower[i].y1 - tol) return false;
    return true;
}

// largest uncovered gap of the x-projection inside [ell0, r0]
template <class Real>
Real projection_gap(const Domain<Real>& D, const Real& ell0, const Real& r0)
{
    std::vector<std::pair<Real, Real>> iv;
    for (auto& r : D.rects()) iv.push_back({r.x1, r.x2});
    std::sort(iv.begin(), iv.end());
    Real reach = ell0, gap{0};
    for (auto& p : iv) {
        if (p.first > reach) gap = std::max(gap, p.first - reach);
        reach = std::max(reach, p.second);
    }
    if (r0 > reach) gap = std::max(gap, r0 - reach);
    return gap;
}

// upper heights indexed 1..S+1 left to right and lower heights -1.. from the right
template <class Real>
std::vector<Real> upper_heights(const Domain<Real>& D)
{
    std::vector<Real> h;
    for (auto& r : D.upper) h.push_back(r.y2);
    return h;
}

template <class Real>
std::vector<Real> lower_heights(const Domain<Real>& D)
{
    std::vector<Real> h;
    for (auto it = D.lower.rbegin(); it != D.lower.rend(); ++it) h.push_back(it->y1);
    return h;
}

// ---- serialization ----

template <class Real>
nlohmann::json domain_to_json(const Domain<Real>& D)
{
    nlohmann::json j;
    j["format"] = "natext-domain";
    j["version"] = 1;
    j["n"] = D.n;
    j["alpha"] = to_string(D.alpha);
    j["kind"] = kind_name(D.kind);
    j["approximate"] = D.approximate;
    j["residual"] = to_string(D.residual);
    if (D.interval) {
        j["k"] = D.interval->k;
        j["v"] = format_word(D.interval->v);
    }
    auto rects = nlohmann::json::array();
    auto put = [&](const Rect<Real>& r, const char* part) {
        rects.push_back({{"part", part}, {"x1", to_string(r.x1)}, {"x2", to_string(r.x2)},
                         {"y1", to_string(r.y1)}, {"y2", to_string(r.y2)}, {"tag", r.tag}});
    };
    for (auto& r : D.upper) put(r, "upper");
    for (auto& r : D.lower) put(r, "lower");
    j["rects"] = rects;
    return j;
}

template <class Real>
Domain<Real> domain_from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "natext-domain") throw std::invalid_argument("not a domain record");
    if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported domain record version");
    Domain<Real> D;
    D.n = j.at("n").get<int>();
    D.alpha = parse_real<Real>(j.at("alpha").get<std::string>());
    D.kind = parse_kind(j.at("kind").get<std::string>());
    D.approximate = j.value("approximate", false);
    D.residual = parse_real<Real>(j.value("residual", std::string("0")));
    for (auto& r : j.at("rects")) {
        Rect<Real> R{parse_real<Real>(r.at("x1").get<std::string>()), parse_real<Real>(r.at("x2").get<std::string>()),
                     parse_real<Real>(r.at("y1").get<std::string>()), parse_real<Real>(r.at("y2").get<std::string>()),
                     r.value("tag", std::string())};
        (r.at("part").get<std::string>() == "upper" ? D.upper : D.lower).push_back(R);
    }
    return D;
}

template <class Real>
std::string domain_to_svg(const Domain<Real>& D, int width = 720)
{
    auto rs = D.rects();
    if (rs.empty()) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
    double X1 = 1e300, X2 = -1e300, Y1 = 1e300, Y2 = -1e300;
    for (auto& r : rs) {
        X1 = std::min(X1, to_double(r.x1));
        X2 = std::max(X2, to_double(r.x2));
        Y1 = std::min(Y1, to_double(r.y1));
        Y2 = std::max(Y2, to_double(r.y2));
    }
    const double pad = 40;
    double sc = (width - 2 * pad) / std::max(X2 - X1, 1e-9);
    int height = static_cast<int>((Y2 - Y1) * sc + 2 * pad);
    auto px = [&](double x) { return pad + (x - X1) * sc; };
    auto py = [&](double y) { return pad + (Y2 - y) * sc; };
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (auto& r : D.upper)
        os << "<rect x=\"" << px(to_double(r.x1)) << "\" y=\"" << py(to_double(r.y2)) << "\" width=\""
           << to_double(r.width()) * sc << "\" height=\"" << to_double(r.height()) * sc
           << "\" fill=\"#9ecae1\" stroke=\"#08519c\" stroke-width=\"0.5\"><title>" << r.tag << "</title></rect>\n";
    for (auto& r : D.lower)
        os << "<rect x=\"" << px(to_double(r.x1)) << "\" y=\"" << py(to_double(r.y2)) << "\" width=\""
           << to_double(r.width()) * sc << "\" height=\"" << to_double(r.height()) * sc
           << "\" fill=\"#fdae6b\" stroke=\"#a63603\" stroke-width=\"0.5\"><title>" << r.tag << "</title></rect>\n";
    os << "<line x1=\"" << px(X1) - 10 << "\" y1=\"" << py(0) << "\" x2=\"" << px(X2) + 10 << "\" y2=\"" << py(0)
       << "\" stroke=\"black\"/>\n";
    if (X1 < 0 && X2 > 0)
        os << "<line x1=\"" << px(0) << "\" y1=\"" << py(Y2) - 10 << "\" x2=\"" << px(0) << "\" y2=\"" << py(Y1) + 10
           << "\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& txt) {
        os << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" font-family=\"sans-serif\">" << txt << "</text>\n";
    };
    std::ostringstream a, b, c, d;
    a << std::setprecision(4) << X1;
    b << std::setprecision(4) << X2;
    c << std::setprecision(4) << Y2;
    d << std::setprecision(4) << Y1;
    label(px(X1) - 10, py(0) + 14, "x=" + a.str());
    label(px(X2) - 30, py(0) + 14, "x=" + b.str());
    label(px(X1) - 30 > 0 ? px(X1) - 30 : 2, py(Y2) + 4, "y=" + c.str());
    label(px(X1) - 30 > 0 ? px(X1) - 30 : 2, py(Y1) + 4, "y=" + d.str());
    std::ostringstream ttl;
    ttl << std::setprecision(8) << "n=" << D.n << " alpha=" << to_double(D.alpha) << " (" << kind_name(D.kind) << ")";
    label(pad, 16, ttl.str());
    os << "</svg>\n";
    return os.str();
}

} // namespace natext
