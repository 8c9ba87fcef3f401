#pragma once

#include <optional>
#include <string>

#include "words.hpp"

namespace natext {

struct invalid_candidate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Real>
struct SyncInterval {
    int k = 1;  // >= 1 small regime, <= -1 large regime
    Word v;
    Real zeta{0}, eta{0};
    std::optional<Real> delta;
    int Sunder = 0, Sbar = 0;
    int e = 0;  // (1,2) count of the r0 word, large regime
    DigitWord upper_word;  // r0 digits
    DigitWord lower_word;  // ell0 digits
    bool valid = false;
    std::string note;

    bool large() const { return k < 0; }
    Real left() const { return large() ? eta : zeta; }
    Real right() const { return large() ? zeta : eta; }
};

enum class SyncStatus { pass, fail, inconclusive };

inline const char* status_name(SyncStatus s)
{
    switch (s) {
    case SyncStatus::pass: return "pass";
    case SyncStatus::fail: return "fail";
    default: return "inconclusive";
    }
}

template <class Real>
struct SyncReport {
    Real alpha{0};
    Real lhs{0}, rhs{0}, diff{0};
    Real rounding{0};  // propagated rounding bound of the two orbit values
    int lhs_step = 0, rhs_step = 0;  // ell-index and r-index compared
    bool prefix_ok = false;
    SyncStatus status = SyncStatus::inconclusive;
    std::string message;
};

// Fixed point of M in [lo, hi]; the repelling one when two qualify.
template <class Real>
Real select_root(const Mobius<Real>& M, const Real& lo, const Real& hi, const char* what)
{
    using std::abs;
    Real tol = Real(1e-10) * (1 + std::max(abs(lo), abs(hi)));
    auto fps = fixed_points(M);
    std::vector<FixedPoint<Real>> in;
    for (auto& f : fps)
        if (f.root >= lo - tol && f.root <= hi + tol) in.push_back(f);
    if (in.empty()) throw invalid_candidate(std::string("no fixed point in range for ") + what);
    for (auto& f : in)
        if (f.kind == FixedKind::parabolic) throw invalid_candidate(std::string("parabolic fixed point for ") + what);
    if (in.size() == 1) return in.front().root;
    for (auto& f : in)
        if (f.kind == FixedKind::repelling) return f.root;
    throw invalid_candidate(std::string("no repelling fixed point for ") + what);
}

template <class Real>
SyncInterval<Real> solve_small(const GroupParams<Real>& g, int k, const Word& v)
{
    if (k < 1) throw invalid_word("small regime needs k >= 1");
    check_structure(v);
    auto lm = landmarks(g);
    SyncInterval<Real> I;
    I.k = k;
    I.v = v;
    I.upper_word = digit_word_small(k, v);
    I.lower_word = digit_word_small_lower(g.n, k, v);
    I.Sbar = I.upper_word.length();
    I.Sunder = I.lower_word.length();
    Real hi = lm.gamma * g.t;
    Real rz = select_root(gen_A(g) * matrix_R_small(g, k, v), Real(0), hi, "zeta");
    Real re = select_root(matrix_L_small(g, k, v), Real(0), hi, "eta");
    I.zeta = rz / g.t;
    I.eta = re / g.t;
    if (!(I.zeta < I.eta)) throw invalid_candidate("solved zeta is not below eta");
    return I;
}

template <class Real>
SyncInterval<Real> solve_large(const GroupParams<Real>& g, int k, const Word& v)
{
    if (k < 1) throw invalid_word("large regime needs k >= 1 (level -k)");
    auto lm = landmarks(g);
    auto words = digit_word_large(k, v, g.n);
    SyncInterval<Real> I;
    I.k = -k;
    I.v = v;
    I.upper_word = words.upper;
    I.lower_word = words.lower;
    I.e = words.e;
    I.Sbar = words.upper.length();
    I.Sunder = words.lower.length();
    Mobius<Real> L = matrix_L_large(g, k, v);
    Mobius<Real> R = matrix_R_large(g, k, v);
    Mobius<Real> A = gen_A(g), C = gen_C<Real>();
    Real lo = lm.gamma * g.t;
    Real rz = select_root(L, lo, g.t, "zeta");
    Real re = select_root(A * C * R, lo, g.t, "eta");
    Real ld = select_root(C * L * A, (lm.gamma - 1) * g.t, Real(0), "delta");
    I.zeta = rz / g.t;
    I.eta = re / g.t;
    I.delta = ld / g.t + 1;
    if (!(I.eta < *I.delta && *I.delta < I.zeta)) throw invalid_candidate("solved endpoints are not ordered eta < delta < zeta");
    return I;
}

template <class Real>
SyncInterval<Real> solve(const GroupParams<Real>& g, int k, const Word& v)
{
    return k > 0 ? solve_small(g, k, v) : solve_large(g, -k, v);
}

template <class Real>
bool prefix_matches(const std::vector<Digit>& digits, const DigitWord& w)
{
    if (digits.size() < w.symbols.size()) return false;
    return std::equal(w.symbols.begin(), w.symbols.end(), digits.begin());
}

template <class Real>
SyncReport<Real> verify_sync(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& alpha,
                             Real tol = Real(1e-9))
{
    using std::abs;
    SyncReport<Real> rep;
    rep.alpha = alpha;
    auto s = make_spec(g, alpha);
    int li = I.Sunder + 1, rj = I.Sbar + 1;
    if (I.large()) {
        if (abs(alpha - *I.delta) < Real(1e-12)) {
            rep.message = "alpha coincides with the division point";
            return rep;
        }
        if (alpha > *I.delta) rj = I.Sbar + 2;
    }
    auto ol = orbit(s, s.ell0, li);
    auto orr = orbit(s, s.r0, rj);
    if (static_cast<int>(ol.points.size()) <= li || static_cast<int>(orr.points.size()) <= rj) {
        rep.message = "orbit stopped at a pole before the matching step";
        return rep;
    }
    rep.lhs_step = li;
    rep.rhs_step = rj;
    rep.lhs = ol.points[li];
    rep.rhs = orr.points[rj];
    rep.diff = abs(rep.lhs - rep.rhs);
    rep.prefix_ok = prefix_matches<Real>(orr.digits, I.upper_word) && prefix_matches<Real>(ol.digits, I.lower_word);
    rep.rounding = ol.err[li] + orr.err[rj];
    bool ok = rep.diff <= tol * (1 + abs(rep.lhs)) + 16 * rep.rounding && rep.prefix_ok;
    rep.status = ok ? SyncStatus::pass : SyncStatus::fail;
    if (!rep.prefix_ok) rep.message = "digit prefix differs from the predicted word";
    return rep;
}

template <class Real>
std::vector<Real> interior_points(const SyncInterval<Real>& I)
{
    using std::abs;
    Real a = I.left(), b = I.right();
    std::vector<Real> out;
    for (double f : {0.25, 0.5, 0.75}) {
        Real x = a + (b - a) * Real(f);
        if (I.delta && abs(x - *I.delta) < (b - a) * Real(1e-3)) x += (b - a) * Real(0.01);
        out.push_back(x);
    }
    return out;
}

// verify_sync, nudging alpha off points whose endpoint orbit lands on a pole
template <class Real>
SyncReport<Real> verify_sync_near(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& alpha)
{
    Real w = I.right() - I.left();
    SyncReport<Real> r = verify_sync(g, I, alpha);
    for (double h : {0.0123, -0.0117, 0.0311}) {
        if (r.status != SyncStatus::inconclusive) break;
        r = verify_sync(g, I, alpha + w * Real(h));
    }
    return r;
}

template <class Real>
SyncInterval<Real>& certify(const GroupParams<Real>& g, SyncInterval<Real>& I)
{
    I.valid = true;
    for (const Real& a : interior_points(I)) {
        auto r = verify_sync_near(g, I, a);
        if (r.status != SyncStatus::pass) {
            I.valid = false;
            I.note = "synchronization check failed at alpha=" + to_string(a) + ": " + r.message;
            break;
        }
    }
    if (I.valid && !I.v.is_palindrome()) I.note = "certified word is not a palindrome";
    return I;
}

template <class Real>
SyncInterval<Real> solve_and_certify(const GroupParams<Real>& g, int k, const Word& v)
{
    auto I = solve(g, k, v);
    certify(g, I);
    return I;
}

template <class Real>
bool in_closure(const SyncInterval<Real>& I, const Real& alpha, Real tol = Real(1e-12))
{
    return alpha >= I.left() - tol && alpha <= I.right() + tol;
}

// Matching interval containing alpha, read off from the endpoint orbits.
template <class Real>
std::optional<SyncInterval<Real>> locate_once(const GroupParams<Real>& g, const Real& alpha, int nmax)
{
    using std::abs;
    if (!(alpha > 0 && alpha < 1)) return std::nullopt;
    auto s = make_spec(g, alpha);
    auto lm = landmarks(g);
    auto ol = orbit(s, s.ell0, nmax);
    auto orr = orbit(s, s.r0, nmax);
    Real tol = Real(1e-9) * g.t;
    int fi = -1, fj = -1;
    for (size_t i = 0; i < ol.points.size() && fi < 0; ++i)
        for (size_t j = 0; j < orr.points.size(); ++j) {
            if (i == 0 && j == 0) continue;
            Real rnd = 16 * (ol.err[i] + orr.err[j]);
            if (rnd > Real(1e-7) * g.t) continue;
            if (abs(ol.points[i] - orr.points[j]) < tol + rnd) {
                fi = static_cast<int>(i);
                fj = static_cast<int>(j);
                break;
            }
        }
    if (fi < 1) return std::nullopt;
    std::vector<int> ks;
    try {
        if (alpha < lm.gamma) {
            if (fj < 2) return std::nullopt;
            for (int j = 0; j < fj - 1; ++j) ks.push_back(orr.digits[j].k);
            auto kv = word_from_runs(ks);
            if (!kv || kv->first < 1) return std::nullopt;
            auto I = solve_small(g, kv->first, kv->second);
            if (I.Sunder != fi - 1 || !in_closure(I, alpha, Real(1e-9))) return std::nullopt;
            return I;
        }
        for (int i = 0; i < fi - 1; ++i) {
            if (ol.digits[i].l != 1) return std::nullopt;
            ks.push_back(-ol.digits[i].k);
        }
        auto kv = word_from_runs(ks);
        if (!kv || kv->first < 1) return std::nullopt;
        auto I = solve_large(g, kv->first, kv->second);
        if (!in_closure(I, alpha, Real(1e-9))) return std::nullopt;
        return I;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

template <class Real>
std::optional<SyncInterval<Real>> locate(const GroupParams<Real>& g, const Real& alpha, int nmax = 256)
{
    std::optional<SyncInterval<Real>> I = locate_once(g, alpha, nmax);
    if (!I) {
        for (double h : {1e-9, -1e-9, 1e-7, -1e-7, 1e-5, -1e-5}) {
            I = locate_once(g, alpha + Real(h), nmax);
            if (I && in_closure(*I, alpha, Real(1e-12))) break;
            I.reset();
        }
    }
    if constexpr (std::is_same_v<Real, double>) {
        if (!I) {
            auto gq = group_params<quad>(g.n);
            auto Iq = locate(gq, quad(alpha), nmax);
            if (Iq) I = solve(g, Iq->k, Iq->v);
        }
    }
    if (I) certify(g, *I);
    return I;
}

} // namespace natext
