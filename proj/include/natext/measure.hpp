#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "domain.hpp"
#include "rect.hpp"

namespace natext {

template <class Real>
struct MassResult {
    Real mass{0};
    std::vector<Real> breakdown;
    bool infinite = false;
};

template <class Real>
MassResult<Real> mu_domain(const Domain<Real>& D)
{
    MassResult<Real> m;
    for (const auto& r : D.rects()) {
        try {
            Real v = mu_rect(r);
            m.breakdown.push_back(v);
            m.mass += v;
        } catch (const infinite_mass&) {
            m.infinite = true;
            m.breakdown.push_back(std::numeric_limits<Real>::infinity());
        }
    }
    if (m.infinite) m.mass = std::numeric_limits<Real>::infinity();
    return m;
}

// x-interval on which log|T'| (or log|U'|) is -2 log|c x + d|
template <class Real>
struct LogPiece {
    Real a{0}, b{0};
    Real c{0}, d{0};
};

template <class Real>
struct Integral {
    Real value{0};
    Real error{0};
    bool converged = true;
};

template <class Real>
Real quad_tolerance()
{
    if constexpr (std::is_same_v<Real, double>)
        return Real(1e-12);
    else
        return Real(1e-22);
}

template <class Real>
boost::math::quadrature::tanh_sinh<Real>& tanh_sinh_integrator()
{
    thread_local boost::math::quadrature::tanh_sinh<Real> ts(15);
    return ts;
}

// int over the rectangles of -2 log|c x + d| dmu, restricted piecewise
template <class Real>
Integral<Real> integrate_log_pieces(const std::vector<Rect<Real>>& rects, const std::vector<LogPiece<Real>>& pieces)
{
    using std::abs;
    using std::log;
    using std::max;
    using std::min;
    Integral<Real> out;
    auto& ts = tanh_sinh_integrator<Real>();
    for (const auto& r : rects) {
        if (!(r.y2 > r.y1)) continue;
        for (const auto& p : pieces) {
            Real a = max(r.x1, p.a), b = min(r.x2, p.b);
            if (!(b > a)) continue;
            Real pa = p.c * a + p.d, pb = p.c * b + p.d;
            // xc is the signed distance to the nearer endpoint (a - x on the left half)
            Real qa1 = 1 + a * r.y1, qa2 = 1 + a * r.y2, qb1 = 1 + b * r.y1, qb2 = 1 + b * r.y2;
            auto f = [&](Real, Real xc) -> Real {
                bool left = xc < 0;
                Real u = left ? abs(pa - p.c * xc) : abs(pb - p.c * xc);
                if (u == 0) return Real(0);
                Real q1 = (left ? qa1 : qb1) - xc * r.y1, q2 = (left ? qa2 : qb2) - xc * r.y2;
                return -2 * log(u) * (r.y2 - r.y1) / (q1 * q2);
            };
            Real err = 0, l1 = 0;
            std::size_t levels = 0;
            Real v;
            try {
                v = ts.integrate(f, a, b, quad_tolerance<Real>(), &err, &l1, &levels);
            } catch (const std::exception&) {
                out.converged = false;
                v = 0;
                err = std::numeric_limits<Real>::infinity();
            }
            out.value += v;
            out.error += err * (l1 > 0 ? l1 : Real(1));
        }
    }
    return out;
}

// Pieces of I on which the digit's l is constant, split at the poles 0 and 1.
template <class Real>
std::vector<LogPiece<Real>> tau_pieces(const IntervalSpec<Real>& s)
{
    std::vector<Real> cuts{s.ell0, s.r0};
    Real b = frak_b(s);
    for (Real c : {Real(0), Real(1), b, Real(1) / (1 - s.r0)})
        if (c > s.ell0 && c < s.r0) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    std::vector<LogPiece<Real>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Real a = cuts[i], e = cuts[i + 1];
        if (!(e - a > Real(1e-15) * s.t())) continue;
        Real m = (a + e) / 2;
        int l;
        try {
            l = digit(s, m).l;
        } catch (const pole_error&) {
            l = (m < Real(0.5)) ? 1 : 2;
        }
        if (l == 1)
            out.push_back({a, e, Real(1), Real(0)});
        else
            out.push_back({a, e, Real(1), Real(-1)});
    }
    return out;
}

template <class Real>
struct EntropyResult {
    Real integral{0};
    Real mass{0};
    Real entropy{0};
    Real quad_error{0};
    bool infinite_mass = false;
    bool converged = true;
};

template <class Real>
EntropyResult<Real> rohlin_integral(const std::vector<Rect<Real>>& rects, const IntervalSpec<Real>& s)
{
    EntropyResult<Real> e;
    auto I = integrate_log_pieces(rects, tau_pieces(s));
    e.integral = I.value;
    e.quad_error = I.error;
    e.converged = I.converged;
    for (const auto& r : rects) {
        try {
            e.mass += mu_rect(r);
        } catch (const infinite_mass&) {
            e.infinite_mass = true;
        }
    }
    if (e.infinite_mass) {
        e.mass = std::numeric_limits<Real>::infinity();
        e.entropy = 0;
    } else {
        e.entropy = e.mass > 0 ? e.integral / e.mass : Real(0);
    }
    return e;
}

template <class Real>
EntropyResult<Real> rohlin_integral(const Domain<Real>& D, const IntervalSpec<Real>& s)
{
    return rohlin_integral(D.rects(), s);
}

template <class Real>
Real vol_n(int n)
{
    if (n < 3) throw invalid_index("n must be >= 3");
    return 2 * Real(2 * n - 3) * pi<Real>() * pi<Real>() / Real(3 * n);
}

template <class Real>
struct ConjectureReport {
    int n = 3;
    Real alpha{0};
    DomainKind kind = DomainKind::sweep;
    bool approximate = false;
    Real mass{0};
    Real integral{0};
    Real entropy{0};
    Real vol{0};
    Real residual{0};
    Real quad_error{0};
    Real residual_mass{0};  // sweep convergence residual, 0 for closed forms
};

template <class Real>
ConjectureReport<Real> conjecture_report(const GroupParams<Real>& g, const Domain<Real>& D)
{
    auto s = make_spec(g, D.alpha);
    auto e = rohlin_integral(D, s);
    ConjectureReport<Real> c;
    c.n = g.n;
    c.alpha = D.alpha;
    c.kind = D.kind;
    c.approximate = D.approximate;
    c.mass = e.mass;
    c.integral = e.integral;
    c.entropy = e.entropy;
    c.vol = vol_n<Real>(g.n);
    c.residual = e.integral - c.vol;
    c.quad_error = e.quad_error;
    c.residual_mass = D.approximate ? D.residual : Real(0);
    return c;
}

template <class Real>
ConjectureReport<Real> verify_conjecture(int n, const Real& alpha, const AutoOptions<Real>& opt = {})
{
    auto g = group_params<Real>(n);
    return conjecture_report(g, build_auto(g, alpha, opt));
}

template <class Real>
struct ScanRow {
    ConjectureReport<Real> report;
    bool ok = false;
    std::string error;
};

// Rows come back in grid order whatever the job count.
template <class Real>
std::vector<ScanRow<Real>> scan(int n, const std::vector<Real>& alphas, int jobs = 1, const AutoOptions<Real>& opt = {})
{
    auto g = group_params<Real>(n);
    auto one = [&](const Real& a) {
        ScanRow<Real> row;
        row.report.n = n;
        row.report.alpha = a;
        try {
            row.report = conjecture_report(g, build_auto(g, a, opt));
            row.ok = true;
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        return row;
    };
    std::vector<ScanRow<Real>> rows(alphas.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) rows[i] = one(alphas[i]);
        return rows;
    }
    for (std::size_t base = 0; base < alphas.size(); base += jobs) {
        std::vector<std::future<ScanRow<Real>>> fs;
        for (std::size_t i = base; i < std::min(alphas.size(), base + jobs); ++i)
            fs.push_back(std::async(std::launch::async, one, alphas[i]));
        for (std::size_t i = 0; i < fs.size(); ++i) rows[base + i] = fs[i].get();
    }
    return rows;
}

template <class Real>
std::vector<Real> parse_grid(const std::string& spec)
{
    auto p1 = spec.find(':');
    auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw std::invalid_argument("grid must be start:end:count");
    Real a = parse_real<Real>(spec.substr(0, p1));
    Real b = parse_real<Real>(spec.substr(p1 + 1, p2 - p1 - 1));
    int count = std::stoi(spec.substr(p2 + 1));
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    std::vector<Real> out;
    if (count == 1) return {a};
    for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * Real(i) / Real(count - 1));
    return out;
}

// mu(Omega cap [a,b] x R)
template <class Real>
Real strip_mass(const Domain<Real>& D, Real a, Real b)
{
    using std::max;
    using std::min;
    if (b < a) std::swap(a, b);
    Real m = 0;
    for (auto r : D.rects()) {
        r.x1 = max(r.x1, a);
        r.x2 = min(r.x2, b);
        m += mu_rect(r);
    }
    return m;
}

struct not_close_neighbors : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <class Real>
struct NeighborPrediction {
    Real h_alpha{0};
    Real h_prime{0};
    Real ratio{1};  // h_prime / h_alpha
    Real nu_r{0}, nu_b{0};
};

// Both endpoint orbits up to the matching step stay inside both intervals.
template <class Real>
bool close_neighbors(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Real& a, const Real& ap)
{
    auto s = make_spec(g, a), sp = make_spec(g, ap);
    auto inside_both = [&](const Real& x) { return x >= std::max(s.ell0, sp.ell0) && x < std::min(s.r0, sp.r0); };
    auto ol = orbit_by_word(g, s.ell0, I.lower_word.symbols);
    auto olp = orbit_by_word(g, sp.ell0, I.lower_word.symbols);
    auto orr = orbit_by_word(g, s.r0, I.upper_word.symbols);
    auto orp = orbit_by_word(g, sp.r0, I.upper_word.symbols);
    for (std::size_t i = 1; i < ol.size(); ++i)
        if (!inside_both(ol[i]) || !inside_both(olp[i])) return false;
    for (std::size_t j = 1; j < orr.size(); ++j)
        if (!inside_both(orr[j]) || !inside_both(orp[j])) return false;
    return true;
}

// Predicted h(T_alpha') from h(T_alpha) for alpha' < alpha in the same matching interval.
template <class Real>
NeighborPrediction<Real> neighbor_entropy(const GroupParams<Real>& g, const SyncInterval<Real>& I, const Domain<Real>& D,
                                          const Real& h_alpha, const Real& alpha_prime)
{
    const Real& alpha = D.alpha;
    if (!(alpha_prime <= alpha)) throw not_close_neighbors("alpha' must not exceed alpha");
    if (!in_closure(I, alpha) || !in_closure(I, alpha_prime)) throw not_close_neighbors("both parameters must lie in the interval");
    if (I.large() && (alpha - *I.delta) * (alpha_prime - *I.delta) < 0)
        throw not_close_neighbors("parameters lie on opposite sides of delta");
    if (!close_neighbors(g, I, alpha, alpha_prime)) throw not_close_neighbors("endpoint orbits leave one of the intervals");
    auto s = make_spec(g, alpha), sp = make_spec(g, alpha_prime);
    Real total = mu_domain(D).mass;
    NeighborPrediction<Real> p;
    p.h_alpha = h_alpha;
    p.nu_r = strip_mass(D, sp.r0, s.r0) / total;
    Real denom = 1 + Real(I.Sunder - I.Sbar) * p.nu_r;
    if (I.large()) {
        p.nu_b = strip_mass(D, frak_b(sp), frak_b(s)) / total;
        if (alpha > *I.delta) denom -= p.nu_r;
        denom -= p.nu_b;
    }
    p.ratio = 1 / denom;
    p.h_prime = h_alpha * p.ratio;
    return p;
}

} // namespace natext
