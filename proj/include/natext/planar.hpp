#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "rect.hpp"

namespace natext {

struct partition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (M x, R M R^-1 y) with M the digit matrix of x
template <class Real>
std::pair<Real, Real> planar_apply(const IntervalSpec<Real>& s, const Real& x, const Real& y)
{
    using std::abs;
    auto di = digit_info(s, x);
    Mobius<Real> N = conj_by_R(digit_matrix(s.params, di.d.k, di.d.l));
    Real den = N.c * y + N.d;
    if (abs(den) < Real(1e-13)) throw pole_error("y is at the pole of the conjugated map");
    return {di.image, (N.a * y + N.b) / den};
}

template <class Real>
bool domain_contains(const Domain<Real>& D, const Real& x, const Real& y, const Real& tol)
{
    const auto& part = y >= 0 ? D.upper : D.lower;
    for (const auto& r : part)
        if (x >= r.x1 - tol && x <= r.x2 + tol && y >= r.y1 - tol && y <= r.y2 + tol) return true;
    return false;
}

template <class Real>
struct Block {
    Digit d;
    Real lo{0}, hi{0};  // x-extent
    bool tail = false;  // all digits beyond the cutoff on one side of a pole
    std::vector<Rect<Real>> region;
};

template <class Real>
struct BlockSet {
    int K = 0;
    std::vector<Block<Real>> blocks;
};

namespace detail {

template <class Real>
std::vector<Rect<Real>> clip_x(const std::vector<Rect<Real>>& rs, const Real& a, const Real& b)
{
    std::vector<Rect<Real>> out;
    for (auto r : rs) {
        r.x1 = std::max(r.x1, a);
        r.x2 = std::min(r.x2, b);
        if (r.x2 > r.x1 && r.y2 > r.y1) out.push_back(r);
    }
    return out;
}

template <class Real>
int overlapping(const std::vector<Rect<Real>>& rs, const Real& a, const Real& b, const Real& tol)
{
    int c = 0;
    for (const auto& r : rs)
        if (std::min(r.x2, b) - std::max(r.x1, a) > tol) ++c;
    return c;
}

} // namespace detail

// Blocks over the cylinders with |k| <= K; each tail lies under a single step of both parts.
template <class Real>
BlockSet<Real> partition_blocks(const Domain<Real>& D, const IntervalSpec<Real>& s, int Kmin = 8, int Kmax = 8192)
{
    using std::abs;
    // tails must not contain the partial end cylinders unless those sit at a pole
    int K = Kmin;
    for (const Real& x : {s.ell0, s.r0 - s.tol * 4}) {
        try {
            int k = std::abs(digit(s, x).k);
            if (k < 4096) K = std::max(K, k + 1);
        } catch (const pole_error&) {
        }
    }
    const Real tol = Real(1e-12) * s.t();
    for (;; K *= 2) {
        if (K > Kmax) throw partition_error("tails do not settle under a single step up to K=" + std::to_string(Kmax));
        auto cyl = cylinder_partition(s, K);
        bool ok = true;
        for (const auto& p : cyl)
            if (p.tail && (detail::overlapping(D.upper, p.lo, p.hi, tol) > 1 || detail::overlapping(D.lower, p.lo, p.hi, tol) > 1))
                ok = false;
        if (!ok) continue;
        BlockSet<Real> B;
        B.K = K;
        for (const auto& p : cyl) {
            Block<Real> b;
            b.d = p.d;
            b.lo = p.lo;
            b.hi = p.hi;
            b.tail = p.tail;
            b.region = detail::clip_x(D.rects(), p.lo, p.hi);
            if (!b.region.empty()) B.blocks.push_back(std::move(b));
        }
        return B;
    }
}

template <class Real>
Real block_mass(const Block<Real>& b)
{
    Real m = 0;
    for (const auto& r : b.region) m += mu_rect(r);
    return m;
}

// Image rectangles of a block; a tail is replaced by I x hull(0, N_{K+1}(fiber)).
template <class Real>
std::vector<Rect<Real>> block_image(const Block<Real>& b, const IntervalSpec<Real>& s, int K)
{
    using std::max;
    using std::min;
    std::vector<Rect<Real>> out;
    if (b.tail) {
        int sign = b.d.k > 0 ? 1 : -1;
        Mobius<Real> N = conj_by_R(digit_matrix(s.params, sign * (K + 1), b.d.l));
        Real ylo = 0, yhi = 0;
        for (const auto& r : b.region) {
            ylo = min(ylo, r.y1);
            yhi = max(yhi, r.y2);
        }
        Real u = N(ylo), v = N(yhi);
        Real y1 = min({Real(0), u, v}), y2 = max({Real(0), u, v});
        out.push_back(Rect<Real>{s.ell0, s.r0, y1, y2, "tail " + format_digit(b.d)});
        return out;
    }
    Mobius<Real> M = digit_matrix(s.params, b.d.k, b.d.l);
    Mobius<Real> N = conj_by_R(M);
    for (const auto& r : b.region) {
        Real x1 = M(r.x1), x2 = M(r.x2);
        Real y1 = N(r.y1), y2 = N(r.y2);
        Rect<Real> im{max(min(x1, x2), s.ell0), min(max(x1, x2), s.r0), min(y1, y2), max(y1, y2), format_digit(b.d)};
        if (im.x2 > im.x1) out.push_back(im);
    }
    return out;
}

// Images of all blocks. Tails whose images accumulate on the same side of y = 0 interleave
// (l = 1 and l = 2 in the large regime), so they are merged into one pseudo-image each.
template <class Real>
std::vector<std::vector<Rect<Real>>> image_cover(const BlockSet<Real>& B, const IntervalSpec<Real>& s)
{
    using std::max;
    using std::min;
    std::vector<std::vector<Rect<Real>>> out;
    Real top = 0, bottom = 0;
    bool up = false, down = false;
    for (const auto& b : B.blocks) {
        auto ims = block_image(b, s, B.K);
        if (!b.tail) {
            out.push_back(std::move(ims));
            continue;
        }
        for (const auto& im : ims) {
            if (im.y2 > 0) {
                up = true;
                top = max(top, im.y2);
            }
            if (im.y1 < 0) {
                down = true;
                bottom = min(bottom, im.y1);
            }
        }
    }
    if (up) out.push_back({Rect<Real>{s.ell0, s.r0, Real(0), top, "tails above"}});
    if (down) out.push_back({Rect<Real>{s.ell0, s.r0, bottom, Real(0), "tails below"}});
    return out;
}

template <class Real>
struct BijectivityOptions {
    Real min_containment = Real(0.999);
    Real mass_rel_tol = Real(1e-6);
    Real max_multiplicity = Real(1e-3);
    Real contain_tol = Real(1e-9);
    int jobs = 1;
};

enum class Verdict { pass, fail, inconclusive };

inline const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
    }
}

template <class Real>
struct BijectivityReport {
    Real containment_fraction{0};
    Real mass_balance_residual{0};
    Real grid_multiplicity_excess{0};
    long samples = 0;
    std::uint64_t seed = 0;
    int grid = 0;
    int blocks = 0;
    Real mass{0};         // mu(Omega)
    Real image_mass{0};   // sum of mu over the image rectangles
    Real inside_mass{0};  // sum of mu over image rectangles cut down to Omega
    Verdict verdict = Verdict::inconclusive;
};

// mu of the image rectangles meeting Omega
template <class Real>
Real mass_inside(const Rect<Real>& im, const Domain<Real>& D)
{
    using std::max;
    using std::min;
    Real m = 0;
    for (const auto& r : D.rects()) {
        Rect<Real> c{max(im.x1, r.x1), min(im.x2, r.x2), max(im.y1, r.y1), min(im.y2, r.y2), ""};
        if (c.x2 > c.x1 && c.y2 > c.y1) m += mu_rect(c);
    }
    return m;
}

// Draw (x, y) from dmu restricted to r, by inverse transform in both coordinates.
template <class Real, class Rng>
std::pair<Real, Real> sample_rect(const Rect<Real>& r, Rng& rng)
{
    using std::exp;
    using std::log;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    // x-marginal CDF is log((1+x y2)/(1+x y1)) up to a constant
    auto G = [&](const Real& x) { return log((1 + x * r.y2) / (1 + x * r.y1)); };
    Real g1 = G(r.x1), g2 = G(r.x2);
    Real c = g1 + Real(U(rng)) * (g2 - g1);
    Real e = exp(c);
    Real x = (e - 1) / (r.y2 - e * r.y1);
    x = std::clamp(x, r.x1, r.x2);
    Real F = fiber_density(x, r.y1, r.y2);
    Real cy = Real(U(rng)) * F * (1 + x * r.y1);
    Real y = (r.y1 + cy) / (1 - cy * x);
    y = std::clamp(y, r.y1, r.y2);
    return {x, y};
}

template <class Real>
BijectivityReport<Real> verify_bijectivity(const Domain<Real>& D, const BlockSet<Real>& B, const IntervalSpec<Real>& s,
                                           long samples = 100000, int grid = 512, std::uint64_t seed = 1,
                                           const BijectivityOptions<Real>& opt = {})
{
    using std::max;
    using std::min;
    BijectivityReport<Real> rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.grid = grid;
    rep.blocks = static_cast<int>(B.blocks.size());
    auto rects = D.rects();
    std::vector<double> w;
    for (const auto& r : rects) {
        Real m = mu_rect(r);
        rep.mass += m;
        w.push_back(to_double(m));
    }
    if (!(rep.mass > 0)) return rep;

    // (a) forward containment, chunked so the result does not depend on the job count
    const long chunk = 4096;
    long nchunks = (samples + chunk - 1) / chunk;
    Real ctol = opt.contain_tol * s.t();
    auto run_chunk = [&](long c) -> long {
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(ss);
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        long hits = 0, n = min(chunk, samples - c * chunk);
        for (long i = 0; i < n; ++i) {
            const auto& r = rects[pick(rng)];
            auto [x, y] = sample_rect(r, rng);
            if (!(x >= s.ell0 && x < s.r0)) x = std::clamp(x, s.ell0, s.r0 - 2 * s.tol);
            try {
                auto [u, v] = planar_apply(s, x, y);
                if (domain_contains(D, u, v, ctol)) ++hits;
            } catch (const pole_error&) {
            }
        }
        return hits;
    };
    std::vector<long> hits(nchunks, 0);
    if (opt.jobs <= 1) {
        for (long c = 0; c < nchunks; ++c) hits[c] = run_chunk(c);
    } else {
        for (long base = 0; base < nchunks; base += opt.jobs) {
            std::vector<std::future<long>> fs;
            for (long c = base; c < min(nchunks, base + opt.jobs); ++c) fs.push_back(std::async(std::launch::async, run_chunk, c));
            for (std::size_t i = 0; i < fs.size(); ++i) hits[base + i] = fs[i].get();
        }
    }
    long total = 0;
    for (long h : hits) total += h;
    rep.containment_fraction = samples > 0 ? Real(total) / Real(samples) : Real(0);

    // (b) mass balance of the image rectangles
    auto images = image_cover(B, s);
    for (const auto& ims : images)
        for (const auto& im : ims) {
            rep.image_mass += mu_rect(im);
            rep.inside_mass += mass_inside(im, D);
        }
    Real outside = rep.image_mass - rep.inside_mass;
    using std::abs;
    rep.mass_balance_residual = abs(rep.mass - rep.inside_mass) + max(outside, Real(0));

    // (c) multiplicity of the rasterized image cover, counted over distinct blocks
    Real X0 = s.ell0, X1 = s.r0, Y0 = 0, Y1 = 0;
    for (const auto& r : rects) {
        Y0 = min(Y0, r.y1);
        Y1 = max(Y1, r.y2);
    }
    double dx = to_double((X1 - X0) / grid), dy = to_double((Y1 - Y0) / grid);
    std::vector<int> count(static_cast<std::size_t>(grid) * grid, 0), last(count.size(), -1);
    auto cell_range = [&](double a, double b, double origin, double h) {
        int i0 = static_cast<int>(std::ceil((a - origin) / h - 0.5));
        int i1 = static_cast<int>(std::ceil((b - origin) / h - 0.5));
        return std::pair<int, int>{std::max(i0, 0), std::min(i1, grid)};
    };
    for (std::size_t bi = 0; bi < images.size(); ++bi)
        for (const auto& im : images[bi]) {
            auto [ix0, ix1] = cell_range(to_double(im.x1), to_double(im.x2), to_double(X0), dx);
            auto [iy0, iy1] = cell_range(to_double(im.y1), to_double(im.y2), to_double(Y0), dy);
            for (int i = ix0; i < ix1; ++i)
                for (int j = iy0; j < iy1; ++j) {
                    std::size_t c = static_cast<std::size_t>(i) * grid + j;
                    if (last[c] != static_cast<int>(bi)) {
                        last[c] = static_cast<int>(bi);
                        ++count[c];
                    }
                }
        }
    double in_w = 0, over_w = 0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double x = to_double(X0) + (i + 0.5) * dx, y = to_double(Y0) + (j + 0.5) * dy;
            double q = 1 + x * y;
            if (!(q > 0)) continue;
            double wc = 1 / (q * q);
            std::size_t c = static_cast<std::size_t>(i) * grid + j;
            bool inside = domain_contains(D, Real(x), Real(y), Real(0));
            if (inside) in_w += wc;
            if (count[c] >= 2) over_w += wc;
        }
    rep.grid_multiplicity_excess = in_w > 0 ? Real(over_w / in_w) : Real(0);

    bool ok = rep.containment_fraction >= opt.min_containment && rep.mass_balance_residual <= opt.mass_rel_tol * rep.mass &&
              rep.grid_multiplicity_excess <= opt.max_multiplicity;
    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

template <class Real>
std::string report_to_keyvalue(const BijectivityReport<Real>& r)
{
    std::ostringstream os;
    os << "containment_fraction=" << to_string(r.containment_fraction) << "\n"
       << "mass_balance_residual=" << to_string(r.mass_balance_residual) << "\n"
       << "grid_multiplicity_excess=" << to_string(r.grid_multiplicity_excess) << "\n"
       << "mass=" << to_string(r.mass) << "\n"
       << "image_mass=" << to_string(r.image_mass) << "\n"
       << "samples=" << r.samples << "\n"
       << "grid=" << r.grid << "\n"
       << "blocks=" << r.blocks << "\n"
       << "seed=" << r.seed << "\n"
       << "verdict=" << verdict_name(r.verdict) << "\n";
    return os.str();
}

// Largest mismatch between the top of one full-width block image and the bottom of the next one up.
template <class Real>
Real lamination_defect(const BlockSet<Real>& B, const IntervalSpec<Real>& s)
{
    using std::abs;
    using std::max;
    using std::min;
    struct Strip { Real lo, hi; bool full; };
    std::vector<Strip> st;
    const Real tol = Real(1e-9) * s.t();
    for (const auto& b : B.blocks) {
        if (b.tail) continue;
        auto ims = block_image(b, s, B.K);
        if (ims.empty()) continue;
        Strip q{ims[0].y1, ims[0].y2, true};
        for (const auto& im : ims) {
            q.lo = min(q.lo, im.y1);
            q.hi = max(q.hi, im.y2);
            if (im.x1 > s.ell0 + tol || im.x2 < s.r0 - tol) q.full = false;
        }
        st.push_back(q);
    }
    std::sort(st.begin(), st.end(), [](const Strip& a, const Strip& b) { return a.lo < b.lo; });
    Real worst = 0;
    for (std::size_t i = 0; i + 1 < st.size(); ++i)
        if (st[i].full && st[i + 1].full && (st[i].hi <= 0) == (st[i + 1].hi <= 0))
            worst = max(worst, abs(st[i].hi - st[i + 1].lo));
    return worst;
}

// max y-extent of the images of the `count` non-tail blocks with the largest |k| on each side
template <class Real>
Real outer_image_extent(const BlockSet<Real>& B, const IntervalSpec<Real>& s, int count = 10)
{
    std::vector<const Block<Real>*> bs;
    for (const auto& b : B.blocks)
        if (!b.tail && b.d.l == 1) bs.push_back(&b);
    std::sort(bs.begin(), bs.end(), [](auto* a, auto* b) { return std::abs(a->d.k) > std::abs(b->d.k); });
    Real worst = 0;
    for (int i = 0; i < count && i < static_cast<int>(bs.size()); ++i)
        for (const auto& im : block_image(*bs[i], s, B.K)) worst = std::max({worst, im.y2 < 0 ? -im.y1 : im.y2, -im.y1});
    return worst;
}

} // namespace natext
