#include <catch_amalgamated.hpp>

#include <cmath>

#include "natext/natext.hpp"

using namespace natext;
using Catch::Matchers::WithinAbs;

namespace {

const double PI2 = M_PI * M_PI;

double entropy_at(const GroupParams<double>& g, double a)
{
    auto D = build_auto(g, a);
    return rohlin_integral(D, make_spec(g, a)).entropy;
}

} // namespace

TEST_CASE("log integral over the unit square corner", "[measure]")
{
    std::vector<Rect<double>> R{{0, 1, -1, 0, ""}};
    auto I = integrate_log_pieces(R, std::vector<LogPiece<double>>{{0, 1, 1, 0}});
    CHECK(I.converged);
    CHECK_THAT(I.value, WithinAbs(PI2 / 3, 1e-8));
}

TEST_CASE("alpha = 1 domain for n = 3", "[measure]")
{
    auto g = group_params<double>(3);
    auto s = make_spec(g, 1.0);
    std::vector<Rect<double>> omega1{{0, 1, -1, 0, ""}, {1, 2, -0.5, 0, ""}};
    auto e = rohlin_integral(omega1, s);
    CHECK_THAT(e.integral, WithinAbs(2 * PI2 / 3, 1e-8));
    CHECK(e.infinite_mass);
    CHECK(e.entropy == 0);
    CHECK_THAT(vol_n<double>(3), WithinAbs(2 * PI2 / 3, 1e-15));
}

TEST_CASE("volume formula", "[measure]")
{
    for (int n = 3; n <= 12; ++n) CHECK_THAT(vol_n<double>(n), WithinAbs(2.0 * (2 * n - 3) * PI2 / (3 * n), 1e-13));
    CHECK_THROWS_AS(vol_n<double>(2), invalid_index);
}

TEST_CASE("tau pieces tile the interval", "[measure]")
{
    auto g = group_params<double>(3);
    for (double a : {0.05, 0.14, 0.5, 0.75, 0.95}) {
        auto s = make_spec(g, a);
        auto P = tau_pieces(s);
        REQUIRE_FALSE(P.empty());
        CHECK(P.front().a == s.ell0);
        CHECK(P.back().b == s.r0);
        for (size_t i = 0; i + 1 < P.size(); ++i) CHECK(P[i].b == P[i + 1].a);
        for (auto& p : P) {
            double m = (p.a + p.b) / 2;
            if (std::abs(m) < 1e-9 || std::abs(m - 1) < 1e-9) continue;
            CHECK_THAT(-2 * std::log(std::abs(p.c * m + p.d)), WithinAbs(tau(s, m), 1e-12));
        }
    }
}

TEST_CASE("entropy times mass equals the volume", "[measure]")
{
    for (int n : {3, 4, 5}) {
        auto g = group_params<double>(n);
        for (double a : {0.05, 0.14, 0.3, 0.5, 0.75, 0.86, 0.95}) {
            auto rep = verify_conjecture(n, a);
            CHECK_FALSE(rep.approximate);
            CHECK(std::abs(rep.residual) < 1e-6);
            CHECK_THAT(rep.entropy * rep.mass, WithinAbs(rep.integral, 1e-9));
        }
    }
}

TEST_CASE("extended precision volume", "[measure]")
{
    auto rep = verify_conjecture<quad>(3, quad(0.14));
    CHECK(abs(rep.residual) < quad(1e-18));
}

TEST_CASE("grid parsing", "[measure]")
{
    auto v = parse_grid<double>("0.1:0.3:3");
    REQUIRE(v.size() == 3);
    CHECK_THAT(v[1], WithinAbs(0.2, 1e-15));
    CHECK(parse_grid<double>("0.5:0.9:1") == std::vector<double>{0.5});
    CHECK_THROWS(parse_grid<double>("0.1:0.3"));
    CHECK_THROWS(parse_grid<double>("0.1:0.3:0"));
    CHECK_THROWS(parse_grid<double>("a:0.3:4"));
}

TEST_CASE("scan keeps grid order under parallel jobs", "[measure]")
{
    auto grid = parse_grid<double>("0.1:0.9:6");
    auto a = scan(3, grid, 1), b = scan(3, grid, 3);
    REQUIRE(a.size() == grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(a[i].ok);
        CHECK(a[i].report.alpha == grid[i]);
        CHECK(b[i].report.alpha == grid[i]);
        CHECK(a[i].report.integral == b[i].report.integral);
        CHECK(a[i].report.mass == b[i].report.mass);
    }
}

TEST_CASE("strip mass", "[measure]")
{
    auto g = group_params<double>(3);
    auto D = build_auto(g, 0.14);
    auto s = make_spec(g, 0.14);
    CHECK_THAT(strip_mass(D, s.ell0, s.r0), WithinAbs(mu_domain(D).mass, 1e-12));
    double m = strip_mass(D, -1.0, 0.1) + strip_mass(D, 0.1, -1.0);
    CHECK_THAT(m, WithinAbs(2 * strip_mass(D, -1.0, 0.1), 1e-15));
    CHECK_THAT(strip_mass(D, s.ell0, 0.0) + strip_mass(D, 0.0, s.r0), WithinAbs(mu_domain(D).mass, 1e-12));
}

TEST_CASE("close neighbor entropy", "[measure]")
{
    auto g = group_params<double>(3);
    auto I = solve_and_certify(g, 1, Word{{1}});
    auto D = build_small_interior(g, I, 0.14);
    double h = rohlin_integral(D, make_spec(g, 0.14)).entropy;
    auto p = neighbor_entropy(g, I, D, h, 0.135);
    CHECK_THAT(p.h_prime, WithinAbs(entropy_at(g, 0.135), 1e-4));
    // ratio tends to 1 as the neighbor approaches
    double prev = 1e9;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
        double ap = std::max(0.14 - d, I.zeta);
        double dev = std::abs(neighbor_entropy(g, I, D, h, ap).ratio - 1);
        CHECK(dev <= prev);
        prev = dev;
    }
    CHECK(prev < 1e-3);
    // more lower steps than upper: prediction increases with alpha'
    double last = 0;
    for (double ap = 0.130; ap <= 0.1401; ap += 0.002) {
        double hp = neighbor_entropy(g, I, D, h, std::min(ap, 0.14)).h_prime;
        CHECK(hp > last);
        last = hp;
    }
    CHECK_THROWS_AS(neighbor_entropy(g, I, D, h, 0.15), not_close_neighbors);
    CHECK_THROWS_AS(neighbor_entropy(g, I, D, h, 0.05), not_close_neighbors);
}

TEST_CASE("close neighbor entropy in the large regime", "[measure]")
{
    auto g = group_params<double>(3);
    auto I = solve_and_certify(g, -1, Word{{1}});
    for (double a : {0.5, 0.8}) {
        auto D = build_large(g, I, a);
        double h = rohlin_integral(D, make_spec(g, a)).entropy;
        double ap = a - 0.01;
        auto p = neighbor_entropy(g, I, D, h, ap);
        CHECK_THAT(p.h_prime, WithinAbs(entropy_at(g, ap), 1e-4));
    }
}

TEST_CASE("domain mass accounting", "[measure]")
{
    auto g = group_params<double>(3);
    auto D = build_auto(g, 0.86);
    auto m = mu_domain(D);
    CHECK_FALSE(m.infinite);
    CHECK(m.breakdown.size() == D.size());
    double sum = 0;
    for (double b : m.breakdown) sum += b;
    CHECK_THAT(sum, WithinAbs(m.mass, 1e-14));
}
