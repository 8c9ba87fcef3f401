#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "natext/natext.hpp"

using namespace natext;
using Catch::Matchers::WithinAbs;

namespace {

struct Setup {
    GroupParams<double> g;
    IntervalSpec<double> s;
    Domain<double> D;
    ExpansivePartition<double> P;
};

Setup setup(double a)
{
    auto g = group_params<double>(3);
    auto s = make_spec(g, a);
    return {g, s, build_auto(g, a), expansivity_power(s)};
}

} // namespace

TEST_CASE("expansive already at alpha = 0.75", "[expansive]")
{
    auto S = setup(0.75);
    REQUIRE(S.P.conclusive);
    CHECK(S.P.r == 1);
    auto F = induced_domain(S.D, S.s, S.P);
    CHECK(F.size() == S.D.size());
    CHECK(mu_domain(F).mass == mu_domain(S.D).mass);
    auto ab = abramov_check(S.D, F, S.s, S.P);
    CHECK(ab.residual == 0);
}

TEST_CASE("second power at alpha = 0.14", "[expansive]")
{
    auto S = setup(0.14);
    REQUIRE(S.P.conclusive);
    CHECK(S.P.r == 2);
    CHECK_FALSE(S.P.E(1).empty());
    CHECK_FALSE(S.P.E(2).empty());
    // pieces tile the interval
    CHECK(S.P.pieces.front().a == Catch::Approx(S.s.ell0));
    CHECK(S.P.pieces.back().b == Catch::Approx(S.s.r0));
    for (size_t i = 0; i + 1 < S.P.pieces.size(); ++i) CHECK(S.P.pieces[i].b <= S.P.pieces[i + 1].a + 1e-12);

    auto laws = check_partition_laws(S.s, S.P, 10000, 1);
    CHECK(laws.ok());
    CHECK(laws.checked > 9000);

    auto F = induced_domain(S.D, S.s, S.P);
    double mF = mu_domain(F).mass, mO = mu_domain(S.D).mass;
    CHECK(mF < mO);
    CHECK(mF > 0);
    CHECK(F.residual < 1e-9);
    auto ab = abramov_check(S.D, F, S.s, S.P);
    CHECK(std::abs(ab.residual) < 1e-3);
    CHECK(first_return_fraction(F, S.s, S.P, 4000, 2) > 0.99);
}

TEST_CASE("ell agrees with the partition index", "[expansive]")
{
    for (double a : {0.05, 0.3, 0.5, 0.86}) {
        auto S = setup(a);
        REQUIRE(S.P.conclusive);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> U(S.s.ell0, S.s.r0);
        int agree = 0, tried = 0;
        for (int i = 0; i < 2000; ++i) {
            double x = U(rng);
            int k = S.P.index_of(x);
            if (k == 0 || std::abs(x) < 1e-9 || std::abs(x - 1) < 1e-9) continue;
            ++tried;
            agree += ell(S.s, x) == k;
        }
        CHECK(agree == tried);
    }
}

TEST_CASE("U expands", "[expansive]")
{
    auto S = setup(0.14);
    for (double x : {-1.5, -0.9, -0.3, 0.1, 0.2}) {
        int k = ell(S.s, x);
        double prod = 1, y = x;
        for (int i = 0; i < k; ++i) {
            prod *= abs_derivative(S.s, y);
            y = step(S.s, y);
        }
        CHECK(prod > 1);
        CHECK_THAT(U_apply(S.s, x), WithinAbs(y, 1e-12));
    }
}

TEST_CASE("rectangle subtraction conserves mass", "[expansive]")
{
    Rect<double> A{-1, 1, -0.5, 0.5, ""}, B{-0.2, 0.3, -0.1, 0.8, ""};
    std::vector<Rect<double>> out;
    detail::subtract(A, B, out, 1e-14);
    double m = 0;
    for (auto& r : out) m += mu_rect(r);
    Rect<double> C{-0.2, 0.3, -0.1, 0.5, ""};
    CHECK_THAT(m + mu_rect(C), WithinAbs(mu_rect(A), 1e-14));
}
