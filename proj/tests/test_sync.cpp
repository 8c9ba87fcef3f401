#include <catch_amalgamated.hpp>

#include <cmath>

#include "natext/natext.hpp"

using namespace natext;
using Catch::Matchers::WithinAbs;

namespace {

const double r21 = std::sqrt(21.0);
const double r5 = std::sqrt(5.0);

Word W(std::vector<int> l) { return Word{std::move(l)}; }

} // namespace

TEST_CASE("small interval (1,1) endpoints", "[sync]")
{
    auto g = group_params<double>(3);
    auto I = solve_and_certify(g, 1, W({1}));
    CHECK_THAT(I.zeta, WithinAbs((5 - r21) / 4, 1e-12));
    CHECK_THAT(I.eta, WithinAbs((-1 + r21) / 20, 1e-12));
    CHECK(I.valid);
    CHECK(I.Sunder == 4);
    CHECK(I.Sbar == 1);
    CHECK_FALSE(I.delta);
}

TEST_CASE("large interval (-1,1) endpoints", "[sync]")
{
    auto g = group_params<double>(3);
    auto I = solve_and_certify(g, -1, W({1}));
    CHECK_THAT(I.eta, WithinAbs((3 - r5) / 4, 1e-12));
    CHECK_THAT(*I.delta, WithinAbs((5 - r5) / 4, 1e-12));
    CHECK_THAT(I.zeta, WithinAbs((1 + r5) / 4, 1e-12));
    CHECK(I.valid);
    CHECK(I.Sunder == 1);
    CHECK(I.Sbar == 0);
}

TEST_CASE("quad precision endpoints", "[sync]")
{
    auto g = group_params<quad>(3);
    auto I = solve(g, 1, W({1}));
    quad r = sqrt(quad(21));
    CHECK(abs(I.zeta - (5 - r) / 4) < quad(1e-30));
    CHECK(abs(I.eta - (r - 1) / 20) < quad(1e-30));
}

TEST_CASE("endpoint orbit table", "[sync]")
{
    auto g = group_params<double>(3);
    auto I = solve(g, 1, W({1}));
    auto sz = make_spec(g, I.zeta), se = make_spec(g, I.eta);
    auto rz = orbit(sz, sz.r0, 2), lz = orbit(sz, sz.ell0, 6);
    auto re = orbit(se, se.r0, 2), le = orbit(se, se.ell0, 5);
    CHECK_THAT(rz.points[0], WithinAbs((5 - r21) / 2, 1e-9));
    CHECK_THAT(rz.points[1], WithinAbs((1 - r21) / 2, 1e-9));
    CHECK_THAT(re.points[0], WithinAbs((-1 + r21) / 10, 1e-9));
    CHECK_THAT(re.points[0], WithinAbs(0.358, 5e-4));
    CHECK_THAT(re.points[1], WithinAbs((5 - r21) / 2, 1e-9));
    const double lzeta[] = {(1 - r21) / 2, (-9 + r21) / 10, (-9 + r21) / 6, (-21 + r21) / 10, (-21 + r21) / 42};
    for (int i = 0; i < 5; ++i) CHECK_THAT(lz.points[i], WithinAbs(lzeta[i], 1e-9));
    CHECK_THAT(lz.points[5], WithinAbs(lz.points[1], 1e-9));
    const double leta[] = {(-21 + r21) / 10, (-21 + r21) / 42, (-9 + r21) / 10, (-9 + r21) / 6};
    for (int i = 0; i < 4; ++i) CHECK_THAT(le.points[i], WithinAbs(leta[i], 1e-9));
    CHECK_THAT(le.points[4], WithinAbs(le.points[0], 1e-9));
}

TEST_CASE("synchronization inside intervals", "[sync]")
{
    auto g = group_params<double>(3);
    for (auto [k, v] : std::vector<std::pair<int, Word>>{{1, W({1})}, {2, W({1})}, {1, W({1, 2, 1})}, {3, W({1})}}) {
        auto I = solve_and_certify(g, k, v);
        CHECK(I.valid);
        for (double a : interior_points(I)) {
            auto r = verify_sync_near(g, I, a);
            CHECK(r.status == SyncStatus::pass);
            CHECK(r.prefix_ok);
            CHECK(r.diff < 1e-9);
            // T^Sbar(r0) = R r0
            auto s = make_spec(g, a);
            auto o = orbit(s, s.r0, I.Sbar);
            CHECK_THAT(o.points[I.Sbar], WithinAbs(matrix_R_small(g, k, v)(s.r0), 1e-9));
        }
    }
}

TEST_CASE("large regime two-case identity", "[sync]")
{
    auto g = group_params<double>(3);
    auto I = solve_and_certify(g, -2, W({1}));
    REQUIRE(I.valid);
    REQUIRE(I.delta);
    CHECK(I.eta < 0.86);
    CHECK(0.86 < *I.delta);
    CHECK(*I.delta < 0.87);
    CHECK(0.87 < I.zeta);
    auto left = verify_sync(g, I, 0.86), right = verify_sync(g, I, 0.87);
    CHECK(left.status == SyncStatus::pass);
    CHECK(right.status == SyncStatus::pass);
    CHECK(left.rhs_step == I.Sbar + 1);
    CHECK(right.rhs_step == I.Sbar + 2);
    // ell_Sunder = L A ell0
    for (double a : {0.86, 0.87}) {
        auto s = make_spec(g, a);
        auto o = orbit(s, s.ell0, I.Sunder);
        CHECK_THAT(o.points[I.Sunder], WithinAbs((matrix_L_large(g, 2, W({1})) * gen_A(g))(s.ell0), 1e-9));
    }
}

TEST_CASE("synchronization fails outside the interval", "[sync]")
{
    auto g = group_params<double>(3);
    auto I = solve(g, 1, W({1}));
    auto r = verify_sync(g, I, 0.25);
    CHECK(r.status != SyncStatus::pass);
    CHECK_FALSE(locate(g, 0.0));
}

TEST_CASE("locate finds the containing interval", "[sync]")
{
    for (int n : {3, 4, 5}) {
        auto g = group_params<double>(n);
        for (auto [k, v] : std::vector<std::pair<int, Word>>{{1, W({1})}, {2, W({1})}, {-2, W({1})}}) {
            auto I = solve_and_certify(g, k, v);
            if (!I.valid) continue;
            double mid = (I.left() + I.right()) / 2 + 0.013 * (I.right() - I.left());
            auto J = locate(g, mid);
            REQUIRE(J);
            CHECK(J->k == k);
            CHECK(J->v == v);
            CHECK(J->valid);
            CHECK(J->v.is_palindrome());
        }
    }
}

TEST_CASE("invalid candidates", "[sync]")
{
    auto g = group_params<double>(3);
    CHECK_THROWS_AS(solve_small(g, 0, W({1})), invalid_word);
    CHECK_THROWS_AS(solve(g, -1, W({2})), invalid_word);
    CHECK_THROWS(solve(g, 1, W({1, 2})));
}

TEST_CASE("intervals are ordered and disjoint", "[sync]")
{
    auto g = group_params<double>(3);
    std::vector<SyncInterval<double>> Is;
    for (int k = 1; k <= 4; ++k) Is.push_back(solve(g, k, W({1})));
    for (size_t i = 0; i + 1 < Is.size(); ++i) CHECK(Is[i + 1].right() < Is[i].left());
    auto lm = landmarks(g);
    for (auto& I : Is) CHECK(I.right() <= lm.gamma);
}
