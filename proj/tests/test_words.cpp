#include <catch_amalgamated.hpp>

#include <cmath>

#include "natext/natext.hpp"

using namespace natext;
using Catch::Matchers::WithinAbs;

namespace {

Word W(std::vector<int> l) { return Word{std::move(l)}; }

std::vector<Word> all_words(int max_len, int max_letter)
{
    std::vector<Word> out;
    for (int len = 1; len <= max_len; len += 2) {
        std::vector<int> cur(len, 1);
        while (true) {
            out.push_back(W(cur));
            int i = 0;
            while (i < len && cur[i] == max_letter) cur[i++] = 1;
            if (i == len) break;
            ++cur[i];
        }
    }
    return out;
}

} // namespace

TEST_CASE("parse and format words", "[words]")
{
    CHECK(parse_word("1").letters == std::vector<int>{1});
    CHECK(parse_word("1 2 1").letters == std::vector<int>{1, 2, 1});
    CHECK(parse_word("1,2,1").letters == std::vector<int>{1, 2, 1});
    CHECK(format_word(parse_word(" 3  1 4 ")) == "3 1 4");
    CHECK_THROWS_AS(parse_word(""), invalid_word);
    CHECK_THROWS_AS(parse_word("1 2"), invalid_word);
    CHECK_THROWS_AS(parse_word("0"), invalid_word);
    CHECK_THROWS_AS(parse_word("1 x 1"), invalid_word);
    CHECK_THROWS_AS(parse_word("1.5"), invalid_word);
    CHECK(W({1, 2, 1}).is_palindrome());
    CHECK_FALSE(W({1, 2, 3}).is_palindrome());
    CHECK(W({2, 1, 3}).blocks() == 2);
    CHECK(W({2, 1, 3}).total() == 6);
}

TEST_CASE("small digit words", "[words]")
{
    CHECK(format_digit_word(digit_word_small(1, W({1})), true) == "1");
    CHECK(format_digit_word(digit_word_small(1, W({2})), true) == "1,1");
    CHECK(format_digit_word(digit_word_small(2, W({1, 1, 1})), true) == "2,3,2");
    for (auto& v : all_words(5, 3)) CHECK(digit_word_small(2, v).length() == v.total());
    CHECK_THROWS_AS(digit_word_small(0, W({1})), invalid_word);
}

TEST_CASE("small matrices", "[words]")
{
    auto g = group_params<double>(3);
    auto A = gen_A(g), C = gen_C<double>();
    auto Ai = inverse(A);
    CHECK(proj_equal(matrix_R_small(g, 1, W({1})), A * C));
    auto L = Ai * C * Ai * Ai * C * Ai * Ai * C * Ai * C * Ai;
    CHECK(proj_equal(matrix_L_small(g, 1, W({1})), L));
    auto I = solve_small(g, 1, W({1}));
    CHECK(I.Sbar == 1);
    CHECK(I.Sunder == 4);
    double r0 = I.eta * g.t;
    CHECK_THAT(L(r0), WithinAbs(r0, 1e-12));
}

TEST_CASE("large digit words", "[words]")
{
    auto g = group_params<double>(3);
    auto A = gen_A(g), C = gen_C<double>();
    auto Ai = inverse(A);
    CHECK(proj_equal(matrix_L_large(g, 2, W({1})), Ai * Ai * C * Ai));
    CHECK(proj_equal(matrix_R_large(g, 2, W({1})), A * C * A * C * C));
    auto w = digit_word_large(2, W({1}), 3);
    CHECK(format_digit_word(w.upper) == "(1,2),(1,1)");
    CHECK(w.e == 1);
    CHECK(proj_equal(matrix_R_large(g, 1, W({1})), Mobius<double>::identity()));
    CHECK(digit_word_large(1, W({1}), 3).upper.length() == 0);
    // restriction at level -1
    CHECK_THROWS_AS(digit_word_large(1, W({2}), 3), invalid_word);
    CHECK_THROWS_AS(digit_word_large(1, W({2, 1, 1}), 4), invalid_word);
    CHECK_NOTHROW(digit_word_large(1, W({2}), 4));
    CHECK_NOTHROW(digit_word_large(1, W({1, 1, 1}), 4));
}

TEST_CASE("word order matches digit word order", "[words]")
{
    auto words = all_words(5, 3);
    CHECK(order_words(W({1}), W({2})) < 0);
    CHECK(order_words(W({1, 2, 1}), W({1, 1, 1})) < 0);
    for (int k = 1; k <= 3; ++k) {
        int mismatches = 0;
        for (size_t i = 0; i < words.size(); i += 3)
            for (size_t j = 0; j < words.size(); j += 2) {
                int a = order_words(words[i], words[j]);
                int b = order_digits(digit_word_small(k, words[i]), digit_word_small(k, words[j]));
                if ((a < 0) != (b < 0) || (a == 0) != (b == 0)) ++mismatches;
            }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("self dominance", "[words]")
{
    CHECK(self_dominant(W({1})));
    CHECK(self_dominant(W({2, 1, 2})));
    CHECK(self_dominant(W({1, 2, 1})));
    CHECK_FALSE(self_dominant(W({1, 1, 2})));
    CHECK(block_shift(W({1, 2, 3, 4, 5}), 1).letters == std::vector<int>{3, 4, 5});
    CHECK(block_shift(W({1, 2, 3}), 2).letters.empty());
}

TEST_CASE("v prime and theta", "[words]")
{
    CHECK(v_prime(W({3})) == std::vector<int>{1, 2});
    CHECK(v_prime(W({1, 2, 1})) == std::vector<int>{3, 1});
    CHECK(v_prime(W({2, 1, 3})) == std::vector<int>{1, 1, 1, 3});
    CHECK_THROWS_AS(v_prime(W({1})), unsupported_case);

    Word v = W({1, 2, 1});
    std::vector<int> vpp{1, 1};
    for (int q = 0; q <= 3; ++q) {
        Word t = theta(v, q, vpp);
        CHECK(t.size() == v.size() + q * v_prime(v).size() + vpp.size());
        CHECK(std::equal(v.letters.begin(), v.letters.end(), t.letters.begin()));
    }
    CHECK_THROWS_AS(theta(W({3}), 1, {}), unsupported_case);
    CHECK_THROWS_AS(theta(v, 1, {1}), invalid_word);
    CHECK_THROWS_AS(theta(v, -1, {}), invalid_word);
    // parent inferred from v = u u' w
    Word child = theta(v, 1, vpp);
    CHECK(infer_parent(child) == v);
    CHECK(theta(child, 0).size() == child.size() + 4);
}

TEST_CASE("runs recover the word", "[words]")
{
    for (int k = 1; k <= 3; ++k)
        for (auto& v : all_words(5, 3)) {
            std::vector<int> ks;
            for (auto& d : digit_word_small(k, v).symbols) ks.push_back(d.k);
            auto kv = word_from_runs(ks);
            REQUIRE(kv);
            CHECK(kv->first == k);
            CHECK(kv->second == v);
        }
    CHECK_FALSE(word_from_runs({}));
    CHECK_FALSE(word_from_runs({1, 2}));
    CHECK_FALSE(word_from_runs({1, 3, 1}));
}
