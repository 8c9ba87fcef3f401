#pragma once

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "interval.hpp"

namespace natext {

struct invalid_word : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct unsupported_case : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat letters c1 d1 c2 ... cs. Even index = c-letter, odd index = d-letter.
struct Word {
    std::vector<int> letters;

    int blocks() const { return static_cast<int>(letters.size() + 1) / 2; }
    int c(int i) const { return letters[2 * i]; }      // i = 0..s-1
    int d(int i) const { return letters[2 * i + 1]; }  // i = 0..s-2
    size_t size() const { return letters.size(); }
    int total() const
    {
        int s = 0;
        for (int x : letters) s += x;
        return s;
    }
    bool is_palindrome() const
    {
        return std::equal(letters.begin(), letters.end(), letters.rbegin());
    }
    bool operator==(const Word&) const = default;
};

inline void check_structure(const Word& v)
{
    if (v.letters.empty()) throw invalid_word("empty word");
    if (v.letters.size() % 2 == 0) throw invalid_word("word must have odd length c1 d1 ... cs");
    for (size_t i = 0; i < v.letters.size(); ++i)
        if (v.letters[i] < 1)
            throw invalid_word("letter " + std::to_string(i + 1) + " must be a positive integer");
}

inline Word parse_word(const std::string& text)
{
    Word v;
    std::string tok;
    std::string norm = text;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::istringstream is(norm);
    int pos = 0;
    while (is >> tok) {
        ++pos;
        size_t used = 0;
        long val = 0;
        try {
            val = std::stol(tok, &used);
        } catch (const std::exception&) {
            throw invalid_word("letter " + std::to_string(pos) + " ('" + tok + "') is not an integer");
        }
        if (used != tok.size())
            throw invalid_word("letter " + std::to_string(pos) + " ('" + tok + "') is not an integer");
        if (val < 1)
            throw invalid_word("letter " + std::to_string(pos) + " ('" + tok + "') must be >= 1");
        v.letters.push_back(static_cast<int>(val));
    }
    check_structure(v);
    return v;
}

inline std::string format_word(const std::vector<int>& letters)
{
    std::string s;
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(letters[i]);
    }
    return s;
}

inline std::string format_word(const Word& v) { return format_word(v.letters); }

struct DigitWord {
    std::vector<Digit> symbols;
    int length() const { return static_cast<int>(symbols.size()); }
};

inline std::string format_digit_word(const DigitWord& w, bool simplified = false)
{
    std::string s;
    for (size_t i = 0; i < w.symbols.size(); ++i) {
        if (i) s += ',';
        s += simplified ? std::to_string(w.symbols[i].k) : format_digit(w.symbols[i]);
    }
    return s;
}

inline void append(DigitWord& w, const std::vector<Digit>& part, int times = 1)
{
    for (int r = 0; r < times; ++r) w.symbols.insert(w.symbols.end(), part.begin(), part.end());
}

inline std::vector<Digit> repeat(Digit d, int times) { return std::vector<Digit>(std::max(times, 0), d); }

// r0 digit word k^{c1} (k+1)^{d1} ... k^{cs}
inline DigitWord digit_word_small(int k, const Word& v)
{
    check_structure(v);
    if (k < 1) throw invalid_word("small regime needs k >= 1");
    DigitWord w;
    for (size_t i = 0; i < v.size(); ++i)
        append(w, repeat(Digit{i % 2 == 0 ? k : k + 1, 1}, v.letters[i]));
    return w;
}

// ell0 digit word of length Sunder(k,v)
inline DigitWord digit_word_small_lower(int n, int k, const Word& v)
{
    check_structure(v);
    if (k < 1) throw invalid_word("small regime needs k >= 1");
    auto m = [](int j) { return Digit{j, 1}; };
    std::vector<Digit> w = repeat(m(-1), n - 2);
    w.push_back(m(-2));
    for (Digit d : repeat(m(-1), n - 3)) w.push_back(d);
    w.push_back(m(-2));
    auto block = [&](int kk) {
        std::vector<Digit> b = repeat(m(-1), n - 3);
        b.push_back(m(-2));
        for (int r = 0; r < kk - 1; ++r) b.insert(b.end(), w.begin(), w.end());
        return b;
    };
    auto Ck = block(k), D = block(k + 1);
    DigitWord out;
    append(out, w, k);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i == 0) append(out, Ck, v.letters[0] - 1);
        else if (i % 2 == 0) append(out, Ck, v.letters[i]);
        else append(out, D, v.letters[i]);
    }
    append(out, repeat(m(-1), n - 2));
    return out;
}

template <class Real>
Mobius<Real> matrix_R_small(const GroupParams<Real>& g, int k, const Word& v)
{
    return word_matrix(g, digit_word_small(k, v).symbols);
}

template <class Real>
Mobius<Real> matrix_L_small(const GroupParams<Real>& g, int k, const Word& v)
{
    Mobius<Real> C = gen_C<Real>();
    return inverse(C) * gen_A(g) * C * matrix_R_small(g, k, v);
}

// V-check restriction for k = 1: c_i <= n-2, and n-2 appears only as the word v = n-2
inline void check_vcheck(int n, const Word& v)
{
    for (int i = 0; i < v.blocks(); ++i) {
        if (v.c(i) > n - 2)
            throw invalid_word("for k = -1 every c-letter must be <= n-2");
        if (v.c(i) == n - 2 && v.size() != 1)
            throw invalid_word("for k = -1 the letter n-2 is only allowed as the single-letter word");
    }
}

// ell0 digit word (-k)^{c1} (-k-1)^{d1} ... (-k)^{cs}
inline DigitWord digit_word_large_lower(int k, const Word& v)
{
    check_structure(v);
    DigitWord w;
    for (size_t i = 0; i < v.size(); ++i)
        append(w, repeat(Digit{i % 2 == 0 ? -k : -k - 1, 1}, v.letters[i]));
    return w;
}

struct LargeDigitWord {
    DigitWord upper;  // r0 digits, length Sbar
    DigitWord lower;  // ell0 digits, length Sunder
    int e = 0;        // number of (1,2) digits in the r0 word
};

inline LargeDigitWord digit_word_large(int k, const Word& v, int n)
{
    check_structure(v);
    if (k < 1) throw invalid_word("large regime needs k >= 1 (level -k)");
    if (k == 1) check_vcheck(n, v);
    const Digit a{1, 1}, b{1, 2};
    LargeDigitWord out;
    DigitWord& w = out.upper;
    if (k >= 2) {
        std::vector<Digit> u = repeat(b, n - 2);
        u.push_back(a);
        auto E = [&](int kk) {
            std::vector<Digit> e{a};
            for (int r = 0; r < kk - 2; ++r) e.insert(e.end(), u.begin(), u.end());
            for (Digit d : repeat(b, n - 3)) e.push_back(d);
            return e;
        };
        append(w, repeat(b, n - 2));
        for (size_t i = 0; i < v.size(); ++i) append(w, i % 2 == 0 ? E(k) : E(k + 1), v.letters[i]);
    } else {
        int s = v.blocks();
        append(w, repeat(b, n - 2 - v.c(0)));
        for (int i = 0; i + 1 < s; ++i) {
            w.symbols.push_back(a);
            std::vector<Digit> f = repeat(b, n - 3);
            f.push_back(a);
            append(w, f, v.d(i) - 1);
            append(w, repeat(b, n - 3 - v.c(i + 1)));
        }
    }
    for (const Digit& d : w.symbols) out.e += d.l == 2;
    out.lower = digit_word_large_lower(k, v);
    return out;
}

template <class Real>
Mobius<Real> matrix_L_large(const GroupParams<Real>& g, int k, const Word& v)
{
    return word_matrix(g, digit_word_large_lower(k, v).symbols) * gen_A(g, -1);
}

template <class Real>
Mobius<Real> matrix_R_large(const GroupParams<Real>& g, int k, const Word& v)
{
    Mobius<Real> C = gen_C<Real>();
    return C * gen_A(g, -1) * C * matrix_L_large(g, k, v);
}

// Dictionary order on digit words under the cylinder order; a proper prefix is smaller.
inline int order_digits(const DigitWord& a, const DigitWord& b)
{
    size_t m = std::min(a.symbols.size(), b.symbols.size());
    for (size_t i = 0; i < m; ++i) {
        if (digit_less(a.symbols[i], b.symbols[i])) return -1;
        if (digit_less(b.symbols[i], a.symbols[i])) return 1;
    }
    if (a.symbols.size() == b.symbols.size()) return 0;
    return a.symbols.size() < b.symbols.size() ? -1 : 1;
}

// Alternating dictionary order: c-letters ascending, d-letters descending, c before d across classes.
inline int order_words(const std::vector<int>& a, const std::vector<int>& b)
{
    size_t m = std::min(a.size(), b.size());
    for (size_t i = 0; i < m; ++i) {
        if (a[i] == b[i]) continue;
        bool cls_d = i % 2 == 1;
        bool less = cls_d ? a[i] > b[i] : a[i] < b[i];
        return less ? -1 : 1;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

inline int order_words(const Word& a, const Word& b) { return order_words(a.letters, b.letters); }

// Shift by j blocks (drops c1 d1 ... cj dj)
inline Word block_shift(const Word& v, int j)
{
    Word out;
    if (2 * j < static_cast<int>(v.size())) out.letters.assign(v.letters.begin() + 2 * j, v.letters.end());
    return out;
}

inline bool self_dominant(const Word& v)
{
    for (int j = 1; j < v.blocks(); ++j)
        if (order_words(block_shift(v, j), v) > 0) return false;
    return true;
}

// Even-length tail word appended after a c-letter.
inline std::vector<int> v_prime(const Word& v)
{
    check_structure(v);
    int s = v.blocks();
    std::vector<int> out;
    if (v.c(0) != 1) {
        out = {1, v.c(0) - 1};
        for (int i = 1; i < s; ++i) {
            out.push_back(1);
            out.push_back(v.c(i));
        }
    } else {
        if (s < 2) throw unsupported_case("v' of the word 1 is not defined by the two-case rule");
        out = {v.d(0) + 1, 1};
        for (int i = 1; i + 1 < s; ++i) {
            out.push_back(v.d(i));
            out.push_back(1);
        }
    }
    return out;
}

// Suffix v'' from a parent decomposition v = u v''
inline std::vector<int> suffix_from_parent(const Word& v, const Word& parent)
{
    if (parent.size() >= v.size() || !std::equal(parent.letters.begin(), parent.letters.end(), v.letters.begin()))
        throw invalid_word("parent is not a proper prefix of the word");
    return std::vector<int>(v.letters.begin() + parent.size(), v.letters.end());
}

// Parent inferred as the unique proper odd-length prefix u (|u| >= 3) with v = u (u')^p w, p >= 1.
inline Word infer_parent(const Word& v)
{
    if (v.size() < 5) throw unsupported_case("theta for short words is not reconstructible here");
    std::vector<Word> found;
    for (size_t len = 3; len < v.size(); len += 2) {
        Word u;
        u.letters.assign(v.letters.begin(), v.letters.begin() + len);
        std::vector<int> up;
        try { up = v_prime(u); } catch (const unsupported_case&) { continue; }
        if (up.empty() || len + up.size() > v.size()) continue;
        if (std::equal(up.begin(), up.end(), v.letters.begin() + len)) found.push_back(u);
    }
    if (found.empty()) throw unsupported_case("no parent decomposition of the word could be inferred");
    if (found.size() > 1) throw unsupported_case("ambiguous parent decomposition; supply v'' explicitly");
    return found.front();
}

// Theta_q(v) = v (v')^q v''
inline Word theta(const Word& v, int q, const std::vector<int>& vpp)
{
    check_structure(v);
    if (q < 0) throw invalid_word("q must be >= 0");
    if (vpp.size() % 2 != 0) throw invalid_word("v'' must have even length");
    if (v.size() < 3) throw unsupported_case("theta for short words is not reconstructible here");
    auto vp = v_prime(v);
    Word out = v;
    for (int i = 0; i < q; ++i) out.letters.insert(out.letters.end(), vp.begin(), vp.end());
    out.letters.insert(out.letters.end(), vpp.begin(), vpp.end());
    check_structure(out);
    return out;
}

inline Word theta(const Word& v, int q)
{
    return theta(v, q, suffix_from_parent(v, infer_parent(v)));
}

// Recover (k, v) from an r0 word of the form k^{c1} (k+1)^{d1} ... k^{cs}
inline std::optional<std::pair<int, Word>> word_from_runs(const std::vector<int>& ks)
{
    if (ks.empty()) return std::nullopt;
    int k = ks.front();
    Word v;
    size_t i = 0;
    while (i < ks.size()) {
        size_t j = i;
        while (j < ks.size() && ks[j] == ks[i]) ++j;
        int expect = v.letters.size() % 2 == 0 ? k : k + 1;
        if (ks[i] != expect) return std::nullopt;
        v.letters.push_back(static_cast<int>(j - i));
        i = j;
    }
    if (v.letters.size() % 2 == 0) return std::nullopt;
    return std::make_pair(k, v);
}

} // namespace natext
