#include "clonetrade/bitstrings.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace clonetrade;

TEST(BitString, Weight) {
    EXPECT_EQ(BitString::parse("0000").weight(), 0);
    EXPECT_EQ(BitString::parse("1011").weight(), 3);
    EXPECT_EQ(weight(BitString::parse("1111")), 4);
}

TEST(BitString, Dot) {
    EXPECT_EQ(dot(BitString::parse("1100"), BitString::parse("0011")), 0);
    EXPECT_EQ(dot(BitString::parse("1100"), BitString::parse("1100")), 2);
    EXPECT_EQ(dot(BitString::parse("1100"), BitString::parse("1010")), 1);
    EXPECT_THROW(dot(BitString::parse("110"), BitString::parse("1100")), std::invalid_argument);
}

TEST(BitString, SetOps) {
    auto s = set_ops(BitString::parse("1100"), BitString::parse("0110"));
    EXPECT_EQ(s.union_.str(), "1110");
    EXPECT_EQ(s.intersection.str(), "0100");
    EXPECT_EQ(s.complement_x.str(), "0011");
    auto z = set_ops(BitString::parse("0000"), BitString::parse("0000"));
    EXPECT_EQ(z.union_.str(), "0000");
    EXPECT_EQ(z.complement_x.str(), "1111");
    auto o = set_ops(BitString::parse("1111"), BitString::parse("1111"));
    EXPECT_EQ(o.intersection.str(), "1111");
    EXPECT_EQ(o.complement_x.str(), "0000");
}

TEST(BitString, ParseRejectsJunk) {
    EXPECT_THROW(BitString::parse(""), std::invalid_argument);
    EXPECT_THROW(BitString::parse("10a1"), std::invalid_argument);
}

TEST(BitString, FromSitesIsOneBased) {
    EXPECT_EQ(BitString::from_sites(4, {1}).str(), "1000");
    EXPECT_EQ(BitString::from_sites(4, {2, 4}).str(), "0101");
    EXPECT_EQ(BitString::from_sites(4, {2, 4}).sites(), (std::vector<int>{2, 4}));
}

TEST(Enumerate, AscendingOrder) {
    auto e = enumerate_weight(3, 1);
    ASSERT_EQ(e.size(), 3u);
    EXPECT_EQ(e[0].str(), "001");
    EXPECT_EQ(e[1].str(), "010");
    EXPECT_EQ(e[2].str(), "100");
    auto z = enumerate_weight(4, 0);
    ASSERT_EQ(z.size(), 1u);
    EXPECT_EQ(z[0].str(), "0000");
    auto p = enumerate_weight(4, 2);
    ASSERT_EQ(p.size(), 6u);
    EXPECT_EQ(p.front().str(), "0011");
    EXPECT_EQ(p.back().str(), "1100");
    EXPECT_THROW(enumerate_weight(3, 4), std::invalid_argument);
}

TEST(Enumerate, CanonicalIndexMatchesPosition) {
    for (int N = 1; N <= 8; ++N)
        for (int w = 0; w <= N; ++w) {
            auto e = enumerate_weight(N, w);
            for (std::size_t i = 0; i < e.size(); ++i) EXPECT_EQ(canonical_index(e[i]), i);
        }
}

TEST(Binom, Examples) {
    EXPECT_EQ(binom(3, 2), 3);
    EXPECT_EQ(binom(5, -1), 0);
    EXPECT_EQ(binom(30, 15), 155117520);
    EXPECT_EQ(binom(4, 7), 0);
}

TEST(Binom, PascalIdentity) {
    for (int n = 1; n <= 40; ++n)
        for (int k = 0; k <= n; ++k) EXPECT_EQ(binom(n, k), binom(n - 1, k) + binom(n - 1, k - 1)) << n << ' ' << k;
}

TEST(Enumerate, CountIsBinomial) {
    for (int N = 1; N <= 12; ++N)
        for (int w = 0; w <= N; ++w) EXPECT_EQ(Integer(enumerate_weight(N, w).size()), binom(N, w));
}

TEST(BitString, RandomPairProperties) {
    std::mt19937 rng(1);
    for (int k = 0; k < 500; ++k) {
        int N = 1 + rng() % 20;
        std::uint64_t mask = (std::uint64_t{1} << N) - 1;
        BitString x(N, rng() & mask), y(N, rng() & mask);
        EXPECT_EQ(dot(x, y), bit_and(x, y).weight());
        EXPECT_EQ(x.weight() + complement(x).weight(), N);
        EXPECT_EQ(bit_or(x, y).weight(), x.weight() + y.weight() - dot(x, y));
    }
}

TEST(Rational, Parse) {
    EXPECT_EQ(parse_rational("5/6"), Rational(5, 6));
    EXPECT_EQ(parse_rational("0.8"), Rational(4, 5));
    EXPECT_EQ(parse_rational("0.08"), Rational(2, 25));
    EXPECT_EQ(parse_rational("-1.5e-1"), Rational(-3, 20));
    EXPECT_EQ(parse_rational("007"), Rational(7));
    EXPECT_EQ(rational_from_double(0.8), Rational(4, 5));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
    EXPECT_EQ(to_string(Rational(10, 4)), "5/2");
    EXPECT_EQ(format_double(5.0 / 6), "0.833333333333333");
}
