#include "clonetrade/bitstrings.hpp"

#include <bit>
#include <stdexcept>

namespace clonetrade {

BitString::BitString(int length, std::uint64_t bits) : length_(length), bits_(bits) {
    if (length < 1 || length > 63) throw std::invalid_argument("bit string length must be in [1, 63]");
    if (bits >> length) throw std::invalid_argument("bits exceed string length");
    weight_ = std::popcount(bits);
}

BitString BitString::parse(const std::string &text) {
    std::uint64_t b = 0;
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0/1 characters: " + text);
        b = (b << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return BitString(static_cast<int>(text.size()), b);
}

BitString BitString::zeros(int length) { return BitString(length, 0); }

BitString BitString::ones(int length) { return BitString(length, (std::uint64_t{1} << length) - 1); }

BitString BitString::from_sites(int length, const std::vector<int> &sites) {
    std::uint64_t b = 0;
    for (int s : sites) {
        if (s < 1 || s > length) throw std::invalid_argument("site out of range");
        b |= std::uint64_t{1} << (length - s);
    }
    return BitString(length, b);
}

bool BitString::at(int site) const {
    return (bits_ >> (length_ - site)) & 1u;
}

std::vector<int> BitString::sites() const {
    std::vector<int> out;
    for (int s = 1; s <= length_; ++s) {
        if (at(s)) out.push_back(s);
    }
    return out;
}

std::string BitString::str() const {
    std::string s(length_, '0');
    for (int i = 0; i < length_; ++i) {
        if (at(i + 1)) s[i] = '1';
    }
    return s;
}

static void check_lengths(const BitString &x, const BitString &y) {
    if (x.length() != y.length()) throw std::invalid_argument("bit string length mismatch");
}

int weight(const BitString &x) { return x.weight(); }

int dot(const BitString &x, const BitString &y) {
    check_lengths(x, y);
    return std::popcount(x.bits() & y.bits());
}

BitString bit_or(const BitString &x, const BitString &y) {
    check_lengths(x, y);
    return BitString(x.length(), x.bits() | y.bits());
}

BitString bit_and(const BitString &x, const BitString &y) {
    check_lengths(x, y);
    return BitString(x.length(), x.bits() & y.bits());
}

BitString complement(const BitString &x) {
    return BitString(x.length(), ~x.bits() & ((std::uint64_t{1} << x.length()) - 1));
}

SetOps set_ops(const BitString &x, const BitString &y) {
    return {bit_or(x, y), bit_and(x, y), complement(x)};
}

std::vector<BitString> enumerate_weight(int N, int w) {
    if (N < 1 || N > 63) throw std::invalid_argument("N must be in [1, 63]");
    if (w < 0 || w > N) throw std::invalid_argument("weight must satisfy 0 <= w <= N");
    std::vector<BitString> out;
    if (w == 0) {
        out.emplace_back(N, 0);
        return out;
    }
    // Gosper's hack walks same-popcount integers in increasing order.
    std::uint64_t v = (std::uint64_t{1} << w) - 1;
    const std::uint64_t limit = std::uint64_t{1} << N;
    while (v < limit) {
        out.emplace_back(N, v);
        std::uint64_t t = v | (v - 1);
        std::uint64_t next = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
        if (next <= v) break;
        v = next;
    }
    return out;
}

std::size_t canonical_index(const BitString &x) {
    // Combinatorial number system: sum over set bits of binom(position, order).
    std::size_t rank = 0;
    long order = 0;
    for (int bit = 0; bit < x.length(); ++bit) {
        if ((x.bits() >> bit) & 1u) {
            ++order;
            rank += binom(bit, order).convert_to<std::size_t>();
        }
    }
    return rank;
}

Integer binom(long n, long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    Integer r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

Rational binom_q(long n, long k) { return Rational(binom(n, k)); }

}  // namespace clonetrade
