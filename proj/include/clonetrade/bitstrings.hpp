#pragma once

#include "clonetrade/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace clonetrade {

// Site 1 is the most significant bit of `bits`, so integer order on `bits`
// equals lexicographic order on the printed 0/1 string.
class BitString {
  public:
    BitString() = default;
    BitString(int length, std::uint64_t bits);

    static BitString parse(const std::string &text);
    static BitString zeros(int length);
    static BitString ones(int length);
    // 1-based site indices.
    static BitString from_sites(int length, const std::vector<int> &sites);

    int length() const { return length_; }
    std::uint64_t bits() const { return bits_; }
    int weight() const { return weight_; }
    bool at(int site) const;
    std::vector<int> sites() const;
    std::string str() const;

    bool operator==(const BitString &o) const { return length_ == o.length_ && bits_ == o.bits_; }
    bool operator<(const BitString &o) const {
        return length_ != o.length_ ? length_ < o.length_ : bits_ < o.bits_;
    }

  private:
    int length_ = 0;
    std::uint64_t bits_ = 0;
    int weight_ = 0;
};

int weight(const BitString &x);
int dot(const BitString &x, const BitString &y);

struct SetOps {
    BitString union_;
    BitString intersection;
    BitString complement_x;
};
SetOps set_ops(const BitString &x, const BitString &y);

BitString bit_or(const BitString &x, const BitString &y);
BitString bit_and(const BitString &x, const BitString &y);
BitString complement(const BitString &x);

std::vector<BitString> enumerate_weight(int N, int w);
// Position of x in enumerate_weight(x.length(), x.weight()).
std::size_t canonical_index(const BitString &x);

Integer binom(long n, long k);
Rational binom_q(long n, long k);

}  // namespace clonetrade
