#include "clonetrade/rational.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace clonetrade {

std::string to_string(const Rational &r) {
    Integer num = numerator(r);
    Integer den = denominator(r);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

double to_double(const Rational &r) {
    return r.convert_to<double>();
}

static bool all_digits(const std::string &s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

Rational parse_rational(const std::string &raw) {
    std::string text;
    for (char c : raw) {
        if (c != ' ' && c != '\t') text.push_back(c);
    }
    if (text.empty()) throw std::invalid_argument("empty rational");

    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + raw);
        return num / den;
    }

    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string mantissa;
    long exponent = 0;
    auto epos = text.find_first_of("eE", pos);
    std::string body = text.substr(pos, epos == std::string::npos ? std::string::npos : epos - pos);
    if (epos != std::string::npos) {
        std::string etext = text.substr(epos + 1);
        auto [ptr, ec] = std::from_chars(etext.data(), etext.data() + etext.size(), exponent);
        if (ec != std::errc() || ptr != etext.data() + etext.size()) {
            throw std::invalid_argument("bad exponent: " + raw);
        }
    }
    auto dot = body.find('.');
    std::string int_part = body.substr(0, dot);
    std::string frac_part = dot == std::string::npos ? "" : body.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("bad number: " + raw);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
        throw std::invalid_argument("bad number: " + raw);
    }
    mantissa = int_part + frac_part;
    exponent -= static_cast<long>(frac_part.size());

    // a leading zero would make the integer parser read octal
    mantissa.erase(0, std::min(mantissa.find_first_not_of('0'), mantissa.size()));
    Rational value{mantissa.empty() ? Integer(0) : Integer(mantissa)};
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0) {
        value /= Rational(ten_pow);
    } else {
        value *= Rational(ten_pow);
    }
    return negative ? Rational(-value) : value;
}

Rational rational_from_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::invalid_argument("unrepresentable double");
    return parse_rational(std::string(buf, ptr));
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

}  // namespace clonetrade
