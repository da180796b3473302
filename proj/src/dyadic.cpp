#include "aitlab/dyadic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aitlab {

namespace {

constexpr int kMaxExp = 62;

}  // namespace

Dyadic::Dyadic(std::uint64_t num, int exp) : num_(num), exp_(exp) {
    if (exp < 0 || exp > kMaxExp)
        throw std::invalid_argument("Dyadic: exponent out of range");
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    while ((num_ & 1) == 0 && exp_ > 0) {
        num_ >>= 1;
        --exp_;
    }
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    int e = exp_ > o.exp_ ? exp_ : o.exp_;
    unsigned __int128 a = static_cast<unsigned __int128>(num_) << (e - exp_);
    unsigned __int128 b = static_cast<unsigned __int128>(o.num_) << (e - o.exp_);
    unsigned __int128 s = a + b;
    if (s > UINT64_MAX) throw std::overflow_error("Dyadic: sum overflows");
    return {static_cast<std::uint64_t>(s), e};
}

std::strong_ordering Dyadic::operator<=>(const Dyadic& o) const {
    int e = exp_ > o.exp_ ? exp_ : o.exp_;
    unsigned __int128 a = static_cast<unsigned __int128>(num_) << (e - exp_);
    unsigned __int128 b = static_cast<unsigned __int128>(o.num_) << (e - o.exp_);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

double Dyadic::to_double() const {
    return std::ldexp(static_cast<double>(num_), -exp_);
}

double Dyadic::minus_log2() const {
    if (num_ == 0) throw std::domain_error("Dyadic: -log2 of zero");
    return static_cast<double>(exp_) - std::log2(static_cast<double>(num_));
}

std::string Dyadic::to_string() const {
    return std::to_string(num_) + "/" + std::to_string(den());
}

Rational::Rational(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    std::uint64_t g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
}

Rational Rational::parse(std::string_view text) {
    auto bad = [&] { throw std::invalid_argument("Rational: cannot parse '" + std::string(text) + "'"); };
    if (text.empty()) bad();
    auto digits = [&](std::string_view s) -> std::uint64_t {
        if (s.empty() || s.size() > 18) bad();
        std::uint64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') bad();
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return v;
    };
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::uint64_t a = digits(text.substr(0, slash));
        std::uint64_t b = digits(text.substr(slash + 1));
        if (b == 0) bad();
        return {a, b};
    }
    auto dot = text.find('.');
    if (dot != std::string_view::npos) {
        std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
        std::uint64_t whole = ip.empty() ? 0 : digits(ip);
        if (fp.empty()) return {whole, 1};
        std::uint64_t frac = digits(fp);
        std::uint64_t scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        return {whole * scale + frac, scale};
    }
    return {digits(text), 1};
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
    unsigned __int128 a = static_cast<unsigned __int128>(num_) * o.den_;
    unsigned __int128 b = static_cast<unsigned __int128>(o.num_) * den_;
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace aitlab
