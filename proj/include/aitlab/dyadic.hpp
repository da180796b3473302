#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace aitlab {

// Exact nonnegative dyadic rational num / 2^exp, kept normalized: num is odd,
// or num == 0 and exp == 0. Program masses, Kraft sums and every gamma = k/2^n
// live here; decision paths never touch floating point. Exponents are capped
// at 62 so aligned sums of values <= 1 fit in uint64.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(std::uint64_t num, int exp);

    static Dyadic zero() { return {}; }
    static Dyadic one() { return {1, 0}; }
    // 2^-k
    static Dyadic pow2_neg(int k) { return {1, k}; }

    std::uint64_t num() const { return num_; }
    int exp() const { return exp_; }
    std::uint64_t den() const { return std::uint64_t{1} << exp_; }
    bool is_zero() const { return num_ == 0; }

    Dyadic operator+(const Dyadic& o) const;
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }

    std::strong_ordering operator<=>(const Dyadic& o) const;
    bool operator==(const Dyadic& o) const = default;

    double to_double() const;
    // -log2(value); requires a nonzero value
    double minus_log2() const;

    std::string to_string() const;  // "num/den"

private:
    std::uint64_t num_ = 0;
    int exp_ = 0;
};

// Exact nonnegative rational with reduced 64-bit numerator/denominator.
// Comparisons cross-multiply in 128 bits, which covers every range the lab
// produces (denominators up to 2^62).
class Rational {
public:
    Rational() = default;
    Rational(std::uint64_t num, std::uint64_t den);

    static Rational from_dyadic(const Dyadic& d) { return {d.num(), d.den()}; }
    // Accepts "3/8", "0.375", "1". Throws std::invalid_argument on anything else.
    static Rational parse(std::string_view text);

    std::uint64_t num() const { return num_; }
    std::uint64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    std::strong_ordering operator<=>(const Rational& o) const;
    bool operator==(const Rational& o) const = default;

    double to_double() const;
    std::string to_string() const;  // "num/den"

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

}  // namespace aitlab
