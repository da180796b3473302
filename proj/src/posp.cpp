#include "aitlab/posp.hpp"

#include <stdexcept>

namespace aitlab {

Threshold::Threshold(Rational v) : value(v) {
    if (v >= Rational(1, 1)) throw std::invalid_argument("Threshold: must be < 1");
}

bool posp_decide(const Formula& f, const Threshold& t, const TableOptions& opts) {
    std::uint64_t k = count_ones(f, opts);
    // k/2^n > a/b  <=>  k*b > a*2^n
    unsigned __int128 lhs = static_cast<unsigned __int128>(k) * t.value.den();
    unsigned __int128 rhs = static_cast<unsigned __int128>(t.value.num()) << f.num_vars();
    return lhs > rhs;
}

bool sat_decide(const Formula& f, const TableOptions& opts) {
    return posp_decide(f, Threshold(Rational(0, 1)), opts);
}

bool trace_is_monotone(const std::vector<TraceEntry>& queries) {
    // gamma > t1 (true) together with gamma <= t2 (false) forces t1 < t2.
    for (const auto& a : queries)
        for (const auto& b : queries)
            if (a.answer && !b.answer && a.threshold >= b.threshold) return false;
    return true;
}

ReductionTrace sharp_sat_via_posp(std::uint32_t n, const PospOracle& oracle) {
    if (n > 62) throw std::invalid_argument("sharp_sat_via_posp: n too large");
    ReductionTrace trace;
    std::uint64_t den = std::uint64_t{1} << n;
    std::uint64_t lo = 0, hi = den;  // invariant from answers so far: lo <= k <= hi
    std::optional<std::uint64_t> max_true;   // largest threshold numerator answered true
    std::optional<std::uint64_t> min_false;  // smallest threshold numerator answered false
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        Threshold t{Rational(mid, den)};
        bool ans = oracle(t);
        trace.queries.push_back({t.value, ans});
        if (ans) {
            if (min_false && mid >= *min_false) {
                trace.oracle_fault = true;
                return trace;
            }
            if (!max_true || mid > *max_true) max_true = mid;
            lo = mid + 1;
        } else {
            if (max_true && mid <= *max_true) {
                trace.oracle_fault = true;
                return trace;
            }
            if (!min_false || mid < *min_false) min_false = mid;
            hi = mid;
        }
    }
    trace.result = lo;
    return trace;
}

PospOracle make_posp_oracle(const Formula& f, const TableOptions& opts) {
    std::uint64_t k = count_ones(f, opts);
    std::uint32_t n = f.num_vars();
    return [k, n](const Threshold& t) {
        unsigned __int128 lhs = static_cast<unsigned __int128>(k) * t.value.den();
        unsigned __int128 rhs = static_cast<unsigned __int128>(t.value.num()) << n;
        return lhs > rhs;
    };
}

ReductionTrace sharp_sat_via_posp(const Formula& f, const TableOptions& opts) {
    return sharp_sat_via_posp(f.num_vars(), make_posp_oracle(f, opts));
}

BdResult bd_via_posp(const Rational& g0, const Rational& g1, const PospOracle& oracle) {
    if (!(g0 < g1)) throw std::invalid_argument("bd_via_posp: requires g0 < g1");
    Threshold t{g0};
    bool ans = oracle(t);
    return {ans ? BdAnswer::IsG1 : BdAnswer::IsG0, {{t.value, ans}}};
}

BdResult bd_search(const Rational& g0, const Rational& g1, const PospOracle& oracle) {
    if (!(g0 < g1)) throw std::invalid_argument("bd_search: requires g0 < g1");
    BdResult res{BdAnswer::IsG0, {}};
    // Interval known to contain gamma: [0, hi] until the first true answer,
    // (lo, hi] afterwards. Halve until it holds exactly one promised value.
    std::uint64_t lo_num = 0, hi_num = 1, den = 1;
    bool has_lo = false;
    auto contains = [&](const Rational& g) {
        if (Rational(hi_num, den) < g) return false;
        return !has_lo || Rational(lo_num, den) < g;
    };
    while (contains(g0) && contains(g1)) {
        if (den >= (std::uint64_t{1} << 50))
            throw std::runtime_error("bd_search: interval underflow");
        lo_num <<= 1;
        hi_num <<= 1;
        den <<= 1;
        std::uint64_t mid = (lo_num + hi_num) / 2;
        Threshold t{Rational(mid, den)};
        bool ans = oracle(t);
        res.queries.push_back({t.value, ans});
        if (ans) {
            lo_num = mid;
            has_lo = true;
        } else {
            hi_num = mid;
        }
    }
    res.answer = contains(g1) ? BdAnswer::IsG1 : BdAnswer::IsG0;
    return res;
}

}  // namespace aitlab
