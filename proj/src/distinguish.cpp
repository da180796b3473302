#include "aitlab/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace aitlab {

namespace {

void check_prob(double p, const char* who) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(who) + ": probability outside [0,1]");
}

constexpr double kHalfPi = std::numbers::pi / 2.0;

}  // namespace

PolarizationModel polarization_from_theta(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::domain_error("polarization: theta outside [0, pi]");
    double c = std::cos(theta);
    return {theta, c * c};
}

double uncertainty(double p, std::uint64_t m) {
    check_prob(p, "uncertainty");
    if (m == 0) throw std::domain_error("uncertainty: m must be >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

double theta_uncertainty(double theta, std::uint64_t m) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::domain_error("theta_uncertainty: theta outside [0, pi]");
    if (m == 0) throw std::domain_error("theta_uncertainty: m must be >= 1");
    double deriv = std::fabs(std::sin(2.0 * theta));
    // stationary points of p(theta); the tolerance absorbs sin(pi) != 0 in
    // floating point
    if (deriv < 1e-12) return std::numeric_limits<double>::infinity();
    double c = std::cos(theta);
    double p = c * c;
    return uncertainty(p, m) / deriv;
}

bool distinguishable(double p, double p_prime, std::uint64_t m) {
    check_prob(p, "distinguishable");
    check_prob(p_prime, "distinguishable");
    return std::fabs(p - p_prime) >= uncertainty(p, m) + uncertainty(p_prime, m);
}

double stat_distance(double p1, double p2) {
    check_prob(p1, "stat_distance");
    check_prob(p2, "stat_distance");
    double inner = std::sqrt(p1 * p2) + std::sqrt((1.0 - p1) * (1.0 - p2));
    inner = std::clamp(inner, 0.0, 1.0);
    return std::clamp(std::acos(inner), 0.0, kHalfPi);
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

double fisher_integrand(double theta) {
    double c = std::cos(theta);
    double p = c * c;
    double deriv = std::fabs(std::sin(2.0 * theta));
    double denom = 2.0 * std::sqrt(p * (1.0 - p));
    return deriv / denom;
}

}  // namespace

double stat_distance_theta(double theta1, double theta2) {
    if (!(theta1 >= 0.0 && theta1 <= kHalfPi) || !(theta2 >= 0.0 && theta2 <= kHalfPi))
        throw std::domain_error("stat_distance_theta: theta outside [0, pi/2]");
    double a = std::min(theta1, theta2), b = std::max(theta1, theta2);
    if (a == b) return 0.0;
    // Composite 16-point Gauss-Legendre; nodes are interior, so the removable
    // endpoint singularities of the integrand are never evaluated.
    constexpr int kPanels = 64;
    double h = (b - a) / kPanels;
    double total = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        double mid = a + (i + 0.5) * h;
        double half = 0.5 * h;
        double acc = 0.0;
        for (int j = 0; j < 8; ++j) {
            acc += kGlWeight[j] *
                   (fisher_integrand(mid - half * kGlNode[j]) + fisher_integrand(mid + half * kGlNode[j]));
        }
        total += acc * half;
    }
    return total;
}

namespace {

// Residual for the packing step: g(p) = (p - cur) - Delta(cur) - Delta(p).
// Starting negative just right of cur, g dips once and rises, so the first
// sign change bisection finds is the smallest root.
double packing_residual(double p, double cur, double dcur, double m) {
    return (p - cur) - dcur - std::sqrt(p * (1.0 - p) / m);
}

}  // namespace

std::uint64_t packing_count(double p1, double p2, std::uint64_t m) {
    check_prob(p1, "packing_count");
    check_prob(p2, "packing_count");
    if (!(p1 < p2)) throw std::domain_error("packing_count: requires p1 < p2");
    if (m == 0) throw std::domain_error("packing_count: m must be >= 1");
    double md = static_cast<double>(m);
    std::uint64_t count = 0;
    double cur = p1;
    while (cur < p2 && cur < 1.0) {
        double dcur = std::sqrt(cur * (1.0 - cur) / md);
        // Bracket the next point: expand until the residual turns positive.
        double step = std::max(1e-9 / md, 2.0 * dcur);
        double hi = cur + step;
        while (hi < 1.0 && packing_residual(hi, cur, dcur, md) <= 0.0) {
            step *= 2.0;
            hi = cur + step;
        }
        double next;
        if (hi >= 1.0 && packing_residual(1.0, cur, dcur, md) <= 0.0) {
            // Residual never turns positive below 1; the only possible root
            // is the boundary itself (Delta vanishes there).
            if (packing_residual(1.0, cur, dcur, md) < -1e-12) break;
            next = 1.0;
        } else {
            if (hi > 1.0) hi = 1.0;
            double lo = cur;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                if (packing_residual(mid, cur, dcur, md) <= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            next = 0.5 * (lo + hi);
        }
        if (next > p2) break;
        if (!(next > cur)) throw std::runtime_error("packing_count: step failed to advance");
        ++count;
        cur = next;
    }
    return count;
}

std::uint64_t min_trials_from_zero(double p2) {
    if (!(p2 > 0.0 && p2 <= 1.0)) throw std::domain_error("min_trials_from_zero: p2 must be in (0,1]");
    long double q = (1.0L - static_cast<long double>(p2)) / static_cast<long double>(p2);
    auto satisfies = [&](std::uint64_t m) {
        return static_cast<long double>(m) >= q;
    };
    std::uint64_t m = static_cast<std::uint64_t>(ceill(q));
    while (m > 0 && satisfies(m - 1)) --m;
    while (!satisfies(m)) ++m;
    return m;
}

DistinguishabilityReport make_report(double p1, double p2, std::uint64_t m) {
    DistinguishabilityReport r{};
    r.p1 = p1;
    r.p2 = p2;
    r.m = m;
    r.dp1 = uncertainty(p1, m);
    r.dp2 = uncertainty(p2, m);
    r.verdict = distinguishable(p1, p2, m);
    r.distance = stat_distance(p1, p2);
    double lo = std::min(p1, p2), hi = std::max(p1, p2);
    r.packing = lo < hi ? packing_count(lo, hi, m) : 0;
    r.min_trials_applicable = lo == 0.0 && hi > 0.0;
    r.min_trials = r.min_trials_applicable ? min_trials_from_zero(hi) : 0;
    return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Per-run stream: state seeded from (seed, run); draws are splitmix64 steps.
struct RunRng {
    std::uint64_t state;
    RunRng(std::uint64_t seed, std::uint64_t run)
        : state(splitmix64(seed ^ (run * 0x9E3779B97F4A7C15ull))) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

double bernoulli_loglik(double p, std::uint64_t ones, std::uint64_t m) {
    if (p <= 0.0) return ones == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return ones == m ? 0.0 : -std::numeric_limits<double>::infinity();
    double s = static_cast<double>(ones);
    double f = static_cast<double>(m - ones);
    return s * std::log(p) + f * std::log(1.0 - p);
}

}  // namespace

McReport mc_distinguish(double p_true, double p1, double p2, std::uint64_t m,
                        std::uint64_t runs, std::uint64_t seed, int threads) {
    check_prob(p_true, "mc_distinguish");
    check_prob(p1, "mc_distinguish");
    check_prob(p2, "mc_distinguish");
    if (p_true != p1 && p_true != p2)
        throw std::domain_error("mc_distinguish: p_true must equal p1 or p2");
    if (m == 0 || runs == 0) throw std::domain_error("mc_distinguish: m and runs must be >= 1");

    // Draw threshold for one Bernoulli sample: u < p * 2^64.
    unsigned __int128 threshold;
    if (p_true >= 1.0)
        threshold = (static_cast<unsigned __int128>(1) << 64);
    else
        threshold = static_cast<unsigned __int128>(
            std::ldexp(static_cast<long double>(p_true), 64));

    auto run_block = [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t& wins2,
                         std::uint64_t& total_ones) {
        for (std::uint64_t r = lo; r < hi; ++r) {
            RunRng rng(seed, r);
            std::uint64_t ones = 0;
            for (std::uint64_t i = 0; i < m; ++i)
                if (static_cast<unsigned __int128>(rng.next()) < threshold) ++ones;
            total_ones += ones;
            double ll1 = bernoulli_loglik(p1, ones, m);
            double ll2 = bernoulli_loglik(p2, ones, m);
            if (ll2 > ll1) ++wins2;  // ties go to p1
        }
    };

    std::uint64_t wins2 = 0, total_ones = 0;
    int t = std::max(1, threads);
    if (t == 1 || runs < 2) {
        run_block(0, runs, wins2, total_ones);
    } else {
        std::uint64_t block = (runs + t - 1) / static_cast<std::uint64_t>(t);
        std::vector<std::uint64_t> w(static_cast<std::size_t>(t), 0), o(static_cast<std::size_t>(t), 0);
        std::vector<std::thread> pool;
        for (int i = 0; i < t; ++i) {
            std::uint64_t lo = block * static_cast<std::uint64_t>(i);
            std::uint64_t hi = std::min(runs, lo + block);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, i] { run_block(lo, hi, w[static_cast<std::size_t>(i)], o[static_cast<std::size_t>(i)]); });
        }
        for (auto& th : pool) th.join();
        for (int i = 0; i < t; ++i) {
            wins2 += w[static_cast<std::size_t>(i)];
            total_ones += o[static_cast<std::size_t>(i)];
        }
    }
    McReport rep;
    rep.decided_p2 = wins2;
    rep.decided_p1 = runs - wins2;
    bool truth_is_p2 = p_true == p2 && p1 != p2;
    std::uint64_t wrong = truth_is_p2 ? rep.decided_p1 : rep.decided_p2;
    rep.error_rate = static_cast<double>(wrong) / static_cast<double>(runs);
    rep.mean_ones = static_cast<double>(total_ones) / static_cast<double>(runs);
    return rep;
}

}  // namespace aitlab
