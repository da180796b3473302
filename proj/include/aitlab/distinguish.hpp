#pragma once

#include <cstdint>

namespace aitlab {

// Polarization reading: p = cos^2(theta).
struct PolarizationModel {
    double theta;
    double p;
};

PolarizationModel polarization_from_theta(double theta);

// One-sigma fluctuation of an m-trial frequency estimate: sqrt(p(1-p)/m).
double uncertainty(double p, std::uint64_t m);

// Delta-theta = Delta-p / |dp/dtheta| with dp/dtheta = -sin(2 theta); returns
// +infinity where the derivative vanishes (theta = 0, pi/2, pi).
double theta_uncertainty(double theta, std::uint64_t m);

// Literal predicate |p - p'| >= Delta p + Delta p'. At p == p' in the open
// interval this is false; at p == p' in {0,1} both deltas vanish and it is
// vacuously true.
bool distinguishable(double p, double p_prime, std::uint64_t m);

// arccos(sqrt(p1 p2) + sqrt(q1 q2)), clamped into [0, pi/2].
double stat_distance(double p1, double p2);

// Numerically integrates |dp/dtheta| / (2 sqrt(p(1-p))) over [theta1, theta2]
// in [0, pi/2]; agrees with theta2 - theta1 to integration tolerance.
// Arguments may be given in either order.
double stat_distance_theta(double theta1, double theta2);

// Greedy left-to-right packing of mutually distinguishable probabilities:
// from current, accept the smallest p'' > current with
// p'' - current = Delta(current) + Delta(p''), found by bisection to 1e-12,
// until the next point would pass p2.
std::uint64_t packing_count(double p1, double p2, std::uint64_t m);

// Smallest integer m with m >= (1-p2)/p2; the trial bound for telling
// p1 = 0 from p2.
std::uint64_t min_trials_from_zero(double p2);

// Everything the distinguishability verdict needs in one record.
struct DistinguishabilityReport {
    double p1, p2;
    std::uint64_t m;
    double dp1, dp2;
    bool verdict;
    double distance;
    std::uint64_t packing;
    std::uint64_t min_trials;     // meaningful when p1 == 0
    bool min_trials_applicable;
};

DistinguishabilityReport make_report(double p1, double p2, std::uint64_t m);

struct McReport {
    std::uint64_t decided_p1 = 0;
    std::uint64_t decided_p2 = 0;
    double error_rate = 0.0;   // fraction deciding against p_true
    double mean_ones = 0.0;    // average ones per run
};

// `runs` repetitions of m Bernoulli(p_true) draws, each decided between p1
// and p2 by maximum binomial likelihood (ties to p1). Per-run generators are
// split from the seed as splitmix64(seed XOR run * 0x9E3779B97F4A7C15), so
// results are identical for any thread count.
McReport mc_distinguish(double p_true, double p1, double p2, std::uint64_t m,
                        std::uint64_t runs, std::uint64_t seed, int threads = 1);

}  // namespace aitlab
