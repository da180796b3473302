#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aitlab/dyadic.hpp"
#include "aitlab/formula.hpp"
#include "aitlab/truthtable.hpp"

namespace aitlab {

// POSP threshold, held exactly. Valid range is [0, 1).
struct Threshold {
    Rational value;
    explicit Threshold(Rational v);
};

// Answers "is the table's ones-density strictly greater than t" for a fixed
// formula. The reductions accept any oracle so tests can swap in faulty ones.
using PospOracle = std::function<bool(const Threshold&)>;

// True iff k/2^n > t, decided by exact rational comparison.
bool posp_decide(const Formula& f, const Threshold& t, const TableOptions& opts = {});

// SAT as the single-threshold special case: posp at t = 0.
bool sat_decide(const Formula& f, const TableOptions& opts = {});

struct TraceEntry {
    Rational threshold;
    bool answer;
};

struct ReductionTrace {
    std::vector<TraceEntry> queries;
    std::optional<std::uint64_t> result;  // k; empty when the oracle faulted
    bool oracle_fault = false;
};

// True iff no pair of entries violates monotonicity (an answer `true` at a
// threshold >= one answered `false`).
bool trace_is_monotone(const std::vector<TraceEntry>& queries);

// Bisection from POSP answers to the exact ones count: integer bounds
// lo <= k <= hi starting at (0, 2^n), querying mid/2^n with strict-greater
// semantics. At most n+1 oracle calls.
ReductionTrace sharp_sat_via_posp(std::uint32_t n, const PospOracle& oracle);
ReductionTrace sharp_sat_via_posp(const Formula& f, const TableOptions& opts = {});

// Builds the honest oracle (counts once, answers exactly).
PospOracle make_posp_oracle(const Formula& f, const TableOptions& opts = {});

enum class BdAnswer { IsG0, IsG1 };

struct BdResult {
    BdAnswer answer;
    std::vector<TraceEntry> queries;
};

// Promise decision between gamma = g0 and gamma = g1 (g0 < g1): a single
// query at t = g0 settles it, since gamma > g0 iff gamma = g1 under the
// promise.
BdResult bd_via_posp(const Rational& g0, const Rational& g1, const PospOracle& oracle);

// Debug-mode bisection: halves a dyadic interval around the promised pair
// until only one candidate remains. More queries, same answer.
BdResult bd_search(const Rational& g0, const Rational& g1, const PospOracle& oracle);

}  // namespace aitlab
