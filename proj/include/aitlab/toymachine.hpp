#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aitlab/bits.hpp"
#include "aitlab/dyadic.hpp"

namespace aitlab {

// Instruction set (opcodes read MSB-first):
//   00  HALT   valid stop iff every program bit has been consumed
//   01  EMIT0
//   10  EMIT1
//   11  LOOP   Elias-gamma repeat count, Elias-gamma body length L, then L
//              body bits; the body is re-executed (and re-decoded) count
//              times, and may itself contain LOOPs.
// A program is valid iff execution reaches HALT having consumed exactly all
// its bits, which makes the set of valid programs prefix-free. Every decoded
// opcode and every emitted bit costs one step against the budget.
inline constexpr const char* kInstructionSetVersion = "toy-1";

inline constexpr int kHardMaxProgramLen = 34;
inline constexpr int kDefaultMaxLenCap = 30;

// A candidate program: `bits` holds the string with bit i (in read order) at
// position len-1-i, so ascending integer value is ascending lex order.
struct ToyProgram {
    std::uint64_t bits = 0;
    int len = 0;

    int bit(int i) const { return static_cast<int>((bits >> (len - 1 - i)) & 1); }
    std::string to_string() const;
    static ToyProgram parse(std::string_view zeros_and_ones);
    bool operator==(const ToyProgram&) const = default;
};

enum class RunStatus { Halted, OutOfBudget, Invalid };

const char* to_string(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::Invalid;
    BitString output;     // bits emitted before the run ended
    std::uint64_t steps = 0;
};

// Enumeration/search bounds; every complexity claim is relative to these.
struct MachineBounds {
    int max_len = 18;
    std::uint64_t step_budget = 100000;
    int threads = 1;
};

RunResult decode_run(const ToyProgram& p, std::uint64_t step_budget);

// Yields every bit string of length 1..max_len exactly once in
// length-then-lex order together with its RunResult (exactly what decode_run
// would return). Descendants of a program that halted cleanly are not
// executed; their results are synthesized from the prefix's run. The
// RunResult reference is reused between calls.
void enumerate(const MachineBounds& bounds,
               const std::function<void(const ToyProgram&, const RunResult&)>& fn);

// Distilled record of one halting program, enough for every aggregate:
// output length, and the first 64 output bits packed LSB-first.
struct HaltedRec {
    ToyProgram prog;
    std::uint64_t out_len = 0;
    std::uint64_t out_prefix = 0;
    std::uint64_t steps = 0;
};

struct ScanStats {
    std::vector<std::uint64_t> oob_by_len;     // index = program length
    std::vector<std::uint64_t> halted_by_len;
    bool any_oob() const;
    // True iff no program of length < limit ran out of budget.
    bool exhaustive_below(int limit) const;
};

// Runs the full enumeration and streams HaltedRecs in (length, lex) order.
// With threads > 1 each length is split into lex blocks executed
// concurrently and merged back in order, so the stream is identical for any
// thread count.
ScanStats scan_halted(const MachineBounds& bounds,
                      const std::function<void(const HaltedRec&)>& fn);

// K estimate for x: shortest halting printer found within bounds, with an
// honest exhaustiveness flag and the exact universal-probability lower bound
// accumulated over all found printers. |x| <= 64.
struct ComplexityRecord {
    BitString x;
    std::optional<int> k_upper;
    bool exhaustive = false;  // every shorter program reached a definite verdict
    Dyadic pu_lower;          // exact-output printer mass within bounds
    std::optional<double> minus_log2_pu;
    Dyadic kraft_total;       // mass of all halting programs seen by the scan
    MachineBounds bounds;
};

ComplexityRecord k_exact(const BitString& x, const MachineBounds& bounds);

enum class MatchMode { ExactOutput, Prefix };

// Sum of 2^-l(p) over found programs whose output equals x (ExactOutput) or
// begins with x (Prefix); a lower bound on the true value by construction.
Dyadic universal_probability(const BitString& x, MatchMode mode, const MachineBounds& bounds);

struct KraftCurve {
    std::vector<Dyadic> by_max_len;  // entry i = mass of halting programs of length <= i+1
    Dyadic total;
    ScanStats stats;
};

// Kraft sum over all halting programs found, with the per-length running
// curve. Must be <= 1 exactly at every bound.
KraftCurve kraft_sum(const MachineBounds& bounds);

// c_x = k_upper + log2(pu_lower) >= 0. Requires a resolved record
// (printer found with exhaustive = true); throws std::runtime_error
// "unresolved within bounds" otherwise.
double coding_gap(const ComplexityRecord& rec);

struct CensusRow {
    int k;
    std::uint64_t count;  // strings of length L with resolved K < L-k
    std::uint64_t bound;  // 2^(L-k), the census bound
};

struct CensusReport {
    int string_len = 0;
    std::vector<CensusRow> rows;  // k = 1 .. L-1
    bool partial = false;         // an OutOfBudget verdict blocked exhaustiveness
    std::uint64_t resolved = 0;   // strings of length L with any printer found
    MachineBounds bounds;
};

// Incompressibility census over all strings of length L (L <= 12,
// max_len >= L-1): for each k >= 1 counts strings with K < L-k.
CensusReport incompressibility_census(int string_len, const MachineBounds& bounds);

// Conditional next-bit prediction from prefix-mode universal probability.
struct PredictorState {
    BitString prefix;
    Dyadic pu_prefix, pu_prefix0, pu_prefix1;
    Rational p0, p1, leak;  // exact; p0 + p1 + leak = 1
    MachineBounds bounds;
};

// Requires pu_prefix(x) > 0 at the bounds; throws std::runtime_error
// "prefix unresolved at these bounds" otherwise. |x| <= 63.
PredictorState predict_next(const BitString& x, const MachineBounds& bounds);

// Mass-per-output-prefix trie built from one enumeration; masses are exact
// counts of 2^-max_len units.
class PrefixIndex {
public:
    PrefixIndex(const MachineBounds& bounds, int depth_cap);
    // Total mass of halting programs whose output begins with `prefix`
    // (|prefix| <= depth_cap), in units of 2^-max_len.
    std::uint64_t units(const BitString& prefix) const;
    Dyadic mass(const BitString& prefix) const;
    int depth_cap() const { return depth_cap_; }
    const ScanStats& stats() const { return stats_; }

private:
    struct TNode {
        std::uint32_t child[2] = {0, 0};
        std::uint64_t units = 0;
    };
    std::vector<TNode> nodes_;
    int depth_cap_;
    int mass_exp_;
    ScanStats stats_;
};

// Reference measures for the prediction error series.
struct MeasureSpec {
    enum class Kind { DiracZeros, DiracAlternating, Bernoulli } kind = Kind::DiracZeros;
    Dyadic bernoulli_r;  // used only for Kind::Bernoulli; must be dyadic in (0,1)
};

struct ErrorSeriesEntry {
    int n;
    double s_n;
    double cumulative;
};

struct ErrorSeries {
    std::vector<ErrorSeriesEntry> entries;
    std::optional<int> truncated_at;  // first n whose support prefix was unresolved
    double total = 0.0;
};

// S_n(a) = sum over mu-support prefixes x of length n-1 of
// mu(x) * (sqrt(P(a|x)) - sqrt(mu(a|x)))^2, summed over a in {0,1}, for
// n = 1..horizon. Dirac measures follow their single support path; Bernoulli
// sums over all prefixes (horizon <= 24).
ErrorSeries prediction_error_series(const MeasureSpec& mu, int horizon,
                                    const MachineBounds& bounds);

}  // namespace aitlab
