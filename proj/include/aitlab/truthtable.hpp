#pragma once

#include <cstdint>
#include <vector>

#include "aitlab/bits.hpp"
#include "aitlab/dyadic.hpp"
#include "aitlab/formula.hpp"

namespace aitlab {

// Digest of one emitted table: n, 2^n, exact ones count and gamma = k/2^n.
struct TableSummary {
    std::uint32_t n = 0;
    std::uint64_t length = 0;
    std::uint64_t ones = 0;
    Dyadic gamma;
};

// Consumer for the table bit stream. Words arrive in index order; bit t of a
// word is table bit (delivered_so_far + t).
class BitSink {
public:
    virtual ~BitSink() = default;
    virtual void append_word(std::uint64_t bits, int nbits) = 0;
};

class NullSink final : public BitSink {
public:
    void append_word(std::uint64_t, int) override {}
};

class BitStringSink final : public BitSink {
public:
    void append_word(std::uint64_t bits, int nbits) override { out.append_word(bits, nbits); }
    BitString out;
};

struct TableOptions {
    std::uint32_t cap = 30;  // largest n allowed for exhaustive work
    int threads = 1;         // chunks are committed in index order regardless
};

// Program p: stream the 2^n output bits of f in canonical order (bit i is
// eval at assignment i, x_j = (i >> (j-1)) & 1) and return the summary.
TableSummary emit_table(const Formula& f, BitSink& sink, const TableOptions& opts = {});

// Ones count of the table, word-parallel (64 assignments per AST pass).
std::uint64_t count_ones(const Formula& f, const TableOptions& opts = {});

TableSummary summarize(const Formula& f, const TableOptions& opts = {});

// H(gamma) = -g log2 g - (1-g) log2(1-g), with H(0) = H(1) = 0.
double binary_entropy(double gamma);

// Per-build interpreter constant for description_upper_bound; declared in
// output metadata, never compared across serializations.
inline constexpr std::uint64_t kDescriptionC0 = 16;

// c0 + bitlen(n) + self-delimiting AST length: an upper bound on the
// description of the emitted table relative to this build's serialization.
std::uint64_t description_upper_bound(const Formula& f);

enum class StringClass { Type1, Type2, Other };

const char* to_string(StringClass c);

// Polynomial budget P(n) = coeff * n^degree.
struct PolyBudget {
    std::uint64_t coeff = 1;
    std::uint32_t degree = 2;
    std::uint64_t eval(std::uint32_t n) const;
};

// Type1 iff min(k, 2^n - k) <= P(n); else Type2 iff |k - 2^(n-1)| <=
// P(n) * 2^(n/2) (checked exactly as diff^2 <= P(n)^2 * 2^n); else Other.
// Requires n >= 1.
StringClass classify(const TableSummary& ts, const PolyBudget& poly);

struct EnsembleBucket {
    Dyadic gamma;
    std::vector<std::uint32_t> members;  // ordinals into the generated batch
};

struct EnsembleSample {
    std::vector<Formula> formulas;
    std::vector<EnsembleBucket> buckets;  // sorted by gamma ascending
};

// `count` random width-3 CNFs over n variables with
// max(1, round(clause_density * n)) clauses, literals drawn uniformly iid.
// Buckets formulas by exact gamma. Deterministic given the seed.
EnsembleSample sample_ensemble(std::uint32_t n, std::uint32_t count, double clause_density,
                               std::uint64_t seed, const TableOptions& opts = {});

}  // namespace aitlab
