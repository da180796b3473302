#include "aitlab/truthtable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

namespace aitlab {

namespace {

void check_cap(const Formula& f, const TableOptions& opts) {
    if (f.num_vars() > opts.cap)
        throw std::invalid_argument("truthtable: n = " + std::to_string(f.num_vars()) +
                                    " exceeds cap " + std::to_string(opts.cap));
}

struct Chunk {
    std::uint64_t first_word;
    std::uint64_t word_count;
    std::uint64_t ones = 0;
    std::vector<std::uint64_t> words;  // filled only when a sink needs them
};

// Evaluates whole 64-lane words; the caller masks the tail when n < 6.
void eval_chunk(const Formula& f, Chunk& c, bool keep_words) {
    std::vector<std::uint64_t> scratch;
    if (keep_words) c.words.resize(c.word_count);
    for (std::uint64_t w = 0; w < c.word_count; ++w) {
        std::uint64_t word = f.eval64((c.first_word + w) << 6, scratch);
        c.ones += static_cast<std::uint64_t>(std::popcount(word));
        if (keep_words) c.words[w] = word;
    }
}

// Runs the table in index-ordered chunks, optionally materializing words.
// Chunks are evaluated concurrently and handed to `commit` in order.
template <class Commit>
std::uint64_t run_table(const Formula& f, const TableOptions& opts, bool keep_words,
                        Commit&& commit) {
    std::uint32_t n = f.num_vars();
    if (n < 6) {
        std::vector<std::uint64_t> scratch;
        std::uint64_t nbits = std::uint64_t{1} << n;
        std::uint64_t word = f.eval64(0, scratch) & ((std::uint64_t{1} << nbits) - 1);
        Chunk c{0, 1, static_cast<std::uint64_t>(std::popcount(word)), {word}};
        commit(c, static_cast<int>(nbits));
        return c.ones;
    }
    std::uint64_t total_words = std::uint64_t{1} << (n - 6);
    int threads = std::max(1, opts.threads);
    std::uint64_t chunk_words = std::max<std::uint64_t>(1, (total_words + threads - 1) / threads);
    std::vector<Chunk> chunks;
    for (std::uint64_t w = 0; w < total_words; w += chunk_words)
        chunks.push_back({w, std::min(chunk_words, total_words - w)});

    if (threads == 1 || chunks.size() == 1) {
        std::uint64_t ones = 0;
        for (Chunk& c : chunks) {
            eval_chunk(f, c, keep_words);
            ones += c.ones;
            commit(c, 64);
        }
        return ones;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks.size());
    for (Chunk& c : chunks)
        pool.emplace_back([&f, &c, keep_words] { eval_chunk(f, c, keep_words); });
    for (auto& t : pool) t.join();
    std::uint64_t ones = 0;
    for (Chunk& c : chunks) {
        ones += c.ones;
        commit(c, 64);
    }
    return ones;
}

}  // namespace

TableSummary emit_table(const Formula& f, BitSink& sink, const TableOptions& opts) {
    check_cap(f, opts);
    std::uint64_t ones = run_table(f, opts, /*keep_words=*/true, [&](const Chunk& c, int nbits) {
        for (std::uint64_t w = 0; w < c.word_count; ++w) sink.append_word(c.words[w], nbits);
    });
    std::uint32_t n = f.num_vars();
    return {n, std::uint64_t{1} << n, ones, Dyadic(ones, static_cast<int>(n))};
}

std::uint64_t count_ones(const Formula& f, const TableOptions& opts) {
    check_cap(f, opts);
    return run_table(f, opts, /*keep_words=*/false, [](const Chunk&, int) {});
}

TableSummary summarize(const Formula& f, const TableOptions& opts) {
    std::uint64_t k = count_ones(f, opts);
    std::uint32_t n = f.num_vars();
    return {n, std::uint64_t{1} << n, k, Dyadic(k, static_cast<int>(n))};
}

double binary_entropy(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::domain_error("binary_entropy: gamma outside [0,1]");
    if (gamma == 0.0 || gamma == 1.0) return 0.0;
    return -gamma * std::log2(gamma) - (1.0 - gamma) * std::log2(1.0 - gamma);
}

std::uint64_t description_upper_bound(const Formula& f) {
    std::uint32_t n = f.num_vars();
    std::uint64_t bitlen_n = n == 0 ? 1 : static_cast<std::uint64_t>(std::bit_width(n));
    return kDescriptionC0 + bitlen_n + f.encoded_length();
}

const char* to_string(StringClass c) {
    switch (c) {
        case StringClass::Type1: return "Type1";
        case StringClass::Type2: return "Type2";
        default: return "Other";
    }
}

std::uint64_t PolyBudget::eval(std::uint32_t n) const {
    unsigned __int128 v = coeff;
    for (std::uint32_t i = 0; i < degree; ++i) {
        v *= n;
        if (v > UINT64_MAX) throw std::overflow_error("PolyBudget: value overflows");
    }
    return static_cast<std::uint64_t>(v);
}

StringClass classify(const TableSummary& ts, const PolyBudget& poly) {
    if (ts.n == 0) throw std::invalid_argument("classify: requires n >= 1");
    std::uint64_t p = poly.eval(ts.n);
    std::uint64_t k = ts.ones;
    std::uint64_t zeros = ts.length - k;
    if (std::min(k, zeros) <= p) return StringClass::Type1;
    std::uint64_t half = std::uint64_t{1} << (ts.n - 1);
    std::uint64_t diff = k > half ? k - half : half - k;
    // |k - 2^(n-1)| <= P(n) * 2^(n/2), squared to stay in integers.
    unsigned __int128 lhs = static_cast<unsigned __int128>(diff) * diff;
    unsigned __int128 rhs = static_cast<unsigned __int128>(p) * p;
    if (rhs > (static_cast<unsigned __int128>(1) << 64)) return StringClass::Type2;  // band covers all
    rhs <<= ts.n;
    if (lhs <= rhs) return StringClass::Type2;
    return StringClass::Other;
}

namespace {

// Rejection-sampled uniform draw in [0, bound); avoids distribution objects
// whose output is not pinned across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t v = rng();
        if (v < limit) return v % bound;
    }
}

}  // namespace

EnsembleSample sample_ensemble(std::uint32_t n, std::uint32_t count, double clause_density,
                               std::uint64_t seed, const TableOptions& opts) {
    if (n == 0 || n > opts.cap) throw std::invalid_argument("sample_ensemble: n out of range");
    if (count == 0) throw std::invalid_argument("sample_ensemble: count must be >= 1");
    if (!(clause_density > 0.0)) throw std::invalid_argument("sample_ensemble: bad density");
    std::mt19937_64 rng(seed);
    std::uint64_t clauses = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(clause_density * n)));

    EnsembleSample sample;
    sample.formulas.reserve(count);
    std::map<std::pair<std::uint64_t, int>, std::vector<std::uint32_t>> buckets;
    for (std::uint32_t i = 0; i < count; ++i) {
        Formula f;
        std::vector<Formula::NodeId> clause_ids;
        clause_ids.reserve(clauses);
        for (std::uint64_t c = 0; c < clauses; ++c) {
            std::vector<Formula::NodeId> lits;
            for (int l = 0; l < 3; ++l) {
                std::uint32_t var = static_cast<std::uint32_t>(uniform_below(rng, n)) + 1;
                bool neg = (rng() & 1) != 0;
                Formula::NodeId id = f.add_var(var);
                if (neg) id = f.add_not(id);
                lits.push_back(id);
            }
            clause_ids.push_back(f.add_or(std::move(lits)));
        }
        f.set_root(f.add_and(std::move(clause_ids)));
        f.set_num_vars(n);
        Dyadic gamma = summarize(f, opts).gamma;
        buckets[{gamma.num(), gamma.exp()}].push_back(i);
        sample.formulas.push_back(std::move(f));
    }
    for (auto& [key, members] : buckets)
        sample.buckets.push_back({Dyadic(key.first, key.second), std::move(members)});
    std::sort(sample.buckets.begin(), sample.buckets.end(),
              [](const EnsembleBucket& a, const EnsembleBucket& b) { return a.gamma < b.gamma; });
    return sample;
}

}  // namespace aitlab
