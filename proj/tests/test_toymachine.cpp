#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "aitlab/toymachine.hpp"
#include "naive_interp.hpp"

using namespace aitlab;

TEST_CASE("decode_run worked examples") {
    {
        RunResult r = decode_run(ToyProgram::parse("00"), 100);
        CHECK(r.status == RunStatus::Halted);
        CHECK(r.output.empty());
        CHECK(r.steps == 1);
    }
    {
        RunResult r = decode_run(ToyProgram::parse("100100"), 100);
        CHECK(r.status == RunStatus::Halted);
        CHECK(r.output.to_string() == "10");
        CHECK(r.steps == 5);
    }
    {
        RunResult r = decode_run(ToyProgram::parse("01"), 100);
        CHECK(r.status == RunStatus::Invalid);  // bits exhausted without HALT
    }
    {
        // HALT with trailing bits: prefix is valid, the extension is not
        RunResult r = decode_run(ToyProgram::parse("001"), 100);
        CHECK(r.status == RunStatus::Invalid);
        CHECK(r.steps == 1);
    }
}

TEST_CASE("LOOP semantics") {
    // LOOP(count=2, len=2, body=EMIT1) HALT
    RunResult r = decode_run(ToyProgram::parse("110100101000"), 100);
    CHECK(r.status == RunStatus::Halted);
    CHECK(r.output.to_string() == "11");
    CHECK(r.steps == 6);  // LOOP + 2*(EMIT1 + bit) + HALT

    // nested: LOOP(2, LOOP(2, EMIT0)) HALT -> four zeros
    std::string inner = "1101001001";  // LOOP(2, len=2, EMIT0) with no halt
    std::string outer = "11" "010" "0001010" + inner + "00";
    RunResult nested = decode_run(ToyProgram::parse(outer), 1000);
    CHECK(nested.status == RunStatus::Halted);
    CHECK(nested.output.to_string() == "0000");

    // same program, budget too small
    RunResult oob = decode_run(ToyProgram::parse(outer), 5);
    CHECK(oob.status == RunStatus::OutOfBudget);

    // LOOP with truncated gamma payloads
    CHECK(decode_run(ToyProgram::parse("11"), 100).status == RunStatus::Invalid);
    CHECK(decode_run(ToyProgram::parse("111"), 100).status == RunStatus::Invalid);
    CHECK(decode_run(ToyProgram::parse("110"), 100).status == RunStatus::Invalid);
}

TEST_CASE("a long run is cheap to emit via LOOP") {
    // LOOP(count=64, len=2, body=EMIT1) HALT = 22 bits emitting 64 ones
    std::string prog = "11" "0000001000000" "010" "10" "00";
    REQUIRE(prog.size() == 22);
    RunResult r = decode_run(ToyProgram::parse(prog), 100000);
    CHECK(r.status == RunStatus::Halted);
    CHECK(r.output.size() == 64);
    CHECK(r.output.popcount() == 64);
}

TEST_CASE("independent interpreter agrees on all programs up to length 12") {
    for (int len = 1; len <= 12; ++len) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
            ToyProgram p{v, len};
            RunResult mine = decode_run(p, 200);
            naive::Outcome theirs = naive::run(p.to_string(), 200);
            CHECK(static_cast<int>(mine.status) == static_cast<int>(theirs.status));
            CHECK(mine.output.to_string() == theirs.output);
            CHECK(mine.steps == theirs.steps);
        }
    }
}

TEST_CASE("independent interpreter agrees on random longer programs") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20000; ++trial) {
        int len = 13 + static_cast<int>(rng() % 10);
        ToyProgram p{rng() & ((std::uint64_t{1} << len) - 1), len};
        RunResult mine = decode_run(p, 1000);
        naive::Outcome theirs = naive::run(p.to_string(), 1000);
        CHECK(static_cast<int>(mine.status) == static_cast<int>(theirs.status));
        CHECK(mine.output.to_string() == theirs.output);
        CHECK(mine.steps == theirs.steps);
    }
}

TEST_CASE("enumerate yields every candidate with its exact run result") {
    int yielded = 0, halted = 0;
    enumerate({2, 100, 1}, [&](const ToyProgram& p, const RunResult& r) {
        ++yielded;
        if (r.status == RunStatus::Halted) {
            ++halted;
            CHECK(p.to_string() == "00");
            CHECK(r.output.empty());
        }
    });
    CHECK(yielded == 6);  // 2^(max_len+1) - 2
    CHECK(halted == 1);

    // stream matches per-candidate decode_run, including synthesized entries
    std::uint64_t count = 0;
    enumerate({10, 200, 1}, [&](const ToyProgram& p, const RunResult& r) {
        ++count;
        RunResult direct = decode_run(p, 200);
        REQUIRE(direct.status == r.status);
        REQUIRE(direct.output == r.output);
        REQUIRE(direct.steps == r.steps);
    });
    CHECK(count == (std::uint64_t{1} << 11) - 2);
}

TEST_CASE("enumerate is deterministic") {
    std::vector<std::pair<std::uint64_t, int>> first, second;
    auto collect = [](std::vector<std::pair<std::uint64_t, int>>& sink) {
        return [&sink](const ToyProgram& p, const RunResult& r) {
            sink.emplace_back(p.bits ^ (p.len << 24), static_cast<int>(r.status));
        };
    };
    enumerate({9, 150, 1}, collect(first));
    enumerate({9, 150, 1}, collect(second));
    CHECK(first == second);
}

TEST_CASE("scan_halted stream is identical across thread counts") {
    auto gather = [](int threads) {
        std::vector<HaltedRec> recs;
        MachineBounds b{16, 10000, threads};
        scan_halted(b, [&](const HaltedRec& h) { recs.push_back(h); });
        return recs;
    };
    std::vector<HaltedRec> one = gather(1);
    std::vector<HaltedRec> four = gather(4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].prog == four[i].prog);
        CHECK(one[i].out_len == four[i].out_len);
        CHECK(one[i].out_prefix == four[i].out_prefix);
        CHECK(one[i].steps == four[i].steps);
    }
}

TEST_CASE("halting programs form an antichain under the prefix order") {
    // exhaustive prefix-freeness check at max_len 16
    std::set<std::pair<int, std::uint64_t>> seen;
    MachineBounds b{16, 10000, 1};
    bool violation = false;
    scan_halted(b, [&](const HaltedRec& h) {
        for (int c = 1; c < h.prog.len; ++c) {
            std::uint64_t prefix = h.prog.bits >> (h.prog.len - c);
            if (seen.count({c, prefix})) violation = true;
        }
        seen.insert({h.prog.len, h.prog.bits});
    });
    CHECK(!violation);
    CHECK(!seen.empty());
}

TEST_CASE("kraft sum exact values and bounds") {
    KraftCurve tiny = kraft_sum({2, 100, 1});
    CHECK(tiny.total == Dyadic(1, 2));  // only "00" halts
    REQUIRE(tiny.by_max_len.size() == 2);
    CHECK(tiny.by_max_len[0] == Dyadic::zero());

    KraftCurve curve = kraft_sum({16, 10000, 1});
    Dyadic prev = Dyadic::zero();
    for (const Dyadic& d : curve.by_max_len) {
        CHECK(d <= Dyadic::one());
        CHECK(prev <= d);  // nondecreasing in max_len
        prev = d;
    }
    CHECK(curve.total > Dyadic::zero());
    CHECK(!curve.stats.any_oob());
}

TEST_CASE("k_exact worked examples") {
    {
        ComplexityRecord rec = k_exact(BitString{}, {2, 100, 1});
        REQUIRE(rec.k_upper.has_value());
        CHECK(*rec.k_upper == 2);
        CHECK(rec.exhaustive);
        CHECK(rec.pu_lower == Dyadic(1, 2));
        CHECK(*rec.minus_log2_pu == doctest::Approx(2.0));
    }
    {
        ComplexityRecord rec = k_exact(BitString::parse("1"), {6, 1000, 1});
        REQUIRE(rec.k_upper.has_value());
        CHECK(*rec.k_upper == 4);  // EMIT1 HALT
        CHECK(rec.exhaustive);
        CHECK(rec.pu_lower >= Dyadic::pow2_neg(*rec.k_upper));
    }
    {
        // no printer of four zeros within 4 bits
        ComplexityRecord rec = k_exact(BitString::parse("0000"), {4, 1000, 1});
        CHECK(!rec.k_upper.has_value());
        CHECK(rec.pu_lower.is_zero());
    }
}

TEST_CASE("k_exact finds the LOOP printer for a 64-bit run of ones") {
    BitString x;
    for (int i = 0; i < 64; ++i) x.push_back(1);
    ComplexityRecord rec = k_exact(x, {22, 10000, 4});
    REQUIRE(rec.k_upper.has_value());
    CHECK(*rec.k_upper <= 22);       // the explicit LOOP construction
    CHECK(*rec.k_upper < 2 + 2 * 64);  // far below the straight-line printer
    CHECK(rec.exhaustive);
}

TEST_CASE("universal_probability examples and monotonicity") {
    CHECK(universal_probability(BitString{}, MatchMode::ExactOutput, {2, 100, 1}) ==
          Dyadic(1, 2));
    // prefix mode at the empty string sums every printer: the Kraft sum
    MachineBounds b{12, 10000, 1};
    CHECK(universal_probability(BitString{}, MatchMode::Prefix, b) == kraft_sum(b).total);

    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 10; ++trial) {
        BitString x;
        int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) x.push_back(static_cast<int>(rng() & 1));
        for (MatchMode mode : {MatchMode::ExactOutput, MatchMode::Prefix}) {
            Dyadic lo = universal_probability(x, mode, {10, 10000, 1});
            Dyadic hi = universal_probability(x, mode, {14, 10000, 1});
            CHECK(lo <= hi);  // superset of programs
        }
    }
}

TEST_CASE("pu_lower dominates 2^-k for every resolved string") {
    MachineBounds b{14, 10000, 1};
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 12; ++trial) {
        BitString x;
        int len = static_cast<int>(rng() % 5);
        for (int i = 0; i < len; ++i) x.push_back(static_cast<int>(rng() & 1));
        ComplexityRecord rec = k_exact(x, b);
        if (!rec.k_upper) continue;
        CHECK(rec.pu_lower >= Dyadic::pow2_neg(*rec.k_upper));
        CHECK(*rec.minus_log2_pu <= static_cast<double>(*rec.k_upper) + 1e-12);
    }
}

TEST_CASE("coding_gap zero for the single-printer case and nonnegative elsewhere") {
    ComplexityRecord empty = k_exact(BitString{}, {2, 100, 1});
    CHECK(coding_gap(empty) == doctest::Approx(0.0));

    MachineBounds b{14, 10000, 1};
    for (std::uint64_t v = 0; v < 8; ++v) {
        BitString x;
        for (int i = 0; i < 3; ++i) x.push_back(static_cast<int>((v >> i) & 1));
        ComplexityRecord rec = k_exact(x, b);
        REQUIRE(rec.k_upper.has_value());
        REQUIRE(rec.exhaustive);
        CHECK(coding_gap(rec) >= -1e-12);
    }

    ComplexityRecord unresolved = k_exact(BitString::parse("0000"), {4, 100, 1});
    CHECK_THROWS_WITH_AS(static_cast<void>(coding_gap(unresolved)),
                         doctest::Contains("unresolved"), std::runtime_error);
}

TEST_CASE("incompressibility census satisfies the counting bound") {
    // The shortest printer of an 8-bit string is 16 bits (LOOP of eight
    // zeros), so give the census room to resolve some strings.
    CensusReport rep = incompressibility_census(8, {16, 100000, 1});
    CHECK(!rep.partial);
    REQUIRE(!rep.rows.empty());
    std::uint64_t prev = UINT64_MAX;
    for (const CensusRow& row : rep.rows) {
        CHECK(row.count < row.bound);
        CHECK(row.count <= prev);  // nested events
        prev = row.count;
        if (8 - row.k <= 2) CHECK(row.count == 0);  // nothing prints below length 2
    }
    CHECK(rep.resolved > 0);
}

TEST_CASE("budget starvation marks results partial, not wrong") {
    // budget 5: any run emitting a few bits trips the budget
    CensusReport rep = incompressibility_census(8, {12, 5, 1});
    CHECK(rep.partial);
    for (const CensusRow& row : rep.rows) CHECK(row.count < row.bound);

    ComplexityRecord rec = k_exact(BitString::parse("1"), {8, 1, 1});
    CHECK(!rec.k_upper.has_value());  // EMIT1+HALT needs 3 steps
    CHECK(!rec.exhaustive);           // and shorter programs ran out of budget
}

TEST_CASE("census rejects bad arguments") {
    CHECK_THROWS_AS(static_cast<void>(incompressibility_census(13, {14, 1000, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(incompressibility_census(8, {3, 1000, 1})),
                    std::invalid_argument);
}

TEST_CASE("predict_next partitions printer mass exactly") {
    MachineBounds b{14, 10000, 1};
    BitString x = BitString::parse("00");
    PredictorState st = predict_next(x, b);
    // exact partition in units of 2^-max_len
    CHECK(st.pu_prefix0 + st.pu_prefix1 <= st.pu_prefix);
    // p0 + p1 + leak = 1 exactly: verify over a common denominator
    unsigned __int128 num = static_cast<unsigned __int128>(st.p0.num()) * st.p1.den() * st.leak.den() +
                            static_cast<unsigned __int128>(st.p1.num()) * st.p0.den() * st.leak.den() +
                            static_cast<unsigned __int128>(st.leak.num()) * st.p0.den() * st.p1.den();
    unsigned __int128 den = static_cast<unsigned __int128>(st.p0.den()) * st.p1.den() * st.leak.den();
    CHECK(num == den);

    PredictorState again = predict_next(x, b);
    CHECK(st.pu_prefix == again.pu_prefix);
    CHECK(st.p0 == again.p0);
    CHECK(st.p1 == again.p1);

    CHECK_THROWS_WITH_AS(static_cast<void>(predict_next(BitString::parse("0101101001"), {8, 1000, 1})),
                         doctest::Contains("unresolved"), std::runtime_error);
}

TEST_CASE("zero runs are the cheap continuation") {
    MachineBounds b{14, 10000, 1};
    BitString x = BitString::parse("0000");
    PredictorState st = predict_next(x, b);
    CHECK(st.p0 > st.p1);  // LOOP makes repetition cheap
}

TEST_CASE("prefix index agrees with the direct prefix-mode sum") {
    MachineBounds b{12, 10000, 1};
    PrefixIndex index(b, 16);
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 60; ++trial) {
        BitString x;
        int len = static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) x.push_back(static_cast<int>(rng() & 1));
        CHECK(index.mass(x) == universal_probability(x, MatchMode::Prefix, b));
    }
}

TEST_CASE("error series matches the predictor on the all-zeros path") {
    MachineBounds b{14, 10000, 1};
    ErrorSeries series = prediction_error_series({MeasureSpec::Kind::DiracZeros, {}}, 6, b);
    REQUIRE(series.entries.size() >= 4);
    for (const auto& e : series.entries) CHECK(e.s_n >= 0.0);
    // S_n = (sqrt(P(0|0^(n-1))) - 1)^2 + P(1|0^(n-1))
    for (const auto& e : series.entries) {
        BitString x;
        for (int i = 0; i < e.n - 1; ++i) x.push_back(0);
        PredictorState st = predict_next(x, b);
        double p0 = st.p0.to_double(), p1 = st.p1.to_double();
        double expect = (std::sqrt(p0) - 1.0) * (std::sqrt(p0) - 1.0) + p1;
        CHECK(e.s_n == doctest::Approx(expect).epsilon(1e-12));
    }
    // cumulative is a prefix sum
    double acc = 0.0;
    for (const auto& e : series.entries) {
        acc += e.s_n;
        CHECK(e.cumulative == doctest::Approx(acc));
    }
    CHECK(series.total == doctest::Approx(acc));
}

TEST_CASE("error series truncates at an unresolved support prefix") {
    // At tiny bounds the alternating path dies quickly.
    ErrorSeries series =
        prediction_error_series({MeasureSpec::Kind::DiracAlternating, {}}, 30, {8, 1000, 1});
    REQUIRE(series.truncated_at.has_value());
    CHECK(static_cast<int>(series.entries.size()) == *series.truncated_at - 1);
}

TEST_CASE("bernoulli series runs over full support") {
    ErrorSeries series = prediction_error_series(
        {MeasureSpec::Kind::Bernoulli, Dyadic(1, 1)}, 8, {12, 10000, 1});
    CHECK((series.truncated_at.has_value() || series.entries.size() == 8));
    for (const auto& e : series.entries) CHECK(e.s_n >= 0.0);
}
