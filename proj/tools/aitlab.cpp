// aitlab: every lab operation behind one binary with machine-readable output.
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 unresolved
// within the declared enumeration bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include "aitlab/distinguish.hpp"
#include "aitlab/posp.hpp"
#include "aitlab/toymachine.hpp"
#include "aitlab/truthtable.hpp"

using nlohmann::ordered_json;
using namespace aitlab;

namespace {

constexpr const char* kVersion = "0.1.0";

// Outcome that is not an error: the search bounds were too small.
struct Unresolved : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ordered_json rational_json(const Rational& r) {
    return ordered_json{{"num", r.num()}, {"den", r.den()}};
}

ordered_json dyadic_json(const Dyadic& d) {
    return ordered_json{{"num", d.num()}, {"den", d.den()}};
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

struct Output {
    std::string subcommand;
    ordered_json params;
    ordered_json results;
    bool toymachine = false;
    std::optional<std::uint64_t> seed;
    bool with_timestamp = true;
    std::string csv;  // when nonempty, printed instead of the JSON

    void print() const {
        if (!csv.empty()) {
            std::fputs(csv.c_str(), stdout);
            return;
        }
        ordered_json manifest;
        manifest["tool"] = "aitlab";
        manifest["version"] = kVersion;
        manifest["subcommand"] = subcommand;
        manifest["params"] = params;
        if (toymachine) manifest["instruction_set"] = kInstructionSetVersion;
        if (seed) manifest["seed"] = *seed;
        if (with_timestamp) manifest["timestamp"] = utc_timestamp();
        manifest["results"] = results;
        std::fputs(manifest.dump(2).c_str(), stdout);
        std::fputc('\n', stdout);
    }
};

// --- shared option bundles -------------------------------------------------

struct FormulaArgs {
    std::string dimacs;
    std::string expr;
    std::uint32_t nvars_override = 0;
    std::uint32_t cap = 30;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dimacs", dimacs, "DIMACS CNF file");
        cmd->add_option("--expr", expr, "formula expression, e.g. \"(x1 | x2) & !x3\"");
        cmd->add_option("--nvars", nvars_override, "pad the variable count (table length is 2^n)");
        cmd->add_option("--cap", cap, "largest n allowed for exhaustive work")->capture_default_str();
    }

    Formula load() const {
        if (dimacs.empty() == expr.empty())
            throw CLI::ValidationError("exactly one of --dimacs/--expr is required");
        Formula f = dimacs.empty() ? parse_expr(expr) : parse_dimacs_file(dimacs);
        if (nvars_override) f.set_num_vars(nvars_override);
        return f;
    }

    ordered_json echo() const {
        ordered_json j;
        if (!dimacs.empty()) j["dimacs"] = dimacs;
        if (!expr.empty()) j["expr"] = expr;
        if (nvars_override) j["nvars"] = nvars_override;
        j["cap"] = cap;
        return j;
    }
};

struct BoundsArgs {
    int max_len = 18;
    std::uint64_t budget = 100000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-len", max_len, "longest program length enumerated")
            ->capture_default_str();
        cmd->add_option("--budget", budget, "step budget per program run")->capture_default_str();
    }

    MachineBounds bounds(int threads) const { return {max_len, budget, threads}; }

    void echo(ordered_json& j) const {
        j["max_len"] = max_len;
        j["budget"] = budget;
    }
};

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

ordered_json summary_json(const TableSummary& ts) {
    return ordered_json{{"n", ts.n},
                        {"length", ts.length},
                        {"ones", ts.ones},
                        {"gamma", dyadic_json(ts.gamma)}};
}

BitString parse_bits_arg(const std::string& text, const char* what) {
    try {
        return BitString::parse(text);
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError(std::string(what) + " must be a string of 0/1");
    }
}

// Sink that packs table bits into a file, LSB-first within byte.
class FileSink final : public BitSink {
public:
    explicit FileSink(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ParseError("cannot open output file '" + path + "'", 0);
    }
    void append_word(std::uint64_t bits, int nbits) override {
        buf_.append_word(bits, nbits);
        if (buf_.size() >= 1 << 20) flush_full_bytes();
    }
    void finish() {
        flush_full_bytes();
        auto rest = buf_.to_bytes();
        out_.write(reinterpret_cast<const char*>(rest.data()),
                   static_cast<std::streamsize>(rest.size()));
        out_.flush();
    }

private:
    void flush_full_bytes() {
        // keep any partial byte in the buffer
        if (buf_.size() < 8) return;
        std::size_t whole = buf_.size() / 8;
        auto bytes = buf_.to_bytes();
        out_.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(whole));
        BitString tail;
        for (std::size_t i = whole * 8; i < buf_.size(); ++i) tail.push_back(buf_.bit(i));
        buf_ = std::move(tail);
    }

    std::ofstream out_;
    BitString buf_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aitlab: truth tables, #SAT reductions, a prefix-free toy machine, and the Bernoulli distinguishability calculus"};
    app.require_subcommand(1);

    int threads_flag = 0;
    bool no_timestamp = false;
    app.add_option("--threads", threads_flag, "worker threads (0 = machine parallelism)")
        ->capture_default_str();
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp from the manifest");

    Output out;
    std::function<void()> action;

    // ---- table ------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("table", "emit the 2^n table bits of a formula");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        auto out_path = std::make_shared<std::string>();
        cmd->add_option("--out", *out_path, "write packed bits here plus a .json sidecar");
        cmd->callback([&, fa, out_path] {
            action = [&, fa, out_path] {
                Formula f = fa->load();
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                TableSummary ts;
                if (out_path->empty()) {
                    NullSink sink;
                    ts = emit_table(f, sink, opts);
                } else {
                    FileSink sink(*out_path);
                    ts = emit_table(f, sink, opts);
                    sink.finish();
                    ordered_json sidecar{{"n", ts.n},
                                         {"k", ts.ones},
                                         {"gamma_num", ts.gamma.num()},
                                         {"gamma_den", ts.gamma.den()}};
                    std::ofstream side(*out_path + ".json");
                    side << sidecar.dump(2) << "\n";
                }
                out.subcommand = "table";
                out.params = fa->echo();
                if (!out_path->empty()) out.params["out"] = *out_path;
                out.results = summary_json(ts);
                if (!out_path->empty()) {
                    out.results["out_file"] = *out_path;
                    out.results["sidecar"] = *out_path + ".json";
                }
            };
        });
    }

    // ---- count ------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("count", "#SAT by exhaustive word-parallel counting");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        cmd->callback([&, fa] {
            action = [&, fa] {
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                TableSummary ts = summarize(fa->load(), opts);
                out.subcommand = "count";
                out.params = fa->echo();
                out.results = summary_json(ts);
            };
        });
    }

    // ---- posp -------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("posp", "is the ones-density greater than a threshold");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        auto thr = std::make_shared<std::string>();
        cmd->add_option("--threshold", *thr, "exact rational in [0,1), e.g. 3/8")->required();
        cmd->callback([&, fa, thr] {
            action = [&, fa, thr] {
                Threshold t{Rational::parse(*thr)};
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                Formula f = fa->load();
                bool ans = posp_decide(f, t, opts);
                out.subcommand = "posp";
                out.params = fa->echo();
                out.params["threshold"] = *thr;
                out.results = {{"threshold", rational_json(t.value)},
                               {"exceeds", ans},
                               {"gamma", dyadic_json(summarize(f, opts).gamma)}};
            };
        });
    }

    // ---- sat --------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("sat", "satisfiability as POSP at threshold 0");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        cmd->callback([&, fa] {
            action = [&, fa] {
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                out.subcommand = "sat";
                out.params = fa->echo();
                out.results = {{"satisfiable", sat_decide(fa->load(), opts)}};
            };
        });
    }

    // ---- sharpsat ---------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("sharpsat", "#SAT via the POSP bisection reduction");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        auto via = std::make_shared<bool>(true);
        auto check = std::make_shared<bool>(false);
        cmd->add_flag("--via-posp,!--direct", *via, "reduce through the POSP oracle (default)");
        cmd->add_flag("--check", *check, "cross-check against the direct count");
        cmd->callback([&, fa, via, check] {
            action = [&, fa, via, check] {
                Formula f = fa->load();
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                out.subcommand = "sharpsat";
                out.params = fa->echo();
                out.params["via_posp"] = *via;
                if (!*via) {
                    out.results = {{"k", count_ones(f, opts)}, {"n", f.num_vars()}};
                    return;
                }
                ReductionTrace tr = sharp_sat_via_posp(f, opts);
                ordered_json queries = ordered_json::array();
                for (const auto& q : tr.queries)
                    queries.push_back(
                        {{"threshold", rational_json(q.threshold)}, {"answer", q.answer}});
                out.results = {{"n", f.num_vars()},
                               {"oracle_fault", tr.oracle_fault},
                               {"query_count", tr.queries.size()},
                               {"queries", queries}};
                if (tr.result) out.results["k"] = *tr.result;
                if (*check) out.results["check_direct_count"] = count_ones(f, opts);
            };
        });
    }

    // ---- bd ---------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("bd", "promise decision between two densities");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        auto g0 = std::make_shared<std::string>(), g1 = std::make_shared<std::string>();
        auto search = std::make_shared<bool>(false);
        auto check = std::make_shared<bool>(false);
        cmd->add_option("--g0", *g0, "first promised gamma (rational)")->required();
        cmd->add_option("--g1", *g1, "second promised gamma (rational)")->required();
        cmd->add_flag("--search", *search, "use the debug-mode bisection instead of one query");
        cmd->add_flag("--check-promise", *check, "verify the promise by direct count");
        cmd->callback([&, fa, g0, g1, search, check] {
            action = [&, fa, g0, g1, search, check] {
                Formula f = fa->load();
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                Rational r0 = Rational::parse(*g0), r1 = Rational::parse(*g1);
                PospOracle oracle = make_posp_oracle(f, opts);
                BdResult res = *search ? bd_search(r0, r1, oracle) : bd_via_posp(r0, r1, oracle);
                out.subcommand = "bd";
                out.params = fa->echo();
                out.params["g0"] = *g0;
                out.params["g1"] = *g1;
                out.params["search"] = *search;
                ordered_json queries = ordered_json::array();
                for (const auto& q : res.queries)
                    queries.push_back(
                        {{"threshold", rational_json(q.threshold)}, {"answer", q.answer}});
                out.results = {{"answer", res.answer == BdAnswer::IsG1 ? "g1" : "g0"},
                               {"g0", rational_json(r0)},
                               {"g1", rational_json(r1)},
                               {"query_count", res.queries.size()},
                               {"queries", queries}};
                if (*check) {
                    Dyadic gamma = summarize(f, opts).gamma;
                    Rational actual = Rational::from_dyadic(gamma);
                    out.results["promise_holds"] = (actual == r0 || actual == r1);
                    out.results["gamma"] = dyadic_json(gamma);
                }
            };
        });
    }

    // ---- kexact -----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("kexact", "shortest printer of x within bounds");
        auto x = std::make_shared<std::string>();
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--x", *x, "target bit string")->required();
        ba->attach(cmd);
        cmd->callback([&, x, ba] {
            action = [&, x, ba] {
                BitString target = parse_bits_arg(*x, "--x");
                ComplexityRecord rec = k_exact(target, ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "kexact";
                out.toymachine = true;
                out.params["x"] = *x;
                ba->echo(out.params);
                out.results = {{"x", *x},
                               {"found", rec.k_upper.has_value()},
                               {"exhaustive", rec.exhaustive},
                               {"pu_lower", dyadic_json(rec.pu_lower)},
                               {"kraft_sum", dyadic_json(rec.kraft_total)}};
                if (rec.k_upper) out.results["k_upper"] = *rec.k_upper;
                if (rec.minus_log2_pu) out.results["minus_log2_pu"] = *rec.minus_log2_pu;
                if (!rec.k_upper) throw Unresolved("no printer of x within the declared bounds");
            };
        });
    }

    // ---- uprob ------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("uprob", "universal probability lower bound for x");
        auto x = std::make_shared<std::string>();
        auto mode = std::make_shared<std::string>("exact");
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--x", *x, "target bit string")->required();
        cmd->add_option("--mode", *mode, "exact | prefix")
            ->check(CLI::IsMember({"exact", "prefix"}))
            ->capture_default_str();
        ba->attach(cmd);
        cmd->callback([&, x, mode, ba] {
            action = [&, x, mode, ba] {
                BitString target = parse_bits_arg(*x, "--x");
                MatchMode mm = *mode == "prefix" ? MatchMode::Prefix : MatchMode::ExactOutput;
                Dyadic pu = universal_probability(target, mm,
                                                  ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "uprob";
                out.toymachine = true;
                out.params["x"] = *x;
                out.params["mode"] = *mode;
                ba->echo(out.params);
                out.results = {{"x", *x}, {"mode", *mode}, {"pu", dyadic_json(pu)}};
                if (!pu.is_zero()) out.results["minus_log2_pu"] = pu.minus_log2();
            };
        });
    }

    // ---- kraft ------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("kraft", "Kraft sum over all halting programs found");
        auto ba = std::make_shared<BoundsArgs>();
        ba->attach(cmd);
        cmd->callback([&, ba] {
            action = [&, ba] {
                KraftCurve curve = kraft_sum(ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "kraft";
                out.toymachine = true;
                ba->echo(out.params);
                ordered_json rows = ordered_json::array();
                for (std::size_t i = 0; i < curve.by_max_len.size(); ++i)
                    rows.push_back({{"max_len", i + 1}, {"sum", dyadic_json(curve.by_max_len[i])}});
                out.results = {{"total", dyadic_json(curve.total)},
                               {"le_one", curve.total <= Dyadic::one()},
                               {"curve", rows}};
            };
        });
    }

    // ---- codinggap --------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("codinggap", "c_x = K(x) + log2 P_U(x) within bounds");
        auto x = std::make_shared<std::string>();
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--x", *x, "target bit string")->required();
        ba->attach(cmd);
        cmd->callback([&, x, ba] {
            action = [&, x, ba] {
                BitString target = parse_bits_arg(*x, "--x");
                ComplexityRecord rec = k_exact(target, ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "codinggap";
                out.toymachine = true;
                out.params["x"] = *x;
                ba->echo(out.params);
                if (!rec.k_upper || !rec.exhaustive)
                    throw Unresolved("coding gap unresolved within bounds");
                out.results = {{"x", *x},
                               {"k_upper", *rec.k_upper},
                               {"pu_lower", dyadic_json(rec.pu_lower)},
                               {"gap", coding_gap(rec)}};
            };
        });
    }

    // ---- census -----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("census", "incompressibility census over {0,1}^L");
        auto len = std::make_shared<int>(10);
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--len", *len, "string length L (<= 12)")->required();
        ba->attach(cmd);
        cmd->callback([&, len, ba] {
            action = [&, len, ba] {
                CensusReport rep =
                    incompressibility_census(*len, ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "census";
                out.toymachine = true;
                out.params["len"] = *len;
                ba->echo(out.params);
                ordered_json rows = ordered_json::array();
                for (const CensusRow& r : rep.rows)
                    rows.push_back({{"k", r.k}, {"count", r.count}, {"bound", r.bound}});
                out.results = {{"len", rep.string_len},
                               {"partial", rep.partial},
                               {"resolved", rep.resolved},
                               {"rows", rows}};
            };
        });
    }

    // ---- predict ----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("predict", "conditional next-bit prediction");
        auto prefix = std::make_shared<std::string>();
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--prefix", *prefix, "observed bit prefix")->required();
        ba->attach(cmd);
        cmd->callback([&, prefix, ba] {
            action = [&, prefix, ba] {
                BitString x = parse_bits_arg(*prefix, "--prefix");
                out.subcommand = "predict";
                out.toymachine = true;
                out.params["prefix"] = *prefix;
                ba->echo(out.params);
                PredictorState st;
                try {
                    st = predict_next(x, ba->bounds(resolve_threads(threads_flag)));
                } catch (const std::runtime_error& e) {
                    throw Unresolved(e.what());
                }
                out.results = {{"prefix", *prefix},
                               {"pu_prefix", dyadic_json(st.pu_prefix)},
                               {"pu_prefix0", dyadic_json(st.pu_prefix0)},
                               {"pu_prefix1", dyadic_json(st.pu_prefix1)},
                               {"p0", rational_json(st.p0)},
                               {"p1", rational_json(st.p1)},
                               {"leak", rational_json(st.leak)},
                               {"p0_real", st.p0.to_double()},
                               {"p1_real", st.p1.to_double()}};
            };
        });
    }

    // ---- sseries ----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("sseries", "summed squared prediction error series");
        auto mu = std::make_shared<std::string>("dirac0");
        auto r = std::make_shared<std::string>("1/2");
        auto horizon = std::make_shared<int>(32);
        auto csv = std::make_shared<bool>(false);
        auto ba = std::make_shared<BoundsArgs>();
        cmd->add_option("--mu", *mu, "dirac0 | dirac01 | bernoulli")
            ->check(CLI::IsMember({"dirac0", "dirac01", "bernoulli"}))
            ->capture_default_str();
        cmd->add_option("--r", *r, "Bernoulli rate (dyadic rational)")->capture_default_str();
        cmd->add_option("--horizon", *horizon, "number of prediction steps")->capture_default_str();
        cmd->add_flag("--csv", *csv, "emit n,s_n,cumulative as CSV");
        ba->attach(cmd);
        cmd->callback([&, mu, r, horizon, csv, ba] {
            action = [&, mu, r, horizon, csv, ba] {
                MeasureSpec spec;
                if (*mu == "dirac0") spec.kind = MeasureSpec::Kind::DiracZeros;
                else if (*mu == "dirac01") spec.kind = MeasureSpec::Kind::DiracAlternating;
                else {
                    spec.kind = MeasureSpec::Kind::Bernoulli;
                    Rational rate = Rational::parse(*r);
                    // require a dyadic rate
                    if ((rate.den() & (rate.den() - 1)) != 0)
                        throw CLI::ValidationError("--r must be dyadic (denominator a power of 2)");
                    int exp = 0;
                    for (std::uint64_t d = rate.den(); d > 1; d >>= 1) ++exp;
                    spec.bernoulli_r = Dyadic(rate.num(), exp);
                }
                ErrorSeries series = prediction_error_series(
                    spec, *horizon, ba->bounds(resolve_threads(threads_flag)));
                out.subcommand = "sseries";
                out.toymachine = true;
                out.params["mu"] = *mu;
                if (spec.kind == MeasureSpec::Kind::Bernoulli) out.params["r"] = *r;
                out.params["horizon"] = *horizon;
                ba->echo(out.params);
                if (*csv) {
                    std::string rows = "n,s_n,cumulative\n";
                    for (const auto& e : series.entries)
                        rows += std::to_string(e.n) + "," + std::to_string(e.s_n) + "," +
                                std::to_string(e.cumulative) + "\n";
                    out.csv = rows;
                    return;
                }
                ordered_json rows = ordered_json::array();
                for (const auto& e : series.entries)
                    rows.push_back({{"n", e.n}, {"s_n", e.s_n}, {"cumulative", e.cumulative}});
                out.results = {{"mu", *mu},
                               {"horizon", *horizon},
                               {"total", series.total},
                               {"entries", rows}};
                if (series.truncated_at) out.results["truncated_at"] = *series.truncated_at;
            };
        });
    }

    // ---- statdist ---------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("statdist", "statistical distance between two coins");
        auto p1 = std::make_shared<double>(), p2 = std::make_shared<double>();
        auto m = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--p1", *p1, "first probability")->required();
        cmd->add_option("--p2", *p2, "second probability")->required();
        cmd->add_option("--m", *m, "trial count for the distinguishability report");
        cmd->callback([&, p1, p2, m] {
            action = [&, p1, p2, m] {
                out.subcommand = "statdist";
                out.params = {{"p1", *p1}, {"p2", *p2}};
                out.results = {{"p1", *p1}, {"p2", *p2}, {"distance", stat_distance(*p1, *p2)}};
                if (*m > 0) {
                    out.params["m"] = *m;
                    DistinguishabilityReport rep = make_report(*p1, *p2, *m);
                    ordered_json rj{{"m", rep.m},
                                    {"dp1", rep.dp1},
                                    {"dp2", rep.dp2},
                                    {"distinguishable", rep.verdict},
                                    {"packing_count", rep.packing}};
                    if (rep.min_trials_applicable) rj["min_trials"] = rep.min_trials;
                    out.results["report"] = rj;
                }
            };
        });
    }

    // ---- theta ------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("theta", "statistical distance between orientations");
        auto t1 = std::make_shared<double>(), t2 = std::make_shared<double>();
        auto m = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--theta1", *t1, "first orientation in [0, pi/2]")->required();
        cmd->add_option("--theta2", *t2, "second orientation in [0, pi/2]")->required();
        cmd->add_option("--m", *m, "trial count for orientation uncertainties");
        cmd->callback([&, t1, t2, m] {
            action = [&, t1, t2, m] {
                out.subcommand = "theta";
                out.params = {{"theta1", *t1}, {"theta2", *t2}};
                double integral = stat_distance_theta(*t1, *t2);
                double c1 = std::cos(*t1), c2 = std::cos(*t2);
                out.results = {{"theta1", *t1},
                               {"theta2", *t2},
                               {"distance_integral", integral},
                               {"angle_difference", std::fabs(*t2 - *t1)},
                               {"closed_form", stat_distance(c1 * c1, c2 * c2)}};
                if (*m > 0) {
                    out.params["m"] = *m;
                    out.results["dtheta1"] = theta_uncertainty(*t1, *m);
                    out.results["dtheta2"] = theta_uncertainty(*t2, *m);
                }
            };
        });
    }

    // ---- pack -------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("pack", "greedy packing of distinguishable probabilities");
        auto p1 = std::make_shared<double>(), p2 = std::make_shared<double>();
        auto ms = std::make_shared<std::vector<std::uint64_t>>();
        auto csv = std::make_shared<bool>(false);
        cmd->add_option("--p1", *p1, "left endpoint")->required();
        cmd->add_option("--p2", *p2, "right endpoint")->required();
        cmd->add_option("--m", *ms, "trial count(s); repeat for a curve")->required();
        cmd->add_flag("--csv", *csv, "emit m,count,count_per_sqrt_m as CSV");
        cmd->callback([&, p1, p2, ms, csv] {
            action = [&, p1, p2, ms, csv] {
                out.subcommand = "pack";
                out.params = {{"p1", *p1}, {"p2", *p2}, {"m", *ms}};
                std::string rows_csv = "m,count,count_per_sqrt_m\n";
                ordered_json rows = ordered_json::array();
                for (std::uint64_t m : *ms) {
                    std::uint64_t c = packing_count(*p1, *p2, m);
                    double norm = static_cast<double>(c) / std::sqrt(static_cast<double>(m));
                    rows.push_back({{"m", m}, {"count", c}, {"count_per_sqrt_m", norm}});
                    rows_csv += std::to_string(m) + "," + std::to_string(c) + "," +
                                std::to_string(norm) + "\n";
                }
                if (*csv) {
                    out.csv = rows_csv;
                    return;
                }
                out.results = {{"p1", *p1},
                               {"p2", *p2},
                               {"distance", stat_distance(*p1, *p2)},
                               {"entries", rows}};
            };
        });
    }

    // ---- mintrials --------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("mintrials", "trial bound for distinguishing 0 from p2");
        auto p2 = std::make_shared<double>();
        cmd->add_option("--p2", *p2, "nonzero probability")->required();
        cmd->callback([&, p2] {
            action = [&, p2] {
                out.subcommand = "mintrials";
                out.params = {{"p2", *p2}};
                out.results = {{"p2", *p2}, {"m", min_trials_from_zero(*p2)}};
            };
        });
    }

    // ---- mc ---------------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("mc", "Monte Carlo two-coin decision experiment");
        auto pt = std::make_shared<double>(), p1 = std::make_shared<double>(),
             p2 = std::make_shared<double>();
        auto m = std::make_shared<std::uint64_t>(), runs = std::make_shared<std::uint64_t>();
        auto seed = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--p-true", *pt, "true Bernoulli parameter (= p1 or p2)")->required();
        cmd->add_option("--p1", *p1, "first hypothesis")->required();
        cmd->add_option("--p2", *p2, "second hypothesis")->required();
        cmd->add_option("--m", *m, "samples per run")->required();
        cmd->add_option("--runs", *runs, "number of runs")->required();
        cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
        cmd->callback([&, pt, p1, p2, m, runs, seed] {
            action = [&, pt, p1, p2, m, runs, seed] {
                McReport rep = mc_distinguish(*pt, *p1, *p2, *m, *runs, *seed,
                                              resolve_threads(threads_flag));
                out.subcommand = "mc";
                out.seed = *seed;
                out.params = {{"p_true", *pt}, {"p1", *p1}, {"p2", *p2},
                              {"m", *m},       {"runs", *runs}};
                out.results = {{"decided_p1", rep.decided_p1},
                               {"decided_p2", rep.decided_p2},
                               {"error_rate", rep.error_rate},
                               {"mean_ones", rep.mean_ones}};
            };
        });
    }

    // ---- entropy ----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("entropy", "binary entropy H(gamma) in bits");
        auto gamma = std::make_shared<std::string>();
        cmd->add_option("--gamma", *gamma, "rational like 1/4 or real like 0.25")->required();
        cmd->callback([&, gamma] {
            action = [&, gamma] {
                double g;
                ordered_json gj;
                try {
                    Rational r = Rational::parse(*gamma);
                    g = r.to_double();
                    gj = rational_json(r);
                } catch (const std::invalid_argument&) {
                    g = std::stod(*gamma);
                }
                out.subcommand = "entropy";
                out.params = {{"gamma", *gamma}};
                out.results = {{"gamma", g}, {"entropy", binary_entropy(g)}};
                if (!gj.is_null()) out.results["gamma_rational"] = gj;
            };
        });
    }

    // ---- classify ---------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("classify", "Type1/Type2/Other against a budget P(n)");
        auto fa = std::make_shared<FormulaArgs>();
        fa->attach(cmd);
        auto coeff = std::make_shared<std::uint64_t>(1);
        auto degree = std::make_shared<std::uint32_t>(2);
        cmd->add_option("--poly-coeff", *coeff, "P(n) coefficient")->capture_default_str();
        cmd->add_option("--poly-degree", *degree, "P(n) degree")->capture_default_str();
        cmd->callback([&, fa, coeff, degree] {
            action = [&, fa, coeff, degree] {
                TableOptions opts{fa->cap, resolve_threads(threads_flag)};
                TableSummary ts = summarize(fa->load(), opts);
                PolyBudget poly{*coeff, *degree};
                out.subcommand = "classify";
                out.params = fa->echo();
                out.params["poly_coeff"] = *coeff;
                out.params["poly_degree"] = *degree;
                out.results = summary_json(ts);
                out.results["class"] = to_string(classify(ts, poly));
                out.results["poly_budget"] = poly.eval(ts.n);
            };
        });
    }

    // ---- sample -----------------------------------------------------------
    {
        CLI::App* cmd = app.add_subcommand("sample", "random CNF ensemble bucketed by gamma");
        auto n = std::make_shared<std::uint32_t>(), count = std::make_shared<std::uint32_t>();
        auto density = std::make_shared<double>(4.0);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto cap = std::make_shared<std::uint32_t>(30);
        cmd->add_option("--n", *n, "variables per formula")->required();
        cmd->add_option("--count", *count, "formulas to sample")->required();
        cmd->add_option("--density", *density, "clauses per variable")->capture_default_str();
        cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
        cmd->add_option("--cap", *cap, "largest n allowed")->capture_default_str();
        cmd->callback([&, n, count, density, seed, cap] {
            action = [&, n, count, density, seed, cap] {
                EnsembleSample sample =
                    sample_ensemble(*n, *count, *density, *seed, {*cap, resolve_threads(threads_flag)});
                out.subcommand = "sample";
                out.seed = *seed;
                out.params = {{"n", *n}, {"count", *count}, {"density", *density}, {"cap", *cap}};
                ordered_json buckets = ordered_json::array();
                for (const auto& b : sample.buckets)
                    buckets.push_back({{"gamma", dyadic_json(b.gamma)},
                                       {"count", b.members.size()},
                                       {"members", b.members}});
                out.results = {{"n", *n},
                               {"count", *count},
                               {"bucket_count", sample.buckets.size()},
                               {"buckets", buckets}};
            };
        });
    }

    // let --threads / --no-timestamp appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    out.with_timestamp = !no_timestamp;
    try {
        action();
    } catch (const Unresolved& e) {
        out.results["unresolved"] = e.what();
        out.print();
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    out.print();
    return 0;
}
