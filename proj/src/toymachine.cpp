#include "aitlab/toymachine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace aitlab {

namespace {

constexpr std::uint64_t low_mask(std::uint64_t k) {
    return k >= 64 ? ~0ull : (std::uint64_t{1} << k) - 1;
}

// Counts emitted bits and keeps the first 64; enough for every aggregate.
struct MetaEmitter {
    std::uint64_t count = 0;
    std::uint64_t prefix = 0;
    void emit(int b) {
        if (count < 64 && b) prefix |= std::uint64_t{1} << count;
        ++count;
    }
};

struct FullEmitter {
    BitString* out;
    void emit(int b) { out->push_back(b); }
};

template <class Em>
struct Exec {
    const ToyProgram& p;
    std::uint64_t budget;
    Em& em;
    std::uint64_t steps = 0;
    bool halted = false;
    bool fault = false;
    bool oob = false;

    bool charge() {
        if (steps >= budget) {
            oob = true;
            return false;
        }
        ++steps;
        return true;
    }

    std::uint64_t read_gamma(int& pc, int end) {
        int zeros = 0;
        for (;;) {
            if (pc >= end) {
                fault = true;
                return 0;
            }
            if (p.bit(pc++)) break;
            if (++zeros > 62) {
                fault = true;
                return 0;
            }
        }
        std::uint64_t v = 1;
        for (int i = 0; i < zeros; ++i) {
            if (pc >= end) {
                fault = true;
                return 0;
            }
            v = (v << 1) | static_cast<std::uint64_t>(p.bit(pc++));
        }
        return v;
    }

    // Executes the instruction stream [start, end); returns pc at exit.
    // Loop bodies run this recursively over their sub-slice.
    int exec_stream(int start, int end) {
        int pc = start;
        while (!halted && !fault && !oob) {
            if (pc == end) return pc;  // stream exhausted
            if (end - pc < 2) {
                fault = true;
                return pc;
            }
            int op = (p.bit(pc) << 1) | p.bit(pc + 1);
            pc += 2;
            if (!charge()) return pc;  // opcode decode
            switch (op) {
                case 0:  // HALT
                    halted = true;
                    return pc;
                case 1:
                case 2:
                    if (!charge()) return pc;  // emitted bit
                    em.emit(op == 2);
                    break;
                case 3: {  // LOOP
                    std::uint64_t count = read_gamma(pc, end);
                    if (fault) return pc;
                    std::uint64_t body_len = read_gamma(pc, end);
                    if (fault) return pc;
                    if (body_len > static_cast<std::uint64_t>(end - pc)) {
                        fault = true;
                        return pc;
                    }
                    int body_start = pc;
                    int body_end = pc + static_cast<int>(body_len);
                    pc = body_end;
                    for (std::uint64_t i = 0; i < count && !halted && !fault && !oob; ++i)
                        exec_stream(body_start, body_end);
                    break;
                }
            }
        }
        return pc;
    }
};

struct CoreResult {
    RunStatus status;
    std::uint64_t steps;
    int consumed;  // top-level bits read when the run ended
    bool halted;   // HALT executed (even if trailing bits made the run Invalid)
};

template <class Em>
CoreResult run_core(const ToyProgram& p, std::uint64_t budget, Em& em) {
    Exec<Em> ex{p, budget, em};
    int pc = ex.exec_stream(0, p.len);
    RunStatus st;
    if (ex.oob)
        st = RunStatus::OutOfBudget;
    else if (ex.fault)
        st = RunStatus::Invalid;
    else if (ex.halted)
        st = pc == p.len ? RunStatus::Halted : RunStatus::Invalid;
    else
        st = RunStatus::Invalid;  // ran out of bits without HALT
    return {st, ex.steps, pc, ex.halted};
}

void check_bounds(const MachineBounds& b) {
    if (b.max_len < 1 || b.max_len > kHardMaxProgramLen)
        throw std::invalid_argument("toymachine: max_len out of range (1.." +
                                    std::to_string(kHardMaxProgramLen) + ")");
    if (b.step_budget < 1) throw std::invalid_argument("toymachine: step_budget must be >= 1");
}

struct BlockOut {
    std::vector<HaltedRec> halted;
    std::uint64_t oob = 0;
};

// Scans candidates v in [lo, hi) at length `len`. A run whose HALT fires
// after consuming only c < len bits certifies that the c-bit prefix is a
// valid program, so every other candidate sharing it is an Invalid extension
// and is skipped without execution.
void scan_range(int len, std::uint64_t lo, std::uint64_t hi, std::uint64_t budget,
                BlockOut& out) {
    std::uint64_t v = lo;
    while (v < hi) {
        ToyProgram prog{v, len};
        MetaEmitter em;
        CoreResult r = run_core(prog, budget, em);
        if (r.status == RunStatus::OutOfBudget) ++out.oob;
        if (r.status == RunStatus::Halted) {
            out.halted.push_back({prog, em.count, em.prefix, r.steps});
            ++v;
        } else if (r.halted && r.consumed < len) {
            int tail = len - r.consumed;
            v = ((v >> tail) + 1) << tail;
        } else {
            ++v;
        }
    }
}

}  // namespace

std::string ToyProgram::to_string() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
}

ToyProgram ToyProgram::parse(std::string_view text) {
    if (text.empty() || text.size() > 63)
        throw std::invalid_argument("ToyProgram: length must be 1..63");
    ToyProgram p{0, static_cast<int>(text.size())};
    for (char c : text) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("ToyProgram: expected only '0'/'1'");
        p.bits = (p.bits << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return p;
}

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Halted: return "halted";
        case RunStatus::OutOfBudget: return "out_of_budget";
        default: return "invalid";
    }
}

RunResult decode_run(const ToyProgram& p, std::uint64_t step_budget) {
    if (step_budget < 1) throw std::invalid_argument("decode_run: step_budget must be >= 1");
    if (p.len < 1 || p.len > 63) throw std::invalid_argument("decode_run: bad program length");
    RunResult res;
    FullEmitter em{&res.output};
    CoreResult r = run_core(p, step_budget, em);
    res.status = r.status;
    res.steps = r.steps;
    return res;
}

void enumerate(const MachineBounds& bounds,
               const std::function<void(const ToyProgram&, const RunResult&)>& fn) {
    check_bounds(bounds);
    RunResult res;
    for (int len = 1; len <= bounds.max_len; ++len) {
        std::uint64_t limit = std::uint64_t{1} << len;
        std::uint64_t v = 0;
        while (v < limit) {
            ToyProgram prog{v, len};
            res.output.clear();
            FullEmitter em{&res.output};
            CoreResult r = run_core(prog, bounds.step_budget, em);
            res.status = r.status;
            res.steps = r.steps;
            fn(prog, res);
            if (r.halted && r.status != RunStatus::OutOfBudget && r.consumed < len) {
                // Same-prefix candidates replay the same run; yield without
                // executing.
                int tail = len - r.consumed;
                std::uint64_t next = ((v >> tail) + 1) << tail;
                for (std::uint64_t w = v + 1; w < next && w < limit; ++w) {
                    ToyProgram skipped{w, len};
                    fn(skipped, res);
                }
                v = next;
            } else {
                ++v;
            }
        }
    }
}

bool ScanStats::any_oob() const {
    for (std::uint64_t c : oob_by_len)
        if (c) return true;
    return false;
}

bool ScanStats::exhaustive_below(int limit) const {
    for (std::size_t l = 0; l < oob_by_len.size() && static_cast<int>(l) < limit; ++l)
        if (oob_by_len[l]) return false;
    return true;
}

ScanStats scan_halted(const MachineBounds& bounds,
                      const std::function<void(const HaltedRec&)>& fn) {
    check_bounds(bounds);
    ScanStats stats;
    stats.oob_by_len.assign(static_cast<std::size_t>(bounds.max_len) + 1, 0);
    stats.halted_by_len.assign(static_cast<std::size_t>(bounds.max_len) + 1, 0);
    int threads = std::max(1, bounds.threads);
    for (int len = 1; len <= bounds.max_len; ++len) {
        std::uint64_t limit = std::uint64_t{1} << len;
        int blocks = (threads > 1 && len >= 16) ? threads : 1;
        std::uint64_t block_size = (limit + blocks - 1) / static_cast<std::uint64_t>(blocks);
        std::vector<BlockOut> outs(static_cast<std::size_t>(blocks));
        if (blocks == 1) {
            scan_range(len, 0, limit, bounds.step_budget, outs[0]);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(blocks));
            for (int b = 0; b < blocks; ++b) {
                std::uint64_t lo = block_size * static_cast<std::uint64_t>(b);
                std::uint64_t hi = std::min(limit, lo + block_size);
                pool.emplace_back([len, lo, hi, &bounds, &outs, b] {
                    if (lo < hi) scan_range(len, lo, hi, bounds.step_budget, outs[static_cast<std::size_t>(b)]);
                });
            }
            for (auto& t : pool) t.join();
        }
        for (const BlockOut& out : outs) {
            stats.oob_by_len[static_cast<std::size_t>(len)] += out.oob;
            stats.halted_by_len[static_cast<std::size_t>(len)] += out.halted.size();
            for (const HaltedRec& rec : out.halted) fn(rec);
        }
    }
    return stats;
}

ComplexityRecord k_exact(const BitString& x, const MachineBounds& bounds) {
    if (x.size() > 64) throw std::invalid_argument("k_exact: |x| must be <= 64");
    std::uint64_t xbits = x.prefix64();
    std::uint64_t xlen = x.size();
    ComplexityRecord rec;
    rec.x = x;
    rec.bounds = bounds;
    std::uint64_t units = 0, kraft_units = 0;
    ScanStats stats = scan_halted(bounds, [&](const HaltedRec& h) {
        kraft_units += std::uint64_t{1} << (bounds.max_len - h.prog.len);
        if (h.out_len == xlen && h.out_prefix == xbits) {
            if (!rec.k_upper) rec.k_upper = h.prog.len;
            units += std::uint64_t{1} << (bounds.max_len - h.prog.len);
        }
    });
    rec.pu_lower = Dyadic(units, bounds.max_len);
    rec.kraft_total = Dyadic(kraft_units, bounds.max_len);
    rec.exhaustive = rec.k_upper ? stats.exhaustive_below(*rec.k_upper)
                                 : !stats.any_oob();
    if (!rec.pu_lower.is_zero()) rec.minus_log2_pu = rec.pu_lower.minus_log2();
    return rec;
}

Dyadic universal_probability(const BitString& x, MatchMode mode, const MachineBounds& bounds) {
    if (x.size() > 64) throw std::invalid_argument("universal_probability: |x| must be <= 64");
    std::uint64_t xbits = x.prefix64();
    std::uint64_t xlen = x.size();
    std::uint64_t mask = low_mask(xlen);
    std::uint64_t units = 0;
    scan_halted(bounds, [&](const HaltedRec& h) {
        bool match = mode == MatchMode::ExactOutput
                         ? (h.out_len == xlen && h.out_prefix == xbits)
                         : (h.out_len >= xlen && (h.out_prefix & mask) == xbits);
        if (match) units += std::uint64_t{1} << (bounds.max_len - h.prog.len);
    });
    return Dyadic(units, bounds.max_len);
}

KraftCurve kraft_sum(const MachineBounds& bounds) {
    KraftCurve curve;
    std::vector<std::uint64_t> units_by_len(static_cast<std::size_t>(bounds.max_len) + 1, 0);
    curve.stats = scan_halted(bounds, [&](const HaltedRec& h) {
        units_by_len[static_cast<std::size_t>(h.prog.len)] +=
            std::uint64_t{1} << (bounds.max_len - h.prog.len);
    });
    std::uint64_t running = 0;
    for (int l = 1; l <= bounds.max_len; ++l) {
        running += units_by_len[static_cast<std::size_t>(l)];
        curve.by_max_len.push_back(Dyadic(running, bounds.max_len));
    }
    curve.total = curve.by_max_len.empty() ? Dyadic::zero() : curve.by_max_len.back();
    return curve;
}

double coding_gap(const ComplexityRecord& rec) {
    if (!rec.k_upper || !rec.exhaustive)
        throw std::runtime_error("coding_gap: unresolved within bounds");
    return static_cast<double>(*rec.k_upper) - rec.pu_lower.minus_log2();
}

CensusReport incompressibility_census(int string_len, const MachineBounds& bounds) {
    if (string_len < 1 || string_len > 12)
        throw std::invalid_argument("census: string length must be 1..12");
    if (bounds.max_len < string_len - 1)
        throw std::invalid_argument("census: max_len must be >= L-1");
    CensusReport report;
    report.string_len = string_len;
    report.bounds = bounds;
    std::vector<std::uint8_t> best(std::size_t{1} << string_len, 255);
    ScanStats stats = scan_halted(bounds, [&](const HaltedRec& h) {
        if (h.out_len == static_cast<std::uint64_t>(string_len)) {
            std::uint8_t& slot = best[h.out_prefix];
            if (slot == 255) slot = static_cast<std::uint8_t>(h.prog.len);
        }
    });
    report.partial = stats.any_oob();
    for (std::uint8_t b : best)
        if (b != 255) ++report.resolved;
    for (int k = 1; k < string_len; ++k) {
        CensusRow row{k, 0, std::uint64_t{1} << (string_len - k)};
        int cutoff = string_len - k;
        for (std::uint8_t b : best)
            if (b != 255 && b < cutoff) ++row.count;
        report.rows.push_back(row);
    }
    return report;
}

PredictorState predict_next(const BitString& x, const MachineBounds& bounds) {
    if (x.size() > 63) throw std::invalid_argument("predict_next: |x| must be <= 63");
    std::uint64_t xbits = x.prefix64();
    std::uint64_t xlen = x.size();
    std::uint64_t mask = low_mask(xlen);
    std::uint64_t u_ext[2] = {0, 0};  // continuations by next bit
    std::uint64_t u_end = 0;          // programs halting with output exactly x
    scan_halted(bounds, [&](const HaltedRec& h) {
        if (h.out_len < xlen || (h.out_prefix & mask) != xbits) return;
        std::uint64_t units = std::uint64_t{1} << (bounds.max_len - h.prog.len);
        if (h.out_len == xlen)
            u_end += units;
        else
            u_ext[(h.out_prefix >> xlen) & 1] += units;
    });
    std::uint64_t total = u_ext[0] + u_ext[1] + u_end;
    if (total == 0) throw std::runtime_error("predict_next: prefix unresolved at these bounds");
    PredictorState st;
    st.prefix = x;
    st.bounds = bounds;
    st.pu_prefix = Dyadic(total, bounds.max_len);
    st.pu_prefix0 = Dyadic(u_ext[0], bounds.max_len);
    st.pu_prefix1 = Dyadic(u_ext[1], bounds.max_len);
    st.p0 = Rational(u_ext[0], total);
    st.p1 = Rational(u_ext[1], total);
    st.leak = Rational(u_end, total);
    return st;
}

PrefixIndex::PrefixIndex(const MachineBounds& bounds, int depth_cap)
    : depth_cap_(std::min(depth_cap, 64)), mass_exp_(bounds.max_len) {
    if (depth_cap_ < 1) throw std::invalid_argument("PrefixIndex: depth_cap must be >= 1");
    nodes_.push_back({});  // root = prefix ""
    stats_ = scan_halted(bounds, [&](const HaltedRec& h) {
        std::uint64_t units = std::uint64_t{1} << (mass_exp_ - h.prog.len);
        std::uint32_t at = 0;
        nodes_[at].units += units;
        std::uint64_t depth = std::min<std::uint64_t>(h.out_len, static_cast<std::uint64_t>(depth_cap_));
        for (std::uint64_t d = 0; d < depth; ++d) {
            int b = static_cast<int>((h.out_prefix >> d) & 1);
            std::uint32_t next = nodes_[at].child[b];
            if (next == 0) {
                next = static_cast<std::uint32_t>(nodes_.size());
                nodes_[at].child[b] = next;
                nodes_.push_back({});
            }
            at = next;
            nodes_[at].units += units;
        }
    });
}

std::uint64_t PrefixIndex::units(const BitString& prefix) const {
    if (static_cast<int>(prefix.size()) > depth_cap_)
        throw std::invalid_argument("PrefixIndex: prefix longer than depth cap");
    std::uint32_t at = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        std::uint32_t next = nodes_[at].child[prefix.bit(i)];
        if (next == 0) return 0;
        at = next;
    }
    return nodes_[at].units;
}

Dyadic PrefixIndex::mass(const BitString& prefix) const {
    return Dyadic(units(prefix), mass_exp_);
}

namespace {

double mu_next_probability(const MeasureSpec& mu, const BitString& /*prefix*/, std::size_t pos,
                           int bit) {
    switch (mu.kind) {
        case MeasureSpec::Kind::DiracZeros:
            return bit == 0 ? 1.0 : 0.0;
        case MeasureSpec::Kind::DiracAlternating:
            return bit == static_cast<int>(pos & 1) ? 1.0 : 0.0;
        case MeasureSpec::Kind::Bernoulli: {
            double r = mu.bernoulli_r.to_double();
            return bit ? r : 1.0 - r;
        }
    }
    return 0.0;
}

}  // namespace

ErrorSeries prediction_error_series(const MeasureSpec& mu, int horizon,
                                    const MachineBounds& bounds) {
    if (horizon < 1 || horizon > 63)
        throw std::invalid_argument("prediction_error_series: horizon must be 1..63");
    if (mu.kind == MeasureSpec::Kind::Bernoulli) {
        if (horizon > 24)
            throw std::invalid_argument("prediction_error_series: Bernoulli horizon capped at 24");
        if (mu.bernoulli_r.is_zero() || !(mu.bernoulli_r < Dyadic::one()))
            throw std::invalid_argument("prediction_error_series: Bernoulli r must be in (0,1)");
    }
    PrefixIndex index(bounds, horizon + 1);
    ErrorSeries series;
    double cumulative = 0.0;

    // Support prefixes of length m under mu, with their mu-weights.
    auto support = [&](int m, std::vector<std::pair<BitString, double>>& out) {
        out.clear();
        if (mu.kind == MeasureSpec::Kind::Bernoulli) {
            double r = mu.bernoulli_r.to_double();
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
                BitString x;
                double w = 1.0;
                for (int i = 0; i < m; ++i) {
                    int b = static_cast<int>((v >> i) & 1);
                    x.push_back(b);
                    w *= b ? r : 1.0 - r;
                }
                out.emplace_back(std::move(x), w);
            }
        } else {
            BitString x;
            for (int i = 0; i < m; ++i)
                x.push_back(mu.kind == MeasureSpec::Kind::DiracAlternating ? (i & 1) : 0);
            out.emplace_back(std::move(x), 1.0);
        }
    };

    std::vector<std::pair<BitString, double>> prefixes;
    for (int n = 1; n <= horizon; ++n) {
        support(n - 1, prefixes);
        double s_n = 0.0;
        bool unresolved = false;
        for (auto& [x, weight] : prefixes) {
            std::uint64_t ux = index.units(x);
            if (ux == 0) {
                unresolved = true;
                break;
            }
            for (int a = 0; a < 2; ++a) {
                BitString xa = x;
                xa.push_back(a);
                double p = static_cast<double>(index.units(xa)) / static_cast<double>(ux);
                double m = mu_next_probability(mu, x, x.size(), a);
                double d = std::sqrt(p) - std::sqrt(m);
                s_n += weight * d * d;
            }
        }
        if (unresolved) {
            series.truncated_at = n;
            break;
        }
        cumulative += s_n;
        series.entries.push_back({n, s_n, cumulative});
    }
    series.total = cumulative;
    return series;
}

}  // namespace aitlab
