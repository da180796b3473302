#include "aitlab/formula.hpp"

#include <bit>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace aitlab {

namespace {

// Lane patterns for the six low variables: bit t of kLane[j-1] equals
// (t >> (j-1)) & 1, so a 64-lane block at a 64-aligned base needs no shifts.
constexpr std::uint64_t kLane[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

std::uint64_t elias_gamma_bits(std::uint64_t v) {
    // Codeword length for v >= 1: 2*floor(log2 v) + 1.
    return 2 * static_cast<std::uint64_t>(std::bit_width(v) - 1) + 1;
}

}  // namespace

Formula::NodeId Formula::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Formula::check_id(NodeId id) const {
    if (id >= nodes_.size()) throw std::invalid_argument("Formula: bad node id");
}

Formula::NodeId Formula::add_var(std::uint32_t index) {
    if (index == 0) throw std::invalid_argument("Formula: variable indices are 1-based");
    if (index > max_var_used_) max_var_used_ = index;
    if (index > num_vars_) num_vars_ = index;
    return push({NodeKind::Var, index, {}});
}

Formula::NodeId Formula::add_not(NodeId child) {
    check_id(child);
    return push({NodeKind::Not, 0, {child}});
}

Formula::NodeId Formula::add_and(std::vector<NodeId> children) {
    if (children.empty()) return add_const(true);
    for (NodeId c : children) check_id(c);
    return push({NodeKind::And, 0, std::move(children)});
}

Formula::NodeId Formula::add_or(std::vector<NodeId> children) {
    if (children.empty()) return add_const(false);
    for (NodeId c : children) check_id(c);
    return push({NodeKind::Or, 0, std::move(children)});
}

Formula::NodeId Formula::add_const(bool value) {
    return push({NodeKind::Const, value ? 1u : 0u, {}});
}

void Formula::set_root(NodeId id) {
    check_id(id);
    root_ = id;
}

void Formula::set_num_vars(std::uint32_t n) {
    if (n < max_var_used_)
        throw std::invalid_argument("Formula: num_vars smaller than a used variable index");
    num_vars_ = n;
}

bool Formula::eval(std::span<const std::uint8_t> assignment) const {
    if (assignment.size() != num_vars_)
        throw std::invalid_argument("Formula::eval: assignment length mismatch");
    std::uint64_t index = 0;
    for (std::size_t j = 0; j < assignment.size(); ++j)
        if (assignment[j]) index |= std::uint64_t{1} << j;
    return eval_index(index);
}

bool Formula::eval_index(std::uint64_t index) const {
    // Children precede parents, so a single forward pass settles every node.
    std::vector<std::uint8_t> val(nodes_.size());
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        switch (n.kind) {
            case NodeKind::Var:
                val[id] = static_cast<std::uint8_t>((index >> (n.var - 1)) & 1);
                break;
            case NodeKind::Not:
                val[id] = !val[n.children[0]];
                break;
            case NodeKind::And: {
                std::uint8_t v = 1;
                for (NodeId c : n.children) v = static_cast<std::uint8_t>(v & val[c]);
                val[id] = v;
                break;
            }
            case NodeKind::Or: {
                std::uint8_t v = 0;
                for (NodeId c : n.children) v = static_cast<std::uint8_t>(v | val[c]);
                val[id] = v;
                break;
            }
            case NodeKind::Const:
                val[id] = static_cast<std::uint8_t>(n.var);
                break;
        }
    }
    return val[root_] != 0;
}

std::uint64_t Formula::eval64(std::uint64_t block_base, std::vector<std::uint64_t>& scratch) const {
    scratch.resize(nodes_.size());
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        switch (n.kind) {
            case NodeKind::Var:
                scratch[id] = n.var <= 6 ? kLane[n.var - 1]
                                         : (((block_base >> (n.var - 1)) & 1) ? ~0ull : 0ull);
                break;
            case NodeKind::Not:
                scratch[id] = ~scratch[n.children[0]];
                break;
            case NodeKind::And: {
                std::uint64_t v = ~0ull;
                for (NodeId c : n.children) v &= scratch[c];
                scratch[id] = v;
                break;
            }
            case NodeKind::Or: {
                std::uint64_t v = 0;
                for (NodeId c : n.children) v |= scratch[c];
                scratch[id] = v;
                break;
            }
            case NodeKind::Const:
                scratch[id] = n.var ? ~0ull : 0ull;
                break;
        }
    }
    return scratch[root_];
}

namespace {

void render_node(const Formula& f, Formula::NodeId id, int parent_level, std::string& out) {
    const Node& n = f.node(id);
    switch (n.kind) {
        case NodeKind::Var:
            out += "x" + std::to_string(n.var);
            return;
        case NodeKind::Const:
            out += n.var ? "1" : "0";
            return;
        case NodeKind::Not:
            out += "!";
            render_node(f, n.children[0], 2, out);
            return;
        case NodeKind::And:
        case NodeKind::Or: {
            int level = n.kind == NodeKind::And ? 1 : 0;
            bool parens = level < parent_level || parent_level == 2;
            if (parens) out += "(";
            const char* sep = n.kind == NodeKind::And ? " & " : " | ";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += sep;
                // Children at the same level keep explicit parens so nesting
                // survives a round trip.
                render_node(f, n.children[i], level + 1, out);
            }
            if (parens) out += ")";
            return;
        }
    }
}

}  // namespace

std::string Formula::render() const {
    std::string out;
    render_node(*this, root_, 0, out);
    return out;
}

std::uint64_t Formula::encoded_length() const {
    // Tags: Var "00", Not "01", And "100", Or "101", Const0 "110",
    // Const1 "111". Var carries gamma(index), And/Or gamma(#children).
    std::uint64_t total = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        switch (n.kind) {
            case NodeKind::Var:
                total += 2 + elias_gamma_bits(n.var);
                break;
            case NodeKind::Not:
                total += 2;
                stack.push_back(n.children[0]);
                break;
            case NodeKind::And:
            case NodeKind::Or:
                total += 3 + elias_gamma_bits(n.children.size());
                for (NodeId c : n.children) stack.push_back(c);
                break;
            case NodeKind::Const:
                total += 3;
                break;
        }
    }
    return total;
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.num_vars() != b.num_vars()) return false;
    struct Pair {
        Formula::NodeId x, y;
    };
    std::vector<Pair> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const Node& nx = a.node(x);
        const Node& ny = b.node(y);
        if (nx.kind != ny.kind || nx.var != ny.var || nx.children.size() != ny.children.size())
            return false;
        for (std::size_t i = 0; i < nx.children.size(); ++i)
            stack.push_back({nx.children[i], ny.children[i]});
    }
    return true;
}

bool is_cnf_shape(const Formula& f) {
    const Node& root = f.node(f.root());
    if (root.kind == NodeKind::Const) return root.var == 1;  // zero clauses
    if (root.kind != NodeKind::And) return false;
    auto is_literal = [&](Formula::NodeId id) {
        const Node& n = f.node(id);
        if (n.kind == NodeKind::Var) return true;
        return n.kind == NodeKind::Not && f.node(n.children[0]).kind == NodeKind::Var;
    };
    for (Formula::NodeId cl : root.children) {
        const Node& c = f.node(cl);
        if (c.kind != NodeKind::Or) return false;
        for (Formula::NodeId lit : c.children)
            if (!is_literal(lit)) return false;
    }
    return true;
}

namespace {

struct DimacsParser {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("DIMACS line " + std::to_string(line) + ": " + msg, line);
    }

    void skip_space_same_line() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r'))
            ++pos;
    }

    void skip_to_content() {
        for (;;) {
            skip_space_same_line();
            if (pos >= text.size()) return;
            if (text[pos] == '\n') {
                ++pos;
                ++line;
                continue;
            }
            if (text[pos] == 'c') {  // comment line
                while (pos < text.size() && text[pos] != '\n') ++pos;
                continue;
            }
            return;
        }
    }

    bool read_int(long long& out) {
        skip_to_content();
        if (pos >= text.size()) return false;
        bool neg = false;
        if (text[pos] == '-') {
            neg = true;
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            fail("expected an integer");
        long long v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            if (v > (1ll << 40)) fail("integer too large");
            ++pos;
        }
        out = neg ? -v : v;
        return true;
    }
};

}  // namespace

Formula parse_dimacs(std::string_view text) {
    DimacsParser p{text};
    p.skip_to_content();
    if (p.pos >= text.size() || text[p.pos] != 'p') p.fail("missing 'p cnf' header");
    std::size_t header_line = p.line;
    // header tokens: p cnf <nvars> <nclauses>
    auto expect_word = [&](std::string_view w) {
        p.skip_space_same_line();
        if (text.substr(p.pos, w.size()) != w)
            throw ParseError("DIMACS line " + std::to_string(header_line) + ": malformed header",
                             header_line);
        p.pos += w.size();
    };
    expect_word("p");
    expect_word("cnf");
    long long nvars = 0, nclauses = 0;
    if (!p.read_int(nvars) || p.line != header_line) p.fail("malformed header");
    if (!p.read_int(nclauses) || p.line != header_line) p.fail("malformed header");
    if (nvars < 0 || nvars > 1000000 || nclauses < 0) p.fail("malformed header");

    Formula f;
    std::vector<Formula::NodeId> clause_ids;
    std::vector<Formula::NodeId> lits;
    long long clause_start_line = 0;
    bool in_clause = false;
    long long lit = 0;
    while (p.read_int(lit)) {
        if (!in_clause) {
            in_clause = true;
            clause_start_line = static_cast<long long>(p.line);
        }
        if (lit == 0) {
            if (lits.empty()) {
                throw ParseError("DIMACS line " + std::to_string(p.line) + ": zero-length clause",
                                 p.line);
            }
            clause_ids.push_back(f.add_or(lits));
            lits.clear();
            in_clause = false;
            continue;
        }
        long long v = lit < 0 ? -lit : lit;
        if (v > nvars) {
            throw ParseError("DIMACS line " + std::to_string(p.line) + ": literal out of range",
                             p.line);
        }
        Formula::NodeId id = f.add_var(static_cast<std::uint32_t>(v));
        if (lit < 0) id = f.add_not(id);
        lits.push_back(id);
    }
    if (in_clause) {
        throw ParseError(
            "DIMACS line " + std::to_string(clause_start_line) + ": unterminated clause",
            static_cast<std::size_t>(clause_start_line));
    }
    if (static_cast<long long>(clause_ids.size()) != nclauses) {
        throw ParseError("DIMACS line " + std::to_string(p.line) + ": clause count mismatch (header " +
                             std::to_string(nclauses) + ", found " +
                             std::to_string(clause_ids.size()) + ")",
                         p.line);
    }
    f.set_root(f.add_and(std::move(clause_ids)));
    f.set_num_vars(static_cast<std::uint32_t>(nvars));
    return f;
}

Formula parse_dimacs_stream(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dimacs(ss.str());
}

Formula parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return parse_dimacs_stream(in);
}

namespace {

struct ExprParser {
    std::string_view text;
    std::size_t pos = 0;
    Formula* f;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos), pos);
    }

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_space();
        return pos < text.size() && text[pos] == c;
    }

    Formula::NodeId parse_or() {
        std::vector<Formula::NodeId> terms{parse_and()};
        while (peek('|')) {
            ++pos;
            terms.push_back(parse_and());
        }
        return terms.size() == 1 ? terms[0] : f->add_or(std::move(terms));
    }

    Formula::NodeId parse_and() {
        std::vector<Formula::NodeId> factors{parse_factor()};
        while (peek('&')) {
            ++pos;
            factors.push_back(parse_factor());
        }
        return factors.size() == 1 ? factors[0] : f->add_and(std::move(factors));
    }

    Formula::NodeId parse_factor() {
        skip_space();
        if (pos >= text.size()) fail("syntax error");
        char c = text[pos];
        if (c == '!') {
            ++pos;
            return f->add_not(parse_factor());
        }
        if (c == '(') {
            ++pos;
            Formula::NodeId inner = parse_or();
            if (!peek(')')) fail("expected ')'");
            ++pos;
            return inner;
        }
        if (c == '0' || c == '1') {
            ++pos;
            return f->add_const(c == '1');
        }
        if (c == 'x') {
            ++pos;
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                fail("expected variable index");
            std::uint64_t v = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
                if (v > 1000000) fail("variable index too large");
                ++pos;
            }
            if (v == 0) fail("variable indices start at x1");
            return f->add_var(static_cast<std::uint32_t>(v));
        }
        fail("unknown token");
    }
};

}  // namespace

Formula parse_expr(std::string_view text) {
    Formula f;
    ExprParser p{text, 0, &f};
    Formula::NodeId root = p.parse_or();
    p.skip_space();
    if (p.pos != text.size()) p.fail("trailing input");
    f.set_root(root);
    return f;
}

}  // namespace aitlab
