#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aitlab {

// Parse failure with a location: DIMACS errors carry a 1-based line number,
// expression errors a 0-based byte offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t where)
        : std::runtime_error(what), where_(where) {}
    std::size_t where() const { return where_; }

private:
    std::size_t where_;
};

enum class NodeKind : std::uint8_t { Var, Not, And, Or, Const };

struct Node {
    NodeKind kind;
    std::uint32_t var = 0;               // Var: 1-based index; Const: 0/1
    std::vector<std::uint32_t> children;  // Not: exactly 1; And/Or: >= 1
};

// Immutable once built: safe to share across threads and evaluate
// concurrently with per-thread scratch buffers. Nodes live in an arena and a
// child id is always smaller than its parent's, so evaluation is one linear
// pass.
class Formula {
public:
    using NodeId = std::uint32_t;

    NodeId add_var(std::uint32_t index);
    NodeId add_not(NodeId child);
    // Empty child lists collapse to constants: And() = 1, Or() = 0.
    NodeId add_and(std::vector<NodeId> children);
    NodeId add_or(std::vector<NodeId> children);
    NodeId add_const(bool value);

    void set_root(NodeId id);
    // n may exceed the largest index actually used; table length is fixed by n.
    void set_num_vars(std::uint32_t n);

    std::uint32_t num_vars() const { return num_vars_; }
    NodeId root() const { return root_; }
    const Node& node(NodeId id) const { return nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }

    // Single-assignment semantics; assignment[j-1] is the value of x_j.
    bool eval(std::span<const std::uint8_t> assignment) const;
    // Assignment taken from the bits of `index`: x_j = (index >> (j-1)) & 1.
    bool eval_index(std::uint64_t index) const;
    // Word-parallel: evaluates assignments block_base .. block_base+63 at
    // once; lane t of the result is eval_index(block_base + t). block_base
    // must be a multiple of 64. scratch is reused storage, one per thread.
    std::uint64_t eval64(std::uint64_t block_base, std::vector<std::uint64_t>& scratch) const;

    std::string render() const;

    // Length in bits of the fixed self-delimiting AST serialization
    // (tag + Elias-gamma payloads).
    std::uint64_t encoded_length() const;

private:
    NodeId push(Node n);
    void check_id(NodeId id) const;

    std::vector<Node> nodes_;
    NodeId root_ = 0;
    std::uint32_t num_vars_ = 0;
    std::uint32_t max_var_used_ = 0;
};

// Structural equality (same shape, kinds, indices).
bool structurally_equal(const Formula& a, const Formula& b);

// True iff f is an And of Or-of-literals (or the zero-clause Const(1)).
bool is_cnf_shape(const Formula& f);

// DIMACS CNF: 'c' comments, one "p cnf <nvars> <nclauses>" header, clauses of
// nonzero literals each terminated by 0. Errors carry the offending line.
Formula parse_dimacs(std::string_view text);
Formula parse_dimacs_stream(std::istream& in);
Formula parse_dimacs_file(const std::string& path);

// Infix grammar: variables x1..xN, '!' > '&' > '|', parentheses, constants
// 0 and 1. Errors carry a byte offset.
Formula parse_expr(std::string_view text);

}  // namespace aitlab
