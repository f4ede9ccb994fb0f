#pragma once

// Res(xor) refutations as affine DAGs: every node carries an affine space;
// query nodes split it by a linear form, weakening nodes enlarge it, and
// leaves name a clause falsified everywhere on their space.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "paritylab/cnf.hpp"
#include "paritylab/f2.hpp"

namespace plab {

enum class ProofErrorKind { Syntax, Dangling, Cycle };

class ProofParseError : public std::runtime_error {
public:
    ProofParseError(ProofErrorKind kind, std::size_t line, const std::string& what)
        : std::runtime_error(what), kind_(kind), line_(line) {}
    ProofErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }  // 0 when not tied to a line

private:
    ProofErrorKind kind_;
    std::size_t line_;
};

enum class NodeKind { Leaf, Weaken, Query };

struct ProofNode {
    std::size_t id = 0;
    NodeKind kind = NodeKind::Leaf;
    std::size_t clause = 0;           // leaf: 0-based clause index
    std::size_t child[2] = {0, 0};    // weaken uses child[0]; ids, not positions
    BitVec form;                      // query form
    std::vector<Equation> equations;  // as written
    std::optional<AffineSpace> space; // nullopt = empty
    std::size_t line = 0;
};

class ProofDag {
public:
    ProofDag() = default;
    explicit ProofDag(std::size_t width) : width_(width) {}

    std::size_t width() const { return width_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<ProofNode>& nodes() const { return nodes_; }
    // The first node listed.
    const ProofNode& root() const { return nodes_.at(0); }
    const ProofNode& at(std::size_t id) const { return nodes_.at(index_.at(id)); }
    bool has(std::size_t id) const { return index_.count(id) != 0; }

    // Appends a node; its space is derived from its equations.
    void add(ProofNode node);
    void set_children(std::size_t id, std::size_t child0, std::size_t child1);

    // Structural validation: ids resolve and the graph is acyclic.
    void validate() const;

    static ProofDag parse(std::istream& in);
    static ProofDag read(const std::string& path);
    void write(std::ostream& out) const;

private:
    std::size_t width_ = 0;
    std::vector<ProofNode> nodes_;
    std::unordered_map<std::size_t, std::size_t> index_;
};

// Space as a node label: the equations of a (or an inconsistent one).
std::vector<Equation> space_equations(const std::optional<AffineSpace>& a, std::size_t width);

enum class ProofRule { RootFull, QuerySplit, WeakenContainment, LeafFalsification, ClauseIndex };
std::string to_string(ProofRule r);

struct ProofViolation {
    std::size_t node = 0;
    ProofRule rule = ProofRule::RootFull;
    std::string detail;
};

// First violation by smallest node id, or nullopt when the DAG is a valid
// refutation of cnf.
std::optional<ProofViolation> check_proof(const ProofDag& dag, const Cnf& cnf, unsigned jobs = 1);

struct ProofMetrics {
    std::size_t size = 0;
    // Max over nodes of the query nodes strictly above it on a root path.
    std::size_t depth = 0;
};
ProofMetrics proof_metrics(const ProofDag& dag);

struct TraceResult {
    std::size_t leaf = 0;     // node id
    std::size_t clause = 0;
    std::size_t length = 0;   // query nodes passed
    std::vector<std::size_t> path;
};
// Follows x from the root; throws std::runtime_error if the DAG misbehaves
// on x, which cannot happen on checked DAGs.
TraceResult trace(const ProofDag& dag, const Cnf& cnf, const BitVec& x);

class Satisfiable : public std::runtime_error {
public:
    explicit Satisfiable(BitVec model)
        : std::runtime_error("SATISFIABLE: " + model.to_string()), model_(std::move(model)) {}
    const BitVec& model() const { return model_; }

private:
    BitVec model_;
};

inline constexpr std::size_t kRefuteVarCap = 20;

// Tree-like refutation by querying x1, x2, ... in order and stopping at the
// first clause falsified by the fixed prefix. Throws Satisfiable.
ProofDag pdt_refute(const Cnf& cnf);

namespace reference {
// Point-set semantics by enumeration (width <= 16): same verdict contract as
// check_proof, rule reported for the smallest failing id.
std::optional<ProofViolation> check_by_enumeration(const ProofDag& dag, const Cnf& cnf);
}  // namespace reference

}  // namespace plab
