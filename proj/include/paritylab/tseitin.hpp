#pragma once

// Graphs, expansion metrics, Tseitin formulas and the partial edge
// assignment predicate. Edge indices double as CNF variable indices
// (variable = edge + 1).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paritylab/cnf.hpp"
#include "paritylab/f2.hpp"

namespace plab {

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Incidence {
    std::size_t neighbor;
    std::size_t edge;
};

class Graph {
public:
    Graph() = default;
    Graph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
    const std::pair<std::size_t, std::size_t>& edge(std::size_t e) const { return edges_.at(e); }
    // Sorted by neighbor.
    const std::vector<Incidence>& incident(std::size_t v) const { return adj_.at(v); }
    std::size_t degree(std::size_t v) const { return adj_.at(v).size(); }
    // Common degree, or nullopt if irregular.
    std::optional<std::size_t> regular_degree() const;
    bool connected() const;

    // "v <count>" followed by "e <u> <w>" lines, 0-based.
    static Graph parse(std::istream& in);
    static Graph read(const std::string& path);
    void write(std::ostream& out) const;

private:
    std::size_t n_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::vector<Incidence>> adj_;
};

Graph complete_graph(std::size_t k);
Graph cycle_graph(std::size_t k);
// Uniform pairing model with restarts until the result is simple and
// connected; edges sorted lexicographically.
Graph random_regular_graph(std::size_t vertex_count, std::size_t degree, std::uint64_t seed);

inline constexpr std::size_t kCheegerSweepCap = 20;

struct ExpanderMetrics {
    std::size_t degree = 0;
    double lambda2 = 0;     // second largest adjacency eigenvalue
    double lambda_min = 0;  // smallest adjacency eigenvalue
    double lambda = 0;      // max(|lambda2|, |lambda_min|) / degree
    // Every cut S has at least degree/5 * min(|S|, |V|-|S|) crossing edges;
    // nullopt when |V| exceeds the sweep cap.
    std::optional<bool> cheeger_ok;
    std::size_t worst_cut_edges = 0;
    std::size_t worst_cut_side = 0;
};

ExpanderMetrics expander_metrics(const Graph& g, std::size_t sweep_cap = kCheegerSweepCap);

// Edges crossing between `side` and its complement.
std::size_t cut_size(const Graph& g, const std::vector<bool>& side);

using Charge = std::vector<std::uint8_t>;
Charge all_ones_charge(const Graph& g);

// Per-vertex odd/even constraints, vertex-major; for each vertex the
// 2^(deg-1) wrong-parity local patterns in lexicographic order over its
// incident edges (ascending neighbor). In contradiction mode an even total
// charge is rejected.
Cnf tseitin_cnf(const Graph& g, const Charge& charge, bool contradiction = true);

// Vertices whose constraint sum_{e ∋ v} z_e = charge(v) fails.
std::vector<std::size_t> violated_vertices(const Graph& g, const BitVec& z, const Charge& charge);

struct PartialAnalysis {
    std::vector<std::size_t> component_of;
    std::vector<std::vector<std::size_t>> components;  // by smallest vertex
    std::vector<std::uint8_t> residue;                 // f_rho per vertex
    std::vector<std::size_t> odd_components;           // indices into components
    bool valid = false;
    // Index of the odd component when valid.
    std::size_t odd_component() const { return odd_components.at(0); }
};

// Components of (V, free edges) with residues f(v) = charge(v) + sum of the
// fixed incident edges. Valid iff exactly one component has odd residue sum
// and it contains more than half of the vertices.
PartialAnalysis analyze_partial(const Graph& g, const PartialAssignment& rho, const Charge& charge);
PartialAnalysis analyze_partial(const Graph& g, const PartialAssignment& rho);

// "<edge-index> <0|1>" lines.
PartialAssignment parse_partial(std::istream& in, std::size_t edge_count);
PartialAssignment read_partial(const std::string& path, std::size_t edge_count);
void write_partial(std::ostream& out, const PartialAssignment& rho);

}  // namespace plab
