#pragma once

// The hard distribution over edge assignments of a Tseitin instance: given a
// valid partial assignment rho, pick a uniform root in the odd component and
// a uniform assignment violating exactly that vertex's constraint.

#include <iosfwd>
#include <optional>
#include <vector>

#include "paritylab/rational.hpp"
#include "paritylab/tseitin.hpp"

namespace plab {

struct SpanningTree {
    std::size_t root = 0;
    std::vector<std::size_t> order;        // BFS order, root first
    std::vector<std::size_t> parent_edge;  // per vertex in order; unused for root
};

// BFS over usable edges from root, visiting neighbors in ascending order.
// Throws GraphError unless every vertex of `component` is reached.
SpanningTree bfs_tree(const Graph& g, const std::vector<bool>& usable, const std::vector<std::size_t>& component,
                      std::size_t root);

// Sets the tree edges of z so that for every u != root of the component the
// parity of usable incident edges equals target[u]. Non-tree usable edges
// keep their values in z.
void tree_complete(const Graph& g, const std::vector<bool>& usable, const std::vector<std::size_t>& component,
                   const std::vector<std::uint8_t>& target, std::size_t root, BitVec& z);

struct RootedSample {
    BitVec assignment;
    std::size_t root = 0;
};

RootedSample dtfooling_sample(const Graph& g, const PartialAssignment& rho, const Charge& charge, Rng& rng);
RootedSample dtfooling_sample(const Graph& g, const PartialAssignment& rho, Rng& rng);

struct RootOf {
    std::optional<std::size_t> root;   // the single violated vertex
    std::vector<std::size_t> violated;  // always filled
    bool many() const { return !root; }
};

RootOf root_of(const Graph& g, const BitVec& z, const Charge& charge);

// Assignments extending rho where every vertex outside the odd component is
// satisfied and, inside it, exactly v is violated. Over all edges.
AffineSpace root_space(const Graph& g, const PartialAssignment& rho, std::size_t v, const Charge& charge);

struct RootDistribution {
    std::vector<BigInt> counts;  // per vertex: |{z in supp, z agrees with alpha, root(z) = v}|
    BigInt total;
    Rational probability(std::size_t v) const { return Rational(counts.at(v)) / Rational(total); }
    std::vector<std::size_t> support() const;
};

inline constexpr std::size_t kRootDistributionCap = 22;

// Exact law of root(z) for z ~ mu_rho conditioned on agreeing with alpha,
// by enumerating the free edges of rho that alpha leaves open. Throws
// GraphError when alpha has probability zero.
RootDistribution exact_root_distribution(const Graph& g, const PartialAssignment& rho, const PartialAssignment& alpha,
                                         const Charge& charge, std::size_t cap = kRootDistributionCap);

// "seed,root,assignment"
void write_sample_csv_header(std::ostream& out);
void write_sample_csv(std::ostream& out, std::uint64_t seed, const RootedSample& s);
// "vertex,numerator,denominator"
void write_distribution_csv(std::ostream& out, const RootDistribution& d);

}  // namespace plab
