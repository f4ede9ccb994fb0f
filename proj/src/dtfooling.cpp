#include "paritylab/dtfooling.hpp"

#include <ostream>

namespace plab {

SpanningTree bfs_tree(const Graph& g, const std::vector<bool>& usable, const std::vector<std::size_t>& component,
                      std::size_t root) {
    constexpr auto kNone = static_cast<std::size_t>(-1);
    SpanningTree t;
    t.root = root;
    t.parent_edge.assign(g.vertex_count(), kNone);
    std::vector<bool> seen(g.vertex_count(), false);
    seen[root] = true;
    t.order.push_back(root);
    for (std::size_t k = 0; k < t.order.size(); ++k)
        for (const auto& inc : g.incident(t.order[k]))
            if (usable[inc.edge] && !seen[inc.neighbor]) {
                seen[inc.neighbor] = true;
                t.parent_edge[inc.neighbor] = inc.edge;
                t.order.push_back(inc.neighbor);
            }
    for (auto v : component)
        if (!seen[v]) throw GraphError("component is not connected through usable edges");
    if (t.order.size() != component.size()) throw GraphError("spanning tree leaves the component");
    return t;
}

void tree_complete(const Graph& g, const std::vector<bool>& usable, const std::vector<std::size_t>& component,
                   const std::vector<std::uint8_t>& target, std::size_t root, BitVec& z) {
    const auto t = bfs_tree(g, usable, component, root);
    std::vector<bool> tree_edge(g.edge_count(), false);
    for (std::size_t k = 1; k < t.order.size(); ++k) tree_edge[t.parent_edge[t.order[k]]] = true;
    for (std::size_t k = 1; k < t.order.size(); ++k) z.set(t.parent_edge[t.order[k]], false);
    // children are finished before their parent
    for (std::size_t k = t.order.size(); k-- > 1;) {
        const std::size_t u = t.order[k];
        bool parity = false;
        for (const auto& inc : g.incident(u))
            if (usable[inc.edge] && inc.edge != t.parent_edge[u]) parity ^= z.get(inc.edge);
        z.set(t.parent_edge[u], parity != (target[u] & 1));
    }
}

RootedSample dtfooling_sample(const Graph& g, const PartialAssignment& rho, const Charge& charge, Rng& rng) {
    const auto pa = analyze_partial(g, rho, charge);
    if (!pa.valid) throw GraphError("partial assignment is not valid");
    std::vector<bool> usable(g.edge_count());
    BitVec z(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        usable[e] = !rho.is_fixed(e);
        if (usable[e])
            z.set(e, coin(rng));
        else
            z.set(e, rho.value(e));
    }
    RootedSample s;
    for (std::size_t c = 0; c < pa.components.size(); ++c) {
        const auto& comp = pa.components[c];
        std::size_t root = comp.front();
        if (c == pa.odd_component()) {
            root = comp[uniform_below(rng, comp.size())];
            s.root = root;
        }
        tree_complete(g, usable, comp, pa.residue, root, z);
    }
    s.assignment = std::move(z);
    return s;
}

RootedSample dtfooling_sample(const Graph& g, const PartialAssignment& rho, Rng& rng) {
    return dtfooling_sample(g, rho, all_ones_charge(g), rng);
}

RootOf root_of(const Graph& g, const BitVec& z, const Charge& charge) {
    RootOf r;
    r.violated = violated_vertices(g, z, charge);
    if (r.violated.size() == 1) r.root = r.violated.front();
    return r;
}

AffineSpace root_space(const Graph& g, const PartialAssignment& rho, std::size_t v, const Charge& charge) {
    const auto pa = analyze_partial(g, rho, charge);
    if (!pa.valid) throw GraphError("partial assignment is not valid");
    if (pa.component_of[v] != pa.odd_component()) throw GraphError("vertex is outside the odd component");
    std::vector<Equation> eqs;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (rho.is_fixed(e)) eqs.push_back({BitVec::unit(g.edge_count(), e), rho.value(e)});
    for (std::size_t u = 0; u < g.vertex_count(); ++u) {
        BitVec form(g.edge_count());
        for (const auto& inc : g.incident(u)) form.set(inc.edge, true);
        eqs.push_back({std::move(form), ((charge[u] & 1) != 0) != (u == v)});
    }
    auto a = affine_from_equations(g.edge_count(), eqs);
    if (!a) throw GraphError("root space is empty");
    return *a;
}

std::vector<std::size_t> RootDistribution::support() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < counts.size(); ++v)
        if (counts[v] != 0) out.push_back(v);
    return out;
}

// supp(mu_rho) consists of the assignments extending rho in which every even
// component is satisfied and exactly one vertex of the odd component is
// violated; mu_rho is uniform on it because the per-root spaces have equal
// size. Counting supported points therefore gives the exact law.
RootDistribution exact_root_distribution(const Graph& g, const PartialAssignment& rho, const PartialAssignment& alpha,
                                         const Charge& charge, std::size_t cap) {
    const auto pa = analyze_partial(g, rho, charge);
    if (!pa.valid) throw GraphError("partial assignment is not valid");
    if (alpha.size() != g.edge_count()) throw GraphError("condition size does not match edge count");
    BitVec base(g.edge_count());
    std::vector<std::size_t> open;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (rho.is_fixed(e)) {
            if (alpha.is_fixed(e) && alpha.value(e) != rho.value(e))
                throw GraphError("condition contradicts the partial assignment on edge " + std::to_string(e));
            base.set(e, rho.value(e));
        } else if (alpha.is_fixed(e)) {
            base.set(e, alpha.value(e));
        } else {
            open.push_back(e);
        }
    }
    if (open.size() > cap) throw GraphError("too many open edges for exhaustive counting");
    const auto& odd = pa.components[pa.odd_component()];
    std::vector<bool> in_odd(g.vertex_count(), false);
    for (auto v : odd) in_odd[v] = true;

    // parity per vertex of the base point, then Gray-code updates
    std::vector<std::uint8_t> bad(g.vertex_count(), 0);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        bool p = false;
        for (const auto& inc : g.incident(v)) p ^= base.get(inc.edge);
        bad[v] = p != (charge[v] & 1);
    }
    std::size_t bad_even = 0, bad_odd = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) (in_odd[v] ? bad_odd : bad_even) += bad[v];

    std::vector<std::uint64_t> counts(g.vertex_count(), 0);
    auto tally = [&] {
        if (bad_even || bad_odd != 1) return;
        for (auto v : odd)
            if (bad[v]) {
                ++counts[v];
                return;
            }
    };
    auto toggle = [&](std::size_t v) {
        auto& slot = in_odd[v] ? bad_odd : bad_even;
        slot += bad[v] ? -1 : 1;
        bad[v] ^= 1;
    };
    tally();
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << open.size()); ++i) {
        const auto [u, w] = g.edge(open[static_cast<std::size_t>(std::countr_zero(i))]);
        toggle(u);
        toggle(w);
        tally();
    }
    RootDistribution d;
    d.total = 0;
    for (auto c : counts) {
        d.counts.emplace_back(c);
        d.total += c;
    }
    if (d.total == 0) throw GraphError("condition has probability zero under the hard distribution");
    return d;
}

void write_sample_csv_header(std::ostream& out) { out << "seed,root,assignment\n"; }

void write_sample_csv(std::ostream& out, std::uint64_t seed, const RootedSample& s) {
    out << seed << ',' << s.root << ',' << s.assignment.to_string() << '\n';
}

void write_distribution_csv(std::ostream& out, const RootDistribution& d) {
    out << "vertex,numerator,denominator\n";
    for (std::size_t v = 0; v < d.counts.size(); ++v) {
        const Rational p = d.probability(v);
        out << v << ',' << numerator_of(p) << ',' << denominator_of(p) << '\n';
    }
}

}  // namespace plab
