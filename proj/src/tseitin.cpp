#include "paritylab/tseitin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "paritylab/random.hpp"

namespace plab {

Graph::Graph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : n_(vertex_count), edges_(std::move(edges)), adj_(vertex_count) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, w] = edges_[e];
        if (u >= n_ || w >= n_) throw GraphError("edge endpoint out of range");
        if (u == w) throw GraphError("self-loop at vertex " + std::to_string(u));
        if (!seen.insert({std::min(u, w), std::max(u, w)}).second)
            throw GraphError("parallel edge between " + std::to_string(u) + " and " + std::to_string(w));
        adj_[u].push_back({w, e});
        adj_[w].push_back({u, e});
    }
    for (auto& a : adj_)
        std::sort(a.begin(), a.end(), [](const Incidence& x, const Incidence& y) { return x.neighbor < y.neighbor; });
}

std::optional<std::size_t> Graph::regular_degree() const {
    if (n_ == 0) return 0;
    const std::size_t d = degree(0);
    for (std::size_t v = 1; v < n_; ++v)
        if (degree(v) != d) return std::nullopt;
    return d;
}

bool Graph::connected() const {
    if (n_ == 0) return true;
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto& inc : adj_[v])
            if (!seen[inc.neighbor]) {
                seen[inc.neighbor] = true;
                ++count;
                stack.push_back(inc.neighbor);
            }
    }
    return count == n_;
}

Graph Graph::parse(std::istream& in) {
    std::string line;
    std::optional<std::size_t> n;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            std::size_t c;
            if (n || !(ls >> c)) throw GraphError("line " + std::to_string(lineno) + ": bad vertex count");
            n = c;
        } else if (tag == "e") {
            std::size_t u, w;
            if (!n || !(ls >> u >> w)) throw GraphError("line " + std::to_string(lineno) + ": bad edge line");
            edges.emplace_back(u, w);
        } else {
            throw GraphError("line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
        }
    }
    if (!n) throw GraphError("graph file lacks a vertex count");
    return Graph(*n, std::move(edges));
}

Graph Graph::read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw GraphError("cannot open " + path);
    return parse(f);
}

void Graph::write(std::ostream& out) const {
    out << "v " << n_ << '\n';
    for (auto [u, w] : edges_) out << "e " << u << ' ' << w << '\n';
}

Graph complete_graph(std::size_t k) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t w = u + 1; w < k; ++w) e.emplace_back(u, w);
    return Graph(k, std::move(e));
}

Graph cycle_graph(std::size_t k) {
    if (k < 3) throw GraphError("a cycle needs at least 3 vertices");
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t u = 0; u + 1 < k; ++u) e.emplace_back(u, u + 1);
    e.emplace_back(0, k - 1);
    return Graph(k, std::move(e));
}

Graph random_regular_graph(std::size_t vertex_count, std::size_t degree, std::uint64_t seed) {
    if (degree >= vertex_count || (vertex_count * degree) % 2)
        throw GraphError("no simple " + std::to_string(degree) + "-regular graph on " + std::to_string(vertex_count) +
                         " vertices");
    Rng rng(seed);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<std::size_t> stubs;
        for (std::size_t v = 0; v < vertex_count; ++v)
            for (std::size_t k = 0; k < degree; ++k) stubs.push_back(v);
        std::set<std::pair<std::size_t, std::size_t>> edges;
        bool ok = true;
        while (!stubs.empty() && ok) {
            const std::size_t i = uniform_below(rng, stubs.size());
            std::swap(stubs[i], stubs.back());
            const std::size_t u = stubs.back();
            stubs.pop_back();
            const std::size_t j = uniform_below(rng, stubs.size());
            std::swap(stubs[j], stubs.back());
            const std::size_t w = stubs.back();
            stubs.pop_back();
            ok = u != w && edges.insert({std::min(u, w), std::max(u, w)}).second;
        }
        if (!ok) continue;
        Graph g(vertex_count, {edges.begin(), edges.end()});
        if (g.connected()) return g;
    }
    throw GraphError("random regular graph generation did not converge");
}

std::size_t cut_size(const Graph& g, const std::vector<bool>& side) {
    std::size_t c = 0;
    for (auto [u, w] : g.edges()) c += side[u] != side[w];
    return c;
}

ExpanderMetrics expander_metrics(const Graph& g, std::size_t sweep_cap) {
    const auto d = g.regular_degree();
    if (!d || *d == 0) throw GraphError("expander metrics need a regular graph of positive degree");
    const std::size_t n = g.vertex_count();
    ExpanderMetrics m;
    m.degree = *d;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto [u, w] : g.edges()) {
        a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(w)) = 1;
        a(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(u)) = 1;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    m.lambda_min = ev(0);
    m.lambda2 = n >= 2 ? ev(static_cast<Eigen::Index>(n) - 2) : ev(0);
    m.lambda = std::max(std::abs(m.lambda2), std::abs(m.lambda_min)) / static_cast<double>(*d);

    if (n <= sweep_cap && n >= 2) {
        bool ok = true;
        // worst ratio cut/min-side, compared exactly via cross-multiplication
        std::size_t best_cut = 0, best_side = 0;
        std::vector<bool> side(n, false);
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
            for (std::size_t v = 0; v + 1 < n; ++v) side[v] = (mask >> v) & 1u;
            const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
            const std::size_t small = std::min(s, n - s);
            const std::size_t c = cut_size(g, side);
            if (5 * c < *d * small) ok = false;
            if (best_side == 0 || c * best_side < best_cut * small) {
                best_cut = c;
                best_side = small;
            }
        }
        m.cheeger_ok = ok;
        m.worst_cut_edges = best_cut;
        m.worst_cut_side = best_side;
    }
    return m;
}

Charge all_ones_charge(const Graph& g) { return Charge(g.vertex_count(), 1); }

Cnf tseitin_cnf(const Graph& g, const Charge& charge, bool contradiction) {
    if (charge.size() != g.vertex_count()) throw GraphError("charge needs one bit per vertex");
    const std::size_t total = std::accumulate(charge.begin(), charge.end(), std::size_t{0});
    if (contradiction && total % 2 == 0)
        throw GraphError("contradiction mode needs an odd total charge");
    Cnf cnf;
    cnf.num_vars = g.edge_count();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const auto& inc = g.incident(v);
        const std::size_t d = inc.size();
        if (d > 20) throw GraphError("vertex degree too large for clause expansion");
        // pattern bit (d-1-k) belongs to incident edge k: lexicographic order
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << d); ++p) {
            if ((std::popcount(p) & 1) == (charge[v] & 1)) continue;
            Clause c;
            for (std::size_t k = 0; k < d; ++k) {
                const int var = static_cast<int>(inc[k].edge) + 1;
                c.push_back(((p >> (d - 1 - k)) & 1u) ? -var : var);
            }
            cnf.clauses.push_back(std::move(c));
        }
    }
    return cnf;
}

std::vector<std::size_t> violated_vertices(const Graph& g, const BitVec& z, const Charge& charge) {
    if (z.width() != g.edge_count()) throw GraphError("assignment width does not match edge count");
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        bool parity = false;
        for (const auto& inc : g.incident(v)) parity ^= z.get(inc.edge);
        if (parity != (charge[v] & 1)) out.push_back(v);
    }
    return out;
}

PartialAnalysis analyze_partial(const Graph& g, const PartialAssignment& rho, const Charge& charge) {
    if (rho.size() != g.edge_count()) throw GraphError("partial assignment size does not match edge count");
    const std::size_t n = g.vertex_count();
    PartialAnalysis r;
    r.residue.assign(n, 0);
    r.component_of.assign(n, static_cast<std::size_t>(-1));
    for (std::size_t v = 0; v < n; ++v) {
        std::uint8_t f = charge.at(v) & 1;
        for (const auto& inc : g.incident(v))
            if (rho.is_fixed(inc.edge)) f ^= rho.value(inc.edge);
        r.residue[v] = f;
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (r.component_of[s] != static_cast<std::size_t>(-1)) continue;
        const std::size_t id = r.components.size();
        std::vector<std::size_t> comp{s};
        r.component_of[s] = id;
        for (std::size_t k = 0; k < comp.size(); ++k)
            for (const auto& inc : g.incident(comp[k]))
                if (!rho.is_fixed(inc.edge) && r.component_of[inc.neighbor] == static_cast<std::size_t>(-1)) {
                    r.component_of[inc.neighbor] = id;
                    comp.push_back(inc.neighbor);
                }
        std::sort(comp.begin(), comp.end());
        std::uint8_t parity = 0;
        for (auto v : comp) parity ^= r.residue[v];
        if (parity) r.odd_components.push_back(id);
        r.components.push_back(std::move(comp));
    }
    r.valid = r.odd_components.size() == 1 && 2 * r.components[r.odd_components[0]].size() > n;
    return r;
}

PartialAnalysis analyze_partial(const Graph& g, const PartialAssignment& rho) {
    return analyze_partial(g, rho, all_ones_charge(g));
}

PartialAssignment parse_partial(std::istream& in, std::size_t edge_count) {
    PartialAssignment rho(edge_count);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == '#') continue;
        std::istringstream all(line);
        std::size_t e;
        int v;
        if (!(all >> e >> v) || (v != 0 && v != 1) || e >= edge_count)
            throw GraphError("line " + std::to_string(lineno) + ": expected '<edge-index> <0|1>'");
        if (rho.is_fixed(e) && rho.value(e) != (v == 1))
            throw GraphError("line " + std::to_string(lineno) + ": edge fixed twice with different values");
        rho.fix(e, v == 1);
    }
    return rho;
}

PartialAssignment read_partial(const std::string& path, std::size_t edge_count) {
    std::ifstream f(path);
    if (!f) throw GraphError("cannot open " + path);
    return parse_partial(f, edge_count);
}

void write_partial(std::ostream& out, const PartialAssignment& rho) {
    for (auto e : rho.fixed_indices()) out << e << ' ' << (rho.value(e) ? 1 : 0) << '\n';
}

}  // namespace plab
