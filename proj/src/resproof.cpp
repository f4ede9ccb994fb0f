#include "paritylab/resproof.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace plab {

namespace {

ProofParseError syntax(std::size_t line, const std::string& msg) {
    return ProofParseError(ProofErrorKind::Syntax, line, "line " + std::to_string(line) + ": " + msg);
}

std::size_t parse_index(const std::string& tok, std::size_t line, const char* what) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw syntax(line, std::string("bad ") + what + " '" + tok + "'");
    try {
        return std::stoull(tok);
    } catch (const std::out_of_range&) {
        throw syntax(line, std::string(what) + " out of range");
    }
}

BitVec parse_bits(const std::string& tok, std::size_t width, std::size_t line) {
    if (tok.size() != width || tok.find_first_not_of("01") != std::string::npos)
        throw syntax(line, "expected " + std::to_string(width) + " bits, got '" + tok + "'");
    return BitVec::from_string(tok);
}

// Clause c is false everywhere on a (trivially so when a is empty).
bool falsified_on(const std::optional<AffineSpace>& a, const Clause& c) {
    if (!a) return true;
    for (int lit : c) {
        const std::size_t v = static_cast<std::size_t>(std::abs(lit)) - 1;
        const auto val = a->implied_value(BitVec::unit(a->width(), v));
        // literal +v is false iff x_v = 0
        if (!val || *val != (lit < 0)) return false;
    }
    return true;
}

bool same_space(const std::optional<AffineSpace>& a, const std::optional<AffineSpace>& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

std::optional<AffineSpace> split(const std::optional<AffineSpace>& a, const BitVec& form, bool bit) {
    if (!a) return std::nullopt;
    return intersect(*a, form, bit);
}

}  // namespace

void ProofDag::add(ProofNode node) {
    if (index_.count(node.id)) throw ProofParseError(ProofErrorKind::Syntax, node.line, "duplicate node id " + std::to_string(node.id));
    node.space = affine_from_equations(width_, node.equations);
    index_[node.id] = nodes_.size();
    nodes_.push_back(std::move(node));
}

void ProofDag::set_children(std::size_t id, std::size_t child0, std::size_t child1) {
    auto& n = nodes_.at(index_.at(id));
    n.child[0] = child0;
    n.child[1] = child1;
}

void ProofDag::validate() const {
    if (nodes_.empty()) throw ProofParseError(ProofErrorKind::Syntax, 0, "proof has no nodes");
    auto arity = [](const ProofNode& n) { return n.kind == NodeKind::Query ? 2 : n.kind == NodeKind::Weaken ? 1 : 0; };
    for (const auto& n : nodes_)
        for (int k = 0; k < arity(n); ++k)
            if (!has(n.child[k]))
                throw ProofParseError(ProofErrorKind::Dangling, n.line,
                                      "DANGLING: node " + std::to_string(n.id) + " references missing node " +
                                          std::to_string(n.child[k]));
    // iterative three-colour DFS
    std::vector<std::uint8_t> colour(nodes_.size(), 0);
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        if (colour[s]) continue;
        std::vector<std::pair<std::size_t, int>> stack{{s, 0}};
        colour[s] = 1;
        while (!stack.empty()) {
            auto& [v, k] = stack.back();
            const auto& n = nodes_[v];
            if (k == arity(n)) {
                colour[v] = 2;
                stack.pop_back();
                continue;
            }
            const std::size_t w = index_.at(n.child[k++]);
            if (colour[w] == 1)
                throw ProofParseError(ProofErrorKind::Cycle, nodes_[w].line,
                                      "CYCLE: through nodes " + std::to_string(n.id) + " and " + std::to_string(nodes_[w].id));
            if (colour[w] == 0) {
                colour[w] = 1;
                stack.push_back({w, 0});
            }
        }
    }
}

ProofDag ProofDag::parse(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<ProofDag> dag;
    std::size_t declared = 0;
    std::optional<ProofNode> current;
    auto flush = [&] {
        if (current) dag->add(std::move(*current));
        current.reset();
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (!dag) {
            if (tok.size() != 3 || tok[0] != "rxp") throw syntax(lineno, "expected header 'rxp <width> <nodes>'");
            dag = ProofDag(parse_index(tok[1], lineno, "width"));
            declared = parse_index(tok[2], lineno, "node count");
            continue;
        }
        if (tok[0] == "eq") {
            if (!current) throw syntax(lineno, "equation before any node");
            if (tok.size() != 3 || (tok[2] != "0" && tok[2] != "1")) throw syntax(lineno, "expected 'eq <bits> <0|1>'");
            current->equations.push_back({parse_bits(tok[1], dag->width(), lineno), tok[2] == "1"});
            continue;
        }
        flush();
        if (tok.size() < 2) throw syntax(lineno, "expected '<id> k=<kind> ...'");
        ProofNode n;
        n.line = lineno;
        n.id = parse_index(tok[0], lineno, "node id");
        if (tok[1] == "k=LEAF") {
            if (tok.size() != 3) throw syntax(lineno, "expected '<id> k=LEAF <clause>'");
            n.kind = NodeKind::Leaf;
            n.clause = parse_index(tok[2], lineno, "clause index");
        } else if (tok[1] == "k=WEAK") {
            if (tok.size() != 3) throw syntax(lineno, "expected '<id> k=WEAK <child>'");
            n.kind = NodeKind::Weaken;
            n.child[0] = parse_index(tok[2], lineno, "child id");
        } else if (tok[1] == "k=QRY") {
            if (tok.size() != 5) throw syntax(lineno, "expected '<id> k=QRY <bits> <child0> <child1>'");
            n.kind = NodeKind::Query;
            n.form = parse_bits(tok[2], dag->width(), lineno);
            n.child[0] = parse_index(tok[3], lineno, "child id");
            n.child[1] = parse_index(tok[4], lineno, "child id");
        } else {
            throw syntax(lineno, "unknown node kind '" + tok[1] + "'");
        }
        current = std::move(n);
    }
    if (!dag) throw syntax(lineno, "missing header");
    flush();
    if (dag->size() != declared)
        throw syntax(lineno, "header declares " + std::to_string(declared) + " nodes, found " + std::to_string(dag->size()));
    dag->validate();
    return std::move(*dag);
}

ProofDag ProofDag::read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return parse(f);
}

void ProofDag::write(std::ostream& out) const {
    out << "rxp " << width_ << ' ' << nodes_.size() << '\n';
    for (const auto& n : nodes_) {
        out << n.id;
        switch (n.kind) {
            case NodeKind::Leaf: out << " k=LEAF " << n.clause; break;
            case NodeKind::Weaken: out << " k=WEAK " << n.child[0]; break;
            case NodeKind::Query:
                out << " k=QRY " << n.form.to_string() << ' ' << n.child[0] << ' ' << n.child[1];
                break;
        }
        out << '\n';
        for (const auto& e : n.equations) out << "eq " << e.form.to_string() << ' ' << (e.bit ? 1 : 0) << '\n';
    }
}

std::vector<Equation> space_equations(const std::optional<AffineSpace>& a, std::size_t width) {
    if (!a) return {Equation{BitVec(width), true}};
    return a->equation_list();
}

std::string to_string(ProofRule r) {
    switch (r) {
        case ProofRule::RootFull: return "ROOT_FULL";
        case ProofRule::QuerySplit: return "QUERY_SPLIT";
        case ProofRule::WeakenContainment: return "WEAKEN_CONTAINMENT";
        case ProofRule::LeafFalsification: return "LEAF_FALSIFICATION";
        case ProofRule::ClauseIndex: return "CLAUSE_INDEX";
    }
    return "?";
}

namespace {

std::optional<ProofViolation> check_node(const ProofDag& dag, const Cnf& cnf, const ProofNode& n) {
    if (&n == &dag.root() && !same_space(n.space, AffineSpace::full(dag.width())))
        return ProofViolation{n.id, ProofRule::RootFull, "root space is not the full space"};
    switch (n.kind) {
        case NodeKind::Leaf:
            if (n.clause >= cnf.clauses.size())
                return ProofViolation{n.id, ProofRule::ClauseIndex, "clause " + std::to_string(n.clause) + " does not exist"};
            if (!falsified_on(n.space, cnf.clauses[n.clause]))
                return ProofViolation{n.id, ProofRule::LeafFalsification,
                                      "clause " + std::to_string(n.clause) + " is not falsified on the whole space"};
            break;
        case NodeKind::Weaken: {
            const auto& c = dag.at(n.child[0]).space;
            const bool ok = !n.space || (c && n.space->is_subset_of(*c));
            if (!ok) return ProofViolation{n.id, ProofRule::WeakenContainment, "space is not contained in the child's"};
            break;
        }
        case NodeKind::Query:
            for (int a = 0; a < 2; ++a)
                if (!same_space(split(n.space, n.form, a == 1), dag.at(n.child[a]).space))
                    return ProofViolation{n.id, ProofRule::QuerySplit,
                                          "child " + std::to_string(n.child[a]) + " is not the " + (a ? "1" : "0") +
                                              "-half of the space"};
            break;
    }
    return std::nullopt;
}

std::optional<ProofViolation> first_by_id(std::vector<std::optional<ProofViolation>>& found) {
    std::optional<ProofViolation> best;
    for (auto& v : found)
        if (v && (!best || v->node < best->node)) best = std::move(v);
    return best;
}

}  // namespace

std::optional<ProofViolation> check_proof(const ProofDag& dag, const Cnf& cnf, unsigned jobs) {
    if (dag.width() != cnf.num_vars)
        throw std::runtime_error("proof width " + std::to_string(dag.width()) + " does not match " +
                                 std::to_string(cnf.num_vars) + " variables");
    const auto& nodes = dag.nodes();
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(nodes.size())));
    std::vector<std::optional<ProofViolation>> found(jobs);
    auto worker = [&](unsigned w) {
        for (std::size_t i = w; i < nodes.size(); i += jobs) {
            auto v = check_node(dag, cnf, nodes[i]);
            if (v && (!found[w] || v->node < found[w]->node)) found[w] = std::move(v);
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> ts;
        for (unsigned w = 0; w < jobs; ++w) ts.emplace_back(worker, w);
        for (auto& t : ts) t.join();
    }
    return first_by_id(found);
}

ProofMetrics proof_metrics(const ProofDag& dag) {
    const auto& nodes = dag.nodes();
    // topological order by DFS postorder from every node
    std::vector<std::size_t> order;
    std::vector<std::uint8_t> seen(nodes.size(), 0);
    auto pos = [&](std::size_t id) {
        return static_cast<std::size_t>(&dag.at(id) - nodes.data());
    };
    auto arity = [](const ProofNode& n) { return n.kind == NodeKind::Query ? 2 : n.kind == NodeKind::Weaken ? 1 : 0; };
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        if (seen[s]) continue;
        std::vector<std::pair<std::size_t, int>> stack{{s, 0}};
        seen[s] = 1;
        while (!stack.empty()) {
            auto& [v, k] = stack.back();
            if (k == arity(nodes[v])) {
                order.push_back(v);
                stack.pop_back();
                continue;
            }
            const auto w = pos(nodes[v].child[k++]);
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back({w, 0});
            }
        }
    }
    std::reverse(order.begin(), order.end());
    // longest query count on a path from the root; unreachable nodes ignored
    std::vector<long> depth(nodes.size(), -1);
    depth[0] = 0;
    ProofMetrics m{nodes.size(), 0};
    for (auto v : order) {
        if (depth[v] < 0) continue;
        m.depth = std::max(m.depth, static_cast<std::size_t>(depth[v]));
        const long step = nodes[v].kind == NodeKind::Query ? 1 : 0;
        for (int k = 0; k < arity(nodes[v]); ++k) {
            const auto w = pos(nodes[v].child[k]);
            depth[w] = std::max(depth[w], depth[v] + step);
        }
    }
    return m;
}

TraceResult trace(const ProofDag& dag, const Cnf& cnf, const BitVec& x) {
    if (x.width() != dag.width()) throw std::runtime_error("input width does not match the proof");
    TraceResult r;
    const ProofNode* n = &dag.root();
    for (;;) {
        if (!n->space || !n->space->contains(x))
            throw std::runtime_error("input leaves the space of node " + std::to_string(n->id));
        r.path.push_back(n->id);
        if (n->kind == NodeKind::Leaf) break;
        if (n->kind == NodeKind::Weaken) {
            n = &dag.at(n->child[0]);
        } else {
            ++r.length;
            n = &dag.at(n->child[n->form.dot(x)]);
        }
        if (r.path.size() > dag.size()) throw std::runtime_error("trace does not terminate");
    }
    r.leaf = n->id;
    r.clause = n->clause;
    if (r.clause >= cnf.clauses.size() || cnf.clause_satisfied(r.clause, x))
        throw std::runtime_error("leaf " + std::to_string(n->id) + " clause is not falsified by the input");
    return r;
}

ProofDag pdt_refute(const Cnf& cnf) {
    const std::size_t nv = cnf.num_vars;
    if (nv > kRefuteVarCap) throw std::runtime_error("pdt_refute supports at most 20 variables");
    ProofDag dag(nv);
    std::size_t next_id = 0;
    PartialAssignment rho(nv);

    // node id for the subcube fixing x1..xk to rho
    auto emit = [&](auto&& self, std::size_t k) -> std::size_t {
        const std::size_t id = next_id++;
        ProofNode n;
        n.id = id;
        for (std::size_t v = 0; v < k; ++v) n.equations.push_back({BitVec::unit(nv, v), rho.value(v)});
        for (std::size_t c = 0; c < cnf.clauses.size(); ++c)
            if (cnf.falsified_by(c, rho)) {
                n.kind = NodeKind::Leaf;
                n.clause = c;
                dag.add(std::move(n));
                return id;
            }
        if (k == nv) {
            BitVec model(nv);
            for (std::size_t v = 0; v < nv; ++v) model.set(v, rho.value(v));
            throw Satisfiable(model);
        }
        n.kind = NodeKind::Query;
        n.form = BitVec::unit(nv, k);
        // add before the subtrees so nodes are listed in preorder
        dag.add(n);
        for (int a = 0; a < 2; ++a) {
            rho.fix(k, a == 1);
            n.child[a] = self(self, k + 1);
        }
        rho.unfix(k);
        dag.set_children(id, n.child[0], n.child[1]);
        return id;
    };
    emit(emit, 0);
    return dag;
}

namespace reference {

std::optional<ProofViolation> check_by_enumeration(const ProofDag& dag, const Cnf& cnf) {
    const std::size_t w = dag.width();
    if (w > 16) throw std::runtime_error("enumeration oracle supports width <= 16");
    const std::uint64_t total = std::uint64_t{1} << w;
    auto points = [&](const ProofNode& n) {
        std::vector<bool> in(total, false);
        for (std::uint64_t x = 0; x < total; ++x) {
            const auto v = BitVec::from_word(w, x);
            bool ok = true;
            for (const auto& e : n.equations) ok = ok && e.form.dot(v) == e.bit;
            in[x] = ok;
        }
        return in;
    };
    std::vector<const ProofNode*> sorted;
    for (const auto& n : dag.nodes()) sorted.push_back(&n);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto* n : sorted) {
        const auto in = points(*n);
        if (n == &dag.root() && std::count(in.begin(), in.end(), true) != static_cast<long>(total))
            return ProofViolation{n->id, ProofRule::RootFull, ""};
        if (n->kind == NodeKind::Leaf) {
            if (n->clause >= cnf.clauses.size()) return ProofViolation{n->id, ProofRule::ClauseIndex, ""};
            for (std::uint64_t x = 0; x < total; ++x)
                if (in[x] && cnf.clause_satisfied(n->clause, BitVec::from_word(w, x)))
                    return ProofViolation{n->id, ProofRule::LeafFalsification, ""};
        } else if (n->kind == NodeKind::Weaken) {
            const auto c = points(dag.at(n->child[0]));
            for (std::uint64_t x = 0; x < total; ++x)
                if (in[x] && !c[x]) return ProofViolation{n->id, ProofRule::WeakenContainment, ""};
        } else {
            const auto c0 = points(dag.at(n->child[0])), c1 = points(dag.at(n->child[1]));
            for (std::uint64_t x = 0; x < total; ++x) {
                const bool side = n->form.dot(BitVec::from_word(w, x));
                if ((in[x] && !side) != c0[x] || (in[x] && side) != c1[x])
                    return ProofViolation{n->id, ProofRule::QuerySplit, ""};
            }
        }
    }
    return std::nullopt;
}

}  // namespace reference

}  // namespace plab
