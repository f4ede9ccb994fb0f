#include "paritylab/pdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "paritylab/dtfooling.hpp"

namespace plab {

Pdt::Pdt(std::size_t width) : width_(width) { nodes_.push_back(PdtNode{}); }

std::size_t Pdt::add_leaf() {
    nodes_.push_back(PdtNode{});
    return nodes_.size() - 1;
}

std::size_t Pdt::add_query(BitVec form, std::size_t child0, std::size_t child1) {
    nodes_.push_back(PdtNode{});
    set_query(nodes_.size() - 1, std::move(form), child0, child1);
    return nodes_.size() - 1;
}

void Pdt::set_query(std::size_t id, BitVec form, std::size_t child0, std::size_t child1) {
    if (form.width() != width_) throw PdtError("query form width does not match the tree");
    if (child0 >= nodes_.size() || child1 >= nodes_.size()) throw PdtError("child id out of range");
    auto& n = nodes_.at(id);
    n.leaf = false;
    n.form = std::move(form);
    n.child[0] = child0;
    n.child[1] = child1;
}

std::size_t Pdt::depth() const {
    // children always have larger ids than their parent in trees built here,
    // but shared children are allowed, so memoize over a DFS
    std::vector<std::optional<std::size_t>> memo(nodes_.size());
    std::vector<std::pair<std::size_t, bool>> stack{{0, false}};
    std::vector<std::uint8_t> on_stack(nodes_.size(), 0);
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        const auto& n = nodes_[v];
        if (n.leaf) {
            memo[v] = 0;
            continue;
        }
        if (expanded) {
            memo[v] = 1 + std::max(*memo[n.child[0]], *memo[n.child[1]]);
            on_stack[v] = 0;
            continue;
        }
        if (memo[v]) continue;
        if (on_stack[v]) throw PdtError("tree contains a cycle");
        on_stack[v] = 1;
        stack.push_back({v, true});
        for (auto c : n.child)
            if (!memo[c]) stack.push_back({c, false});
    }
    return *memo[0];
}

Pdt Pdt::parse(std::istream& in, std::size_t width) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw PdtError("empty tree file");
    Pdt t(width);
    t.nodes_.clear();
    std::size_t pos = 0;
    // explicit stack: (node id, next child slot)
    std::vector<std::pair<std::size_t, int>> open;
    auto read_node = [&]() -> std::size_t {
        if (pos >= lines.size()) throw PdtError("tree file ends inside a subtree");
        std::istringstream ls(lines[pos]);
        std::string tag, bits;
        ls >> tag;
        const std::size_t lineno = pos + 1;
        ++pos;
        t.nodes_.push_back(PdtNode{});
        const std::size_t id = t.nodes_.size() - 1;
        if (tag == "l") return id;
        if (tag != "q" || !(ls >> bits))
            throw PdtError("record " + std::to_string(lineno) + ": expected 'q <bits>' or 'l'");
        auto form = BitVec::from_string(bits);
        if (form.width() != width) throw PdtError("record " + std::to_string(lineno) + ": form width mismatch");
        t.nodes_[id].leaf = false;
        t.nodes_[id].form = std::move(form);
        open.push_back({id, 0});
        return id;
    };
    read_node();
    while (!open.empty()) {
        auto& [id, slot] = open.back();
        if (slot == 2) {
            open.pop_back();
            continue;
        }
        const std::size_t parent = id;
        const int s = slot++;
        const std::size_t child = read_node();
        t.nodes_[parent].child[s] = child;
    }
    if (pos != lines.size()) throw PdtError("trailing records after the tree");
    return t;
}

Pdt Pdt::read(const std::string& path, std::size_t width) {
    std::ifstream f(path);
    if (!f) throw PdtError("cannot open " + path);
    return parse(f, width);
}

void Pdt::write(std::ostream& out) const {
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        const auto& n = nodes_[v];
        if (n.leaf) {
            out << "l\n";
            continue;
        }
        out << "q " << n.form.to_string() << '\n';
        stack.push_back(n.child[1]);
        stack.push_back(n.child[0]);
    }
}

PdtRun run_pdt(const Pdt& t, const BitVec& x, std::optional<std::size_t> steps) {
    if (x.width() != t.width()) throw PdtError("input width does not match the tree");
    PdtRun r{0, AffineSpace::full(t.width()), {}, {}};
    std::size_t v = 0;
    while (!t.node(v).leaf && (!steps || r.forms.size() < *steps)) {
        const auto& n = t.node(v);
        const bool a = n.form.dot(x);
        r.forms.push_back(n.form);
        r.answers.push_back(a);
        r.space = *intersect(r.space, n.form, a);
        v = n.child[a];
    }
    r.node = v;
    return r;
}

BlockCompleter::BlockCompleter(const AffineSpace& start, const BlockLayout& layout)
    : layout_(layout), space_(start) {
    if (start.width() != layout.width()) throw PdtError("start space width does not match block layout");
    start_amortized_ = amortized_closure(start, layout).blocks.size();
}

void BlockCompleter::ask(const BitVec& form, const std::function<bool(const BitVec&)>& answer, bool coordinate) {
    if (space_.implied_value(form)) return;
    const bool a = answer(form);
    auto next = intersect(space_, form, a);
    if (!next) throw PdtError("answer inconsistent with earlier answers");
    space_ = std::move(*next);
    if (coordinate) ++coordinate_reads_;
}

BlockSet BlockCompleter::initial_stage(const std::function<bool(const BitVec&)>& answer) {
    const auto cl = closure(space_, layout_);
    const auto fresh = cl.minus(closed_);
    for (auto i : fresh)
        for (std::size_t j = 0; j < layout_.b; ++j) ask(BitVec::unit(layout_.width(), layout_.coord(i, j)), answer, true);
    closed_ = closed_.united(fresh);
    return fresh;
}

BlockSet BlockCompleter::query(const BitVec& form, const std::function<bool(const BitVec&)>& answer) {
    auto eqs = space_.equations();
    eqs.push_back(form);
    const auto target = closure(eqs, layout_).united(closed_);
    const auto fresh = target.minus(closed_);
    for (auto i : fresh)
        for (std::size_t j = 0; j < layout_.b; ++j) ask(BitVec::unit(layout_.width(), layout_.coord(i, j)), answer, true);
    closed_ = target;
    ask(form, answer, false);
    ++original_queries_;
    if (!(closure(space_, layout_) == closed_))
        throw PdtError("closure after a completed stage differs from the read blocks");
    if (closed_.size() > start_amortized_ + original_queries_)
        throw PdtError("closed block count exceeds the amortized budget");
    return fresh;
}

namespace {

class CompletionBuilder {
public:
    CompletionBuilder(const Pdt& t, const BlockLayout& layout, std::size_t cap, std::size_t start_amortized)
        : t_(t), layout_(layout), cap_(cap), start_amortized_(start_amortized), out_(t.width()) {}

    Pdt take() { return std::move(out_); }

    // Fills slot `id` (already allocated) for original node v.
    void build(std::size_t id, std::size_t v, const AffineSpace& space, const BlockSet& closed, std::size_t depth) {
        const auto& n = t_.node(v);
        if (n.leaf) return;
        auto eqs = space.equations();
        eqs.push_back(n.form);
        const auto target = closure(eqs, layout_).united(closed);
        if (target.size() > start_amortized_ + depth + 1)
            throw PdtError("closed block count exceeds the amortized budget");
        std::vector<BitVec> coords;
        for (auto i : target.minus(closed))
            for (std::size_t j = 0; j < layout_.b; ++j) coords.push_back(BitVec::unit(layout_.width(), layout_.coord(i, j)));
        chain(id, coords, 0, space, [&, v, target, depth](std::size_t slot, const AffineSpace& s) {
            finish(slot, v, s, target, depth);
        });
    }

    // Reads coords[k..] then calls done.
    template <class Done>
    void chain(std::size_t id, const std::vector<BitVec>& coords, std::size_t k, const AffineSpace& space, Done done) {
        if (k == coords.size()) {
            done(id, space);
            return;
        }
        if (space.implied_value(coords[k])) {
            chain(id, coords, k + 1, space, done);
            return;
        }
        const std::size_t c0 = alloc(), c1 = alloc();
        out_.set_query(id, coords[k], c0, c1);
        chain(c0, coords, k + 1, *intersect(space, coords[k], false), done);
        chain(c1, coords, k + 1, *intersect(space, coords[k], true), done);
    }

    std::size_t alloc() {
        if (out_.size() >= cap_) throw PdtError("block-completed tree exceeds the node cap");
        return out_.add_leaf();
    }

private:
    void finish(std::size_t id, std::size_t v, const AffineSpace& space, const BlockSet& target, std::size_t depth) {
        const auto& n = t_.node(v);
        if (auto implied = space.implied_value(n.form)) {
            check_stage(space, target);
            build(id, n.child[*implied], space, target, depth + 1);
            return;
        }
        const std::size_t c0 = alloc(), c1 = alloc();
        out_.set_query(id, n.form, c0, c1);
        for (int a = 0; a < 2; ++a) {
            const auto s = *intersect(space, n.form, a == 1);
            check_stage(s, target);
            build(a ? c1 : c0, n.child[a], s, target, depth + 1);
        }
    }

    void check_stage(const AffineSpace& s, const BlockSet& target) {
        if (!(closure(s, layout_) == target))
            throw PdtError("closure after a completed stage differs from the read blocks");
    }

    const Pdt& t_;
    BlockLayout layout_;
    std::size_t cap_;
    std::size_t start_amortized_;
    Pdt out_;
};

}  // namespace

Pdt block_complete(const Pdt& t, const AffineSpace& a, const BlockLayout& layout, std::size_t node_cap) {
    if (t.width() != layout.width() || a.width() != layout.width())
        throw PdtError("tree width does not match block layout");
    CompletionBuilder b(t, layout, node_cap, amortized_closure(a, layout).blocks.size());
    // initial stage: read the closure of the start space
    const auto cl = closure(a, layout);
    std::vector<BitVec> coords;
    for (auto i : cl)
        for (std::size_t j = 0; j < layout.b; ++j) coords.push_back(BitVec::unit(layout.width(), layout.coord(i, j)));
    b.chain(0, coords, 0, a, [&](std::size_t slot, const AffineSpace& s) { b.build(slot, 0, s, cl, 0); });
    return b.take();
}

std::string to_string(GameOutcome o) {
    switch (o) {
        case GameOutcome::Win: return "WIN";
        case GameOutcome::Lose: return "LOSE";
        case GameOutcome::ExhaustedQueries: return "EXHAUSTED_QUERIES";
    }
    return "?";
}

CoinGame::CoinGame(const Graph& g, const Charge& charge, const PartialAssignment& rho, std::size_t root,
                   Rational budget)
    : g_(&g), charge_(charge), rho_(rho), root_(root), remaining_(budget) {
    const auto pa = analyze_partial(g, rho, charge);
    if (!pa.valid) throw GraphError("coin game needs a valid starting assignment");
    odd_ = pa.components[pa.odd_component()];
    if (!std::binary_search(odd_.begin(), odd_.end(), root)) throw GraphError("root lies outside the odd component");
    t_.budget = std::move(budget);
    t_.initial_odd = odd_.size();
}

void CoinGame::step(const std::vector<std::pair<std::size_t, bool>>& reveals) {
    GameStep s;
    for (auto [e, v] : reveals) {
        rho_.fix(e, v);
        s.edges.push_back(e);
    }
    if (over_) return;
    const auto pa = analyze_partial(*g_, rho_, charge_);
    s.odd_before = odd_.size();
    std::map<std::size_t, std::vector<std::size_t>> pieces;
    for (auto v : odd_) pieces[pa.component_of[v]].push_back(v);
    if (pieces.size() == 1) {
        s.odd_after = s.large_part = odd_.size();
        t_.steps.push_back(std::move(s));
        return;
    }
    s.split = true;
    const std::vector<std::size_t>* large = nullptr;
    for (const auto& [id, p] : pieces)
        if (!large || p.size() > large->size() || (p.size() == large->size() && p.front() < large->front()))
            large = &p;
    const auto& root_piece = pieces.at(pa.component_of[root_]);
    s.large_part = large->size();
    s.odd_after = root_piece.size();
    if (&root_piece != large) {
        s.win = true;
        t_.win_shrink = odd_.size() - root_piece.size();
        t_.outcome = GameOutcome::Win;
        over_ = true;
    } else {
        s.paid = odd_.size() - large->size();
        t_.paid_total += s.paid;
        if (Rational(s.paid) > remaining_) {
            t_.outcome = GameOutcome::Lose;
            over_ = true;
        } else {
            remaining_ -= s.paid;
        }
    }
    odd_ = root_piece;
    t_.steps.push_back(std::move(s));
}

GameTranscript CoinGame::finish() const {
    GameTranscript t = t_;
    t.final_odd = odd_.size();
    return t;
}

namespace {

std::uint64_t history_seed(std::uint64_t seed, const std::vector<std::pair<std::size_t, bool>>& history) {
    std::uint64_t s = mix64(seed);
    for (auto [e, b] : history) s = mix64(s ^ (2 * static_cast<std::uint64_t>(e) + b + 1));
    return s;
}

class EmptyEdgeTree : public EdgeTree {
public:
    std::optional<std::size_t> next(const Graph&, const Charge&, const PartialAssignment&,
                                    const std::vector<std::pair<std::size_t, bool>>&, std::size_t) override {
        return std::nullopt;
    }
    std::string name() const override { return "empty"; }
};

class GreedyCutTree : public EdgeTree {
public:
    std::optional<std::size_t> next(const Graph& g, const Charge& charge, const PartialAssignment& revealed,
                                    const std::vector<std::pair<std::size_t, bool>>&, std::size_t remaining) override {
        if (remaining == 0) return std::nullopt;
        const auto pa = analyze_partial(g, revealed, charge);
        if (pa.odd_components.size() != 1) return std::nullopt;
        const auto& comp = pa.components[pa.odd_component()];
        const std::size_t csize = comp.size();
        if (csize < 2) return std::nullopt;
        std::vector<int> dist(g.vertex_count());
        std::vector<bool> in_x(g.vertex_count());

        struct Best {
            bool feasible = false;
            std::size_t balance = 0, cut = 0;
            std::size_t edge = 0;
            bool set = false;
        } best;
        for (auto center : comp) {
            // BFS ball of radius 0, 1, 2 within the component
            std::fill(dist.begin(), dist.end(), -1);
            std::vector<std::size_t> order{center};
            dist[center] = 0;
            for (std::size_t k = 0; k < order.size(); ++k) {
                const auto u = order[k];
                if (dist[u] == 2) continue;
                for (const auto& inc : g.incident(u))
                    if (!revealed.is_fixed(inc.edge) && dist[inc.neighbor] < 0) {
                        dist[inc.neighbor] = dist[u] + 1;
                        order.push_back(inc.neighbor);
                    }
            }
            for (int radius = 0; radius <= 2; ++radius) {
                std::fill(in_x.begin(), in_x.end(), false);
                std::size_t xsize = 0;
                for (auto u : order)
                    if (dist[u] <= radius) {
                        in_x[u] = true;
                        ++xsize;
                    }
                if (xsize == csize) break;
                std::size_t cut = 0, first = g.edge_count();
                for (auto u : comp) {
                    if (!in_x[u]) continue;
                    for (const auto& inc : g.incident(u))
                        if (!revealed.is_fixed(inc.edge) && !in_x[inc.neighbor]) {
                            ++cut;
                            first = std::min(first, inc.edge);
                        }
                }
                if (cut == 0) continue;
                const bool feasible = cut <= remaining;
                const std::size_t balance = std::min(xsize, csize - xsize);
                bool better;
                if (!best.set)
                    better = true;
                else if (feasible != best.feasible)
                    better = feasible;
                else if (feasible)
                    better = balance > best.balance || (balance == best.balance && cut < best.cut);
                else
                    better = cut < best.cut || (cut == best.cut && balance > best.balance);
                if (better) best = {feasible, balance, cut, first, true};
            }
        }
        if (!best.set) return std::nullopt;
        return best.edge;
    }
    std::string name() const override { return "greedy-cut"; }
};

class RandomEdgeTree : public EdgeTree {
public:
    explicit RandomEdgeTree(std::uint64_t seed) : seed_(seed) {}
    std::optional<std::size_t> next(const Graph& g, const Charge&, const PartialAssignment& revealed,
                                    const std::vector<std::pair<std::size_t, bool>>& history,
                                    std::size_t remaining) override {
        if (remaining == 0) return std::nullopt;
        auto open = revealed.free_indices();
        if (open.empty() || g.edge_count() == 0) return std::nullopt;
        Rng rng(history_seed(seed_, history));
        return open[uniform_below(rng, open.size())];
    }
    std::string name() const override { return "random-edge"; }

private:
    std::uint64_t seed_;
};

class ScriptedEdgeTree : public EdgeTree {
public:
    explicit ScriptedEdgeTree(std::vector<std::size_t> edges) : edges_(std::move(edges)) {}
    std::optional<std::size_t> next(const Graph&, const Charge&, const PartialAssignment& revealed,
                                    const std::vector<std::pair<std::size_t, bool>>&, std::size_t remaining) override {
        if (remaining == 0) return std::nullopt;
        for (auto e : edges_)
            if (!revealed.is_fixed(e)) return e;
        return std::nullopt;
    }
    std::string name() const override { return "scripted"; }

private:
    std::vector<std::size_t> edges_;
};

std::uint64_t answer_seed(std::uint64_t seed, const std::vector<bool>& answers) {
    std::uint64_t s = mix64(seed ^ 0x51ed2701a3f1c9b5ULL);
    for (bool a : answers) s = mix64(s ^ (a ? 2 : 1));
    return s;
}

class RandomParityTree : public ParityTree {
public:
    RandomParityTree(const BlockLayout& layout, std::uint64_t seed, std::size_t max_blocks)
        : layout_(layout), seed_(seed), max_blocks_(std::max<std::size_t>(1, std::min(max_blocks, layout.n))) {}
    std::optional<BitVec> next(const std::vector<BitVec>&, const std::vector<bool>& answers) override {
        Rng rng(answer_seed(seed_, answers));
        const std::size_t k = 1 + uniform_below(rng, max_blocks_);
        std::vector<std::size_t> blocks(layout_.n);
        for (std::size_t i = 0; i < layout_.n; ++i) blocks[i] = i;
        BitVec form(layout_.width());
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t j = t + uniform_below(rng, layout_.n - t);
            std::swap(blocks[t], blocks[j]);
            std::uint64_t bits = 0;
            while (bits == 0) bits = rng() & ((layout_.b == 64) ? ~0ULL : ((1ULL << layout_.b) - 1));
            form.deposit(layout_.coord(blocks[t], 0), layout_.b, bits);
        }
        return form;
    }
    std::string name() const override { return "random-linear"; }

private:
    BlockLayout layout_;
    std::uint64_t seed_;
    std::size_t max_blocks_;
};

class CoordinateTree : public ParityTree {
public:
    CoordinateTree(const BlockLayout& layout, std::uint64_t seed) : layout_(layout), seed_(seed) {}
    std::optional<BitVec> next(const std::vector<BitVec>&, const std::vector<bool>& answers) override {
        Rng rng(answer_seed(seed_, answers));
        return BitVec::unit(layout_.width(), uniform_below(rng, layout_.width()));
    }
    std::string name() const override { return "coordinate"; }

private:
    BlockLayout layout_;
    std::uint64_t seed_;
};

class ScriptedParityTree : public ParityTree {
public:
    explicit ScriptedParityTree(Pdt t) : t_(std::move(t)) {}
    std::optional<BitVec> next(const std::vector<BitVec>&, const std::vector<bool>& answers) override {
        std::size_t v = 0;
        for (bool a : answers) {
            if (t_.node(v).leaf) return std::nullopt;
            v = t_.node(v).child[a];
        }
        if (t_.node(v).leaf) return std::nullopt;
        return t_.node(v).form;
    }
    std::string name() const override { return "scripted"; }

private:
    Pdt t_;
};

}  // namespace

std::unique_ptr<EdgeTree> make_empty_edge_tree() { return std::make_unique<EmptyEdgeTree>(); }
std::unique_ptr<EdgeTree> make_greedy_cut_tree() { return std::make_unique<GreedyCutTree>(); }
std::unique_ptr<EdgeTree> make_random_edge_tree(std::uint64_t seed) { return std::make_unique<RandomEdgeTree>(seed); }
std::unique_ptr<EdgeTree> make_scripted_edge_tree(std::vector<std::size_t> edges) {
    return std::make_unique<ScriptedEdgeTree>(std::move(edges));
}
std::unique_ptr<ParityTree> make_random_parity_tree(const BlockLayout& layout, std::uint64_t seed,
                                                    std::size_t max_blocks) {
    return std::make_unique<RandomParityTree>(layout, seed, max_blocks);
}
std::unique_ptr<ParityTree> make_coordinate_tree(const BlockLayout& layout, std::uint64_t seed) {
    return std::make_unique<CoordinateTree>(layout, seed);
}
std::unique_ptr<ParityTree> make_scripted_parity_tree(Pdt t) {
    return std::make_unique<ScriptedParityTree>(std::move(t));
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0, 1};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

TrialRecord run_unlifted_trial(const HardnessConfig& c, EdgeTree& tree, std::uint64_t trial, double h) {
    TrialRecord r;
    r.trial = trial;
    r.seed = derive_seed(c.seed, trial);
    Rng rng(r.seed);
    const auto sample = dtfooling_sample(c.graph, c.start, c.charge, rng);
    r.root = sample.root;
    CoinGame game(c.graph, c.charge, c.start, sample.root, c.budget);
    PartialAssignment revealed = c.start;
    std::vector<std::pair<std::size_t, bool>> history;
    for (std::size_t step = 0; step < c.queries; ++step) {
        const auto e = tree.next(c.graph, c.charge, revealed, history, c.queries - step);
        if (!e) break;
        ++r.queries;
        if (revealed.is_fixed(*e)) continue;
        const bool bit = sample.assignment.get(*e);
        revealed.fix(*e, bit);
        history.push_back({*e, bit});
        game.step({{*e, bit}});
    }
    const auto t = game.finish();
    const auto pa = analyze_partial(c.graph, revealed, c.charge);
    r.in_family = pa.valid;
    r.final_odd = t.final_odd;
    r.outcome = t.outcome;
    r.paid = t.paid_total;
    r.identity_ok = t.identity_holds();
    r.revealed_edges = revealed.fixed_count();
    r.coin_bound_ok = !r.in_family || static_cast<double>(r.paid) * h <= static_cast<double>(r.revealed_edges) + 1e-9;
    return r;
}

TrialRecord run_lifted_trial(const HardnessConfig& c, ParityTree& tree, std::uint64_t trial, double h) {
    TrialRecord r;
    r.trial = trial;
    r.seed = derive_seed(c.seed, trial);
    Rng rng(r.seed);
    const auto& g = *c.gadget;
    const BlockLayout layout{c.graph.edge_count(), g.b};
    const auto sample = dtfooling_sample(c.graph, c.start, c.charge, rng);
    r.root = sample.root;
    const BitVec x = sample_preimage(g, layout, sample.assignment, rng);
    CoinGame game(c.graph, c.charge, c.start, sample.root, c.budget);
    PartialAssignment revealed = c.start;
    BlockCompleter bc(AffineSpace::full(layout.width()), layout);
    auto answer = [&](const BitVec& f) { return f.dot(x); };
    std::vector<BitVec> forms;
    std::vector<bool> answers;
    auto reveal = [&](const BlockSet& fresh) {
        std::vector<std::pair<std::size_t, bool>> reveals;
        for (auto e : fresh)
            if (!revealed.is_fixed(e)) {
                const bool bit = g(x.extract(layout.coord(e, 0), g.b));
                revealed.fix(e, bit);
                reveals.push_back({e, bit});
            }
        return reveals;
    };
    bc.initial_stage(answer);
    for (std::size_t step = 0; step < c.queries; ++step) {
        auto form = tree.next(forms, answers);
        if (!form) break;
        ++r.queries;
        BlockSet fresh;
        try {
            fresh = bc.query(*form, answer);
        } catch (const PdtError&) {
            r.block_cap_ok = false;
            break;
        }
        forms.push_back(*form);
        answers.push_back(answer(*form));
        game.step(reveal(fresh));
    }
    r.closed_blocks = bc.closed().size();
    const auto t = game.finish();
    r.in_family = analyze_partial(c.graph, revealed, c.charge).valid;
    r.final_odd = t.final_odd;
    r.outcome = t.outcome;
    r.paid = t.paid_total;
    r.identity_ok = t.identity_holds();
    r.revealed_edges = revealed.fixed_count();
    r.coin_bound_ok = !r.in_family || static_cast<double>(r.paid) * h <= static_cast<double>(r.revealed_edges) + 1e-9;
    return r;
}

}  // namespace

HardnessReport hardness_experiment(const HardnessConfig& c) {
    const bool lifted = c.gadget.has_value();
    if (lifted ? !c.parity_tree : !c.edge_tree) throw PdtError("hardness experiment needs a tree family");
    if (!analyze_partial(c.graph, c.start, c.charge).valid) throw GraphError("start assignment is not valid");
    const auto m = expander_metrics(c.graph, 0);

    HardnessReport rep;
    rep.family = c.family;
    rep.lifted = lifted;
    rep.vertices = c.graph.vertex_count();
    rep.edges = c.graph.edge_count();
    rep.degree = m.degree;
    rep.queries = c.queries;
    rep.block_bits = lifted ? c.gadget->b : 0;
    rep.trials = c.trials;
    rep.seed = c.seed;
    rep.budget = c.budget;
    rep.lambda2 = m.lambda2;
    rep.edge_expansion = (static_cast<double>(m.degree) - m.lambda2) / 2;
    rep.records.resize(c.trials);

    const unsigned jobs = std::max(1u, std::min<unsigned>(c.jobs, static_cast<unsigned>(std::max<std::uint64_t>(1, c.trials))));
    std::vector<std::exception_ptr> errors(jobs);
    auto worker = [&](unsigned w) {
        try {
            auto et = lifted ? nullptr : c.edge_tree();
            auto pt = lifted ? c.parity_tree() : nullptr;
            for (std::uint64_t t = w; t < c.trials; t += jobs)
                rep.records[t] = lifted ? run_lifted_trial(c, *pt, t, rep.edge_expansion)
                                        : run_unlifted_trial(c, *et, t, rep.edge_expansion);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> ts;
        for (unsigned w = 0; w < jobs; ++w) ts.emplace_back(worker, w);
        for (auto& t : ts) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (const auto& r : rep.records) {
        rep.successes += r.in_family;
        rep.wins += r.outcome == GameOutcome::Win;
        rep.losses += r.outcome == GameOutcome::Lose;
        rep.exhausted += r.outcome == GameOutcome::ExhaustedQueries;
        rep.identity_failures += !r.identity_ok;
        rep.coin_bound_failures += !r.coin_bound_ok;
        rep.block_cap_failures += !r.block_cap_ok;
        rep.max_paid = std::max(rep.max_paid, r.paid);
    }
    rep.interval = wilson_interval(rep.successes, rep.trials);
    return rep;
}

void write_trials_csv(std::ostream& out, const HardnessReport& r) {
    out << "trial,seed,root,queries,revealed_edges,closed_blocks,final_odd,in_family,outcome,paid,identity_ok,"
           "coin_bound_ok\n";
    for (const auto& t : r.records)
        out << t.trial << ',' << t.seed << ',' << t.root << ',' << t.queries << ',' << t.revealed_edges << ','
            << t.closed_blocks << ',' << t.final_odd << ',' << t.in_family << ',' << to_string(t.outcome) << ','
            << t.paid << ',' << t.identity_ok << ',' << t.coin_bound_ok << '\n';
}

void write_summary(std::ostream& out, const HardnessReport& r, bool csv) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"family", r.family},
        {"variant", r.lifted ? "lifted" : "unlifted"},
        {"vertices", std::to_string(r.vertices)},
        {"edges", std::to_string(r.edges)},
        {"degree", std::to_string(r.degree)},
        {"block_bits", std::to_string(r.block_bits)},
        {"queries", std::to_string(r.queries)},
        {"trials", std::to_string(r.trials)},
        {"seed", std::to_string(r.seed)},
        {"successes", std::to_string(r.successes)},
        {"success_rate", std::to_string(r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0)},
        {"wilson_low", std::to_string(r.interval.low)},
        {"wilson_high", std::to_string(r.interval.high)},
        {"lambda2", std::to_string(r.lambda2)},
        {"edge_expansion", std::to_string(r.edge_expansion)},
        {"budget", to_string(r.budget)},
        {"wins", std::to_string(r.wins)},
        {"losses", std::to_string(r.losses)},
        {"exhausted", std::to_string(r.exhausted)},
        {"max_paid", std::to_string(r.max_paid)},
        {"identity_failures", std::to_string(r.identity_failures)},
        {"coin_bound_failures", std::to_string(r.coin_bound_failures)},
        {"block_cap_failures", std::to_string(r.block_cap_failures)},
    };
    if (csv) out << "key,value\n";
    for (const auto& [k, v] : kv) out << k << (csv ? "," : ": ") << v << '\n';
}

}  // namespace plab
