#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "paritylab/dtfooling.hpp"
#include "paritylab/pdt.hpp"

using namespace plab;

namespace {

// Random tree of the given depth over `width` coordinates.
Pdt random_tree(std::size_t width, std::size_t depth, Rng& rng) {
    Pdt t(width);
    std::vector<std::pair<std::size_t, std::size_t>> todo{{0, depth}};
    while (!todo.empty()) {
        auto [id, d] = todo.back();
        todo.pop_back();
        if (d == 0 || uniform_below(rng, 100) < 15) continue;
        BitVec f(width);
        while (f.is_zero()) f = random_bitvec(width, rng);
        const auto c0 = t.add_leaf(), c1 = t.add_leaf();
        t.set_query(id, f, c0, c1);
        todo.push_back({c0, d - 1});
        todo.push_back({c1, d - 1});
    }
    return t;
}

HardnessConfig k5_config(std::vector<std::size_t> script, Rational budget, std::uint64_t trials) {
    HardnessConfig c;
    c.graph = complete_graph(5);
    c.charge = all_ones_charge(c.graph);
    c.start = PartialAssignment(c.graph.edge_count());
    c.queries = script.size();
    c.trials = trials;
    c.seed = 7;
    c.budget = budget;
    c.family = "scripted";
    c.edge_tree = [script] { return make_scripted_edge_tree(script); };
    return c;
}

// Odd total charge for graphs with an even vertex count.
Charge odd_charge(const Graph& g) {
    auto c = all_ones_charge(g);
    if (g.vertex_count() % 2 == 0) c[0] = 0;
    return c;
}

}  // namespace

TEST_CASE("tree file round trip and run") {
    std::istringstream in("q 110\nl\nq 001\nl\nl\n");
    auto t = Pdt::parse(in, 3);
    CHECK(t.size() == 5);
    CHECK(t.depth() == 2);
    std::ostringstream out;
    t.write(out);
    CHECK(out.str() == "q 110\nl\nq 001\nl\nl\n");

    auto r = run_pdt(t, BitVec::from_string("101"));
    CHECK(r.answers == std::vector<bool>{true, true});
    CHECK(t.node(r.node).leaf);
    CHECK(r.space.contains(BitVec::from_string("101")));
    CHECK(r.space.dim() == 1);

    std::istringstream bad("q 11\nl\n");
    CHECK_THROWS_AS(Pdt::parse(bad, 2), PdtError);
    std::istringstream extra("l\nl\n");
    CHECK_THROWS_AS(Pdt::parse(extra, 2), PdtError);
}

TEST_CASE("depth-0 tree completes to a single leaf") {
    BlockLayout layout{3, 2};
    auto tc = block_complete(Pdt(6), AffineSpace::full(6), layout);
    CHECK(tc.size() == 1);
    CHECK(tc.depth() == 0);
}

TEST_CASE("a single-block query reads that block") {
    BlockLayout layout{3, 2};
    Pdt t(6);
    const auto c0 = t.add_leaf(), c1 = t.add_leaf();
    t.set_query(0, BitVec::from_string("110000"), c0, c1);
    auto tc = block_complete(t, AffineSpace::full(6), layout);
    // a lone form in one block is safe, so nothing is read besides the query
    CHECK(tc.depth() == 1);

    // two forms on one block force reading it
    Pdt t2(6);
    const auto a0 = t2.add_leaf(), a1 = t2.add_leaf();
    t2.set_query(0, BitVec::from_string("100000"), a0, a1);
    for (auto leaf : {a0, a1}) {
        const auto l0 = t2.add_leaf(), l1 = t2.add_leaf();
        t2.set_query(leaf, BitVec::from_string("010000"), l0, l1);
    }
    auto tc2 = block_complete(t2, AffineSpace::full(6), layout);
    CHECK(tc2.depth() == 2);
}

TEST_CASE("block completion property: closed blocks are fully read") {
    Rng rng(2024);
    int checked = 0;
    for (int inst = 0; inst < 150; ++inst) {
        const std::size_t n = 2 + uniform_below(rng, 3), b = 1 + uniform_below(rng, 3);
        const BlockLayout layout{n, b};
        const std::size_t w = layout.width();
        auto t = random_tree(w, 1 + uniform_below(rng, 4), rng);
        AffineSpace start = AffineSpace::full(w);
        if (coin(rng)) {
            BitVec f = random_bitvec(w, rng);
            if (!f.is_zero()) start = *intersect(start, f, coin(rng));
        }
        const auto amort = amortized_closure(start, layout).blocks.size();
        auto tc = block_complete(t, start, layout);
        CHECK(tc.depth() <= t.depth() + b * (amort + t.depth()));
        for (int s = 0; s < 8; ++s) {
            BitVec x = start.sample_point(rng);
            auto orig = run_pdt(t, x);
            auto comp = run_pdt(tc, x);
            // run_pdt starts from the full space; add the start equations back
            comp.space = *intersect(comp.space, start);
            // the completed run answers every original query
            for (const auto& f : orig.forms) CHECK(comp.space.implied_value(f).has_value());
            // and every closure block is fully determined at its leaf
            for (auto i : closure(comp.space, layout))
                for (std::size_t j = 0; j < b; ++j)
                    CHECK(comp.space.implied_value(BitVec::unit(w, layout.coord(i, j))).has_value());

            // online completer agrees with the explicit tree
            BlockCompleter bc(start, layout);
            auto answer = [&](const BitVec& f) { return f.dot(x); };
            bc.initial_stage(answer);
            for (const auto& f : orig.forms) bc.query(f, answer);
            CHECK(bc.space() == comp.space);
            CHECK(bc.closed().size() <= amort + orig.forms.size());
            ++checked;
        }
    }
    CHECK(checked == 1200);
}

TEST_CASE("coin game: isolating a K5 vertex wins exactly when the root is cut off") {
    // edges 0..3 are the edges at vertex 0
    auto c = k5_config({0, 1, 2, 3}, Rational(10), 4000);
    c.jobs = 3;
    auto r = hardness_experiment(c);
    const double p = static_cast<double>(r.wins) / 4000;
    const double sigma = std::sqrt(0.2 * 0.8 / 4000);
    CHECK(std::abs(p - 0.2) <= 3 * sigma);
    CHECK(r.wins + r.exhausted == 4000);
    CHECK(r.max_paid == 1);
    CHECK(r.accounting_ok());
    for (const auto& t : r.records) {
        CHECK((t.root == 0) == (t.outcome == GameOutcome::Win));
        CHECK(t.in_family == (t.root != 0));
    }
}

TEST_CASE("coin game: zero budget loses every paid split") {
    auto r = hardness_experiment(k5_config({0, 1, 2, 3}, Rational(0), 1000));
    CHECK(r.wins + r.losses == 1000);
    CHECK(r.losses > 0);
    for (const auto& t : r.records) CHECK((t.outcome == GameOutcome::Lose) == (t.root != 0));
    CHECK(r.identity_failures == 0);
}

TEST_CASE("empty tree always stays in the family") {
    auto c = k5_config({}, Rational(1), 500);
    c.edge_tree = [] { return make_empty_edge_tree(); };
    auto r = hardness_experiment(c);
    CHECK(r.successes == 500);
    CHECK(r.exhausted == 500);
    CHECK(r.interval.high == doctest::Approx(1.0));
}

TEST_CASE("coin game transcript identity on a hand-played game") {
    auto g = cycle_graph(6);
    const auto charge = odd_charge(g);
    PartialAssignment rho(g.edge_count());
    Rng rng(3);
    auto s = dtfooling_sample(g, rho, charge, rng);
    CoinGame game(g, charge, rho, s.root, Rational(100));
    for (std::size_t e = 0; e < g.edge_count() && !game.over(); ++e) game.step({{e, s.assignment.get(e)}});
    auto t = game.finish();
    CHECK(t.identity_holds());
    CHECK(t.initial_odd == 6);
    CHECK_THROWS_AS(CoinGame(g, charge, rho, 99, Rational(1)), GraphError);
}

TEST_CASE("greedy cut and random trees keep the accounting invariants") {
    auto g = random_regular_graph(20, 4, 11);
    for (int fam = 0; fam < 2; ++fam) {
        HardnessConfig c;
        c.graph = g;
        c.charge = odd_charge(g);
        c.start = PartialAssignment(g.edge_count());
        c.queries = 12;
        c.trials = 400;
        c.seed = 99;
        c.budget = Rational(3);
        c.jobs = 2;
        c.family = fam ? "random" : "greedy";
        if (fam)
            c.edge_tree = [] { return make_random_edge_tree(5); };
        else
            c.edge_tree = [] { return make_greedy_cut_tree(); };
        auto r = hardness_experiment(c);
        CHECK(r.accounting_ok());
        CHECK(r.records.size() == 400);
        c.jobs = 1;
        auto r1 = hardness_experiment(c);
        CHECK(r1.successes == r.successes);
        for (std::size_t i = 0; i < 400; ++i) CHECK(r1.records[i].root == r.records[i].root);
    }
}

TEST_CASE("lifted experiment with block completion") {
    auto g = complete_graph(4);
    HardnessConfig c;
    c.graph = g;
    c.charge = odd_charge(g);
    c.start = PartialAssignment(g.edge_count());
    c.queries = 4;
    c.trials = 300;
    c.seed = 5;
    c.budget = Rational(2);
    c.jobs = 2;
    c.family = "random-linear";
    c.gadget = ip_gadget(2);
    const BlockLayout layout{g.edge_count(), 2};
    c.parity_tree = [layout] { return make_random_parity_tree(layout, 17); };
    auto r = hardness_experiment(c);
    CHECK(r.lifted);
    CHECK(r.accounting_ok());
    for (const auto& t : r.records) CHECK(t.closed_blocks <= t.queries);
}

TEST_CASE("wilson interval") {
    auto w = wilson_interval(5, 10);
    CHECK(w.low == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(w.high == doctest::Approx(0.7634).epsilon(1e-3));
    auto all = wilson_interval(100, 100);
    CHECK(all.high == doctest::Approx(1.0));
    CHECK(all.low == doctest::Approx(0.963).epsilon(1e-3));
}

TEST_CASE("empirical root side at a split matches the exact conditional law") {
    auto g = complete_graph(5);
    const auto charge = all_ones_charge(g);
    const PartialAssignment rho(g.edge_count());
    std::map<std::string, std::pair<int, int>> seen;  // alpha -> (trials, root == 0)
    for (std::uint64_t t = 0; t < 20000; ++t) {
        Rng rng(derive_seed(31, t));
        auto s = dtfooling_sample(g, rho, charge, rng);
        std::string key;
        for (std::size_t e = 0; e < 4; ++e) key += s.assignment.get(e) ? '1' : '0';
        auto& [n, hits] = seen[key];
        ++n;
        hits += s.root == 0;
    }
    CHECK(seen.size() == 16);
    for (const auto& [key, counts] : seen) {
        PartialAssignment alpha(g.edge_count());
        for (std::size_t e = 0; e < 4; ++e) alpha.fix(e, key[e] == '1');
        const double p = to_double(exact_root_distribution(g, rho, alpha, charge).probability(0));
        const double n = counts.first;
        const double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(counts.second / n - p) <= 4 * sigma + 1e-12);
    }
}
