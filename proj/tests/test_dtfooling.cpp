#include <doctest.h>

#include <map>
#include <set>

#include "paritylab/dtfooling.hpp"

using namespace plab;

TEST_CASE("tree_complete on a path is unique") {
    Graph path(3, {{0, 1}, {1, 2}});
    std::vector<bool> usable(2, true);
    std::vector<std::uint8_t> target{1, 0, 1};
    BitVec z(2);
    tree_complete(path, usable, {0, 1, 2}, target, 0, z);
    // vertex 2: z1 = 1; vertex 1: z0 + z1 = 0
    CHECK(z.to_string() == "11");
    int matches = 0;
    for (std::uint64_t x = 0; x < 4; ++x) {
        auto w = BitVec::from_word(2, x);
        const bool ok1 = (w.get(0) ^ w.get(1)) == 0, ok2 = w.get(1) == 1;
        matches += ok1 && ok2;
    }
    CHECK(matches == 1);
}

TEST_CASE("tree_complete with a non-tree edge") {
    auto tri = cycle_graph(3);
    std::vector<bool> usable(3, true);
    std::vector<std::uint8_t> target{1, 1, 1};
    std::set<std::string> seen;
    for (bool h : {false, true}) {
        BitVec z(3);
        // the BFS tree from 0 uses edges (0,1) and (0,2); edge (1,2) is index 1
        z.set(1, h);
        tree_complete(tri, usable, {0, 1, 2}, target, 0, z);
        CHECK(z.get(1) == h);
        auto bad = violated_vertices(tri, z, all_ones_charge(tri));
        CHECK(bad == std::vector<std::size_t>{0});
        seen.insert(z.to_string());
    }
    CHECK(seen.size() == 2);

    Graph single(1, {});
    BitVec none(0);
    tree_complete(single, {}, {0}, {1}, 0, none);
    CHECK(none.width() == 0);
    CHECK_THROWS_AS(tree_complete(Graph(2, {}), {}, {0, 1}, {1, 1}, 0, none), GraphError);
}

TEST_CASE("samples violate exactly their root") {
    auto k5 = complete_graph(5);
    Rng rng(42);
    std::map<std::size_t, int> freq;
    const auto charge = all_ones_charge(k5);
    for (int i = 0; i < 5000; ++i) {
        auto s = dtfooling_sample(k5, PartialAssignment(10), rng);
        auto r = root_of(k5, s.assignment, charge);
        REQUIRE(r.root);
        CHECK(*r.root == s.root);
        ++freq[s.root];
    }
    CHECK(freq.size() == 5);
    for (auto& [v, c] : freq) CHECK(std::abs(c - 1000) <= 130);
}

TEST_CASE("roots stay inside the odd component and even components are satisfied") {
    auto g = random_regular_graph(9, 4, 2);
    Rng rng(1);
    int checked = 0;
    for (int t = 0; t < 500; ++t) {
        PartialAssignment rho(g.edge_count());
        for (int k = 0; k < 6; ++k) rho.fix(uniform_below(rng, g.edge_count()), coin(rng));
        auto pa = analyze_partial(g, rho);
        if (!pa.valid) {
            CHECK_THROWS_AS(dtfooling_sample(g, rho, rng), GraphError);
            continue;
        }
        ++checked;
        auto s = dtfooling_sample(g, rho, rng);
        CHECK(pa.component_of[s.root] == pa.odd_component());
        for (auto e : rho.fixed_indices()) CHECK(s.assignment.get(e) == rho.value(e));
        CHECK(violated_vertices(g, s.assignment, all_ones_charge(g)) == std::vector<std::size_t>{s.root});
    }
    CHECK(checked > 100);
}

TEST_CASE("root_of reports every violated vertex") {
    auto k5 = complete_graph(5);
    auto r = root_of(k5, BitVec(10), all_ones_charge(k5));
    CHECK(r.many());
    CHECK(r.violated.size() == 5);

    std::vector<bool> usable(10, true);
    BitVec z(10);
    tree_complete(k5, usable, {0, 1, 2, 3, 4}, {1, 1, 1, 1, 1}, 3, z);
    auto r3 = root_of(k5, z, all_ones_charge(k5));
    CHECK(r3.root == std::optional<std::size_t>(3));
}

TEST_CASE("exact root distribution") {
    auto k5 = complete_graph(5);
    const auto charge = all_ones_charge(k5);
    PartialAssignment none(10);
    auto d = exact_root_distribution(k5, none, none, charge);
    for (std::size_t v = 0; v < 5; ++v) CHECK(d.probability(v) == Rational(1, 5));
    // |S_v| from the affine description agrees with the count
    for (std::size_t v = 0; v < 5; ++v) CHECK(BigInt(root_space(k5, none, v, charge).size()) == d.counts[v]);

    PartialAssignment one(10);
    one.fix(0, true);
    auto d1 = exact_root_distribution(k5, none, one, charge);
    for (std::size_t v = 0; v < 5; ++v) CHECK(d1.probability(v) == Rational(1, 5));

    // cut {0} off by fixing its four edges; vertex 0 gets parity 1 + sum
    PartialAssignment split(10);
    for (const auto& inc : k5.incident(0)) split.fix(inc.edge, false);
    split.fix(k5.incident(0)[0].edge, true);  // residue 0 at vertex 0: {0} even, rest odd
    auto d2 = exact_root_distribution(k5, none, split, charge);
    CHECK(d2.probability(0) == 0);
    for (std::size_t v = 1; v < 5; ++v) CHECK(d2.probability(v) == Rational(1, 4));

    PartialAssignment flip = split;
    flip.fix(k5.incident(0)[1].edge, true);  // now {0} odd and {1..4} even
    auto d3 = exact_root_distribution(k5, none, flip, charge);
    CHECK(d3.probability(0) == 1);

    CHECK_THROWS_AS(exact_root_distribution(k5, none, PartialAssignment::from_string("0000000000"), charge),
                    GraphError);
}
