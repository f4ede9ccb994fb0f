#include <doctest.h>

#include <sstream>

#include "corpus.hpp"
#include "paritylab/resproof.hpp"

using namespace plab;

namespace {

const char* kUnitProof =
    "rxp 1 3\n"
    "0 k=QRY 1 1 2\n"
    "1 k=LEAF 0\n"
    "eq 1 0\n"
    "2 k=LEAF 1\n"
    "eq 1 1\n";

Cnf unit_cnf() {
    Cnf f;
    f.num_vars = 1;
    f.clauses = {{1}, {-1}};
    return f;
}

ProofDag parse_text(const std::string& s) {
    std::istringstream in(s);
    return ProofDag::parse(in);
}

ProofParseError parse_error(const std::string& s) {
    try {
        parse_text(s);
    } catch (const ProofParseError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return ProofParseError(ProofErrorKind::Syntax, 0, "");
}

}  // namespace

TEST_CASE("3-node refutation parses and checks") {
    auto d = parse_text(kUnitProof);
    CHECK(d.size() == 3);
    CHECK(d.root().kind == NodeKind::Query);
    CHECK_FALSE(check_proof(d, unit_cnf()).has_value());
    auto m = proof_metrics(d);
    CHECK(m.size == 3);
    CHECK(m.depth == 1);

    auto t1 = trace(d, unit_cnf(), BitVec::from_string("1"));
    CHECK(t1.leaf == 2);
    CHECK(t1.clause == 1);
    auto t0 = trace(d, unit_cnf(), BitVec::from_string("0"));
    CHECK(t0.leaf == 1);
    CHECK(t0.clause == 0);
    CHECK(t0.length == 1);
}

TEST_CASE("parse errors") {
    auto dangling = parse_error("rxp 1 2\n0 k=QRY 1 1 9\n1 k=LEAF 0\n");
    CHECK(dangling.kind() == ProofErrorKind::Dangling);
    auto cycle = parse_error("rxp 1 2\n0 k=WEAK 1\n1 k=WEAK 0\n");
    CHECK(cycle.kind() == ProofErrorKind::Cycle);
    auto bad = parse_error("rxp 1 1\n0 k=LEAF 0\neq 11 0\n");
    CHECK(bad.kind() == ProofErrorKind::Syntax);
    CHECK(bad.line() == 3);
    CHECK(parse_error("rxp 1 2\n0 k=LEAF 0\n").kind() == ProofErrorKind::Syntax);
    CHECK(parse_error("0 k=LEAF 0\n").kind() == ProofErrorKind::Syntax);
    CHECK(parse_error("rxp 1 1\n0 k=FOO 0\n").line() == 2);
    CHECK(parse_error("rxp 1 2\n0 k=LEAF 0\n0 k=LEAF 1\n").kind() == ProofErrorKind::Syntax);
}

TEST_CASE("checker rule violations") {
    // swapped leaf labels
    auto swapped = parse_text("rxp 1 3\n0 k=QRY 1 1 2\n1 k=LEAF 1\neq 1 0\n2 k=LEAF 0\neq 1 1\n");
    auto v = check_proof(swapped, unit_cnf());
    REQUIRE(v);
    CHECK(v->node == 1);
    CHECK(v->rule == ProofRule::LeafFalsification);

    // weakening to a strictly smaller space
    auto weak = parse_text("rxp 1 4\n0 k=WEAK 3\n3 k=QRY 1 1 2\neq 1 0\n1 k=LEAF 0\neq 1 0\n2 k=LEAF 1\neq 1 1\n");
    v = check_proof(weak, unit_cnf());
    REQUIRE(v);
    CHECK(v->node == 0);
    CHECK(v->rule == ProofRule::WeakenContainment);

    // root not full
    auto root = parse_text("rxp 1 1\n0 k=LEAF 0\neq 1 0\n");
    v = check_proof(root, unit_cnf());
    REQUIRE(v);
    CHECK(v->rule == ProofRule::RootFull);

    // query children not a split
    auto split = parse_text("rxp 1 3\n0 k=QRY 1 1 2\n1 k=LEAF 0\neq 1 0\n2 k=LEAF 0\neq 1 0\n");
    v = check_proof(split, unit_cnf());
    REQUIRE(v);
    CHECK(v->node == 0);
    CHECK(v->rule == ProofRule::QuerySplit);

    CHECK(check_proof(parse_text("rxp 1 1\n0 k=LEAF 7\n"), unit_cnf())->rule == ProofRule::ClauseIndex);
}

TEST_CASE("weakening chain contributes no depth") {
    std::ostringstream s;
    s << "rxp 1 6\n";
    for (int i = 0; i < 5; ++i) s << i << " k=WEAK " << i + 1 << '\n';
    s << "5 k=LEAF 0\n";
    auto d = parse_text(s.str());
    CHECK(proof_metrics(d).depth == 0);
    CHECK(proof_metrics(d).size == 6);
}

TEST_CASE("complete query tree has depth h") {
    Cnf f;
    f.num_vars = 3;
    // every full assignment falsifies exactly one clause
    for (int m = 0; m < 8; ++m) {
        Clause c;
        for (int v = 0; v < 3; ++v) c.push_back((m >> v) & 1 ? -(v + 1) : (v + 1));
        f.clauses.push_back(c);
    }
    auto d = pdt_refute(f);
    CHECK(proof_metrics(d).depth == 3);
    CHECK(d.size() == 15);
    CHECK_FALSE(check_proof(d, f));
}

TEST_CASE("pdt_refute basics") {
    auto d = pdt_refute(unit_cnf());
    std::ostringstream out;
    d.write(out);
    CHECK(out.str() == kUnitProof);

    auto tri = cycle_graph(3);
    auto cnf = tseitin_cnf(tri, all_ones_charge(tri));
    auto p = pdt_refute(cnf);
    CHECK_FALSE(check_proof(p, cnf));
    CHECK(proof_metrics(p).depth <= 3);

    Cnf sat;
    sat.num_vars = 2;
    sat.clauses = {{1, 2}, {-1}};
    try {
        pdt_refute(sat);
        FAIL("expected SATISFIABLE");
    } catch (const Satisfiable& e) {
        CHECK(sat.satisfied_by(e.model()));
    }
}

TEST_CASE("corpus: refute, check, round trip and trace every input") {
    for (const auto& [name, cnf] : corpus::unsat_corpus()) {
        CAPTURE(name);
        auto d = pdt_refute(cnf);
        CHECK_FALSE(check_proof(d, cnf, 3));
        CHECK_FALSE(reference::check_by_enumeration(d, cnf));
        std::ostringstream out;
        d.write(out);
        auto again = parse_text(out.str());
        CHECK_FALSE(check_proof(again, cnf));
        const auto depth = proof_metrics(d).depth;
        if (cnf.num_vars <= 12)
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << cnf.num_vars); ++x) {
                auto t = trace(d, cnf, BitVec::from_word(cnf.num_vars, x));
                CHECK_FALSE(cnf.clause_satisfied(t.clause, BitVec::from_word(cnf.num_vars, x)));
                CHECK(t.length <= depth);
            }
    }
}

TEST_CASE("mutations agree with the enumeration oracle and invalid ones are rejected") {
    Rng rng(77);
    auto corpus = corpus::unsat_corpus();
    int invalid = 0, rejected = 0, total = 0;
    while (invalid < 150) {
        const auto& [name, cnf] = corpus[uniform_below(rng, corpus.size())];
        if (cnf.num_vars > 9) continue;
        auto d = pdt_refute(cnf);
        auto m = corpus::mutate(d, cnf, rng);
        ++total;
        bool structural = false;
        try {
            m.dag.validate();
        } catch (const ProofParseError&) {
            structural = true;
        }
        const bool oracle_bad = structural || reference::check_by_enumeration(m.dag, cnf).has_value();
        const bool checker_bad = structural || check_proof(m.dag, cnf).has_value();
        CAPTURE(m.kind);
        CHECK(oracle_bad == checker_bad);
        invalid += oracle_bad;
        rejected += oracle_bad && checker_bad;
    }
    CHECK(rejected == invalid);
    MESSAGE("mutations drawn: " << total << ", semantically invalid: " << invalid);
}
