// Acceptance suite: one PASS/FAIL line per criterion, each with a pinned
// wall-clock limit. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "corpus.hpp"
#include "paritylab/cnf.hpp"
#include "paritylab/dtfooling.hpp"
#include "paritylab/gadget.hpp"
#include "paritylab/lemmalab.hpp"
#include "paritylab/pdt.hpp"
#include "paritylab/resproof.hpp"
#include "paritylab/tseitin.hpp"

#ifndef PLAB_DIMACS_CHECK
#define PLAB_DIMACS_CHECK "tests/acceptance/dimacs_check.py"
#endif
#ifndef PLAB_PYTHON
#define PLAB_PYTHON "python3"
#endif

using namespace plab;

namespace {

const unsigned kJobs = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
struct Tally {
    std::size_t checks = 0, failures = 0;
    std::string first;
    void expect(bool cond, const std::string& what) {
        ++checks;
        if (cond) return;
        if (failures++ == 0) first = what;
    }
    Outcome outcome(const std::string& summary) const {
        if (failures == 0) return {true, summary};
        return {false, summary + "; " + std::to_string(failures) + " failures, first: " + first};
    }
};

Outcome ip_spectrum() {
    Tally t;
    for (std::size_t b : {2, 4, 6, 8}) {
        const auto s = walsh_spectrum(ip_gadget(b), Convention::PmOne);
        const Rational target(BigInt(1), BigInt(1) << (b / 2));
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << b); ++mask) {
            const auto c = s.coeff(mask);
            t.expect(abs(c) == target, "b=" + std::to_string(b) + " S=" + std::to_string(mask) + " coefficient " + to_string(c));
        }
    }
    return t.outcome(std::to_string(t.checks) + " coefficients equal 2^-b/2 exactly");
}

Outcome equidistribution() {
    Tally t;
    const auto g = ip_gadget(12);
    const BlockLayout layout{2, 12};
    std::size_t by_codim[3] = {0, 0, 0};
    for (std::uint64_t i = 0; i < 50; ++i) {
        Rng rng(derive_seed(0xE0D1, i));
        // A safe space on two blocks has codimension at most 2.
        const std::size_t codim = i % 3;
        const auto a = random_safe_space(layout, codim, rng);
        const auto z = random_bitvec(2, rng);
        ++by_codim[codim];
        const auto es = check_exponential_sum(a, z, g, kJobs);
        const auto uc = check_uniform_coset(a, z, g, kJobs);
        t.expect(es.verdict == Verdict::Pass, "exponential sum instance " + std::to_string(i) + " " + to_string(es.verdict));
        t.expect(uc.verdict == Verdict::Pass, "uniform coset instance " + std::to_string(i) + " " + to_string(uc.verdict));
    }
    std::ostringstream s;
    s << "50 safe spaces (codim 0/1/2: " << by_codim[0] << '/' << by_codim[1] << '/' << by_codim[2]
      << "), exact counts inside both eta bounds";
    return t.outcome(s.str());
}

Outcome conditional_fooling() {
    Tally t;
    const auto g = ip_gadget(12);
    Rational worst[3] = {Rational(0), Rational(0), Rational(0)};
    for (std::size_t k : {1, 2})
        for (std::size_t v = 0; v < 10; ++v) {
            Rng rng(derive_seed(0xF001 + k, v));
            const auto p = make_fooling_pair(g, 2, k, v, rng);
            const auto r = check_conditional_fooling(p.b, p.a, p.y, p.z, g, kJobs);
            Rational bound(1);
            for (std::size_t i = 0; i < k; ++i) bound *= Rational(3, 4);
            const auto prob = r.probability();
            worst[k] = std::max(worst[k], prob);
            t.expect(r.verdict == Verdict::Pass && prob <= bound,
                     "k=" + std::to_string(k) + " pair " + std::to_string(v) + " (" + p.shape + ") probability " +
                         to_string(prob));
        }
    const auto ce = counterexample_demo(2, g);
    t.expect(ce.conditional.denominator != 0 && ce.conditional.probability() == Rational(1),
             "counterexample conditional probability " + to_string(ce.conditional.probability()));
    return t.outcome("20 pairs, max probability k=1 " + to_string(worst[1]) + ", k=2 " + to_string(worst[2]) +
                     "; counterexample gives " + to_string(ce.conditional.probability()));
}

Outcome closure_laws() {
    const auto r = closure_law_suite(1000, 0xC10503);
    std::ostringstream s;
    s << r.trials << " instances (" << r.adversarial << " adversarial), oracle mismatches " << r.oracle_mismatches;
    for (std::size_t i = 0; i < kLawCount; ++i)
        if (r.failures[i]) s << ", " << kLawNames[i] << " failures " << r.failures[i];
    if (!r.ok()) s << "; first: " << r.first_failure;
    return {r.ok(), s.str()};
}

// All partial assignments fixing at most `max_fixed` edges.
void for_each_conditioning(std::size_t edges, std::size_t max_fixed, const std::function<void(const PartialAssignment&)>& f) {
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> pick = [&](std::size_t from) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << chosen.size()); ++bits) {
            PartialAssignment alpha(edges);
            for (std::size_t i = 0; i < chosen.size(); ++i) alpha.fix(chosen[i], (bits >> i) & 1);
            f(alpha);
        }
        if (chosen.size() == max_fixed) return;
        for (std::size_t e = from; e < edges; ++e) {
            chosen.push_back(e);
            pick(e + 1);
            chosen.pop_back();
        }
    };
    pick(0);
}

Outcome root_hiding() {
    Tally t;
    std::size_t conditionings = 0, valid = 0;
    const std::vector<std::pair<std::string, Graph>> graphs = {{"K5", complete_graph(5)},
                                                               {"4-regular n=7", random_regular_graph(7, 4, 0x7007)}};
    for (const auto& [name, g] : graphs) {
        const auto charge = corpus::odd_charge(g);
        const PartialAssignment rho(g.edge_count());
        for_each_conditioning(g.edge_count(), 3, [&](const PartialAssignment& alpha) {
            ++conditionings;
            const auto pa = analyze_partial(g, alpha, charge);
            if (!pa.valid) return;
            ++valid;
            const auto& comp = pa.components[pa.odd_component()];
            const std::set<std::size_t> inside(comp.begin(), comp.end());
            try {
                const auto d = exact_root_distribution(g, rho, alpha, charge);
                const BigInt& size = d.counts.at(comp.front());
                for (std::size_t v = 0; v < g.vertex_count(); ++v) {
                    const bool in = inside.count(v) != 0;
                    t.expect(in ? d.counts[v] == size : d.counts[v] == 0,
                             name + " alpha " + alpha.to_string() + ": |S_" + std::to_string(v) + "| differs");
                    t.expect(d.probability(v) == (in ? Rational(BigInt(1), BigInt(comp.size())) : Rational(0)),
                             name + " alpha " + alpha.to_string() + ": vertex " + std::to_string(v) + " has probability " +
                                 to_string(d.probability(v)));
                }
            } catch (const std::exception& e) {
                t.expect(false, name + " alpha " + alpha.to_string() + ": " + e.what());
            }
        });
    }
    return t.outcome(std::to_string(valid) + " valid conditionings of " + std::to_string(conditionings) +
                     " with <= 3 edges fixed; root law uniform on the odd component");
}

std::set<std::vector<int>> clause_set(const Cnf& f) {
    std::set<std::vector<int>> out;
    for (auto c : f.clauses) {
        std::sort(c.begin(), c.end());
        out.insert(c);
    }
    return out;
}

// Runs the external reader; returns its report line, empty on failure.
std::string external_roundtrip(const Cnf& f, const std::string& tag, Cnf& back) {
    const auto dir = std::filesystem::temp_directory_path() / ("paritylab_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto in = dir / (tag + ".cnf"), out = dir / (tag + ".back.cnf"), log = dir / (tag + ".log");
    write_dimacs(in.string(), f);
    const std::string cmd = std::string(PLAB_PYTHON) + " " + PLAB_DIMACS_CHECK + " " + in.string() + " " + out.string() +
                            " > " + log.string() + " 2>&1";
    std::string line;
    if (std::system(cmd.c_str()) == 0) {
        std::ifstream l(log);
        std::getline(l, line);
        back = read_dimacs(out.string());
    }
    std::filesystem::remove_all(dir);
    return line;
}

Outcome tseitin_pipeline() {
    Tally t;
    const auto k5 = complete_graph(5);
    const auto k5cnf = tseitin_cnf(k5, all_ones_charge(k5));
    t.expect(k5cnf.num_vars == 10 && k5cnf.clauses.size() == 40,
             "K5 has " + std::to_string(k5cnf.num_vars) + " vars and " + std::to_string(k5cnf.clauses.size()) + " clauses");
    t.expect(brute_unsat(k5cnf, kJobs), "K5 Tseitin formula is satisfiable");

    const auto tri = cycle_graph(3);
    const auto lifted = lift_cnf(tseitin_cnf(tri, all_ones_charge(tri)), ip_gadget(2));
    // Three edges times two bits per block.
    t.expect(lifted.num_vars == 6, "lifted triangle has " + std::to_string(lifted.num_vars) + " vars");
    t.expect(brute_unsat(lifted, kJobs), "lifted triangle is satisfiable");

    for (const auto& [tag, f] : {std::pair<std::string, Cnf>{"k5", k5cnf}, {"lifted_triangle", lifted}}) {
        Cnf back;
        const auto line = external_roundtrip(f, tag, back);
        t.expect(!line.empty(), tag + ": external reader failed");
        if (line.empty()) continue;
        const std::string want = "vars " + std::to_string(f.num_vars) + " clauses " + std::to_string(clause_set(f).size()) +
                                 " satisfiable false";
        t.expect(line == want, tag + ": external reader says '" + line + "'");
        t.expect(back.num_vars == f.num_vars && clause_set(back) == clause_set(f), tag + ": round trip changed the clauses");
    }
    return t.outcome("K5 10 vars / 40 clauses unsat; lifted triangle " + std::to_string(lifted.num_vars) +
                     " vars unsat; DIMACS round trip through sympy");
}

Outcome proof_checker() {
    Tally t;
    const auto corpus = corpus::unsat_corpus();
    std::vector<std::pair<ProofDag, const Cnf*>> proofs;
    for (const auto& [name, f] : corpus) {
        try {
            auto dag = pdt_refute(f);
            const auto v = check_proof(dag, f, kJobs);
            t.expect(!v, name + ": " + (v ? to_string(v->rule) + " at node " + std::to_string(v->node) : ""));
            proofs.push_back({std::move(dag), &f});
        } catch (const std::exception& e) {
            t.expect(false, name + ": " + e.what());
        }
    }
    Rng rng(0x9A7E);
    std::size_t mutations = 0, skipped = 0;
    while (mutations < 100 && !proofs.empty()) {
        const auto& [dag, f] = proofs[uniform_below(rng, proofs.size())];
        const auto m = corpus::mutate(dag, *f, rng);
        bool rejected = false;
        try {
            m.dag.validate();
            rejected = check_proof(m.dag, *f, kJobs).has_value();
        } catch (const ProofParseError&) {
            rejected = true;
        }
        // A mutation that happens to leave a valid refutation is not a defect.
        if (!rejected && !reference::check_by_enumeration(m.dag, *f)) {
            ++skipped;
            continue;
        }
        ++mutations;
        t.expect(rejected, "a " + m.kind + " mutation was accepted");
    }

    std::ostringstream chain;
    chain << "rxp 2 6\n";
    for (int i = 0; i < 5; ++i) chain << i << " k=WEAK " << i + 1 << '\n';
    chain << "5 k=LEAF 0\n";
    std::istringstream chain_in(chain.str());
    const auto dag = ProofDag::parse(chain_in);
    t.expect(proof_metrics(dag).depth == 0, "weakening chain depth " + std::to_string(proof_metrics(dag).depth));
    return t.outcome(std::to_string(proofs.size()) + " corpus refutations check OK; " + std::to_string(mutations) +
                     " mutations rejected (" + std::to_string(skipped) + " still-valid skipped); chain depth " +
                     std::to_string(proof_metrics(dag).depth));
}

Outcome hardness() {
    HardnessConfig c;
    c.graph = random_regular_graph(51, 6, 0x51);
    c.charge = all_ones_charge(c.graph);
    c.start = PartialAssignment(c.graph.edge_count());
    c.queries = c.graph.edge_count() / 20;
    c.trials = 10000;
    c.seed = 0x4A2D;
    c.jobs = kJobs;
    c.family = "greedy";
    c.budget = Rational(BigInt(51), BigInt(50 * 6));
    c.edge_tree = [] { return make_greedy_cut_tree(); };
    const auto r = hardness_experiment(c);
    std::ostringstream s;
    s.precision(4);
    s << "q=" << r.queries << ", " << r.successes << "/" << r.trials << " stay valid, Wilson [" << r.interval.low << ", "
      << r.interval.high << "], identity failures " << r.identity_failures << ", coin bound failures "
      << r.coin_bound_failures;
    const bool ok = r.interval.low >= 1.0 / 3.0 && r.identity_failures == 0;
    return {ok, s.str()};
}

struct Criterion {
    const char* name;
    double limit_seconds;
    Outcome (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"ip-spectrum", 5, ip_spectrum},
        {"equidistribution", 300, equidistribution},
        {"conditional-fooling", 600, conditional_fooling},
        {"closure-laws", 120, closure_laws},
        {"root-hiding", 120, root_hiding},
        {"tseitin-pipeline", 60, tseitin_pipeline},
        {"proof-checker", 120, proof_checker},
        {"hardness-game", 600, hardness},
    };
    int failed = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::printf("%s %d %s (%.2fs, limit %.0fs%s): %s\n", pass ? "PASS" : "FAIL", index, c.name, secs, c.limit_seconds,
                    in_time ? "" : ", too slow", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
