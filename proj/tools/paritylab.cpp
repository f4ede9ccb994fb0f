// Command-line front end. Exit codes: 0 all checks passed, 1 a check failed,
// 2 usage or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "paritylab/cnf.hpp"
#include "paritylab/dtfooling.hpp"
#include "paritylab/gadget.hpp"
#include "paritylab/lemmalab.hpp"
#include "paritylab/pdt.hpp"
#include "paritylab/resproof.hpp"
#include "paritylab/tseitin.hpp"

using namespace plab;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_csv(const std::string& format) { return format == "csv"; }

// Writes to the file when a path is given, otherwise to stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw UsageError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

Gadget gadget_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const auto kind = spec.substr(0, colon);
        const std::size_t b = std::stoul(spec.substr(colon + 1));
        if (kind == "ip") return ip_gadget(b);
        if (kind == "parity") return parity_gadget(b);
        throw UsageError("unknown gadget kind '" + kind + "' (use ip:<b>, parity:<b> or a file)");
    }
    return Gadget::read(spec);
}

Charge charge_from_spec(const std::string& spec, const Graph& g) {
    if (spec == "ones") return all_ones_charge(g);
    if (spec.empty() || spec == "odd") {
        auto c = all_ones_charge(g);
        if (g.vertex_count() % 2 == 0 && !c.empty()) c[0] = 0;
        return c;
    }
    if (spec.size() != g.vertex_count() || spec.find_first_not_of("01") != std::string::npos)
        throw UsageError("charge must be 'ones', 'odd' or " + std::to_string(g.vertex_count()) + " bits");
    Charge c;
    for (char ch : spec) c.push_back(ch == '1');
    return c;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw UsageError("bad rational '" + s + "'");
    }
}

PartialAssignment partial_or_empty(const std::string& path, const Graph& g) {
    return path.empty() ? PartialAssignment(g.edge_count()) : read_partial(path, g.edge_count());
}

void kv(std::ostream& out, bool csv, const std::string& k, const std::string& v) {
    out << k << (csv ? "," : ": ") << v << '\n';
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paritylab: parity lifting, Tseitin formulas, Res(xor) proofs and hardness experiments"};
    app.require_subcommand(1);
    std::function<int()> action;
    auto on = [&](CLI::App* sub, std::function<int()> f) { sub->callback([&action, f] { action = f; }); };

    std::string format = "text";
    unsigned jobs = default_jobs();
    auto add_format = [&](CLI::App* s) {
        s->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "csv"}));
    };
    auto add_jobs = [&](CLI::App* s) { s->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber); };

    // gen-graph
    std::string kind = "regular", out_path;
    std::size_t vertices = 0, degree = 0;
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen-graph", "generate a graph");
    gen->add_option("--kind", kind)->check(CLI::IsMember({"complete", "cycle", "regular"}));
    gen->add_option("--n", vertices, "vertex count")->required();
    gen->add_option("--degree", degree, "degree for regular graphs");
    auto* gen_seed = gen->add_option("--seed", seed, "generator seed (required for regular graphs)");
    gen->add_option("-o,--output", out_path);
    on(gen, [&] {
        Graph g;
        if (kind == "complete") {
            g = complete_graph(vertices);
        } else if (kind == "cycle") {
            g = cycle_graph(vertices);
        } else {
            if (!gen_seed->count()) throw UsageError("--seed is required for random regular graphs");
            if (!degree) throw UsageError("--degree is required for random regular graphs");
            g = random_regular_graph(vertices, degree, seed);
        }
        Output out(out_path);
        g.write(out.stream());
        return kOk;
    });

    // metrics
    std::string graph_path;
    std::size_t sweep_cap = kCheegerSweepCap;
    auto* met = app.add_subcommand("metrics", "spectral and cut metrics of a graph");
    met->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    met->add_option("--sweep-cap", sweep_cap, "largest vertex count for the exhaustive cut sweep");
    add_format(met);
    on(met, [&] {
        const auto g = Graph::read(graph_path);
        const auto m = expander_metrics(g, sweep_cap);
        const bool csv = is_csv(format);
        auto& o = std::cout;
        if (csv) o << "key,value\n";
        kv(o, csv, "vertices", std::to_string(g.vertex_count()));
        kv(o, csv, "edges", std::to_string(g.edge_count()));
        kv(o, csv, "degree", std::to_string(m.degree));
        kv(o, csv, "connected", g.connected() ? "true" : "false");
        std::ostringstream l2, lmin, lam;
        l2.precision(12);
        lmin.precision(12);
        lam.precision(12);
        l2 << m.lambda2;
        lmin << m.lambda_min;
        lam << m.lambda;
        kv(o, csv, "lambda2", l2.str());
        kv(o, csv, "lambda_min", lmin.str());
        kv(o, csv, "lambda", lam.str());
        kv(o, csv, "cheeger_ok", m.cheeger_ok ? (*m.cheeger_ok ? "true" : "false") : "not_checked");
        if (m.cheeger_ok) {
            kv(o, csv, "worst_cut_edges", std::to_string(m.worst_cut_edges));
            kv(o, csv, "worst_cut_side", std::to_string(m.worst_cut_side));
        }
        return kOk;
    });

    // gen-tseitin
    std::string charge_spec;
    bool satisfiable_ok = false;
    auto* gt = app.add_subcommand("gen-tseitin", "Tseitin CNF of a graph in DIMACS");
    gt->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    gt->add_option("--charge", charge_spec, "'odd' (default: all ones, vertex 0 cleared when |V| is even), 'ones', or one bit per vertex");
    gt->add_flag("--allow-even", satisfiable_ok, "accept an even total charge (satisfiable formula)");
    gt->add_option("-o,--output", out_path);
    on(gt, [&] {
        const auto g = Graph::read(graph_path);
        const auto cnf = tseitin_cnf(g, charge_from_spec(charge_spec, g), !satisfiable_ok);
        Output out(out_path);
        write_dimacs(out.stream(), cnf, {"tseitin formula of " + graph_path});
        return kOk;
    });

    // lift
    std::string cnf_path, gadget_spec = "ip:2";
    auto* lift = app.add_subcommand("lift", "lift a CNF by a gadget");
    lift->add_option("cnf", cnf_path)->required()->check(CLI::ExistingFile);
    lift->add_option("--gadget", gadget_spec, "ip:<b>, parity:<b> or a gadget file");
    lift->add_option("-o,--output", out_path);
    on(lift, [&] {
        const auto cnf = read_dimacs(cnf_path);
        const auto g = gadget_from_spec(gadget_spec);
        Output out(out_path);
        write_dimacs(out.stream(), lift_cnf(cnf, g), {"lifted by " + gadget_spec + " from " + cnf_path});
        return kOk;
    });

    // gadget-spectrum
    std::size_t ip_bits = 0;
    std::string convention = "pm";
    auto* gs = app.add_subcommand("gadget-spectrum", "Walsh spectrum of a gadget");
    auto* ip_opt = gs->add_option("--ip", ip_bits, "inner product on this many bits");
    gs->add_option("--gadget", gadget_spec, "ip:<b>, parity:<b> or a gadget file")->excludes(ip_opt);
    gs->add_option("--convention", convention)->check(CLI::IsMember({"pm", "01"}));
    add_format(gs);
    on(gs, [&] {
        const auto g = ip_opt->count() ? ip_gadget(ip_bits) : gadget_from_spec(gadget_spec);
        const auto s = walsh_spectrum(g, convention == "pm" ? Convention::PmOne : Convention::ZeroOne);
        if (is_csv(format)) {
            s.write_csv(std::cout);
            return kOk;
        }
        std::cout << "b: " << g.b << "\nconvention: " << (convention == "pm" ? "PM_ONE" : "ZERO_ONE") << '\n';
        std::cout << "max coefficient: " << to_string(s.max_abs()) << '\n';
        std::cout << "sum of squares: " << to_string(s.sum_of_squares()) << '\n';
        return kOk;
    });

    // sample-dtfooling
    std::string partial_path;
    std::uint64_t count = 1;
    auto* sd = app.add_subcommand("sample-dtfooling", "draw rooted samples of the DTFooling distribution");
    sd->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    sd->add_option("--seed", seed)->required();
    sd->add_option("--count", count);
    sd->add_option("--partial", partial_path, "valid partial assignment file");
    sd->add_option("--charge", charge_spec);
    sd->add_option("-o,--output", out_path);
    on(sd, [&] {
        const auto g = Graph::read(graph_path);
        const auto charge = charge_from_spec(charge_spec, g);
        const auto rho = partial_or_empty(partial_path, g);
        Output out(out_path);
        write_sample_csv_header(out.stream());
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto s = derive_seed(seed, i);
            Rng rng(s);
            write_sample_csv(out.stream(), s, dtfooling_sample(g, rho, charge, rng));
        }
        return kOk;
    });

    // root-dist
    std::string alpha_path;
    bool expect_uniform = false;
    auto* rd = app.add_subcommand("root-dist", "exact conditional law of the root");
    rd->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    rd->add_option("--partial", partial_path, "valid partial assignment rho");
    rd->add_option("--alpha", alpha_path, "further conditioning on edges");
    rd->add_option("--charge", charge_spec);
    rd->add_flag("--expect-uniform", expect_uniform, "fail unless the law is uniform on the odd component");
    on(rd, [&] {
        const auto g = Graph::read(graph_path);
        const auto charge = charge_from_spec(charge_spec, g);
        const auto rho = partial_or_empty(partial_path, g);
        auto alpha = partial_or_empty(alpha_path, g);
        for (auto e : rho.fixed_indices()) alpha.fix(e, rho.value(e));
        const auto d = exact_root_distribution(g, rho, alpha, charge);
        write_distribution_csv(std::cout, d);
        if (!expect_uniform) return kOk;
        const auto pa = analyze_partial(g, alpha, charge);
        if (!pa.valid) {
            std::cerr << "conditioned assignment is not valid; uniformity is not claimed\n";
            return kFailed;
        }
        const auto& comp = pa.components[pa.odd_component()];
        const Rational u(BigInt(1), BigInt(comp.size()));
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            const bool inside = std::find(comp.begin(), comp.end(), v) != comp.end();
            if (d.probability(v) != (inside ? u : Rational(0))) {
                std::cerr << "vertex " << v << " has probability " << to_string(d.probability(v)) << '\n';
                return kFailed;
            }
        }
        return kOk;
    });

    // check-proof
    std::string proof_path;
    auto* cp = app.add_subcommand("check-proof", "check a Res(xor) refutation");
    cp->add_option("proof", proof_path)->required()->check(CLI::ExistingFile);
    cp->add_option("cnf", cnf_path)->required()->check(CLI::ExistingFile);
    add_jobs(cp);
    on(cp, [&] {
        const auto cnf = read_dimacs(cnf_path);
        ProofDag dag;
        try {
            dag = ProofDag::read(proof_path);
        } catch (const ProofParseError& e) {
            std::cout << "REJECTED " << e.what() << '\n';
            return kFailed;
        }
        const auto v = check_proof(dag, cnf, jobs);
        if (!v) {
            std::cout << "OK\n";
            return kOk;
        }
        std::cout << "VIOLATION node " << v->node << ' ' << to_string(v->rule) << ": " << v->detail << '\n';
        return kFailed;
    });

    // proof-metrics
    auto* pm = app.add_subcommand("proof-metrics", "size and depth of a proof");
    pm->add_option("proof", proof_path)->required()->check(CLI::ExistingFile);
    add_format(pm);
    on(pm, [&] {
        const auto m = proof_metrics(ProofDag::read(proof_path));
        const bool csv = is_csv(format);
        if (csv) std::cout << "key,value\n";
        kv(std::cout, csv, "size", std::to_string(m.size));
        kv(std::cout, csv, "depth", std::to_string(m.depth));
        return kOk;
    });

    // pdt-refute
    auto* pr = app.add_subcommand("pdt-refute", "tree-like refutation by coordinate queries");
    pr->add_option("cnf", cnf_path)->required()->check(CLI::ExistingFile);
    pr->add_option("-o,--output", out_path);
    on(pr, [&] {
        const auto cnf = read_dimacs(cnf_path);
        try {
            const auto dag = pdt_refute(cnf);
            Output out(out_path);
            dag.write(out.stream());
        } catch (const Satisfiable& e) {
            std::cout << "SATISFIABLE " << e.model().to_string() << '\n';
            return kFailed;
        }
        return kOk;
    });

    // verify-lemma
    auto* vl = app.add_subcommand("verify-lemma", "exact finite-scale lemma checks");
    vl->require_subcommand(1);
    std::size_t n = 2, b = 12, codim = 1, k = 1, trials = 1000, pairs = 1;
    std::string z_bits;
    auto add_space_opts = [&](CLI::App* s) {
        s->add_option("--n", n, "blocks");
        s->add_option("--b", b, "bits per block (inner product gadget)");
        s->add_option("--codim", codim, "codimension of the random safe space");
        s->add_option("--z", z_bits, "target point (random when omitted)");
        s->add_option("--count", count, "number of random spaces");
        s->add_option("--seed", seed)->required();
        add_format(s);
        add_jobs(s);
    };
    auto run_space_lemma = [&](bool coset) {
        const auto g = ip_gadget(b);
        const BlockLayout layout{n, b};
        bool csv = is_csv(format), ok = true;
        if (csv) write_report_csv_header(std::cout);
        for (std::uint64_t i = 0; i < count; ++i) {
            Rng rng(derive_seed(seed, i));
            const auto a = random_safe_space(layout, codim, rng);
            BitVec z = z_bits.empty() ? random_bitvec(n, rng) : BitVec::from_string(z_bits);
            if (z.width() != n) throw UsageError("--z needs " + std::to_string(n) + " bits");
            auto r = coset ? check_uniform_coset(a, z, g, jobs) : check_exponential_sum(a, z, g, jobs);
            r.params.push_back({"seed", std::to_string(seed)});
            r.params.push_back({"instance", std::to_string(i)});
            if (!csv && i) std::cout << '\n';
            write_report(std::cout, r, csv);
            ok = ok && r.verdict != Verdict::Fail;
        }
        return ok ? kOk : kFailed;
    };
    auto* es = vl->add_subcommand("exponential-sum", "Pr[x in A and G(x) = z] against the eta budget");
    add_space_opts(es);
    on(es, [&] { return run_space_lemma(false); });
    auto* uc = vl->add_subcommand("uniform-coset", "Pr[x in A] for x uniform in G^-1(z)");
    add_space_opts(uc);
    on(uc, [&] { return run_space_lemma(true); });

    auto* cf = vl->add_subcommand("conditional-fooling", "Pr[x in B | x in A] on generated nested pairs");
    cf->add_option("--n", n);
    cf->add_option("--b", b);
    cf->add_option("--k", k)->check(CLI::Range(1, 2));
    cf->add_option("--pairs", pairs, "number of generated pairs");
    cf->add_option("--seed", seed)->required();
    add_format(cf);
    add_jobs(cf);
    on(cf, [&] {
        const auto g = ip_gadget(b);
        const bool csv = is_csv(format);
        bool ok = true;
        if (csv) write_report_csv_header(std::cout);
        for (std::size_t i = 0; i < pairs; ++i) {
            Rng rng(derive_seed(seed, i));
            const auto p = make_fooling_pair(g, n, k, i, rng);
            auto r = check_conditional_fooling(p.b, p.a, p.y, p.z, g, jobs);
            r.params.push_back({"shape", p.shape});
            r.params.push_back({"seed", std::to_string(seed)});
            r.params.push_back({"instance", std::to_string(i)});
            if (!csv && i) std::cout << '\n';
            write_report(std::cout, r, csv);
            ok = ok && r.verdict != Verdict::Fail;
        }
        return ok ? kOk : kFailed;
    });

    auto* ce = vl->add_subcommand("counterexample", "why safety is needed");
    ce->add_option("--n", n);
    ce->add_option("--gadget", gadget_spec, "ip:<b>, parity:<b> or a gadget file");
    add_format(ce);
    on(ce, [&] {
        const auto r = counterexample_demo(n, gadget_from_spec(gadget_spec));
        write_counterexample(std::cout, r, is_csv(format));
        return r.verdict == Verdict::Pass ? kOk : kFailed;
    });

    auto* cl = vl->add_subcommand("closure-laws", "closure law property suite");
    cl->add_option("--trials", trials);
    cl->add_option("--seed", seed)->required();
    add_format(cl);
    on(cl, [&] {
        const auto r = closure_law_suite(trials, seed);
        write_closure_laws(std::cout, r, is_csv(format));
        return r.ok() ? kOk : kFailed;
    });

    // hardness-experiment
    std::string tree = "greedy", tree_path, budget_spec, trials_csv;
    std::size_t queries = 0;
    std::uint64_t tree_seed = 0, exp_trials = 1000;
    double min_success = -1;
    auto* he = app.add_subcommand("hardness-experiment", "Monte Carlo estimate of staying in the valid family");
    he->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    he->add_option("--tree", tree, "greedy | random | empty | scripted | random-linear | coordinate")
        ->check(CLI::IsMember({"greedy", "random", "empty", "scripted", "random-linear", "coordinate"}));
    he->add_option("--tree-file", tree_path, "edge list (scripted) or parity tree file (scripted, lifted)");
    he->add_option("--tree-seed", tree_seed, "seed of random tree families");
    he->add_option("--gadget", gadget_spec, "lift by this gadget (parity-tree families)");
    he->add_option("--queries", queries, "query budget q (default edges/20)");
    he->add_option("--trials", exp_trials);
    he->add_option("--seed", seed)->required();
    he->add_option("--budget", budget_spec, "coin budget as a rational (default n/(50d))");
    he->add_option("--partial", partial_path, "starting valid partial assignment");
    he->add_option("--charge", charge_spec);
    he->add_option("--trials-csv", trials_csv, "write one CSV row per trial here");
    he->add_option("--min-success", min_success, "fail unless the Wilson lower bound reaches this");
    add_format(he);
    add_jobs(he);
    on(he, [&] {
        HardnessConfig c;
        c.graph = Graph::read(graph_path);
        c.charge = charge_from_spec(charge_spec, c.graph);
        c.start = partial_or_empty(partial_path, c.graph);
        c.queries = queries ? queries : c.graph.edge_count() / 20;
        c.trials = exp_trials;
        c.seed = seed;
        c.jobs = jobs;
        c.family = tree;
        const auto d = std::max<std::size_t>(1, c.graph.regular_degree().value_or(1));
        c.budget = budget_spec.empty() ? Rational(BigInt(c.graph.vertex_count()), BigInt(50 * d))
                                       : parse_rational(budget_spec);
        const bool lifted = tree == "random-linear" || tree == "coordinate" || (tree == "scripted" && he->count("--gadget"));
        if (lifted) {
            c.gadget = gadget_from_spec(gadget_spec);
            const BlockLayout layout{c.graph.edge_count(), c.gadget->b};
            if (tree == "random-linear")
                c.parity_tree = [layout, tree_seed] { return make_random_parity_tree(layout, tree_seed); };
            else if (tree == "coordinate")
                c.parity_tree = [layout, tree_seed] { return make_coordinate_tree(layout, tree_seed); };
            else {
                if (tree_path.empty()) throw UsageError("--tree-file is required for scripted trees");
                const auto t = Pdt::read(tree_path, layout.width());
                c.parity_tree = [t] { return make_scripted_parity_tree(t); };
            }
        } else if (tree == "greedy") {
            c.edge_tree = [] { return make_greedy_cut_tree(); };
        } else if (tree == "random") {
            c.edge_tree = [tree_seed] { return make_random_edge_tree(tree_seed); };
        } else if (tree == "empty") {
            c.edge_tree = [] { return make_empty_edge_tree(); };
        } else if (tree == "scripted") {
            if (tree_path.empty()) throw UsageError("--tree-file is required for scripted trees");
            std::ifstream f(tree_path);
            if (!f) throw UsageError("cannot open " + tree_path);
            std::vector<std::size_t> edges;
            for (std::size_t e; f >> e;) edges.push_back(e);
            c.edge_tree = [edges] { return make_scripted_edge_tree(edges); };
        } else {
            throw UsageError("tree family '" + tree + "' needs --gadget");
        }
        const auto r = hardness_experiment(c);
        write_summary(std::cout, r, is_csv(format));
        if (!trials_csv.empty()) {
            Output out(trials_csv);
            write_trials_csv(out.stream(), r);
        }
        bool ok = r.accounting_ok();
        if (min_success >= 0) {
            const bool reached = r.interval.low >= min_success;
            std::cout << (is_csv(format) ? "min_success_met," : "min_success_met: ") << (reached ? "true" : "false")
                      << '\n';
            ok = ok && reached;
        }
        return ok ? kOk : kFailed;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kUsage;
    }
    try {
        return action ? action() : kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
