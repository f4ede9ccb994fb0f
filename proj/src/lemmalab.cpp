#include "paritylab/lemmalab.hpp"

#include <algorithm>
#include <ostream>
#include <optional>

#include "paritylab/blocks_reference.hpp"

namespace plab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

ErrorBudget ErrorBudget::make(std::size_t n, std::size_t b, const Rational& maxcoeff) {
    ErrorBudget e{n, b, maxcoeff, 0};
    Rational base = 1 + 2 * maxcoeff, p = 1;
    for (std::size_t i = 0; i < n; ++i) p *= base;
    e.eta = p - 1;
    return e;
}

Rational ErrorBudget::summation() const {
    Rational total = 0;
    BigInt binom = 1;
    Rational term = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        binom = binom * (n - k + 1) / k;
        term *= 2 * maxcoeff;
        total += Rational(binom) * term;
    }
    return total;
}

namespace {

struct LiftPredicate {
    const Gadget* g;
    std::size_t n;
    BitVec z;
    bool operator()(const BitVec& x) const {
        for (std::size_t i = 0; i < n; ++i)
            if (g->table[x.extract(i * g->b, g->b)] != static_cast<std::uint8_t>(z.get(i))) return false;
        return true;
    }
};

// |A cap G^-1(z)| by enumerating A.
std::uint64_t count_lifted(const AffineSpace& a, const BitVec& z, const Gadget& g, unsigned jobs) {
    return parallel_count(a, jobs, [&] { return LiftPredicate{&g, z.width(), z}; });
}

BigInt preimage_size(const Gadget& g, const BitVec& z) {
    BigInt c = 1;
    const auto ones = g.count(true), zeros = g.count(false);
    for (std::size_t i = 0; i < z.width(); ++i) c *= z.get(i) ? ones : zeros;
    return c;
}

BlockLayout layout_for(const AffineSpace& a, const BitVec& z, const Gadget& g) {
    const BlockLayout layout{z.width(), g.b};
    if (a.width() != layout.width())
        throw LemmaError("space width " + std::to_string(a.width()) + " does not match n*b = " +
                         std::to_string(layout.width()));
    return layout;
}

std::string bits(const BitVec& v) { return v.width() ? v.to_string() : "-"; }

}  // namespace

void write_report_csv_header(std::ostream& out) {
    out << "lemma,parameters,numerator,denominator,probability,bound_low,bound_high,verdict\n";
}

void write_report(std::ostream& out, const LemmaReport& r, bool csv) {
    if (csv) {
        out << r.lemma << ',';
        for (std::size_t i = 0; i < r.params.size(); ++i) out << (i ? ";" : "") << r.params[i].first << '=' << r.params[i].second;
        out << ',' << r.numerator << ',' << r.denominator << ',' << to_string(r.probability()) << ',' << to_string(r.low)
            << ',' << to_string(r.high) << ',' << to_string(r.verdict) << '\n';
        return;
    }
    out << "lemma: " << r.lemma << '\n';
    for (const auto& [k, v] : r.params) out << k << ": " << v << '\n';
    out << "count: " << r.numerator << " / " << r.denominator << '\n';
    out << "probability: " << to_string(r.probability()) << " (" << to_double(r.probability()) << ")\n";
    out << "bound: [" << to_string(r.low) << ", " << to_string(r.high) << "] ([" << to_double(r.low) << ", "
        << to_double(r.high) << "])\n";
    if (!r.note.empty()) out << "note: " << r.note << '\n';
    out << "verdict: " << to_string(r.verdict) << '\n';
}

LemmaReport check_exponential_sum(const AffineSpace& a, const BitVec& z, const Gadget& g, unsigned jobs) {
    const auto layout = layout_for(a, z, g);
    if (!is_safe(a, layout)) throw LemmaError("exponential sum check needs a safe affine space");
    if (layout.width() > kDefaultEnumerationCap) throw LemmaError("n*b exceeds the enumeration cap");
    const auto budget = ErrorBudget::make(layout.n, g);
    const std::size_t m = a.codim();

    LemmaReport r;
    r.lemma = "exponential-sum";
    r.params = {{"n", std::to_string(layout.n)}, {"b", std::to_string(g.b)}, {"m", std::to_string(m)},
                {"z", bits(z)}, {"maxcoeff", to_string(budget.maxcoeff)}, {"eta", to_string(budget.eta)}};
    r.numerator = count_lifted(a, z, g, jobs);
    r.denominator = BigInt(1) << layout.width();
    const Rational target = pow2(-static_cast<long>(layout.n + m));
    r.low = target * (1 - budget.eta);
    r.high = target * (1 + budget.eta);
    const Rational p = r.probability();
    r.verdict = abs(p - target) <= target * budget.eta ? Verdict::Pass : Verdict::Fail;
    r.params.push_back({"target", to_string(target)});
    r.params.push_back({"slack", to_string(target * budget.eta - abs(p - target))});
    return r;
}

LemmaReport check_uniform_coset(const AffineSpace& a, const BitVec& z, const Gadget& g, unsigned jobs) {
    const auto layout = layout_for(a, z, g);
    if (!is_safe(a, layout)) throw LemmaError("uniform coset check needs a safe affine space");
    if (layout.width() > kDefaultEnumerationCap) throw LemmaError("n*b exceeds the enumeration cap");
    const auto budget = ErrorBudget::make(layout.n, g);
    const std::size_t m = a.codim();

    LemmaReport r;
    r.lemma = "uniform-coset";
    r.params = {{"n", std::to_string(layout.n)}, {"b", std::to_string(g.b)}, {"m", std::to_string(m)},
                {"z", bits(z)}, {"eta", to_string(budget.eta)}};
    r.numerator = count_lifted(a, z, g, jobs);
    r.denominator = preimage_size(g, z);
    if (r.denominator == 0) throw LemmaError("z has no preimage under the gadget");
    const Rational scale = pow2(-static_cast<long>(m));
    if (budget.eta >= 1) {
        r.low = 0;
        r.high = 1;
        r.verdict = Verdict::Inconclusive;
        r.note = "eta >= 1, the bound is vacuous at these parameters";
        return r;
    }
    r.low = (1 - budget.eta) / (1 + budget.eta) * scale;
    r.high = (1 + budget.eta) / (1 - budget.eta) * scale;
    const Rational p = r.probability();
    r.verdict = (r.low <= p && p <= r.high) ? Verdict::Pass : Verdict::Fail;
    return r;
}

LemmaReport check_conditional_fooling(const AffineSpace& b_space, const AffineSpace& a_space,
                                      const ClosureAssignment& y, const BitVec& z, const Gadget& g, unsigned jobs) {
    const auto layout = layout_for(a_space, z, g);
    if (b_space.width() != a_space.width()) throw LemmaError("B and A have different widths");
    if (!b_space.is_subset_of(a_space)) throw LemmaError("B is not contained in A");
    const auto cl = closure(a_space, layout);
    if (!(y.blocks == cl)) throw LemmaError("y must assign exactly the closure of A, " + cl.to_string());
    if (y.values.size() != y.blocks.size()) throw LemmaError("y needs one value per block");
    for (std::size_t k = 0; k < y.blocks.size(); ++k)
        if (g(y.values[k]) != z.get(y.blocks.members()[k]))
            throw LemmaError("G(y) differs from z on block " + std::to_string(y.blocks.members()[k]));
    if (!is_extendable(a_space, layout, y)) throw LemmaError("y is not extendable in A");
    const std::size_t ac_a = amortized_closure(a_space, layout).blocks.size();
    const std::size_t ac_b = amortized_closure(b_space, layout).blocks.size();
    if (ac_b < ac_a) throw LemmaError("amortized closure of B is smaller than that of A");
    const std::size_t k = ac_b - ac_a;
    const auto budget = ErrorBudget::make(layout.n - cl.size(), g);
    const Rational& eta = budget.eta;

    LemmaReport r;
    r.lemma = "conditional-fooling";
    r.params = {{"n", std::to_string(layout.n)}, {"b", std::to_string(g.b)}, {"k", std::to_string(k)},
                {"codim_a", std::to_string(a_space.codim())}, {"codim_b", std::to_string(b_space.codim())},
                {"closure_a", cl.to_string()}, {"y", y.blocks.empty() ? "-" : y.to_string(g.b)}, {"z", bits(z)},
                {"eta_restricted", to_string(eta)}};

    const auto cy = assignment_space(layout, y);
    const auto a_cond = intersect(a_space, cy);
    const auto b_cond = intersect(b_space, cy);
    r.denominator = a_cond ? count_lifted(*a_cond, z, g, jobs) : 0;
    r.numerator = b_cond && r.denominator != 0 ? count_lifted(*b_cond, z, g, jobs) : 0;
    r.low = 0;
    if (r.denominator == 0) {
        r.high = 1;
        r.verdict = Verdict::Pass;
        r.note = "empty conditioned support, the probability is 0 by convention";
        return r;
    }
    if (eta >= 1) {
        r.high = 1;
        r.verdict = Verdict::Inconclusive;
        r.note = "eta' >= 1, the step bound is vacuous at these parameters";
        return r;
    }
    const Rational step = (1 + eta) / (2 * (1 - eta));
    Rational bound = 1, quarter_bound = 1;
    for (std::size_t i = 0; i < k; ++i) {
        bound *= step;
        quarter_bound *= Rational(3, 4);
    }
    r.params.push_back({"step", to_string(step)});
    r.params.push_back({"step_bound", to_string(bound)});
    const bool three_quarters = step <= Rational(3, 4);
    r.params.push_back({"three_quarters_asserted", three_quarters ? "yes" : "no"});
    r.high = three_quarters ? std::min(bound, quarter_bound) : bound;
    r.verdict = r.probability() <= r.high ? Verdict::Pass : Verdict::Fail;
    return r;
}

CounterexampleReport counterexample_demo(std::size_t n, const Gadget& g) {
    if (n == 0) throw LemmaError("counterexample needs at least one block");
    // sensitive point: g(t) = 0 and g(t ^ e_j) = 1
    std::optional<std::pair<std::uint64_t, std::size_t>> found;
    for (std::uint64_t t = 0; t < g.table.size() && !found; ++t)
        if (!g(t))
            for (std::size_t j = 0; j < g.b && !found; ++j)
                if (g(t ^ (std::uint64_t{1} << j))) found = {{t, j}};
    if (!found) throw LemmaError("gadget has no sensitive point with value 0");
    const auto [t, j] = *found;
    const BlockLayout layout{n, g.b};
    if (layout.width() > kDefaultEnumerationCap) throw LemmaError("n*b exceeds the enumeration cap");

    std::vector<Equation> fix_a, fix_b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < g.b; ++c) {
            Equation e{BitVec::unit(layout.width(), layout.coord(i, c)), ((t >> c) & 1) != 0};
            if (c != j) fix_a.push_back(e);
            fix_b.push_back(e);
        }
    const auto a = *affine_from_equations(layout.width(), fix_a);
    const auto b = *affine_from_equations(layout.width(), fix_b);

    CounterexampleReport r;
    r.t = t;
    r.coordinate = j;
    r.codim_a = a.codim();
    r.codim_b = b.codim();
    r.safe_a = is_safe(a, layout);
    r.safe_b = is_safe(b, layout);
    r.amortized_a = amortized_closure(a, layout).blocks.size();
    r.amortized_b = amortized_closure(b, layout).blocks.size();

    const BitVec zero(n);
    std::vector<std::pair<std::string, std::string>> params = {
        {"n", std::to_string(n)}, {"b", std::to_string(g.b)},
        {"t", BitVec::from_word(g.b, t).to_string()}, {"coordinate", std::to_string(j)}};
    r.conditional.lemma = "counterexample-lifted";
    r.conditional.params = params;
    r.conditional.numerator = count_lifted(b, zero, g, 1);
    r.conditional.denominator = count_lifted(a, zero, g, 1);
    r.conditional.low = r.conditional.high = 1;
    r.conditional.verdict = r.conditional.probability() == 1 ? Verdict::Pass : Verdict::Fail;

    r.uniform.lemma = "counterexample-uniform";
    r.uniform.params = params;
    r.uniform.numerator = b.size();
    r.uniform.denominator = a.size();
    r.uniform.low = r.uniform.high = pow2(-static_cast<long>(n));
    r.uniform.verdict = r.uniform.probability() == r.uniform.high ? Verdict::Pass : Verdict::Fail;

    const bool ok = r.conditional.verdict == Verdict::Pass && r.uniform.verdict == Verdict::Pass &&
                    r.codim_b == r.codim_a + n;
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return r;
}

void write_counterexample(std::ostream& out, const CounterexampleReport& r, bool csv) {
    if (csv) {
        write_report_csv_header(out);
        write_report(out, r.conditional, true);
        write_report(out, r.uniform, true);
        return;
    }
    out << "lemma: counterexample\n";
    for (const auto& [k, v] : r.conditional.params) out << k << ": " << v << '\n';
    out << "codim_a: " << r.codim_a << "\ncodim_b: " << r.codim_b << '\n';
    out << "safe_a: " << (r.safe_a ? "true" : "false") << "\nsafe_b: " << (r.safe_b ? "true" : "false") << '\n';
    out << "amortized_closure_a: " << r.amortized_a << "\namortized_closure_b: " << r.amortized_b << '\n';
    out << "conditional_given_lifted_zero: " << r.conditional.numerator << " / " << r.conditional.denominator << " = "
        << to_string(r.conditional.probability()) << '\n';
    out << "conditional_given_uniform_a: " << r.uniform.numerator << " / " << r.uniform.denominator << " = "
        << to_string(r.uniform.probability()) << '\n';
    out << "verdict: " << to_string(r.verdict) << '\n';
}

bool ClosureLawReport::ok() const {
    return oracle_mismatches == 0 && std::all_of(failures.begin(), failures.end(), [](auto f) { return f == 0; });
}

namespace {

BitMatrix random_rows(const BlockLayout& L, std::size_t count, Rng& rng) {
    BitMatrix m(L.width());
    for (std::size_t k = 0; k < count; ++k) {
        BitVec v = random_bitvec(L.width(), rng);
        if (coin(rng)) {
            // sparse rows concentrated on one block make unsafe sets common
            const std::size_t keep = uniform_below(rng, L.n);
            for (std::size_t c = 0; c < L.width(); ++c)
                if (L.block_of(c) != keep && uniform_below(rng, 3)) v.set(c, false);
        }
        m.push_back(std::move(v));
    }
    return m;
}

// Forms fixing all but one coordinate of every block.
BitMatrix counterexample_rows(const BlockLayout& L, Rng& rng) {
    BitMatrix m(L.width());
    for (std::size_t i = 0; i < L.n; ++i) {
        const std::size_t skip = uniform_below(rng, L.b);
        for (std::size_t c = 0; c < L.b; ++c)
            if (c != skip) m.push_back(BitVec::unit(L.width(), L.coord(i, c)));
    }
    return m;
}

BitMatrix stack(const BitMatrix& a, const BitMatrix& b) {
    auto r = a.rows();
    for (const auto& v : b.rows()) r.push_back(v);
    return BitMatrix(a.width(), r);
}

BitMatrix rewrite(const BitMatrix& m, Rng& rng) {
    auto r = m.rows();
    for (int k = 0; k < 6 && r.size() > 1; ++k) {
        const std::size_t i = uniform_below(rng, r.size()), j = uniform_below(rng, r.size());
        if (i != j) r[i] ^= r[j];
    }
    std::shuffle(r.begin(), r.end(), rng);
    return BitMatrix(m.width(), r);
}

struct Closures {
    BlockSet cl, ac;
};

// Brute-force closures, with the fast routines checked against them.
Closures oracle(const BitMatrix& v, const BlockLayout& L, std::uint64_t& mismatches) {
    const auto mins = reference::minimum_deviolators(v, L);
    Closures c{mins.empty() ? BlockSet{} : mins.front(), reference::amortized_closure(v, L)};
    if (mins.size() != 1 || !(closure(v, L) == c.cl) || !(amortized_closure(v, L).blocks == c.ac)) ++mismatches;
    return c;
}

}  // namespace

ClosureLawReport closure_law_suite(std::uint64_t trials, std::uint64_t seed, std::size_t max_n, std::size_t max_b) {
    ClosureLawReport rep;
    rep.trials = trials;
    rep.seed = seed;
    auto fail = [&](std::size_t law, std::uint64_t trial) {
        ++rep.failures[law];
        if (rep.first_failure.empty())
            rep.first_failure = std::string(kLawNames[law]) + " at trial " + std::to_string(trial);
    };
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, trial));
        const BlockLayout L{1 + uniform_below(rng, max_n), 1 + uniform_below(rng, max_b)};
        BitMatrix v;
        if (trial % 10 == 9 && L.b >= 2) {
            v = counterexample_rows(L, rng);
            ++rep.adversarial;
        } else {
            v = random_rows(L, uniform_below(rng, L.width() + 1), rng);
        }
        auto& mm = rep.oracle_mismatches;
        const auto base = oracle(v, L, mm);

        if (!base.cl.is_subset_of(base.ac)) fail(0, trial);

        const auto w = oracle(stack(v, random_rows(L, 1 + uniform_below(rng, 2), rng)), L, mm);
        if (!base.cl.is_subset_of(w.cl) || !base.ac.is_subset_of(w.ac)) fail(1, trial);

        const auto w1 = oracle(stack(v, random_rows(L, 1, rng)), L, mm);
        if (w1.ac.size() > base.ac.size() + 1 || (w1.ac.size() == base.ac.size() + 1 && !(w1.cl == base.cl)))
            fail(2, trial);

        const auto aug = oracle(stack(v, block_unit_vectors(L, base.cl)), L, mm);
        if (!(aug.cl == base.cl) || !(aug.ac == base.ac)) fail(3, trial);

        const auto rw_rows = rewrite(v, rng);
        const auto rw = oracle(rw_rows, L, mm);
        if (reference::is_safe_by_span(rw_rows, L) != reference::is_safe_by_span(v, L) || !(rw.cl == base.cl) ||
            !(rw.ac == base.ac))
            fail(4, trial);
    }
    return rep;
}

void write_closure_laws(std::ostream& out, const ClosureLawReport& r, bool csv) {
    const char* sep = csv ? "," : ": ";
    if (csv) out << "key,value\n";
    out << "lemma" << sep << "closure-laws\n";
    out << "trials" << sep << r.trials << '\n' << "seed" << sep << r.seed << '\n';
    out << "adversarial_instances" << sep << r.adversarial << '\n';
    for (std::size_t i = 0; i < kLawCount; ++i) out << kLawNames[i] << "_failures" << sep << r.failures[i] << '\n';
    out << "oracle_mismatches" << sep << r.oracle_mismatches << '\n';
    if (!r.first_failure.empty()) out << "first_failure" << sep << r.first_failure << '\n';
    out << "verdict" << sep << (r.ok() ? "PASS" : "FAIL") << '\n';
}

AffineSpace random_safe_space(const BlockLayout& layout, std::size_t codim, Rng& rng) {
    if (codim > layout.n) throw LemmaError("a safe space has codimension at most the block count");
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<Equation> eqs;
        for (std::size_t k = 0; k < codim; ++k) {
            BitVec f = random_bitvec(layout.width(), rng);
            if (coin(rng)) {
                const std::size_t keep = uniform_below(rng, layout.n);
                for (std::size_t c = 0; c < layout.width(); ++c)
                    if (layout.block_of(c) != keep) f.set(c, false);
            }
            eqs.push_back({f, coin(rng)});
        }
        auto a = affine_from_equations(layout.width(), eqs);
        if (a && a->codim() == codim && is_safe(*a, layout)) return *a;
    }
    throw LemmaError("could not draw a safe space");
}

namespace {

BitVec random_nonzero(std::size_t width, Rng& rng) {
    BitVec f(width);
    while (f.is_zero()) f = random_bitvec(width, rng);
    return f;
}

BitVec block_form(const BlockLayout& L, std::size_t block, Rng& rng) {
    BitVec f(L.width());
    while (f.is_zero())
        for (std::size_t c = 0; c < L.b; ++c) f.set(L.coord(block, c), coin(rng));
    return f;
}

}  // namespace

FoolingPair make_fooling_pair(const Gadget& g, std::size_t n, std::size_t k, std::size_t variant, Rng& rng) {
    if (k != 1 && k != 2) throw LemmaError("pairs are generated for k = 1 or 2");
    if (n < 2) throw LemmaError("pairs need at least two blocks");
    const BlockLayout L{n, g.b};
    const std::size_t w = L.width();
    for (int attempt = 0; attempt < 100000; ++attempt) {
        FoolingPair p{AffineSpace::full(w), AffineSpace::full(w), {}, BitVec(n), k, ""};
        std::size_t extra = 0;
        if (k == 1 && variant % 2 == 0) {
            p.shape = "safe A of codim 1, one more form";
            auto a = intersect(p.a, random_nonzero(w, rng), coin(rng));
            if (!a || !is_safe(*a, L)) continue;
            p.a = *a;
            extra = 1;
        } else if (k == 1) {
            p.shape = "A with two forms in block 0, y fixes block 0, one more form";
            auto a = intersect(p.a, block_form(L, 0, rng), coin(rng));
            if (a) a = intersect(*a, block_form(L, 0, rng), coin(rng));
            if (!a || a->codim() != 2) continue;
            p.a = *a;
            extra = 1;
        } else {
            p.shape = variant % 2 == 0 ? "full A, two forms" : "full A, three forms";
            extra = variant % 2 == 0 ? 2 : 3;
        }
        auto b = std::optional<AffineSpace>(p.a);
        for (std::size_t e = 0; e < extra && b; ++e) b = intersect(*b, random_nonzero(w, rng), coin(rng));
        if (!b || b->codim() != p.a.codim() + extra) continue;
        p.b = *b;
        const auto ac_a = amortized_closure(p.a, L).blocks.size();
        if (amortized_closure(p.b, L).blocks.size() != ac_a + k) continue;

        // z and y: a point of A decides the closure block values
        const auto cl = closure(p.a, L);
        const BitVec x0 = p.a.sample_point(rng);
        p.y = ClosureAssignment::from_point(L, cl, x0);
        for (std::size_t i = 0; i < n; ++i) p.z.set(i, cl.contains(i) ? g(x0.extract(L.coord(i, 0), g.b)) != 0 : coin(rng));
        return p;
    }
    throw LemmaError("could not construct a fooling pair");
}

}  // namespace plab
