#include <doctest.h>

#include <sstream>

#include "paritylab/lemmalab.hpp"

using namespace plab;

TEST_CASE("error budget closed form equals the binomial sum") {
    auto e = ErrorBudget::make(2, ip_gadget(8));
    CHECK(e.maxcoeff == Rational(1, 16));
    CHECK(e.eta == Rational(17, 64));
    CHECK(ErrorBudget::make(2, ip_gadget(4)).eta == Rational(5, 4));
    for (std::size_t n = 1; n <= 6; ++n)
        for (const Rational& c : {Rational(1, 2), Rational(1, 16), Rational(3, 7), Rational(1, 64)}) {
            auto b = ErrorBudget::make(n, 0, c);
            CHECK(b.summation() == b.eta);
        }
}

TEST_CASE("exponential sum on the full space is the preimage density") {
    const auto g = ip_gadget(8);
    const BitVec z = BitVec::from_string("10");
    auto r = check_exponential_sum(AffineSpace::full(16), z, g);
    CHECK(r.numerator == BigInt(g.count(true)) * g.count(false));
    CHECK(r.denominator == BigInt(1) << 16);
    CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("exponential sum with one cross-block form") {
    const auto g = ip_gadget(8);
    BitVec f(16);
    f.set(0, true);
    f.set(9, true);
    auto a = *intersect(AffineSpace::full(16), f, true);
    for (std::uint64_t zw = 0; zw < 4; ++zw) {
        auto r = check_exponential_sum(a, BitVec::from_word(2, zw), g);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.high == Rational(1, 8) * Rational(81, 64));
    }
}

TEST_CASE("unsafe inputs are rejected") {
    const auto g = ip_gadget(2);
    auto a = *intersect(AffineSpace::full(4), BitVec::from_string("1000"), false);
    a = *intersect(a, BitVec::from_string("0100"), false);
    CHECK_THROWS_AS(check_exponential_sum(a, BitVec(2), g), LemmaError);
    CHECK_THROWS_AS(check_uniform_coset(a, BitVec(2), g), LemmaError);
}

TEST_CASE("uniform coset") {
    auto full = check_uniform_coset(AffineSpace::full(24), BitVec::from_string("01"), ip_gadget(12));
    CHECK(full.probability() == 1);
    CHECK(full.verdict == Verdict::Pass);

    auto small = check_uniform_coset(AffineSpace::full(8), BitVec::from_string("00"), ip_gadget(4));
    CHECK(small.verdict == Verdict::Inconclusive);

    Rng rng(4);
    const BlockLayout L{2, 12};
    auto a = random_safe_space(L, 2, rng);
    auto r = check_uniform_coset(a, BitVec::from_string("11"), ip_gadget(12), 4);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.low < Rational(1, 4));
    CHECK(r.high > Rational(1, 4));
}

TEST_CASE("conditional fooling: B = A gives probability 1") {
    const auto g = ip_gadget(4);
    auto r = check_conditional_fooling(AffineSpace::full(8), AffineSpace::full(8), ClosureAssignment{}, BitVec(2), g);
    CHECK(r.probability() == 1);
    CHECK(r.verdict != Verdict::Fail);
    auto r12 = check_conditional_fooling(AffineSpace::full(24), AffineSpace::full(24), ClosureAssignment{}, BitVec(2),
                                         ip_gadget(12));
    CHECK(r12.probability() == 1);
    CHECK(r12.high == 1);
    CHECK(r12.verdict == Verdict::Pass);
}

TEST_CASE("conditional fooling on generated pairs at b = 8 and b = 12") {
    Rng rng(8);
    for (std::size_t b : {8, 12}) {
        const auto g = ip_gadget(b);
        for (std::size_t k : {1, 2})
            for (std::size_t variant = 0; variant < 2; ++variant) {
                auto p = make_fooling_pair(g, 2, k, variant, rng);
                CAPTURE(p.shape);
                auto r = check_conditional_fooling(p.b, p.a, p.y, p.z, g, 4);
                CHECK(r.verdict == Verdict::Pass);
                CHECK(r.params[2].second == std::to_string(k));
                if (b == 12) CHECK(r.probability() <= (k == 1 ? Rational(3, 4) : Rational(9, 16)));
            }
    }
}

TEST_CASE("conditional fooling preconditions") {
    const auto g = ip_gadget(2);
    auto a = *intersect(AffineSpace::full(4), BitVec::from_string("1000"), false);
    // B not inside A
    CHECK_THROWS_AS(check_conditional_fooling(AffineSpace::full(4), a, ClosureAssignment{}, BitVec(2), g), LemmaError);
    // y must match the closure
    auto u = *intersect(a, BitVec::from_string("0100"), false);
    CHECK_THROWS_AS(check_conditional_fooling(u, u, ClosureAssignment{}, BitVec(2), g), LemmaError);
}

TEST_CASE("counterexample: safety is needed") {
    auto r = counterexample_demo(2, ip_gadget(2));
    CHECK(r.conditional.probability() == 1);
    CHECK(r.uniform.probability() == Rational(1, 4));
    CHECK(r.codim_b == r.codim_a + 2);
    CHECK(r.verdict == Verdict::Pass);
    CHECK_FALSE(r.safe_b);

    auto r4 = counterexample_demo(2, ip_gadget(4));
    CHECK(r4.conditional.probability() == 1);
    CHECK_FALSE(r4.safe_a);
    CHECK(r4.verdict == Verdict::Pass);

    CHECK_THROWS_AS(counterexample_demo(2, constant_gadget(2, false)), LemmaError);
    std::ostringstream out;
    write_counterexample(out, r, false);
    CHECK(out.str().find("verdict: PASS") != std::string::npos);
}

TEST_CASE("closure law suite") {
    auto r = closure_law_suite(400, 1);
    CHECK(r.ok());
    CHECK(r.adversarial > 0);
    CHECK(r.first_failure.empty());
    auto again = closure_law_suite(400, 1);
    CHECK(again.failures == r.failures);
}

TEST_CASE("report writers") {
    auto r = check_exponential_sum(AffineSpace::full(4), BitVec(2), ip_gadget(2));
    std::ostringstream csv, text;
    write_report_csv_header(csv);
    write_report(csv, r, true);
    write_report(text, r, false);
    CHECK(csv.str().find("exponential-sum,n=2;b=2") != std::string::npos);
    CHECK(text.str().find("verdict: ") != std::string::npos);
}
