#pragma once

// Exact finite-scale checks of the equidistribution and conditional fooling
// lemmas for lifted affine spaces, the counterexample showing why safety is
// needed, and the closure-law property suite.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paritylab/blocks.hpp"
#include "paritylab/gadget.hpp"
#include "paritylab/random.hpp"
#include "paritylab/rational.hpp"

namespace plab {

class LemmaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

// eta = (1 + 2 maxcoeff)^n - 1, the total Fourier error over nonempty block
// sets T: sum over k of C(n,k) 2^k maxcoeff^k.
struct ErrorBudget {
    std::size_t n = 0, b = 0;
    Rational maxcoeff, eta;

    static ErrorBudget make(std::size_t n, std::size_t b, const Rational& maxcoeff);
    static ErrorBudget make(std::size_t n, const Gadget& g) { return make(n, g.b, max_fourier(g)); }
    // The binomial sum, term by term.
    Rational summation() const;
};

struct LemmaReport {
    std::string lemma;
    std::vector<std::pair<std::string, std::string>> params;
    BigInt numerator, denominator;  // exact probability
    Rational low, high;             // asserted interval
    Verdict verdict = Verdict::Pass;
    std::string note;

    Rational probability() const { return denominator == 0 ? Rational(0) : Rational(numerator) / Rational(denominator); }
};

void write_report(std::ostream& out, const LemmaReport& r, bool csv);
void write_report_csv_header(std::ostream& out);

// Pr_x[x in A and G(x) = z] for uniform x, against 2^-(n+m) (1 +- eta).
// Requires a safe and n*b <= 26.
LemmaReport check_exponential_sum(const AffineSpace& a, const BitVec& z, const Gadget& g, unsigned jobs = 1);

// Pr_{x ~ G^-1(z)}[x in A] within [(1-eta)/((1+eta) 2^m), (1+eta)/((1-eta) 2^m)];
// INCONCLUSIVE when eta >= 1.
LemmaReport check_uniform_coset(const AffineSpace& a, const BitVec& z, const Gadget& g, unsigned jobs = 1);

// Pr_{x ~ G^-1(z) within C_y}[x in B | x in A] <= step^k, with
// step = (1 + eta') / (2 (1 - eta')), eta' over the n - |Cl(A)| blocks
// outside the closure and k = |Cl^(B)| - |Cl^(A)|. When step <= 3/4 the
// bound (3/4)^k is asserted too.
LemmaReport check_conditional_fooling(const AffineSpace& b_space, const AffineSpace& a_space, const ClosureAssignment& y,
                                      const BitVec& z, const Gadget& g, unsigned jobs = 1);

struct CounterexampleReport {
    LemmaReport conditional;  // under uniform G^-1(0^n): exactly 1
    LemmaReport uniform;      // under uniform on A: exactly 2^-n
    std::size_t t = 0, coordinate = 0;
    std::size_t codim_a = 0, codim_b = 0;
    bool safe_a = false, safe_b = false;
    std::size_t amortized_a = 0, amortized_b = 0;
    Verdict verdict = Verdict::Pass;
};

// Fixes every coordinate of each block except a sensitive one to t (A), then
// that one too (B). Throws LemmaError for gadgets without a sensitive point.
CounterexampleReport counterexample_demo(std::size_t n, const Gadget& g);
void write_counterexample(std::ostream& out, const CounterexampleReport& r, bool csv);

inline constexpr std::size_t kLawCount = 5;
inline const std::array<const char*, kLawCount> kLawNames = {
    "closure_within_amortized", "monotonicity", "continuity", "augmentation_stability", "span_invariance"};

struct ClosureLawReport {
    std::uint64_t trials = 0, seed = 0;
    std::array<std::uint64_t, kLawCount> failures{};
    std::uint64_t oracle_mismatches = 0;  // fast routines vs brute force
    std::uint64_t adversarial = 0;        // counterexample-family instances
    std::string first_failure;
    bool ok() const;
};

// Random vector sets on n <= max_n blocks of b <= max_b bits; every tenth
// instance with b >= 2 comes from the counterexample family. Laws are evaluated on
// brute-force closures, which must also agree with the fast routines.
ClosureLawReport closure_law_suite(std::uint64_t trials, std::uint64_t seed, std::size_t max_n = 4, std::size_t max_b = 3);
void write_closure_laws(std::ostream& out, const ClosureLawReport& r, bool csv);

// Instance generators.

// Uniformly drawn forms (half of them confined to one block), redrawn until
// the result is safe with exactly this codimension.
AffineSpace random_safe_space(const BlockLayout& layout, std::size_t codim, Rng& rng);

struct FoolingPair {
    AffineSpace a, b;
    ClosureAssignment y;
    BitVec z;
    std::size_t k = 0;
    std::string shape;
};

// A nested pair B within A with amortized gap exactly k (1 or 2). Shapes
// alternate with `variant`: for k = 1 a safe A, or an A whose closure is a
// block that y then fixes; for k = 2 the full space against codim 2 or 3.
FoolingPair make_fooling_pair(const Gadget& g, std::size_t n, std::size_t k, std::size_t variant, Rng& rng);

}  // namespace plab
