#pragma once

// Boolean gadgets g: F2^b -> F2 as truth tables, their Walsh spectra, and the
// lifted map G = g^n on n blocks.
//
// Input index convention: bit j of the table index is coordinate j of the
// block. For the inner-product gadget, coordinates [0, b/2) are x and
// [b/2, b) are y.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "paritylab/blocks.hpp"
#include "paritylab/cnf.hpp"
#include "paritylab/f2.hpp"
#include "paritylab/rational.hpp"

namespace plab {

class GadgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxGadgetArity = 24;

struct Gadget {
    std::size_t b = 0;
    std::vector<std::uint8_t> table;

    bool operator()(std::uint64_t input) const { return table[input] != 0; }
    std::size_t count(bool value) const;

    // "b" on the first line, then 2^b characters of 0/1.
    static Gadget parse(std::istream& in);
    static Gadget read(const std::string& path);
    void write(std::ostream& out) const;
    std::string table_string() const;

    friend bool operator==(const Gadget&, const Gadget&) = default;
};

Gadget make_gadget(std::size_t b, std::vector<std::uint8_t> table);
Gadget ip_gadget(std::size_t b);
Gadget parity_gadget(std::size_t b);
Gadget constant_gadget(std::size_t b, bool value);

enum class Convention { PmOne, ZeroOne };

// Coefficients as integer numerators over the common denominator 2^b.
struct Spectrum {
    std::size_t b = 0;
    Convention convention = Convention::PmOne;
    std::vector<std::int64_t> numerators;

    Rational coeff(std::uint64_t mask) const;
    Rational max_abs() const;
    Rational sum_of_squares() const;
    // CSV "S_mask,numerator,denominator" in lowest terms.
    void write_csv(std::ostream& out) const;
};

// Fast Walsh-Hadamard transform.
Spectrum walsh_spectrum(const Gadget& g, Convention convention = Convention::PmOne);
// Direct O(4^b) summation; reference for small b.
Spectrum walsh_spectrum_direct(const Gadget& g, Convention convention = Convention::PmOne);

// max_S |coeff(S)| under the +-1 convention.
Rational max_fourier(const Gadget& g);

// Per-block evaluation: z_i = g(x(i)).
BitVec lift_eval(const Gadget& g, const BlockLayout& layout, const BitVec& x);

// Inputs u with g(u) = value, ascending.
std::vector<std::uint64_t> gadget_preimages(const Gadget& g, bool value);

// |G^{-1}(alpha)| over the fixed blocks of alpha.
BigInt preimage_count(const Gadget& g, const PartialAssignment& alpha);

// Streams G^{-1}(alpha) restricted to the fixed blocks of alpha; each point
// has width (#fixed)*b with the fixed blocks in ascending order. The first
// fixed block varies slowest.
template <class F>
void for_each_preimage(const Gadget& g, const PartialAssignment& alpha, F&& f) {
    const auto fixed = alpha.fixed_indices();
    std::vector<std::vector<std::uint64_t>> options;
    for (auto i : fixed) {
        options.push_back(gadget_preimages(g, alpha.value(i)));
        if (options.back().empty())
            throw GadgetError("gadget has no preimage of " + std::to_string(alpha.value(i)));
    }
    std::vector<std::size_t> pick(fixed.size(), 0);
    BitVec x(fixed.size() * g.b);
    for (std::size_t k = 0; k < fixed.size(); ++k) x.deposit(k * g.b, g.b, options[k][0]);
    for (;;) {
        f(static_cast<const BitVec&>(x));
        std::size_t k = fixed.size();
        while (k > 0) {
            --k;
            if (++pick[k] < options[k].size()) {
                x.deposit(k * g.b, g.b, options[k][pick[k]]);
                break;
            }
            pick[k] = 0;
            x.deposit(k * g.b, g.b, options[k][0]);
            if (k == 0) return;
        }
        if (fixed.empty()) return;
    }
}

std::vector<BitVec> preimages(const Gadget& g, const PartialAssignment& alpha);

// Uniform point of G^{-1}(z) for a full z.
BitVec sample_preimage(const Gadget& g, const BlockLayout& layout, const BitVec& z, Rng& rng);

struct WeightedPoint {
    BitVec z;
    Rational weight;
};

// Sample z from `base`, then x uniformly from G^{-1}(z).
struct LiftedDistribution {
    std::vector<WeightedPoint> base;
    Gadget gadget;
    BlockLayout layout;
};

// |G^{-1}(z) ∩ a|, by enumerating whichever of the two sets is smaller.
std::uint64_t conditioned_preimage_count(const Gadget& g, const BlockLayout& layout, const BitVec& z,
                                         const AffineSpace& a);

// Exact sampling from the lifted distribution conditioned on membership in
// `conditioning` (nullptr for none). Throws GadgetError when the conditioned
// support is empty.
BitVec sample_lifted(const LiftedDistribution& d, const AffineSpace* conditioning, Rng& rng);

// Rejection sampler for the same law; used as an oracle.
BitVec sample_lifted_rejection(const LiftedDistribution& d, const AffineSpace* conditioning, Rng& rng,
                               std::size_t max_attempts = 1'000'000);

// Lifted clause set: for each clause C with falsifying assignment alpha and
// each choice of a_i in g^{-1}(alpha_i), the clause "x(i) != a_i for some i".
Cnf lift_cnf(const Cnf& phi, const Gadget& g);

// Predicted size of lift_cnf(phi, g).
BigInt lifted_clause_count(const Cnf& phi, const Gadget& g);

}  // namespace plab
