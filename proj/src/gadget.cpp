#include "paritylab/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace plab {

std::size_t Gadget::count(bool value) const {
    return static_cast<std::size_t>(std::count(table.begin(), table.end(), value ? 1 : 0));
}

Gadget make_gadget(std::size_t b, std::vector<std::uint8_t> table) {
    if (b > kMaxGadgetArity) throw GadgetError("gadget arity " + std::to_string(b) + " exceeds the cap");
    if (table.size() != (std::size_t{1} << b)) throw GadgetError("gadget table must have 2^b entries");
    for (auto& t : table) {
        if (t > 1) throw GadgetError("gadget outputs must be 0 or 1");
    }
    return Gadget{b, std::move(table)};
}

Gadget Gadget::parse(std::istream& in) {
    std::size_t b;
    if (!(in >> b)) throw GadgetError("gadget file must start with the arity");
    if (b > kMaxGadgetArity) throw GadgetError("gadget arity " + std::to_string(b) + " exceeds the cap");
    std::vector<std::uint8_t> table;
    char c;
    while (in >> c) {
        if (c != '0' && c != '1') throw GadgetError(std::string("invalid gadget table character '") + c + "'");
        table.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return make_gadget(b, std::move(table));
}

Gadget Gadget::read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw GadgetError("cannot open " + path);
    return parse(f);
}

std::string Gadget::table_string() const {
    std::string s;
    for (auto t : table) s += t ? '1' : '0';
    return s;
}

void Gadget::write(std::ostream& out) const { out << b << '\n' << table_string() << '\n'; }

Gadget ip_gadget(std::size_t b) {
    if (b < 2 || b % 2) throw GadgetError("inner-product gadget needs an even arity >= 2");
    if (b > kMaxGadgetArity) throw GadgetError("gadget arity exceeds the cap");
    const std::size_t h = b / 2;
    const std::uint64_t lo = (std::uint64_t{1} << h) - 1;
    std::vector<std::uint8_t> t(std::size_t{1} << b);
    for (std::uint64_t u = 0; u < t.size(); ++u) t[u] = std::popcount((u & lo) & (u >> h)) & 1;
    return Gadget{b, std::move(t)};
}

Gadget parity_gadget(std::size_t b) {
    std::vector<std::uint8_t> t(std::size_t{1} << b);
    for (std::uint64_t u = 0; u < t.size(); ++u) t[u] = std::popcount(u) & 1;
    return make_gadget(b, std::move(t));
}

Gadget constant_gadget(std::size_t b, bool value) {
    return make_gadget(b, std::vector<std::uint8_t>(std::size_t{1} << b, value ? 1 : 0));
}

Rational Spectrum::coeff(std::uint64_t mask) const { return Rational(numerators.at(mask)) / pow2(static_cast<long>(b)); }

Rational Spectrum::max_abs() const {
    std::int64_t m = 0;
    for (auto v : numerators) m = std::max(m, v < 0 ? -v : v);
    return Rational(m) / pow2(static_cast<long>(b));
}

Rational Spectrum::sum_of_squares() const {
    BigInt s = 0;
    for (auto v : numerators) s += BigInt(v) * v;
    return Rational(s) / pow2(2 * static_cast<long>(b));
}

void Spectrum::write_csv(std::ostream& out) const {
    out << "S_mask,numerator,denominator\n";
    for (std::uint64_t s = 0; s < numerators.size(); ++s) {
        const Rational c = coeff(s);
        out << s << ',' << numerator_of(c) << ',' << denominator_of(c) << '\n';
    }
}

Spectrum walsh_spectrum(const Gadget& g, Convention convention) {
    if (g.b > kMaxGadgetArity) throw GadgetError("arity cap exceeded");
    std::vector<std::int64_t> a(g.table.size());
    for (std::size_t u = 0; u < a.size(); ++u)
        a[u] = convention == Convention::PmOne ? (g.table[u] ? -1 : 1) : g.table[u];
    for (std::size_t h = 1; h < a.size(); h <<= 1)
        for (std::size_t i = 0; i < a.size(); i += h << 1)
            for (std::size_t j = i; j < i + h; ++j) {
                const auto x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
    return Spectrum{g.b, convention, std::move(a)};
}

Spectrum walsh_spectrum_direct(const Gadget& g, Convention convention) {
    std::vector<std::int64_t> a(g.table.size(), 0);
    for (std::uint64_t s = 0; s < a.size(); ++s)
        for (std::uint64_t u = 0; u < a.size(); ++u) {
            const std::int64_t chi = (std::popcount(s & u) & 1) ? -1 : 1;
            const std::int64_t val = convention == Convention::PmOne ? (g.table[u] ? -1 : 1) : g.table[u];
            a[s] += chi * val;
        }
    return Spectrum{g.b, convention, std::move(a)};
}

Rational max_fourier(const Gadget& g) { return walsh_spectrum(g, Convention::PmOne).max_abs(); }

BitVec lift_eval(const Gadget& g, const BlockLayout& layout, const BitVec& x) {
    if (layout.b != g.b) throw GadgetError("gadget arity does not match block size");
    if (x.width() != layout.width()) throw GadgetError("input width does not match block layout");
    BitVec z(layout.n);
    for (std::size_t i = 0; i < layout.n; ++i) z.set(i, g(x.extract(layout.coord(i, 0), g.b)));
    return z;
}

std::vector<std::uint64_t> gadget_preimages(const Gadget& g, bool value) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t u = 0; u < g.table.size(); ++u)
        if (g(u) == value) out.push_back(u);
    return out;
}

BigInt preimage_count(const Gadget& g, const PartialAssignment& alpha) {
    const BigInt c0 = g.count(false), c1 = g.count(true);
    BigInt total = 1;
    for (auto i : alpha.fixed_indices()) total *= alpha.value(i) ? c1 : c0;
    return total;
}

std::vector<BitVec> preimages(const Gadget& g, const PartialAssignment& alpha) {
    std::vector<BitVec> out;
    for_each_preimage(g, alpha, [&](const BitVec& x) { out.push_back(x); });
    return out;
}

BitVec sample_preimage(const Gadget& g, const BlockLayout& layout, const BitVec& z, Rng& rng) {
    if (z.width() != layout.n || layout.b != g.b) throw GadgetError("layout mismatch");
    const auto pre0 = gadget_preimages(g, false), pre1 = gadget_preimages(g, true);
    BitVec x(layout.width());
    for (std::size_t i = 0; i < layout.n; ++i) {
        const auto& opts = z.get(i) ? pre1 : pre0;
        if (opts.empty()) throw GadgetError("gadget has no preimage of " + std::to_string(z.get(i)));
        x.deposit(layout.coord(i, 0), g.b, opts[uniform_below(rng, opts.size())]);
    }
    return x;
}

namespace {

PartialAssignment full_alpha(const BitVec& z) {
    PartialAssignment a(z.width());
    for (std::size_t i = 0; i < z.width(); ++i) a.fix(i, z.get(i));
    return a;
}

double log2_size(const Gadget& g, const BitVec& z) {
    const BigInt c = preimage_count(g, full_alpha(z));
    if (c == 0) throw GadgetError("gadget has no preimage for the requested output");
    return std::log2(c.convert_to<double>());
}

// Visits the points of G^{-1}(z) ∩ a through the cheaper enumeration.
template <class F>
void for_each_conditioned(const Gadget& g, const BlockLayout& layout, const BitVec& z, const AffineSpace& a, F&& f) {
    if (static_cast<double>(a.dim()) <= log2_size(g, z)) {
        a.for_each_point([&](const BitVec& x) {
            if (lift_eval(g, layout, x) == z) f(x);
        });
    } else {
        if (log2_size(g, z) > static_cast<double>(kDefaultEnumerationCap))
            throw F2Error("enumeration cap exceeded while counting conditioned preimages");
        for_each_preimage(g, full_alpha(z), [&](const BitVec& x) {
            if (a.contains(x)) f(x);
        });
    }
}

}  // namespace

std::uint64_t conditioned_preimage_count(const Gadget& g, const BlockLayout& layout, const BitVec& z,
                                         const AffineSpace& a) {
    if (a.width() != layout.width()) throw GadgetError("conditioning width does not match block layout");
    std::uint64_t c = 0;
    for_each_conditioned(g, layout, z, a, [&](const BitVec&) { ++c; });
    return c;
}

BitVec sample_lifted(const LiftedDistribution& d, const AffineSpace* conditioning, Rng& rng) {
    if (d.base.empty()) throw GadgetError("empty base distribution");
    std::vector<Rational> w;
    std::vector<std::uint64_t> counts;
    Rational total = 0;
    for (const auto& p : d.base) {
        Rational weight = p.weight;
        std::uint64_t c = 0;
        if (conditioning && weight > 0) {
            c = conditioned_preimage_count(d.gadget, d.layout, p.z, *conditioning);
            weight *= Rational(BigInt(c)) / Rational(preimage_count(d.gadget, full_alpha(p.z)));
        }
        w.push_back(weight);
        counts.push_back(c);
        total += weight;
    }
    if (total <= 0) throw GadgetError("conditioned lifted support is empty");

    // Exact choice of z: a uniform rational in [0, total) via a fine dyadic grid.
    BigInt den = 1;
    for (const auto& x : w) den = boost::multiprecision::lcm(den, denominator_of(x));
    const BigInt scaled_total = numerator_of(total * Rational(den));
    BigInt r = uniform_below(rng, scaled_total);
    std::size_t k = 0;
    for (; k < w.size(); ++k) {
        const BigInt wk = numerator_of(w[k] * Rational(den));
        if (r < wk) break;
        r -= wk;
    }
    const auto& z = d.base[k].z;
    if (!conditioning) return sample_preimage(d.gadget, d.layout, z, rng);

    const std::uint64_t target = uniform_below(rng, counts[k]);
    std::uint64_t seen = 0;
    std::optional<BitVec> out;
    for_each_conditioned(d.gadget, d.layout, z, *conditioning, [&](const BitVec& x) {
        if (seen++ == target) out = x;
    });
    return *out;
}

BitVec sample_lifted_rejection(const LiftedDistribution& d, const AffineSpace* conditioning, Rng& rng,
                               std::size_t max_attempts) {
    if (d.base.empty()) throw GadgetError("empty base distribution");
    BigInt den = 1;
    for (const auto& p : d.base) den = boost::multiprecision::lcm(den, denominator_of(p.weight));
    BigInt total = 0;
    std::vector<BigInt> w;
    for (const auto& p : d.base) {
        w.push_back(numerator_of(p.weight * Rational(den)));
        total += w.back();
    }
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        BigInt r = uniform_below(rng, total);
        std::size_t k = 0;
        while (r >= w[k]) r -= w[k++];
        BitVec x = sample_preimage(d.gadget, d.layout, d.base[k].z, rng);
        if (!conditioning || conditioning->contains(x)) return x;
    }
    throw GadgetError("rejection sampler gave up");
}

namespace {

// Sorted, duplicate-free literals; nullopt for a tautology.
std::optional<Clause> normalize(const Clause& c) {
    Clause out = c;
    std::sort(out.begin(), out.end(), [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (std::size_t k = 1; k < out.size(); ++k)
        if (std::abs(out[k]) == std::abs(out[k - 1])) return std::nullopt;
    return out;
}

}  // namespace

BigInt lifted_clause_count(const Cnf& phi, const Gadget& g) {
    const BigInt c0 = g.count(false), c1 = g.count(true);
    BigInt total = 0;
    for (const auto& clause : phi.clauses) {
        auto c = normalize(clause);
        if (!c) continue;
        BigInt prod = 1;
        // the falsifying value of a positive literal is 0
        for (int lit : *c) prod *= lit > 0 ? c0 : c1;
        total += prod;
    }
    return total;
}

Cnf lift_cnf(const Cnf& phi, const Gadget& g) {
    Cnf out;
    out.num_vars = phi.num_vars * g.b;
    const auto pre0 = gadget_preimages(g, false), pre1 = gadget_preimages(g, true);
    for (const auto& clause : phi.clauses) {
        auto c = normalize(clause);
        if (!c) continue;
        std::vector<const std::vector<std::uint64_t>*> opts;
        for (int lit : *c) {
            opts.push_back(lit > 0 ? &pre0 : &pre1);
            if (opts.back()->empty()) throw GadgetError("lifting needs a preimage the gadget does not have");
        }
        std::vector<std::size_t> pick(c->size(), 0);
        for (;;) {
            Clause lifted;
            for (std::size_t k = 0; k < c->size(); ++k) {
                const int base = (std::abs((*c)[k]) - 1) * static_cast<int>(g.b);
                const std::uint64_t a = (*opts[k])[pick[k]];
                for (std::size_t j = 0; j < g.b; ++j) {
                    const int v = base + static_cast<int>(j) + 1;
                    lifted.push_back(((a >> j) & 1u) ? -v : v);
                }
            }
            out.clauses.push_back(std::move(lifted));
            std::size_t k = c->size();
            while (k > 0 && ++pick[k - 1] == opts[k - 1]->size()) pick[--k] = 0;
            if (k == 0) break;
        }
    }
    return out;
}

}  // namespace plab
