#include <doctest.h>

#include <algorithm>

#include "paritylab/blocks.hpp"
#include "paritylab/blocks_reference.hpp"

using namespace plab;

namespace {

BitVec e(const BlockLayout& L, std::size_t block, std::size_t bit) { return BitVec::unit(L.width(), L.coord(block, bit)); }

BitMatrix rows(const BlockLayout& L, std::vector<BitVec> v) { return BitMatrix(L.width(), std::move(v)); }

BitMatrix random_vectors(const BlockLayout& L, std::size_t count, Rng& rng) {
    BitMatrix m(L.width());
    for (std::size_t k = 0; k < count; ++k) {
        // bias towards sparse vectors so unsafe instances are common
        BitVec v = random_bitvec(L.width(), rng);
        if (coin(rng)) {
            const std::size_t keep = uniform_below(rng, L.n);
            for (std::size_t c = 0; c < L.width(); ++c)
                if (L.block_of(c) != keep && uniform_below(rng, 3)) v.set(c, false);
        }
        m.push_back(std::move(v));
    }
    return m;
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

BitMatrix stacked(const BitMatrix& a, const BitMatrix& b) {
    auto r = a.rows();
    for (auto& v : b.rows()) r.push_back(v);
    return BitMatrix(a.width(), r);
}

}  // namespace

TEST_CASE("block set and closure assignment literals") {
    CHECK(BlockSet{3, 0, 2}.to_string() == "{0,2,3}");
    CHECK(BlockSet::parse("{0,2,3}") == BlockSet{0, 2, 3});
    CHECK(BlockSet::parse("{}").empty());
    auto y = ClosureAssignment::parse("3:0011 0:1010", 4);
    CHECK(y.blocks == BlockSet{0, 3});
    CHECK(y.to_string(4) == "0:1010 3:0011");
    CHECK_THROWS_AS(ClosureAssignment::parse("0:101", 4), F2Error);
}

TEST_CASE("lexicographic order on block sets") {
    CHECK(lex_less(BlockSet{3}, BlockSet{5}));
    CHECK(lex_less(BlockSet{4, 3}, BlockSet{5}));
    CHECK(lex_less(BlockSet{5}, BlockSet{5, 0}));
    CHECK_FALSE(lex_less(BlockSet{5, 0}, BlockSet{5}));
    CHECK(lex_less(BlockSet{}, BlockSet{0}));
}

TEST_CASE("is_safe examples") {
    const BlockLayout L{3, 2};
    CHECK(is_safe(rows(L, {e(L, 0, 0) ^ e(L, 1, 1)}), L));
    CHECK_FALSE(is_safe(rows(L, {e(L, 0, 0), e(L, 0, 1)}), L));
    const BlockLayout L3{3, 1};
    CHECK(is_safe(rows(L3, {e(L3, 0, 0), e(L3, 1, 0), e(L3, 2, 0)}), L3));
}

TEST_CASE("closure examples") {
    const BlockLayout L{2, 2};
    CHECK(closure(rows(L, {e(L, 0, 0)}), L).empty());
    auto v = rows(L, {e(L, 0, 0), e(L, 0, 1), e(L, 1, 0)});
    CHECK(closure(v, L) == BlockSet{0});
    CHECK(reference::minimum_deviolators(v, L) == std::vector<BlockSet>{BlockSet{0}});
    const BlockLayout L3{3, 2};
    CHECK(closure(block_unit_vectors(L3, BlockSet{0, 1, 2}), L3) == BlockSet{0, 1, 2});
}

TEST_CASE("amortized closure examples") {
    const BlockLayout L{2, 2};
    CHECK(amortized_closure(BitMatrix(L.width()), L).blocks.empty());
    auto v = rows(L, {e(L, 0, 0), e(L, 0, 1), e(L, 1, 0)});
    auto ac = amortized_closure(v, L);
    CHECK(ac.blocks == BlockSet{0, 1});
    CHECK(closure(v, L).size() == 1);
    CHECK(columns_independent(v.row_basis(), ac.columns));

    const BlockLayout L6{6, 2};
    auto w = rows(L6, {e(L6, 3, 0) ^ e(L6, 5, 1)});
    CHECK(amortized_closure(w, L6).blocks == BlockSet{5});
    CHECK(reference::amortized_closure(w, L6) == BlockSet{5});
}

TEST_CASE("restrict and is_extendable examples") {
    const BlockLayout L{3, 2};
    auto full = AffineSpace::full(L.width());
    ClosureAssignment none;
    CHECK(restrict(full, L, none).space == full);
    CHECK(is_extendable(full, L, ClosureAssignment::parse("1:01", 2)));

    auto a = *affine_from_equations(L.width(), {{e(L, 0, 0), true}});
    CHECK(closure(a, L).empty());
    CHECK(restrict(a, L, none).space == a);
    CHECK_FALSE(is_extendable(a, L, ClosureAssignment::parse("0:00", 2)));
    CHECK_THROWS_AS(restrict_to_complement(a, L, ClosureAssignment::parse("0:00", 2)), NotExtendable);

    auto b = *affine_from_equations(L.width(), {{e(L, 0, 0), true}, {e(L, 0, 1), false}});
    CHECK(closure(b, L) == BlockSet{0});
    auto y = ClosureAssignment::parse("0:10", 2);
    auto r = restrict(b, L, y);
    CHECK(r.space == AffineSpace::full(4));
    CHECK(r.kept_blocks == std::vector<std::size_t>{1, 2});
    CHECK_THROWS_AS(restrict(b, L, none), F2Error);

    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        auto x = b.sample_point(rng);
        auto yy = ClosureAssignment::from_point(L, BlockSet{0, 2}, x);
        CHECK(is_extendable(b, L, yy));
        auto rr = restrict_to_complement(b, L, yy);
        auto rest = BitVec(rr.layout.width());
        rest.deposit(0, 2, x.extract(2, 2));
        CHECK(merge_point(rr, L, yy, rest) == x);
    }
}

TEST_CASE("fast routines agree with the exhaustive references") {
    Rng rng(2024);
    int unsafe = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const BlockLayout L{1 + uniform_below(rng, 4), 1 + uniform_below(rng, 3)};
        auto v = random_vectors(L, uniform_below(rng, L.width() + 2), rng);
        const bool safe = is_safe(v, L);
        unsafe += !safe;
        CHECK(safe == reference::is_safe_by_span(v, L));
        CHECK(safe == reference::is_safe_by_columns(v, L));
        CHECK((max_deficiency(v, L) == 0) == safe);

        auto cl = closure(v, L);
        auto mins = reference::minimum_deviolators(v, L);
        REQUIRE(mins.size() == 1);
        CHECK(cl == mins.front());
        for (auto& d : reference::all_deviolators(v, L)) CHECK(cl.is_subset_of(d));
        CHECK(is_deviolator(v, L, cl));

        auto ac = amortized_closure(v, L);
        CHECK(ac.blocks == reference::amortized_closure(v, L));
        CHECK(ac.columns.size() == ac.blocks.size());
        CHECK(columns_independent(v.row_basis(), ac.columns));
        CHECK(reference::maximal_acceptable_sizes(v, L).size() <= 1);
    }
    CHECK(unsafe > 200);
}

TEST_CASE("closure laws on random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const BlockLayout L{1 + uniform_below(rng, 4), 1 + uniform_below(rng, 3)};
        auto v = random_vectors(L, uniform_below(rng, L.width()), rng);
        auto cl = closure(v, L);
        auto ac = amortized_closure(v, L).blocks;
        CHECK(cl.is_subset_of(ac));

        // monotonicity: more equations, smaller space, larger closures
        auto w = stacked(v, random_vectors(L, 1 + uniform_below(rng, 2), rng));
        CHECK(cl.is_subset_of(closure(w, L)));
        CHECK(ac.is_subset_of(amortized_closure(w, L).blocks));

        // continuity
        auto w1 = stacked(v, random_vectors(L, 1, rng));
        auto ac1 = amortized_closure(w1, L).blocks;
        CHECK(ac1.size() <= ac.size() + 1);
        if (ac1.size() == ac.size() + 1) CHECK(closure(w1, L) == cl);

        // augmentation stability
        auto aug = stacked(v, block_unit_vectors(L, cl));
        CHECK(closure(aug, L) == cl);
        CHECK(amortized_closure(aug, L).blocks == ac);

        // span invariance
        auto rw = rewrite(v, rng);
        CHECK(is_safe(rw, L) == is_safe(v, L));
        CHECK(closure(rw, L) == cl);
        CHECK(amortized_closure(rw, L).blocks == ac);
    }
}
