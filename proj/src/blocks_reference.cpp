#include "paritylab/blocks_reference.hpp"

#include <algorithm>
#include <set>

namespace plab::reference {

namespace {

BlockSet from_mask(std::uint64_t mask, std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1u) out.push_back(i);
    return BlockSet(std::move(out));
}

// Span vectors of the row basis, listed exhaustively.
std::vector<BitVec> span_vectors(const BitMatrix& basis) {
    std::vector<BitVec> out;
    const std::size_t r = basis.row_count();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << r); ++m) {
        BitVec v(basis.width());
        for (std::size_t k = 0; k < r; ++k)
            if ((m >> k) & 1u) v ^= basis.row(k);
        out.push_back(std::move(v));
    }
    return out;
}

std::uint64_t block_support(const BitVec& v, const BlockLayout& layout) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < layout.n; ++i)
        if (v.extract(layout.coord(i, 0), layout.b)) mask |= std::uint64_t{1} << i;
    return mask;
}

}  // namespace

bool is_safe_by_columns(const BitMatrix& vecs, const BlockLayout& layout) {
    const auto basis = vecs.row_basis();
    const std::size_t r = basis.row_count();
    const std::size_t w = layout.width();
    if (r == 0) return true;
    if (w > 20) throw F2Error("reference column search limited to 20 coordinates");
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << w); ++m) {
        if (static_cast<std::size_t>(std::popcount(m)) != r) continue;
        std::vector<std::size_t> cols;
        std::uint64_t blocks = 0;
        bool distinct = true;
        for (std::size_t c = 0; c < w && distinct; ++c)
            if ((m >> c) & 1u) {
                const std::uint64_t bit = std::uint64_t{1} << layout.block_of(c);
                distinct = !(blocks & bit);
                blocks |= bit;
                cols.push_back(c);
            }
        if (distinct && columns_independent(basis, cols)) return true;
    }
    return false;
}

bool is_safe_by_span(const BitMatrix& vecs, const BlockLayout& layout) {
    const auto basis = vecs.row_basis();
    const auto span = span_vectors(basis);
    std::vector<std::uint64_t> supp;
    for (const auto& v : span) supp.push_back(block_support(v, layout));
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << layout.n); ++t) {
        std::vector<BitVec> inside;
        for (std::size_t k = 0; k < span.size(); ++k)
            if ((supp[k] & ~t) == 0) inside.push_back(span[k]);
        if (reduce_rows(inside).size() > static_cast<std::size_t>(std::popcount(t))) return false;
    }
    return true;
}

std::vector<BlockSet> all_deviolators(const BitMatrix& vecs, const BlockLayout& layout) {
    std::vector<BlockSet> out;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << layout.n); ++s) {
        const auto set = from_mask(s, layout.n);
        const BlockLayout rest{layout.n - set.size(), layout.b};
        if (is_safe_by_span(project_out(vecs, layout, set), rest)) out.push_back(set);
    }
    return out;
}

std::vector<BlockSet> minimum_deviolators(const BitMatrix& vecs, const BlockLayout& layout) {
    auto all = all_deviolators(vecs, layout);
    std::size_t best = layout.n + 1;
    for (const auto& s : all) best = std::min(best, s.size());
    std::vector<BlockSet> out;
    for (auto& s : all)
        if (s.size() == best) out.push_back(std::move(s));
    return out;
}

bool is_acceptable(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& blocks) {
    const auto basis = vecs.row_basis();
    if (blocks.size() > basis.row_count()) return false;
    const auto& m = blocks.members();
    std::vector<std::size_t> pick(m.size(), 0);
    for (;;) {
        std::vector<std::size_t> cols;
        for (std::size_t k = 0; k < m.size(); ++k) cols.push_back(layout.coord(m[k], pick[k]));
        if (columns_independent(basis, cols)) return true;
        std::size_t k = 0;
        while (k < m.size() && ++pick[k] == layout.b) pick[k++] = 0;
        if (k == m.size()) return false;
    }
}

BlockSet amortized_closure(const BitMatrix& vecs, const BlockLayout& layout) {
    BlockSet best;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << layout.n); ++s) {
        auto set = from_mask(s, layout.n);
        if (lex_less(best, set) && is_acceptable(vecs, layout, set)) best = std::move(set);
    }
    return best;
}

std::vector<std::size_t> maximal_acceptable_sizes(const BitMatrix& vecs, const BlockLayout& layout) {
    const std::uint64_t full = std::uint64_t{1} << layout.n;
    std::vector<bool> ok(full);
    for (std::uint64_t s = 0; s < full; ++s) ok[s] = is_acceptable(vecs, layout, from_mask(s, layout.n));
    std::set<std::size_t> sizes;
    for (std::uint64_t s = 0; s < full; ++s) {
        if (!ok[s]) continue;
        bool maximal = true;
        for (std::size_t i = 0; i < layout.n && maximal; ++i)
            if (!((s >> i) & 1u) && ok[s | (std::uint64_t{1} << i)]) maximal = false;
        if (maximal) sizes.insert(static_cast<std::size_t>(std::popcount(s)));
    }
    return {sizes.begin(), sizes.end()};
}

}  // namespace plab::reference
