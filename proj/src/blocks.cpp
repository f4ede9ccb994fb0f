#include "paritylab/blocks.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace plab {

BlockSet::BlockSet(std::vector<std::size_t> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool BlockSet::contains(std::size_t block) const {
    return std::binary_search(members_.begin(), members_.end(), block);
}

void BlockSet::insert(std::size_t block) {
    auto it = std::lower_bound(members_.begin(), members_.end(), block);
    if (it == members_.end() || *it != block) members_.insert(it, block);
}

bool BlockSet::is_subset_of(const BlockSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

BlockSet BlockSet::united(const BlockSet& other) const {
    std::vector<std::size_t> out;
    std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                   std::back_inserter(out));
    return BlockSet(std::move(out));
}

BlockSet BlockSet::minus(const BlockSet& other) const {
    std::vector<std::size_t> out;
    std::set_difference(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                        std::back_inserter(out));
    return BlockSet(std::move(out));
}

std::string BlockSet::to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < members_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(members_[k]);
    }
    return s + "}";
}

BlockSet BlockSet::parse(std::string_view text) {
    std::string body;
    for (char c : text)
        if (c != '{' && c != '}' && c != ' ') body += c;
    std::vector<std::size_t> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (!std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw F2Error("invalid block set literal '" + std::string(text) + "'");
        out.push_back(std::stoul(item));
    }
    return BlockSet(std::move(out));
}

bool lex_less(const BlockSet& a, const BlockSet& b) {
    const auto& x = a.members();
    const auto& y = b.members();
    auto ix = x.rbegin(), iy = y.rbegin();
    for (; ix != x.rend() && iy != y.rend(); ++ix, ++iy)
        if (*ix != *iy) return *ix < *iy;
    return ix == x.rend() && iy != y.rend();
}

ClosureAssignment ClosureAssignment::from_point(const BlockLayout& layout, const BlockSet& blocks, const BitVec& x) {
    ClosureAssignment y{blocks, {}};
    for (auto i : blocks) y.values.push_back(x.extract(layout.coord(i, 0), layout.b));
    return y;
}

std::uint64_t ClosureAssignment::value_of(std::size_t block) const {
    const auto& m = blocks.members();
    auto it = std::lower_bound(m.begin(), m.end(), block);
    if (it == m.end() || *it != block) throw F2Error("block " + std::to_string(block) + " not assigned");
    return values.at(static_cast<std::size_t>(it - m.begin()));
}

std::string ClosureAssignment::to_string(std::size_t b) const {
    std::string s;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (k) s += ' ';
        s += std::to_string(blocks.members()[k]) + ':' + BitVec::from_word(b, values[k]).to_string();
    }
    return s;
}

ClosureAssignment ClosureAssignment::parse(std::string_view text, std::size_t b) {
    std::stringstream ss{std::string(text)};
    std::string tok;
    std::vector<std::pair<std::size_t, std::uint64_t>> items;
    while (ss >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw F2Error("closure assignment entry needs 'block:bits'");
        const auto bits = BitVec::from_string(std::string_view(tok).substr(colon + 1));
        if (bits.width() != b) throw F2Error("closure assignment block value must have " + std::to_string(b) + " bits");
        items.emplace_back(std::stoul(tok.substr(0, colon)), bits.extract(0, b));
    }
    std::sort(items.begin(), items.end());
    ClosureAssignment y;
    std::vector<std::size_t> blocks;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (k && items[k].first == items[k - 1].first) throw F2Error("block assigned twice");
        blocks.push_back(items[k].first);
        y.values.push_back(items[k].second);
    }
    y.blocks = BlockSet(std::move(blocks));
    return y;
}

BitMatrix block_unit_vectors(const BlockLayout& layout, const BlockSet& blocks) {
    BitMatrix m(layout.width());
    for (auto i : blocks)
        for (std::size_t j = 0; j < layout.b; ++j) m.push_back(BitVec::unit(layout.width(), layout.coord(i, j)));
    return m;
}

BitMatrix project_out(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& removed) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < layout.n; ++i)
        if (!removed.contains(i)) kept.push_back(i);
    const std::size_t w = kept.size() * layout.b;
    BitMatrix out(w);
    for (const auto& r : vecs.rows()) {
        BitVec v(w);
        for (std::size_t k = 0; k < kept.size(); ++k)
            v.deposit(k * layout.b, layout.b, r.extract(layout.coord(kept[k], 0), layout.b));
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

// Common independent sets of the linear matroid on the columns of a row
// basis and the partition matroid with one slot per block. Blocks may be
// disabled so the amortized closure can grow the allowed ground set.
class ColumnMatcher {
public:
    ColumnMatcher(const BitMatrix& basis, const BlockLayout& layout)
        : layout_(layout), rank_(basis.row_count()), allowed_(layout.n, false), owner_(layout.n, kNone) {
        cols_.reserve(layout.width());
        for (std::size_t c = 0; c < layout.width(); ++c) {
            BitVec v(rank_);
            for (std::size_t r = 0; r < rank_; ++r)
                if (basis.row(r).get(c)) v.set(r, true);
            cols_.push_back(std::move(v));
        }
        in_set_.assign(layout.width(), false);
    }

    void allow(std::size_t block) { allowed_[block] = true; }
    void disallow(std::size_t block) { allowed_[block] = false; }
    void allow_all() { std::fill(allowed_.begin(), allowed_.end(), true); }

    std::size_t size() const { return chosen_.size(); }
    std::size_t rank() const { return rank_; }

    // One shortest augmenting path; false when the set is already maximum.
    bool augment() {
        if (chosen_.size() == rank_) return false;
        const std::size_t w = layout_.width();

        // Elimination over the chosen columns, tracking combinations.
        std::vector<BitVec> red;
        std::vector<BitVec> combo;
        std::vector<std::size_t> piv;
        for (std::size_t k = 0; k < chosen_.size(); ++k) {
            BitVec v = cols_[chosen_[k]];
            BitVec c(chosen_.size());
            c.set(k, true);
            for (std::size_t t = 0; t < red.size(); ++t)
                if (v.get(piv[t])) {
                    v ^= red[t];
                    c ^= combo[t];
                }
            piv.push_back(v.lowest_set());
            red.push_back(std::move(v));
            combo.push_back(std::move(c));
        }

        // circuit[y]: indices into chosen_, or nullopt when y is outside the span
        std::vector<std::optional<BitVec>> circuit(w);
        std::vector<std::size_t> candidates;
        for (std::size_t y = 0; y < w; ++y) {
            if (in_set_[y] || !allowed_[layout_.block_of(y)] || cols_[y].is_zero()) continue;
            candidates.push_back(y);
            BitVec v = cols_[y];
            BitVec c(chosen_.size());
            for (std::size_t t = 0; t < red.size(); ++t)
                if (v.get(piv[t])) {
                    v ^= red[t];
                    c ^= combo[t];
                }
            if (v.is_zero()) circuit[y] = std::move(c);
        }

        std::vector<std::size_t> prev(w, kNone);
        std::vector<bool> seen(w, false);
        std::deque<std::size_t> queue;
        for (auto y : candidates)
            if (!circuit[y]) {
                seen[y] = true;
                queue.push_back(y);
            }
        std::vector<std::size_t> pos(w, kNone);
        for (std::size_t k = 0; k < chosen_.size(); ++k) pos[chosen_[k]] = k;

        std::size_t sink = kNone;
        while (!queue.empty() && sink == kNone) {
            const std::size_t u = queue.front();
            queue.pop_front();
            if (!in_set_[u]) {
                const std::size_t blk = layout_.block_of(u);
                if (owner_[blk] == kNone) {
                    sink = u;
                    break;
                }
                const std::size_t x = owner_[blk];
                if (!seen[x]) {
                    seen[x] = true;
                    prev[x] = u;
                    queue.push_back(x);
                }
            } else {
                const std::size_t k = pos[u];
                for (auto y : candidates) {
                    if (seen[y] || !circuit[y] || !circuit[y]->get(k)) continue;
                    seen[y] = true;
                    prev[y] = u;
                    queue.push_back(y);
                }
            }
        }
        if (sink == kNone) return false;

        for (std::size_t u = sink; u != kNone; u = prev[u]) in_set_[u] = !in_set_[u];
        chosen_.clear();
        std::fill(owner_.begin(), owner_.end(), kNone);
        for (std::size_t c = 0; c < w; ++c)
            if (in_set_[c]) {
                chosen_.push_back(c);
                owner_[layout_.block_of(c)] = c;
            }
        return true;
    }

    std::size_t maximize() {
        while (augment()) {
        }
        return chosen_.size();
    }

    const std::vector<std::size_t>& chosen() const { return chosen_; }
    bool block_used(std::size_t block) const { return owner_[block] != kNone; }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    BlockLayout layout_;
    std::size_t rank_;
    std::vector<BitVec> cols_;
    std::vector<bool> allowed_;
    std::vector<bool> in_set_;
    std::vector<std::size_t> owner_;
    std::vector<std::size_t> chosen_;
};

void check_width(const BitMatrix& vecs, const BlockLayout& layout) {
    if (vecs.width() != layout.width()) throw F2Error("vector width does not match block layout");
}

std::size_t matching_size(const BitMatrix& basis, const BlockLayout& layout) {
    ColumnMatcher m(basis, layout);
    m.allow_all();
    return m.maximize();
}

// Basis of the span vectors that vanish on one block.
BitMatrix vanishing_on(const BitMatrix& basis, const BlockLayout& layout, std::size_t block) {
    std::vector<BitVec> rows = basis.rows();
    std::vector<bool> used(rows.size(), false);
    for (std::size_t j = 0; j < layout.b; ++j) {
        const std::size_t c = layout.coord(block, j);
        std::size_t p = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!used[r] && rows[r].get(c)) {
                p = r;
                break;
            }
        if (p == rows.size()) continue;
        used[p] = true;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != p && rows[r].get(c)) rows[r] ^= rows[p];
    }
    BitMatrix out(basis.width());
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!used[r]) out.push_back(rows[r]);
    return out;
}

}  // namespace

bool is_safe(const BitMatrix& vecs, const BlockLayout& layout) {
    check_width(vecs, layout);
    const auto basis = vecs.row_basis();
    return matching_size(basis, layout) == basis.row_count();
}

bool is_safe(const AffineSpace& a, const BlockLayout& layout) { return is_safe(a.equations(), layout); }

bool is_deviolator(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& s) {
    check_width(vecs, layout);
    const BlockLayout rest{layout.n - s.size(), layout.b};
    return is_safe(project_out(vecs, layout, s), rest);
}

std::size_t max_deficiency(const BitMatrix& vecs, const BlockLayout& layout) {
    check_width(vecs, layout);
    const auto basis = vecs.row_basis();
    return basis.row_count() - matching_size(basis, layout);
}

// The deficiency dim(W_T) - |T| is supermodular in T, so its maximizers form
// a lattice; the closure is the least one. A block lies in it iff excluding
// the block strictly lowers the best deficiency.
BlockSet closure(const BitMatrix& vecs, const BlockLayout& layout) {
    check_width(vecs, layout);
    const auto basis = vecs.row_basis();
    const std::size_t best = basis.row_count() - matching_size(basis, layout);
    if (best == 0) return {};
    std::vector<bool> touched(layout.n, false);
    for (const auto& r : basis.rows())
        for (std::size_t c = 0; c < layout.width(); ++c)
            if (r.get(c)) touched[layout.block_of(c)] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layout.n; ++i) {
        // untouched blocks leave the span unchanged
        if (!touched[i]) continue;
        const auto w = vanishing_on(basis, layout, i);
        if (w.row_count() - matching_size(w, layout) < best) out.push_back(i);
    }
    return BlockSet(std::move(out));
}

BlockSet closure(const AffineSpace& a, const BlockLayout& layout) { return closure(a.equations(), layout); }

// Acceptable block sets are the independent sets of a matroid, so greedy in
// descending block order yields the lexicographically largest one.
AmortizedClosure amortized_closure(const BitMatrix& vecs, const BlockLayout& layout) {
    check_width(vecs, layout);
    const auto basis = vecs.row_basis();
    ColumnMatcher m(basis, layout);
    std::vector<std::size_t> accepted;
    for (std::size_t i = layout.n; i-- > 0;) {
        if (m.size() == m.rank()) break;
        m.allow(i);
        if (m.augment())
            accepted.push_back(i);
        else
            m.disallow(i);  // unused by the matching, so dropping it is free
    }
    AmortizedClosure out;
    out.blocks = BlockSet(accepted);
    out.columns = m.chosen();
    return out;
}

AmortizedClosure amortized_closure(const AffineSpace& a, const BlockLayout& layout) {
    return amortized_closure(a.equations(), layout);
}

bool columns_independent(const BitMatrix& vecs, const std::vector<std::size_t>& columns) {
    std::vector<BitVec> cols;
    for (auto c : columns) {
        BitVec v(vecs.row_count());
        for (std::size_t r = 0; r < vecs.row_count(); ++r)
            if (vecs.row(r).get(c)) v.set(r, true);
        cols.push_back(std::move(v));
    }
    const std::size_t n = cols.size();
    return reduce_rows(cols).size() == n;
}

AffineSpace assignment_space(const BlockLayout& layout, const ClosureAssignment& y) {
    if (y.values.size() != y.blocks.size()) throw F2Error("closure assignment needs one value per block");
    std::vector<Equation> eqs;
    for (std::size_t k = 0; k < y.blocks.size(); ++k) {
        const std::size_t i = y.blocks.members()[k];
        if (i >= layout.n) throw F2Error("closure assignment block out of range");
        for (std::size_t j = 0; j < layout.b; ++j)
            eqs.push_back({BitVec::unit(layout.width(), layout.coord(i, j)), ((y.values[k] >> j) & 1u) != 0});
    }
    return *affine_from_equations(layout.width(), eqs);
}

bool is_extendable(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y) {
    if (a.width() != layout.width()) throw F2Error("affine space width does not match block layout");
    return intersect(a, assignment_space(layout, y)).has_value();
}

Restriction restrict_to_complement(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y) {
    if (a.width() != layout.width()) throw F2Error("affine space width does not match block layout");
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < layout.n; ++i)
        if (!y.blocks.contains(i)) kept.push_back(i);
    const BlockLayout rest{kept.size(), layout.b};
    std::vector<Equation> eqs;
    for (std::size_t r = 0; r < a.codim(); ++r) {
        const BitVec& f = a.forms()[r];
        bool c = a.rhs()[r] != 0;
        for (std::size_t k = 0; k < y.blocks.size(); ++k) {
            const std::uint64_t part = f.extract(layout.coord(y.blocks.members()[k], 0), layout.b) & y.values[k];
            c ^= (std::popcount(part) & 1) != 0;
        }
        BitVec g(rest.width());
        for (std::size_t k = 0; k < kept.size(); ++k)
            g.deposit(k * layout.b, layout.b, f.extract(layout.coord(kept[k], 0), layout.b));
        eqs.push_back({std::move(g), c});
    }
    auto space = affine_from_equations(rest.width(), eqs);
    if (!space) throw NotExtendable();
    return Restriction{std::move(*space), rest, std::move(kept)};
}

Restriction restrict(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y) {
    if (!(y.blocks == closure(a, layout)))
        throw F2Error("closure assignment blocks " + y.blocks.to_string() + " differ from the closure " +
                      closure(a, layout).to_string());
    return restrict_to_complement(a, layout, y);
}

BitVec merge_point(const Restriction& r, const BlockLayout& layout, const ClosureAssignment& y, const BitVec& rest) {
    BitVec x(layout.width());
    for (std::size_t k = 0; k < r.kept_blocks.size(); ++k)
        x.deposit(layout.coord(r.kept_blocks[k], 0), layout.b, rest.extract(k * layout.b, layout.b));
    for (std::size_t k = 0; k < y.blocks.size(); ++k)
        x.deposit(layout.coord(y.blocks.members()[k], 0), layout.b, y.values[k]);
    return x;
}

}  // namespace plab
