#include "paritylab/f2.hpp"

#include <algorithm>
#include <numeric>

namespace plab {

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            v.set(i, true);
        else if (bits[i] != '0')
            throw F2Error("invalid bit literal '" + std::string(bits) + "'");
    }
    return v;
}

BitVec BitVec::from_word(std::size_t width, std::uint64_t word) {
    if (width > 64) throw F2Error("from_word: width > 64");
    BitVec v(width);
    if (width) v.words_[0] = width == 64 ? word : (word & ((std::uint64_t{1} << width) - 1));
    return v;
}

std::uint64_t BitVec::extract(std::size_t pos, std::size_t len) const {
    if (len == 0) return 0;
    if (len > 64 || pos + len > width_) throw F2Error("extract out of range");
    const std::size_t w = pos >> 6, off = pos & 63;
    std::uint64_t out = words_[w] >> off;
    if (off + len > 64) out |= words_[w + 1] << (64 - off);
    return len == 64 ? out : (out & ((std::uint64_t{1} << len) - 1));
}

void BitVec::deposit(std::size_t pos, std::size_t len, std::uint64_t value) {
    if (len > 64 || pos + len > width_) throw F2Error("deposit out of range");
    for (std::size_t j = 0; j < len; ++j) set(pos + j, (value >> j) & 1u);
}

std::string BitVec::to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitVec random_bitvec(std::size_t width, Rng& rng) {
    BitVec v(width);
    for (std::size_t w = 0; w < v.word_count(); ++w) v.words()[w] = rng();
    if (width % 64) v.words()[v.word_count() - 1] &= (std::uint64_t{1} << (width % 64)) - 1;
    return v;
}

BitMatrix::BitMatrix(std::size_t width, std::vector<BitVec> rows) : width_(width), rows_(std::move(rows)) {
    for (const auto& r : rows_)
        if (r.width() != width_) throw F2Error("matrix rows must share a width");
}

void BitMatrix::push_back(BitVec row) {
    if (row.width() != width_) throw F2Error("matrix rows must share a width");
    rows_.push_back(std::move(row));
}

BitMatrix BitMatrix::row_basis() const {
    auto rows = rows_;
    reduce_rows(rows);
    return BitMatrix(width_, std::move(rows));
}

std::vector<std::size_t> reduce_rows(std::vector<BitVec>& rows, std::vector<std::uint8_t>* rhs, bool* inconsistent) {
    std::vector<BitVec> basis;
    std::vector<std::uint8_t> brhs;
    std::vector<std::size_t> piv;
    if (inconsistent) *inconsistent = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        BitVec r = std::move(rows[i]);
        std::uint8_t c = rhs ? (*rhs)[i] : 0;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (r.get(piv[k])) {
                r ^= basis[k];
                c ^= brhs[k];
            }
        }
        if (r.is_zero()) {
            if (c && inconsistent) *inconsistent = true;
            continue;
        }
        const std::size_t p = r.lowest_set();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (basis[k].get(p)) {
                basis[k] ^= r;
                brhs[k] ^= c;
            }
        }
        basis.push_back(std::move(r));
        brhs.push_back(c);
        piv.push_back(p);
    }
    std::vector<std::size_t> order(basis.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return piv[a] < piv[b]; });
    rows.clear();
    std::vector<std::size_t> sorted_piv;
    std::vector<std::uint8_t> sorted_rhs;
    for (auto k : order) {
        rows.push_back(std::move(basis[k]));
        sorted_piv.push_back(piv[k]);
        sorted_rhs.push_back(brhs[k]);
    }
    if (rhs) *rhs = std::move(sorted_rhs);
    return sorted_piv;
}

std::size_t rank(const BitMatrix& m) {
    auto rows = m.rows();
    return reduce_rows(rows).size();
}

Equation Equation::parse(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw F2Error("equation literal needs '='");
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        return s;
    };
    const auto lhs = trim(text.substr(0, eq));
    const auto rhs = trim(text.substr(eq + 1));
    if (rhs != "0" && rhs != "1") throw F2Error("equation right-hand side must be 0 or 1");
    return Equation{BitVec::from_string(lhs), rhs == "1"};
}

std::string Equation::to_string() const { return form.to_string() + " = " + (bit ? "1" : "0"); }

AffineSpace AffineSpace::full(std::size_t width) {
    AffineSpace a;
    a.width_ = width;
    return a;
}

std::uint64_t AffineSpace::size() const {
    if (dim() >= 64) throw F2Error("affine space too large for a 64-bit size");
    return std::uint64_t{1} << dim();
}

std::vector<Equation> AffineSpace::equation_list() const {
    std::vector<Equation> out;
    for (std::size_t i = 0; i < rows_.size(); ++i) out.push_back({rows_[i], rhs_[i] != 0});
    return out;
}

bool AffineSpace::contains(const BitVec& x) const {
    if (x.width() != width_) throw F2Error("width mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].dot(x) != (rhs_[i] != 0)) return false;
    return true;
}

std::optional<bool> AffineSpace::implied_value(const BitVec& form) const {
    if (form.width() != width_) throw F2Error("width mismatch");
    BitVec r = form;
    bool acc = false;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        if (r.get(pivots_[k])) {
            r ^= rows_[k];
            acc ^= rhs_[k] != 0;
        }
    }
    if (!r.is_zero()) return std::nullopt;
    return acc;
}

bool AffineSpace::is_subset_of(const AffineSpace& other) const {
    if (other.width_ != width_) throw F2Error("width mismatch");
    for (std::size_t k = 0; k < other.rows_.size(); ++k) {
        const auto v = implied_value(other.rows_[k]);
        if (!v || *v != (other.rhs_[k] != 0)) return false;
    }
    return true;
}

BitVec AffineSpace::particular_point() const {
    BitVec x(width_);
    for (std::size_t k = 0; k < rows_.size(); ++k) x.set(pivots_[k], rhs_[k] != 0);
    return x;
}

std::vector<std::size_t> AffineSpace::free_coordinates() const {
    std::vector<std::size_t> out;
    std::size_t k = 0;
    for (std::size_t i = 0; i < width_; ++i) {
        if (k < pivots_.size() && pivots_[k] == i) {
            ++k;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

std::vector<BitVec> AffineSpace::direction_basis() const {
    std::vector<BitVec> basis;
    for (auto f : free_coordinates()) {
        BitVec v(width_);
        v.set(f, true);
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (rows_[k].get(f)) v.set(pivots_[k], true);
        basis.push_back(std::move(v));
    }
    return basis;
}

BitVec AffineSpace::sample_point(Rng& rng) const {
    BitVec x = random_bitvec(width_, rng);
    for (auto p : pivots_) x.set(p, false);
    std::vector<bool> vals(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) vals[k] = (rhs_[k] != 0) ^ rows_[k].dot(x);
    for (std::size_t k = 0; k < rows_.size(); ++k) x.set(pivots_[k], vals[k]);
    return x;
}

void AffineSpace::check_cap(std::size_t cap) const {
    if (dim() > cap)
        throw F2Error("enumeration cap exceeded: dim " + std::to_string(dim()) + " > " + std::to_string(cap));
}

std::vector<BitVec> AffineSpace::enumerate_points(std::size_t cap) const {
    std::vector<BitVec> out;
    for_each_point([&](const BitVec& x) { out.push_back(x); }, cap);
    return out;
}

std::optional<AffineSpace> affine_from_equations(const BitMatrix& eqs, const std::vector<std::uint8_t>& rhs) {
    if (rhs.size() != eqs.row_count()) throw F2Error("rhs length must equal the number of equations");
    AffineSpace a;
    a.width_ = eqs.width();
    a.rows_ = eqs.rows();
    a.rhs_ = rhs;
    for (auto& c : a.rhs_) c = c ? 1 : 0;
    bool inconsistent = false;
    a.pivots_ = reduce_rows(a.rows_, &a.rhs_, &inconsistent);
    if (inconsistent) return std::nullopt;
    return a;
}

std::optional<AffineSpace> affine_from_equations(std::size_t width, const std::vector<Equation>& eqs) {
    BitMatrix m(width);
    std::vector<std::uint8_t> rhs;
    for (const auto& e : eqs) {
        m.push_back(e.form);
        rhs.push_back(e.bit);
    }
    return affine_from_equations(m, rhs);
}

std::optional<AffineSpace> intersect(const AffineSpace& a, const BitVec& form, bool bit) {
    if (form.width() != a.width()) throw F2Error("width mismatch");
    auto eqs = a.equation_list();
    eqs.push_back({form, bit});
    return affine_from_equations(a.width(), eqs);
}

std::optional<AffineSpace> intersect(const AffineSpace& a, const AffineSpace& b) {
    if (a.width() != b.width()) throw F2Error("width mismatch");
    auto eqs = a.equation_list();
    for (auto& e : b.equation_list()) eqs.push_back(std::move(e));
    return affine_from_equations(a.width(), eqs);
}

std::size_t PartialAssignment::fixed_count() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](auto v) { return v != kFree; }));
}

std::vector<std::size_t> PartialAssignment::fixed_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] != kFree) out.push_back(i);
    return out;
}

std::vector<std::size_t> PartialAssignment::free_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] == kFree) out.push_back(i);
    return out;
}

PartialAssignment PartialAssignment::from_string(std::string_view text) {
    PartialAssignment p(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        switch (text[i]) {
            case '0': p.fix(i, false); break;
            case '1': p.fix(i, true); break;
            case '*': break;
            default: throw F2Error("invalid partial assignment literal");
        }
    }
    return p;
}

std::string PartialAssignment::to_string() const {
    std::string s;
    for (auto v : values_) s += v == kFree ? '*' : (v ? '1' : '0');
    return s;
}

}  // namespace plab
