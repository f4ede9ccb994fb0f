#pragma once

// Bit-packed linear algebra over F2.
//
// Coordinates are little-endian by index: coordinate i lives in bit (i % 64)
// of word (i / 64). Textual literals put coordinate 0 leftmost.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "paritylab/random.hpp"

namespace plab {

class F2Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

    static BitVec unit(std::size_t width, std::size_t index) {
        BitVec v(width);
        v.set(index, true);
        return v;
    }
    static BitVec from_string(std::string_view bits);
    static BitVec from_word(std::size_t width, std::uint64_t word);

    std::size_t width() const { return width_; }
    std::size_t word_count() const { return words_.size(); }
    const std::uint64_t* words() const { return words_.data(); }
    std::uint64_t* words() { return words_.data(); }

    bool get(std::size_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool value) {
        check_index(i);
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) {
        check_index(i);
        words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
    }

    // Bits [pos, pos + len) packed into the low bits of a word; len <= 64.
    std::uint64_t extract(std::size_t pos, std::size_t len) const;
    void deposit(std::size_t pos, std::size_t len, std::uint64_t value);

    BitVec& operator^=(const BitVec& other) {
        check_width(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    // <this, other> mod 2
    bool dot(const BitVec& other) const {
        check_width(other);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return std::popcount(acc) & 1;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool is_zero() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    // Lowest set coordinate, or width() when zero.
    std::size_t lowest_set() const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
        return width_;
    }

    std::string to_string() const;

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.width_ == b.width_ && a.words_ == b.words_;
    }
    friend bool operator<(const BitVec& a, const BitVec& b) {
        if (a.width_ != b.width_) return a.width_ < b.width_;
        for (std::size_t i = 0; i < a.width_; ++i)
            if (a.get(i) != b.get(i)) return !a.get(i);
        return false;
    }

private:
    void check_index(std::size_t i) const {
        if (i >= width_) throw F2Error("coordinate " + std::to_string(i) + " out of range for width " + std::to_string(width_));
    }
    void check_width(const BitVec& other) const {
        if (other.width_ != width_) throw F2Error("width mismatch");
    }

    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

BitVec random_bitvec(std::size_t width, Rng& rng);

class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(std::size_t width) : width_(width) {}
    BitMatrix(std::size_t width, std::vector<BitVec> rows);

    std::size_t width() const { return width_; }
    std::size_t row_count() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const BitVec& row(std::size_t i) const { return rows_.at(i); }
    const std::vector<BitVec>& rows() const { return rows_; }

    void push_back(BitVec row);

    // Row basis in reduced row-echelon form (pivot = lowest set coordinate).
    BitMatrix row_basis() const;

private:
    std::size_t width_ = 0;
    std::vector<BitVec> rows_;
};

std::size_t rank(const BitMatrix& m);

// Reduces rows to RREF in place, dropping zero rows. Returns pivot columns.
// When rhs is non-null it is carried along; a zero row with rhs 1 sets
// *inconsistent.
std::vector<std::size_t> reduce_rows(std::vector<BitVec>& rows, std::vector<std::uint8_t>* rhs = nullptr,
                                     bool* inconsistent = nullptr);

// An equation <form, x> = bit.
struct Equation {
    BitVec form;
    bool bit = false;

    static Equation parse(std::string_view text);
    std::string to_string() const;
};

inline constexpr std::size_t kDefaultEnumerationCap = 26;

// Affine subspace {x : Mx = c} in normalized form. Emptiness is represented
// by std::nullopt from the constructing functions.
class AffineSpace {
public:
    static AffineSpace full(std::size_t width);

    std::size_t width() const { return width_; }
    std::size_t codim() const { return rows_.size(); }
    std::size_t dim() const { return width_ - rows_.size(); }
    // 2^dim; throws when dim >= 64.
    std::uint64_t size() const;

    // Normalized equations: rows in RREF sorted by pivot.
    const std::vector<BitVec>& forms() const { return rows_; }
    const std::vector<std::uint8_t>& rhs() const { return rhs_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    BitMatrix equations() const { return BitMatrix(width_, rows_); }
    std::vector<Equation> equation_list() const;

    bool contains(const BitVec& x) const;
    // <form, x> is constant on the space; returns that constant if so.
    std::optional<bool> implied_value(const BitVec& form) const;
    bool is_subset_of(const AffineSpace& other) const;

    // A point with every free coordinate set to zero.
    BitVec particular_point() const;
    // Direction space basis: one vector per free coordinate, in ascending order.
    std::vector<BitVec> direction_basis() const;
    std::vector<std::size_t> free_coordinates() const;

    BitVec sample_point(Rng& rng) const;

    // Visits every point in Gray-code order of the free coordinates. The
    // BitVec passed to f is reused between calls.
    template <class F>
    void for_each_point(F&& f, std::size_t cap = kDefaultEnumerationCap) const {
        check_cap(cap);
        for_each_point_in_range(0, std::uint64_t{1} << dim(), std::forward<F>(f));
    }

    // Points with Gray-code index in [first, last).
    template <class F>
    void for_each_point_in_range(std::uint64_t first, std::uint64_t last, F&& f) const {
        if (first >= last) return;
        const auto basis = direction_basis();
        BitVec x = particular_point();
        const std::uint64_t g0 = first ^ (first >> 1);
        for (std::size_t j = 0; j < basis.size(); ++j)
            if ((g0 >> j) & 1u) x ^= basis[j];
        f(static_cast<const BitVec&>(x));
        for (std::uint64_t i = first + 1; i < last; ++i) {
            x ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
            f(static_cast<const BitVec&>(x));
        }
    }

    std::vector<BitVec> enumerate_points(std::size_t cap = kDefaultEnumerationCap) const;

    friend bool operator==(const AffineSpace& a, const AffineSpace& b) {
        return a.width_ == b.width_ && a.rows_ == b.rows_ && a.rhs_ == b.rhs_;
    }

private:
    friend std::optional<AffineSpace> affine_from_equations(const BitMatrix&, const std::vector<std::uint8_t>&);
    void check_cap(std::size_t cap) const;

    std::size_t width_ = 0;
    std::vector<BitVec> rows_;
    std::vector<std::uint8_t> rhs_;
    std::vector<std::size_t> pivots_;
};

std::optional<AffineSpace> affine_from_equations(const BitMatrix& eqs, const std::vector<std::uint8_t>& rhs);
std::optional<AffineSpace> affine_from_equations(std::size_t width, const std::vector<Equation>& eqs);
std::optional<AffineSpace> intersect(const AffineSpace& a, const BitVec& form, bool bit);
std::optional<AffineSpace> intersect(const AffineSpace& a, const AffineSpace& b);

// Counts points satisfying pred, splitting the Gray-code index range over
// `jobs` threads. pred must be safe to call concurrently on distinct copies;
// make_pred() is invoked once per worker.
template <class MakePred>
std::uint64_t parallel_count(const AffineSpace& a, unsigned jobs, MakePred&& make_pred,
                             std::size_t cap = kDefaultEnumerationCap) {
    if (a.dim() > cap) throw F2Error("enumeration cap exceeded: dim " + std::to_string(a.dim()));
    const std::uint64_t total = std::uint64_t{1} << a.dim();
    if (jobs <= 1 || total < 4096) {
        auto pred = make_pred();
        std::uint64_t count = 0;
        a.for_each_point_in_range(0, total, [&](const BitVec& x) { count += pred(x) ? 1 : 0; });
        return count;
    }
    std::vector<std::uint64_t> partial(jobs, 0);
    std::vector<std::thread> workers;
    const std::uint64_t chunk = (total + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            auto pred = make_pred();
            const std::uint64_t lo = std::min<std::uint64_t>(total, w * chunk);
            const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
            std::uint64_t c = 0;
            a.for_each_point_in_range(lo, hi, [&](const BitVec& x) { c += pred(x) ? 1 : 0; });
            partial[w] = c;
        });
    }
    for (auto& t : workers) t.join();
    std::uint64_t count = 0;
    for (auto c : partial) count += c;
    return count;
}

// A vector over {0, 1, *}.
class PartialAssignment {
public:
    PartialAssignment() = default;
    explicit PartialAssignment(std::size_t size) : values_(size, kFree) {}

    static constexpr std::int8_t kFree = -1;

    std::size_t size() const { return values_.size(); }
    bool is_fixed(std::size_t i) const { return values_.at(i) != kFree; }
    bool value(std::size_t i) const { return values_.at(i) == 1; }
    std::int8_t raw(std::size_t i) const { return values_.at(i); }
    void fix(std::size_t i, bool v) { values_.at(i) = v ? 1 : 0; }
    void unfix(std::size_t i) { values_.at(i) = kFree; }
    std::size_t fixed_count() const;
    std::vector<std::size_t> fixed_indices() const;
    std::vector<std::size_t> free_indices() const;

    // "01*1" style literal.
    static PartialAssignment from_string(std::string_view text);
    std::string to_string() const;

    friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;

private:
    std::vector<std::int8_t> values_;
};

}  // namespace plab
