#pragma once

// Block-structured F2 algebra on n blocks of b coordinates each.
//
// Coordinate (i, j) of block i is the flat index i*b + j. A set of vectors is
// safe when every k independent vectors of its span touch at least k blocks;
// the closure is the minimum block set whose removal restores safety, and the
// amortized closure is the lexicographically largest block set admitting one
// linearly independent column per block. "Nice" elsewhere in the literature
// means the same thing as safe.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paritylab/f2.hpp"

namespace plab {

struct BlockLayout {
    std::size_t n = 0;  // number of blocks
    std::size_t b = 0;  // bits per block

    std::size_t width() const { return n * b; }
    std::size_t block_of(std::size_t coord) const { return coord / b; }
    std::size_t coord(std::size_t block, std::size_t bit) const { return block * b + bit; }

    friend bool operator==(const BlockLayout&, const BlockLayout&) = default;
};

class BlockSet {
public:
    BlockSet() = default;
    BlockSet(std::initializer_list<std::size_t> members) : BlockSet(std::vector<std::size_t>(members)) {}
    explicit BlockSet(std::vector<std::size_t> members);

    const std::vector<std::size_t>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(std::size_t block) const;
    void insert(std::size_t block);
    bool is_subset_of(const BlockSet& other) const;

    BlockSet united(const BlockSet& other) const;
    BlockSet minus(const BlockSet& other) const;

    // "{0,2,3}", ascending.
    std::string to_string() const;
    static BlockSet parse(std::string_view text);

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const BlockSet&, const BlockSet&) = default;

private:
    std::vector<std::size_t> members_;
};

// Lexicographic order used for the amortized closure: both sets are read as
// descending index sequences and compared element-wise; when one is a prefix
// of the other the longer one is larger.
bool lex_less(const BlockSet& a, const BlockSet& b);

// Full assignment to the coordinates of a block set; values[k] holds block
// members()[k], bit j = coordinate j of the block.
struct ClosureAssignment {
    BlockSet blocks;
    std::vector<std::uint64_t> values;

    static ClosureAssignment from_point(const BlockLayout& layout, const BlockSet& blocks, const BitVec& x);
    std::uint64_t value_of(std::size_t block) const;

    // "0:1010 3:0011"; coordinate 0 of each block leftmost.
    std::string to_string(std::size_t b) const;
    static ClosureAssignment parse(std::string_view text, std::size_t b);

    friend bool operator==(const ClosureAssignment&, const ClosureAssignment&) = default;
};

// Unit vectors e(i, j) for every block i of `blocks`.
BitMatrix block_unit_vectors(const BlockLayout& layout, const BlockSet& blocks);

// v[\S]: rows projected onto the blocks outside S (block order preserved).
BitMatrix project_out(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& removed);

bool is_safe(const BitMatrix& vecs, const BlockLayout& layout);
bool is_safe(const AffineSpace& a, const BlockLayout& layout);

bool is_deviolator(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& s);

BlockSet closure(const BitMatrix& vecs, const BlockLayout& layout);
BlockSet closure(const AffineSpace& a, const BlockLayout& layout);

// max over block sets T of dim(span vectors supported inside T) - |T|.
// Zero exactly when the vectors are safe.
std::size_t max_deficiency(const BitMatrix& vecs, const BlockLayout& layout);

struct AmortizedClosure {
    BlockSet blocks;
    // One flat coordinate per member block, in ascending block order; the
    // corresponding columns are linearly independent.
    std::vector<std::size_t> columns;
};

AmortizedClosure amortized_closure(const BitMatrix& vecs, const BlockLayout& layout);
AmortizedClosure amortized_closure(const AffineSpace& a, const BlockLayout& layout);

// Whether the given columns of vecs are linearly independent.
bool columns_independent(const BitMatrix& vecs, const std::vector<std::size_t>& columns);

bool is_extendable(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y);

class NotExtendable : public std::runtime_error {
public:
    NotExtendable() : std::runtime_error("closure assignment is not extendable in the affine space") {}
};

// A_y living on the blocks outside y.blocks.
struct Restriction {
    AffineSpace space;
    BlockLayout layout;
    std::vector<std::size_t> kept_blocks;  // original index of each remaining block
};

// Substitutes y into every equation of a. Throws NotExtendable.
Restriction restrict_to_complement(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y);

// As above, with the precondition y.blocks == closure(a) checked.
Restriction restrict(const AffineSpace& a, const BlockLayout& layout, const ClosureAssignment& y);

// Inverse of restriction on points: merges a point on the kept blocks with y.
BitVec merge_point(const Restriction& r, const BlockLayout& layout, const ClosureAssignment& y, const BitVec& rest);

// The affine space C_y of points consistent with y.
AffineSpace assignment_space(const BlockLayout& layout, const ClosureAssignment& y);

}  // namespace plab
