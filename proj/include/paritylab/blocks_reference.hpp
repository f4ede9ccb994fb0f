#pragma once

// Exhaustive reference implementations for the block algebra. Exponential in
// n*b; meant for cross-checking on small layouts only.

#include <vector>

#include "paritylab/blocks.hpp"

namespace plab::reference {

// rank(vecs) independent columns drawn from pairwise distinct blocks.
bool is_safe_by_columns(const BitMatrix& vecs, const BlockLayout& layout);

// Every k independent span vectors touch at least k blocks, checked as
// dim(span vectors supported inside T) <= |T| for every block set T.
bool is_safe_by_span(const BitMatrix& vecs, const BlockLayout& layout);

// All deviolators of minimum size.
std::vector<BlockSet> minimum_deviolators(const BitMatrix& vecs, const BlockLayout& layout);

// All deviolators (2^n of them are tested).
std::vector<BlockSet> all_deviolators(const BitMatrix& vecs, const BlockLayout& layout);

bool is_acceptable(const BitMatrix& vecs, const BlockLayout& layout, const BlockSet& blocks);

// Lexicographically largest acceptable set by enumeration of all block sets.
BlockSet amortized_closure(const BitMatrix& vecs, const BlockLayout& layout);

// Sizes of all maximal acceptable sets.
std::vector<std::size_t> maximal_acceptable_sizes(const BitMatrix& vecs, const BlockLayout& layout);

}  // namespace plab::reference
