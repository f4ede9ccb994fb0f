#pragma once

// CNF formulas with DIMACS-style literals: variable v (1-based) appears as
// +v or -v.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paritylab/f2.hpp"

namespace plab {

class CnfError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clause = std::vector<int>;

struct Cnf {
    std::size_t num_vars = 0;
    std::vector<Clause> clauses;

    // x is indexed by variable - 1.
    bool satisfied_by(const BitVec& x) const;
    bool clause_satisfied(std::size_t c, const BitVec& x) const;
    // A clause with no literal left open and none true under rho.
    bool falsified_by(std::size_t c, const PartialAssignment& rho) const;

    friend bool operator==(const Cnf&, const Cnf&) = default;
};

void write_dimacs(std::ostream& out, const Cnf& cnf, const std::vector<std::string>& comments = {});
void write_dimacs(const std::string& path, const Cnf& cnf, const std::vector<std::string>& comments = {});
std::string to_dimacs(const Cnf& cnf);
Cnf parse_dimacs(std::istream& in);
Cnf read_dimacs(const std::string& path);

inline constexpr std::size_t kBruteForceVarCap = 26;

// First satisfying assignment in increasing integer order (variable 1 is the
// low bit), searched exhaustively over `jobs` threads.
std::optional<BitVec> find_model(const Cnf& cnf, unsigned jobs = 1, std::size_t cap = kBruteForceVarCap);
bool brute_unsat(const Cnf& cnf, unsigned jobs = 1, std::size_t cap = kBruteForceVarCap);

}  // namespace plab
