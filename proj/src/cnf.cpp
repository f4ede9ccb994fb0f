#include "paritylab/cnf.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace plab {

namespace {

int var_of(int lit) { return lit < 0 ? -lit : lit; }

void check_literal(const Cnf& cnf, int lit) {
    if (lit == 0 || static_cast<std::size_t>(var_of(lit)) > cnf.num_vars)
        throw CnfError("literal " + std::to_string(lit) + " out of range");
}

}  // namespace

bool Cnf::clause_satisfied(std::size_t c, const BitVec& x) const {
    for (int lit : clauses.at(c))
        if (x.get(static_cast<std::size_t>(var_of(lit) - 1)) == (lit > 0)) return true;
    return false;
}

bool Cnf::satisfied_by(const BitVec& x) const {
    if (x.width() != num_vars) throw CnfError("assignment width does not match variable count");
    for (std::size_t c = 0; c < clauses.size(); ++c)
        if (!clause_satisfied(c, x)) return false;
    return true;
}

bool Cnf::falsified_by(std::size_t c, const PartialAssignment& rho) const {
    for (int lit : clauses.at(c)) {
        const auto v = static_cast<std::size_t>(var_of(lit) - 1);
        if (!rho.is_fixed(v) || rho.value(v) == (lit > 0)) return false;
    }
    return true;
}

void write_dimacs(std::ostream& out, const Cnf& cnf, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "c " << c << '\n';
    out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
    for (const auto& clause : cnf.clauses) {
        for (int lit : clause) {
            check_literal(cnf, lit);
            out << lit << ' ';
        }
        out << "0\n";
    }
}

void write_dimacs(const std::string& path, const Cnf& cnf, const std::vector<std::string>& comments) {
    std::ofstream f(path);
    if (!f) throw CnfError("cannot open " + path + " for writing");
    write_dimacs(f, cnf, comments);
    if (!f) throw CnfError("write to " + path + " failed");
}

std::string to_dimacs(const Cnf& cnf) {
    std::ostringstream s;
    write_dimacs(s, cnf);
    return s.str();
}

Cnf parse_dimacs(std::istream& in) {
    Cnf cnf;
    bool header = false;
    std::size_t expected = 0;
    std::string line;
    Clause current;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%") continue;
        if (first == "p") {
            std::string kind;
            if (header || !(ls >> kind >> cnf.num_vars >> expected) || kind != "cnf")
                throw CnfError("line " + std::to_string(lineno) + ": malformed problem line");
            header = true;
            continue;
        }
        if (!header) throw CnfError("line " + std::to_string(lineno) + ": clause before problem line");
        std::istringstream all(line);
        long lit;
        while (all >> lit) {
            if (lit == 0) {
                cnf.clauses.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(static_cast<int>(lit));
                check_literal(cnf, static_cast<int>(lit));
            }
        }
        if (!all.eof()) throw CnfError("line " + std::to_string(lineno) + ": bad literal");
    }
    if (!header) throw CnfError("missing problem line");
    if (!current.empty()) throw CnfError("last clause is not terminated by 0");
    if (cnf.clauses.size() != expected)
        throw CnfError("header announces " + std::to_string(expected) + " clauses, found " +
                       std::to_string(cnf.clauses.size()));
    return cnf;
}

Cnf read_dimacs(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CnfError("cannot open " + path);
    return parse_dimacs(f);
}

std::optional<BitVec> find_model(const Cnf& cnf, unsigned jobs, std::size_t cap) {
    if (cnf.num_vars > cap || cnf.num_vars > 62)
        throw CnfError("brute-force cap exceeded: " + std::to_string(cnf.num_vars) + " variables");
    struct Mask {
        std::uint64_t pos = 0, neg = 0;
    };
    std::vector<Mask> masks;
    for (const auto& clause : cnf.clauses) {
        Mask m;
        for (int lit : clause) {
            check_literal(cnf, lit);
            const std::uint64_t bit = std::uint64_t{1} << (var_of(lit) - 1);
            (lit > 0 ? m.pos : m.neg) |= bit;
        }
        masks.push_back(m);
    }
    const std::uint64_t total = std::uint64_t{1} << cnf.num_vars;
    auto sat = [&](std::uint64_t x) {
        for (const auto& m : masks)
            if (!((x & m.pos) | (~x & m.neg))) return false;
        return true;
    };
    jobs = std::max(1u, jobs);
    std::atomic<std::uint64_t> best{total};
    auto worker = [&](unsigned w) {
        for (std::uint64_t x = w; x < total; x += jobs) {
            if (x >= best.load(std::memory_order_relaxed)) return;
            if (sat(x)) {
                std::uint64_t cur = best.load();
                while (x < cur && !best.compare_exchange_weak(cur, x)) {
                }
                return;
            }
        }
    };
    if (jobs == 1 || total < 4096) {
        worker(0);
        if (jobs != 1)
            for (unsigned w = 1; w < jobs; ++w) worker(w);
    } else {
        std::vector<std::thread> ts;
        for (unsigned w = 0; w < jobs; ++w) ts.emplace_back(worker, w);
        for (auto& t : ts) t.join();
    }
    if (best.load() == total) return std::nullopt;
    return BitVec::from_word(cnf.num_vars, best.load());
}

bool brute_unsat(const Cnf& cnf, unsigned jobs, std::size_t cap) { return !find_model(cnf, jobs, cap).has_value(); }

}  // namespace plab
