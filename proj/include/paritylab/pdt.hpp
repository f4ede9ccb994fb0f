#pragma once

// Parity decision trees, block completion, the coin game and the hardness
// experiment harness.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paritylab/blocks.hpp"
#include "paritylab/gadget.hpp"
#include "paritylab/rational.hpp"
#include "paritylab/tseitin.hpp"

namespace plab {

class PdtError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PdtNode {
    bool leaf = true;
    BitVec form;
    std::size_t child[2] = {0, 0};
};

// Node 0 is the root. Children may be shared.
class Pdt {
public:
    explicit Pdt(std::size_t width = 0);

    std::size_t width() const { return width_; }
    std::size_t size() const { return nodes_.size(); }
    const PdtNode& node(std::size_t i) const { return nodes_.at(i); }

    std::size_t add_leaf();
    std::size_t add_query(BitVec form, std::size_t child0, std::size_t child1);
    // Rewrites an existing node in place.
    void set_query(std::size_t id, BitVec form, std::size_t child0, std::size_t child1);

    // Longest root-to-leaf query count.
    std::size_t depth() const;

    // Preorder listing: "q <form-bits>" followed by the 0-subtree and the
    // 1-subtree, or "l" for a leaf.
    static Pdt parse(std::istream& in, std::size_t width);
    static Pdt read(const std::string& path, std::size_t width);
    void write(std::ostream& out) const;

private:
    std::size_t width_;
    std::vector<PdtNode> nodes_;
};

struct PdtRun {
    std::size_t node = 0;  // node reached
    AffineSpace space;     // points answering the same queries as x
    std::vector<BitVec> forms;
    std::vector<bool> answers;
};

// Follows x for at most `steps` queries (all when nullopt).
PdtRun run_pdt(const Pdt& t, const BitVec& x, std::optional<std::size_t> steps = std::nullopt);

// Online block completion: before each original query l, reads every
// coordinate of the blocks that l would add to the closure, then l itself.
// Coordinate reads and queries whose answer is already implied are skipped.
class BlockCompleter {
public:
    BlockCompleter(const AffineSpace& start, const BlockLayout& layout);

    const AffineSpace& space() const { return space_; }
    const BlockSet& closed() const { return closed_; }
    std::size_t start_amortized() const { return start_amortized_; }
    std::size_t original_queries() const { return original_queries_; }
    std::size_t coordinate_reads() const { return coordinate_reads_; }

    // Blocks closed before any original query (the closure of the start space).
    // The caller reads them through `answer` during construction if needed.
    BlockSet initial_stage(const std::function<bool(const BitVec&)>& answer);

    // Returns the blocks newly closed by this stage; `answer` supplies the
    // response to each issued form.
    BlockSet query(const BitVec& form, const std::function<bool(const BitVec&)>& answer);

private:
    void ask(const BitVec& form, const std::function<bool(const BitVec&)>& answer, bool coordinate);

    BlockLayout layout_;
    AffineSpace space_;
    BlockSet closed_;
    std::size_t start_amortized_ = 0;
    std::size_t original_queries_ = 0;
    std::size_t coordinate_reads_ = 0;
};

// Explicit block-completed tree T' of t started from space a. Throws
// PdtError when more than node_cap nodes would be created or when the block
// count exceeds |Cl^(a)| plus the queries made so far.
Pdt block_complete(const Pdt& t, const AffineSpace& a, const BlockLayout& layout, std::size_t node_cap = 1u << 20);

// ---------------------------------------------------------------------------
// Coin game on the odd component of a Tseitin instance.

enum class GameOutcome { Win, Lose, ExhaustedQueries };
std::string to_string(GameOutcome o);

struct GameStep {
    std::vector<std::size_t> edges;  // revealed in this step
    std::size_t odd_before = 0;
    std::size_t odd_after = 0;
    std::size_t large_part = 0;  // |C~1| when the component split, else odd_before
    std::size_t paid = 0;
    bool split = false;
    bool win = false;
};

struct GameTranscript {
    std::vector<GameStep> steps;
    Rational budget;
    std::size_t paid_total = 0;
    std::size_t win_shrink = 0;
    std::size_t initial_odd = 0;
    std::size_t final_odd = 0;
    GameOutcome outcome = GameOutcome::ExhaustedQueries;

    // initial_odd - final_odd = total payments + shrinkage at the winning step
    bool identity_holds() const { return initial_odd - final_odd == paid_total + win_shrink; }
};

// Plays the game along a sequence of reveal steps. The root is the vertex
// violated by the hidden assignment; when the odd component splits, the large
// part is the biggest piece (ties to the piece with the smallest vertex). A
// root outside the large part wins; otherwise the tree pays the shrinkage,
// and loses once a payment exceeds the remaining coins.
class CoinGame {
public:
    CoinGame(const Graph& g, const Charge& charge, const PartialAssignment& rho, std::size_t root, Rational budget);

    bool over() const { return over_; }
    const PartialAssignment& revealed() const { return rho_; }
    const std::vector<std::size_t>& odd_component() const { return odd_; }
    // Reveals edges (edge, value); ignored for scoring once the game is over.
    void step(const std::vector<std::pair<std::size_t, bool>>& reveals);
    GameTranscript finish() const;

private:
    const Graph* g_;
    Charge charge_;
    PartialAssignment rho_;
    std::size_t root_;
    std::vector<std::size_t> odd_;
    GameTranscript t_;
    Rational remaining_;
    bool over_ = false;
};

// ---------------------------------------------------------------------------
// Ordinary decision trees over edges (unlifted) and parity trees over lifted
// coordinates. Trees are adaptive strategies; each family is a deterministic
// function of its seed and the answers seen so far, i.e. a fixed tree.

class EdgeTree {
public:
    virtual ~EdgeTree() = default;
    // Next edge to query given the revealed assignment, or nullopt to stop.
    virtual std::optional<std::size_t> next(const Graph& g, const Charge& charge, const PartialAssignment& revealed,
                                            const std::vector<std::pair<std::size_t, bool>>& history,
                                            std::size_t remaining) = 0;
    virtual std::string name() const = 0;
};

// Queries nothing.
std::unique_ptr<EdgeTree> make_empty_edge_tree();
// Splits the odd component as evenly as the remaining queries allow: picks a
// vertex set X inside it (single vertices and BFS balls) whose free boundary
// fits in the remaining budget, maximizing min(|X|, |C|-|X|), and queries the
// lowest-index boundary edge. Falls back to the smallest boundary.
std::unique_ptr<EdgeTree> make_greedy_cut_tree();
// A uniformly random unrevealed edge at every node, seeded per node.
std::unique_ptr<EdgeTree> make_random_edge_tree(std::uint64_t seed);
// Fixed edge list, skipping revealed edges.
std::unique_ptr<EdgeTree> make_scripted_edge_tree(std::vector<std::size_t> edges);

class ParityTree {
public:
    virtual ~ParityTree() = default;
    virtual std::optional<BitVec> next(const std::vector<BitVec>& forms, const std::vector<bool>& answers) = 0;
    virtual std::string name() const = 0;
};

// Random forms supported on 1..max_blocks random blocks.
std::unique_ptr<ParityTree> make_random_parity_tree(const BlockLayout& layout, std::uint64_t seed,
                                                    std::size_t max_blocks = 3);
// A random single coordinate at every node.
std::unique_ptr<ParityTree> make_coordinate_tree(const BlockLayout& layout, std::uint64_t seed);
// Walks an explicit Pdt.
std::unique_ptr<ParityTree> make_scripted_parity_tree(Pdt t);

// ---------------------------------------------------------------------------
// Hardness experiment.

struct WilsonInterval {
    double low = 0, high = 0;
};
// 95% Wilson score interval.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct HardnessConfig {
    Graph graph;
    Charge charge;
    PartialAssignment start;   // valid partial assignment rho_0
    std::size_t queries = 0;   // q
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Rational budget;           // coin budget
    unsigned jobs = 1;
    std::string family;        // for the report
    // Builds a fresh tree per worker.
    std::function<std::unique_ptr<EdgeTree>()> edge_tree;
    std::function<std::unique_ptr<ParityTree>()> parity_tree;
    std::optional<Gadget> gadget;  // set for the lifted variant
};

struct TrialRecord {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t root = 0;
    std::size_t queries = 0;         // original queries issued
    std::size_t revealed_edges = 0;  // edges fixed at the end, including rho_0
    std::size_t closed_blocks = 0;   // lifted: fully read blocks
    std::size_t final_odd = 0;
    bool in_family = false;          // final revealed assignment is valid
    GameOutcome outcome = GameOutcome::ExhaustedQueries;
    std::size_t paid = 0;
    bool identity_ok = false;
    bool coin_bound_ok = false;
    bool block_cap_ok = true;
};

struct HardnessReport {
    std::string family;
    bool lifted = false;
    std::size_t vertices = 0, edges = 0, degree = 0, queries = 0, block_bits = 0;
    std::uint64_t trials = 0, seed = 0, successes = 0;
    WilsonInterval interval;
    double lambda2 = 0, edge_expansion = 0;  // h = (d - lambda2)/2
    Rational budget;
    std::uint64_t wins = 0, losses = 0, exhausted = 0;
    std::uint64_t identity_failures = 0, coin_bound_failures = 0, block_cap_failures = 0;
    std::size_t max_paid = 0;
    std::vector<TrialRecord> records;

    bool accounting_ok() const { return identity_failures == 0 && coin_bound_failures == 0 && block_cap_failures == 0; }
};

HardnessReport hardness_experiment(const HardnessConfig& config);

void write_trials_csv(std::ostream& out, const HardnessReport& r);
void write_summary(std::ostream& out, const HardnessReport& r, bool csv);

}  // namespace plab
