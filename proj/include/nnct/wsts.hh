#ifndef NNCT_WSTS_HH_
#define NNCT_WSTS_HH_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnct/net.hh"

namespace nnct {

/// Finite antichain of configurations denoting its upward closure.
struct Basis {
    std::vector<Configuration> elems; // sorted, pairwise incomparable

    bool is_antichain() const;
    bool member_up(const Configuration& s) const; // s in the upward closure?
};

/// The leq_config-minimal elements of `cands`; ties kept canonically
/// smallest, result sorted.
Basis minimize_basis(std::vector<Configuration> cands);

/// A finite basis of { s | exists rule r and s' with s ->_r s' >= t }.
std::vector<Configuration> pred_basis(const Net& net, const Configuration& t);

/// Predecessors through one specific rule, un-minimized candidates.
std::vector<Configuration> pred_candidates(const Net& net, const Configuration& t,
                                           const Rule& rule);

enum class QueryKind { coverability, termination, boundedness };

struct Query {
    Net net;
    Configuration initial;
    Configuration target; // ignored for termination/boundedness
    QueryKind kind = QueryKind::coverability;
    bool simple = false;
};

struct EngineOptions {
    std::uint64_t budget = 1'000'000; // expanded nodes / pred computations
    unsigned jobs = 1;
    /// Sets of simple places whose token sum is invariant along every run.
    /// Used by decide_coverability to prune basis elements that demand more
    /// than the initial configuration carries; each set is re-validated
    /// structurally (is_conserved_set) before it may prune anything.
    std::vector<std::vector<PlaceId>> conserved;
};

/// Is `set` structurally conserved (every rule balanced on it, no colour
/// ejects into it)? Required before a ConservedSum may prune.
bool is_conserved_set(const Net& net, const std::vector<PlaceId>& places);

struct WitnessStep {
    RuleId rule = 0;
    std::optional<ComplexToken> pick;
};

enum class Outcome { yes, no, budget };

struct CoverResult {
    Outcome outcome = Outcome::no;
    std::vector<WitnessStep> witness; // for yes: fire from initial, covers target
    std::uint64_t expanded = 0;
    std::size_t basis_size = 0;
};

/// Backward saturation from the upward closure of the target (FIFO over
/// basis elements, minimized after every merge), answering as soon as some
/// basis element lies below the initial configuration.
CoverResult decide_coverability(const Query& q, const EngineOptions& opts = {});

struct TermResult {
    Outcome outcome = Outcome::yes; // yes = terminating
    std::vector<WitnessStep> stem;  // for nonterminating: to the pumpable config
    std::vector<WitnessStep> pump;  // the pumped segment
    std::uint64_t expanded = 0;
};

/// Reachability tree with ancestor subsumption: an ancestor below the
/// current node witnesses an infinite run.
TermResult decide_termination(const Query& q, const EngineOptions& opts = {});

struct BoundResult {
    Outcome outcome = Outcome::yes; // yes = bounded
    std::uint64_t state_count = 0;  // for bounded: exact reachable-set size
    std::vector<WitnessStep> stem;  // for unbounded: strict pump witness
    std::vector<WitnessStep> pump;
    std::uint64_t expanded = 0;
};

/// Reachability tree pruning exact ancestor repeats; a strictly dominated
/// ancestor witnesses unboundedness (strictness of the WSTS).
BoundResult decide_boundedness(const Query& q, const EngineOptions& opts = {});

struct ReachSet {
    std::vector<Configuration> configs; // sorted
    bool truncated = false;
};

/// BFS over configurations whose simple counts, per-place token counts and
/// per-colour token contents all stay below norm_bound; truncated reports
/// whether the norm or step cap ever cut a successor.
ReachSet forward_reach_oracle(const Net& net, const Configuration& initial,
                              Nat norm_bound, std::uint64_t step_bound,
                              std::uint64_t state_cap = 1'000'000);

/// Replays a witness from `initial`; throws if a step is not enabled.
Configuration replay(const Net& net, const Configuration& initial,
                     const std::vector<WitnessStep>& steps);

} // namespace nnct

#endif
