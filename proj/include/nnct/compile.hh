#ifndef NNCT_COMPILE_HH_
#define NNCT_COMPILE_HH_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nnct/grammar.hh"
#include "nnct/net.hh"

namespace nnct {

/// Where a generated place came from; tests key on these tags.
enum class PlaceRole {
    channel,      // one per (channel, message)
    spawn,        // pending weak spawns of one nonterminal
    ccfg_nt,      // widget counter of one nonterminal
    ccfg_budget,  // widget budget
    mode_sim,
    mode_ccfg,
    mode_ccfg_plus,
    mode_query,
    cover,        // one per cover-target index
    process,      // complex place encoding a head/character sequence
    widget,       // complex place of an active widget run
    control,      // yardstick control flow
    counter,      // yardstick counter place
    counter_bar,  // its complement
    array,        // yardstick array place
    array_bar,
    array_aux,
    sink,
    ticker,
};

struct PlaceInfo {
    PlaceRole role;
    std::string detail;
};

struct SizeStats {
    std::uint64_t simple_places = 0;
    std::uint64_t complex_places = 0; // materialized (reachable) count
    std::uint64_t complex_places_full = 0; // the unpruned family size
    std::uint64_t colours = 0;
    std::uint64_t rules = 0;
};

struct CompiledNet {
    Net net;
    Configuration initial;
    Configuration target;
    std::map<PlaceId, PlaceInfo> simple_roles;
    std::map<PlaceId, PlaceInfo> complex_roles;
    SizeStats stats;

    /// Conserved simple-place sets of the construction (the mode token),
    /// usable as pruning hints for the backward decider.
    std::vector<std::vector<PlaceId>> conserved_hints() const;
};

/// The simulation of a K-shaped grammar by a net with nested coloured
/// tokens: processes become complex tokens whose place encodes the head and
/// the pivot/character sequence, summaries become coloured tokens indexed by
/// level, and the commutative precomputation runs through a budgeted widget.
/// Places are materialized on demand (reachable from the query widgets and
/// the initial representation); the full family sizes land in the stats.
CompiledNet compile_apcps_to_nnct(const Apcps& g, unsigned K, const SimpleQuery& query);

} // namespace nnct

#endif
