#ifndef NNCT_YARDSTICK_HH_
#define NNCT_YARDSTICK_HH_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nnct/common.hh"
#include "nnct/net.hh"

namespace nnct {

/// A deterministic two-counter machine with tet(n)-bounded counters.
struct CounterMachine {
    struct Instr {
        enum class Op { inc, dec, tz, reset, halt } op = Op::halt;
        unsigned counter = 0;  // 0 = x, 1 = y
        std::uint32_t go1 = 0; // continuation; the zero branch for tz
        std::uint32_t go2 = 0; // the nonzero branch for tz
    };
    unsigned n = 1;
    std::vector<std::string> labels;
    std::vector<Instr> instrs; // one per label
    std::uint32_t entry = 0;
};

std::vector<Diagnostic> validate_machine(const CounterMachine& m);

/// tet(n) for the small n the yardstick supports.
Nat counter_bound(unsigned n);

enum class RunOutcome { halt, stuck, cap };
struct RunResult {
    RunOutcome outcome = RunOutcome::halt;
    std::uint64_t steps = 0;
};

/// Direct interpretation with counters clamped to [0, tet(n)]: incrementing
/// at the bound or decrementing at zero blocks, like the net simulation.
RunResult run_counter_machine(const CounterMachine& m, std::uint64_t step_cap);

/// Generated total-transfer net plus its three queries and provenance.
struct Yardstick {
    Net net;
    Net ticker_net; // every rule also bumps a dedicated place
    PlaceId ticker = 0;
    Configuration initial;     // valid for both nets
    Configuration halt_target; // cover query target
    std::vector<PlaceId> control_places; // one-token mutex over the base net
    std::map<std::string, PlaceId> label_ctrl;
    struct CounterPlaces {
        PlaceId pos = 0, neg = 0;
        unsigned level = 1;
    };
    std::map<std::string, CounterPlaces> counters; // x, y, s1, p1, pp1, c1, cc1, ...
    struct ArrayPlaces {
        PlaceId arr = 0, arr_bar = 0, aux = 0;
        ColourId j = 0, jbar = 0;
        unsigned level = 1;
    };
    std::map<unsigned, ArrayPlaces> arrays;
    PlaceId disc = 0;
    bool has_disc = false;
};

struct YardstickOptions {
    unsigned max_n = 3;
};

/// Compiles the machine into a total-transfer net that weakly bisimulates
/// it: counters as complementary place pairs, arrays as populations of
/// coloured tokens, macros as shared control-chain subroutines.
Yardstick generate_yardstick(const CounterMachine& m, const YardstickOptions& opts = {});

/// A standalone driver for one macro: run it from configurable counter
/// values and observe whether the done place is reachable.
struct MacroHarness {
    Net net;
    PlaceId start = 0, done = 0;
    std::vector<PlaceId> control_places;
    /// Initial configuration probing s_level = value.
    std::function<Configuration(Nat)> initial;
};

/// Probes ismax-and-reset of s_level (level >= 1).
MacroHarness ismax_reset_harness(unsigned level);

} // namespace nnct

#endif
