#include "doctest.h"

#include <set>

#include "nnct/wsts.hh"
#include "nnct/yardstick.hh"
#include "support/machines.hh"

using namespace nnct;
using namespace nnct::testing;

namespace {

EngineOptions yard_opts(const Yardstick& y) {
    EngineOptions o;
    o.conserved.push_back(y.control_places);
    return o;
}

// Explores the net breadth-first up to caps; returns visited configs and a
// saturation flag.
std::pair<std::vector<Configuration>, bool> explore(const Net& net, const Configuration& init,
                                                    std::uint64_t cap) {
    std::set<Configuration> seen{init};
    std::vector<Configuration> frontier{init};
    bool complete = true;
    while (!frontier.empty()) {
        std::vector<Configuration> next;
        for (const Configuration& c : frontier)
            for (Configuration& s : successors(net, c)) {
                if (seen.size() >= cap) {
                    complete = false;
                    break;
                }
                if (seen.insert(s).second) next.push_back(std::move(s));
            }
        if (!complete) break;
        frontier = std::move(next);
    }
    return {{seen.begin(), seen.end()}, complete};
}

} // namespace

TEST_CASE("counter machine interpreter basics") {
    SUBCASE("halt at entry takes no steps") {
        MB b;
        b.halt("h");
        auto r = run_counter_machine(b.done(1, "h"), 100);
        CHECK(r.outcome == RunOutcome::halt);
        CHECK(r.steps == 0);
    }
    SUBCASE("inc at the bound sticks") {
        MB b;
        b.inc("a", 0, "b");
        b.inc("b", 0, "c");
        b.inc("c", 0, "d");
        b.halt("d");
        auto r = run_counter_machine(b.done(1, "a"), 100);
        CHECK(r.outcome == RunOutcome::stuck);
    }
    SUBCASE("a loop hits the cap") {
        MB b;
        b.inc("a", 0, "b");
        b.dec("b", 0, "a");
        CHECK(run_counter_machine(b.done(1, "a"), 64).outcome == RunOutcome::cap);
    }
    CHECK(counter_bound(1) == 2);
    CHECK(counter_bound(2) == 4);
    CHECK(counter_bound(3) == 16);
}

TEST_CASE("generated nets are total transfer with a control mutex") {
    MB b;
    b.inc("a", 0, "t");
    b.tz("t", 0, "z", "nz");
    b.halt("z");
    b.dec("nz", 0, "t");
    CounterMachine m = b.done(2, "a");
    Yardstick y = generate_yardstick(m);
    CHECK(y.net.is_total_transfer());
    CHECK(is_conserved_set(y.net, [&] {
        auto s = y.control_places;
        std::sort(s.begin(), s.end());
        return s;
    }()));
    CHECK(y.arrays.count(1) == 1);
    CHECK(y.has_disc);
}

TEST_CASE("yardstick coverability agrees with the interpreter at n=1") {
    for (const NamedMachine& nm : machine_suite(1)) {
        CAPTURE(nm.name);
        auto run = run_counter_machine(nm.m, 10000);
        Yardstick y = generate_yardstick(nm.m);
        Query q;
        q.net = y.net;
        q.initial = y.initial;
        q.target = y.halt_target;
        q.simple = true;
        auto res = decide_coverability(q, yard_opts(y));
        REQUIRE(res.outcome != Outcome::budget);
        CHECK((res.outcome == Outcome::yes) == (run.outcome == RunOutcome::halt));
        if (res.outcome == Outcome::yes) {
            Configuration end = replay(y.net, y.initial, res.witness);
            CHECK(leq_config(y.halt_target, end));
        }
    }
}

TEST_CASE("yardstick termination and boundedness agree with the interpreter at n=1") {
    for (const NamedMachine& nm : machine_suite(1)) {
        CAPTURE(nm.name);
        auto run = run_counter_machine(nm.m, 10000);
        bool machine_stops = run.outcome != RunOutcome::cap;
        Yardstick y = generate_yardstick(nm.m);
        Query q;
        q.net = y.net;
        q.initial = y.initial;
        q.kind = QueryKind::termination;
        auto term = decide_termination(q);
        REQUIRE(term.outcome != Outcome::budget);
        CHECK((term.outcome == Outcome::yes) == machine_stops);

        Query qb;
        qb.net = y.ticker_net;
        qb.initial = y.initial;
        qb.kind = QueryKind::boundedness;
        auto bound = decide_boundedness(qb);
        REQUIRE(bound.outcome != Outcome::budget);
        CHECK((bound.outcome == Outcome::yes) == machine_stops);
    }
}

TEST_CASE("checkpoint invariants hold along explored runs at n=2") {
    MB b;
    b.inc("a", 0, "b");
    b.inc("b", 0, "t");
    b.tz("t", 0, "z", "nz");
    b.dec("nz", 0, "t");
    b.halt("z");
    CounterMachine m = b.done(2, "a");
    Yardstick y = generate_yardstick(m);

    auto [configs, complete] = explore(y.net, y.initial, 400000);
    CHECK(complete);

    std::set<PlaceId> checkpoints;
    for (const auto& [l, p] : y.label_ctrl) checkpoints.insert(p);
    int seen_checkpoints = 0;
    for (const Configuration& c : configs) {
        bool at_checkpoint = false;
        for (PlaceId p : checkpoints)
            if (c.simple_count(p) > 0) at_checkpoint = true;
        if (!at_checkpoint) continue;
        ++seen_checkpoints;
        for (const auto& [name, k] : y.counters) {
            Nat bound = counter_bound(k.level);
            CHECK(checked_add(c.simple_count(k.pos), c.simple_count(k.neg)) == bound);
        }
        for (const auto& [lvl, a] : y.arrays) {
            const TokenBag* aux = c.bag(a.aux);
            CHECK((aux == nullptr || aux->is_empty()));
            // Exactly two tokens per index across the place pair.
            Nat bound = counter_bound(lvl);
            for (Nat idx = 0; idx <= bound; ++idx) {
                ComplexToken tok;
                tok.set(a.j, idx);
                tok.set(a.jbar, bound - idx);
                Nat have = 0;
                if (const TokenBag* t = c.bag(a.arr)) have += t->count(tok);
                if (const TokenBag* t = c.bag(a.arr_bar)) have += t->count(tok);
                CHECK(have == 2);
            }
        }
    }
    CHECK(seen_checkpoints > 0);
}

TEST_CASE("ismax-and-reset succeeds exactly at the bound") {
    SUBCASE("level 1, bound 2") {
        MacroHarness h = ismax_reset_harness(1);
        for (Nat v = 0; v <= 2; ++v) {
            auto [configs, complete] = explore(h.net, h.initial(v), 100000);
            REQUIRE(complete);
            bool done = false;
            for (const Configuration& c : configs)
                if (c.simple_count(h.done) > 0) done = true;
            CHECK(done == (v == 2));
        }
    }
    SUBCASE("level 2, bound 4") {
        MacroHarness h = ismax_reset_harness(2);
        for (Nat v = 0; v <= 4; ++v) {
            CAPTURE(v);
            auto [configs, complete] = explore(h.net, h.initial(v), 2000000);
            REQUIRE(complete);
            bool done = false;
            for (const Configuration& c : configs)
                if (c.simple_count(h.done) > 0) done = true;
            CHECK(done == (v == 4));
        }
    }
}

TEST_CASE("a small n=2 machine round-trips through the decider") {
    MB b;
    b.inc("a", 0, "h");
    b.halt("h");
    CounterMachine m = b.done(2, "a");
    auto run = run_counter_machine(m, 1000);
    REQUIRE(run.outcome == RunOutcome::halt);
    Yardstick y = generate_yardstick(m);
    Query q;
    q.net = y.net;
    q.initial = y.initial;
    q.target = y.halt_target;
    auto res = decide_coverability(q, yard_opts(y));
    REQUIRE(res.outcome == Outcome::yes);
    Configuration end = replay(y.net, y.initial, res.witness);
    CHECK(leq_config(y.halt_target, end));
}

TEST_CASE("the tower cap is enforced") {
    MB b;
    b.halt("h");
    CounterMachine m = b.done(4, "h");
    CHECK_THROWS_AS(generate_yardstick(m), std::invalid_argument);
}
