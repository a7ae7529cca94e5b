#include "doctest.h"

#include <random>

#include "nnct/grammar.hh"

using namespace nnct;

namespace {

// A small fixture: A receives, B sends, C pumps sends, D is unproductive.
struct Fix {
    Apcps g;
    std::uint32_t A, B, C, D;
    std::uint32_t ch, ok;
    std::uint32_t t_send, t_recv;
};

Fix make_fix() {
    Fix f;
    f.A = f.g.add_nt("A");
    f.B = f.g.add_nt("B");
    f.C = f.g.add_nt("C");
    f.D = f.g.add_nt("D");
    f.ch = f.g.add_channel("c");
    f.ok = f.g.add_message("m");
    f.t_send = f.g.add_terminal({Terminal::Kind::send, f.ch, f.ok, 0});
    f.t_recv = f.g.add_terminal({Terminal::Kind::recv, f.ch, f.ok, 0});
    f.g.rules.push_back({f.A, ApcpsRule::Kind::terminal, 0, 0, f.t_recv});
    f.g.rules.push_back({f.B, ApcpsRule::Kind::terminal, 0, 0, f.t_send});
    f.g.rules.push_back({f.C, ApcpsRule::Kind::terminal, 0, 0, f.t_send});
    f.g.rules.push_back({f.C, ApcpsRule::Kind::eps, 0, 0, 0});
    f.g.rules.push_back({f.D, ApcpsRule::Kind::pair, f.D, f.D, 0}); // only rule: D -> D D
    classify_commutative(f.g);
    return f;
}

Summary summary_of(std::initializer_list<std::pair<Sym, Nat>> items) {
    Summary s;
    for (auto [x, n] : items) s.add(x, n);
    return s;
}

} // namespace

TEST_CASE("commutativity classification") {
    Fix f = make_fix();
    CHECK(f.g.nt_commutative[f.B]);        // sends only
    CHECK(f.g.nt_commutative[f.C]);        // sends or nothing
    CHECK_FALSE(f.g.nt_commutative[f.A]);  // receive
    CHECK_FALSE(f.g.nt_commutative[f.D]);  // unproductive
    CHECK_FALSE(f.g.productive[f.D]);

    SUBCASE("the result is a fixpoint") {
        // Re-running the removal pass changes nothing.
        Apcps g2 = f.g;
        classify_commutative(g2);
        CHECK(g2.nt_commutative == f.g.nt_commutative);
        // Every member is productive and mentions no receive.
        for (std::uint32_t n = 0; n < g2.n_nts(); ++n) {
            if (!g2.nt_commutative[n]) continue;
            CHECK(g2.productive[n]);
            for (const ApcpsRule& r : g2.rules) {
                if (r.lhs != n) continue;
                if (r.kind == ApcpsRule::Kind::terminal)
                    CHECK(g2.term_commutative(r.term));
                if (r.kind == ApcpsRule::Kind::pair) {
                    CHECK(g2.nt_commutative[r.y]);
                    CHECK(g2.nt_commutative[r.z]);
                }
            }
        }
    }
}

TEST_CASE("canonical words sort commutative runs around pivots") {
    Fix f = make_fix();
    Sym a = f.g.sym_of_nt(f.A), b = f.g.sym_of_nt(f.B), c = f.g.sym_of_nt(f.C);
    StdProcess p = canonical_word(f.g, {c, b, a, c, b});
    // a is the only pivot; both runs sort.
    CHECK(p.word == std::vector<Sym>{b, c, a, b, c});
}

TEST_CASE("standard steps") {
    Fix f = make_fix();
    SUBCASE("receive blocks on an empty channel") {
        StdConfig cfg;
        cfg.add_proc(canonical_word(f.g, {f.g.sym_of_term(f.t_recv)}));
        CHECK(step_standard(f.g, cfg).empty());
    }
    SUBCASE("receive consumes a message") {
        StdConfig cfg;
        cfg.add_proc(canonical_word(f.g, {f.g.sym_of_term(f.t_recv)}));
        cfg.chans.add(f.ch, f.ok, 1);
        auto next = step_standard(f.g, cfg);
        REQUIRE(next.size() == 1);
        CHECK(next[0].procs.empty());
        CHECK(next[0].chans.count(f.ch, f.ok) == 0);
    }
    SUBCASE("spawn forks a new process") {
        Apcps g = f.g;
        std::uint32_t t_spawn = g.add_terminal({Terminal::Kind::spawn, 0, 0, f.B});
        classify_commutative(g);
        StdConfig cfg;
        cfg.add_proc(canonical_word(g, {g.sym_of_term(t_spawn), g.sym_of_nt(f.A)}));
        // Two heads: the spawn itself, and A bubbling past it.
        auto next = step_standard(g, cfg);
        bool forked = false;
        for (const auto& n : next)
            if (n.procs.size() == 2) forked = true;
        CHECK(forked);
    }
    SUBCASE("a send buried under a commutative prefix may fire") {
        StdConfig cfg;
        // word: C (send) with C commutative in front.
        cfg.add_proc(canonical_word(
            f.g, {f.g.sym_of_nt(f.C), f.g.sym_of_term(f.t_send)}));
        auto next = step_standard(f.g, cfg);
        bool sent = false;
        for (const auto& n : next)
            if (n.chans.count(f.ch, f.ok) == 1) sent = true;
        CHECK(sent);
    }
}

TEST_CASE("standard stepping respects the commutation congruence") {
    Fix f = make_fix();
    std::mt19937 rng(71);
    Sym syms[] = {f.g.sym_of_nt(f.A), f.g.sym_of_nt(f.B), f.g.sym_of_nt(f.C),
                  f.g.sym_of_term(f.t_send)};
    for (int it = 0; it < 200; ++it) {
        std::vector<Sym> w;
        std::uint32_t len = rng() % 5;
        for (std::uint32_t k = 0; k < len; ++k) w.push_back(syms[rng() % 4]);
        // Build an equivalent representative by random adjacent swaps of
        // independent symbols.
        std::vector<Sym> w2 = w;
        for (int s = 0; s < 6 && w2.size() >= 2; ++s) {
            std::size_t i = rng() % (w2.size() - 1);
            Sym x = w2[i], y = w2[i + 1];
            if (x != y && f.g.sym_commutative(x) && f.g.sym_commutative(y))
                std::swap(w2[i], w2[i + 1]);
        }
        CHECK(canonical_word(f.g, w) == canonical_word(f.g, w2));
        StdConfig c1, c2;
        c1.add_proc(canonical_word(f.g, w));
        c2.add_proc(canonical_word(f.g, w2));
        CHECK(step_standard(f.g, c1) == step_standard(f.g, c2));
    }
}

TEST_CASE("parikh enumeration") {
    SUBCASE("C -> eps only") {
        Apcps g;
        std::uint32_t C = g.add_nt("C");
        g.rules.push_back({C, ApcpsRule::Kind::eps, 0, 0, 0});
        classify_commutative(g);
        auto r = enum_parikh(g, C, 4);
        CHECK_FALSE(r.truncated);
        CHECK(r.images == std::vector<Summary>{Summary{}});
    }
    SUBCASE("C -> c!m | eps") {
        Fix f = make_fix();
        auto r = enum_parikh(f.g, f.C, 1);
        CHECK_FALSE(r.truncated);
        REQUIRE(r.images.size() == 2);
        CHECK(r.images[0] == Summary{});
        CHECK(r.images[1] == summary_of({{f.g.sym_of_term(f.t_send), 1}}));
    }
    SUBCASE("a pumping C truncates at the budget") {
        Apcps g;
        std::uint32_t C = g.add_nt("C");
        std::uint32_t ch = g.add_channel("c");
        std::uint32_t m = g.add_message("m");
        std::uint32_t t = g.add_terminal({Terminal::Kind::send, ch, m, 0});
        // C -> c!m C | eps
        std::uint32_t C2 = g.add_nt("C2"); // helper for the pair shape
        g.rules.push_back({C, ApcpsRule::Kind::pair, C2, C, 0});
        g.rules.push_back({C, ApcpsRule::Kind::eps, 0, 0, 0});
        g.rules.push_back({C2, ApcpsRule::Kind::terminal, 0, 0, t});
        classify_commutative(g);
        REQUIRE(g.nt_commutative[C]);
        // Each send costs two derivation steps in the two-shape encoding of
        // C -> c!m C, so budget 6 reaches three sends and no more.
        auto r = enum_parikh(g, C, 6);
        CHECK(r.truncated);
        Sym s = g.sym_of_term(t);
        auto has = [&](const Summary& x) {
            return std::find(r.images.begin(), r.images.end(), x) != r.images.end();
        };
        CHECK(has(Summary{}));
        CHECK(has(summary_of({{s, 1}})));
        CHECK(has(summary_of({{s, 2}})));
        CHECK(has(summary_of({{s, 3}})));
        CHECK_FALSE(has(summary_of({{s, 4}})));
    }
    SUBCASE("receives are rejected") {
        Fix f = make_fix();
        CHECK_THROWS_AS(enum_parikh(f.g, f.A, 3), std::invalid_argument);
    }
}

TEST_CASE("alternative steps") {
    Fix f = make_fix();
    SUBCASE("a send at the head feeds the channel") {
        AltConfig cfg;
        AltProcess p;
        p.head = f.g.sym_of_term(f.t_send);
        cfg.add_proc(p);
        auto r = step_alternative(f.g, cfg, 8);
        REQUIRE(r.next.size() == 1);
        CHECK(r.next[0].chans.count(f.ch, f.ok) == 1);
    }
    SUBCASE("a terminal-only summary dispatches spawns and pops the pivot") {
        Apcps g = f.g;
        std::uint32_t t_spawn = g.add_terminal({Terminal::Kind::spawn, 0, 0, f.B});
        classify_commutative(g);
        AltConfig cfg;
        AltProcess p;
        p.head = std::nullopt;
        p.top.add(g.sym_of_term(t_spawn), 1);
        p.tail.push_back({g.sym_of_nt(f.A), Summary{}});
        cfg.add_proc(p);
        auto r = step_alternative(g, cfg, 8);
        bool dispatched = false;
        for (const AltConfig& n : r.next) {
            // Expect: spawned B process plus the popped continuation A.
            bool has_b = false, has_a = false;
            for (const auto& [proc, cnt] : n.procs) {
                if (proc.head == g.sym_of_nt(f.B)) has_b = true;
                if (proc.head == g.sym_of_nt(f.A)) has_a = true;
            }
            if (has_b && has_a) dispatched = true;
        }
        CHECK(dispatched);
    }
    SUBCASE("a dagger rule inserts the precomputed image") {
        // A2 -> B C with C commutative, C -> c!m | eps.
        Apcps g = f.g;
        std::uint32_t A2 = g.add_nt("A2");
        g.rules.push_back({A2, ApcpsRule::Kind::pair, f.B, f.C, 0});
        classify_commutative(g);
        REQUIRE(g.rule_dagger.back());
        AltConfig cfg;
        AltProcess p;
        p.head = g.sym_of_nt(A2);
        cfg.add_proc(p);
        auto r = step_alternative(g, cfg, 8);
        CHECK_FALSE(r.truncated);
        bool gained = false;
        for (const AltConfig& n : r.next)
            for (const auto& [proc, cnt] : n.procs)
                if (proc.head == g.sym_of_nt(f.B) &&
                    proc.top.count(g.sym_of_term(f.t_send)) == 1)
                    gained = true;
        CHECK(gained);
    }
}

TEST_CASE("k-shape checks") {
    Fix f = make_fix();
    SUBCASE("the empty process is K-shaped for every K") {
        AltProcess p;
        CHECK(check_k_shape(f.g, p, 0));
        CHECK(check_k_shape(f.g, p, 3));
    }
    SUBCASE("two pivots make a 2-shaped process") {
        AltProcess p;
        p.head = f.g.sym_of_nt(f.B);
        p.tail.push_back({f.g.sym_of_nt(f.A), Summary{}});
        p.tail.push_back({f.g.sym_of_nt(f.A), Summary{}});
        CHECK(check_k_shape(f.g, p, 2));
        CHECK_FALSE(check_k_shape(f.g, p, 1));
    }
    SUBCASE("standard words count pivots behind the head") {
        Sym a = f.g.sym_of_nt(f.A), b = f.g.sym_of_nt(f.B);
        CHECK(shape_degree(f.g, canonical_word(f.g, {a, b})) == 0);
        StdProcess p{{a, a, b}}; // head a, one pivot a in the body
        CHECK(shape_degree(f.g, p) == 1);
    }
}

TEST_CASE("simple covers") {
    Fix f = make_fix();
    Sym a = f.g.sym_of_nt(f.A), b = f.g.sym_of_nt(f.B), c = f.g.sym_of_nt(f.C);
    SUBCASE("standard words") {
        CHECK(covers_nt(f.g, StdProcess{{a, b}}, f.A));       // head
        CHECK(covers_nt(f.g, StdProcess{{c, b}}, f.B));       // commutes forward
        CHECK_FALSE(covers_nt(f.g, StdProcess{{a, b}}, f.B)); // stuck behind a receive
        CHECK_FALSE(covers_nt(f.g, StdProcess{{c}}, f.B));
    }
    SUBCASE("alternative processes") {
        AltProcess p;
        p.head = std::nullopt;
        p.top.add(b, 1);
        CHECK(covers_nt(f.g, p, f.B)); // exposed in the top summary
        p.head = a;
        CHECK_FALSE(covers_nt(f.g, p, f.B)); // the receive head blocks it
        AltProcess pivot;
        pivot.tail.push_back({a, Summary{}});
        CHECK(covers_nt(f.g, pivot, f.A)); // first pivot over an empty prefix
        pivot.top.add(b, 1);
        CHECK_FALSE(covers_nt(f.g, pivot, f.A));
    }
}

TEST_CASE("standard and alternative semantics agree on simple coverability") {
    // Server-style grammar: S -> A B with B commutative; shapes stay small
    // and the reachable spaces are finite.
    Apcps g;
    std::uint32_t S = g.add_nt("S");
    std::uint32_t A = g.add_nt("A");
    std::uint32_t B = g.add_nt("B");
    std::uint32_t W = g.add_nt("W");
    std::uint32_t ch = g.add_channel("c");
    std::uint32_t m = g.add_message("m");
    std::uint32_t tsend = g.add_terminal({Terminal::Kind::send, ch, m, 0});
    std::uint32_t trecv = g.add_terminal({Terminal::Kind::recv, ch, m, 0});
    g.rules.push_back({S, ApcpsRule::Kind::pair, A, B, 0});
    g.rules.push_back({A, ApcpsRule::Kind::terminal, 0, 0, trecv});
    g.rules.push_back({B, ApcpsRule::Kind::terminal, 0, 0, tsend});
    g.rules.push_back({B, ApcpsRule::Kind::eps, 0, 0, 0});
    g.rules.push_back({W, ApcpsRule::Kind::pair, A, A, 0});
    classify_commutative(g);
    REQUIRE(g.nt_commutative[B]);

    for (std::uint32_t target : {S, A, B, W}) {
        SimpleQuery q;
        q.init_procs = {S, S};
        q.cover_procs = {target};
        auto std_r = explore_standard(g, q);
        auto alt_r = explore_alternative(g, q);
        REQUIRE_FALSE(std_r.truncated);
        REQUIRE_FALSE(alt_r.truncated);
        CHECK(std_r.covered == alt_r.covered);
    }
    // Channel-content targets as well.
    SimpleQuery q;
    q.init_procs = {S};
    q.cover_chans.add(ch, m, 1);
    auto std_r = explore_standard(g, q);
    auto alt_r = explore_alternative(g, q);
    REQUIRE_FALSE(std_r.truncated);
    REQUIRE_FALSE(alt_r.truncated);
    CHECK(std_r.covered == alt_r.covered);
    // Both semantics agree the send stays stuck behind the receive head.
    CHECK_FALSE(std_r.covered);
}

TEST_CASE("summaries stay over nonterminals and commutative terminals") {
    Fix f = make_fix();
    Apcps g = f.g;
    std::uint32_t A2 = g.add_nt("A2");
    g.rules.push_back({A2, ApcpsRule::Kind::pair, f.A, f.C, 0});
    classify_commutative(g);
    SimpleQuery q;
    q.init_procs = {A2};
    auto r = explore_alternative(g, q);
    for (const AltConfig& c : r.configs)
        for (const auto& [proc, cnt] : c.procs) {
            auto check_summary = [&](const Summary& m) {
                for (const auto& [sym, n] : m.items)
                    CHECK(g.sym_commutative(sym));
            };
            check_summary(proc.top);
            for (const auto& [x, mm] : proc.tail) check_summary(mm);
        }
}

TEST_CASE("exploration respects a declared shape bound") {
    // All reachable processes of the server grammar stay 1-shaped.
    Apcps g;
    std::uint32_t S = g.add_nt("S");
    std::uint32_t A = g.add_nt("A");
    std::uint32_t B = g.add_nt("B");
    std::uint32_t ch = g.add_channel("c");
    std::uint32_t m = g.add_message("m");
    std::uint32_t tsend = g.add_terminal({Terminal::Kind::send, ch, m, 0});
    std::uint32_t trecv = g.add_terminal({Terminal::Kind::recv, ch, m, 0});
    g.rules.push_back({S, ApcpsRule::Kind::pair, A, B, 0});
    g.rules.push_back({A, ApcpsRule::Kind::terminal, 0, 0, trecv});
    g.rules.push_back({B, ApcpsRule::Kind::terminal, 0, 0, tsend});
    g.rules.push_back({B, ApcpsRule::Kind::eps, 0, 0, 0});
    classify_commutative(g);
    SimpleQuery q;
    q.init_procs = {S};
    q.init_chans.add(ch, m, 1);
    auto alt = explore_alternative(g, q);
    REQUIRE_FALSE(alt.truncated);
    for (const AltConfig& c : alt.configs)
        for (const auto& [proc, cnt] : c.procs) CHECK(check_k_shape(g, proc, 1));
    auto std_r = explore_standard(g, q);
    REQUIRE_FALSE(std_r.truncated);
    for (const StdConfig& c : std_r.configs)
        for (const auto& [proc, cnt] : c.procs) CHECK(check_k_shape(g, proc, 1));
}
