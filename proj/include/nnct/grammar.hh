#ifndef NNCT_GRAMMAR_HH_
#define NNCT_GRAMMAR_HH_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnct/common.hh"

namespace nnct {

struct Terminal {
    enum class Kind { send, recv, spawn } kind = Kind::send;
    std::uint32_t chan = 0, msg = 0; // send/recv
    std::uint32_t spawn_nt = 0;      // spawn
    auto operator<=>(const Terminal&) const = default;
};

/// Symbols pack nonterminals below the terminal block; see Apcps::sym_*.
using Sym = std::uint32_t;

struct ApcpsRule {
    std::uint32_t lhs = 0;
    enum class Kind { pair, terminal, eps } kind = Kind::eps;
    std::uint32_t y = 0, z = 0; // pair: lhs -> y z
    std::uint32_t term = 0;     // terminal: lhs -> terminals[term]
};

/// A partially commutative context-free grammar with send/receive/spawn
/// terminal side-effects. The independence relation is the one generated by
/// the commutative symbols: two distinct commutative symbols commute.
struct Apcps {
    std::vector<std::string> nonterminals;
    std::vector<std::string> channels;
    std::vector<std::string> messages;
    std::vector<Terminal> terminals;
    std::vector<ApcpsRule> rules;

    // Derived by classify_commutative.
    std::vector<bool> productive;
    std::vector<bool> nt_commutative;
    std::vector<bool> rule_dagger; // pair rule whose right symbol is commutative
    bool classified = false;

    std::uint32_t n_nts() const { return static_cast<std::uint32_t>(nonterminals.size()); }
    Sym sym_of_nt(std::uint32_t n) const { return n; }
    Sym sym_of_term(std::uint32_t t) const { return n_nts() + t; }
    bool is_nt(Sym s) const { return s < n_nts(); }
    std::uint32_t nt_of(Sym s) const { return s; }
    std::uint32_t term_of(Sym s) const { return s - n_nts(); }

    bool term_commutative(std::uint32_t t) const {
        return terminals[t].kind != Terminal::Kind::recv;
    }
    bool sym_commutative(Sym s) const {
        return is_nt(s) ? nt_commutative[nt_of(s)] : term_commutative(term_of(s));
    }

    std::uint32_t add_nt(const std::string& name);
    std::uint32_t add_channel(const std::string& name);
    std::uint32_t add_message(const std::string& name);
    std::uint32_t add_terminal(const Terminal& t); // deduplicating
    std::optional<std::uint32_t> find_nt(const std::string& name) const;
    std::optional<std::uint32_t> find_channel(const std::string& name) const;
    std::optional<std::uint32_t> find_message(const std::string& name) const;

    std::string show_sym(Sym s) const;
};

std::vector<Diagnostic> validate_apcps(const Apcps& g);

/// Computes productivity and the greatest fixpoint of commutativity: start
/// from the productive nonterminals and remove every nonterminal with a rule
/// mentioning a receive or a removed nonterminal, to stabilization.
void classify_commutative(Apcps& g);

// ---------------------------------------------------------------------------
// Standard semantics

/// A process word modulo commutation, held as the canonical representative:
/// maximal commutative runs are stably sorted, non-commutative symbols stay
/// fixed pivots.
struct StdProcess {
    std::vector<Sym> word;
    auto operator<=>(const StdProcess&) const = default;
};

StdProcess canonical_word(const Apcps& g, std::vector<Sym> word);

/// Channel contents: ((chan, msg), count), sorted.
struct Channels {
    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, Nat>> items;
    Nat count(std::uint32_t c, std::uint32_t m) const;
    void add(std::uint32_t c, std::uint32_t m, Nat n);
    void remove(std::uint32_t c, std::uint32_t m, Nat n);
    bool leq(const Channels& other) const;
    auto operator<=>(const Channels&) const = default;
};

struct StdConfig {
    std::vector<std::pair<StdProcess, Nat>> procs; // sorted multiset
    Channels chans;
    void add_proc(const StdProcess& p, Nat n = 1);
    void remove_proc(const StdProcess& p, Nat n = 1);
    auto operator<=>(const StdConfig&) const = default;
};

std::vector<StdConfig> step_standard(const Apcps& g, const StdConfig& cfg);

// ---------------------------------------------------------------------------
// Alternative semantics

/// Multiset over nonterminals and commutative terminals.
struct Summary {
    std::vector<std::pair<Sym, Nat>> items; // sorted
    Nat count(Sym s) const;
    void add(Sym s, Nat n);
    void remove(Sym s, Nat n);
    bool empty() const { return items.empty(); }
    auto operator<=>(const Summary&) const = default;
};

/// delta M X1 M1 ... Xn Mn with the segments stored top-first.
struct AltProcess {
    std::optional<Sym> head; // nullopt = epsilon
    Summary top;
    std::vector<std::pair<Sym, Summary>> tail;
    auto operator<=>(const AltProcess&) const = default;
};

struct AltConfig {
    std::vector<std::pair<AltProcess, Nat>> procs;
    Channels chans;
    void add_proc(const AltProcess& p, Nat n = 1);
    void remove_proc(const AltProcess& p, Nat n = 1);
    auto operator<=>(const AltConfig&) const = default;
};

struct AltStepResult {
    std::vector<AltConfig> next;
    bool truncated = false; // the Parikh enumeration hit its budget somewhere
};

AltStepResult step_alternative(const Apcps& g, const AltConfig& cfg, Nat parikh_budget);

// ---------------------------------------------------------------------------
// Parikh enumeration

struct ParikhResult {
    std::vector<Summary> images; // sorted, deduplicated
    bool truncated = false;
};

/// Parikh images over the commutative terminals of every word reachable from
/// C within `budget` derivation steps (partial derivations projected).
ParikhResult enum_parikh(const Apcps& g, std::uint32_t C, Nat budget);

/// The unprojected enumeration over nonterminals and commutative terminals;
/// exactly the summaries the alternative semantics may insert.
ParikhResult enum_summaries(const Apcps& g, std::uint32_t C, Nat budget);

// ---------------------------------------------------------------------------
// Shapes and simple-coverability

unsigned shape_degree(const Apcps& g, const StdProcess& p);
inline unsigned shape_degree(const Apcps&, const AltProcess& p) {
    return static_cast<unsigned>(p.tail.size());
}
bool check_k_shape(const Apcps& g, const StdProcess& p, unsigned K);
bool check_k_shape(const Apcps& g, const AltProcess& p, unsigned K);

/// Simple coverability query: target processes are single nonterminals.
struct SimpleQuery {
    std::vector<std::uint32_t> init_procs; // nonterminals
    Channels init_chans;
    std::vector<std::uint32_t> cover_procs; // nonterminals
    Channels cover_chans;
};

/// Can the process expose A at the head of some representative?
bool covers_nt(const Apcps& g, const StdProcess& p, std::uint32_t A);
bool covers_nt(const Apcps& g, const AltProcess& p, std::uint32_t A);

template <class Config>
bool config_covers(const Apcps& g, const Config& cfg, const SimpleQuery& q);

StdConfig initial_std_config(const Apcps& g, const SimpleQuery& q);
AltConfig initial_alt_config(const Apcps& g, const SimpleQuery& q);

// ---------------------------------------------------------------------------
// Bounded exhaustive exploration (test oracles and empirical checks)

struct ExploreCaps {
    std::uint64_t state_cap = 200000;
    std::uint64_t depth_cap = 10000;
    Nat parikh_budget = 12;
};

struct StdExplore {
    std::vector<StdConfig> configs;
    bool truncated = false;
    bool covered = false;
};
struct AltExplore {
    std::vector<AltConfig> configs;
    bool truncated = false;
    bool covered = false;
};

StdExplore explore_standard(const Apcps& g, const SimpleQuery& q, const ExploreCaps& caps = {});
AltExplore explore_alternative(const Apcps& g, const SimpleQuery& q, const ExploreCaps& caps = {});

} // namespace nnct

#endif
