#ifndef NNCT_ACPS_HH_
#define NNCT_ACPS_HH_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnct/common.hh"
#include "nnct/grammar.hh"

namespace nnct {

struct AcpsEffect {
    enum class Kind { eps, send, recv, spawn } kind = Kind::eps;
    std::uint32_t chan = 0, msg = 0;      // send/recv
    std::uint32_t spawn_state = 0;        // spawn
    std::vector<std::uint32_t> spawn_stack;
    auto operator<=>(const AcpsEffect&) const = default;
};

struct AcpsRule {
    std::uint32_t state = 0;
    std::vector<std::uint32_t> pop;
    AcpsEffect effect;
    std::uint32_t state2 = 0;
    std::vector<std::uint32_t> push;
};

/// Asynchronously communicating pushdown system: a dynamic network of
/// pushdown processes over unordered channels.
struct Acps {
    std::vector<std::string> states;
    std::vector<std::string> stack_syms;
    std::vector<std::string> channels;
    std::vector<std::string> messages;
    std::vector<AcpsRule> rules;

    std::uint32_t add_state(const std::string& n);
    std::uint32_t add_sym(const std::string& n);
    std::optional<std::uint32_t> find_state(const std::string& n) const;
    std::optional<std::uint32_t> find_sym(const std::string& n) const;
};

std::vector<Diagnostic> validate_acps(const Acps& a);

struct AcpsProcess {
    std::uint32_t state = 0;
    std::vector<std::uint32_t> stack; // top first
    auto operator<=>(const AcpsProcess&) const = default;
};

struct AcpsConfig {
    std::vector<std::pair<AcpsProcess, Nat>> procs; // sorted multiset
    Channels chans;
    void add_proc(const AcpsProcess& p, Nat n = 1);
    void remove_proc(const AcpsProcess& p, Nat n = 1);
    auto operator<=>(const AcpsConfig&) const = default;
};

/// Process order: states equal, and either the smaller stack is empty or the
/// top symbols agree exactly and the rest embeds as a subword.
bool leq_process(const AcpsProcess& a, const AcpsProcess& b);
bool config_covers(const AcpsConfig& cfg, const AcpsConfig& target);

std::vector<AcpsConfig> acps_successors(const Acps& a, const AcpsConfig& cfg);

struct AcpsQuery {
    AcpsConfig initial;
    AcpsConfig target;
};

/// Is the query simple: all initial and target stacks of height at most one?
bool is_simple_query(const AcpsQuery& q);

struct AcpsExplore {
    std::vector<AcpsConfig> configs;
    bool truncated = false;
    bool covered = false;
};
AcpsExplore acps_explore(const Acps& a, const AcpsQuery& q, std::uint64_t state_cap = 200000,
                         std::uint64_t depth_cap = 10000);

/// Coverability to simple coverability: fresh checker states unwind target
/// stacks symbol by symbol (exact top match then subword), and fresh setup
/// states build arbitrary initial stacks from a single bootstrap symbol.
struct ReducedQuery {
    Acps acps;
    AcpsQuery query; // simple
};
ReducedQuery reduce_to_simple(const Acps& a, const AcpsQuery& q);

/// Normal-form pipeline for simple queries: pop/push state unwinding, then
/// the state-into-stack encoding over symbols A^(q,q') with bottom markers,
/// then splitting of every rule that pushes while carrying an effect or
/// pushing a single symbol.
struct NormalizedAcps {
    Acps acps;
    AcpsQuery query;
};
NormalizedAcps normalize_acps(const Acps& a, const AcpsQuery& q);

/// Machine check of the normal-form clauses; empty result = normal.
std::vector<Diagnostic> check_normal_form(const Acps& a);

/// The grammar of a normal-form ACPS, with the rule-by-rule mapping of
/// effects to terminals and spawn targets rewritten to bare nonterminals.
struct ExtractedApcps {
    Apcps grammar; // classified
    std::vector<std::uint32_t> nt_of_sym; // stack symbol -> nonterminal
};
ExtractedApcps extract_apcps(const Acps& a);

/// Carries a simple ACPS query over to the extracted grammar.
SimpleQuery to_simple_query(const ExtractedApcps& e, const Acps& a, const AcpsQuery& q);

} // namespace nnct

#endif
