#include "nnct/acps.hh"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace nnct {

// ---------------------------------------------------------------------------
// Basics

std::uint32_t Acps::add_state(const std::string& n) {
    states.push_back(n);
    return static_cast<std::uint32_t>(states.size() - 1);
}

std::uint32_t Acps::add_sym(const std::string& n) {
    stack_syms.push_back(n);
    return static_cast<std::uint32_t>(stack_syms.size() - 1);
}

std::optional<std::uint32_t> Acps::find_state(const std::string& n) const {
    for (std::uint32_t i = 0; i < states.size(); ++i)
        if (states[i] == n) return i;
    return std::nullopt;
}

std::optional<std::uint32_t> Acps::find_sym(const std::string& n) const {
    for (std::uint32_t i = 0; i < stack_syms.size(); ++i)
        if (stack_syms[i] == n) return i;
    return std::nullopt;
}

std::vector<Diagnostic> validate_acps(const Acps& a) {
    std::vector<Diagnostic> out;
    for (const AcpsRule& r : a.rules) {
        if (r.state >= a.states.size() || r.state2 >= a.states.size())
            out.push_back({"rule", "undeclared state"});
        for (std::uint32_t s : r.pop)
            if (s >= a.stack_syms.size()) out.push_back({"rule", "undeclared stack symbol"});
        for (std::uint32_t s : r.push)
            if (s >= a.stack_syms.size()) out.push_back({"rule", "undeclared stack symbol"});
        if (r.effect.kind == AcpsEffect::Kind::spawn) {
            if (r.effect.spawn_state >= a.states.size())
                out.push_back({"rule", "spawn targets an undeclared state"});
            for (std::uint32_t s : r.effect.spawn_stack)
                if (s >= a.stack_syms.size())
                    out.push_back({"rule", "spawn stack undeclared symbol"});
        } else if (r.effect.kind != AcpsEffect::Kind::eps) {
            if (r.effect.chan >= a.channels.size() || r.effect.msg >= a.messages.size())
                out.push_back({"rule", "undeclared channel or message"});
        }
    }
    return out;
}

void AcpsConfig::add_proc(const AcpsProcess& p, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(procs.begin(), procs.end(), p,
                               [](const auto& e, const AcpsProcess& k) { return e.first < k; });
    if (it != procs.end() && it->first == p)
        it->second = checked_add(it->second, n);
    else
        procs.insert(it, {p, n});
}

void AcpsConfig::remove_proc(const AcpsProcess& p, Nat n) {
    auto it = std::lower_bound(procs.begin(), procs.end(), p,
                               [](const auto& e, const AcpsProcess& k) { return e.first < k; });
    if (it == procs.end() || !(it->first == p) || it->second < n)
        throw arithmetic_error("process multiset underflow");
    it->second -= n;
    if (it->second == 0) procs.erase(it);
}

namespace {

bool subword(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < b.size() && i < a.size(); ++j)
        if (a[i] == b[j]) ++i;
    return i == a.size();
}

} // namespace

bool leq_process(const AcpsProcess& a, const AcpsProcess& b) {
    if (a.state != b.state) return false;
    if (a.stack.empty()) return true;
    if (b.stack.empty() || a.stack.front() != b.stack.front()) return false;
    return subword({a.stack.begin() + 1, a.stack.end()}, {b.stack.begin() + 1, b.stack.end()});
}

bool config_covers(const AcpsConfig& cfg, const AcpsConfig& target) {
    if (!target.chans.leq(cfg.chans)) return false;
    // Injective matching of target processes into the configuration.
    std::vector<AcpsProcess> want;
    for (const auto& [p, n] : target.procs)
        for (Nat k = 0; k < n; ++k) want.push_back(p);
    std::vector<Nat> used(cfg.procs.size(), 0);
    std::function<bool(std::size_t)> match = [&](std::size_t k) {
        if (k == want.size()) return true;
        for (std::size_t j = 0; j < cfg.procs.size(); ++j) {
            if (used[j] >= cfg.procs[j].second) continue;
            if (!leq_process(want[k], cfg.procs[j].first)) continue;
            ++used[j];
            if (match(k + 1)) return true;
            --used[j];
        }
        return false;
    };
    return match(0);
}

std::vector<AcpsConfig> acps_successors(const Acps& a, const AcpsConfig& cfg) {
    std::vector<AcpsConfig> out;
    for (const auto& [proc, pn] : cfg.procs) {
        for (const AcpsRule& r : a.rules) {
            if (r.state != proc.state) continue;
            if (proc.stack.size() < r.pop.size()) continue;
            if (!std::equal(r.pop.begin(), r.pop.end(), proc.stack.begin())) continue;
            AcpsProcess next;
            next.state = r.state2;
            next.stack = r.push;
            next.stack.insert(next.stack.end(), proc.stack.begin() + r.pop.size(),
                              proc.stack.end());
            AcpsConfig c2 = cfg;
            c2.remove_proc(proc);
            switch (r.effect.kind) {
                case AcpsEffect::Kind::eps:
                    break;
                case AcpsEffect::Kind::send:
                    c2.chans.add(r.effect.chan, r.effect.msg, 1);
                    break;
                case AcpsEffect::Kind::recv:
                    if (cfg.chans.count(r.effect.chan, r.effect.msg) == 0) continue;
                    c2.chans.remove(r.effect.chan, r.effect.msg, 1);
                    break;
                case AcpsEffect::Kind::spawn:
                    c2.add_proc({r.effect.spawn_state, r.effect.spawn_stack});
                    break;
            }
            c2.add_proc(next);
            out.push_back(std::move(c2));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_simple_query(const AcpsQuery& q) {
    for (const auto& [p, n] : q.initial.procs)
        if (p.stack.size() > 1) return false;
    for (const auto& [p, n] : q.target.procs)
        if (p.stack.size() > 1) return false;
    return true;
}

AcpsExplore acps_explore(const Acps& a, const AcpsQuery& q, std::uint64_t state_cap,
                         std::uint64_t depth_cap) {
    AcpsExplore out;
    std::set<AcpsConfig> seen{q.initial};
    std::vector<AcpsConfig> frontier{q.initial};
    out.covered = config_covers(q.initial, q.target);
    for (std::uint64_t d = 0; d < depth_cap && !frontier.empty(); ++d) {
        std::vector<AcpsConfig> next;
        for (const AcpsConfig& c : frontier)
            for (AcpsConfig& s : acps_successors(a, c)) {
                if (seen.size() >= state_cap) {
                    out.truncated = true;
                    break;
                }
                if (!seen.insert(s).second) continue;
                if (config_covers(s, q.target)) out.covered = true;
                next.push_back(std::move(s));
            }
        frontier = std::move(next);
    }
    if (!frontier.empty()) out.truncated = true;
    out.configs.assign(seen.begin(), seen.end());
    return out;
}

// ---------------------------------------------------------------------------
// Coverability to simple coverability

ReducedQuery reduce_to_simple(const Acps& a, const AcpsQuery& q) {
    ReducedQuery out;
    out.acps = a;
    Acps& n = out.acps;
    std::uint32_t d0 = n.add_sym("D0'");

    // Checker chains, one per target process.
    std::uint32_t ti = 0;
    for (const auto& [proc, cnt] : q.target.procs) {
        for (Nat copy = 0; copy < cnt; ++copy, ++ti) {
            std::string tag = "chk" + std::to_string(ti) + "_";
            if (proc.stack.empty()) {
                std::uint32_t chk = n.add_state(tag + "eps");
                n.rules.push_back({proc.state, {}, {}, chk, {}});
                out.query.target.add_proc({chk, {}});
                continue;
            }
            std::vector<std::uint32_t> rest(proc.stack.begin() + 1, proc.stack.end());
            std::vector<std::uint32_t> chain;
            for (std::size_t j = 0; j <= rest.size(); ++j)
                chain.push_back(n.add_state(tag + std::to_string(j)));
            n.rules.push_back({proc.state, {proc.stack.front()}, {}, chain[0], {}});
            for (std::size_t j = 0; j < rest.size(); ++j)
                n.rules.push_back({chain[j], {rest[j]}, {}, chain[j + 1], {}});
            // Skip any symbol while keeping the residue to match: the check
            // is a subword embedding.
            for (std::size_t j = 0; j <= rest.size(); ++j)
                for (std::uint32_t sym = 0; sym < a.stack_syms.size(); ++sym)
                    n.rules.push_back({chain[j], {sym}, {}, chain[j], {}});
            out.query.target.add_proc({chain[rest.size()], {}});
        }
    }
    out.query.target.chans = q.target.chans;

    // Setup chains, one per initial process with stack height other than one.
    std::uint32_t si = 0;
    for (const auto& [proc, cnt] : q.initial.procs) {
        if (proc.stack.size() == 1) {
            out.query.initial.add_proc(proc, cnt);
            continue;
        }
        for (Nat copy = 0; copy < cnt; ++copy, ++si) {
            std::string tag = "ini" + std::to_string(si) + "_";
            std::vector<std::uint32_t> chain;
            for (std::size_t j = 0; j <= proc.stack.size(); ++j)
                chain.push_back(n.add_state(tag + std::to_string(j)));
            // chain[k] still has to lay down the first k symbols; building
            // proceeds from the last symbol so the top lands last.
            for (std::size_t k = proc.stack.size(); k > 0; --k)
                n.rules.push_back(
                    {chain[k], {d0}, {}, chain[k - 1], {d0, proc.stack[k - 1]}});
            n.rules.push_back({chain[0], {d0}, {}, proc.state, {}});
            out.query.initial.add_proc({chain[proc.stack.size()], {d0}});
        }
    }
    out.query.initial.chans = q.initial.chans;
    return out;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

std::string word_name(const Acps& a, const std::vector<std::uint32_t>& w) {
    std::string s;
    for (std::uint32_t x : w) {
        if (!s.empty()) s += ".";
        s += a.stack_syms[x];
    }
    return s.empty() ? "~" : s;
}

// Step 1: every rule pops its word one symbol at a time, then pushes one
// symbol at a time; effects fire in between on empty pop/push.
struct PrenormalResult {
    Acps acps;
    AcpsQuery query;
    std::vector<std::uint32_t> cov_state; // per original state
};

PrenormalResult to_prenormal(const Acps& a, const AcpsQuery& q) {
    PrenormalResult out;
    Acps& n = out.acps;
    n.states = a.states;
    n.stack_syms = a.stack_syms;
    n.channels = a.channels;
    n.messages = a.messages;

    std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::uint32_t> pop_state,
        push_state;
    auto get_pop = [&](std::uint32_t st, const std::vector<std::uint32_t>& w) {
        auto key = std::make_pair(st, w);
        auto it = pop_state.find(key);
        if (it != pop_state.end()) return it->second;
        std::uint32_t s = n.add_state(a.states[st] + "^pop_" + word_name(a, w));
        pop_state.emplace(key, s);
        return s;
    };
    auto get_push = [&](std::uint32_t st, const std::vector<std::uint32_t>& w) {
        auto key = std::make_pair(st, w);
        auto it = push_state.find(key);
        if (it != push_state.end()) return it->second;
        std::uint32_t s = n.add_state(a.states[st] + "^push_" + word_name(a, w));
        push_state.emplace(key, s);
        return s;
    };

    std::set<std::pair<std::uint32_t, std::uint32_t>> entry_done, exit_done;
    auto ensure_entry = [&](std::uint32_t st) {
        std::uint32_t p = get_pop(st, {});
        if (entry_done.insert({st, p}).second) n.rules.push_back({st, {}, {}, p, {}});
        return p;
    };
    auto ensure_exit = [&](std::uint32_t st) {
        std::uint32_t p = get_push(st, {});
        if (exit_done.insert({st, p}).second) n.rules.push_back({p, {}, {}, st, {}});
        return p;
    };

    auto build_push_chain = [&](std::uint32_t st, const std::vector<std::uint32_t>& word) {
        // push states carry the prefix still to be pushed; the last symbol
        // goes down first.
        ensure_exit(st);
        for (std::size_t k = 1; k <= word.size(); ++k) {
            std::vector<std::uint32_t> whole(word.begin(), word.begin() + k);
            std::vector<std::uint32_t> rest(word.begin(), word.begin() + k - 1);
            n.rules.push_back(
                {get_push(st, whole), {}, {}, get_push(st, rest), {whole[k - 1]}});
        }
        return get_push(st, word);
    };

    for (const AcpsRule& r : a.rules) {
        ensure_entry(r.state);
        for (std::size_t k = 1; k <= r.pop.size(); ++k) {
            std::vector<std::uint32_t> seen_before(r.pop.begin(), r.pop.begin() + k - 1);
            std::vector<std::uint32_t> seen_now(r.pop.begin(), r.pop.begin() + k);
            n.rules.push_back(
                {get_pop(r.state, seen_before), {r.pop[k - 1]}, {}, get_pop(r.state, seen_now), {}});
        }
        AcpsEffect eff = r.effect;
        if (eff.kind == AcpsEffect::Kind::spawn) {
            std::uint32_t tgt = build_push_chain(eff.spawn_state, eff.spawn_stack);
            eff.spawn_state = tgt;
            eff.spawn_stack = {};
        }
        n.rules.push_back(
            {get_pop(r.state, r.pop), {}, eff, build_push_chain(r.state2, r.push), {}});
    }

    // Cover detection: every intermediate state may reveal the original
    // state together with its stack top. Only states the query asks about
    // need the machinery.
    std::set<std::uint32_t> asked;
    for (const auto& [p, cnt] : q.target.procs) asked.insert(p.state);
    out.cov_state.assign(a.states.size(), 0);
    for (std::uint32_t st : asked) {
        out.cov_state[st] = n.add_state(a.states[st] + "^cov");
        n.rules.push_back({st, {}, {}, out.cov_state[st], {}});
    }
    for (const auto& [key, st] : pop_state) {
        if (!asked.count(key.first)) continue;
        if (key.second.empty())
            n.rules.push_back({st, {}, {}, out.cov_state[key.first], {}});
        else
            n.rules.push_back({st, {}, {}, out.cov_state[key.first], {key.second.front()}});
    }
    for (const auto& [key, st] : push_state) {
        if (!asked.count(key.first)) continue;
        if (key.second.empty())
            n.rules.push_back({st, {}, {}, out.cov_state[key.first], {}});
        else
            n.rules.push_back({st, {}, {}, out.cov_state[key.first], {key.second.front()}});
    }

    out.query.initial = q.initial;
    out.query.target.chans = q.target.chans;
    for (const auto& [p, cnt] : q.target.procs)
        out.query.target.add_proc({out.cov_state[p.state], p.stack}, cnt);
    return out;
}

} // namespace

NormalizedAcps normalize_acps(const Acps& a0, const AcpsQuery& q0) {
    if (!is_simple_query(q0))
        throw std::invalid_argument("normalize_acps expects a simple query");

    // Initial processes must carry empty stacks before the state-into-stack
    // step; a bootstrap state raises (q, A) from (boot, eps).
    Acps a = a0;
    AcpsQuery q = q0;
    {
        AcpsConfig init;
        init.chans = q.initial.chans;
        std::uint32_t bi = 0;
        for (const auto& [p, cnt] : q.initial.procs) {
            if (p.stack.empty()) {
                init.add_proc(p, cnt);
                continue;
            }
            for (Nat c = 0; c < cnt; ++c, ++bi) {
                std::uint32_t boot = a.add_state("boot" + std::to_string(bi));
                a.rules.push_back({boot, {}, {}, p.state, p.stack});
                init.add_proc({boot, {}});
            }
        }
        q.initial = init;
    }

    PrenormalResult pre = to_prenormal(a, q);
    const Acps& p = pre.acps;
    const std::uint32_t nstates = static_cast<std::uint32_t>(p.states.size());

    NormalizedAcps out;
    Acps& n = out.acps;
    n.channels = p.channels;
    n.messages = p.messages;
    std::uint32_t q0state = n.add_state("q0");

    // Stack alphabet: A^(q,q') for A in the old alphabet plus the bottom
    // marker, and the cover symbols.
    const std::uint32_t theta = static_cast<std::uint32_t>(p.stack_syms.size());
    auto sym_of = [&](std::uint32_t A, std::uint32_t s1, std::uint32_t s2) {
        return (A * nstates + s1) * nstates + s2;
    };
    for (std::uint32_t A = 0; A <= theta; ++A) {
        std::string base = A == theta ? "Th" : p.stack_syms[A];
        for (std::uint32_t s1 = 0; s1 < nstates; ++s1)
            for (std::uint32_t s2 = 0; s2 < nstates; ++s2)
                n.add_sym(base + "(" + p.states[s1] + "," + p.states[s2] + ")");
    }
    std::map<std::pair<std::uint32_t, std::optional<std::uint32_t>>, std::uint32_t> cov_sym;
    auto get_cov = [&](std::uint32_t st, std::optional<std::uint32_t> A) {
        auto key = std::make_pair(st, A);
        auto it = cov_sym.find(key);
        if (it != cov_sym.end()) return it->second;
        std::string nm = "Thcov(" + p.states[st] + "," +
                         (A ? p.stack_syms[*A] : std::string("~")) + ")";
        std::uint32_t s = n.add_sym(nm);
        cov_sym.emplace(key, s);
        return s;
    };

    for (const AcpsRule& r : p.rules) {
        if (r.pop.empty() && r.push.empty()) {
            // (q,eps) -> (q',eps): every A^(q,q'') rewrites in place.
            for (std::uint32_t A = 0; A <= theta; ++A)
                for (std::uint32_t s2 = 0; s2 < nstates; ++s2) {
                    AcpsEffect eff = r.effect;
                    if (eff.kind == AcpsEffect::Kind::spawn) {
                        // spawn lands on a bottom marker with a guessed pair.
                        for (std::uint32_t s3 = 0; s3 < nstates; ++s3) {
                            AcpsEffect e2 = eff;
                            e2.spawn_state = q0state;
                            e2.spawn_stack = {sym_of(theta, eff.spawn_state, s3)};
                            n.rules.push_back({q0state,
                                               {sym_of(A, r.state, s2)},
                                               e2,
                                               q0state,
                                               {sym_of(A, r.state2, s2)}});
                        }
                    } else {
                        n.rules.push_back({q0state,
                                           {sym_of(A, r.state, s2)},
                                           eff,
                                           q0state,
                                           {sym_of(A, r.state2, s2)}});
                    }
                }
        } else if (r.pop.empty() && r.push.size() == 1) {
            // (q,eps) -> (q',B): guess the intermediate state.
            for (std::uint32_t A = 0; A <= theta; ++A)
                for (std::uint32_t s2 = 0; s2 < nstates; ++s2)
                    for (std::uint32_t s3 = 0; s3 < nstates; ++s3)
                        n.rules.push_back({q0state,
                                           {sym_of(A, r.state, s2)},
                                           {},
                                           q0state,
                                           {sym_of(r.push[0], r.state2, s3),
                                            sym_of(A, s3, s2)}});
        } else if (r.pop.size() == 1 && r.push.empty() &&
                   r.effect.kind == AcpsEffect::Kind::eps) {
            // (q,A) -> (q',eps): the annotation already named q'.
            n.rules.push_back(
                {q0state, {sym_of(r.pop[0], r.state, r.state2)}, {}, q0state, {}});
        } else {
            throw std::logic_error("prenormal form violated");
        }
    }

    // Cover rules for exactly the (state, top) pairs named by the query.
    {
        std::set<std::pair<std::uint32_t, std::optional<std::uint32_t>>> pairs;
        for (const auto& [proc, cnt] : pre.query.target.procs) {
            std::optional<std::uint32_t> A;
            if (!proc.stack.empty()) A = proc.stack.front();
            pairs.insert({proc.state, A});
        }
        for (const auto& [s1, A] : pairs) {
            if (A) {
                for (std::uint32_t s2 = 0; s2 < nstates; ++s2)
                    n.rules.push_back({q0state,
                                       {sym_of(*A, s1, s2)},
                                       {},
                                       q0state,
                                       {get_cov(s1, A)}});
            } else {
                for (std::uint32_t sym = 0; sym <= theta; ++sym)
                    for (std::uint32_t s2 = 0; s2 < nstates; ++s2)
                        n.rules.push_back({q0state,
                                           {sym_of(sym, s1, s2)},
                                           {},
                                           q0state,
                                           {get_cov(s1, std::nullopt)}});
            }
        }
    }

    // Last step towards the normal-form clauses: a rule popping A and
    // pushing B is replaced by a pop-push-two and a fresh one-symbol pop
    // carrying the effect (or plain epsilon).
    {
        std::vector<AcpsRule> split;
        std::map<AcpsEffect, std::uint32_t> effect_sym;
        for (const AcpsRule& r : n.rules) {
            if (r.pop.size() != 1 || r.push.size() != 1) {
                split.push_back(r);
                continue;
            }
            auto it = effect_sym.find(r.effect);
            if (it == effect_sym.end()) {
                std::uint32_t cs =
                    n.add_sym("eff" + std::to_string(effect_sym.size()));
                it = effect_sym.emplace(r.effect, cs).first;
                split.push_back({q0state, {cs}, r.effect, q0state, {}});
            }
            split.push_back({q0state, r.pop, {}, q0state, {it->second, r.push[0]}});
        }
        n.rules = std::move(split);
    }

    // Queries: initial processes own a bottom marker with a fixed partner
    // state; targets are the cover symbols.
    std::uint32_t qdagger = 0;
    out.query.initial.chans = pre.query.initial.chans;
    for (const auto& [proc, cnt] : pre.query.initial.procs) {
        if (!proc.stack.empty()) throw std::logic_error("initial stacks must be empty here");
        out.query.initial.add_proc({q0state, {sym_of(theta, proc.state, qdagger)}}, cnt);
    }
    out.query.target.chans = pre.query.target.chans;
    for (const auto& [proc, cnt] : pre.query.target.procs) {
        std::optional<std::uint32_t> A;
        if (!proc.stack.empty()) A = proc.stack.front();
        out.query.target.add_proc({q0state, {get_cov(proc.state, A)}}, cnt);
    }
    return out;
}

std::vector<Diagnostic> check_normal_form(const Acps& a) {
    std::vector<Diagnostic> out;
    for (const AcpsRule& r : a.rules) {
        if (r.state != r.state2) out.push_back({"rule", "state changes"});
        if (r.pop.size() != 1) out.push_back({"rule", "pop is not a single symbol"});
        if (r.effect.kind != AcpsEffect::Kind::eps) {
            if (!r.push.empty())
                out.push_back({"rule", "effectful rule pushes"});
        } else if (r.push.size() != 0 && r.push.size() != 2) {
            out.push_back({"rule", "silent rule pushes one symbol"});
        }
        if (r.effect.kind == AcpsEffect::Kind::spawn) {
            if (r.effect.spawn_state != r.state)
                out.push_back({"rule", "spawn changes state"});
            if (r.effect.spawn_stack.size() != 1)
                out.push_back({"rule", "spawn stack is not a single symbol"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grammar extraction

ExtractedApcps extract_apcps(const Acps& a) {
    auto diag = check_normal_form(a);
    if (!diag.empty()) throw std::invalid_argument("grammar extraction requires normal form");
    ExtractedApcps out;
    Apcps& g = out.grammar;
    g.channels = a.channels;
    g.messages = a.messages;
    out.nt_of_sym.resize(a.stack_syms.size());
    for (std::uint32_t s = 0; s < a.stack_syms.size(); ++s)
        out.nt_of_sym[s] = g.add_nt(a.stack_syms[s]);
    for (const AcpsRule& r : a.rules) {
        ApcpsRule gr;
        gr.lhs = out.nt_of_sym[r.pop[0]];
        switch (r.effect.kind) {
            case AcpsEffect::Kind::eps:
                if (r.push.empty()) {
                    gr.kind = ApcpsRule::Kind::eps;
                } else {
                    gr.kind = ApcpsRule::Kind::pair;
                    gr.y = out.nt_of_sym[r.push[0]];
                    gr.z = out.nt_of_sym[r.push[1]];
                }
                break;
            case AcpsEffect::Kind::send:
                gr.kind = ApcpsRule::Kind::terminal;
                gr.term = g.add_terminal({Terminal::Kind::send, r.effect.chan, r.effect.msg, 0});
                break;
            case AcpsEffect::Kind::recv:
                gr.kind = ApcpsRule::Kind::terminal;
                gr.term = g.add_terminal({Terminal::Kind::recv, r.effect.chan, r.effect.msg, 0});
                break;
            case AcpsEffect::Kind::spawn:
                gr.kind = ApcpsRule::Kind::terminal;
                gr.term = g.add_terminal(
                    {Terminal::Kind::spawn, 0, 0, out.nt_of_sym[r.effect.spawn_stack[0]]});
                break;
        }
        g.rules.push_back(gr);
    }
    classify_commutative(g);
    return out;
}

SimpleQuery to_simple_query(const ExtractedApcps& e, const Acps& a, const AcpsQuery& q) {
    (void)a;
    SimpleQuery out;
    for (const auto& [p, cnt] : q.initial.procs) {
        if (p.stack.size() != 1)
            throw std::invalid_argument("initial processes must hold one symbol");
        for (Nat k = 0; k < cnt; ++k) out.init_procs.push_back(e.nt_of_sym[p.stack[0]]);
    }
    out.init_chans = q.initial.chans;
    for (const auto& [p, cnt] : q.target.procs) {
        if (p.stack.size() != 1)
            throw std::invalid_argument("target processes must hold one symbol");
        for (Nat k = 0; k < cnt; ++k) out.cover_procs.push_back(e.nt_of_sym[p.stack[0]]);
    }
    out.cover_chans = q.target.chans;
    return out;
}

} // namespace nnct
