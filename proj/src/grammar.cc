#include "nnct/grammar.hh"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace nnct {

// ---------------------------------------------------------------------------
// Apcps basics

std::uint32_t Apcps::add_nt(const std::string& name) {
    nonterminals.push_back(name);
    return n_nts() - 1;
}

std::uint32_t Apcps::add_channel(const std::string& name) {
    channels.push_back(name);
    return static_cast<std::uint32_t>(channels.size() - 1);
}

std::uint32_t Apcps::add_message(const std::string& name) {
    messages.push_back(name);
    return static_cast<std::uint32_t>(messages.size() - 1);
}

std::uint32_t Apcps::add_terminal(const Terminal& t) {
    for (std::uint32_t k = 0; k < terminals.size(); ++k)
        if (terminals[k] == t) return k;
    terminals.push_back(t);
    return static_cast<std::uint32_t>(terminals.size() - 1);
}

namespace {
template <class V>
std::optional<std::uint32_t> find_name(const V& v, const std::string& n) {
    for (std::uint32_t i = 0; i < v.size(); ++i)
        if (v[i] == n) return i;
    return std::nullopt;
}
} // namespace

std::optional<std::uint32_t> Apcps::find_nt(const std::string& n) const {
    return find_name(nonterminals, n);
}
std::optional<std::uint32_t> Apcps::find_channel(const std::string& n) const {
    return find_name(channels, n);
}
std::optional<std::uint32_t> Apcps::find_message(const std::string& n) const {
    return find_name(messages, n);
}

std::string Apcps::show_sym(Sym s) const {
    if (is_nt(s)) return nonterminals[s];
    const Terminal& t = terminals[term_of(s)];
    switch (t.kind) {
        case Terminal::Kind::send:
            return channels[t.chan] + "!" + messages[t.msg];
        case Terminal::Kind::recv:
            return channels[t.chan] + "?" + messages[t.msg];
        case Terminal::Kind::spawn:
            return "nu " + nonterminals[t.spawn_nt];
    }
    return "?";
}

std::vector<Diagnostic> validate_apcps(const Apcps& g) {
    std::vector<Diagnostic> out;
    for (const ApcpsRule& r : g.rules) {
        if (r.lhs >= g.n_nts()) out.push_back({"rule", "undeclared left-hand nonterminal"});
        if (r.kind == ApcpsRule::Kind::pair) {
            if (r.y >= g.n_nts() || r.z >= g.n_nts())
                out.push_back({"rule", "undeclared nonterminal on the right-hand side"});
        } else if (r.kind == ApcpsRule::Kind::terminal) {
            if (r.term >= g.terminals.size())
                out.push_back({"rule", "undeclared terminal"});
        }
    }
    for (const Terminal& t : g.terminals) {
        if (t.kind == Terminal::Kind::spawn) {
            if (t.spawn_nt >= g.n_nts())
                out.push_back({"terminal", "spawn target undeclared"});
        } else if (t.chan >= g.channels.size() || t.msg >= g.messages.size()) {
            out.push_back({"terminal", "channel or message undeclared"});
        }
    }
    return out;
}

void classify_commutative(Apcps& g) {
    const std::uint32_t n = g.n_nts();
    // Productivity least fixpoint.
    g.productive.assign(n, false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const ApcpsRule& r : g.rules) {
            if (g.productive[r.lhs]) continue;
            bool ok = false;
            switch (r.kind) {
                case ApcpsRule::Kind::pair:
                    ok = g.productive[r.y] && g.productive[r.z];
                    break;
                case ApcpsRule::Kind::terminal:
                case ApcpsRule::Kind::eps:
                    ok = true;
                    break;
            }
            if (ok) {
                g.productive[r.lhs] = true;
                changed = true;
            }
        }
    }
    // Greatest fixpoint: start from the productive set and remove violators.
    g.nt_commutative = g.productive;
    changed = true;
    while (changed) {
        changed = false;
        for (const ApcpsRule& r : g.rules) {
            if (!g.nt_commutative[r.lhs]) continue;
            bool ok = true;
            switch (r.kind) {
                case ApcpsRule::Kind::pair:
                    ok = g.nt_commutative[r.y] && g.nt_commutative[r.z];
                    break;
                case ApcpsRule::Kind::terminal:
                    ok = g.term_commutative(r.term);
                    break;
                case ApcpsRule::Kind::eps:
                    ok = true;
                    break;
            }
            if (!ok) {
                g.nt_commutative[r.lhs] = false;
                changed = true;
            }
        }
    }
    g.rule_dagger.assign(g.rules.size(), false);
    for (std::size_t k = 0; k < g.rules.size(); ++k)
        g.rule_dagger[k] = g.rules[k].kind == ApcpsRule::Kind::pair &&
                           g.nt_commutative[g.rules[k].z];
    g.classified = true;
}

// ---------------------------------------------------------------------------
// Standard semantics

StdProcess canonical_word(const Apcps& g, std::vector<Sym> word) {
    auto begin = word.begin();
    while (begin != word.end()) {
        auto end = begin;
        while (end != word.end() && g.sym_commutative(*end)) ++end;
        std::stable_sort(begin, end);
        if (end != word.end()) ++end; // skip the non-commutative pivot
        begin = end;
    }
    return {std::move(word)};
}

Nat Channels::count(std::uint32_t c, std::uint32_t m) const {
    for (const auto& [cm, n] : items)
        if (cm == std::make_pair(c, m)) return n;
    return 0;
}

void Channels::add(std::uint32_t c, std::uint32_t m, Nat n) {
    if (n == 0) return;
    auto key = std::make_pair(c, m);
    auto it = std::lower_bound(items.begin(), items.end(), key,
                               [](const auto& e, const auto& k) { return e.first < k; });
    if (it != items.end() && it->first == key)
        it->second = checked_add(it->second, n);
    else
        items.insert(it, {key, n});
}

void Channels::remove(std::uint32_t c, std::uint32_t m, Nat n) {
    if (n == 0) return;
    auto key = std::make_pair(c, m);
    auto it = std::lower_bound(items.begin(), items.end(), key,
                               [](const auto& e, const auto& k) { return e.first < k; });
    if (it == items.end() || it->first != key || it->second < n)
        throw arithmetic_error("channel underflow");
    it->second -= n;
    if (it->second == 0) items.erase(it);
}

bool Channels::leq(const Channels& other) const {
    for (const auto& [cm, n] : items)
        if (other.count(cm.first, cm.second) < n) return false;
    return true;
}

namespace {

template <class P, class C>
void add_proc_impl(C& cfg, const P& p, Nat n) {
    auto it = std::lower_bound(cfg.procs.begin(), cfg.procs.end(), p,
                               [](const auto& e, const P& k) { return e.first < k; });
    if (it != cfg.procs.end() && it->first == p)
        it->second = checked_add(it->second, n);
    else
        cfg.procs.insert(it, {p, n});
}

template <class P, class C>
void remove_proc_impl(C& cfg, const P& p, Nat n) {
    auto it = std::lower_bound(cfg.procs.begin(), cfg.procs.end(), p,
                               [](const auto& e, const P& k) { return e.first < k; });
    if (it == cfg.procs.end() || !(it->first == p) || it->second < n)
        throw arithmetic_error("process multiset underflow");
    it->second -= n;
    if (it->second == 0) cfg.procs.erase(it);
}

} // namespace

void StdConfig::add_proc(const StdProcess& p, Nat n) {
    if (!p.word.empty()) add_proc_impl(*this, p, n); // finished processes vanish
}
void StdConfig::remove_proc(const StdProcess& p, Nat n) { remove_proc_impl(*this, p, n); }
void AltConfig::add_proc(const AltProcess& p, Nat n) {
    if (p.head || !p.top.empty() || !p.tail.empty()) add_proc_impl(*this, p, n);
}
void AltConfig::remove_proc(const AltProcess& p, Nat n) { remove_proc_impl(*this, p, n); }

namespace {

// Head symbols of a canonical word: the leading symbol, plus every distinct
// symbol of the leading commutative run (those commute to the front).
std::vector<std::pair<Sym, std::size_t>> head_positions(const Apcps& g,
                                                        const std::vector<Sym>& w) {
    std::vector<std::pair<Sym, std::size_t>> out;
    std::set<Sym> seen;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (seen.insert(w[i]).second) out.push_back({w[i], i});
        if (!g.sym_commutative(w[i])) break;
    }
    return out;
}

} // namespace

std::vector<StdConfig> step_standard(const Apcps& g, const StdConfig& cfg) {
    if (!g.classified) throw std::logic_error("grammar not classified");
    std::vector<StdConfig> out;
    for (const auto& [proc, pn] : cfg.procs) {
        for (const auto& [sym, pos] : head_positions(g, proc.word)) {
            std::vector<Sym> rest;
            rest.reserve(proc.word.size() - 1);
            for (std::size_t k = 0; k < proc.word.size(); ++k)
                if (k != pos) rest.push_back(proc.word[k]);

            if (g.is_nt(sym)) {
                for (const ApcpsRule& r : g.rules) {
                    if (r.lhs != g.nt_of(sym)) continue;
                    std::vector<Sym> next;
                    if (r.kind == ApcpsRule::Kind::pair) {
                        next = {g.sym_of_nt(r.y), g.sym_of_nt(r.z)};
                    } else if (r.kind == ApcpsRule::Kind::terminal) {
                        next = {g.sym_of_term(r.term)};
                    }
                    next.insert(next.end(), rest.begin(), rest.end());
                    StdConfig c2 = cfg;
                    c2.remove_proc(proc);
                    c2.add_proc(canonical_word(g, std::move(next)));
                    out.push_back(std::move(c2));
                }
                continue;
            }
            const Terminal& t = g.terminals[g.term_of(sym)];
            StdConfig c2 = cfg;
            c2.remove_proc(proc);
            StdProcess cont = canonical_word(g, rest);
            switch (t.kind) {
                case Terminal::Kind::send:
                    c2.chans.add(t.chan, t.msg, 1);
                    c2.add_proc(cont);
                    break;
                case Terminal::Kind::recv:
                    if (cfg.chans.count(t.chan, t.msg) == 0) continue; // blocked
                    c2.chans.remove(t.chan, t.msg, 1);
                    c2.add_proc(cont);
                    break;
                case Terminal::Kind::spawn:
                    c2.add_proc(cont);
                    c2.add_proc(StdProcess{{g.sym_of_nt(t.spawn_nt)}});
                    break;
            }
            out.push_back(std::move(c2));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Summaries

Nat Summary::count(Sym s) const {
    for (const auto& [x, n] : items)
        if (x == s) return n;
    return 0;
}

void Summary::add(Sym s, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(items.begin(), items.end(), s,
                               [](const auto& e, Sym k) { return e.first < k; });
    if (it != items.end() && it->first == s)
        it->second = checked_add(it->second, n);
    else
        items.insert(it, {s, n});
}

void Summary::remove(Sym s, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(items.begin(), items.end(), s,
                               [](const auto& e, Sym k) { return e.first < k; });
    if (it == items.end() || it->first != s || it->second < n)
        throw arithmetic_error("summary underflow");
    it->second -= n;
    if (it->second == 0) items.erase(it);
}

// ---------------------------------------------------------------------------
// Parikh enumeration

namespace {

ParikhResult enum_vectors(const Apcps& g, std::uint32_t C, Nat budget, bool project) {
    if (!g.classified) throw std::logic_error("grammar not classified");
    if (!g.nt_commutative[C]) throw std::invalid_argument("nonterminal is not commutative");
    Summary start;
    start.add(g.sym_of_nt(C), 1);
    std::set<Summary> seen{start};
    std::vector<Summary> frontier{start};
    bool truncated = false;
    for (Nat depth = 0; depth < budget && !frontier.empty(); ++depth) {
        std::vector<Summary> next;
        for (const Summary& v : frontier) {
            for (const auto& [sym, n] : v.items) {
                if (!g.is_nt(sym)) continue;
                for (const ApcpsRule& r : g.rules) {
                    if (r.lhs != g.nt_of(sym)) continue;
                    Summary w = v;
                    w.remove(sym, 1);
                    if (r.kind == ApcpsRule::Kind::pair) {
                        w.add(g.sym_of_nt(r.y), 1);
                        w.add(g.sym_of_nt(r.z), 1);
                    } else if (r.kind == ApcpsRule::Kind::terminal) {
                        w.add(g.sym_of_term(r.term), 1);
                    }
                    if (seen.insert(w).second) next.push_back(std::move(w));
                }
            }
        }
        frontier = std::move(next);
    }
    // Any nonterminal left in the frontier could still rewrite.
    for (const Summary& v : frontier)
        for (const auto& [sym, n] : v.items)
            if (g.is_nt(sym)) truncated = true;

    ParikhResult res;
    res.truncated = truncated;
    if (project) {
        std::set<Summary> proj;
        for (const Summary& v : seen) {
            Summary p;
            for (const auto& [sym, n] : v.items)
                if (!g.is_nt(sym)) p.add(sym, n);
            proj.insert(std::move(p));
        }
        res.images.assign(proj.begin(), proj.end());
    } else {
        res.images.assign(seen.begin(), seen.end());
    }
    return res;
}

} // namespace

ParikhResult enum_parikh(const Apcps& g, std::uint32_t C, Nat budget) {
    return enum_vectors(g, C, budget, true);
}

ParikhResult enum_summaries(const Apcps& g, std::uint32_t C, Nat budget) {
    return enum_vectors(g, C, budget, false);
}

// ---------------------------------------------------------------------------
// Alternative semantics

namespace {

// Renders the commutative actions of a summary effective: sends to channels,
// spawns as fresh processes; returns the nonterminal residue.
Summary dispatch_summary(const Apcps& g, const Summary& m, AltConfig& cfg) {
    Summary residue;
    for (const auto& [sym, n] : m.items) {
        if (g.is_nt(sym)) {
            residue.add(sym, n);
            continue;
        }
        const Terminal& t = g.terminals[g.term_of(sym)];
        if (t.kind == Terminal::Kind::send) {
            cfg.chans.add(t.chan, t.msg, n);
        } else if (t.kind == Terminal::Kind::spawn) {
            AltProcess spawned;
            spawned.head = g.sym_of_nt(t.spawn_nt);
            cfg.add_proc(spawned, n);
        }
        // Receives cannot occur: summaries hold commutative symbols only.
    }
    return residue;
}

bool summary_terminal_only(const Apcps& g, const Summary& m) {
    for (const auto& [sym, n] : m.items)
        if (g.is_nt(sym)) return false;
    return true;
}

} // namespace

AltStepResult step_alternative(const Apcps& g, const AltConfig& cfg, Nat parikh_budget) {
    if (!g.classified) throw std::logic_error("grammar not classified");
    AltStepResult res;
    auto emit = [&](AltConfig c) {
        res.next.push_back(std::move(c));
    };
    for (const auto& [proc, pn] : cfg.procs) {
        if (proc.head && g.is_nt(*proc.head)) {
            std::uint32_t A = g.nt_of(*proc.head);
            for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
                const ApcpsRule& r = g.rules[ri];
                if (r.lhs != A) continue;
                if (g.rule_dagger[ri]) {
                    // Precompute the commutative right symbol into the cache.
                    ParikhResult ps = enum_summaries(g, r.z, parikh_budget);
                    res.truncated = res.truncated || ps.truncated;
                    for (const Summary& w : ps.images) {
                        AltProcess p2 = proc;
                        p2.head = g.sym_of_nt(r.y);
                        for (const auto& [sym, n] : w.items) p2.top.add(sym, n);
                        AltConfig c2 = cfg;
                        c2.remove_proc(proc);
                        c2.add_proc(p2);
                        emit(std::move(c2));
                    }
                } else if (r.kind == ApcpsRule::Kind::pair) {
                    AltProcess p2;
                    p2.head = g.sym_of_nt(r.y);
                    p2.tail.push_back({g.sym_of_nt(r.z), proc.top});
                    p2.tail.insert(p2.tail.end(), proc.tail.begin(), proc.tail.end());
                    AltConfig c2 = cfg;
                    c2.remove_proc(proc);
                    c2.add_proc(p2);
                    emit(std::move(c2));
                } else {
                    AltProcess p2 = proc;
                    p2.head = r.kind == ApcpsRule::Kind::terminal
                                  ? std::optional<Sym>(g.sym_of_term(r.term))
                                  : std::nullopt;
                    AltConfig c2 = cfg;
                    c2.remove_proc(proc);
                    c2.add_proc(p2);
                    emit(std::move(c2));
                }
            }
            continue;
        }
        if (proc.head) {
            const Terminal& t = g.terminals[g.term_of(*proc.head)];
            AltConfig c2 = cfg;
            c2.remove_proc(proc);
            AltProcess cont = proc;
            cont.head = std::nullopt;
            switch (t.kind) {
                case Terminal::Kind::send:
                    c2.chans.add(t.chan, t.msg, 1);
                    c2.add_proc(cont);
                    emit(std::move(c2));
                    break;
                case Terminal::Kind::recv:
                    if (cfg.chans.count(t.chan, t.msg) == 0) break;
                    c2.chans.remove(t.chan, t.msg, 1);
                    c2.add_proc(cont);
                    emit(std::move(c2));
                    break;
                case Terminal::Kind::spawn: {
                    AltProcess spawned;
                    spawned.head = g.sym_of_nt(t.spawn_nt);
                    c2.add_proc(cont);
                    c2.add_proc(spawned);
                    emit(std::move(c2));
                    break;
                }
            }
            continue;
        }
        // Head epsilon: dispatch rules.
        if (summary_terminal_only(g, proc.top) && !proc.tail.empty()) {
            AltConfig c2 = cfg;
            c2.remove_proc(proc);
            dispatch_summary(g, proc.top, c2);
            AltProcess p2;
            p2.head = proc.tail.front().first;
            p2.top = proc.tail.front().second;
            p2.tail.assign(proc.tail.begin() + 1, proc.tail.end());
            c2.add_proc(p2);
            emit(std::move(c2));
        }
        {
            // Dispatch the commutative actions eagerly; the nonterminal
            // residue stays and the process blocks on it.
            AltConfig c2 = cfg;
            c2.remove_proc(proc);
            AltProcess p2 = proc;
            p2.top = dispatch_summary(g, proc.top, c2);
            c2.add_proc(p2);
            if (!(c2 == cfg)) emit(std::move(c2));
        }
    }
    std::sort(res.next.begin(), res.next.end());
    res.next.erase(std::unique(res.next.begin(), res.next.end()), res.next.end());
    return res;
}

// ---------------------------------------------------------------------------
// Shapes and covers

unsigned shape_degree(const Apcps& g, const StdProcess& p) {
    unsigned n = 0;
    for (std::size_t k = 1; k < p.word.size(); ++k)
        if (g.is_nt(p.word[k]) && !g.sym_commutative(p.word[k])) ++n;
    return n;
}

bool check_k_shape(const Apcps& g, const StdProcess& p, unsigned K) {
    return shape_degree(g, p) <= K;
}
bool check_k_shape(const Apcps& g, const AltProcess& p, unsigned K) {
    return shape_degree(g, p) <= K;
}

bool covers_nt(const Apcps& g, const StdProcess& p, std::uint32_t A) {
    Sym a = g.sym_of_nt(A);
    for (std::size_t i = 0; i < p.word.size(); ++i) {
        if (p.word[i] == a) return i == 0 || g.sym_commutative(a);
        if (!g.sym_commutative(p.word[i])) return false;
    }
    return false;
}

bool covers_nt(const Apcps& g, const AltProcess& p, std::uint32_t A) {
    Sym a = g.sym_of_nt(A);
    if (p.head == a) return true;
    if (p.head && !g.sym_commutative(*p.head)) return false;
    // Reachable from inside a summary only if A commutes.
    if (p.top.count(a) > 0) return g.sym_commutative(a);
    if (!p.tail.empty()) {
        // The first pivot may come to the front only over an empty prefix.
        if (p.tail.front().first == a) return !p.head && p.top.empty();
        // Anything deeper would need to commute past that pivot.
    }
    return false;
}

namespace {

template <class Config, class CoversProc>
bool config_covers_impl(const Config& cfg, const SimpleQuery& q, CoversProc covers) {
    if (!q.cover_chans.leq(cfg.chans)) return false;
    // Injective matching of target nonterminals onto processes.
    std::vector<std::uint32_t> targets = q.cover_procs;
    std::vector<Nat> used(cfg.procs.size(), 0);
    std::function<bool(std::size_t)> match = [&](std::size_t k) {
        if (k == targets.size()) return true;
        for (std::size_t j = 0; j < cfg.procs.size(); ++j) {
            if (used[j] >= cfg.procs[j].second) continue;
            if (!covers(cfg.procs[j].first, targets[k])) continue;
            ++used[j];
            if (match(k + 1)) return true;
            --used[j];
        }
        return false;
    };
    return match(0);
}

} // namespace

template <>
bool config_covers<StdConfig>(const Apcps& g, const StdConfig& cfg, const SimpleQuery& q) {
    return config_covers_impl(cfg, q, [&](const StdProcess& p, std::uint32_t A) {
        return covers_nt(g, p, A);
    });
}

template <>
bool config_covers<AltConfig>(const Apcps& g, const AltConfig& cfg, const SimpleQuery& q) {
    return config_covers_impl(cfg, q, [&](const AltProcess& p, std::uint32_t A) {
        return covers_nt(g, p, A);
    });
}

StdConfig initial_std_config(const Apcps& g, const SimpleQuery& q) {
    StdConfig c;
    for (std::uint32_t a : q.init_procs) c.add_proc(StdProcess{{g.sym_of_nt(a)}});
    c.chans = q.init_chans;
    return c;
}

AltConfig initial_alt_config(const Apcps& g, const SimpleQuery& q) {
    AltConfig c;
    for (std::uint32_t a : q.init_procs) {
        AltProcess p;
        p.head = g.sym_of_nt(a);
        c.add_proc(p);
    }
    c.chans = q.init_chans;
    return c;
}

// ---------------------------------------------------------------------------
// Exploration

StdExplore explore_standard(const Apcps& g, const SimpleQuery& q, const ExploreCaps& caps) {
    StdExplore out;
    StdConfig init = initial_std_config(g, q);
    std::set<StdConfig> seen{init};
    std::vector<StdConfig> frontier{init};
    out.covered = config_covers(g, init, q);
    for (std::uint64_t d = 0; d < caps.depth_cap && !frontier.empty(); ++d) {
        std::vector<StdConfig> next;
        for (const StdConfig& c : frontier)
            for (StdConfig& s : step_standard(g, c)) {
                if (seen.size() >= caps.state_cap) {
                    out.truncated = true;
                    break;
                }
                if (!seen.insert(s).second) continue;
                if (config_covers(g, s, q)) out.covered = true;
                next.push_back(std::move(s));
            }
        frontier = std::move(next);
    }
    if (!frontier.empty()) out.truncated = true;
    out.configs.assign(seen.begin(), seen.end());
    return out;
}

AltExplore explore_alternative(const Apcps& g, const SimpleQuery& q, const ExploreCaps& caps) {
    AltExplore out;
    AltConfig init = initial_alt_config(g, q);
    std::set<AltConfig> seen{init};
    std::vector<AltConfig> frontier{init};
    out.covered = config_covers(g, init, q);
    for (std::uint64_t d = 0; d < caps.depth_cap && !frontier.empty(); ++d) {
        std::vector<AltConfig> next;
        for (const AltConfig& c : frontier) {
            AltStepResult st = step_alternative(g, c, caps.parikh_budget);
            out.truncated = out.truncated || st.truncated;
            for (AltConfig& s : st.next) {
                if (seen.size() >= caps.state_cap) {
                    out.truncated = true;
                    break;
                }
                if (!seen.insert(s).second) continue;
                if (config_covers(g, s, q)) out.covered = true;
                next.push_back(std::move(s));
            }
        }
        frontier = std::move(next);
    }
    if (!frontier.empty()) out.truncated = true;
    out.configs.assign(seen.begin(), seen.end());
    return out;
}

} // namespace nnct
