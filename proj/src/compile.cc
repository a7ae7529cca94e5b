#include "nnct/compile.hh"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace nnct {

namespace {

// Characters annotating summaries: terminal-only, mixed, or exposing the
// i-th cover target.
constexpr std::int32_t kPlus = -1;
constexpr std::int32_t kMinus = -2;
using Character = std::int32_t;

struct PlaceKey {
    bool widget = false;
    std::optional<Sym> head; // nullopt = epsilon
    std::vector<Character> chars;   // top first, size = pivots.size() + 1
    std::vector<std::uint32_t> pivots; // non-commutative nonterminals, top first
    auto operator<=>(const PlaceKey&) const = default;
};

struct Builder {
    const Apcps& g;
    unsigned K;
    const SimpleQuery& query;
    CompiledNet out;

    std::vector<std::uint32_t> sigma_com; // commutative terminal indices
    std::vector<PlaceId> chan_place;      // (chan * n_msg + msg) -> place
    std::map<std::uint32_t, PlaceId> spawn_place;
    std::vector<PlaceId> ccfg_nt_place;
    PlaceId budget_place = 0, sim = 0, ccfg = 0, ccfg_plus = 0, query_mode = 0;
    std::vector<PlaceId> cover_place;

    std::map<PlaceKey, PlaceId> place_of;
    std::deque<PlaceKey> work;

    Builder(const Apcps& gg, unsigned k, const SimpleQuery& q) : g(gg), K(k), query(q) {}

    ColourId colour_id(unsigned level, std::uint32_t sigma_index) const {
        return static_cast<ColourId>((level - 1) * sigma_com.size() + sigma_index);
    }

    std::string char_name(Character c) const {
        if (c == kPlus) return "+";
        if (c == kMinus) return "-";
        return "cov" + std::to_string(c);
    }

    std::string key_name(const PlaceKey& k) const {
        std::ostringstream os;
        os << (k.widget ? "W[" : "P[");
        os << (k.head ? g.show_sym(*k.head) : std::string("eps"));
        for (std::size_t j = 0; j < k.chars.size(); ++j) {
            os << '|' << char_name(k.chars[j]);
            if (j < k.pivots.size()) os << '|' << g.nonterminals[k.pivots[j]];
        }
        os << ']';
        return os.str();
    }

    PlaceId place(const PlaceKey& k) {
        auto it = place_of.find(k);
        if (it != place_of.end()) return it->second;
        PlaceId p = out.net.add_complex(key_name(k));
        out.complex_roles.emplace(
            p, PlaceInfo{k.widget ? PlaceRole::widget : PlaceRole::process, key_name(k)});
        place_of.emplace(k, p);
        work.push_back(k);
        return p;
    }

    Configuration mark(PlaceId p, Nat n = 1) {
        Configuration c;
        c.add_simple(p, n);
        return c;
    }

    void simple_rule(const std::string& name, Configuration in, Configuration out_) {
        SimpleRule r;
        r.in = std::move(in);
        r.out = std::move(out_);
        out.net.add_rule({name, std::move(r)});
    }

    void complex_rule(const std::string& name, const PlaceKey& from, Configuration in,
                      const PlaceKey& to, ComplexToken inject, Configuration out_) {
        ComplexRule r;
        r.from = place(from);
        r.to = place(to);
        r.inject = std::move(inject);
        r.in = std::move(in);
        r.out = std::move(out_);
        out.net.add_rule({name, std::move(r)});
    }

    void transfer_rule(const std::string& name, const PlaceKey& from, Configuration in,
                       const PlaceKey& to, unsigned level, Configuration out_) {
        TransferRule r;
        r.from = place(from);
        r.to = place(to);
        for (std::uint32_t si = 0; si < sigma_com.size(); ++si)
            r.active.push_back(colour_id(level, si));
        std::sort(r.active.begin(), r.active.end());
        r.in = std::move(in);
        r.out = std::move(out_);
        out.net.add_rule({name, std::move(r)});
    }

    void emit_rules_for(const PlaceKey& key);
    void run();
};

void Builder::emit_rules_for(const PlaceKey& key) {
    const unsigned k = static_cast<unsigned>(key.pivots.size());
    const Nat nnts = g.n_nts();
    std::string base = key_name(key);

    if (key.widget) {
        // Exit: the budget back at |N|+1 certifies an empty widget.
        {
            Configuration in = mark(key.chars[0] == kPlus ? ccfg_plus : ccfg);
            in.add_simple(budget_place, checked_add(nnts, 1));
            PlaceKey to = key;
            to.widget = false;
            complex_rule(base + "/exit", key, in, to, {}, mark(sim));
        }
        PlaceId mode = key.chars[0] == kPlus ? ccfg_plus : ccfg;
        for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
            const ApcpsRule& r = g.rules[ri];
            if (!g.nt_commutative[r.lhs]) continue;
            std::string rn = base + "/g" + std::to_string(ri);
            if (r.kind == ApcpsRule::Kind::pair) {
                Configuration in = mark(mode);
                in.add_simple(ccfg_nt_place[r.lhs], 1);
                in.add_simple(budget_place, 2);
                Configuration o = mark(mode);
                o.add_simple(ccfg_nt_place[r.y], 1);
                o.add_simple(ccfg_nt_place[r.z], 1);
                o.add_simple(budget_place, 1);
                complex_rule(rn, key, in, key, {}, o);
                if (key.chars[0] == kMinus) {
                    // A cover nonterminal may be exposed as the character.
                    for (std::size_t ci = 0; ci < query.cover_procs.size(); ++ci) {
                        for (std::uint32_t w : {r.y, r.z}) {
                            if (w != query.cover_procs[ci]) continue;
                            PlaceKey to = key;
                            to.chars[0] = static_cast<Character>(ci);
                            complex_rule(rn + "/expose" + std::to_string(ci), key, in, to,
                                         {}, o);
                        }
                    }
                }
            } else {
                // lhs -> terminal or epsilon: inject the action at the top
                // level and refund one budget token.
                ComplexToken inject;
                if (r.kind == ApcpsRule::Kind::terminal) {
                    auto it = std::find(sigma_com.begin(), sigma_com.end(), r.term);
                    if (it == sigma_com.end()) continue; // receive: impossible
                    inject.set(colour_id(k + 1,
                                         static_cast<std::uint32_t>(it - sigma_com.begin())),
                               1);
                }
                Configuration in = mark(mode);
                in.add_simple(ccfg_nt_place[r.lhs], 1);
                Configuration o = mark(mode);
                o.add_simple(budget_place, 1);
                complex_rule(rn, key, in, key, std::move(inject), o);
            }
        }
        return;
    }

    // --- plain process places ---
    if (key.head && g.is_nt(*key.head)) {
        std::uint32_t A = g.nt_of(*key.head);
        for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
            const ApcpsRule& r = g.rules[ri];
            if (r.lhs != A) continue;
            std::string rn = base + "/g" + std::to_string(ri);
            if (g.rule_dagger[ri]) {
                // Enter the widget, priming the grammar counter of the
                // commutative symbol with the full budget.
                Configuration o0 = mark(budget_place, nnts);
                o0.add_simple(ccfg_nt_place[r.z], 1);
                PlaceKey toSame = key;
                toSame.widget = true;
                toSame.head = g.sym_of_nt(r.y);
                if (key.chars[0] == kPlus) {
                    Configuration o = oplus(o0, mark(ccfg_plus));
                    complex_rule(rn + "/wplus", key, mark(sim), toSame, {}, o);
                    PlaceKey toMinus = toSame;
                    toMinus.chars[0] = kMinus;
                    Configuration o2 = oplus(o0, mark(ccfg));
                    complex_rule(rn + "/wminus", key, mark(sim), toMinus, {}, o2);
                } else {
                    Configuration o = oplus(o0, mark(ccfg));
                    complex_rule(rn + "/w", key, mark(sim), toSame, {}, o);
                }
                // The commutative symbol itself may be a cover target; its
                // membership of the new cache can be committed right away (a
                // run that drops it instead always matches).
                for (std::size_t ci = 0; ci < query.cover_procs.size(); ++ci) {
                    if (query.cover_procs[ci] != r.z) continue;
                    PlaceKey toCov = toSame;
                    toCov.chars[0] = static_cast<Character>(ci);
                    Configuration o = oplus(o0, mark(ccfg));
                    complex_rule(rn + "/wexpose" + std::to_string(ci), key, mark(sim),
                                 toCov, {}, o);
                }
            } else if (r.kind == ApcpsRule::Kind::pair) {
                if (k < K) {
                    PlaceKey to;
                    to.head = g.sym_of_nt(r.y);
                    to.chars.push_back(kPlus);
                    to.chars.insert(to.chars.end(), key.chars.begin(), key.chars.end());
                    to.pivots.push_back(r.z);
                    to.pivots.insert(to.pivots.end(), key.pivots.begin(), key.pivots.end());
                    complex_rule(rn, key, mark(sim), to, {}, mark(sim));
                }
            } else {
                PlaceKey to = key;
                to.head = r.kind == ApcpsRule::Kind::terminal
                              ? std::optional<Sym>(g.sym_of_term(r.term))
                              : std::nullopt;
                complex_rule(rn, key, mark(sim), to, {}, mark(sim));
            }
        }
        // Query widget: the head is a cover target.
        for (std::size_t ci = 0; ci < query.cover_procs.size(); ++ci) {
            if (query.cover_procs[ci] != A) continue;
            PlaceKey to = key;
            to.head = std::nullopt;
            to.chars[0] = kMinus;
            Configuration o = mark(query_mode);
            o.add_simple(cover_place[ci], 1);
            complex_rule(base + "/cov" + std::to_string(ci), key, mark(query_mode), to, {},
                         o);
        }
        return;
    }

    if (key.head) {
        const Terminal& t = g.terminals[g.term_of(*key.head)];
        PlaceKey to = key;
        to.head = std::nullopt;
        Configuration in = mark(sim), o = mark(sim);
        switch (t.kind) {
            case Terminal::Kind::send:
                o.add_simple(chan_place[t.chan * g.messages.size() + t.msg], 1);
                break;
            case Terminal::Kind::recv:
                in.add_simple(chan_place[t.chan * g.messages.size() + t.msg], 1);
                break;
            case Terminal::Kind::spawn:
                o.add_simple(spawn_place.at(t.spawn_nt), 1);
                break;
        }
        complex_rule(base + "/act", key, in, to, {}, o);
        return;
    }

    // --- epsilon head: dispatch ---
    if (key.chars[0] == kPlus && k >= 1) {
        PlaceKey to;
        to.head = g.sym_of_nt(key.pivots[0]);
        to.chars.assign(key.chars.begin() + 1, key.chars.end());
        to.pivots.assign(key.pivots.begin() + 1, key.pivots.end());
        transfer_rule(base + "/pop", key, mark(sim), to, k + 1, mark(sim));
    }
    if (key.chars[0] != kPlus || k == 0) {
        // Dispatch in place; the nonterminal residue of a mixed cache stays
        // behind (the process then blocks).
        transfer_rule(base + "/flush", key, mark(sim), key, k + 1, mark(sim));
    }
    if (key.chars[0] >= 0) {
        // The top cache exposes a cover target.
        std::size_t ci = static_cast<std::size_t>(key.chars[0]);
        PlaceKey to = key;
        to.chars[0] = kMinus;
        Configuration o = mark(query_mode);
        o.add_simple(cover_place[ci], 1);
        complex_rule(base + "/cov" + std::to_string(ci), key, mark(query_mode), to, {}, o);
    }
}

void Builder::run() {
    Net& net = out.net;
    net.name = "apcps";

    for (std::uint32_t t = 0; t < g.terminals.size(); ++t)
        if (g.term_commutative(t)) sigma_com.push_back(t);

    // Simple places.
    chan_place.resize(g.channels.size() * g.messages.size());
    for (std::uint32_t c = 0; c < g.channels.size(); ++c)
        for (std::uint32_t m = 0; m < g.messages.size(); ++m) {
            PlaceId p = net.add_simple("ch_" + g.channels[c] + "_" + g.messages[m]);
            out.simple_roles.emplace(p, PlaceInfo{PlaceRole::channel,
                                                  g.channels[c] + "!" + g.messages[m]});
            chan_place[c * g.messages.size() + m] = p;
        }
    for (std::uint32_t t : sigma_com) {
        if (g.terminals[t].kind != Terminal::Kind::spawn) continue;
        std::uint32_t X = g.terminals[t].spawn_nt;
        if (spawn_place.count(X)) continue;
        PlaceId p = net.add_simple("nu_" + g.nonterminals[X]);
        out.simple_roles.emplace(p, PlaceInfo{PlaceRole::spawn, g.nonterminals[X]});
        spawn_place.emplace(X, p);
    }
    for (std::uint32_t n = 0; n < g.n_nts(); ++n) {
        PlaceId p = net.add_simple("ccfgN_" + g.nonterminals[n]);
        out.simple_roles.emplace(p, PlaceInfo{PlaceRole::ccfg_nt, g.nonterminals[n]});
        ccfg_nt_place.push_back(p);
    }
    budget_place = net.add_simple("ccfg_budget");
    out.simple_roles.emplace(budget_place, PlaceInfo{PlaceRole::ccfg_budget, ""});
    sim = net.add_simple("mode_sim");
    out.simple_roles.emplace(sim, PlaceInfo{PlaceRole::mode_sim, ""});
    ccfg = net.add_simple("mode_ccfg");
    out.simple_roles.emplace(ccfg, PlaceInfo{PlaceRole::mode_ccfg, ""});
    ccfg_plus = net.add_simple("mode_ccfgp");
    out.simple_roles.emplace(ccfg_plus, PlaceInfo{PlaceRole::mode_ccfg_plus, ""});
    query_mode = net.add_simple("mode_query");
    out.simple_roles.emplace(query_mode, PlaceInfo{PlaceRole::mode_query, ""});
    for (std::size_t ci = 0; ci < query.cover_procs.size(); ++ci) {
        PlaceId p = net.add_simple("cov_" + std::to_string(ci) + "_" +
                                   g.nonterminals[query.cover_procs[ci]]);
        out.simple_roles.emplace(
            p, PlaceInfo{PlaceRole::cover, g.nonterminals[query.cover_procs[ci]]});
        cover_place.push_back(p);
    }

    // Colours: one per (level, commutative terminal).
    for (unsigned level = 1; level <= K + 1; ++level)
        for (std::uint32_t si = 0; si < sigma_com.size(); ++si) {
            const Terminal& t = g.terminals[sigma_com[si]];
            PlaceId target = t.kind == Terminal::Kind::spawn
                                 ? spawn_place.at(t.spawn_nt)
                                 : chan_place[t.chan * g.messages.size() + t.msg];
            net.add_colour("L" + std::to_string(level) + "_" + g.show_sym(g.sym_of_term(sigma_com[si])),
                           target);
        }

    // Global rules.
    simple_rule("query_switch", mark(sim), mark(query_mode));
    for (const auto& [X, p] : spawn_place) {
        SimpleRule r;
        r.in = mark(p, 1);
        r.in.add_simple(sim, 1);
        r.out = mark(sim);
        PlaceKey kx;
        kx.head = g.sym_of_nt(X);
        kx.chars = {kPlus};
        r.out.add_token(place(kx), ComplexToken{});
        net.add_rule({"weak_spawn_" + g.nonterminals[X], r});
    }
    for (std::uint32_t n = 0; n < g.n_nts(); ++n) {
        if (!g.nt_commutative[n]) continue;
        SimpleRule r;
        r.in = mark(ccfg);
        r.in.add_simple(ccfg_nt_place[n], 1);
        r.out = mark(ccfg);
        r.out.add_simple(budget_place, 1);
        net.add_rule({"drop_" + g.nonterminals[n], r});
    }

    // Initial representation and targets seed the worklist.
    out.initial.add_simple(sim, 1);
    for (std::uint32_t A : query.init_procs) {
        PlaceKey kx;
        kx.head = g.sym_of_nt(A);
        kx.chars = {kPlus};
        out.initial.add_token(place(kx), ComplexToken{});
    }
    for (const auto& [cm, n] : query.init_chans.items)
        out.initial.add_simple(chan_place[cm.first * g.messages.size() + cm.second], n);
    for (PlaceId p : cover_place) out.target.add_simple(p, 1);
    for (const auto& [cm, n] : query.cover_chans.items)
        out.target.add_simple(chan_place[cm.first * g.messages.size() + cm.second], n);

    while (!work.empty()) {
        PlaceKey k = work.front();
        work.pop_front();
        emit_rules_for(k);
    }

    // Size accounting: the unpruned place-family count from the parameters.
    // Per family: heads x sum_k (#pivot sequences of length k) x (#character
    // sequences of length k+1); the overflow places add one pivot more with
    // restricted heads.
    std::uint64_t noncom = 0;
    for (std::uint32_t n = 0; n < g.n_nts(); ++n)
        if (!g.nt_commutative[n]) ++noncom;
    std::uint64_t heads = g.terminals.size() + g.n_nts() + 1;
    std::uint64_t chars = query.cover_procs.size() + 2;
    std::uint64_t seq = 0, lv = chars, top = chars; // noncom^k * chars^{k+1}
    for (unsigned kk = 0; kk <= K; ++kk) {
        seq += lv;
        top = lv;
        lv = checked_mul(lv, noncom * chars);
    }
    out.stats.complex_places_full =
        2 * heads * seq + (g.terminals.size() + 1) * g.n_nts() * top;
    out.stats.simple_places = net.n_simple();
    out.stats.complex_places = net.n_complex();
    out.stats.colours = net.n_colours();
    out.stats.rules = net.rules.size();
}

} // namespace

std::vector<std::vector<PlaceId>> CompiledNet::conserved_hints() const {
    std::vector<PlaceId> modes;
    for (const auto& [p, info] : simple_roles)
        if (info.role == PlaceRole::mode_sim || info.role == PlaceRole::mode_ccfg ||
            info.role == PlaceRole::mode_ccfg_plus || info.role == PlaceRole::mode_query)
            modes.push_back(p);
    return {modes};
}

CompiledNet compile_apcps_to_nnct(const Apcps& g, unsigned K, const SimpleQuery& query) {
    if (K < 1) throw std::invalid_argument("K must be at least 1");
    if (!g.classified) throw std::invalid_argument("grammar must be classified");
    Builder b(g, K, query);
    b.run();
    validate_net_or_throw(b.out.net);
    return std::move(b.out);
}

} // namespace nnct
