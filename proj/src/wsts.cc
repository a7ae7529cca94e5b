#include "nnct/wsts.hh"

#include <algorithm>
#include <deque>
#include <future>
#include <unordered_map>
#include <unordered_set>

namespace nnct {

// ---------------------------------------------------------------------------
// Basis

bool Basis::is_antichain() const {
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = 0; j < elems.size(); ++j)
            if (i != j && leq_config(elems[i], elems[j])) return false;
    return true;
}

bool Basis::member_up(const Configuration& s) const {
    for (const Configuration& b : elems)
        if (leq_config(b, s)) return true;
    return false;
}

Basis minimize_basis(std::vector<Configuration> cands) {
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    Basis out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < cands.size() && !dominated; ++j)
            dominated = i != j && leq_config(cands[j], cands[i]);
        if (!dominated) out.elems.push_back(cands[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Predecessor basis
//
// The refined token order is zero-pattern preserving: a candidate token with
// count 0 at some colour denotes "exactly 0 there" in its upward closure.
// Wherever the minimal count of a guessed token would be 0 but larger values
// are admissible, we must emit both the 0-candidate and the 1-candidate.

namespace {

// Distinct token values of a bag together with their multiplicities.
const std::vector<std::pair<ComplexToken, Nat>>& bag_items(const Configuration& c, PlaceId p) {
    static const std::vector<std::pair<ComplexToken, Nat>> kEmpty;
    const TokenBag* b = c.bag(p);
    return b ? b->items : kEmpty;
}

// All ways to match requirement tokens at one place against the tokens a
// simple rule inserts there; yields the sub-bags left unmatched.
void match_place(const std::vector<std::pair<ComplexToken, Nat>>& reqs,
                 std::vector<std::pair<ComplexToken, Nat>> inserted, std::size_t ri,
                 Nat used_of_current, TokenBag unmatched, std::vector<TokenBag>& out) {
    if (ri == reqs.size()) {
        out.push_back(std::move(unmatched));
        return;
    }
    const auto& [req, req_n] = reqs[ri];
    Nat remaining = req_n - used_of_current;
    if (remaining == 0) {
        match_place(reqs, inserted, ri + 1, 0, std::move(unmatched), out);
        return;
    }
    // Leave the rest of this requirement unmatched.
    {
        TokenBag u = unmatched;
        u.add(req, remaining);
        match_place(reqs, inserted, ri + 1, 0, std::move(u), out);
    }
    // Or match one copy against some inserted token dominating it.
    for (std::size_t oi = 0; oi < inserted.size(); ++oi) {
        if (inserted[oi].second == 0) continue;
        if (!leq_token(req, inserted[oi].first)) continue;
        auto ins = inserted;
        ins[oi].second -= 1;
        match_place(reqs, std::move(ins), ri, used_of_current + 1, unmatched, out);
    }
}

Configuration simple_deficit(const Configuration& t, const Configuration& ruleO,
                             const Configuration& ruleI) {
    Configuration s;
    for (const auto& [p, n] : t.simple) {
        Nat o = ruleO.simple_count(p);
        if (n > o) s.add_simple(p, n - o);
    }
    for (const auto& [p, n] : ruleI.simple) s.add_simple(p, n);
    return s;
}

void preds_simple(const Configuration& t, const SimpleRule& r,
                  std::vector<Configuration>& out) {
    Configuration base = simple_deficit(t, r.out, r.in);
    // Per complex place, the local unmatched options; combine across places.
    std::vector<PlaceId> places;
    for (const auto& [p, bag] : t.complex) places.push_back(p);
    std::vector<std::vector<TokenBag>> options;
    for (PlaceId p : places) {
        std::vector<TokenBag> opts;
        match_place(bag_items(t, p), bag_items(r.out, p), 0, 0, TokenBag{}, opts);
        std::sort(opts.begin(), opts.end());
        opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
        options.push_back(std::move(opts));
    }
    std::vector<std::size_t> idx(places.size(), 0);
    while (true) {
        Configuration cand = base;
        for (std::size_t k = 0; k < places.size(); ++k)
            for (const auto& [tok, n] : options[k][idx[k]].items)
                cand.add_token(places[k], tok, n);
        for (const auto& [p, bag] : r.in.complex)
            for (const auto& [tok, n] : bag.items) cand.add_token(p, tok, n);
        out.push_back(std::move(cand));
        std::size_t k = 0;
        for (; k < places.size(); ++k) {
            if (++idx[k] < options[k].size()) break;
            idx[k] = 0;
        }
        if (k == places.size()) break;
    }
}

// Emits every zero-pattern completion of `token` over `free_colours`: each
// free colour independently stays absent or gets the minimal count 1.
void pattern_expand(const ComplexToken& token, const std::vector<ColourId>& free_colours,
                    std::size_t k, ComplexToken acc, std::vector<ComplexToken>& out) {
    if (k == free_colours.size()) {
        out.push_back(std::move(acc));
        return;
    }
    pattern_expand(token, free_colours, k + 1, acc, out);
    acc.add(free_colours[k], 1);
    pattern_expand(token, free_colours, k + 1, std::move(acc), out);
}

void preds_complex(const Net& net, const Configuration& t, const ComplexRule& r,
                   std::vector<Configuration>& out) {
    Configuration base = simple_deficit(t, r.out, r.in);
    std::vector<ColourId> all_colours;
    for (ColourId c = 0; c < net.colours.size(); ++c) all_colours.push_back(c);

    // Case: the moved token covers nothing; any token at the source place
    // does, so emit one minimal token per zero pattern.
    {
        std::vector<ComplexToken> tokens;
        pattern_expand(ComplexToken{}, all_colours, 0, ComplexToken{}, tokens);
        for (const ComplexToken& m : tokens) {
            Configuration cand = base;
            for (const auto& [p, bag] : t.complex)
                for (const auto& [tok, n] : bag.items) cand.add_token(p, tok, n);
            cand.add_token(r.from, m);
            out.push_back(std::move(cand));
        }
    }

    // Case: the moved token, after injection, covers one requirement at the
    // destination place.
    for (const auto& [req, req_n] : bag_items(t, r.to)) {
        bool feasible = true;
        ComplexToken floor;                 // forced minimal counts
        std::vector<ColourId> free_colours; // counts that may be 0 or 1
        for (ColourId c = 0; c < net.colours.size(); ++c) {
            Nat want = req.count(c), inj = r.inject.count(c);
            if (want == 0) {
                if (inj != 0) {
                    feasible = false; // injection breaks the zero pattern
                    break;
                }
            } else if (want > inj) {
                floor.set(c, want - inj);
            } else {
                free_colours.push_back(c); // injection alone suffices
            }
        }
        if (!feasible) continue;
        std::vector<ComplexToken> tokens;
        pattern_expand(floor, free_colours, 0, floor, tokens);
        for (const ComplexToken& m : tokens) {
            Configuration cand = base;
            for (const auto& [p, bag] : t.complex)
                for (const auto& [tok, n] : bag.items) cand.add_token(p, tok, n);
            cand.remove_token(r.to, req);
            cand.add_token(r.from, m);
            out.push_back(std::move(cand));
        }
    }
}

void preds_transfer(const Net& net, const Configuration& t, const TransferRule& r,
                    std::vector<Configuration>& out) {
    // Options per active colour: how many ejected tokens the moved token
    // contributes towards the deficit at zeta(c). 0 and 1 are distinct zero
    // patterns, so both appear even when the deficit is 0.
    std::vector<std::vector<Nat>> eject_options;
    for (ColourId c : r.active) {
        PlaceId q = net.colour_map[c];
        Nat deficit = 0;
        if (q < net.simple_places.size()) {
            Nat want = t.simple_count(q), have = r.out.simple_count(q);
            deficit = want > have ? want - have : 0;
        }
        std::vector<Nat> opts;
        for (Nat e = 0; e <= std::max<Nat>(deficit, 1); ++e) opts.push_back(e);
        eject_options.push_back(std::move(opts));
    }

    std::vector<ColourId> passive;
    for (ColourId c = 0; c < net.colours.size(); ++c)
        if (!std::binary_search(r.active.begin(), r.active.end(), c)) passive.push_back(c);

    auto emit = [&](const ComplexToken& residue_part, bool covers,
                    const ComplexToken& covered_req) {
        std::vector<std::size_t> idx(r.active.size(), 0);
        while (true) {
            ComplexToken m = residue_part;
            for (std::size_t k = 0; k < r.active.size(); ++k)
                m.add(r.active[k], eject_options[k][idx[k]]);
            Configuration cand;
            // Simple deficits net of rule output and the chosen ejections.
            for (const auto& [p, n] : t.simple) {
                Nat have = r.out.simple_count(p);
                for (std::size_t k = 0; k < r.active.size(); ++k)
                    if (net.colour_map[r.active[k]] == p)
                        have = checked_add(have, eject_options[k][idx[k]]);
                if (n > have) cand.add_simple(p, n - have);
            }
            for (const auto& [p, n] : r.in.simple) cand.add_simple(p, n);
            for (const auto& [p, bag] : t.complex)
                for (const auto& [tok, n] : bag.items) cand.add_token(p, tok, n);
            if (covers) cand.remove_token(r.to, covered_req);
            cand.add_token(r.from, m);
            out.push_back(std::move(cand));
            std::size_t k = 0;
            for (; k < r.active.size(); ++k) {
                if (++idx[k] < eject_options[k].size()) break;
                idx[k] = 0;
            }
            if (k == r.active.size()) break;
        }
    };

    // Case: the residue covers nothing; passive colours are unconstrained.
    {
        std::vector<ComplexToken> residues;
        pattern_expand(ComplexToken{}, passive, 0, ComplexToken{}, residues);
        for (const ComplexToken& res : residues) emit(res, false, ComplexToken{});
    }

    // Case: the residue covers a requirement at the destination, which must
    // then be zero on every active colour.
    for (const auto& [req, req_n] : bag_items(t, r.to)) {
        bool feasible = true;
        for (ColourId c : r.active)
            if (req.count(c) != 0) {
                feasible = false;
                break;
            }
        if (!feasible) continue;
        emit(req, true, req);
    }
}

} // namespace

std::vector<Configuration> pred_candidates(const Net& net, const Configuration& t,
                                           const Rule& rule) {
    std::vector<Configuration> out;
    if (const SimpleRule* r = rule.as_simple())
        preds_simple(t, *r, out);
    else if (const ComplexRule* r = rule.as_complex())
        preds_complex(net, t, *r, out);
    else if (const TransferRule* r = rule.as_transfer())
        preds_transfer(net, t, *r, out);
    for (Configuration& c : out) c.normalize();
    return out;
}

std::vector<Configuration> pred_basis(const Net& net, const Configuration& t) {
    std::vector<Configuration> all;
    for (const Rule& rule : net.rules) {
        auto cs = pred_candidates(net, t, rule);
        all.insert(all.end(), cs.begin(), cs.end());
    }
    return minimize_basis(std::move(all)).elems;
}

// ---------------------------------------------------------------------------
// Conserved place sets

bool is_conserved_set(const Net& net, const std::vector<PlaceId>& places) {
    auto sum = [&](const Configuration& c) {
        Nat s = 0;
        for (PlaceId p : places) s = checked_add(s, c.simple_count(p));
        return s;
    };
    for (const Rule& r : net.rules) {
        const Configuration *in = nullptr, *out = nullptr;
        if (const SimpleRule* s = r.as_simple()) {
            in = &s->in;
            out = &s->out;
        } else if (const ComplexRule* c = r.as_complex()) {
            in = &c->in;
            out = &c->out;
        } else if (const TransferRule* t = r.as_transfer()) {
            in = &t->in;
            out = &t->out;
            for (ColourId c : t->active)
                if (std::binary_search(places.begin(), places.end(), net.colour_map[c]))
                    return false; // ejections feed the set
        }
        if (sum(*in) != sum(*out)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Coverability by backward saturation

namespace {

struct SatElem {
    Configuration cfg;
    int parent = -1; // index of the element this is a predecessor of
    RuleId rule = 0;
};

// a <= b requires support(a) within support(b); one word per place sort.
std::pair<std::uint64_t, std::uint64_t> sat_mask(const Configuration& c) {
    std::uint64_t s = 0, x = 0;
    for (const auto& [p, n] : c.simple) s |= 1ULL << (p % 64);
    for (const auto& [p, bag] : c.complex) x |= 1ULL << (p % 64);
    return {s, x};
}

} // namespace

CoverResult decide_coverability(const Query& q, const EngineOptions& opts) {
    CoverResult res;
    const Net& net = q.net;

    std::vector<std::pair<std::vector<PlaceId>, Nat>> prunes;
    for (const auto& set : opts.conserved) {
        std::vector<PlaceId> s = set;
        std::sort(s.begin(), s.end());
        if (!is_conserved_set(net, s)) continue;
        Nat v = 0;
        for (PlaceId p : s) v = checked_add(v, q.initial.simple_count(p));
        prunes.emplace_back(std::move(s), v);
    }
    auto prunable = [&](const Configuration& c) {
        for (const auto& [set, value] : prunes) {
            Nat s = 0;
            for (PlaceId p : set) s = checked_add(s, c.simple_count(p));
            if (s > value) return true;
        }
        return false;
    };

    std::vector<SatElem> all;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> masks;
    std::vector<int> basis;   // indices of current antichain members
    std::deque<int> frontier; // FIFO over basis elements

    auto build_witness = [&](int e) {
        std::vector<WitnessStep> steps;
        Configuration cur = q.initial;
        while (all[e].parent != -1) {
            const Configuration& goal = all[all[e].parent].cfg;
            const Rule& rule = net.rules[all[e].rule];
            bool found = false;
            for (const Step& st : enumerate_steps(net, cur)) {
                if (st.rule == all[e].rule && leq_config(goal, st.next)) {
                    steps.push_back({st.rule, st.pick});
                    cur = st.next;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw std::logic_error("witness replay failed for rule " + rule.name);
            e = all[e].parent;
        }
        return steps;
    };

    Configuration target = q.target;
    target.normalize();
    if (prunable(target)) {
        res.outcome = Outcome::no;
        return res;
    }
    all.push_back({target, -1, 0});
    masks.push_back(sat_mask(target));
    basis.push_back(0);
    frontier.push_back(0);
    if (leq_config(target, q.initial)) {
        res.outcome = Outcome::yes;
        res.basis_size = 1;
        return res;
    }

    auto in_basis_up = [&](const Configuration& c) {
        auto m = sat_mask(c);
        for (int b : basis) {
            if ((masks[b].first & ~m.first) || (masks[b].second & ~m.second)) continue;
            if (leq_config(all[b].cfg, c)) return true;
        }
        return false;
    };

    while (!frontier.empty()) {
        // Dequeue a batch; pred computation is pure, so batches may fan out.
        std::vector<int> batch;
        unsigned width = std::max(1u, opts.jobs);
        while (!frontier.empty() && batch.size() < width) {
            int e = frontier.front();
            frontier.pop_front();
            if (std::find(basis.begin(), basis.end(), e) != basis.end()) batch.push_back(e);
        }
        if (batch.empty()) continue;
        if (res.expanded + batch.size() > opts.budget) {
            res.outcome = Outcome::budget;
            res.basis_size = basis.size();
            return res;
        }
        res.expanded += batch.size();

        std::vector<std::vector<std::pair<Configuration, RuleId>>> pred_lists(batch.size());
        auto worker = [&](std::size_t k) {
            std::vector<std::pair<Configuration, RuleId>> preds;
            for (RuleId ri = 0; ri < net.rules.size(); ++ri)
                for (Configuration& c : pred_candidates(net, all[batch[k]].cfg, net.rules[ri]))
                    preds.emplace_back(std::move(c), ri);
            pred_lists[k] = std::move(preds);
        };
        if (opts.jobs > 1 && batch.size() > 1) {
            std::vector<std::future<void>> futs;
            for (std::size_t k = 0; k < batch.size(); ++k)
                futs.push_back(std::async(std::launch::async, worker, k));
            for (auto& f : futs) f.get();
        } else {
            for (std::size_t k = 0; k < batch.size(); ++k) worker(k);
        }

        for (std::size_t k = 0; k < batch.size(); ++k) {
            for (auto& [cand, ri] : pred_lists[k]) {
                if (prunable(cand) || in_basis_up(cand)) continue;
                int idx = static_cast<int>(all.size());
                auto cm = sat_mask(cand);
                all.push_back({cand, batch[k], ri});
                masks.push_back(cm);
                // Evict basis elements the new one strictly subsumes.
                basis.erase(std::remove_if(basis.begin(), basis.end(),
                                           [&](int b) {
                                               if ((cm.first & ~masks[b].first) ||
                                                   (cm.second & ~masks[b].second))
                                                   return false;
                                               return leq_config(cand, all[b].cfg);
                                           }),
                            basis.end());
                basis.push_back(idx);
                frontier.push_back(idx);
                if (leq_config(cand, q.initial)) {
                    res.outcome = Outcome::yes;
                    res.witness = build_witness(idx);
                    res.basis_size = basis.size();
                    return res;
                }
            }
        }
    }
    res.outcome = Outcome::no;
    res.basis_size = basis.size();
    return res;
}

// ---------------------------------------------------------------------------
// Reachability-tree deciders

namespace {

struct TreeFrame {
    Configuration cfg;
    std::vector<Step> steps;
    std::size_t next = 0;
    WitnessStep via; // step from the parent (unused at the root)
};

std::uint64_t support_mask(const Configuration& c) {
    std::uint64_t m = 0;
    for (const auto& [p, n] : c.simple) m |= 1ULL << (p % 64);
    for (const auto& [p, bag] : c.complex) m |= 1ULL << ((p + 17) % 64);
    return m;
}

} // namespace

TermResult decide_termination(const Query& q, const EngineOptions& opts) {
    TermResult res;
    const Net& net = q.net;
    std::vector<TreeFrame> stack;
    std::vector<std::uint64_t> masks;
    stack.push_back({q.initial, enumerate_steps(net, q.initial), 0, {}});
    masks.push_back(support_mask(q.initial));
    res.expanded = 1;

    while (!stack.empty()) {
        TreeFrame& top = stack.back();
        if (top.next >= top.steps.size()) {
            stack.pop_back();
            masks.pop_back();
            continue;
        }
        Step st = top.steps[top.next++];
        std::uint64_t mask = support_mask(st.next);
        // An ancestor below the new node pumps an infinite run.
        for (std::size_t a = 0; a < stack.size(); ++a) {
            if ((masks[a] & ~mask) != 0) continue;
            if (!leq_config(stack[a].cfg, st.next)) continue;
            for (std::size_t k = 1; k <= a; ++k) res.stem.push_back(stack[k].via);
            for (std::size_t k = a + 1; k < stack.size(); ++k)
                res.pump.push_back(stack[k].via);
            res.pump.push_back({st.rule, st.pick});
            res.outcome = Outcome::no; // nonterminating
            return res;
        }
        if (res.expanded >= opts.budget) {
            res.outcome = Outcome::budget;
            return res;
        }
        ++res.expanded;
        stack.push_back({st.next, enumerate_steps(net, st.next), 0, {st.rule, st.pick}});
        masks.push_back(mask);
    }
    res.outcome = Outcome::yes; // terminating
    return res;
}

BoundResult decide_boundedness(const Query& q, const EngineOptions& opts) {
    BoundResult res;
    const Net& net = q.net;
    std::unordered_set<Configuration, ConfigHash> seen;
    std::vector<TreeFrame> stack;
    std::vector<std::uint64_t> masks;
    stack.push_back({q.initial, enumerate_steps(net, q.initial), 0, {}});
    masks.push_back(support_mask(q.initial));
    seen.insert(q.initial);
    res.expanded = 1;

    while (!stack.empty()) {
        TreeFrame& top = stack.back();
        if (top.next >= top.steps.size()) {
            stack.pop_back();
            masks.pop_back();
            continue;
        }
        Step st = top.steps[top.next++];
        std::uint64_t mask = support_mask(st.next);
        bool repeat = false;
        for (std::size_t a = 0; a < stack.size() && !repeat; ++a) {
            if ((masks[a] & ~mask) != 0) continue;
            if (!leq_config(stack[a].cfg, st.next)) continue;
            if (stack[a].cfg == st.next) {
                repeat = true; // exact ancestor repeat: prune this branch
                break;
            }
            // Strict domination of an ancestor: strictness pumps forever.
            for (std::size_t k = 1; k <= a; ++k) res.stem.push_back(stack[k].via);
            for (std::size_t k = a + 1; k < stack.size(); ++k)
                res.pump.push_back(stack[k].via);
            res.pump.push_back({st.rule, st.pick});
            res.outcome = Outcome::no; // unbounded
            res.state_count = seen.size();
            return res;
        }
        if (repeat) continue;
        if (res.expanded >= opts.budget) {
            res.outcome = Outcome::budget;
            res.state_count = seen.size();
            return res;
        }
        ++res.expanded;
        seen.insert(st.next);
        stack.push_back({st.next, enumerate_steps(net, st.next), 0, {st.rule, st.pick}});
        masks.push_back(mask);
    }
    res.outcome = Outcome::yes; // bounded
    res.state_count = seen.size();
    return res;
}

// ---------------------------------------------------------------------------
// Forward oracle

namespace {

bool within_norm(const Configuration& c, Nat bound) {
    for (const auto& [p, n] : c.simple)
        if (n >= bound) return false;
    for (const auto& [p, bag] : c.complex) {
        if (bag.total() >= bound) return false;
        if (bag.max_colour_norm() >= bound) return false;
    }
    return true;
}

} // namespace

ReachSet forward_reach_oracle(const Net& net, const Configuration& initial, Nat norm_bound,
                              std::uint64_t step_bound, std::uint64_t state_cap) {
    ReachSet out;
    if (!within_norm(initial, norm_bound)) {
        out.truncated = true;
        return out;
    }
    std::unordered_set<Configuration, ConfigHash> seen{initial};
    std::vector<Configuration> frontier{initial};
    for (std::uint64_t depth = 0; depth < step_bound && !frontier.empty(); ++depth) {
        std::vector<Configuration> next;
        for (const Configuration& c : frontier) {
            for (Configuration& s : successors(net, c)) {
                if (!within_norm(s, norm_bound)) {
                    out.truncated = true;
                    continue;
                }
                if (seen.size() >= state_cap) {
                    out.truncated = true;
                    continue;
                }
                if (seen.insert(s).second) next.push_back(std::move(s));
            }
        }
        frontier = std::move(next);
    }
    if (!frontier.empty()) out.truncated = true;
    out.configs.assign(seen.begin(), seen.end());
    std::sort(out.configs.begin(), out.configs.end());
    return out;
}

Configuration replay(const Net& net, const Configuration& initial,
                     const std::vector<WitnessStep>& steps) {
    Configuration cur = initial;
    for (const WitnessStep& st : steps) cur = fire_rule(net, cur, net.rules[st.rule], st.pick);
    return cur;
}

} // namespace nnct
