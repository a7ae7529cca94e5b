#include "nnct/yardstick.hh"

#include <algorithm>
#include <sstream>

namespace nnct {

std::vector<Diagnostic> validate_machine(const CounterMachine& m) {
    std::vector<Diagnostic> out;
    if (m.labels.size() != m.instrs.size())
        out.push_back({"machine", "one instruction per label required"});
    if (m.entry >= m.instrs.size()) out.push_back({"machine", "entry label undefined"});
    for (std::size_t k = 0; k < m.instrs.size(); ++k) {
        const auto& in = m.instrs[k];
        auto check = [&](std::uint32_t l) {
            if (l >= m.instrs.size())
                out.push_back({m.labels[k], "jump target undefined"});
        };
        switch (in.op) {
            case CounterMachine::Instr::Op::halt:
                break;
            case CounterMachine::Instr::Op::tz:
                check(in.go1);
                check(in.go2);
                break;
            default:
                check(in.go1);
        }
        if (in.counter > 1) out.push_back({m.labels[k], "counter must be x or y"});
    }
    return out;
}

Nat counter_bound(unsigned n) {
    Nat b = 1;
    for (unsigned k = 0; k < n; ++k) {
        if (b > 63) throw std::invalid_argument("tower level too large for the yardstick");
        b = Nat(1) << b;
    }
    return b;
}

RunResult run_counter_machine(const CounterMachine& m, std::uint64_t step_cap) {
    auto diags = validate_machine(m);
    if (!diags.empty()) throw std::invalid_argument("invalid machine");
    const Nat bound = counter_bound(m.n);
    Nat v[2] = {0, 0};
    std::uint32_t pc = m.entry;
    RunResult res;
    while (res.steps < step_cap) {
        const auto& in = m.instrs[pc];
        if (in.op == CounterMachine::Instr::Op::halt) {
            res.outcome = RunOutcome::halt;
            return res;
        }
        ++res.steps;
        switch (in.op) {
            case CounterMachine::Instr::Op::halt:
                break;
            case CounterMachine::Instr::Op::inc:
                if (v[in.counter] == bound) {
                    res.outcome = RunOutcome::stuck;
                    return res;
                }
                ++v[in.counter];
                pc = in.go1;
                break;
            case CounterMachine::Instr::Op::dec:
                if (v[in.counter] == 0) {
                    res.outcome = RunOutcome::stuck;
                    return res;
                }
                --v[in.counter];
                pc = in.go1;
                break;
            case CounterMachine::Instr::Op::reset:
                v[in.counter] = 0;
                pc = in.go1;
                break;
            case CounterMachine::Instr::Op::tz:
                pc = v[in.counter] == 0 ? in.go1 : in.go2;
                break;
        }
    }
    res.outcome = RunOutcome::cap;
    return res;
}

// ---------------------------------------------------------------------------
// The compiler

namespace {

struct Counter {
    PlaceId pos = 0, neg = 0;
    unsigned level = 1;
    std::string name;
};

struct Array {
    PlaceId arr = 0, arr_bar = 0, aux = 0;
    ColourId j = 0, jbar = 0;
    unsigned level = 1;
};

// Shared subroutines are keyed by an opcode string; call sites thread a
// return token through a dedicated place.
struct Macro {
    PlaceId entry = 0, exit = 0;
};

class Builder {
public:
    Net net;
    unsigned n = 1;
    std::map<std::string, Counter> counters;
    std::map<unsigned, Array> arrays;
    PlaceId disc = 0;
    bool has_disc = false;
    std::vector<PlaceId> ctrls;
    std::map<std::string, Macro> macros;
    unsigned fresh = 0;

    PlaceId ctrl(const std::string& hint) {
        PlaceId p = net.add_simple("k" + std::to_string(fresh++) + "_" + hint);
        ctrls.push_back(p);
        return p;
    }

    void rule(const std::string& name, Configuration in, Configuration out) {
        SimpleRule r;
        r.in = std::move(in);
        r.out = std::move(out);
        net.add_rule({name + "#" + std::to_string(net.rules.size()), std::move(r)});
    }

    static Configuration at(PlaceId p, Nat k = 1) {
        Configuration c;
        c.add_simple(p, k);
        return c;
    }

    // A plain control move with optional extra tokens on both sides.
    PlaceId move(PlaceId from, const std::string& hint, Configuration extra_in = {},
                 Configuration extra_out = {}) {
        PlaceId to = ctrl(hint);
        Configuration in = oplus(at(from), extra_in);
        Configuration out = oplus(at(to), extra_out);
        rule(hint, std::move(in), std::move(out));
        return to;
    }

    // --- counters -----------------------------------------------------------

    const Counter& C(const std::string& d) const { return counters.at(d); }

    PlaceId inc(PlaceId c, const std::string& d) {
        return move(c, "inc_" + d, at(C(d).neg), at(C(d).pos));
    }
    PlaceId dec(PlaceId c, const std::string& d) {
        return move(c, "dec_" + d, at(C(d).pos), at(C(d).neg));
    }

    // Calls a macro, minting a fresh return place per call site.
    PlaceId call(PlaceId c, const Macro& m, const std::string& hint) {
        PlaceId ret = net.add_simple("r" + std::to_string(fresh++) + "_" + hint);
        rule("call_" + hint, at(c), oplus(at(m.entry), at(ret)));
        PlaceId back = ctrl("ret_" + hint);
        rule("ret_" + hint, oplus(at(m.exit), at(ret)), at(back));
        return back;
    }

    PlaceId iszero(PlaceId c, const std::string& d) {
        const Counter& k = C(d);
        if (k.level == 1) {
            Nat b = counter_bound(1);
            return move(c, "iszero_" + d, at(k.neg, b), at(k.neg, b));
        }
        return call(c, macro_iszero(d), "iszero_" + d);
    }

    PlaceId ismax(PlaceId c, const std::string& d) {
        const Counter& k = C(d);
        if (k.level == 1) {
            Nat b = counter_bound(1);
            return move(c, "ismax_" + d, at(k.pos, b), at(k.pos, b));
        }
        return call(c, macro_ismax(d), "ismax_" + d);
    }

    PlaceId reset(PlaceId c, const std::string& d) {
        // while (d != 0) dec d; the exit branch proves emptiness.
        rule("reset_loop_" + d, oplus(at(c), at(C(d).pos)), oplus(at(c), at(C(d).neg)));
        return iszero(c, d);
    }

    PlaceId activate(PlaceId c, const std::string& d) {
        const Counter& k = C(d);
        if (k.level == 1) return move(c, "act_" + d, {}, at(k.neg, counter_bound(1)));
        if (d == "s" + std::to_string(k.level))
            return call(c, macro_seed(k.level), "seed_" + d);
        // Pump the level's yardstick counter in lockstep with fresh tokens;
        // the ismax-and-reset check forces exactly the bound many.
        std::string s = "s" + std::to_string(k.level);
        PlaceId loop = move(c, "actpump_" + d);
        rule("actpump_" + d, oplus(at(loop), at(C(s).neg)),
             oplus(at(loop), oplus(at(C(s).pos), at(k.neg))));
        return call(loop, macro_imr(k.level), "act_" + d);
    }

    PlaceId deactivate(PlaceId c, const std::string& d) {
        const Counter& k = C(d);
        PlaceId c1 = reset(c, d);
        if (k.level == 1)
            return move(c1, "deact_" + d, at(k.neg, counter_bound(1)), {});
        std::string s = "s" + std::to_string(k.level);
        PlaceId loop = move(c1, "deactpump_" + d);
        rule("deactpump_" + d, oplus(at(loop), oplus(at(C(s).neg), at(k.neg))),
             oplus(at(loop), at(C(s).pos)));
        return call(loop, macro_imr(k.level), "deact_" + d);
    }

    PlaceId ismax_and_reset(PlaceId c, unsigned level) {
        const std::string s = "s" + std::to_string(level);
        if (level == 1) {
            Nat b = counter_bound(1);
            return move(c, "imr_s1", at(C(s).pos, b), at(C(s).neg, b));
        }
        return call(c, macro_imr(level), "imr_" + s);
    }

    // --- arrays --------------------------------------------------------------

    // Move one complex token between array places, threading the control.
    PlaceId move_token(PlaceId c, PlaceId from, PlaceId to, const std::string& hint) {
        PlaceId nxt = ctrl(hint);
        ComplexRule r;
        r.from = from;
        r.to = to;
        r.in = at(c);
        r.out = at(nxt);
        net.add_rule({hint + "#" + std::to_string(net.rules.size()), std::move(r)});
        return nxt;
    }

    PlaceId eject_token(PlaceId c, PlaceId from, const std::string& hint) {
        PlaceId nxt = ctrl(hint);
        TransferRule r;
        r.from = from;
        r.to = disc;
        for (ColourId col = 0; col < net.n_colours(); ++col) r.active.push_back(col);
        r.in = at(c);
        r.out = at(nxt);
        net.add_rule({hint + "#" + std::to_string(net.rules.size()), std::move(r)});
        return nxt;
    }

    PlaceId inject_loop(PlaceId c, unsigned level, bool bar, const std::string& hint) {
        // while (...) { inject the colour into the aux token; inc p'_level }
        const Array& a = arrays.at(level);
        std::string pp = "pp" + std::to_string(level);
        ComplexRule r;
        r.from = a.aux;
        r.to = a.aux;
        r.inject.set(bar ? a.jbar : a.j, 1);
        r.in = oplus(at(c), at(C(pp).neg));
        r.out = oplus(at(c), at(C(pp).pos));
        net.add_rule({hint + "#" + std::to_string(net.rules.size()), std::move(r)});
        return c; // self loop; the caller adds the exit guard
    }

    // inc / dec of the array cell indexed by p_level.
    Macro& cell_step(unsigned level, bool decrement) {
        std::string key = (decrement ? "deccell" : "inccell") + std::to_string(level);
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        const Array& a = arrays.at(level);
        std::string p = "p" + std::to_string(level), pp = "pp" + std::to_string(level);
        Macro m;
        m.entry = ctrl(key);
        PlaceId c = move_token(m.entry, decrement ? a.arr : a.arr_bar, a.aux, key + "_take");
        c = deactivate(c, pp);
        c = eject_token(c, a.aux, key + "_eject");
        c = call(c, macro_isequal(level), key + "_chk");
        c = reset(c, pp);
        // A fresh empty token to rebuild as m_(level, p).
        c = move(c, key + "_new", {}, [&] {
            Configuration o;
            o.add_token(a.aux, ComplexToken{});
            return o;
        }());
        inject_loop(c, level, false, key + "_fill");
        c = call(c, macro_isequal(level), key + "_fillchk");
        inject_loop(c, level, true, key + "_pad");
        c = ismax(c, pp);
        c = move_token(c, a.aux, decrement ? a.arr_bar : a.arr, key + "_put");
        c = reset(c, pp);
        m.exit = c;
        return macros.emplace(key, m).first->second;
    }

    // A sequence of cell steps packaged as one macro.
    Macro& cell_combo(unsigned level, const std::string& key, std::vector<bool> steps) {
        auto it = macros.find(key + std::to_string(level));
        if (it != macros.end()) return it->second;
        Macro m;
        m.entry = ctrl(key);
        PlaceId c = m.entry;
        for (bool decrement : steps)
            c = call(c, cell_step(level, decrement), key + (decrement ? "_d" : "_i"));
        m.exit = c;
        return macros.emplace(key + std::to_string(level), m).first->second;
    }

    Macro& iszero_cell(unsigned level) { return cell_combo(level, "zcell", {false, false, true, true}); }
    Macro& ismax_cell(unsigned level) { return cell_combo(level, "mcell", {true, true, false, false}); }
    Macro& nonzero_cell(unsigned level) { return cell_combo(level, "nzcell", {true, false}); }
    Macro& notmax_cell(unsigned level) { return cell_combo(level, "nmcell", {false, true}); }

    Macro& reset_cell(unsigned level) {
        std::string key = "rcell" + std::to_string(level);
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        Macro m;
        m.entry = ctrl(key);
        PlaceId back = ctrl(key + "_back");
        rule(key + "_again", at(back), at(m.entry));
        PlaceId dc = call(m.entry, cell_step(level, true), key + "_dec");
        rule(key + "_loop", at(dc), at(back));
        m.exit = call(m.entry, iszero_cell(level), key + "_done");
        return macros.emplace(key, m).first->second;
    }

    Macro& macro_isequal(unsigned level) {
        std::string key = "iseq" + std::to_string(level);
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        std::string p = "p" + std::to_string(level), pp = "pp" + std::to_string(level),
                    cc = "c" + std::to_string(level);
        Macro m;
        m.entry = ctrl(key);
        // while (p != 0 or p' != 0) { dec p; dec p'; inc c }
        Configuration in = oplus(at(m.entry), oplus(at(C(p).pos), oplus(at(C(pp).pos), at(C(cc).neg))));
        Configuration out = oplus(at(m.entry), oplus(at(C(p).neg), oplus(at(C(pp).neg), at(C(cc).pos))));
        rule(key + "_down", std::move(in), std::move(out));
        PlaceId c1 = iszero(m.entry, p);
        c1 = iszero(c1, pp);
        // while (c != 0) { inc p; inc p'; dec c }
        Configuration in2 = oplus(at(c1), oplus(at(C(p).neg), oplus(at(C(pp).neg), at(C(cc).pos))));
        Configuration out2 = oplus(at(c1), oplus(at(C(p).pos), oplus(at(C(pp).pos), at(C(cc).neg))));
        rule(key + "_up", std::move(in2), std::move(out2));
        m.exit = iszero(c1, cc);
        return macros.emplace(key, m).first->second;
    }

    // The long-addition core shared by ismax-and-reset, the seed activation
    // and their variants. `step` emits the per-iteration action from the
    // given control place and returns the continuation.
    PlaceId long_addition(PlaceId entry, unsigned level,
                          const std::function<PlaceId(PlaceId)>& step) {
        unsigned j = level - 1;
        std::string p = "p" + std::to_string(j);
        // Phase 1: clear the whole array.
        PlaceId c = reset(entry, p);
        PlaceId loop1 = move(c, "imr_clear");
        PlaceId c1 = call(loop1, reset_cell(j), "imr_rcell");
        PlaceId c2 = ismax(c1, p);
        PlaceId back1 = inc(c1, p);
        rule("imr_clear_loop", at(back1), at(loop1));
        // Phase 2: count in binary until the top cell lights up.
        PlaceId outer = move(c2, "imr_outer");
        PlaceId c3 = reset(outer, p);
        PlaceId topguard = move(c3, "imr_totop");
        rule("imr_topfill", oplus(at(topguard), at(C(p).neg)),
             oplus(at(topguard), at(C(p).pos)));
        PlaceId c4 = ismax(topguard, p);
        // Continue while the top cell is zero.
        PlaceId body = call(c4, iszero_cell(j), "imr_zerotop");
        body = step(body);
        body = reset(body, p);
        body = call(body, cell_step(j, false), "imr_add");
        PlaceId carry = move(body, "imr_carry");
        {
            PlaceId t = call(carry, ismax_cell(j), "imr_ismaxcell");
            t = call(t, cell_step(j, true), "imr_c1");
            t = call(t, cell_step(j, true), "imr_c2");
            t = inc(t, p);
            t = call(t, cell_step(j, false), "imr_c3");
            rule("imr_carry_loop", at(t), at(carry));
        }
        {
            PlaceId t = call(carry, notmax_cell(j), "imr_nocarry");
            rule("imr_next", at(t), at(outer));
        }
        // Exit when the top cell is set.
        return call(c4, nonzero_cell(j), "imr_exit");
    }

    Macro& imr_variant(unsigned level, const std::string& key,
                       const std::function<PlaceId(PlaceId)>& step) {
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        Macro m;
        m.entry = ctrl(key);
        m.exit = long_addition(m.entry, level, step);
        return macros.emplace(key, m).first->second;
    }

    Macro& macro_imr(unsigned level) {
        std::string s = "s" + std::to_string(level);
        return imr_variant(level, "imr" + std::to_string(level),
                           [&, s](PlaceId c) { return dec(c, s); });
    }

    Macro& macro_seed(unsigned level) {
        std::string s = "s" + std::to_string(level);
        return imr_variant(level, "seed" + std::to_string(level), [&, s](PlaceId c) {
            return move(c, "seed_grow_" + s, {}, at(C(s).neg));
        });
    }

    Macro& macro_iszero(const std::string& d) {
        std::string key = "iszero_" + d;
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        unsigned level = C(d).level;
        std::string s = "s" + std::to_string(level);
        Macro m;
        m.entry = ctrl(key);
        // while (*) { inc d; inc s }
        rule(key + "_pump",
             oplus(at(m.entry), oplus(at(C(d).neg), at(C(s).neg))),
             oplus(at(m.entry), oplus(at(C(d).pos), at(C(s).pos))));
        PlaceId c1 = ismax_and_reset(m.entry, level);
        // while (*) { dec d; inc s }
        rule(key + "_drain",
             oplus(at(c1), oplus(at(C(d).pos), at(C(s).neg))),
             oplus(at(c1), oplus(at(C(d).neg), at(C(s).pos))));
        m.exit = ismax_and_reset(c1, level);
        return macros.emplace(key, m).first->second;
    }

    Macro& macro_ismax(const std::string& d) {
        std::string key = "ismax_" + d;
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        unsigned level = C(d).level;
        std::string s = "s" + std::to_string(level);
        Macro m;
        m.entry = ctrl(key);
        rule(key + "_drain",
             oplus(at(m.entry), oplus(at(C(d).pos), at(C(s).neg))),
             oplus(at(m.entry), oplus(at(C(d).neg), at(C(s).pos))));
        PlaceId c1 = ismax_and_reset(m.entry, level);
        rule(key + "_pump",
             oplus(at(c1), oplus(at(C(d).neg), at(C(s).neg))),
             oplus(at(c1), oplus(at(C(d).pos), at(C(s).pos))));
        m.exit = ismax_and_reset(c1, level);
        return macros.emplace(key, m).first->second;
    }

    Macro& activate_array_macro(unsigned level) {
        std::string key = "actarr" + std::to_string(level);
        auto it = macros.find(key);
        if (it != macros.end()) return it->second;
        const Array& a = arrays.at(level);
        std::string p = "p" + std::to_string(level), pp = "pp" + std::to_string(level);
        Macro m;
        m.entry = ctrl(key);
        PlaceId c = reset(m.entry, p);
        PlaceId loop = move(c, key + "_loop");
        PlaceId body = loop;
        for (int copy = 0; copy < 2; ++copy) {
            std::string tag = key + "_b" + std::to_string(copy);
            body = reset(body, pp);
            body = move(body, tag + "_new", {}, [&] {
                Configuration o;
                o.add_token(a.aux, ComplexToken{});
                return o;
            }());
            inject_loop(body, level, false, tag + "_fill");
            body = call(body, macro_isequal(level), tag + "_chk");
            inject_loop(body, level, true, tag + "_pad");
            body = ismax(body, pp);
            body = move_token(body, a.aux, a.arr_bar, tag + "_put");
        }
        body = reset(body, pp);
        m.exit = ismax(body, p);
        PlaceId cont = inc(body, p);
        rule(key + "_again", at(cont), at(loop));
        return macros.emplace(key, m).first->second;
    }

    // --- top-level assembly ---------------------------------------------------

    void declare(unsigned levels, bool with_xy) {
        auto add_ctr = [&](const std::string& name, unsigned level) {
            Counter k;
            k.level = level;
            k.name = name;
            k.pos = net.add_simple("P_" + name);
            k.neg = net.add_simple("N_" + name);
            counters.emplace(name, k);
        };
        for (unsigned i = 1; i <= levels; ++i) {
            std::string si = std::to_string(i);
            add_ctr("s" + si, i);
            add_ctr("p" + si, i);
            add_ctr("pp" + si, i);
            add_ctr("c" + si, i);
            add_ctr("cc" + si, i);
        }
        if (with_xy) {
            add_ctr("x", levels);
            add_ctr("y", levels);
        }
        if (levels >= 2) {
            disc = net.add_complex("disc");
            has_disc = true;
            for (unsigned j = 1; j + 1 <= levels; ++j) {
                Array a;
                a.level = j;
                std::string sj = std::to_string(j);
                a.arr = net.add_complex("arr_a" + sj);
                a.arr_bar = net.add_complex("arrb_a" + sj);
                a.aux = net.add_complex("aux_a" + sj);
                a.j = net.add_colour("j" + sj, counters.at("pp" + sj).pos);
                a.jbar = net.add_colour("jb" + sj, counters.at("pp" + sj).neg);
                arrays.emplace(j, a);
            }
        }
    }

    PlaceId init_sequence(PlaceId c, unsigned levels, bool with_xy) {
        for (unsigned i = 1; i <= levels; ++i) {
            std::string si = std::to_string(i);
            for (const std::string& d : {"s" + si, "p" + si, "pp" + si, "c" + si, "cc" + si})
                c = activate(c, d);
            if (arrays.count(i)) c = call(c, activate_array_macro(i), "actarr" + si);
        }
        if (with_xy) {
            c = activate(c, "x");
            c = activate(c, "y");
        }
        return c;
    }
};

} // namespace

Yardstick generate_yardstick(const CounterMachine& m, const YardstickOptions& opts) {
    auto diags = validate_machine(m);
    if (!diags.empty()) throw std::invalid_argument("invalid counter machine");
    if (m.n > opts.max_n) throw std::invalid_argument("tower level exceeds the configured cap");

    Builder b;
    b.n = m.n;
    b.net.name = "yardstick";
    b.declare(m.n, true);

    // One control place per machine label, then the compiled bodies.
    std::vector<PlaceId> label_place(m.labels.size());
    for (std::size_t k = 0; k < m.labels.size(); ++k)
        label_place[k] = b.ctrl("L_" + m.labels[k]);

    PlaceId start = b.ctrl("init");
    PlaceId ready = b.init_sequence(start, m.n, true);
    b.rule("enter", Builder::at(ready), Builder::at(label_place[m.entry]));

    for (std::size_t k = 0; k < m.instrs.size(); ++k) {
        const auto& in = m.instrs[k];
        std::string d = in.counter == 0 ? "x" : "y";
        PlaceId c = label_place[k];
        switch (in.op) {
            case CounterMachine::Instr::Op::halt:
                break;
            case CounterMachine::Instr::Op::inc: {
                PlaceId e = b.inc(c, d);
                b.rule("goto", Builder::at(e), Builder::at(label_place[in.go1]));
                break;
            }
            case CounterMachine::Instr::Op::dec: {
                PlaceId e = b.dec(c, d);
                b.rule("goto", Builder::at(e), Builder::at(label_place[in.go1]));
                break;
            }
            case CounterMachine::Instr::Op::reset: {
                PlaceId e = b.reset(c, d);
                b.rule("goto", Builder::at(e), Builder::at(label_place[in.go1]));
                break;
            }
            case CounterMachine::Instr::Op::tz: {
                PlaceId z = b.iszero(c, d);
                b.rule("goto_z", Builder::at(z), Builder::at(label_place[in.go1]));
                PlaceId nz = b.dec(c, d);
                nz = b.inc(nz, d);
                b.rule("goto_nz", Builder::at(nz), Builder::at(label_place[in.go2]));
                break;
            }
        }
    }

    Yardstick out;
    out.net = std::move(b.net);
    validate_net_or_throw(out.net);
    out.initial.add_simple(start, 1);
    std::uint32_t halt_label = 0;
    bool have_halt = false;
    for (std::size_t k = 0; k < m.instrs.size(); ++k)
        if (m.instrs[k].op == CounterMachine::Instr::Op::halt && !have_halt) {
            halt_label = static_cast<std::uint32_t>(k);
            have_halt = true;
        }
    if (have_halt) out.halt_target.add_simple(label_place[halt_label], 1);
    out.control_places = b.ctrls;
    for (std::size_t k = 0; k < m.labels.size(); ++k)
        out.label_ctrl.emplace(m.labels[k], label_place[k]);
    for (const auto& [name, ctr] : b.counters)
        out.counters.emplace(name, Yardstick::CounterPlaces{ctr.pos, ctr.neg, ctr.level});
    for (const auto& [lvl, a] : b.arrays)
        out.arrays.emplace(lvl, Yardstick::ArrayPlaces{a.arr, a.arr_bar, a.aux, a.j, a.jbar, a.level});
    out.disc = b.disc;
    out.has_disc = b.has_disc;

    // The boundedness variant bumps a ticker on every rule.
    out.ticker_net = out.net;
    out.ticker = out.ticker_net.add_simple("tick");
    for (Rule& r : out.ticker_net.rules) {
        if (SimpleRule* s = std::get_if<SimpleRule>(&r.body))
            s->out.add_simple(out.ticker, 1);
        else if (ComplexRule* c = std::get_if<ComplexRule>(&r.body))
            c->out.add_simple(out.ticker, 1);
        else if (TransferRule* t = std::get_if<TransferRule>(&r.body))
            t->out.add_simple(out.ticker, 1);
    }
    return out;
}

MacroHarness ismax_reset_harness(unsigned level) {
    Builder b;
    b.n = level;
    b.net.name = "imr_harness";
    b.declare(level, false);
    PlaceId start = b.ctrl("probe");
    PlaceId done = b.ismax_and_reset(start, level);

    MacroHarness out;
    std::map<std::string, Counter> counters = b.counters;
    std::map<unsigned, Array> arrays = b.arrays;
    out.net = std::move(b.net);
    validate_net_or_throw(out.net);
    out.start = start;
    out.done = done;
    out.control_places = b.ctrls;
    out.initial = [counters, arrays, start, level](Nat value) {
        Configuration c;
        c.add_simple(start, 1);
        for (const auto& [name, k] : counters) {
            Nat bound = counter_bound(k.level);
            if (name == "s" + std::to_string(level)) {
                c.add_simple(k.pos, value);
                c.add_simple(k.neg, checked_sub(bound, value));
            } else {
                c.add_simple(k.neg, bound);
            }
        }
        for (const auto& [lvl, a] : arrays) {
            Nat bound = counter_bound(lvl);
            for (Nat idx = 0; idx <= bound; ++idx) {
                ComplexToken tok;
                tok.set(a.j, idx);
                tok.set(a.jbar, bound - idx);
                c.add_token(a.arr_bar, tok, 2);
            }
        }
        return c;
    };
    return out;
}

} // namespace nnct
