#include "nnct/net.hh"

#include <algorithm>
#include <set>
#include <sstream>

namespace nnct {

// ---------------------------------------------------------------------------
// ComplexToken

ComplexToken::ComplexToken(std::vector<std::pair<ColourId, Nat>> cs) : counts(std::move(cs)) {
    std::sort(counts.begin(), counts.end());
    counts.erase(std::remove_if(counts.begin(), counts.end(),
                                [](const auto& e) { return e.second == 0; }),
                 counts.end());
}

Nat ComplexToken::count(ColourId c) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), c,
                               [](const auto& e, ColourId k) { return e.first < k; });
    return (it != counts.end() && it->first == c) ? it->second : 0;
}

void ComplexToken::set(ColourId c, Nat v) {
    auto it = std::lower_bound(counts.begin(), counts.end(), c,
                               [](const auto& e, ColourId k) { return e.first < k; });
    if (it != counts.end() && it->first == c) {
        if (v == 0)
            counts.erase(it);
        else
            it->second = v;
    } else if (v != 0) {
        counts.insert(it, {c, v});
    }
}

void ComplexToken::add(ColourId c, Nat v) {
    if (v == 0) return;
    set(c, checked_add(count(c), v));
}

Nat ComplexToken::max_count() const {
    Nat m = 0;
    for (const auto& [c, n] : counts) m = std::max(m, n);
    return m;
}

ComplexToken ComplexToken::restrict_to(const std::vector<ColourId>& keep) const {
    ComplexToken r;
    for (const auto& e : counts)
        if (std::binary_search(keep.begin(), keep.end(), e.first)) r.counts.push_back(e);
    return r;
}

ComplexToken ComplexToken::restrict_away(const std::vector<ColourId>& drop) const {
    ComplexToken r;
    for (const auto& e : counts)
        if (!std::binary_search(drop.begin(), drop.end(), e.first)) r.counts.push_back(e);
    return r;
}

ComplexToken ComplexToken::plus(const ComplexToken& other) const {
    ComplexToken r = *this;
    for (const auto& [c, n] : other.counts) r.add(c, n);
    return r;
}

bool leq_token(const ComplexToken& a, const ComplexToken& b) {
    // Zero patterns must agree, so the supports coincide.
    if (a.counts.size() != b.counts.size()) return false;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        if (a.counts[i].first != b.counts[i].first) return false;
        if (a.counts[i].second > b.counts[i].second) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// TokenBag

Nat TokenBag::total() const {
    Nat t = 0;
    for (const auto& [tok, n] : items) t = checked_add(t, n);
    return t;
}

Nat TokenBag::count(const ComplexToken& t) const {
    auto it = std::lower_bound(items.begin(), items.end(), t,
                               [](const auto& e, const ComplexToken& k) { return e.first < k; });
    return (it != items.end() && it->first == t) ? it->second : 0;
}

void TokenBag::add(const ComplexToken& t, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(items.begin(), items.end(), t,
                               [](const auto& e, const ComplexToken& k) { return e.first < k; });
    if (it != items.end() && it->first == t)
        it->second = checked_add(it->second, n);
    else
        items.insert(it, {t, n});
}

void TokenBag::remove(const ComplexToken& t, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(items.begin(), items.end(), t,
                               [](const auto& e, const ComplexToken& k) { return e.first < k; });
    if (it == items.end() || it->first != t || it->second < n)
        throw arithmetic_error("token not present in bag with required multiplicity");
    it->second -= n;
    if (it->second == 0) items.erase(it);
}

Nat TokenBag::max_colour_norm() const {
    Nat m = 0;
    for (const auto& [tok, n] : items) m = std::max(m, tok.max_count());
    return m;
}

namespace {

// Integer bipartite matching between token values with multiplicities:
// can every token of `a` be injected into `b` along leq_token edges?
// Unit-augmentation max flow over value nodes; value counts are tiny.
bool bag_embeds(const TokenBag& a, const TokenBag& b) {
    const std::size_t na = a.items.size(), nb = b.items.size();
    if (a.total() > b.total()) return false;
    std::vector<std::vector<bool>> edge(na, std::vector<bool>(nb, false));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            edge[i][j] = leq_token(a.items[i].first, b.items[j].first);
    std::vector<Nat> need(na), avail(nb);
    for (std::size_t i = 0; i < na; ++i) need[i] = a.items[i].second;
    for (std::size_t j = 0; j < nb; ++j) avail[j] = b.items[j].second;
    std::vector<std::vector<Nat>> flow(na, std::vector<Nat>(nb, 0));
    for (std::size_t i = 0; i < na; ++i) {
        while (need[i] > 0) {
            // Search an alternating path from row i to a column with spare
            // capacity; parent_right[j] = row we entered column j from.
            std::vector<int> parent_right(nb, -1);
            std::vector<int> parent_left(na, -2);
            parent_left[i] = -1;
            std::vector<std::size_t> work{i};
            int goal = -1;
            while (!work.empty() && goal < 0) {
                std::size_t u = work.back();
                work.pop_back();
                for (std::size_t j = 0; j < nb && goal < 0; ++j) {
                    if (!edge[u][j] || parent_right[j] != -1) continue;
                    parent_right[j] = static_cast<int>(u);
                    if (avail[j] > 0) {
                        goal = static_cast<int>(j);
                        break;
                    }
                    for (std::size_t v = 0; v < na; ++v) {
                        if (parent_left[v] == -2 && flow[v][j] > 0) {
                            parent_left[v] = static_cast<int>(j);
                            work.push_back(v);
                        }
                    }
                }
            }
            if (goal < 0) return false;
            int col = goal;
            while (true) {
                int row = parent_right[col];
                flow[row][col] += 1;
                if (parent_left[row] == -1) break;
                int prev = parent_left[row];
                flow[row][prev] -= 1;
                col = prev;
            }
            avail[static_cast<std::size_t>(goal)] -= 1;
            need[i] -= 1;
        }
    }
    return true;
}

} // namespace

bool leq_bag(const TokenBag& a, const TokenBag& b) { return bag_embeds(a, b); }

// ---------------------------------------------------------------------------
// Configuration

Nat Configuration::simple_count(PlaceId p) const {
    auto it = std::lower_bound(simple.begin(), simple.end(), p,
                               [](const auto& e, PlaceId k) { return e.first < k; });
    return (it != simple.end() && it->first == p) ? it->second : 0;
}

void Configuration::set_simple(PlaceId p, Nat n) {
    auto it = std::lower_bound(simple.begin(), simple.end(), p,
                               [](const auto& e, PlaceId k) { return e.first < k; });
    if (it != simple.end() && it->first == p) {
        if (n == 0)
            simple.erase(it);
        else
            it->second = n;
    } else if (n != 0) {
        simple.insert(it, {p, n});
    }
}

void Configuration::add_simple(PlaceId p, Nat n) {
    if (n == 0) return;
    set_simple(p, checked_add(simple_count(p), n));
}

void Configuration::sub_simple(PlaceId p, Nat n) {
    if (n == 0) return;
    set_simple(p, checked_sub(simple_count(p), n));
}

const TokenBag* Configuration::bag(PlaceId p) const {
    auto it = std::lower_bound(complex.begin(), complex.end(), p,
                               [](const auto& e, PlaceId k) { return e.first < k; });
    return (it != complex.end() && it->first == p) ? &it->second : nullptr;
}

TokenBag& Configuration::bag_mut(PlaceId p) {
    auto it = std::lower_bound(complex.begin(), complex.end(), p,
                               [](const auto& e, PlaceId k) { return e.first < k; });
    if (it == complex.end() || it->first != p) it = complex.insert(it, {p, TokenBag{}});
    return it->second;
}

void Configuration::add_token(PlaceId p, const ComplexToken& t, Nat n) {
    if (n == 0) return;
    bag_mut(p).add(t, n);
}

void Configuration::remove_token(PlaceId p, const ComplexToken& t, Nat n) {
    if (n == 0) return;
    auto it = std::lower_bound(complex.begin(), complex.end(), p,
                               [](const auto& e, PlaceId k) { return e.first < k; });
    if (it == complex.end() || it->first != p)
        throw arithmetic_error("no tokens at complex place");
    it->second.remove(t, n);
    if (it->second.is_empty()) complex.erase(it);
}

void Configuration::normalize() {
    std::sort(simple.begin(), simple.end());
    simple.erase(std::remove_if(simple.begin(), simple.end(),
                                [](const auto& e) { return e.second == 0; }),
                 simple.end());
    std::sort(complex.begin(), complex.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    complex.erase(std::remove_if(complex.begin(), complex.end(),
                                 [](const auto& e) { return e.second.is_empty(); }),
                  complex.end());
}

bool Configuration::is_simple_only() const { return complex.empty(); }

Nat Configuration::total_tokens() const {
    Nat t = 0;
    for (const auto& [p, n] : simple) t = checked_add(t, n);
    for (const auto& [p, bag] : complex) t = checked_add(t, bag.total());
    return t;
}

Configuration oplus(const Configuration& a, const Configuration& b) {
    Configuration r = a;
    for (const auto& [p, n] : b.simple) r.add_simple(p, n);
    for (const auto& [p, bag] : b.complex)
        for (const auto& [tok, n] : bag.items) r.add_token(p, tok, n);
    return r;
}

Configuration ominus(const Configuration& a, const Configuration& b) {
    Configuration r = a;
    for (const auto& [p, n] : b.simple) r.sub_simple(p, n);
    for (const auto& [p, bag] : b.complex)
        for (const auto& [tok, n] : bag.items) r.remove_token(p, tok, n);
    return r;
}

bool geq_pointwise(const Configuration& a, const Configuration& b) {
    for (const auto& [p, n] : b.simple)
        if (a.simple_count(p) < n) return false;
    for (const auto& [p, bag] : b.complex) {
        const TokenBag* ab = a.bag(p);
        for (const auto& [tok, n] : bag.items)
            if (!ab || ab->count(tok) < n) return false;
    }
    return true;
}

bool leq_config(const Configuration& a, const Configuration& b) {
    for (const auto& [p, n] : a.simple)
        if (b.simple_count(p) < n) return false;
    static const TokenBag kEmpty{};
    for (const auto& [p, bag] : a.complex) {
        const TokenBag* bb = b.bag(p);
        if (!leq_bag(bag, bb ? *bb : kEmpty)) return false;
    }
    return true;
}

std::size_t ConfigHash::operator()(const Configuration& c) const {
    std::size_t h = 0x51ed2701;
    for (const auto& [p, n] : c.simple) {
        hash_combine(h, std::hash<PlaceId>{}(p));
        hash_combine(h, std::hash<Nat>{}(n));
    }
    for (const auto& [p, bag] : c.complex) {
        hash_combine(h, std::hash<PlaceId>{}(p) ^ 0xabcd);
        for (const auto& [tok, n] : bag.items) {
            for (const auto& [col, k] : tok.counts) {
                hash_combine(h, std::hash<ColourId>{}(col));
                hash_combine(h, std::hash<Nat>{}(k));
            }
            hash_combine(h, std::hash<Nat>{}(n) ^ 0x77);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Net construction and validation

PlaceId Net::add_simple(const std::string& n) {
    simple_places.push_back(n);
    return static_cast<PlaceId>(simple_places.size() - 1);
}

PlaceId Net::add_complex(const std::string& n) {
    complex_places.push_back(n);
    return static_cast<PlaceId>(complex_places.size() - 1);
}

ColourId Net::add_colour(const std::string& n, PlaceId target) {
    colours.push_back(n);
    colour_map.push_back(target);
    return static_cast<ColourId>(colours.size() - 1);
}

RuleId Net::add_rule(Rule r) {
    rules.push_back(std::move(r));
    return static_cast<RuleId>(rules.size() - 1);
}

namespace {
template <class V>
std::optional<std::uint32_t> find_name(const V& v, const std::string& n) {
    for (std::uint32_t i = 0; i < v.size(); ++i)
        if (v[i] == n) return i;
    return std::nullopt;
}
} // namespace

std::optional<PlaceId> Net::find_simple(const std::string& n) const {
    return find_name(simple_places, n);
}
std::optional<PlaceId> Net::find_complex(const std::string& n) const {
    return find_name(complex_places, n);
}
std::optional<ColourId> Net::find_colour(const std::string& n) const {
    return find_name(colours, n);
}
std::optional<RuleId> Net::find_rule(const std::string& n) const {
    for (std::uint32_t i = 0; i < rules.size(); ++i)
        if (rules[i].name == n) return i;
    return std::nullopt;
}

bool Net::is_total_transfer() const {
    for (const Rule& r : rules)
        if (const TransferRule* t = r.as_transfer())
            if (t->active.size() != colours.size()) return false;
    return true;
}

namespace {

void check_config_refs(const Net& net, const Configuration& c, const std::string& subject,
                       std::vector<Diagnostic>& out) {
    for (const auto& [p, n] : c.simple) {
        if (p >= net.simple_places.size())
            out.push_back({subject, "undeclared simple place index " + std::to_string(p)});
        if (n == 0) out.push_back({subject, "zero multiplicity stored (non-canonical)"});
    }
    for (const auto& [p, bag] : c.complex) {
        if (p >= net.complex_places.size())
            out.push_back({subject, "undeclared complex place index " + std::to_string(p)});
        for (const auto& [tok, n] : bag.items) {
            if (n == 0) out.push_back({subject, "zero token multiplicity (non-canonical)"});
            for (const auto& [col, k] : tok.counts) {
                if (col >= net.colours.size())
                    out.push_back({subject, "undeclared colour index " + std::to_string(col)});
                if (k == 0) out.push_back({subject, "zero colour count (non-canonical)"});
            }
        }
    }
}

void check_simple_only(const Configuration& c, const std::string& subject, const char* part,
                       std::vector<Diagnostic>& out) {
    if (!c.complex.empty())
        out.push_back({subject, std::string(part) + " must have an empty complex part"});
}

} // namespace

std::vector<Diagnostic> validate_net(const Net& net) {
    std::vector<Diagnostic> out;
    std::set<std::string> names;
    auto claim = [&](const std::string& n, const char* sort) {
        if (!names.insert(n).second)
            out.push_back({n, std::string("duplicate identifier across place sorts (") + sort + ")"});
    };
    for (const auto& n : net.simple_places) claim(n, "simple");
    for (const auto& n : net.complex_places) claim(n, "complex");
    for (const auto& n : net.colours) claim(n, "colour");

    if (net.colour_map.size() != net.colours.size())
        out.push_back({net.name, "colour_map not total on colours"});
    for (std::size_t c = 0; c < net.colour_map.size(); ++c)
        if (net.colour_map[c] >= net.simple_places.size())
            out.push_back({net.colours[c], "colour mapped to undeclared simple place"});

    for (const Rule& r : net.rules) {
        if (const SimpleRule* s = r.as_simple()) {
            check_config_refs(net, s->in, r.name, out);
            check_config_refs(net, s->out, r.name, out);
            for (const auto& [p, bag] : s->in.complex)
                for (const auto& [tok, n] : bag.items)
                    if (!tok.is_empty())
                        out.push_back({r.name, "simple rule consumes a non-empty complex token"});
        } else if (const ComplexRule* c = r.as_complex()) {
            check_config_refs(net, c->in, r.name, out);
            check_config_refs(net, c->out, r.name, out);
            check_simple_only(c->in, r.name, "I", out);
            check_simple_only(c->out, r.name, "O", out);
            if (c->from >= net.complex_places.size() || c->to >= net.complex_places.size())
                out.push_back({r.name, "complex rule references undeclared complex place"});
            for (const auto& [col, n] : c->inject.counts)
                if (col >= net.colours.size())
                    out.push_back({r.name, "injected colour undeclared"});
        } else if (const TransferRule* t = r.as_transfer()) {
            check_config_refs(net, t->in, r.name, out);
            check_config_refs(net, t->out, r.name, out);
            check_simple_only(t->in, r.name, "I", out);
            check_simple_only(t->out, r.name, "O", out);
            if (t->from >= net.complex_places.size() || t->to >= net.complex_places.size())
                out.push_back({r.name, "transfer rule references undeclared complex place"});
            std::set<PlaceId> targets;
            for (ColourId c : t->active) {
                if (c >= net.colours.size()) {
                    out.push_back({r.name, "active colour undeclared"});
                    continue;
                }
                if (!targets.insert(net.colour_map[c]).second)
                    out.push_back({r.name,
                                   "zeta restricted to the active set is not injective"});
            }
            if (!std::is_sorted(t->active.begin(), t->active.end()))
                out.push_back({r.name, "active set not sorted (non-canonical)"});
        }
    }
    return out;
}

void validate_net_or_throw(const Net& net) {
    auto d = validate_net(net);
    if (!d.empty()) {
        std::ostringstream os;
        os << "invalid net";
        for (const auto& x : d) os << "; " << x.subject << ": " << x.message;
        throw std::runtime_error(os.str());
    }
}

std::vector<Diagnostic> validate_config(const Net& net, const Configuration& c) {
    std::vector<Diagnostic> out;
    check_config_refs(net, c, "configuration", out);
    return out;
}

// ---------------------------------------------------------------------------
// Firing semantics

bool rule_enabled(const Net& net, const Configuration& s, const Rule& rule,
                  const std::optional<ComplexToken>& pick) {
    (void)net;
    if (const SimpleRule* r = rule.as_simple()) {
        return geq_pointwise(s, r->in);
    } else if (const ComplexRule* r = rule.as_complex()) {
        if (!pick) return false;
        const TokenBag* b = s.bag(r->from);
        if (!b || b->count(*pick) == 0) return false;
        return geq_pointwise(s, r->in);
    } else if (const TransferRule* r = rule.as_transfer()) {
        if (!pick) return false;
        const TokenBag* b = s.bag(r->from);
        if (!b || b->count(*pick) == 0) return false;
        return geq_pointwise(s, r->in);
    }
    return false;
}

Configuration fire_rule(const Net& net, const Configuration& s, const Rule& rule,
                        const std::optional<ComplexToken>& pick) {
    if (const SimpleRule* r = rule.as_simple()) {
        if (pick) throw invalid_choice_error("simple rule takes no token choice");
        if (!geq_pointwise(s, r->in))
            throw not_enabled_error("rule " + rule.name + " not enabled");
        return oplus(ominus(s, r->in), r->out);
    }
    if (const ComplexRule* r = rule.as_complex()) {
        if (!pick) throw invalid_choice_error("complex rule needs a token choice");
        const TokenBag* b = s.bag(r->from);
        if (!b || b->count(*pick) == 0)
            throw not_enabled_error("chosen token absent from source place");
        if (!geq_pointwise(s, r->in))
            throw not_enabled_error("rule " + rule.name + " not enabled");
        Configuration next = ominus(s, r->in);
        next.remove_token(r->from, *pick);
        next.add_token(r->to, pick->plus(r->inject));
        return oplus(next, r->out);
    }
    const TransferRule* r = rule.as_transfer();
    if (!pick) throw invalid_choice_error("transfer rule needs a token choice");
    const TokenBag* b = s.bag(r->from);
    if (!b || b->count(*pick) == 0)
        throw not_enabled_error("chosen token absent from source place");
    if (!geq_pointwise(s, r->in))
        throw not_enabled_error("rule " + rule.name + " not enabled");
    Configuration next = ominus(s, r->in);
    next.remove_token(r->from, *pick);
    next.add_token(r->to, pick->restrict_away(r->active));
    for (ColourId c : r->active) {
        PlaceId target = net.colour_map[c];
        // Out-of-range target = ignored place of a relativised net; the
        // ejected tokens vanish there.
        if (target < net.simple_places.size()) next.add_simple(target, pick->count(c));
    }
    return oplus(next, r->out);
}

std::vector<Step> enumerate_steps(const Net& net, const Configuration& s) {
    std::vector<Step> out;
    for (RuleId ri = 0; ri < net.rules.size(); ++ri) {
        const Rule& rule = net.rules[ri];
        if (rule.as_simple()) {
            if (rule_enabled(net, s, rule))
                out.push_back({ri, std::nullopt, fire_rule(net, s, rule)});
            continue;
        }
        PlaceId from =
            rule.as_complex() ? rule.as_complex()->from : rule.as_transfer()->from;
        const TokenBag* b = s.bag(from);
        if (!b) continue;
        for (const auto& [tok, n] : b->items) {
            if (rule_enabled(net, s, rule, tok))
                out.push_back({ri, tok, fire_rule(net, s, rule, tok)});
        }
    }
    return out;
}

std::vector<Configuration> successors(const Net& net, const Configuration& s) {
    std::vector<Configuration> out;
    for (Step& st : enumerate_steps(net, s)) out.push_back(std::move(st.next));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Relativised nets

Configuration restrict_config(const Configuration& c, std::uint32_t i) {
    Configuration r = c;
    r.simple.erase(std::remove_if(r.simple.begin(), r.simple.end(),
                                  [i](const auto& e) { return e.first >= i; }),
                   r.simple.end());
    return r;
}

Net restrict_net(const Net& net, std::uint32_t i) {
    Net r = net;
    r.simple_places.resize(std::min<std::size_t>(i, net.simple_places.size()));
    for (Rule& rule : r.rules) {
        auto fix = [i](Configuration& c) { c = restrict_config(c, i); };
        if (SimpleRule* s = std::get_if<SimpleRule>(&rule.body)) {
            fix(s->in);
            fix(s->out);
        } else if (ComplexRule* c = std::get_if<ComplexRule>(&rule.body)) {
            fix(c->in);
            fix(c->out);
        } else if (TransferRule* t = std::get_if<TransferRule>(&rule.body)) {
            fix(t->in);
            fix(t->out);
        }
    }
    // Colours whose target place is ignored eject into the void; keep the
    // mapping total by pointing them at a sink index equal to i (callers of
    // fire on the restricted net must not read places >= i).
    for (PlaceId& p : r.colour_map)
        if (p >= i) p = std::numeric_limits<PlaceId>::max();
    return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string show_token(const Net& net, const ComplexToken& t) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [c, n] : t.counts) {
        if (!first) os << ", ";
        first = false;
        os << net.colours[c] << ':' << n;
    }
    os << '}';
    return os.str();
}

std::string show_config(const Net& net, const Configuration& c) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [p, n] : c.simple) {
        if (!first) os << ", ";
        first = false;
        os << net.simple_places[p] << ':' << n;
    }
    for (const auto& [p, bag] : c.complex) {
        if (!first) os << ", ";
        first = false;
        os << net.complex_places[p] << ": [";
        bool f2 = true;
        for (const auto& [tok, n] : bag.items) {
            for (Nat k = 0; k < n; ++k) {
                if (!f2) os << ", ";
                f2 = false;
                os << show_token(net, tok);
            }
        }
        os << ']';
    }
    os << '}';
    return os.str();
}

} // namespace nnct
