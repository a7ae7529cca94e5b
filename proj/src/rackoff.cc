#include "nnct/rackoff.hh"

#include <algorithm>
#include <functional>
#include <sstream>

namespace nnct {

// ---------------------------------------------------------------------------
// Norms and constants

Nat token_colour_norm(const ComplexToken& m) { return m.max_count(); }

NormReport compute_norms(const Net& net, const Configuration& s, std::uint32_t i) {
    if (i > net.n_simple()) throw std::invalid_argument("norm index exceeds simple places");
    NormReport r;
    r.i = i;
    for (const auto& [p, n] : s.simple)
        if (p < i) r.sim_i = std::max(r.sim_i, n);
    r.full_i = r.sim_i;
    for (const auto& [p, bag] : s.complex) {
        r.full_i = std::max(r.full_i, bag.total());
        r.full_i = std::max(r.full_i, bag.max_colour_norm());
    }
    return r;
}

RackoffConstants compute_rackoff_constants(const Net& net, const Configuration& s_cov) {
    RackoffConstants k;
    k.R = 1;
    auto scan = [&](const Configuration& c) {
        for (const auto& [p, n] : c.simple) k.R = std::max(k.R, n);
        for (const auto& [p, bag] : c.complex) k.R = std::max(k.R, bag.total());
    };
    for (const Rule& r : net.rules) {
        if (const SimpleRule* s = r.as_simple()) {
            scan(s->in);
            scan(s->out);
            for (const auto& [p, bag] : s->out.complex)
                for (const auto& [tok, n] : bag.items)
                    k.Xi.insert(token_colour_norm(tok));
        } else if (const ComplexRule* c = r.as_complex()) {
            scan(c->in);
            scan(c->out);
        } else if (const TransferRule* t = r.as_transfer()) {
            scan(t->in);
            scan(t->out);
        }
    }
    Nat m = compute_norms(net, s_cov, static_cast<std::uint32_t>(net.n_simple())).full_i;
    for (Nat x : k.Xi) m = std::max(m, x);
    k.Rprime = checked_add(checked_add(k.R, 1), m);
    return k;
}

// ---------------------------------------------------------------------------
// Counter abstraction

std::uint32_t AbstractNet::index_of_simple(PlaceId p) const {
    if (p >= i) throw std::invalid_argument("simple place is ignored at this index");
    return p;
}

std::uint32_t AbstractNet::index_of_class(PlaceId cplace, const std::vector<Nat>& profile) const {
    std::uint64_t theta = 0, radix = 1;
    for (std::uint32_t k = 0; k < n_colours; ++k) {
        theta += static_cast<std::uint64_t>(std::min(profile[k], B)) * radix;
        radix *= static_cast<std::uint64_t>(B) + 1;
    }
    return static_cast<std::uint32_t>(i + static_cast<std::uint64_t>(cplace) * radix + theta);
}

std::vector<Nat> AbstractNet::profile_of(const ComplexToken& m) const {
    std::vector<Nat> prof(n_colours, 0);
    for (const auto& [c, n] : m.counts)
        if (c < n_colours) prof[c] = std::min(n, B);
    return prof;
}

namespace {

std::uint64_t class_block(Nat B, std::uint32_t n_colours) {
    std::uint64_t r = 1;
    for (std::uint32_t k = 0; k < n_colours; ++k) {
        if (r > (1ull << 40)) throw dimension_cap_error("profile space too large", r);
        r *= static_cast<std::uint64_t>(B) + 1;
    }
    return r;
}

} // namespace

std::vector<Nat> abstract_config(const Net& net, const Configuration& s, std::uint32_t i,
                                 Nat B) {
    AbstractNet shape;
    shape.i = i;
    shape.B = B;
    shape.n_colours = static_cast<std::uint32_t>(net.n_colours());
    shape.n_complex = static_cast<std::uint32_t>(net.n_complex());
    std::uint64_t dim = i + net.n_complex() * class_block(B, shape.n_colours);
    std::vector<Nat> v(dim, 0);
    for (const auto& [p, n] : s.simple)
        if (p < i) v[p] = n;
    for (const auto& [p, bag] : s.complex)
        for (const auto& [tok, n] : bag.items) {
            std::uint32_t idx = shape.index_of_class(p, shape.profile_of(tok));
            v[idx] = checked_add(v[idx], n);
        }
    return v;
}

namespace {

std::vector<std::int64_t> vec_sub(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    std::vector<std::int64_t> r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        r[k] = static_cast<std::int64_t>(a[k]) - static_cast<std::int64_t>(b[k]);
    return r;
}

// All tokens with every colour count <= B, i.e. one representative per
// clamped profile; emitted in mixed-radix order of theta.
void each_profile_token(std::uint32_t n_colours, Nat B,
                        const std::function<void(const ComplexToken&)>& f) {
    std::vector<Nat> prof(n_colours, 0);
    while (true) {
        ComplexToken m;
        for (std::uint32_t c = 0; c < n_colours; ++c)
            if (prof[c] > 0) m.counts.push_back({c, prof[c]});
        f(m);
        std::uint32_t k = 0;
        for (; k < n_colours; ++k) {
            if (++prof[k] <= B) break;
            prof[k] = 0;
        }
        if (k == n_colours) break;
    }
}

} // namespace

AbstractNet build_counter_abstraction(const Net& net, std::uint32_t i, Nat B, bool ordered,
                                      std::uint64_t dimension_cap) {
    if (B < 1) throw std::invalid_argument("B must be at least 1");
    if (i > net.n_simple()) throw std::invalid_argument("i exceeds simple place count");
    AbstractNet a;
    a.i = i;
    a.B = B;
    a.n_colours = static_cast<std::uint32_t>(net.n_colours());
    a.n_complex = static_cast<std::uint32_t>(net.n_complex());
    a.ordered = ordered;
    std::uint64_t block = class_block(B, a.n_colours);
    std::uint64_t dim = i + net.n_complex() * block;
    if (dim > dimension_cap)
        throw dimension_cap_error("abstraction dimension exceeds cap: " + std::to_string(dim),
                                  dim);
    a.dimension = static_cast<std::uint32_t>(dim);

    auto alpha = [&](const Configuration& c) { return abstract_config(net, c, i, B); };
    auto alpha_token_at = [&](PlaceId p, const ComplexToken& m) {
        Configuration c;
        c.add_token(p, m);
        return alpha(c);
    };

    for (RuleId ri = 0; ri < net.rules.size(); ++ri) {
        const Rule& rule = net.rules[ri];
        if (const SimpleRule* r = rule.as_simple()) {
            Configuration in_i = restrict_config(r->in, i);
            Configuration out_i = restrict_config(r->out, i);
            PetriRule pr;
            pr.guard = alpha(in_i);
            pr.delta = vec_sub(alpha(out_i), pr.guard);
            pr.label = rule.name;
            a.rules.push_back(std::move(pr));
        } else if (const ComplexRule* r = rule.as_complex()) {
            Configuration in_i = restrict_config(r->in, i);
            Configuration out_i = restrict_config(r->out, i);
            each_profile_token(a.n_colours, B, [&](const ComplexToken& m) {
                Configuration pre = in_i;
                pre.add_token(r->from, m);
                Configuration post = out_i;
                post.add_token(r->to, m.plus(r->inject));
                PetriRule pr;
                pr.guard = alpha(pre);
                pr.delta = vec_sub(alpha(post), pr.guard);
                pr.label = rule.name;
                a.rules.push_back(std::move(pr));
            });
        } else if (const TransferRule* r = rule.as_transfer()) {
            Configuration in_i = restrict_config(r->in, i);
            Configuration out_i = restrict_config(r->out, i);
            each_profile_token(a.n_colours, B, [&](const ComplexToken& m) {
                // No instance for tokens whose active colours reach the
                // clamp: their exact count is unknown to the abstraction.
                for (ColourId c : r->active)
                    if (m.count(c) >= B) return;
                Configuration pre = in_i;
                pre.add_token(r->from, m);
                Configuration post = out_i;
                post.add_token(r->to, m.restrict_away(r->active));
                for (ColourId c : r->active) {
                    PlaceId q = net.colour_map[c];
                    if (q < i) post.add_simple(q, m.count(c));
                }
                PetriRule pr;
                pr.guard = alpha(pre);
                pr.delta = vec_sub(alpha(post), pr.guard);
                pr.label = rule.name;
                a.rules.push_back(std::move(pr));
            });
        }
    }

    a.swap_rule_begin = a.rules.size();
    if (ordered) {
        // Replace a token by a strictly smaller one of the same place: the
        // coordinate order of the plain abstraction is blind to the token
        // order, these rules repair that.
        std::vector<ComplexToken> profiles;
        each_profile_token(a.n_colours, B, [&](const ComplexToken& m) { profiles.push_back(m); });
        for (PlaceId p = 0; p < net.n_complex(); ++p) {
            for (const ComplexToken& hi : profiles) {
                for (const ComplexToken& lo : profiles) {
                    if (hi == lo || !leq_token(lo, hi)) continue;
                    auto vhi = alpha_token_at(p, hi);
                    auto vlo = alpha_token_at(p, lo);
                    if (vhi == vlo) continue; // same class, no movement
                    PetriRule pr;
                    pr.guard = vhi;
                    pr.delta = vec_sub(vlo, vhi);
                    pr.label = "swap";
                    a.rules.push_back(std::move(pr));
                }
            }
        }
    }
    return a;
}

std::vector<std::vector<Nat>> petri_step(const AbstractNet& anet, const std::vector<Nat>& v) {
    if (v.size() != anet.dimension) throw std::invalid_argument("vector dimension mismatch");
    std::vector<std::vector<Nat>> out;
    for (const PetriRule& r : anet.rules) {
        bool ok = true;
        for (std::size_t k = 0; k < v.size() && ok; ++k) ok = v[k] >= r.guard[k];
        if (!ok) continue;
        std::vector<Nat> next(v.size());
        for (std::size_t k = 0; k < v.size() && ok; ++k) {
            std::int64_t nv = static_cast<std::int64_t>(v[k]) + r.delta[k];
            if (nv < 0) {
                ok = false;
                break;
            }
            next[k] = static_cast<Nat>(nv);
        }
        if (ok) out.push_back(std::move(next));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Tower bounds

namespace {
constexpr unsigned kMaxExactTetHeight = 5; // tet(5) ~ 2*10^4 digits
}

BigNat tetration(unsigned h) {
    if (h > kMaxExactTetHeight)
        throw std::invalid_argument("tetration height not exactly representable");
    BigNat v = 1;
    for (unsigned k = 0; k < h; ++k) {
        unsigned long e = v.convert_to<unsigned long>();
        v = BigNat(1) << e;
    }
    return v;
}

unsigned slog_floor(const BigNat& n) {
    if (n < 1) throw std::invalid_argument("slog requires a positive argument");
    unsigned h = 0;
    while (h < kMaxExactTetHeight && tetration(h + 1) <= n) ++h;
    return h;
}

std::string BoundValue::render() const {
    std::ostringstream os;
    switch (form) {
        case Form::exact:
            os << exact;
            break;
        case Form::tower:
            os << "2^^h where h = " << tower_height;
            break;
        case Form::power:
            os << base << "^" << exponent;
            break;
    }
    return os.str();
}

namespace {
// 10^6 decimal digits, in bits.
const BigNat kDigitGuardBits = 3321929;
}

BoundValue covering_radius_bound(const Net& net, const Configuration& s_cov) {
    RackoffConstants k = compute_rackoff_constants(net, s_cov);
    BigNat ns = net.n_simple(), nc = net.n_complex(), ni = net.n_colours();
    BigNat arg = 48 * (ns + 1) * ni * ns * nc * BigNat(k.Rprime);
    if (arg < 1) arg = 1; // degenerate nets; the bound is vacuous there
    BigNat height = 2 * ns + 2 * slog_floor(arg);
    BoundValue v;
    v.tower_height = height;
    if (height <= kMaxExactTetHeight) {
        v.form = BoundValue::Form::exact;
        v.exact = tetration(height.convert_to<unsigned>());
    } else {
        v.form = BoundValue::Form::tower;
    }
    return v;
}

BoundValue petri_radius_bound(const BigNat& d, const BigNat& Rv, const BigNat& Rvp) {
    BigNat base = 6 * Rv * Rvp;
    BigNat expo = 1;
    for (BigNat k = 2; k <= d + 1; ++k) expo *= k;
    BoundValue v;
    v.base = base;
    v.exponent = expo;
    // bits(base^expo) ~ expo * bits(base)
    BigNat bits = expo * (msb(base) + 1);
    if (base >= 1 && bits < kDigitGuardBits) {
        v.form = BoundValue::Form::exact;
        v.exact = 1;
        BigNat b = base, e = expo;
        while (e > 0) {
            if (e % 2 == 1) v.exact *= b;
            e /= 2;
            if (e > 0) b *= b;
        }
    } else {
        v.form = BoundValue::Form::power;
    }
    return v;
}

} // namespace nnct
