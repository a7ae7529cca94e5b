#ifndef NNCT_TESTS_RANDOM_GEN_HH_
#define NNCT_TESTS_RANDOM_GEN_HH_

#include <random>

#include "nnct/net.hh"

namespace nnct::testing {

using Rng = std::mt19937;

inline std::uint32_t pick(Rng& rng, std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

struct GenOptions {
    std::uint32_t max_simple = 3;
    std::uint32_t max_complex = 2;
    std::uint32_t max_colours = 3;
    std::uint32_t max_rules = 4;
    Nat max_count = 2;
};

inline ComplexToken random_token(Rng& rng, std::uint32_t n_colours, Nat max_count) {
    ComplexToken t;
    for (ColourId c = 0; c < n_colours; ++c)
        if (pick(rng, 0, 2) == 0) t.set(c, pick(rng, 1, static_cast<std::uint32_t>(max_count)));
    return t;
}

inline Configuration random_simple_config(Rng& rng, const Net& net, Nat max_count) {
    Configuration c;
    for (PlaceId p = 0; p < net.n_simple(); ++p)
        if (pick(rng, 0, 1) == 0) c.set_simple(p, pick(rng, 1, static_cast<std::uint32_t>(max_count)));
    return c;
}

inline Configuration random_config(Rng& rng, const Net& net, Nat max_count,
                                   std::uint32_t max_tokens_per_place = 2) {
    Configuration c = random_simple_config(rng, net, max_count);
    for (PlaceId p = 0; p < net.n_complex(); ++p) {
        std::uint32_t k = pick(rng, 0, max_tokens_per_place);
        for (std::uint32_t j = 0; j < k; ++j)
            c.add_token(p, random_token(rng, static_cast<std::uint32_t>(net.n_colours()), max_count));
    }
    return c;
}

inline Net random_net(Rng& rng, const GenOptions& o = {}) {
    Net net;
    net.name = "rand";
    std::uint32_t ns = pick(rng, 1, o.max_simple);
    std::uint32_t nc = pick(rng, 0, o.max_complex);
    std::uint32_t ni = nc == 0 ? 0 : pick(rng, 1, o.max_colours);
    for (std::uint32_t k = 0; k < ns; ++k) net.add_simple("s" + std::to_string(k));
    for (std::uint32_t k = 0; k < nc; ++k) net.add_complex("c" + std::to_string(k));
    for (std::uint32_t k = 0; k < ni; ++k)
        net.add_colour("col" + std::to_string(k), pick(rng, 0, ns - 1));

    std::uint32_t nr = pick(rng, 1, o.max_rules);
    for (std::uint32_t k = 0; k < nr; ++k) {
        std::uint32_t kind = nc == 0 ? 0 : pick(rng, 0, 2);
        std::string name = "r" + std::to_string(k);
        if (kind == 0) {
            SimpleRule r;
            r.in = random_simple_config(rng, net, o.max_count);
            r.out = random_simple_config(rng, net, o.max_count);
            if (nc > 0 && pick(rng, 0, 1) == 0)
                r.in.add_token(pick(rng, 0, nc - 1), ComplexToken{});
            if (nc > 0 && pick(rng, 0, 1) == 0)
                r.out.add_token(pick(rng, 0, nc - 1), random_token(rng, ni, o.max_count));
            net.add_rule({name, r});
        } else if (kind == 1) {
            ComplexRule r;
            r.from = pick(rng, 0, nc - 1);
            r.to = pick(rng, 0, nc - 1);
            r.inject = random_token(rng, ni, o.max_count);
            r.in = random_simple_config(rng, net, 1);
            r.out = random_simple_config(rng, net, 1);
            net.add_rule({name, r});
        } else {
            TransferRule r;
            r.from = pick(rng, 0, nc - 1);
            r.to = pick(rng, 0, nc - 1);
            r.in = random_simple_config(rng, net, 1);
            r.out = random_simple_config(rng, net, 1);
            // Active set with injective zeta: greedily admit colours whose
            // target place is still free.
            std::vector<bool> used(ns, false);
            for (ColourId c = 0; c < ni; ++c) {
                if (pick(rng, 0, 1) == 0) continue;
                if (used[net.colour_map[c]]) continue;
                used[net.colour_map[c]] = true;
                r.active.push_back(c);
            }
            net.add_rule({name, r});
        }
    }
    return net;
}

} // namespace nnct::testing

#endif
