#ifndef NNCT_NET_HH_
#define NNCT_NET_HH_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nnct/common.hh"

namespace nnct {

using PlaceId = std::uint32_t;
using ColourId = std::uint32_t;
using RuleId = std::uint32_t;

/// A complex token: a finite multiset of coloured tokens. Canonical form
/// stores (colour, count) pairs sorted by colour with zero counts elided,
/// so default comparison is the lexicographic (colour-index, count) order.
struct ComplexToken {
    std::vector<std::pair<ColourId, Nat>> counts;

    ComplexToken() = default;
    explicit ComplexToken(std::vector<std::pair<ColourId, Nat>> cs);

    Nat count(ColourId c) const;
    void set(ColourId c, Nat v);
    void add(ColourId c, Nat v);
    bool is_empty() const { return counts.empty(); }
    Nat max_count() const; // ||m||_col

    /// m restricted to the colours in `keep` (sorted).
    ComplexToken restrict_to(const std::vector<ColourId>& keep) const;
    /// m restricted to the colours not in `drop` (sorted).
    ComplexToken restrict_away(const std::vector<ColourId>& drop) const;
    ComplexToken plus(const ComplexToken& other) const;

    auto operator<=>(const ComplexToken&) const = default;
};

/// Zero-or-dominating order: for every colour either both counts are zero
/// or 0 < a(c) <= b(c).
bool leq_token(const ComplexToken& a, const ComplexToken& b);

/// Multiset of complex tokens held by one complex place. Entries sorted by
/// token value, multiplicities positive.
struct TokenBag {
    std::vector<std::pair<ComplexToken, Nat>> items;

    Nat total() const;
    Nat count(const ComplexToken& t) const;
    void add(const ComplexToken& t, Nat n);
    /// Removes n copies; throws arithmetic_error if fewer are present.
    void remove(const ComplexToken& t, Nat n);
    bool is_empty() const { return items.empty(); }
    Nat max_colour_norm() const;

    auto operator<=>(const TokenBag&) const = default;
};

/// True iff a's tokens embed injectively into b's with leq_token.
bool leq_bag(const TokenBag& a, const TokenBag& b);

/// Simple-place counts plus per-complex-place token bags, both sparse and
/// sorted; this is the canonical form configurations compare and hash by.
struct Configuration {
    std::vector<std::pair<PlaceId, Nat>> simple;
    std::vector<std::pair<PlaceId, TokenBag>> complex;

    Nat simple_count(PlaceId p) const;
    void set_simple(PlaceId p, Nat n);
    void add_simple(PlaceId p, Nat n);
    /// Throws arithmetic_error on underflow.
    void sub_simple(PlaceId p, Nat n);
    const TokenBag* bag(PlaceId p) const;
    TokenBag& bag_mut(PlaceId p);
    void add_token(PlaceId p, const ComplexToken& t, Nat n = 1);
    void remove_token(PlaceId p, const ComplexToken& t, Nat n = 1);
    void normalize();

    bool is_simple_only() const; // no complex tokens at all
    Nat total_tokens() const;

    auto operator<=>(const Configuration&) const = default;
};

Configuration oplus(const Configuration& a, const Configuration& b);
/// Multiset difference; requires b's tokens to occur in a by value.
Configuration ominus(const Configuration& a, const Configuration& b);
bool geq_pointwise(const Configuration& a, const Configuration& b);

/// The configuration order: simple counts componentwise, token bags by
/// injective leq_token matching.
bool leq_config(const Configuration& a, const Configuration& b);
inline bool lt_config(const Configuration& a, const Configuration& b) {
    return a != b && leq_config(a, b);
}

struct ConfigHash {
    std::size_t operator()(const Configuration& c) const;
};

/// (I, O); the complex part of I may only ask for empty tokens.
struct SimpleRule {
    Configuration in;
    Configuration out;
};

/// Moves one token from `from` to `to`, adding `inject` to it.
struct ComplexRule {
    PlaceId from = 0;
    PlaceId to = 0;
    ComplexToken inject;
    Configuration in;  // simple-only
    Configuration out; // simple-only
};

/// Moves one token from `from` to `to`, ejecting each active colour c to
/// the simple place zeta(c).
struct TransferRule {
    PlaceId from = 0;
    PlaceId to = 0;
    std::vector<ColourId> active; // sorted
    Configuration in;  // simple-only
    Configuration out; // simple-only
};

struct Rule {
    std::string name;
    std::variant<SimpleRule, ComplexRule, TransferRule> body;

    const SimpleRule* as_simple() const { return std::get_if<SimpleRule>(&body); }
    const ComplexRule* as_complex() const { return std::get_if<ComplexRule>(&body); }
    const TransferRule* as_transfer() const { return std::get_if<TransferRule>(&body); }
};

/// A net with nested coloured tokens.
struct Net {
    std::string name;
    std::vector<std::string> simple_places;
    std::vector<std::string> complex_places;
    std::vector<std::string> colours;
    std::vector<PlaceId> colour_map; // colour -> simple place (zeta)
    std::vector<Rule> rules;

    std::size_t n_simple() const { return simple_places.size(); }
    std::size_t n_complex() const { return complex_places.size(); }
    std::size_t n_colours() const { return colours.size(); }

    PlaceId add_simple(const std::string& n);
    PlaceId add_complex(const std::string& n);
    ColourId add_colour(const std::string& n, PlaceId target);
    RuleId add_rule(Rule r);

    std::optional<PlaceId> find_simple(const std::string& n) const;
    std::optional<PlaceId> find_complex(const std::string& n) const;
    std::optional<ColourId> find_colour(const std::string& n) const;
    std::optional<RuleId> find_rule(const std::string& n) const;

    bool is_total_transfer() const;
};

/// Checks all Net/Rule well-formedness conditions; empty result = valid.
std::vector<Diagnostic> validate_net(const Net& net);
void validate_net_or_throw(const Net& net);

/// Checks that a configuration only references declared places and has
/// positive multiplicities in canonical form.
std::vector<Diagnostic> validate_config(const Net& net, const Configuration& c);

class not_enabled_error : public std::runtime_error {
public:
    explicit not_enabled_error(const std::string& what) : std::runtime_error(what) {}
};
class invalid_choice_error : public std::runtime_error {
public:
    explicit invalid_choice_error(const std::string& what) : std::runtime_error(what) {}
};

/// Fires `rule` at `s`. Complex and transfer rules take the value of the
/// token to pick from the source place; simple rules take no choice.
Configuration fire_rule(const Net& net, const Configuration& s, const Rule& rule,
                        const std::optional<ComplexToken>& pick = std::nullopt);

bool rule_enabled(const Net& net, const Configuration& s, const Rule& rule,
                  const std::optional<ComplexToken>& pick = std::nullopt);

/// One concrete firing: rule index plus token choice where applicable.
struct Step {
    RuleId rule = 0;
    std::optional<ComplexToken> pick;
    Configuration next;
};

/// All one-step firings, one representative per distinct token value.
std::vector<Step> enumerate_steps(const Net& net, const Configuration& s);

/// Deduplicated successor configurations, canonically sorted.
std::vector<Configuration> successors(const Net& net, const Configuration& s);

/// The relativised net N_i: simple places with index >= i are dropped from
/// all rule pre/post sets (an ignored place never blocks a rule).
Net restrict_net(const Net& net, std::uint32_t i);
Configuration restrict_config(const Configuration& c, std::uint32_t i);

std::string show_token(const Net& net, const ComplexToken& t);
std::string show_config(const Net& net, const Configuration& c);

} // namespace nnct

#endif
