#ifndef NNCT_RACKOFF_HH_
#define NNCT_RACKOFF_HH_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nnct/net.hh"

namespace nnct {

using BigNat = boost::multiprecision::cpp_int;

/// Norms of one configuration relative to the first `i` simple places.
struct NormReport {
    std::uint32_t i = 0;
    Nat sim_i = 0;  // max simple count over the first i places
    Nat full_i = 0; // sim_i joined with complex-place sizes and colour maxima
};

Nat token_colour_norm(const ComplexToken& m); // ||m||_col
NormReport compute_norms(const Net& net, const Configuration& s, std::uint32_t i);

struct RackoffConstants {
    Nat R = 1;
    std::set<Nat> Xi;
    Nat Rprime = 2; // R + 1 + max(Xi u {||s_cov||})
};

RackoffConstants compute_rackoff_constants(const Net& net, const Configuration& s_cov);

/// One counter-abstraction rule: fire at v when v >= guard, yielding
/// v + delta (which must stay non-negative).
struct PetriRule {
    std::vector<std::int64_t> delta;
    std::vector<Nat> guard;
    std::string label;
};

/// The counter-abstraction Petri net V_{i,B} (plus the swap rules of the
/// ordered variant when `ordered`). Coordinates: the first `i` count simple
/// places; then one block of (B+1)^(n_colours) clamped-profile classes per
/// complex place, in mixed-radix order of theta = sum_k j_k (B+1)^k.
struct AbstractNet {
    std::uint32_t i = 0;
    Nat B = 1;
    std::uint32_t n_colours = 0;
    std::uint32_t n_complex = 0;
    std::uint32_t dimension = 0;
    std::vector<PetriRule> rules;
    std::size_t swap_rule_begin = 0; // rules[swap_rule_begin..) are swap rules
    bool ordered = false;

    /// Coordinate of a simple place (< i).
    std::uint32_t index_of_simple(PlaceId p) const;
    /// Coordinate of (complex place, clamped colour profile); the profile
    /// lists min(count, B) per colour in declaration order.
    std::uint32_t index_of_class(PlaceId cplace, const std::vector<Nat>& profile) const;
    std::vector<Nat> profile_of(const ComplexToken& m) const;
};

class dimension_cap_error : public std::runtime_error {
public:
    explicit dimension_cap_error(const std::string& w, std::uint64_t dim)
        : std::runtime_error(w), dimension(dim) {}
    std::uint64_t dimension;
};

/// The abstraction map alpha_{i,B}; linear in configurations.
std::vector<Nat> abstract_config(const Net& net, const Configuration& s, std::uint32_t i,
                                 Nat B);

AbstractNet build_counter_abstraction(const Net& net, std::uint32_t i, Nat B, bool ordered,
                                      std::uint64_t dimension_cap = 1u << 22);

/// All one-step successors of v.
std::vector<std::vector<Nat>> petri_step(const AbstractNet& anet, const std::vector<Nat>& v);

// ---------------------------------------------------------------------------
// Tower bounds

/// tet(0)=1, tet(h+1)=2^tet(h); only representable heights (<= 5) allowed.
BigNat tetration(unsigned h);
/// Largest h with tet(h) <= n; requires n >= 1.
unsigned slog_floor(const BigNat& n);

/// An exactly-computed value, or a symbolic form whose parameters are exact.
struct BoundValue {
    enum class Form { exact, tower, power } form = Form::exact;
    BigNat exact;        // Form::exact
    BigNat tower_height; // Form::tower (value = tet(height)); also set for
                         // exact tower values so heights stay comparable
    BigNat base, exponent; // Form::power (value = base^exponent)
    std::string render() const;
};

/// Theorem-of-reference covering-radius bound:
/// tet(2 n_S + 2 slog(48 (n_S+1) n_I n_S n_C R')).
BoundValue covering_radius_bound(const Net& net, const Configuration& s_cov);

/// (6 R_V R'_V)^((d+1)!), exact when small enough.
BoundValue petri_radius_bound(const BigNat& d, const BigNat& Rv, const BigNat& Rvp);

} // namespace nnct

#endif
