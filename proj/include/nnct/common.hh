#ifndef NNCT_COMMON_HH_
#define NNCT_COMMON_HH_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnct {

/// Token multiplicities. Machine naturals with checked arithmetic; the
/// bound calculator (rackoff.hh) is the only user of big integers.
using Nat = std::uint64_t;

class arithmetic_error : public std::runtime_error {
public:
    explicit arithmetic_error(const std::string& what) : std::runtime_error(what) {}
};

inline Nat checked_add(Nat a, Nat b) {
    if (a > std::numeric_limits<Nat>::max() - b)
        throw arithmetic_error("natural overflow in addition");
    return a + b;
}

inline Nat checked_sub(Nat a, Nat b) {
    if (b > a) throw arithmetic_error("natural underflow in subtraction");
    return a - b;
}

inline Nat checked_mul(Nat a, Nat b) {
    if (b != 0 && a > std::numeric_limits<Nat>::max() / b)
        throw arithmetic_error("natural overflow in multiplication");
    return a * b;
}

inline void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

/// A validation finding; `subject` names the offending rule or place.
struct Diagnostic {
    std::string subject;
    std::string message;
};

} // namespace nnct

#endif
