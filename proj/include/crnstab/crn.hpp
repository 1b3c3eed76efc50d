#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace crnstab {

/// State of the chain: molecule counts of the two species.
struct LatticeState {
    std::int64_t x1 = 0;
    std::int64_t x2 = 0;

    std::int64_t norm1() const { return x1 + x2; }
    friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

inline LatticeState swapped(LatticeState x) { return {x.x2, x.x1}; }

/// X is the full five-reaction chain; Z its slowed-down version evolving on
/// an O(1) timescale; Y keeps only the two dominant reactions of Z.
enum class ChainKind { X, Y, Z };

const char* to_string(ChainKind chain);
ChainKind chain_from_string(const std::string& name);

/// Thrown when Z-chain rates are requested at a state with a coordinate <= 2,
/// where the chain is not defined.
struct SmallStateError : std::domain_error {
    explicit SmallStateError(LatticeState x)
        : std::domain_error("undefined small state: Z-chain rates need both coordinates >= 3, got (" +
                            std::to_string(x.x1) + "," + std::to_string(x.x2) + ")") {}
};

/// Jump vectors in fixed reaction order. The first two are shared by all
/// three chains; X and Z have all five.
inline constexpr std::array<std::array<int, 2>, 5> kJumps{{{+2, -1}, {-1, +2}, {-4, 0}, {0, -4}, {+1, +1}}};

inline int reaction_count(ChainKind chain) { return chain == ChainKind::Y ? 2 : 5; }

/// Falling factorial y(y-1)...(y-p+1); zero when y < p. Exact integer
/// arithmetic; throws std::overflow_error instead of wrapping.
unsigned __int128 falling_factorial(std::uint64_t y, unsigned p);

/// Falling factorial evaluated in double precision (used for propensities,
/// which can reach ~1e20 at excursion peaks).
double falling_factorial_d(std::int64_t y, int p);

/// The reaction network with optional per-reaction rate-constant multipliers
/// (all 1 in the reference setup; results do not depend on them).
struct ReactionSystem {
    ChainKind chain = ChainKind::X;
    std::array<double, 5> rate_constants{1.0, 1.0, 1.0, 1.0, 1.0};

    int count() const { return reaction_count(chain); }
    const std::array<int, 2>& jump(int i) const { return kJumps[static_cast<std::size_t>(i)]; }

    /// Writes the propensity of each reaction, in fixed reaction order, into
    /// out (whose size must be >= count()). Throws SmallStateError for the
    /// Z chain at small states.
    void propensities_into(LatticeState x, std::span<double> out) const;
};

/// Propensity vector at x, in fixed reaction order (unit rate constants).
std::vector<double> propensities(ChainKind chain, LatticeState x);

/// Reachable states and their rates; only strictly positive rates are listed.
std::vector<std::pair<LatticeState, double>> jump_targets(ChainKind chain, LatticeState x);

/// Generator applied to V at x: sum of rate * (V(target) - V(x)) over the
/// reactions, accumulated in fixed reaction order for reproducibility.
double apply_generator(ChainKind chain, const std::function<double(LatticeState)>& V, LatticeState x);

}  // namespace crnstab
