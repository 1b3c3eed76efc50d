#include "crnstab/crn.hpp"

namespace crnstab {

const char* to_string(ChainKind chain) {
    switch (chain) {
        case ChainKind::X: return "X";
        case ChainKind::Y: return "Y";
        case ChainKind::Z: return "Z";
    }
    return "?";
}

ChainKind chain_from_string(const std::string& name) {
    if (name == "X" || name == "x") return ChainKind::X;
    if (name == "Y" || name == "y") return ChainKind::Y;
    if (name == "Z" || name == "z") return ChainKind::Z;
    throw std::invalid_argument("unknown chain '" + name + "' (expected X, Y or Z)");
}

unsigned __int128 falling_factorial(std::uint64_t y, unsigned p) {
    if (y < p) return 0;
    unsigned __int128 out = 1;
    for (unsigned i = 0; i < p; ++i) {
        const unsigned __int128 factor = y - i;
        unsigned __int128 next;
        if (__builtin_mul_overflow(out, factor, &next))
            throw std::overflow_error("falling_factorial overflow: " + std::to_string(y) + "^(" +
                                      std::to_string(p) + ") exceeds 128 bits");
        out = next;
    }
    return out;
}

double falling_factorial_d(std::int64_t y, int p) {
    if (y < p) return 0.0;
    double out = 1.0;
    for (int i = 0; i < p; ++i) out *= static_cast<double>(y - i);
    return out;
}

void ReactionSystem::propensities_into(LatticeState x, std::span<double> out) const {
    const auto& c = rate_constants;
    switch (chain) {
        case ChainKind::X:
            out[0] = c[0] * falling_factorial_d(x.x1, 3) * falling_factorial_d(x.x2, 2);
            out[1] = c[1] * falling_factorial_d(x.x1, 2) * falling_factorial_d(x.x2, 3);
            out[2] = c[2] * falling_factorial_d(x.x1, 4);
            out[3] = c[3] * falling_factorial_d(x.x2, 4);
            out[4] = c[4];
            break;
        case ChainKind::Y:
            // clamped below coordinate 2; the extra guard keeps the jump
            // inside the quadrant on the axes, where the chain is never
            // analyzed but must stay defined
            out[0] = c[0] * static_cast<double>(x.x1 > 2 && x.x2 >= 1 ? x.x1 - 2 : 0);
            out[1] = c[1] * static_cast<double>(x.x2 > 2 && x.x1 >= 1 ? x.x2 - 2 : 0);
            break;
        case ChainKind::Z: {
            if (x.x1 <= 2 || x.x2 <= 2) throw SmallStateError(x);
            const double denom = falling_factorial_d(x.x1, 2) * falling_factorial_d(x.x2, 2);
            out[0] = c[0] * static_cast<double>(x.x1 - 2);
            out[1] = c[1] * static_cast<double>(x.x2 - 2);
            out[2] = c[2] * falling_factorial_d(x.x1, 4) / denom;
            out[3] = c[3] * falling_factorial_d(x.x2, 4) / denom;
            out[4] = c[4] / denom;
            break;
        }
    }
}

std::vector<double> propensities(ChainKind chain, LatticeState x) {
    ReactionSystem sys{chain, {1, 1, 1, 1, 1}};
    std::vector<double> out(static_cast<std::size_t>(sys.count()));
    sys.propensities_into(x, out);
    return out;
}

std::vector<std::pair<LatticeState, double>> jump_targets(ChainKind chain, LatticeState x) {
    const auto rates = propensities(chain, x);
    std::vector<std::pair<LatticeState, double>> out;
    out.reserve(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] > 0.0)
            out.push_back({{x.x1 + kJumps[i][0], x.x2 + kJumps[i][1]}, rates[i]});
    }
    return out;
}

double apply_generator(ChainKind chain, const std::function<double(LatticeState)>& V, LatticeState x) {
    const auto rates = propensities(chain, x);
    const double vx = V(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] <= 0.0) continue;
        const LatticeState target{x.x1 + kJumps[i][0], x.x2 + kJumps[i][1]};
        sum += rates[i] * (V(target) - vx);
    }
    return sum;
}

}  // namespace crnstab
