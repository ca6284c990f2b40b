#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lploc/rational.hpp"

namespace lploc {

/// Nested period scales n_v^(i), one d-tuple per level v = 1..depth.
///
/// Construction enforces the growth, divisibility and cross-coordinate
/// comparability constraints; every downstream bound is only valid under
/// them.  Level 0 is implicit and equal to 1 in every coordinate.
class ScaleHierarchy {
public:
    ScaleHierarchy(std::size_t dim, int growth_exponent, BigInt comparability,
                   std::vector<std::vector<BigInt>> levels)
        : dim_(dim),
          growth_exponent_(growth_exponent),
          comparability_(std::move(comparability)),
          levels_(std::move(levels)) {
        if (dim_ < 1) throw std::invalid_argument("ScaleHierarchy: dimension must be >= 1");
        if (growth_exponent_ < 1)
            throw std::invalid_argument("ScaleHierarchy: growth exponent must be >= 1");
        if (comparability_ < 1)
            throw std::invalid_argument("ScaleHierarchy: comparability constant must be >= 1");
        if (levels_.empty()) throw std::invalid_argument("ScaleHierarchy: needs at least one level");
        for (std::size_t v = 0; v < levels_.size(); ++v) {
            if (levels_[v].size() != dim_)
                throw std::invalid_argument("ScaleHierarchy: level " + std::to_string(v + 1) +
                                            " has wrong arity");
            for (const auto& x : levels_[v])
                if (x < 2)
                    throw std::invalid_argument("ScaleHierarchy: all scales must be >= 2");
        }
        for (std::size_t v = 0; v + 1 < levels_.size(); ++v) {
            for (std::size_t i = 0; i < dim_; ++i) {
                const BigInt& a = levels_[v][i];
                const BigInt& b = levels_[v + 1][i];
                if (b < a * a)
                    throw std::invalid_argument("ScaleHierarchy: level " + std::to_string(v + 2) +
                                                " grows slower than squaring");
                if (b > pow_big(a, 2 * growth_exponent_))
                    throw std::invalid_argument("ScaleHierarchy: level " + std::to_string(v + 2) +
                                                " grows faster than the 2m-th power");
                if (b % a != 0)
                    throw std::invalid_argument("ScaleHierarchy: divisibility broken at level " +
                                                std::to_string(v + 2));
            }
        }
        for (std::size_t v = 0; v < levels_.size(); ++v)
            for (std::size_t i = 0; i < dim_; ++i)
                for (std::size_t j = 0; j < dim_; ++j)
                    if (levels_[v][i] > comparability_ * levels_[v][j])
                        throw std::invalid_argument(
                            "ScaleHierarchy: comparability violated at level " +
                            std::to_string(v + 1));
    }

    std::size_t dim() const { return dim_; }
    std::size_t depth() const { return levels_.size(); }
    int growth_exponent() const { return growth_exponent_; }
    const BigInt& comparability() const { return comparability_; }

    // n_v^(i), 1-based level; level 0 is the implicit all-ones level.
    BigInt scale(std::size_t v, std::size_t i) const {
        if (i >= dim_) throw std::out_of_range("ScaleHierarchy::scale: coordinate out of range");
        if (v == 0) return 1;
        if (v > depth()) throw std::out_of_range("ScaleHierarchy::scale: level out of range");
        return levels_[v - 1][i];
    }

    const std::vector<BigInt>& level(std::size_t v) const {
        if (v < 1 || v > depth()) throw std::out_of_range("ScaleHierarchy::level: out of range");
        return levels_[v - 1];
    }

    BigInt max_scale(std::size_t v) const {
        BigInt m = scale(v, 0);
        for (std::size_t i = 1; i < dim_; ++i) m = std::max(m, scale(v, i));
        return m;
    }

    bool operator==(const ScaleHierarchy& o) const {
        return dim_ == o.dim_ && growth_exponent_ == o.growth_exponent_ &&
               comparability_ == o.comparability_ && levels_ == o.levels_;
    }

    static BigInt pow_big(BigInt base, unsigned exp) {
        BigInt r = 1;
        while (exp) {
            if (exp & 1u) r *= base;
            base *= base;
            exp >>= 1u;
        }
        return r;
    }

private:
    std::size_t dim_;
    int growth_exponent_;
    BigInt comparability_;
    std::vector<std::vector<BigInt>> levels_;
};

// Canonical generator: n_{v+1} = n_v^2 in every coordinate, so the growth
// exponent is 1 and the comparability constant is 1.  Values are exact big
// integers; depth is capped where the doubly exponential scales stop being
// materializable.
inline ScaleHierarchy tower_hierarchy(std::size_t dim, unsigned base, std::size_t depth) {
    if (base < 2) throw std::invalid_argument("tower_hierarchy: base must be >= 2");
    if (depth < 1) throw std::invalid_argument("tower_hierarchy: depth must be >= 1");
    if (depth > 24)
        throw std::invalid_argument("tower_hierarchy: depth too large to materialize");
    std::vector<std::vector<BigInt>> levels;
    levels.reserve(depth);
    BigInt n = base;
    for (std::size_t v = 0; v < depth; ++v) {
        levels.emplace_back(dim, n);
        if (v + 1 < depth) n *= n;
    }
    return ScaleHierarchy(dim, 1, 1, std::move(levels));
}

}  // namespace lploc
