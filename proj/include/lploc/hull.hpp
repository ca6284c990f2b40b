#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lploc/hierarchy.hpp"
#include "lploc/lattice.hpp"
#include "lploc/potential.hpp"
#include "lploc/rational.hpp"

namespace lploc {

/// A point of the hull in profinite coordinates: one residue tuple per
/// level, compatible under reduction.  The identity is the all-zero point;
/// lattice translations act by adding the translation to every level.
class HullPoint {
public:
    HullPoint(std::shared_ptr<const ScaleHierarchy> hierarchy,
              std::vector<std::vector<BigInt>> residues)
        : hierarchy_(std::move(hierarchy)), residues_(std::move(residues)) {
        if (!hierarchy_) throw std::invalid_argument("HullPoint: null hierarchy");
        if (residues_.empty() || residues_.size() > hierarchy_->depth())
            throw std::invalid_argument("HullPoint: depth out of range");
        const std::size_t d = hierarchy_->dim();
        for (std::size_t v = 1; v <= residues_.size(); ++v) {
            if (residues_[v - 1].size() != d)
                throw std::invalid_argument("HullPoint: residue arity mismatch");
            for (std::size_t i = 0; i < d; ++i) {
                const BigInt& r = residues_[v - 1][i];
                if (r < 0 || r >= hierarchy_->scale(v, i))
                    throw std::invalid_argument("HullPoint: residue out of range");
                if (v > 1 && r % hierarchy_->scale(v - 1, i) != residues_[v - 2][i])
                    throw std::invalid_argument("HullPoint: incompatible residues at level " +
                                                std::to_string(v));
            }
        }
    }

    const ScaleHierarchy& hierarchy() const { return *hierarchy_; }
    std::shared_ptr<const ScaleHierarchy> hierarchy_ptr() const { return hierarchy_; }
    std::size_t depth() const { return residues_.size(); }
    std::size_t dim() const { return hierarchy_->dim(); }

    const BigInt& residue_at(std::size_t v, std::size_t i) const {
        if (v < 1 || v > depth()) throw std::out_of_range("HullPoint::residue_at: level");
        return residues_[v - 1].at(i);
    }

    const std::vector<std::vector<BigInt>>& residues() const { return residues_; }

    bool operator==(const HullPoint& o) const {
        return residues_ == o.residues_ && hierarchy() == o.hierarchy();
    }

private:
    std::shared_ptr<const ScaleHierarchy> hierarchy_;
    std::vector<std::vector<BigInt>> residues_;
};

namespace detail {

inline void check_same_group(const HullPoint& a, const HullPoint& b) {
    if (a.depth() != b.depth()) throw std::invalid_argument("hull: depth mismatch");
    if (!(a.hierarchy() == b.hierarchy()))
        throw std::invalid_argument("hull: hierarchy mismatch");
}

}  // namespace detail

inline HullPoint hull_identity(std::shared_ptr<const ScaleHierarchy> h, std::size_t depth) {
    if (!h) throw std::invalid_argument("hull_identity: null hierarchy");
    if (depth < 1 || depth > h->depth())
        throw std::invalid_argument("hull_identity: depth out of range");
    std::vector<std::vector<BigInt>> res(depth, std::vector<BigInt>(h->dim(), 0));
    return HullPoint(std::move(h), std::move(res));
}

inline HullPoint hull_add(const HullPoint& a, const HullPoint& b) {
    detail::check_same_group(a, b);
    std::vector<std::vector<BigInt>> res(a.depth(), std::vector<BigInt>(a.dim()));
    for (std::size_t v = 1; v <= a.depth(); ++v)
        for (std::size_t i = 0; i < a.dim(); ++i)
            res[v - 1][i] =
                residue(a.residue_at(v, i) + b.residue_at(v, i), a.hierarchy().scale(v, i));
    return HullPoint(a.hierarchy_ptr(), std::move(res));
}

inline HullPoint hull_neg(const HullPoint& a) {
    std::vector<std::vector<BigInt>> res(a.depth(), std::vector<BigInt>(a.dim()));
    for (std::size_t v = 1; v <= a.depth(); ++v)
        for (std::size_t i = 0; i < a.dim(); ++i)
            res[v - 1][i] = residue(-a.residue_at(v, i), a.hierarchy().scale(v, i));
    return HullPoint(a.hierarchy_ptr(), std::move(res));
}

// Image of the lattice translation n in the hull.
inline HullPoint embed_translation(std::shared_ptr<const ScaleHierarchy> h, std::size_t depth,
                                   const LatticePoint& n) {
    if (!h) throw std::invalid_argument("embed_translation: null hierarchy");
    if (n.dim() != h->dim()) throw std::invalid_argument("embed_translation: dimension mismatch");
    if (depth < 1 || depth > h->depth())
        throw std::invalid_argument("embed_translation: depth out of range");
    std::vector<std::vector<BigInt>> res(depth, std::vector<BigInt>(h->dim()));
    for (std::size_t v = 1; v <= depth; ++v)
        for (std::size_t i = 0; i < h->dim(); ++i)
            res[v - 1][i] = residue(n[i], h->scale(v, i));
    return HullPoint(std::move(h), std::move(res));
}

inline HullPoint hull_translate(const HullPoint& w, const LatticePoint& n) {
    return hull_add(w, embed_translation(w.hierarchy_ptr(), w.depth(), n));
}

// Level-k truncated potential sample along the orbit of w, exact.
inline Rational sample_truncated(const HullPoint& w, const LatticePoint& n, std::size_t k) {
    if (n.dim() != w.dim()) throw std::invalid_argument("sample_truncated: dimension mismatch");
    if (k > w.depth()) throw std::out_of_range("sample_truncated: level beyond depth");
    const ScaleHierarchy& h = w.hierarchy();
    Rational sum = 0;
    for (std::size_t v = 1; v <= k; ++v) {
        BigInt digits = 0;
        for (std::size_t i = 0; i < h.dim(); ++i)
            digits += residue(BigInt(n[i]) + w.residue_at(v, i), h.scale(v, i));
        if (digits != 0) sum += Rational(digits) * level_weight(h, v);
    }
    return sum;
}

// Certified potential sample: smallest truncation level whose tail bound
// meets the target radius, limited by the point's depth.
inline CertifiedValue sample_potential(const HullPoint& w, const LatticePoint& n,
                                       const Rational& target_radius) {
    if (target_radius <= 0)
        throw std::invalid_argument("sample_potential: target radius must be positive");
    const ScaleHierarchy& h = w.hierarchy();
    const std::size_t k_max = std::min(w.depth(), h.depth() - 1);
    for (std::size_t k = 0; k <= k_max; ++k) {
        const Rational tail = tail_bound(h, k);
        if (tail <= target_radius)
            return CertifiedValue(sample_truncated(w, n, k), tail);
    }
    throw std::runtime_error("sample_potential: depth exhausted before reaching target radius");
}

// Enclosure of the sup-distance between the potentials of two hull points:
// the exact level-k sup over one fundamental domain, widened by the two
// truncation tails.
inline CertifiedValue hull_distance(const HullPoint& a, const HullPoint& b, std::size_t k) {
    detail::check_same_group(a, b);
    const ScaleHierarchy& h = a.hierarchy();
    if (k < 1 || k > a.depth() || k >= h.depth())
        throw std::invalid_argument("hull_distance: level must satisfy 1 <= k <= depth, k < hierarchy depth");
    const std::size_t d = h.dim();
    std::vector<std::int64_t> sides(d);
    std::uint64_t domain = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const BigInt n = h.scale(k, i);
        if (n > BigInt(std::int64_t{1} << 24))
            throw std::invalid_argument("hull_distance: fundamental domain too large");
        sides[i] = n.convert_to<std::int64_t>();
        domain *= static_cast<std::uint64_t>(sides[i]);
        if (domain > (std::uint64_t{1} << 26))
            throw std::invalid_argument("hull_distance: fundamental domain too large");
    }
    Rational sup = 0;
    std::vector<Coord> digits(d, 0);
    for (std::uint64_t idx = 0; idx < domain; ++idx) {
        const LatticePoint site{std::vector<Coord>(digits)};
        Rational diff = sample_truncated(a, site, k) - sample_truncated(b, site, k);
        if (diff < 0) diff = -diff;
        if (diff > sup) sup = diff;
        for (std::size_t i = d; i-- > 0;) {
            if (++digits[i] < sides[i]) break;
            digits[i] = 0;
        }
    }
    return CertifiedValue(sup, 2 * tail_bound(h, k));
}

// The translation that reproduces w from the identity through every stored
// level: the top-level residues, one per coordinate.  Compatibility makes
// the single readout sufficient.
inline LatticePoint orbit_witness(const HullPoint& w) {
    std::vector<Coord> t(w.dim());
    for (std::size_t i = 0; i < w.dim(); ++i) {
        const BigInt& r = w.residue_at(w.depth(), i);
        if (r > BigInt(std::numeric_limits<Coord>::max()))
            throw std::overflow_error("orbit_witness: residue exceeds lattice coordinate range");
        t[i] = r.convert_to<Coord>();
    }
    return LatticePoint(std::move(t));
}

/// Continuous sampling functions on the hull used by the pipelines.
struct SamplingFunction {
    enum class Kind { evaluation_at_zero, periodic_level, distance_to_identity };
    Kind kind = Kind::evaluation_at_zero;
    std::size_t level = 0;  // periodic_level only

    static SamplingFunction evaluation_at_zero() { return {Kind::evaluation_at_zero, 0}; }
    static SamplingFunction periodic_level(std::size_t k) { return {Kind::periodic_level, k}; }
    static SamplingFunction distance_to_identity() { return {Kind::distance_to_identity, 0}; }
};

inline CertifiedValue apply_sampling(const SamplingFunction& f, const HullPoint& w) {
    const ScaleHierarchy& h = w.hierarchy();
    const std::size_t deepest = std::min(w.depth(), h.depth() - 1);
    switch (f.kind) {
        case SamplingFunction::Kind::evaluation_at_zero:
            return CertifiedValue(sample_truncated(w, LatticePoint::zero(w.dim()), deepest),
                                  tail_bound(h, deepest));
        case SamplingFunction::Kind::periodic_level:
            if (f.level > w.depth())
                throw std::out_of_range("apply_sampling: periodic level beyond depth");
            return CertifiedValue(sample_truncated(w, LatticePoint::zero(w.dim()), f.level), 0);
        case SamplingFunction::Kind::distance_to_identity:
            return hull_distance(hull_identity(w.hierarchy_ptr(), w.depth()), w, deepest);
    }
    throw std::logic_error("apply_sampling: unknown kind");
}

namespace detail {

// Uniform draw from [0, bound) by rejection over the minimal bit width.
inline BigInt uniform_big(std::mt19937_64& rng, const BigInt& bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_big: bound must be positive");
    if (bound == 1) return 0;
    const std::size_t bits = boost::multiprecision::msb(bound - 1) + 1;
    while (true) {
        BigInt x = 0;
        std::size_t got = 0;
        while (got < bits) {
            const std::size_t take = std::min<std::size_t>(64, bits - got);
            std::uint64_t word = rng();
            if (take < 64) word &= (std::uint64_t{1} << take) - 1;
            x <<= static_cast<unsigned>(take);
            x += word;
            got += take;
        }
        if (x < bound) return x;
    }
}

}  // namespace detail

// Uniform compatible point: draw the first level uniformly, then lift level
// by level with an independent uniform quotient digit.  Deterministic for a
// fixed seed.
inline HullPoint random_hull_point(std::uint64_t seed, std::shared_ptr<const ScaleHierarchy> h,
                                   std::size_t depth) {
    if (!h) throw std::invalid_argument("random_hull_point: null hierarchy");
    if (depth < 1 || depth > h->depth())
        throw std::invalid_argument("random_hull_point: depth out of range");
    std::mt19937_64 rng(seed);
    const std::size_t d = h->dim();
    std::vector<std::vector<BigInt>> res(depth, std::vector<BigInt>(d));
    for (std::size_t i = 0; i < d; ++i)
        res[0][i] = detail::uniform_big(rng, h->scale(1, i));
    for (std::size_t v = 2; v <= depth; ++v)
        for (std::size_t i = 0; i < d; ++i) {
            const BigInt quotient = h->scale(v, i) / h->scale(v - 1, i);
            res[v - 1][i] =
                res[v - 2][i] + h->scale(v - 1, i) * detail::uniform_big(rng, quotient);
        }
    return HullPoint(std::move(h), std::move(res));
}

}  // namespace lploc
