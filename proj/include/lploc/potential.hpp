#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lploc/hierarchy.hpp"
#include "lploc/lattice.hpp"
#include "lploc/rational.hpp"

namespace lploc {

// Canonical non-negative representative of p mod n.
inline BigInt residue(const BigInt& p, const BigInt& n) {
    if (n < 1) throw std::invalid_argument("residue: modulus must be >= 1");
    BigInt r = p % n;
    if (r < 0) r += n;
    return r;
}

inline BigInt residue(Coord p, const BigInt& n) { return residue(BigInt(p), n); }

// 1 / prod_i (n_{v-1}^(i))^2 n_v^(i), the weight of level v.
inline Rational level_weight(const ScaleHierarchy& h, std::size_t v) {
    if (v < 1 || v > h.depth())
        throw std::out_of_range("level_weight: level out of range");
    BigInt den = 1;
    for (std::size_t i = 0; i < h.dim(); ++i) {
        const BigInt prev = h.scale(v - 1, i);
        den *= prev * prev * h.scale(v, i);
    }
    return Rational(BigInt(1), den);
}

// Finite level-k truncation of the potential, exact.
inline Rational eval_truncated(const ScaleHierarchy& h, const LatticePoint& t, std::size_t k) {
    if (t.dim() != h.dim()) throw std::invalid_argument("eval_truncated: dimension mismatch");
    if (k > h.depth()) throw std::out_of_range("eval_truncated: level out of range");
    Rational sum = 0;
    for (std::size_t v = 1; v <= k; ++v) {
        BigInt digits = 0;
        for (std::size_t i = 0; i < h.dim(); ++i)
            digits += residue(t[i], h.scale(v, i));
        if (digits != 0) sum += Rational(digits) * level_weight(h, v);
    }
    return sum;
}

// Rigorous upper bound on sup_t |V(t) - V_k(t)|.  The per-level term is
// d * max_i n_v^(i) * weight(v); under the hierarchy growth constraints
// consecutive terms at least halve, so twice the first omitted term closes
// the whole tail.
inline Rational tail_bound(const ScaleHierarchy& h, std::size_t k) {
    if (k >= h.depth())
        throw std::out_of_range("tail_bound: needs a level beyond k, got k = " +
                                std::to_string(k) + " at depth " + std::to_string(h.depth()));
    const Rational first = Rational(BigInt(h.dim()) * h.max_scale(k + 1)) * level_weight(h, k + 1);
    return 2 * first;
}

// Tightest enclosure achievable within the available depth: smallest k with
// tail_bound(k) <= target_radius.
inline CertifiedValue eval_certified(const ScaleHierarchy& h, const LatticePoint& t,
                                     const Rational& target_radius) {
    if (target_radius <= 0)
        throw std::invalid_argument("eval_certified: target radius must be positive");
    for (std::size_t k = 0; k < h.depth(); ++k) {
        const Rational tail = tail_bound(h, k);
        if (tail <= target_radius)
            return CertifiedValue(eval_truncated(h, t, k), tail);
    }
    throw std::runtime_error("eval_certified: depth exhausted before reaching target radius");
}

/// Piecewise bound x -> K * max(M, x)^P controlling the separation of
/// translates: constant on [0, M), a pure power beyond.
struct ApproxFunction {
    Rational plateau_coeff;  // K = 2 C^(2d + 2dm)
    unsigned power;          // P = 2d + 2dm
    BigInt plateau_edge;     // M = max_i n_1^(i)

    Rational at_integer(const BigInt& x) const {
        if (x < 0) throw std::invalid_argument("ApproxFunction: negative argument");
        const BigInt& b = x < plateau_edge ? plateau_edge : x;
        return plateau_coeff * Rational(ScaleHierarchy::pow_big(b, power));
    }

    Rational inv_at_integer(const BigInt& x) const { return 1 / at_integer(x); }

    double operator()(double x) const {
        if (x < 0) throw std::invalid_argument("ApproxFunction: negative argument");
        const double m = plateau_edge.convert_to<double>();
        const double b = x < m ? m : x;
        return to_double(plateau_coeff) * std::pow(b, static_cast<double>(power));
    }
};

inline ApproxFunction approx_Q(const ScaleHierarchy& h) {
    const unsigned p = static_cast<unsigned>(2 * h.dim() * (1 + h.growth_exponent()));
    ApproxFunction q{Rational(2 * ScaleHierarchy::pow_big(h.comparability(), p)), p,
                     h.max_scale(1)};
    return q;
}

struct ShiftSeparation {
    LatticePoint shift;
    Rational certified_min;  // exact truncated minimum minus the doubled tail
    Rational required;       // 1 / Q(|shift|)
    Rational margin;         // certified_min - required
    LatticePoint argmin_site;
    bool pass = false;
};

struct DistalityCertificate {
    std::size_t dim = 0;
    std::size_t level = 0;       // truncation level the scan ran at
    std::int64_t shift_bound = 0;
    Rational tail;               // tail_bound(level)
    std::vector<ShiftSeparation> shifts;
    bool all_pass = false;
};

/// Exhaustive separation certificate: for every nonzero shift s with
/// |s|_inf <= shift_bound the minimum over one fundamental domain of
/// |V_level(i) - V_level(i+s)|, lowered by twice the tail bound, is compared
/// against 1/Q(|s|_inf).  Periodicity of the truncation makes the domain
/// minimum equal to the infimum over all of Z^d; the doubled tail absorbs
/// the untruncated rest.  All arithmetic is exact.
inline DistalityCertificate certify_distality(const ScaleHierarchy& h, std::size_t level,
                                              std::int64_t shift_bound) {
    if (level < 1 || level >= h.depth())
        throw std::invalid_argument("certify_distality: level must satisfy 1 <= level < depth");
    if (shift_bound < 1)
        throw std::invalid_argument("certify_distality: shift bound must be >= 1");
    const std::size_t d = h.dim();
    std::vector<std::int64_t> sides(d);
    std::uint64_t domain = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const BigInt n = h.scale(level, i);
        if (n <= 2 * BigInt(shift_bound))
            throw std::invalid_argument(
                "certify_distality: period at the scan level must exceed twice the shift bound");
        if (n > BigInt(std::int64_t{1} << 31))
            throw std::invalid_argument("certify_distality: scan level period too large");
        sides[i] = n.convert_to<std::int64_t>();
        domain *= static_cast<std::uint64_t>(sides[i]);
        if (domain > (std::uint64_t{1} << 32))
            throw std::invalid_argument("certify_distality: fundamental domain too large");
    }
    std::vector<std::size_t> strides(d, 1);
    for (std::size_t i = d - 1; i-- > 0;)
        strides[i] = strides[i + 1] * static_cast<std::size_t>(sides[i + 1]);

    // Common denominator of all weights up to the scan level; the scan then
    // compares integer numerators only.
    BigInt denom = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const BigInt prev = h.scale(level - 1, i);
        denom *= prev * prev * h.scale(level, i);
    }
    std::vector<BigInt> scaled_weight(level + 1);
    for (std::size_t v = 1; v <= level; ++v) {
        BigInt wden = 1;
        for (std::size_t i = 0; i < d; ++i) {
            const BigInt prev = h.scale(v - 1, i);
            wden *= prev * prev * h.scale(v, i);
        }
        scaled_weight[v] = denom / wden;  // exact by the divisibility constraint
    }

    // Numerators of V_level over the fundamental domain, row-major.
    std::vector<BigInt> table(domain);
    {
        std::vector<std::int64_t> digits(d, 0);
        for (std::uint64_t idx = 0; idx < domain; ++idx) {
            BigInt acc = 0;
            for (std::size_t v = 1; v <= level; ++v) {
                BigInt digit_sum = 0;
                for (std::size_t i = 0; i < d; ++i)
                    digit_sum += residue(digits[i], h.scale(v, i));
                acc += digit_sum * scaled_weight[v];
            }
            table[idx] = std::move(acc);
            for (std::size_t i = d; i-- > 0;) {
                if (++digits[i] < sides[i]) break;
                digits[i] = 0;
            }
        }
    }

    const ApproxFunction q = approx_Q(h);
    const Rational tail2 = 2 * tail_bound(h, level);

    DistalityCertificate cert;
    cert.dim = d;
    cert.level = level;
    cert.shift_bound = shift_bound;
    cert.tail = tail_bound(h, level);
    cert.all_pass = true;

    // Per-coordinate lookup of the wrapped, stride-weighted shifted digit.
    std::vector<std::vector<std::size_t>> contrib(d);

    std::vector<std::int64_t> shift(d, -shift_bound);
    while (true) {
        bool zero = true;
        for (const auto s : shift)
            if (s != 0) { zero = false; break; }
        if (!zero) {
            for (std::size_t i = 0; i < d; ++i) {
                contrib[i].resize(static_cast<std::size_t>(sides[i]));
                for (std::int64_t x = 0; x < sides[i]; ++x) {
                    std::int64_t w = (x + shift[i]) % sides[i];
                    if (w < 0) w += sides[i];
                    contrib[i][static_cast<std::size_t>(x)] =
                        static_cast<std::size_t>(w) * strides[i];
                }
            }

            BigInt best;
            std::uint64_t best_idx = 0;
            bool first = true;
            std::vector<std::int64_t> digits(d, 0);
            for (std::uint64_t idx = 0; idx < domain; ++idx) {
                std::size_t shifted = 0;
                for (std::size_t i = 0; i < d; ++i)
                    shifted += contrib[i][static_cast<std::size_t>(digits[i])];
                BigInt diff = table[idx] - table[shifted];
                if (diff < 0) diff = -diff;
                if (first || diff < best) {
                    best = std::move(diff);
                    best_idx = idx;
                    first = false;
                }
                for (std::size_t i = d; i-- > 0;) {
                    if (++digits[i] < sides[i]) break;
                    digits[i] = 0;
                }
            }

            LatticePoint shift_pt{std::vector<Coord>(shift.begin(), shift.end())};
            ShiftSeparation rec{shift_pt,
                                Rational(best) / Rational(denom) - tail2,
                                q.inv_at_integer(BigInt(sup_norm(shift_pt))),
                                0,
                                LatticePoint::zero(d),
                                false};
            rec.margin = rec.certified_min - rec.required;
            rec.pass = rec.certified_min >= rec.required;
            {
                std::vector<Coord> site(d);
                std::uint64_t rem = best_idx;
                for (std::size_t i = d; i-- > 0;) {
                    site[i] = static_cast<Coord>(rem % static_cast<std::uint64_t>(sides[i]));
                    rem /= static_cast<std::uint64_t>(sides[i]);
                }
                rec.argmin_site = LatticePoint(std::move(site));
            }
            cert.all_pass = cert.all_pass && rec.pass;
            cert.shifts.push_back(std::move(rec));
        }

        std::size_t i = d;
        bool done = true;
        while (i-- > 0) {
            if (++shift[i] <= shift_bound) { done = false; break; }
            shift[i] = -shift_bound;
        }
        if (done) break;
    }
    return cert;
}

// q(t) = t^-4 sup_{x >= 0} Q(x) e^{-tx}, via the stationary point of the
// power branch: the supremum is the plateau value unless the interior
// maximum at x = P/t clears the plateau edge.
inline double small_divisor_q(const ScaleHierarchy& h, double t) {
    if (!(t > 0)) throw std::invalid_argument("small_divisor_q: t must be positive");
    const ApproxFunction q = approx_Q(h);
    const double coeff = to_double(q.plateau_coeff);
    const double m = q.plateau_edge.convert_to<double>();
    const double p = static_cast<double>(q.power);
    const double plateau = coeff * std::pow(m, p);
    const double interior = (p / t >= m)
                                ? coeff * std::pow(p / t, p) * std::exp(-p)
                                : plateau * std::exp(-t * m);
    return std::pow(t, -4.0) * std::max(plateau, interior);
}

// Upper bound on the infimum-over-schedules product h(t), using the
// admissible geometric schedule t_i = t 2^-(i+1).  The log-series tail is
// majorized in closed form, so truncation never loses the upper-bound
// property beyond roundoff.
inline double kam_h_upper(const ScaleHierarchy& h, double t) {
    if (!(t > 0)) throw std::invalid_argument("kam_h_upper: t must be positive");
    const ApproxFunction q = approx_Q(h);
    const double coeff = to_double(q.plateau_coeff);
    const double m = q.plateau_edge.convert_to<double>();
    const double p = static_cast<double>(q.power);
    const double log2 = std::log(2.0);

    // For t_j in the pure power branch, log q(t_j) <= alpha + beta (j+1).
    const double beta = (p + 4.0) * log2;
    const double alpha = std::log(2.0 * coeff) - p + p * std::log(p) + (p + 4.0) * std::log(1.0 / t);

    double acc = 0.0;
    for (int j = 0; j < 1024; ++j) {
        const double tj = t * std::pow(0.5, j + 1);
        const double w = std::pow(0.5, j + 1);
        acc += w * std::log(small_divisor_q(h, tj));
        const bool power_branch = p / tj >= m;
        if (power_branch && j >= 4) {
            const double mass = std::pow(0.5, j + 1);
            const double tail = mass * alpha + beta * mass * (j + 3);
            if (tail >= 0 && tail < 1e-12 * std::max(1.0, std::abs(acc))) {
                acc += tail;
                break;
            }
        }
    }
    return std::exp(acc);
}

}  // namespace lploc
