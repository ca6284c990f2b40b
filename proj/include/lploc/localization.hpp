#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lploc/hull.hpp"
#include "lploc/spectral.hpp"

namespace lploc {

// Rate assigned to vectors too concentrated to fit; numerically a point
// mass (e^-50 underflows doubles within a few sites).
inline constexpr double kRateCap = 50.0;
inline constexpr double kDefaultFloor = 1e-14;

inline LatticePoint localization_center(const EigenSystem& sys, std::size_t j) {
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < sys.box.site_count(); ++i) {
        const double v = std::abs(sys.vectors(i, j));
        if (v > best) {  // strict: ties keep the lexicographically first site
            best = v;
            best_idx = i;
        }
    }
    if (best <= 0.0) throw std::invalid_argument("localization_center: zero vector");
    return sys.box.site_at(best_idx);
}

struct DecayFit {
    double rate = 0.0;
    double prefactor = 0.0;
    bool capped = false;
    std::size_t points = 0;
};

// Least-squares line through (|k - center|_inf, log |u(k)|) over the sites
// above the floor.
inline DecayFit fit_decay(const EigenSystem& sys, std::size_t j, const LatticePoint& center,
                          double floor = kDefaultFloor) {
    if (!(floor > 0)) throw std::invalid_argument("fit_decay: floor must be positive");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < sys.box.site_count(); ++i) {
        const double v = std::abs(sys.vectors(i, j));
        peak = std::max(peak, v);
        if (v <= floor) continue;
        const double x = static_cast<double>(sup_norm(sys.box.site_at(i) - center));
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    DecayFit fit;
    fit.points = n;
    const double det = static_cast<double>(n) * sxx - sx * sx;
    if (n < 3 || det == 0.0) {
        fit.rate = kRateCap;
        fit.prefactor = peak;
        fit.capped = true;
        return fit;
    }
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    fit.rate = -slope;
    fit.prefactor = std::exp(intercept);
    return fit;
}

struct VectorLocalization {
    std::size_t index = 0;
    LatticePoint center;
    double rate = 0.0;
    double prefactor = 0.0;
    bool boundary = false;
    bool capped = false;
    double gap = 0.0;  // distance to the nearest other eigenvalue
};

struct UleReport {
    std::vector<VectorLocalization> per_vector;
    double uniform_rate = 0.0;       // min fitted rate over interior vectors
    double uniform_prefactor = 0.0;  // exhaustive max, so the bound holds at every (j, k)
    Coord boundary_margin = 0;
    double floor = kDefaultFloor;
    bool localized = false;
};

namespace detail {

inline Coord distance_to_boundary(const Box& box, const LatticePoint& p) {
    Coord best = std::numeric_limits<Coord>::max();
    for (std::size_t i = 0; i < box.dim(); ++i)
        best = std::min({best, p[i] - box.lo()[i], box.hi()[i] - p[i]});
    return best;
}

}  // namespace detail

/// One uniform pair (C, r) for a solved system.  The rate is the minimum
/// fitted rate over vectors whose centers sit farther than the margin from
/// the box boundary; the prefactor is then maximized exhaustively over all
/// vectors and sites, which makes |u_j(k)| <= C e^{-r |k - m_j|} hold with
/// zero exceptions by construction.
inline UleReport uniform_fit(const EigenSystem& sys, Coord boundary_margin,
                             double floor = kDefaultFloor) {
    const std::size_t nvec = sys.eigenvalues.size();
    UleReport rep;
    rep.boundary_margin = boundary_margin;
    rep.floor = floor;
    rep.per_vector.reserve(nvec);

    double min_rate = std::numeric_limits<double>::infinity();
    bool any_interior = false;
    for (std::size_t j = 0; j < nvec; ++j) {
        VectorLocalization loc;
        loc.index = j;
        loc.center = localization_center(sys, j);
        const DecayFit fit = fit_decay(sys, j, loc.center, floor);
        loc.rate = fit.rate;
        loc.prefactor = fit.prefactor;
        loc.capped = fit.capped;
        loc.boundary = detail::distance_to_boundary(sys.box, loc.center) <= boundary_margin;
        double gap = std::numeric_limits<double>::infinity();
        if (j > 0) gap = std::min(gap, sys.eigenvalues[j] - sys.eigenvalues[j - 1]);
        if (j + 1 < nvec) gap = std::min(gap, sys.eigenvalues[j + 1] - sys.eigenvalues[j]);
        loc.gap = gap;
        if (!loc.boundary) {
            any_interior = true;
            min_rate = std::min(min_rate, loc.rate);
        }
        rep.per_vector.push_back(std::move(loc));
    }
    if (!any_interior)
        throw std::runtime_error("uniform_fit: every center is within the boundary margin");

    rep.uniform_rate = std::min(min_rate, kRateCap);
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nvec; ++j) {
        const LatticePoint& center = rep.per_vector[j].center;
        for (std::size_t i = 0; i < sys.box.site_count(); ++i) {
            const double v = std::abs(sys.vectors(i, j));
            if (v == 0.0) continue;
            const double dist = static_cast<double>(sup_norm(sys.box.site_at(i) - center));
            log_c = std::max(log_c, std::log(v) + rep.uniform_rate * dist);
        }
    }
    rep.uniform_prefactor = std::exp(log_c);
    rep.localized = rep.uniform_rate > 0.0;
    return rep;
}

// Exhaustive re-check of the uniform bound; returns the number of (j, k)
// violations of |u_j(k)| <= C e^{-r |k - m_j|} (slack covers roundoff in
// the exponential only).
inline std::size_t count_ule_violations(const EigenSystem& sys, const UleReport& rep,
                                        double slack = 1e-12) {
    std::size_t violations = 0;
    const double log_c = std::log(rep.uniform_prefactor);
    for (const auto& loc : rep.per_vector)
        for (std::size_t i = 0; i < sys.box.site_count(); ++i) {
            const double v = std::abs(sys.vectors(i, loc.index));
            if (v == 0.0) continue;
            const double dist = static_cast<double>(sup_norm(sys.box.site_at(i) - loc.center));
            if (std::log(v) > log_c - rep.uniform_rate * dist + slack) ++violations;
        }
    return violations;
}

struct RateSweepRow {
    double epsilon = 0.0;
    double rate = 0.0;
    double prefactor = 0.0;
};

struct RateSweepReport {
    std::vector<RateSweepRow> rows;
    double slope = 0.0;  // of rate against log(1/eps)
};

// Rate law probe: solve per coupling, fit the uniform rate against
// log(1/eps).
inline RateSweepReport rate_vs_epsilon(const std::vector<double>& potential, const Box& box,
                                       const std::vector<double>& epsilons, Coord boundary_margin,
                                       double floor = kDefaultFloor) {
    if (epsilons.size() < 2)
        throw std::invalid_argument("rate_vs_epsilon: need at least two couplings");
    for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
        if (!(epsilons[i] > epsilons[i + 1]))
            throw std::invalid_argument("rate_vs_epsilon: couplings must descend");
    RateSweepReport rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const double eps : epsilons) {
        const EigenSystem sys = eig_sym(assemble(potential, box, eps, Boundary::dirichlet));
        const UleReport ule = uniform_fit(sys, boundary_margin, floor);
        rep.rows.push_back({eps, ule.uniform_rate, ule.uniform_prefactor});
        const double x = std::log(1.0 / eps);
        sx += x;
        sy += ule.uniform_rate;
        sxx += x * x;
        sxy += x * ule.uniform_rate;
    }
    const double n = static_cast<double>(epsilons.size());
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

struct DynamicalPair {
    LatticePoint from;
    LatticePoint to;
    double distance = 0.0;
    double kernel = 0.0;
};

struct DynamicalReport {
    std::vector<DynamicalPair> pairs;
    double rate = 0.0;       // r_dyn from the log-kernel fit
    double prefactor = 0.0;  // exhaustive max over the sampled pairs
    std::size_t time_checks = 0;
    std::size_t amplitude_violations = 0;
};

// Fits the time-uniform kernel against separation and spot-checks that the
// propagator amplitude never exceeds it at randomly drawn times.
inline DynamicalReport dynamical_decay(const EigenSystem& sys,
                                       const std::vector<std::pair<LatticePoint, LatticePoint>>& pairs,
                                       std::size_t times_per_pair = 100,
                                       std::uint64_t seed = 20402,
                                       double floor = 1e-300) {
    DynamicalReport rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& [a, b] : pairs) {
        DynamicalPair row{a, b, static_cast<double>(sup_norm(a - b)), dynamical_kernel(sys, a, b)};
        if (row.kernel > floor) {
            sx += row.distance;
            sy += std::log(row.kernel);
            sxx += row.distance * row.distance;
            sxy += row.distance * std::log(row.kernel);
            ++n;
        }
        rep.pairs.push_back(std::move(row));
    }
    const double det = static_cast<double>(n) * sxx - sx * sx;
    if (n < 3 || det == 0.0) {
        rep.rate = kRateCap;
    } else {
        rep.rate = -((static_cast<double>(n) * sxy - sx * sy) / det);
    }

    double log_c = -std::numeric_limits<double>::infinity();
    for (const auto& row : rep.pairs)
        if (row.kernel > 0.0)
            log_c = std::max(log_c, std::log(row.kernel) + rep.rate * row.distance);
    rep.prefactor = std::exp(log_c);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> time_dist(0.0, 1000.0);
    for (const auto& row : rep.pairs)
        for (std::size_t s = 0; s < times_per_pair; ++s) {
            const double t = time_dist(rng);
            ++rep.time_checks;
            if (std::abs(evolution_amplitude(sys, row.from, row.to, t)) > row.kernel + 1e-12)
                ++rep.amplitude_violations;
        }
    return rep;
}

struct PhaseStabilityReport {
    std::vector<LatticePoint> translates;
    double spectra_deviation = 0.0;      // max pairwise sorted-spectrum deviation
    double kernel_deviation = 0.0;       // max covariance defect of the kernels
    std::vector<RateSweepRow> ule_table; // per-translate (rate, prefactor); epsilon repeated
    double rate_spread = 0.0;            // max relative deviation from the median rate
};

// Periodic-approximant phase stability: all translates of the level-k
// potential on its period torus are unitarily equivalent by cyclic shift,
// so the sorted spectra must agree to solver accuracy and the kernels must
// be covariant under the same shift.
inline PhaseStabilityReport phase_stability(std::shared_ptr<const ScaleHierarchy> h,
                                            std::size_t level,
                                            const std::vector<LatticePoint>& translates,
                                            double epsilon,
                                            double floor = kDefaultFloor) {
    if (!h) throw std::invalid_argument("phase_stability: null hierarchy");
    if (level < 1 || level > h->depth())
        throw std::invalid_argument("phase_stability: level out of range");
    if (translates.empty()) throw std::invalid_argument("phase_stability: no translates");
    const std::size_t d = h->dim();
    std::vector<Coord> hi(d);
    for (std::size_t i = 0; i < d; ++i) {
        const BigInt n = h->scale(level, i);
        if (n > BigInt(std::int64_t{1} << 16))
            throw std::invalid_argument("phase_stability: period cell too large");
        hi[i] = n.convert_to<Coord>() - 1;
    }
    const Box cell(LatticePoint::zero(d), LatticePoint(std::move(hi)));

    std::vector<EigenSystem> systems;
    systems.reserve(translates.size());
    PhaseStabilityReport rep;
    rep.translates = translates;
    for (const auto& t : translates) {
        const HullPoint w = embed_translation(h, level, t);
        std::vector<double> pot(cell.site_count());
        for (std::size_t i = 0; i < pot.size(); ++i)
            pot[i] = to_double(sample_truncated(w, cell.site_at(i), level));
        systems.push_back(eig_sym(assemble(std::move(pot), cell, epsilon, Boundary::periodic)));
        const UleReport ule = uniform_fit(systems.back(), -1, floor);
        rep.ule_table.push_back({epsilon, ule.uniform_rate, ule.uniform_prefactor});
    }

    for (std::size_t a = 0; a < systems.size(); ++a)
        for (std::size_t b = a + 1; b < systems.size(); ++b)
            for (std::size_t j = 0; j < systems[a].eigenvalues.size(); ++j)
                rep.spectra_deviation =
                    std::max(rep.spectra_deviation,
                             std::abs(systems[a].eigenvalues[j] - systems[b].eigenvalues[j]));

    // K_t(n, m) must equal K_0(n + t, m + t) up to the torus wrap.
    const std::size_t nsites = cell.site_count();
    std::vector<double> base_kernel(nsites * nsites);
    for (std::size_t a = 0; a < nsites; ++a)
        for (std::size_t b = 0; b < nsites; ++b)
            base_kernel[a * nsites + b] =
                dynamical_kernel(systems[0], cell.site_at(a), cell.site_at(b));
    for (std::size_t ti = 1; ti < translates.size(); ++ti)
        for (std::size_t a = 0; a < nsites; ++a)
            for (std::size_t b = 0; b < nsites; ++b) {
                const LatticePoint sa = detail::wrap_into(cell, cell.site_at(a) + translates[ti]);
                const LatticePoint sb = detail::wrap_into(cell, cell.site_at(b) + translates[ti]);
                const double kt =
                    dynamical_kernel(systems[ti], cell.site_at(a), cell.site_at(b));
                const double k0 = base_kernel[cell.index_of(sa) * nsites + cell.index_of(sb)];
                rep.kernel_deviation = std::max(rep.kernel_deviation, std::abs(kt - k0));
            }

    std::vector<double> rates;
    for (const auto& row : rep.ule_table) rates.push_back(row.rate);
    std::sort(rates.begin(), rates.end());
    const double median = rates[rates.size() / 2];
    for (const double r : rates)
        rep.rate_spread = std::max(rep.rate_spread, std::abs(r - median) / std::abs(median));
    return rep;
}

struct SurveyEntry {
    HullPoint point;
    double rate = 0.0;
    double prefactor = 0.0;
};

struct SurveyReport {
    std::vector<SurveyEntry> entries;
    double rate_spread = 0.0;       // max relative deviation from the median rate
    double pooled_rate = 0.0;       // min over the sample
    double pooled_prefactor = 0.0;  // max over the sample
    std::size_t pooled_violations = 0;
    std::optional<double> truncation_tail;
};

// Per-point localization constants across a sample of the hull, plus the
// pooled pair that bounds every sampled operator at once.
inline SurveyReport hull_ule_survey(const std::vector<HullPoint>& points, const Box& box,
                                    double epsilon, std::size_t depth, Coord boundary_margin,
                                    double floor = kDefaultFloor) {
    if (points.empty()) throw std::invalid_argument("hull_ule_survey: no hull points");
    SurveyReport rep;
    std::vector<EigenSystem> systems;
    std::vector<UleReport> ules;
    for (const HullPoint& w : points) {
        if (depth > w.depth())
            throw std::invalid_argument("hull_ule_survey: depth beyond a sampled point");
        std::vector<double> pot(box.site_count());
        for (std::size_t i = 0; i < pot.size(); ++i)
            pot[i] = to_double(sample_truncated(w, box.site_at(i), depth));
        systems.push_back(eig_sym(assemble(std::move(pot), box, epsilon, Boundary::dirichlet)));
        ules.push_back(uniform_fit(systems.back(), boundary_margin, floor));
        rep.entries.push_back({w, ules.back().uniform_rate, ules.back().uniform_prefactor});
    }
    const ScaleHierarchy& h = points.front().hierarchy();
    if (depth < h.depth()) rep.truncation_tail = to_double(tail_bound(h, depth));

    std::vector<double> rates;
    for (const auto& e : rep.entries) rates.push_back(e.rate);
    std::sort(rates.begin(), rates.end());
    const double median = rates[rates.size() / 2];
    for (const double r : rates)
        rep.rate_spread = std::max(rep.rate_spread, std::abs(r - median) / std::abs(median));

    rep.pooled_rate = *std::min_element(rates.begin(), rates.end());
    double c = 0.0;
    for (const auto& e : rep.entries) c = std::max(c, e.prefactor);
    rep.pooled_prefactor = c;
    for (std::size_t s = 0; s < systems.size(); ++s) {
        UleReport pooled = ules[s];
        pooled.uniform_rate = rep.pooled_rate;
        pooled.uniform_prefactor = rep.pooled_prefactor;
        rep.pooled_violations += count_ule_violations(systems[s], pooled);
    }
    return rep;
}

}  // namespace lploc
