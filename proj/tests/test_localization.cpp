#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "lploc/localization.hpp"

using namespace lploc;

namespace {

std::shared_ptr<const ScaleHierarchy> tower(std::size_t d, unsigned base, std::size_t depth) {
    return std::make_shared<const ScaleHierarchy>(tower_hierarchy(d, base, depth));
}

std::vector<double> potential_on_box(const ScaleHierarchy& h, const Box& box, std::size_t k) {
    std::vector<double> pot(box.site_count());
    for (std::size_t i = 0; i < pot.size(); ++i)
        pot[i] = to_double(eval_truncated(h, box.site_at(i), k));
    return pot;
}

// Synthetic system whose columns are prescribed profiles (no solver).
EigenSystem synthetic(const Box& box, const std::vector<std::vector<double>>& columns) {
    EigenSystem sys{box, 0.0, {}, Eigen::MatrixXd(box.site_count(), columns.size()), 1e-10};
    for (std::size_t j = 0; j < columns.size(); ++j) {
        sys.eigenvalues.push_back(static_cast<double>(j));
        for (std::size_t i = 0; i < box.site_count(); ++i) sys.vectors(i, j) = columns[j][i];
    }
    return sys;
}

std::vector<double> exp_profile(const Box& box, Coord center, double rate, double amp) {
    std::vector<double> u(box.site_count());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = amp * std::exp(-rate * static_cast<double>(
                                         sup_norm(box.site_at(i) - LatticePoint{center})));
    return u;
}

}  // namespace

TEST_CASE("localization center") {
    const Box box(LatticePoint{-10}, LatticePoint{10});
    std::vector<double> basis(box.site_count(), 0.0);
    basis[box.index_of(LatticePoint{3})] = 1.0;
    const EigenSystem sys = synthetic(
        box, {basis, exp_profile(box, 0, 0.7, 1.0),
              [&] {
                  std::vector<double> tie(box.site_count(), 0.0);
                  tie[box.index_of(LatticePoint{0})] = 1.0 / std::sqrt(2.0);
                  tie[box.index_of(LatticePoint{1})] = 1.0 / std::sqrt(2.0);
                  return tie;
              }()});
    CHECK(localization_center(sys, 0) == LatticePoint{3});
    CHECK(localization_center(sys, 1) == LatticePoint{0});
    CHECK(localization_center(sys, 2) == LatticePoint{0});  // lexicographic tie-break
}

TEST_CASE("decay fit on exact log-linear data") {
    const Box box(LatticePoint{-20}, LatticePoint{20});
    const EigenSystem sys =
        synthetic(box, {exp_profile(box, 0, 0.7, 1.0), exp_profile(box, 0, 1.2, 3.0)});

    const DecayFit a = fit_decay(sys, 0, LatticePoint{0});
    CHECK(a.rate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(a.prefactor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(a.capped);

    const DecayFit b = fit_decay(sys, 1, LatticePoint{0});
    CHECK(b.rate == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(b.prefactor == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("point masses cap the rate") {
    const Box box(LatticePoint{0}, LatticePoint{9});
    const EigenSystem sys = eig_sym(
        assemble({0.1, 0.9, 0.4, 0.6, 0.2, 0.8, 0.3, 0.7, 0.5, 0.05}, box, 0.0,
                 Boundary::dirichlet));
    const DecayFit fit = fit_decay(sys, 0, localization_center(sys, 0));
    CHECK(fit.capped);
    CHECK(fit.rate == kRateCap);

    const UleReport rep = uniform_fit(sys, 0);
    CHECK(rep.uniform_rate == kRateCap);
    CHECK(rep.uniform_prefactor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.localized);
}

TEST_CASE("uniform fit on shifted synthetic profiles") {
    const Box box(LatticePoint{0}, LatticePoint{40});
    std::vector<std::vector<double>> cols;
    for (Coord m = 15; m <= 25; ++m) cols.push_back(exp_profile(box, m, 0.7, 1.0));
    const EigenSystem sys = synthetic(box, cols);
    const UleReport rep = uniform_fit(sys, 10);
    CHECK(rep.uniform_rate == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(rep.uniform_prefactor == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(count_ule_violations(sys, rep) == 0);
}

TEST_CASE("uniform fit flags boundary centers and needs interior ones") {
    const Box box(LatticePoint{0}, LatticePoint{40});
    const EigenSystem sys =
        synthetic(box, {exp_profile(box, 2, 0.7, 1.0), exp_profile(box, 20, 0.7, 1.0)});
    const UleReport rep = uniform_fit(sys, 5);
    CHECK(rep.per_vector[0].boundary);
    CHECK_FALSE(rep.per_vector[1].boundary);
    CHECK_THROWS_AS(uniform_fit(sys, 21), std::runtime_error);
}

TEST_CASE("uniform bound verified exhaustively on a real solve") {
    auto h = tower(1, 2, 5);
    const Box box(LatticePoint{0}, LatticePoint{63});
    const EigenSystem sys =
        eig_sym(assemble(potential_on_box(*h, box, 4), box, 0.02, Boundary::dirichlet));
    const UleReport rep = uniform_fit(sys, 4);
    CHECK(rep.uniform_rate > 0.5);
    CHECK(count_ule_violations(sys, rep) == 0);
    for (const auto& loc : rep.per_vector) CHECK(std::isfinite(loc.gap));
}

TEST_CASE("rate sweep requires descending couplings and reports a slope") {
    auto h = tower(1, 2, 5);
    const Box box(LatticePoint{0}, LatticePoint{127});
    const auto pot = potential_on_box(*h, box, 4);

    CHECK_THROWS_AS(rate_vs_epsilon(pot, box, {0.01, 0.1}, 8), std::invalid_argument);
    CHECK_THROWS_AS(rate_vs_epsilon(pot, box, {0.1}, 8), std::invalid_argument);

    const RateSweepReport rep = rate_vs_epsilon(pot, box, {0.1, 0.03, 0.01}, 8);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].rate < rep.rows[1].rate);
    CHECK(rep.rows[1].rate < rep.rows[2].rate);
    CHECK(rep.slope > 0.0);
}

TEST_CASE("dynamical decay fit and amplitude domination") {
    auto h = tower(1, 2, 5);
    const Box box(LatticePoint{0}, LatticePoint{63});
    const EigenSystem sys =
        eig_sym(assemble(potential_on_box(*h, box, 4), box, 0.02, Boundary::dirichlet));

    std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 40; ++rep) {
        const Coord a = 8 + static_cast<Coord>(rng() % 48);
        const Coord b = 8 + static_cast<Coord>(rng() % 48);
        pairs.emplace_back(LatticePoint{a}, LatticePoint{b});
    }
    const DynamicalReport rep = dynamical_decay(sys, pairs, 50);
    CHECK(rep.rate > 0.0);
    CHECK(rep.amplitude_violations == 0);
    CHECK(rep.time_checks == pairs.size() * 50);
    for (const auto& row : rep.pairs)
        CHECK(row.kernel <= rep.prefactor * std::exp(-rep.rate * row.distance) * (1 + 1e-9));
}

TEST_CASE("dynamical kernel at zero coupling caps the rate") {
    const Box box(LatticePoint{0}, LatticePoint{7});
    const EigenSystem sys = eig_sym(
        assemble({0.9, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4}, box, 0.0, Boundary::dirichlet));
    std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
    for (Coord i = 0; i < 8; ++i)
        for (Coord j = 0; j < 8; ++j) pairs.emplace_back(LatticePoint{i}, LatticePoint{j});
    const DynamicalReport rep = dynamical_decay(sys, pairs, 10);
    CHECK(rep.rate == kRateCap);
    CHECK(rep.amplitude_violations == 0);
}

TEST_CASE("phase stability on a small period cell") {
    auto h = tower(1, 2, 3);
    std::vector<LatticePoint> translates;
    for (Coord t = 0; t < 4; ++t) translates.push_back(LatticePoint{t});
    const PhaseStabilityReport rep = phase_stability(h, 2, translates, 0.05);
    CHECK(rep.spectra_deviation <= 1e-9);
    CHECK(rep.kernel_deviation <= 1e-8);
    REQUIRE(rep.ule_table.size() == 4);

    // a full-period translate gives the identical potential
    const PhaseStabilityReport same =
        phase_stability(h, 2, {LatticePoint{0}, LatticePoint{4}}, 0.05);
    CHECK(same.spectra_deviation == 0.0);
}

TEST_CASE("hull survey pools constants over sampled points") {
    auto h = tower(1, 2, 5);
    const Box box(LatticePoint{0}, LatticePoint{63});
    const HullPoint e = hull_identity(h, 5);
    const std::vector<HullPoint> pts{e, hull_translate(e, LatticePoint{1}),
                                     random_hull_point(7, h, 5)};
    const SurveyReport rep = hull_ule_survey(pts, box, 0.02, 4, 4);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.pooled_rate > 0.0);
    CHECK(rep.pooled_violations == 0);
    CHECK(rep.rate_spread < 0.10);
    REQUIRE(rep.truncation_tail.has_value());
    CHECK(*rep.truncation_tail == doctest::Approx(to_double(tail_bound(*h, 4))));
}
