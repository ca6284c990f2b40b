// End-to-end acceptance runs.  Every criterion prints one line; the exit
// code is the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lploc/band_matrix.hpp"
#include "lploc/hull.hpp"
#include "lploc/localization.hpp"
#include "lploc/potential.hpp"
#include "lploc/spectral.hpp"

using namespace lploc;

namespace {

int failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void outcome(bool pass, const std::string& label, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << label << ": " << detail << "\n";
    if (!pass) ++failures;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::vector<double> potential_on_box(const ScaleHierarchy& h, const Box& box, std::size_t depth) {
    std::vector<double> pot(box.site_count());
    for (std::size_t i = 0; i < pot.size(); ++i)
        pot[i] = to_double(eval_truncated(h, box.site_at(i), depth));
    return pot;
}

// ---- criterion 1: exact separation certificates ----

void criterion_1a() {
    Timer timer;
    const ScaleHierarchy h = tower_hierarchy(1, 2, 5);
    const DistalityCertificate cert = certify_distality(h, 4, 64);
    bool pass = cert.all_pass && cert.shifts.size() == 128;
    Rational worst = cert.shifts.empty() ? Rational(0) : cert.shifts.front().margin;
    for (const auto& s : cert.shifts) {
        if (s.margin <= 0) pass = false;
        worst = std::min(worst, s.margin);
    }
    const double secs = timer.seconds();
    pass = pass && secs < 10.0;
    outcome(pass, "criterion 1a (separation certificate, d=1, |k| <= 64)",
            "128 shifts, min margin " + fmt(to_double(worst)) + ", " + fmt(secs) + " s");
}

void criterion_1b() {
    Timer timer;
    const ScaleHierarchy h = tower_hierarchy(2, 2, 5);
    const DistalityCertificate cert = certify_distality(h, 4, 8);
    std::size_t failing = 0;
    for (const auto& s : cert.shifts)
        if (!s.pass || s.margin <= 0) ++failing;
    const double secs = timer.seconds();
    const bool pass = cert.all_pass && failing == 0 && secs < 10.0;
    // The d=2 construction shares one weight per level across coordinates,
    // so V(x, y) = V(y, x) and every shift (c, -c) has separation infimum
    // exactly zero; the certificate reports this truthfully.
    outcome(pass, "criterion 1b (separation certificate, d=2, |k|_inf <= 8)",
            std::to_string(failing) + "/" + std::to_string(cert.shifts.size()) +
                " shifts below the required separation (coordinate-exchange symmetry), " +
                fmt(secs) + " s");
}

// ---- criterion 2: eigenvalue matching under the hopping-norm bound ----

void criterion_2() {
    Timer timer;
    bool pass = true;
    std::string detail;

    const ScaleHierarchy h1 = tower_hierarchy(1, 2, 5);
    const Box box1(LatticePoint{0}, LatticePoint{255});
    const auto pot1 = potential_on_box(h1, box1, 4);
    for (const double eps : {0.1, 0.01}) {
        Timer each;
        const EigenSystem sys = eig_sym(assemble(pot1, box1, eps, Boundary::dirichlet));
        const MatchReport rep = match_eigenvalues(sys, pot1, eps);
        pass = pass && rep.pass && rep.max_deviation <= 2.0 * eps && each.seconds() < 30.0;
        detail += "d=1 eps=" + fmt(eps) + " dev=" + fmt(rep.max_deviation) + "; ";
    }

    const ScaleHierarchy h2 = tower_hierarchy(2, 2, 4);
    const Box box2(LatticePoint{0, 0}, LatticePoint{15, 15});
    const auto pot2 = potential_on_box(h2, box2, 3);
    Timer each;
    const EigenSystem sys2 = eig_sym(assemble(pot2, box2, 0.005, Boundary::dirichlet));
    const MatchReport rep2 = match_eigenvalues(sys2, pot2, 0.005);
    pass = pass && rep2.pass && rep2.max_deviation <= 0.02 && each.seconds() < 30.0;
    detail += "d=2 eps=0.005 dev=" + fmt(rep2.max_deviation);

    outcome(pass, "criterion 2 (sorted eigenvalue matching within 2 d eps)",
            detail + ", total " + fmt(timer.seconds()) + " s");
}

// ---- criteria 3, 6, 7 share the 256-site d=1 instance at eps = 0.01 ----

// Fit floor for the rate-measuring runs: the dense solver's noise floor on
// these instances sits near 3e-14 (near-degenerate pairs leave stragglers
// just above the 1e-14 default), and fitting through noise measures the
// solver, not the decay.  The exhaustive bound checks are floor-free.
constexpr double kFitFloor = 1e-12;

void criteria_3_6_7(bool run3, bool run6, bool run7) {
    const auto h = std::make_shared<const ScaleHierarchy>(tower_hierarchy(1, 2, 5));
    const Box box(LatticePoint{0}, LatticePoint{255});
    const Coord margin = 16;

    if (run3 || run7) {
        Timer timer;
        const EigenSystem sys =
            eig_sym(assemble(potential_on_box(*h, box, 4), box, 0.01, Boundary::dirichlet));
        const UleReport ule = uniform_fit(sys, margin, kFitFloor);
        const std::size_t violations = count_ule_violations(sys, ule);
        if (run3) {
            const bool pass = ule.uniform_rate > 0.5 && violations == 0;
            outcome(pass, "criterion 3 (uniform localization bound, every (j,k) pair)",
                    "rate " + fmt(ule.uniform_rate) + ", prefactor " + fmt(ule.uniform_prefactor) +
                        ", violations " + std::to_string(violations) + ", " +
                        fmt(timer.seconds()) + " s");
        }
        if (run7) {
            // same operator, time-uniform kernel side
            Timer timer7;
            std::mt19937_64 rng(1207);
            std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
            std::vector<std::size_t> interior;
            for (std::size_t i = 0; i < box.site_count(); ++i) {
                const Coord c = box.site_at(i)[0];
                if (c - box.lo()[0] > margin && box.hi()[0] - c > margin) interior.push_back(i);
            }
            for (int p = 0; p < 200; ++p)
                pairs.emplace_back(box.site_at(interior[rng() % interior.size()]),
                                   box.site_at(interior[rng() % interior.size()]));
            const DynamicalReport dyn = dynamical_decay(sys, pairs, 100, rng());

            double diag_dev = 0.0;
            for (const std::size_t i : interior) {
                const LatticePoint n = box.site_at(i);
                diag_dev = std::max(diag_dev, std::abs(dynamical_kernel(sys, n, n) - 1.0));
            }
            const bool pass7 = dyn.rate >= ule.uniform_rate / 2.0 &&
                               dyn.amplitude_violations == 0 && diag_dev <= 1e-10;
            outcome(pass7, "criterion 7 (uniform dynamical localization)",
                    "kernel rate " + fmt(dyn.rate) + " vs ule/2 " + fmt(ule.uniform_rate / 2.0) +
                        ", amplitude violations " + std::to_string(dyn.amplitude_violations) +
                        "/" + std::to_string(dyn.time_checks) + ", |K(n,n)-1| <= " +
                        fmt(diag_dev) + ", " + fmt(timer7.seconds()) + " s");
        }
    }

    if (run6) {
        Timer timer;
        std::vector<HullPoint> pts;
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            pts.push_back(random_hull_point(seed, h, 5));
        const SurveyReport survey = hull_ule_survey(pts, box, 0.01, 4, margin, kFitFloor);
        const bool pass = survey.rate_spread <= 0.10 && survey.pooled_violations == 0;
        outcome(pass, "criterion 6 (constants uniform across sampled hull points)",
                "rate spread " + fmt(survey.rate_spread) + ", pooled rate " +
                    fmt(survey.pooled_rate) + ", pooled violations " +
                    std::to_string(survey.pooled_violations) + ", " + fmt(timer.seconds()) + " s");
    }
}

// ---- criterion 4: decay rate against the coupling ----

void criterion_4() {
    Timer timer;
    const ScaleHierarchy h = tower_hierarchy(1, 2, 6);
    const Box box(LatticePoint{0}, LatticePoint{511});
    const RateSweepReport rep =
        rate_vs_epsilon(potential_on_box(h, box, 5), box, {0.1, 0.03, 0.01, 0.003}, 32, kFitFloor);
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
        if (!(rep.rows[i].rate < rep.rows[i + 1].rate)) increasing = false;
    const double secs = timer.seconds();
    const bool pass = rep.slope >= 0.5 && rep.slope <= 1.5 && increasing && secs < 300.0;
    std::string rates;
    for (const auto& row : rep.rows) rates += fmt(row.rate) + " ";
    outcome(pass, "criterion 4 (rate law against log(1/eps))",
            "slope " + fmt(rep.slope) + ", rates " + rates + ", " + fmt(secs) + " s");
}

// ---- criterion 5: periodic approximant phase stability ----

void criterion_5() {
    Timer timer;
    const auto h = std::make_shared<const ScaleHierarchy>(tower_hierarchy(1, 2, 4));
    std::vector<LatticePoint> translates;
    for (Coord t = 0; t < 16; ++t) translates.push_back(LatticePoint{t});
    const PhaseStabilityReport rep = phase_stability(h, 3, translates, 0.05);
    const double secs = timer.seconds();
    const bool pass =
        rep.spectra_deviation <= 1e-9 && rep.kernel_deviation <= 1e-8 && secs < 10.0;
    outcome(pass, "criterion 5 (phase stability on the period-16 torus)",
            "spectra dev " + fmt(rep.spectra_deviation) + ", kernel dev " +
                fmt(rep.kernel_deviation) + ", " + fmt(secs) + " s");
}

// ---- criterion 8: the diagonal product against the dense oracle ----

std::vector<double> dense_product(const std::vector<double>& a, const std::vector<double>& b,
                                  std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

BandMatrix random_band(std::mt19937_64& rng, const Box& box) {
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    BandMatrix m(box);
    std::vector<std::int64_t> off(box.dim(), -2);
    while (true) {
        if (rng() % 2 == 0) {
            std::vector<double> diag(box.site_count());
            for (auto& v : diag) v = value(rng);
            m.set_diagonal(LatticePoint(std::vector<Coord>(off.begin(), off.end())),
                           std::move(diag));
        }
        std::size_t i = box.dim();
        bool done = true;
        while (i-- > 0) {
            if (++off[i] <= 2) { done = false; break; }
            off[i] = -2;
        }
        if (done) break;
    }
    return m;
}

void criterion_8() {
    Timer timer;
    std::mt19937_64 rng(808);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const bool two_d = rep % 2 == 0;
        const Coord side = 2 + static_cast<Coord>(rng() % 11);  // up to 12 sites per side
        const Box box = two_d ? Box(LatticePoint{0, 0}, LatticePoint{side - 1, side - 1})
                              : Box(LatticePoint{0}, LatticePoint{side - 1});
        const BandMatrix a = random_band(rng, box);
        const BandMatrix b = random_band(rng, box);
        const auto got = diagonal_product(a, b).to_dense();
        const auto want = dense_product(a.to_dense(), b.to_dense(), box.site_count());
        for (std::size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    const double secs = timer.seconds();
    const bool pass = worst <= 1e-13 && secs < 5.0;
    outcome(pass, "criterion 8 (diagonal product vs dense product, 1000 pairs)",
            "max entry deviation " + fmt(worst) + ", " + fmt(secs) + " s");
}

// ---- criterion 9: hull algebra, exact ----

void criterion_9() {
    Timer timer;
    const auto h = std::make_shared<const ScaleHierarchy>(tower_hierarchy(1, 2, 4));
    const auto h2 = std::make_shared<const ScaleHierarchy>(tower_hierarchy(2, 2, 3));
    std::mt19937_64 rng(909);
    bool pass = true;
    for (int rep = 0; rep < 10000; ++rep) {
        const bool two_d = rep % 4 == 0;
        const auto& hh = two_d ? h2 : h;
        const std::size_t depth = hh->depth();
        const HullPoint a = random_hull_point(rng(), hh, depth);
        const HullPoint b = random_hull_point(rng(), hh, depth);
        const HullPoint c = random_hull_point(rng(), hh, depth);
        const HullPoint e = hull_identity(hh, depth);

        if (!(hull_add(hull_add(a, b), c) == hull_add(a, hull_add(b, c)))) pass = false;
        if (!(hull_add(a, b) == hull_add(b, a))) pass = false;
        if (!(hull_add(a, e) == a)) pass = false;
        if (!(hull_add(a, hull_neg(a)) == e)) pass = false;

        if (!(hull_translate(e, orbit_witness(a)) == a)) pass = false;

        std::vector<Coord> n(hh->dim()), k(hh->dim());
        for (auto& x : n) x = static_cast<Coord>(rng() % 200) - 100;
        for (auto& x : k) x = static_cast<Coord>(rng() % 200) - 100;
        const LatticePoint np(n), kp(k);
        if (!(sample_truncated(hull_translate(a, np), kp, depth) ==
              sample_truncated(a, np + kp, depth)))
            pass = false;
        if (!pass) break;
    }
    const double secs = timer.seconds();
    outcome(pass && secs < 5.0, "criterion 9 (hull algebra on 10^4 random triples)",
            std::string(pass ? "all identities exact" : "identity violated") + ", " + fmt(secs) +
                " s");
}

bool selected(int argc, char** argv, const std::string& id) {
    if (argc <= 1) return true;
    for (int i = 1; i < argc; ++i)
        if (id == argv[i]) return true;
    return false;
}

}  // namespace

// With no arguments every criterion runs; arguments select criteria by id
// (1a 1b 2 3 4 5 6 7 8 9).
int main(int argc, char** argv) {
    if (selected(argc, argv, "1a")) criterion_1a();
    if (selected(argc, argv, "1b")) criterion_1b();
    if (selected(argc, argv, "2")) criterion_2();
    if (selected(argc, argv, "3") || selected(argc, argv, "6") || selected(argc, argv, "7"))
        criteria_3_6_7(selected(argc, argv, "3"), selected(argc, argv, "6"),
                       selected(argc, argv, "7"));
    if (selected(argc, argv, "4")) criterion_4();
    if (selected(argc, argv, "5")) criterion_5();
    if (selected(argc, argv, "8")) criterion_8();
    if (selected(argc, argv, "9")) criterion_9();
    std::cout << (failures == 0 ? "acceptance: all selected criteria passed\n"
                                : "acceptance: " + std::to_string(failures) +
                                      " criterion(s) failed\n");
    return failures;
}
