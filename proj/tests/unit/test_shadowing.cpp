#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ifs/errors.hpp"
#include "ifs/model_library.hpp"
#include "ifs/pseudo_orbits.hpp"
#include "ifs/shadowing.hpp"

using namespace ifs;

namespace {

long double harmonic_number(std::size_t n) {
    long double h = 0.0L;
    for (std::size_t i = n; i >= 1; --i) h += 1.0L / static_cast<long double>(i);
    return h;
}

PseudoOrbitRecord harmonic_record(const IFSSpec& ifs, std::size_t n, std::uint64_t seed, double x0) {
    return perturbed_orbit(ifs, SelectorSequence::random(seed, ifs.size(), n), Point::real(ifs.space(), x0), harmonic_schedule(n), seed);
}

// The interval-pair pseudo-orbit climbing from 0.01 past 0.99 with jumps of 0.009.
PseudoOrbitRecord crossing_record(const IFSSpec& ifs) {
    std::vector<Point> pts{Point::real(ifs.space(), 0.01)};
    while (pts.back().coord() < 0.99) {
        pts.push_back(Point::real(ifs.space(), std::min(apply(ifs, 1, pts.back()).coord() + 0.009, 1.0)));
    }
    const auto sel = SelectorSequence::constant(1, pts.size() - 1);
    return make_record(ifs, std::move(pts), sel);
}

}  // namespace

TEST(Shadowing, VerifyTrueOrbit) {
    const auto ifs = make_system("circle_pair");
    const auto sel = SelectorSequence::random(1, 2, 300);
    const auto rec = make_record(ifs, orbit(ifs, sel, Point::real(ifs.space(), 0.37), 300).points, sel);
    const auto r = shadow_verify(ifs, rec, rec.points[0], rec.selector, 301, 1e-2, 0.0);
    EXPECT_EQ(r.sup_error, 0.0);
    EXPECT_EQ(r.final_average, 0.0);
    EXPECT_TRUE(r.verdict_avg);
    EXPECT_TRUE(r.verdict_sup);
    EXPECT_EQ(r.cesaro_curve.back(), r.final_average);
    EXPECT_THROW(shadow_verify(ifs, rec, rec.points[0], rec.selector, 302), LengthError);
    EXPECT_THROW(shadow_verify(ifs, rec, rec.points[0], rec.selector.prefix(10), 100), LengthError);
}

TEST(Shadowing, VerifyHarmonicAffine) {
    const auto ifs = make_system("binary_affine");
    const std::size_t n = 100000;
    const auto rec = harmonic_record(ifs, n, 2, 1.0);
    const double bound = static_cast<double>(2.0L * (1.0L + harmonic_number(n)) / static_cast<long double>(n));
    for (double z : {0.0, 0.5, 0.77}) {
        const auto r = shadow_verify(ifs, rec, Point::real(ifs.space(), z), rec.selector, n);
        EXPECT_LE(r.final_average, bound);
        EXPECT_TRUE(r.verdict_avg);
    }
    EXPECT_NEAR(bound, 2.6e-4, 0.05e-4);
}

TEST(Shadowing, ConstantNoiseIsNotShadowed) {
    const auto ifs = make_system("circle_pair");
    const std::size_t n = 3000;
    const auto rec = perturbed_orbit(ifs, SelectorSequence::random(3, 2, n), Point::real(ifs.space(), 0.2), constant_schedule(n, 0.3), 3);
    for (const auto& z : grid(ifs.space(), 0.01)) {
        const auto r = shadow_verify(ifs, rec, z, rec.selector, n + 1, 0.1);
        ASSERT_FALSE(r.verdict_avg) << format_point(z);
    }
}

TEST(Shadowing, BoundExamples) {
    EXPECT_DOUBLE_EQ(contracting_shadow_bound(0.5, 1.0, std::vector<double>(100, 0.0), 100), 0.02);
    const std::size_t n = 100000;
    const auto h = harmonic_schedule(n);
    const double oracle = static_cast<double>(2.0L * (1.0L + harmonic_number(n - 1)) / static_cast<long double>(n));
    EXPECT_NEAR(contracting_shadow_bound(0.5, 1.0, h, n), oracle, 1e-15);
    EXPECT_NEAR(oracle, 2.618e-4, 1e-7);
    EXPECT_THROW(contracting_shadow_bound(1.0, 1.0, h, n), DomainError);
    EXPECT_THROW(contracting_shadow_bound(0.5, -1.0, h, n), DomainError);
}

TEST(Shadowing, BoundDecreasesOnceTheErrorsStop) {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t prefix = 1 + rng.index(50);
        std::vector<double> alphas(400, 0.0);
        for (std::size_t i = 0; i < prefix; ++i) alphas[i] = rng.uniform();
        const double beta = rng.uniform(0.05, 0.95);
        const double m = rng.uniform();
        double prev = contracting_shadow_bound(beta, m, alphas, prefix + 1);
        for (std::size_t n = prefix + 2; n <= alphas.size(); ++n) {
            const double b = contracting_shadow_bound(beta, m, alphas, n);
            ASSERT_LE(b, prev);
            prev = b;
        }
    }
}

TEST(Shadowing, ContractingExamples) {
    const auto ifs = make_system("binary_affine");
    const auto sel = SelectorSequence::random(4, 2, 500);
    const auto exact = make_record(ifs, orbit(ifs, sel, Point::real(ifs.space(), 0.4), 500).points, sel);
    const auto zero = contracting_shadow(ifs, exact, exact.points[0]);
    EXPECT_EQ(zero.sup_error, 0.0);
    EXPECT_EQ(*zero.bound, 0.0);
    EXPECT_TRUE(*zero.pointwise_holds);

    const std::size_t n = 100000;
    const auto rec = harmonic_record(ifs, n, 5, 1.0);
    const auto r = contracting_shadow(ifs, rec, Point::real(ifs.space(), 0.0), n);
    EXPECT_LE(r.final_average, *r.bound);
    EXPECT_LE(*r.bound, 3e-4);
    EXPECT_TRUE(*r.pointwise_holds);
    EXPECT_TRUE(r.verdict_avg);

    const auto sig = make_system("sigma2_prepend");
    const auto srec = perturbed_orbit(sig, SelectorSequence::random(6, 2, n), Point::symbols(sig.space(), ~std::uint64_t{0}),
                                      symbolic_schedule(n), 6);
    const auto s = contracting_shadow(sig, srec, Point::symbols(sig.space(), std::uint64_t{0}), n);
    EXPECT_LE(s.final_average, *s.bound);
    EXPECT_TRUE(*s.pointwise_holds);
}

TEST(Shadowing, ContractingNeedsAValidClaim) {
    const auto circle = make_system("circle_pair");
    const auto rec = perturbed_orbit(circle, SelectorSequence::random(7, 2, 20), Point::real(circle.space(), 0.1), constant_schedule(20, 0.01), 7);
    EXPECT_THROW(contracting_shadow(circle, rec, rec.points[0]), ContractionError);

    const auto real = make_system("affine_family:0.9@0");
    const IFSSpec lying(real.space(), real.maps(), 0.5);
    const auto lrec = perturbed_orbit(lying, SelectorSequence::constant(0, 20), Point::real(lying.space(), 0.5), constant_schedule(20, 0.01), 7);
    EXPECT_THROW(contracting_shadow(lying, lrec, lrec.points[0]), ContractionError);
}

TEST(Shadowing, PointwiseInductiveBound) {
    Rng rng(52);
    for (double beta : {0.3, 0.5, 0.9}) {
        std::ostringstream id;
        id << "affine_family:" << beta << "@0," << beta << "@" << (1.0 - beta);
        const auto ifs = make_system(id.str());
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 10000;
            std::vector<double> sched(n);
            const double scale = rng.uniform(0.1, 1.0);
            for (std::size_t i = 0; i < n; ++i) sched[i] = scale * rng.uniform() / std::sqrt(static_cast<double>(i + 1));
            const auto rec = perturbed_orbit(ifs, SelectorSequence::random(rng.bits(), 2, n), random_point(ifs.space(), rng), sched, rng.bits());
            const auto y0 = random_point(ifs.space(), rng);
            const double m = distance(y0, rec.points[0]);
            const auto r = contracting_shadow(ifs, rec, y0);
            ASSERT_TRUE(*r.pointwise_holds);
            ASSERT_LE(r.final_average, *r.bound + 1e-9);
            // direct sums at sampled steps
            for (std::size_t i = 0; i <= n; i += 997) {
                long double b = 0.0L;
                long double power = 1.0L;
                for (std::size_t j = 0; j < i; ++j) {
                    b += power * rec.errors[i - 1 - j];
                    power *= beta;
                }
                b += power * m;
                ASSERT_LE(r.distances[i], static_cast<double>(b) + 1e-9) << "beta " << beta << " i " << i;
            }
        }
    }
}

TEST(Shadowing, StartPointIrrelevance) {
    Rng rng(53);
    for (const char* model : {"binary_affine", "affine_family:0.8@0,0.8@0.2"}) {
        const auto ifs = make_system(model);
        const double beta = *ifs.claimed_contraction();
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 2000;
            const auto rec = perturbed_orbit(ifs, SelectorSequence::random(rng.bits(), 2, n), random_point(ifs.space(), rng),
                                             harmonic_schedule(n), rng.bits());
            const auto a = contracting_shadow(ifs, rec, random_point(ifs.space(), rng));
            const auto b = contracting_shadow(ifs, rec, random_point(ifs.space(), rng));
            const double np1 = static_cast<double>(n + 1);
            ASSERT_LE(std::fabs(a.final_average - b.final_average), diameter(ifs.space()) / ((1.0 - beta) * np1) + 1e-9);
        }
    }
}

TEST(Shadowing, GreedyFindsTrueOrbit) {
    const auto ifs = make_system("interval_pair");
    const auto sel = SelectorSequence::random(8, 2, 200);
    const auto rec = make_record(ifs, orbit(ifs, sel, Point::real(ifs.space(), 0.25), 200).points, sel);
    const auto r = greedy_shadow_search(ifs, rec, grid(ifs.space(), 0.125), 201);
    EXPECT_EQ(r.final_average, 0.0);
    EXPECT_EQ(r.candidate.coord(), 0.25);
    const auto f = finite_shadowing_check(ifs, rec, 1e-6, grid(ifs.space(), 0.125), 201);
    EXPECT_TRUE(f.found);
    EXPECT_EQ(f.witness.sup_error, 0.0);
}

TEST(Shadowing, GreedyWithinContractingBound) {
    Rng rng(54);
    const auto ifs = make_system("binary_affine");
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3000;
        const auto rec = harmonic_record(ifs, n, rng.bits(), rng.uniform());
        const auto z = random_point(ifs.space(), rng);
        const auto c = contracting_shadow(ifs, rec, z);
        const auto g = greedy_shadow(ifs, rec, z, n + 1);
        ASSERT_LE(g.final_average, *c.bound + 1e-12);
    }
}

TEST(Shadowing, GreedyGridRefinementIsMonotone) {
    Rng rng(55);
    for (const char* model : {"interval_pair", "circle_pair", "binary_affine"}) {
        const auto ifs = make_system(model);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 400;
            const auto rec = perturbed_orbit(ifs, SelectorSequence::random(rng.bits(), 2, n), random_point(ifs.space(), rng),
                                             constant_schedule(n, rng.uniform(0.0, 0.05)), rng.bits());
            auto coarse = grid(ifs.space(), 0.05);
            const auto base = greedy_search(ifs, rec, coarse, n + 1);
            auto fine = coarse;
            for (int extra = 0; extra < 40; ++extra) fine.push_back(random_point(ifs.space(), rng));
            const auto refined = greedy_search(ifs, rec, fine, n + 1);
            ASSERT_LE(refined.best_average.final_average, base.best_average.final_average);
            ASSERT_LE(refined.best_sup.sup_error, base.best_sup.sup_error);
        }
    }
}

TEST(Shadowing, GreedySearchIsThreadIndependent) {
    const auto ifs = make_system("circle_pair");
    const auto rec = perturbed_orbit(ifs, SelectorSequence::random(9, 2, 500), Point::real(ifs.space(), 0.3), constant_schedule(500, 0.02), 9);
    const auto starts = grid(ifs.space(), 0.002);
    const auto one = greedy_search(ifs, rec, starts, 501, 1e-2, 0.0, 1);
    const auto many = greedy_search(ifs, rec, starts, 501, 1e-2, 0.0, 4);
    EXPECT_EQ(one.best_average_index, many.best_average_index);
    EXPECT_EQ(one.best_average.final_average, many.best_average.final_average);
    EXPECT_EQ(one.best_sup_index, many.best_sup_index);
}

TEST(Shadowing, IntervalPairCrossingHasNoShadow) {
    const auto ifs = make_system("interval_pair");
    const auto rec = crossing_record(ifs);
    EXPECT_TRUE(validate_delta_pseudo_orbit(rec, 0.01).verdict);
    const auto starts = grid(ifs.space(), 1e-3);
    const auto s = greedy_search(ifs, rec, starts, rec.points.size());
    EXPECT_GE(s.best_sup.sup_error, 0.2);
    const auto f = finite_shadowing_check(ifs, rec, 0.2, starts, rec.points.size());
    EXPECT_FALSE(f.found);
    EXPECT_GE(f.infimum, 0.2);
}

TEST(Shadowing, AffineDeltaPseudoOrbitIsShadowed) {
    const auto ifs = make_system("binary_affine");
    const auto rec = perturbed_orbit(ifs, SelectorSequence::random(10, 2, 500), Point::real(ifs.space(), 0.6), constant_schedule(500, 0.001), 10);
    ASSERT_TRUE(validate_delta_pseudo_orbit(rec, 0.0011).verdict);
    const auto f = finite_shadowing_check(ifs, rec, 0.01, grid(ifs.space(), 1e-3), 501);
    EXPECT_TRUE(f.found);
    EXPECT_LE(f.witness.sup_error, 0.01);
}
