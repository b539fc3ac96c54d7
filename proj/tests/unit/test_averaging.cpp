#include <gtest/gtest.h>

#include <cmath>

#include "ifs/averaging.hpp"
#include "ifs/errors.hpp"
#include "ifs/random.hpp"

using namespace ifs;

namespace {

bool is_power_of_two(std::size_t i) { return i > 0 && (i & (i - 1)) == 0; }

std::vector<double> powers_series(std::size_t t) {
    std::vector<double> v(t);
    for (std::size_t i = 0; i < t; ++i) v[i] = is_power_of_two(i) ? 1.0 : 1.0 / static_cast<double>(i + 1);
    return v;
}

// Forward scan: N_k is the last prefix length whose indicator average is at
// least 2^-k, computed independently for each level; membership is decided
// per index from the level whose window contains it.
std::vector<bool> level_set_oracle(const std::vector<double>& a) {
    const std::size_t t = a.size();
    std::vector<std::size_t> cut(61, 0);
    for (int k = 1; k <= 60; ++k) {
        const double theta = std::ldexp(1.0, -k);
        std::size_t count = 0;
        std::size_t last = 0;
        for (std::size_t n = 1; n <= t; ++n) {
            if (a[n - 1] > theta) ++count;
            if (std::ldexp(static_cast<double>(count), k) >= static_cast<double>(n)) last = n;
        }
        cut[static_cast<std::size_t>(k)] = std::max(last, cut[static_cast<std::size_t>(k - 1)]);
    }
    std::vector<bool> in(t, false);
    for (std::size_t i = 0; i < t; ++i) {
        int level = 0;
        for (int k = 1; k <= 60; ++k) {
            if (cut[static_cast<std::size_t>(k)] <= i) level = k;
        }
        if (level > 0) in[i] = a[i] > std::ldexp(1.0, -level);
    }
    return in;
}

std::vector<double> random_decaying_series(Rng& rng, std::size_t t) {
    std::vector<double> v(t);
    const double spike_rate = rng.uniform(0.0, 0.05);
    for (std::size_t i = 0; i < t; ++i) {
        v[i] = rng.uniform() < spike_rate ? rng.uniform(0.0, 1.0) : rng.uniform(0.0, 1.0) / std::sqrt(static_cast<double>(i + 1));
    }
    return v;
}

IndexSet random_set(Rng& rng, std::size_t t, double p) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < t; ++i) {
        if (rng.uniform() < p) v.push_back(i);
    }
    return IndexSet(v, t);
}

}  // namespace

TEST(Averaging, CesaroExamples) {
    EXPECT_DOUBLE_EQ(cesaro_average(Series(std::vector<double>(100, 0.37)), 57), 0.37);

    std::vector<double> h(10000);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 / static_cast<double>(i + 1);
    long double oracle = 0.0L;
    for (std::size_t i = h.size(); i >= 1; --i) oracle += 1.0L / static_cast<long double>(i);
    const double avg = cesaro_average(Series(h), 10000);
    EXPECT_NEAR(avg, static_cast<double>(oracle / 10000.0L), 1e-16);
    EXPECT_NEAR(avg, 9.7876e-4, 1e-8);

    std::vector<double> p(1024, 0.0);
    for (std::size_t i = 1; i < 1024; i *= 2) p[i] = 1.0;
    EXPECT_DOUBLE_EQ(cesaro_average(Series(p), 1024), 10.0 / 1024.0);
    p.push_back(1.0);
    EXPECT_DOUBLE_EQ(cesaro_average(Series(p), 1024), 10.0 / 1024.0);
}

TEST(Averaging, PowersOfTwoCountUpTo1024) {
    // 2^0 .. 2^10 lie in [0, 1025)
    std::vector<double> p(1025, 0.0);
    for (std::size_t i = 1; i <= 1024; i *= 2) p[i] = 1.0;
    EXPECT_DOUBLE_EQ(cesaro_average(Series(p), 1025), 11.0 / 1025.0);
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i <= 1024; i *= 2) idx.push_back(i);
    EXPECT_DOUBLE_EQ(density(IndexSet(idx, 2048), 1024), 10.0 / 1024.0);
    EXPECT_DOUBLE_EQ(density(IndexSet(idx, 2048), 1025), 11.0 / 1025.0);
}

TEST(Averaging, CesaroErrors) {
    const Series s(std::vector<double>(10, 1.0));
    EXPECT_THROW(cesaro_average(s, 0), DomainError);
    EXPECT_THROW(cesaro_average(s, 11), DomainError);
    EXPECT_THROW(Series(std::vector<double>{1.0, -0.5}), DomainError);
    EXPECT_THROW(Series(std::vector<double>{1.0, 3.0}, 2.0), DomainError);
}

TEST(Averaging, RunningCurveExamples) {
    const auto c = running_average_curve(std::vector<double>(50, 0.25));
    for (double v : c) EXPECT_DOUBLE_EQ(v, 0.25);
    for (double v : running_average_curve(std::vector<double>(50, 0.0))) EXPECT_EQ(v, 0.0);
    std::vector<double> h(5000);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 / static_cast<double>(i + 1);
    const auto hc = running_average_curve(h);
    for (std::size_t i = 1; i < hc.size(); ++i) ASSERT_LE(hc[i], hc[i - 1]);
    EXPECT_EQ(hc.back(), cesaro_average(h, h.size()));
}

TEST(Averaging, DensityExamples) {
    std::vector<std::size_t> evens;
    for (std::size_t i = 0; i < 1000; i += 2) evens.push_back(i);
    EXPECT_DOUBLE_EQ(density(IndexSet(evens, 1000), 1000), 0.5);
    EXPECT_EQ(density(IndexSet({}, 1000), 1000), 0.0);
    EXPECT_THROW(IndexSet({5}, 5), DomainError);
}

TEST(Averaging, Linearity) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t t = 1 + rng.index(3000);
        std::vector<double> a(t), b(t), sum(t);
        for (std::size_t i = 0; i < t; ++i) {
            a[i] = rng.uniform();
            b[i] = rng.uniform(0.0, 5.0);
            sum[i] = a[i] + b[i];
        }
        const std::size_t n = 1 + rng.index(t);
        ASSERT_NEAR(cesaro_average(sum, n), cesaro_average(a, n) + cesaro_average(b, n), 1e-12);
    }
}

TEST(Averaging, DensitySubadditivity) {
    Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t t = 1 + rng.index(2000);
        const auto j = random_set(rng, t, rng.uniform());
        const auto k = random_set(rng, t, rng.uniform());
        const auto u = set_union(j, k);
        const std::size_t n = 1 + rng.index(t);
        ASSERT_LE(u.count_below(n), j.count_below(n) + k.count_below(n));
        ASSERT_GE(u.count_below(n), std::max(j.count_below(n), k.count_below(n)));
    }
}

TEST(Averaging, BlockSaturationDensity) {
    Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t t = 1 + rng.index(3000);
        const auto j = random_set(rng, t, rng.uniform(0.0, 0.1));
        const std::size_t k = 1 + rng.index(8);
        const auto sat = block_saturation(j, k);
        ASSERT_EQ(sat.horizon(), t);
        for (std::size_t i : j.indices()) ASSERT_TRUE(sat.contains(i));
        for (std::size_t i : sat.indices()) {
            bool hit = false;
            for (std::size_t m = (i / k) * k; m < (i / k) * k + k; ++m) hit = hit || j.contains(m);
            ASSERT_TRUE(hit);
        }
        // density(J', T) <= k d + k / T, as integer counts
        ASSERT_LE(sat.size(), k * j.size() + k);
    }
}

TEST(Averaging, ExtractZeroSeries) {
    const auto ex = extract_null_density_set(Series(std::vector<double>(1000, 0.0)));
    EXPECT_FALSE(ex.no_decay);
    EXPECT_EQ(ex.set.size(), 0u);
    EXPECT_EQ(ex.tail_max, 0.0);
}

TEST(Averaging, ExtractEvensHasNoDecay) {
    std::vector<double> v(10000, 0.0);
    for (std::size_t i = 0; i < v.size(); i += 2) v[i] = 1.0;
    const auto ex = extract_null_density_set(Series(v));
    EXPECT_TRUE(ex.no_decay);
    EXPECT_EQ(ex.set.size(), v.size());
}

TEST(Averaging, ExtractPowersOfTwoAtOneMillion) {
    const std::size_t t = 1000000;
    const auto v = powers_series(t);
    const Series s(v);
    const auto ex = extract_null_density_set(s);
    ASSERT_FALSE(ex.no_decay);
    ASSERT_FALSE(ex.cuts.empty());
    EXPECT_LT(ex.density, 0.01);
    EXPECT_LT(ex.tail_max, 0.05);
    for (std::size_t i = 1; i < t; i *= 2) {
        if (i >= ex.cuts.front()) {
            EXPECT_TRUE(ex.set.contains(i)) << i;
        }
    }
    const auto oracle = level_set_oracle(v);
    for (std::size_t i = 0; i < t; ++i) ASSERT_EQ(ex.set.contains(i), oracle[i]) << i;
    const auto rep = verify_null_density_implies_average(s, ex.set, 1e-3);
    EXPECT_TRUE(rep.verdict);
}

TEST(Averaging, ExtractMatchesOracleOnRandomSeries) {
    Rng rng(34);
    for (int trial = 0; trial < 60; ++trial) {
        const auto v = random_decaying_series(rng, 1 + rng.index(5000));
        const Series s(v);
        const auto ex = extract_null_density_set(s, 1 + static_cast<int>(rng.index(4)));
        if (ex.no_decay) continue;
        const auto oracle = level_set_oracle(v);
        for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(ex.set.contains(i), oracle[i]) << "trial " << trial << " i " << i;
        for (std::size_t k = 1; k < ex.cuts.size(); ++k) ASSERT_LE(ex.cuts[k - 1], ex.cuts[k]);
    }
}

TEST(Averaging, ExtractVerifyRoundTrip) {
    Rng rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        const auto v = random_decaying_series(rng, 1 + rng.index(4000));
        const Series s(v);
        const auto ex = extract_null_density_set(s);
        if (ex.no_decay) continue;
        ASSERT_TRUE(verify_null_density_implies_average(s, ex.set, 1e-2).verdict);
    }
}

TEST(Averaging, VerifyExamples) {
    const Series ones(std::vector<double>(100, 1.0));
    const auto all = verify_null_density_implies_average(ones, IndexSet::range(0, 100, 100), 1e-3);
    EXPECT_TRUE(all.verdict);
    EXPECT_DOUBLE_EQ(all.bound, 1.0 + 1e-3);

    // With J empty every index counts toward the off-set maximum, so the
    // bound is 1 + tol and the constant series passes.
    const auto none = verify_null_density_implies_average(ones, IndexSet({}, 100), 0.5);
    EXPECT_EQ(none.off_set_max, 1.0);
    EXPECT_TRUE(none.verdict);

    EXPECT_FALSE(verify_null_density_implies_average(ones, IndexSet({}, 100), -0.5).verdict);
}
