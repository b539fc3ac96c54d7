#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "ifs/errors.hpp"
#include "ifs/spaces.hpp"

using namespace ifs;

namespace {

// Bit-by-bit distance on the shift space, from the string form.
double symbol_distance_oracle(const std::string& s, const std::string& t) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] != t[k]) return std::pow(2.0, 1.0 - static_cast<double>(k));
    }
    return 0.0;
}

std::string bits_of(const Point& p) {
    std::string s;
    for (int i = 0; i < p.kind().depth(); ++i) s += p.symbol(i) ? '1' : '0';
    return s;
}

std::vector<SpaceKind> sample_spaces() {
    const auto i01 = SpaceKind::interval();
    return {i01,
            SpaceKind::interval(-2.0, 3.0),
            SpaceKind::circle(),
            SpaceKind::symbols(64),
            SpaceKind::symbols(8),
            SpaceKind::finite(5),
            SpaceKind::product(i01, SpaceKind::circle()),
            SpaceKind::product(SpaceKind::symbols(16), SpaceKind::product(i01, SpaceKind::finite(3)))};
}

}  // namespace

TEST(Spaces, SymbolDistanceExamples) {
    const auto k = SpaceKind::symbols(64);
    const auto s = Point::symbols(k, "0111");
    const auto t = Point::symbols(k, "0000");
    EXPECT_EQ(distance(s, s), 0.0);
    EXPECT_EQ(distance(s, t), 1.0);
    EXPECT_EQ(distance(Point::symbols(k, "1"), Point::symbols(k, "0")), 2.0);
}

TEST(Spaces, StandardSymbolMetricHalvesDistances) {
    const auto k = SpaceKind::symbols(64, SymbolMetric::kStandard);
    EXPECT_EQ(distance(Point::symbols(k, "0111"), Point::symbols(k, "0000")), 0.5);
    EXPECT_EQ(diameter(k), 1.0);
}

TEST(Spaces, CircleAndProductExamples) {
    const auto c = SpaceKind::circle();
    EXPECT_NEAR(distance(Point::real(c, 0.1), Point::real(c, 0.9)), 0.2, 1e-15);
    EXPECT_NEAR(Point::real(c, 1.25).coord(), 0.25, 1e-15);
    EXPECT_NEAR(Point::real(c, -0.25).coord(), 0.75, 1e-15);

    const auto i = SpaceKind::interval();
    const auto a = Point::pair(Point::real(i, 0.2), Point::real(i, 0.7));
    const auto b = Point::pair(Point::real(i, 0.5), Point::real(i, 0.8));
    EXPECT_NEAR(distance(a, b), 0.3, 1e-15);
}

TEST(Spaces, Diameters) {
    EXPECT_EQ(diameter(SpaceKind::interval()), 1.0);
    EXPECT_EQ(diameter(SpaceKind::interval(-1.0, 2.0)), 3.0);
    EXPECT_EQ(diameter(SpaceKind::circle()), 0.5);
    EXPECT_EQ(diameter(SpaceKind::symbols(64)), 2.0);
    EXPECT_EQ(diameter(SpaceKind::finite(4)), 1.0);
    EXPECT_EQ(diameter(SpaceKind::finite(1)), 0.0);
    EXPECT_EQ(diameter(SpaceKind::product(SpaceKind::circle(), SpaceKind::symbols(8))), 2.0);
}

TEST(Spaces, GridExamples) {
    const auto g = grid(SpaceKind::interval(), 0.25);
    ASSERT_EQ(g.size(), 5u);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g[i].coord(), 0.25 * static_cast<double>(i));

    const auto c = grid(SpaceKind::circle(), 0.25);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_DOUBLE_EQ(c[3].coord(), 0.75);

    const auto f = grid(SpaceKind::finite(3), 0.7);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[2].element(), 2u);

    EXPECT_THROW(grid(SpaceKind::symbols(8), 0.1), UnsupportedKind);
    EXPECT_THROW(grid(SpaceKind::interval(), 0.0), DomainError);
}

TEST(Spaces, ProductGridIsLeftMajor) {
    const auto i = SpaceKind::interval();
    const auto g = grid(SpaceKind::product(i, SpaceKind::finite(2)), 0.5);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g[1].left().coord(), 0.0);
    EXPECT_EQ(g[1].right().element(), 1u);
    EXPECT_EQ(g[2].left().coord(), 0.5);
}

TEST(Spaces, ValidationErrors) {
    EXPECT_THROW(SpaceKind::interval(1.0, 1.0), DomainError);
    EXPECT_THROW(SpaceKind::symbols(1), DomainError);
    EXPECT_THROW(SpaceKind::symbols(65), DomainError);
    EXPECT_THROW(SpaceKind::finite(0), DomainError);
    EXPECT_THROW(Point::real(SpaceKind::interval(), 1.5), DomainError);
    EXPECT_THROW(Point::element(SpaceKind::finite(3), 3), DomainError);
    EXPECT_THROW(distance(Point::real(SpaceKind::interval(), 0.5), Point::real(SpaceKind::circle(), 0.5)), DomainError);

    SpaceKind k = SpaceKind::circle();
    for (int d = 0; d < kMaxProductNesting; ++d) k = SpaceKind::product(k, SpaceKind::circle());
    EXPECT_EQ(k.nesting(), kMaxProductNesting);
    EXPECT_THROW(SpaceKind::product(k, SpaceKind::circle()), GuardError);
}

TEST(Spaces, SymbolWordsRespectDepth) {
    const auto k = SpaceKind::symbols(4);
    EXPECT_THROW(Point::symbols(k, std::uint64_t{0xFF}), DomainError);
    EXPECT_EQ(bits_of(Point::symbols(k, std::uint64_t{0x5})), "1010");
    EXPECT_EQ(bits_of(Point::symbols(k, "01")), "0100");
}

TEST(Spaces, MetricAxiomsOnRandomTriples) {
    Rng rng(11);
    for (const auto& kind : sample_spaces()) {
        for (int trial = 0; trial < 10000; ++trial) {
            const auto a = random_point(kind, rng);
            const auto b = random_point(kind, rng);
            const auto c = random_point(kind, rng);
            ASSERT_TRUE(in_space(kind, a));
            ASSERT_EQ(distance(a, a), 0.0);
            ASSERT_EQ(distance(a, b), distance(b, a));
            ASSERT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12) << kind.describe();
            ASSERT_LE(distance(a, b), diameter(kind) + 1e-15);
        }
    }
}

TEST(Spaces, CircleDistanceMatchesOracle) {
    Rng rng(12);
    const auto c = SpaceKind::circle();
    for (int trial = 0; trial < 10000; ++trial) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        const double d = std::fabs(x - y);
        const double oracle = std::min(d, 1.0 - d);
        ASSERT_NEAR(distance(Point::real(c, x), Point::real(c, y)), oracle, 1e-15);
        ASSERT_LE(distance(Point::real(c, x), Point::real(c, y)), 0.5);
    }
}

TEST(Spaces, SymbolDistanceMatchesOracleAndIsQuantized) {
    Rng rng(13);
    for (int depth : {2, 7, 64}) {
        const auto k = SpaceKind::symbols(depth);
        for (int trial = 0; trial < 10000; ++trial) {
            auto a = random_point(k, rng);
            // share a random-length prefix so deep differences occur
            const int shared = static_cast<int>(rng.index(static_cast<std::size_t>(depth) + 1));
            const std::uint64_t keep = shared >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << shared) - 1);
            const auto b = Point::symbols(k, (a.word() & keep) | (random_point(k, rng).word() & ~keep));
            const double d = distance(a, b);
            ASSERT_EQ(d, symbol_distance_oracle(bits_of(a), bits_of(b)));
            if (d > 0.0) {
                const int e = static_cast<int>(std::lround(1.0 - std::log2(d)));
                ASSERT_GE(e, 0);
                ASSERT_LT(e, depth);
                ASSERT_EQ(d, std::ldexp(1.0, 1 - e));
            }
        }
    }
}

TEST(Spaces, GridIsAnHNet) {
    Rng rng(14);
    const auto i = SpaceKind::interval();
    const std::vector<std::pair<SpaceKind, double>> cases = {
        {i, 0.013}, {SpaceKind::interval(-1.0, 2.5), 0.07}, {SpaceKind::circle(), 0.011}, {SpaceKind::product(i, SpaceKind::circle()), 0.05}};
    for (const auto& [kind, h] : cases) {
        const auto g = grid(kind, h);
        for (int trial = 0; trial < 10000; ++trial) {
            const auto p = random_point(kind, rng);
            double best = 1e300;
            for (const auto& q : g) best = std::min(best, distance(p, q));
            ASSERT_LE(best, h) << kind.describe();
        }
    }
}

TEST(Spaces, GridIsAscending) {
    for (const auto& kind : {SpaceKind::interval(), SpaceKind::circle()}) {
        const auto g = grid(kind, 0.003);
        for (std::size_t i = 1; i < g.size(); ++i) ASSERT_LT(g[i - 1].coord(), g[i].coord());
    }
}

TEST(Spaces, JsonAndTextRoundTrip) {
    Rng rng(15);
    for (const auto& kind : sample_spaces()) {
        EXPECT_EQ(space_from_json(to_json(kind)), kind);
        for (int trial = 0; trial < 200; ++trial) {
            const auto p = random_point(kind, rng);
            EXPECT_EQ(point_from_json(to_json(p), kind), p);
            EXPECT_EQ(parse_point(kind, format_point(p)), p) << format_point(p);
        }
    }
    const auto j = to_json(Point::symbols(SpaceKind::symbols(4), "0110"));
    EXPECT_EQ(j.at("kind"), "symbols");
    EXPECT_EQ(j.at("value"), "0110");
}

TEST(Spaces, DisplaceStaysWithinRadius) {
    Rng rng(16);
    for (const auto& kind : sample_spaces()) {
        for (int trial = 0; trial < 2000; ++trial) {
            const auto p = random_point(kind, rng);
            const double r = rng.uniform(0.0, 0.3);
            const auto q = displace(p, r, rng);
            ASSERT_TRUE(in_space(kind, q));
            ASSERT_LE(distance(p, q), r + 1e-12) << kind.describe();
        }
    }
}
