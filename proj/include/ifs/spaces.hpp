#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/random.hpp"

namespace ifs {

inline constexpr int kMaxSymbolDepth = 64;
inline constexpr int kMaxProductNesting = 8;

/// Distance convention on the one-sided shift space.
///
/// kShifted: d(s,t) = 1/2^{k-1} at the first disagreement k (diameter 2).
/// kStandard: d(s,t) = 1/2^k (diameter 1).
enum class SymbolMetric { kShifted, kStandard };

/// One of the supported compact metric spaces. Cheap to copy; product
/// factors are shared immutable nodes.
class SpaceKind {
public:
    enum class Tag { kInterval, kCircle, kSymbols, kFinite, kProduct };

    static SpaceKind interval(double lo = 0.0, double hi = 1.0);
    static SpaceKind circle();
    /// Binary sequences truncated to `depth` symbols (2..64).
    static SpaceKind symbols(int depth = kMaxSymbolDepth, SymbolMetric metric = SymbolMetric::kShifted);
    static SpaceKind finite(std::size_t n);
    static SpaceKind product(const SpaceKind& left, const SpaceKind& right);

    Tag tag() const { return tag_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int depth() const { return depth_; }
    SymbolMetric metric() const { return metric_; }
    std::size_t size() const { return n_; }
    const SpaceKind& left() const;
    const SpaceKind& right() const;

    /// 0 for base spaces, 1 + max factor nesting for products.
    int nesting() const;
    /// Number of scalar leaves (1 for base spaces).
    std::size_t leaves() const;

    /// "interval", "circle", "symbols", "finite" or "product".
    std::string name() const;
    /// Human-readable, e.g. "interval[0,1]" or "product(circle,symbols(64))".
    std::string describe() const;

    /// True for spaces that `grid` can discretize.
    bool grid_supported() const;

    friend bool operator==(const SpaceKind& a, const SpaceKind& b);

private:
    SpaceKind() = default;

    Tag tag_ = Tag::kInterval;
    double lo_ = 0.0;
    double hi_ = 1.0;
    int depth_ = 0;
    SymbolMetric metric_ = SymbolMetric::kShifted;
    std::size_t n_ = 0;
    std::shared_ptr<const SpaceKind> left_;
    std::shared_ptr<const SpaceKind> right_;
};

/// A value in one of the supported spaces. Constructed only through the
/// validating factories, so the payload always lies in the domain of its kind.
class Point {
public:
    /// Interval or circle coordinate. Circle values are reduced mod 1.
    static Point real(const SpaceKind& kind, double x);
    /// Like `real`, but values within `slack` outside an interval are
    /// clamped to the nearest endpoint instead of rejected.
    static Point real_settled(const SpaceKind& kind, double x, double slack = 1e-12);
    /// Symbol word; bit i holds s_i.
    static Point symbols(const SpaceKind& kind, std::uint64_t word);
    /// Symbol string "s0 s1 s2 ..." of length at most depth; missing tail is 0.
    static Point symbols(const SpaceKind& kind, std::string_view bits);
    static Point element(const SpaceKind& kind, std::size_t i);
    static Point pair(Point left, Point right);
    /// Pairs into an existing product kind (no new kind node allocated).
    static Point pair(const SpaceKind& product, Point left, Point right);

    const SpaceKind& kind() const { return kind_; }
    double coord() const { return x_; }
    std::uint64_t word() const { return word_; }
    std::size_t element() const { return static_cast<std::size_t>(word_); }
    bool symbol(int i) const { return ((word_ >> i) & 1u) != 0; }
    const Point& left() const;
    const Point& right() const;

    /// Exact representation equality.
    friend bool operator==(const Point& a, const Point& b);

private:
    explicit Point(SpaceKind kind) : kind_(std::move(kind)) {}

    SpaceKind kind_;
    double x_ = 0.0;
    std::uint64_t word_ = 0;
    std::vector<Point> parts_;
};

/// Mask with the low `depth` bits set.
std::uint64_t symbol_mask(int depth);

/// t mod 1 in [0, 1).
double canonical_circle(double t);

bool in_space(const SpaceKind& kind, const Point& p);

/// Metric of the common space. Throws DomainError when kinds differ.
double distance(const Point& a, const Point& b);

/// Exact supremum of the metric over the space.
double diameter(const SpaceKind& kind);

/// Deterministic h-net of the space in ascending (lexicographic) order.
/// Throws UnsupportedKind for symbol spaces.
std::vector<Point> grid(const SpaceKind& kind, double resolution);

Point random_point(const SpaceKind& kind, Rng& rng);

/// A point at distance min(r, largest feasible) from p, in a random
/// direction. On symbol spaces distances are quantized to the largest
/// attainable value not exceeding r.
Point displace(const Point& p, double r, Rng& rng);

/// Leaf coordinates as text, one entry per scalar leaf.
std::vector<std::string> point_fields(const Point& p);
std::string format_point(const Point& p);

/// Parses "0.25", a bit string, an element index, or comma-separated leaves
/// for products. A leading '{' is read as point JSON.
Point parse_point(const SpaceKind& kind, std::string_view text);

nlohmann::json to_json(const SpaceKind& kind);
SpaceKind space_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Point& p);
Point point_from_json(const nlohmann::json& j, const SpaceKind& kind);

}  // namespace ifs
