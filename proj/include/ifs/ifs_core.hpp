#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/maps.hpp"
#include "ifs/spaces.hpp"

namespace ifs {

using MapIndex = std::size_t;

/// Largest map count allowed for power and product systems.
inline constexpr std::size_t kMaxDerivedMaps = 4096;

/// A finite indexed family of continuous self-maps on one space.
class IFSSpec {
public:
    /// Throws DomainError for an empty family, a claimed ratio outside (0,1)
    /// or a flag list whose length differs from the map count.
    IFSSpec(SpaceKind space, std::vector<Map> maps, std::optional<double> claimed_contraction = std::nullopt,
            std::vector<bool> surjective = {});

    const SpaceKind& space() const { return space_; }
    std::size_t size() const { return maps_.size(); }
    const std::vector<Map>& maps() const { return maps_; }
    const Map& map(MapIndex i) const;
    std::optional<double> claimed_contraction() const { return claimed_; }
    bool surjective(MapIndex i) const { return surjective_.at(i); }
    const std::vector<bool>& surjective_flags() const { return surjective_; }

private:
    SpaceKind space_;
    std::vector<Map> maps_;
    std::optional<double> claimed_;
    std::vector<bool> surjective_;
};

/// A finite realization of a map-choice sequence lambda_0, lambda_1, ...
class SelectorSequence {
public:
    SelectorSequence() = default;

    static SelectorSequence explicit_entries(std::vector<MapIndex> entries);
    static SelectorSequence periodic(std::vector<MapIndex> pattern, std::size_t length);
    static SelectorSequence constant(MapIndex index, std::size_t length);
    static SelectorSequence random(std::uint64_t seed, std::size_t alphabet, std::size_t length);

    const std::vector<MapIndex>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    MapIndex operator[](std::size_t i) const { return entries_[i]; }

    /// "explicit", "periodic:<pattern>" or "random:<seed>".
    const std::string& generator() const { return generator_; }

    /// Entries from `offset` on (the shifted selector).
    SelectorSequence shifted(std::size_t offset) const;
    SelectorSequence prefix(std::size_t n) const;

    /// Throws LengthError when fewer than n entries exist.
    void require(std::size_t n) const;
    /// Throws DomainError when an entry is not below `alphabet`.
    void check_alphabet(std::size_t alphabet) const;

private:
    std::vector<MapIndex> entries_;
    std::string generator_ = "explicit";
};

/// Parses "0101" or "0,1,1" (explicit), "periodic:01" or "periodic:0,1",
/// and "random:<seed>"; periodic and random selectors are realized to `length`.
SelectorSequence parse_selector(std::string_view text, std::size_t alphabet, std::size_t length);

nlohmann::json to_json(const SelectorSequence& s);
SelectorSequence selector_from_json(const nlohmann::json& j);

struct OrbitRecord {
    Point initial;
    SelectorSequence selector;
    std::vector<Point> points;
};

/// f_lambda(x). Throws DomainError for an invalid index or a point of another space.
Point apply(const IFSSpec& ifs, MapIndex lambda, const Point& x);

/// n + 1 points with points[i+1] = f_{lambda_i}(points[i]).
OrbitRecord orbit(const IFSSpec& ifs, const SelectorSequence& selector, const Point& x0, std::size_t n);

/// F_{sigma_n}(x) = f_{lambda_{n-1}} o ... o f_{lambda_0}(x); identity for n = 0.
Point compose_apply(const IFSSpec& ifs, const SelectorSequence& selector, std::size_t n, const Point& x);

/// Largest observed d(f(x), f(y)) / d(x, y) over sampled pairs and all maps.
/// A lower bound on the contraction ratio; pairs at distance 0 are skipped.
double estimate_contraction_ratio(const IFSSpec& ifs, std::size_t sample_pairs, std::uint64_t seed);

/// Running maximum after each sampled pair (same sampling as the estimate).
std::vector<double> contraction_ratio_trace(const IFSSpec& ifs, std::size_t sample_pairs, std::uint64_t seed);

/// True when a claimed ratio exists and the sampled estimate does not exceed it by more than 1e-9.
bool claimed_contraction_holds(const IFSSpec& ifs, std::size_t sample_pairs = 4096, std::uint64_t seed = 0);

/// Spot-checks that every map sends sampled points of the space into the
/// space. Throws DomainError on the first failure.
void validate_maps(const IFSSpec& ifs, std::size_t samples = 64, std::uint64_t seed = 0);

/// k-fold composition system with |Lambda|^k maps.
///
/// Map mu encodes the word (lambda_0, ..., lambda_{k-1}) with lambda_0 the
/// most significant base-|Lambda| digit, and g_mu = f_{lambda_{k-1}} o ... o
/// f_{lambda_0}. For two maps and k = 2 this gives g_1 = f_1 o f_0.
IFSSpec power_ifs(const IFSSpec& ifs, int k);

MapIndex word_index(std::span<const MapIndex> word, std::size_t alphabet);
std::vector<MapIndex> index_word(MapIndex mu, std::size_t alphabet, int k);

/// Selector over the k-fold system built from consecutive k-blocks.
SelectorSequence word_selector(const SelectorSequence& selector, int k, std::size_t alphabet);

/// Product system on left x right; map (lambda, gamma) has index lambda + |Lambda| * gamma.
IFSSpec product_ifs(const IFSSpec& left, const IFSSpec& right);

MapIndex product_index(MapIndex left, MapIndex right, std::size_t left_size);
SelectorSequence product_selector(const SelectorSequence& left, const SelectorSequence& right, std::size_t left_size);

/// g_lambda = h o f_lambda o h^{-1} on h.target. The round trips h(h^{-1}(y))
/// and h^{-1}(h(x)) are validated on samples to 1e-9 (ConjugacyError otherwise).
IFSSpec conjugate_ifs(const IFSSpec& ifs, const Homeomorphism& h, std::size_t samples = 256, std::uint64_t seed = 0);

/// Subfamily with the listed maps in the given order (claim and flags carried over).
IFSSpec restrict_maps(const IFSSpec& ifs, const std::vector<MapIndex>& keep);

/// {"space": ..., "maps": [{"name", "form", "params"}...], "claimed_contraction": ..., "surjective": [...]}
nlohmann::json to_json(const IFSSpec& ifs);
IFSSpec ifs_from_json(const nlohmann::json& j);

}  // namespace ifs
