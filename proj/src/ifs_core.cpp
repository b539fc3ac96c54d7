#include "ifs/ifs_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ifs/errors.hpp"
#include "ifs/random.hpp"

namespace ifs {

namespace {

std::vector<MapIndex> parse_digits(std::string_view text) {
    std::vector<MapIndex> out;
    if (text.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            const std::size_t end = std::min(text.find(',', start), text.size());
            const std::string_view tok = text.substr(start, end - start);
            MapIndex v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw DomainError("bad selector entry '" + std::string(tok) + "'");
            }
            out.push_back(v);
            start = end + 1;
        }
        return out;
    }
    for (char c : text) {
        if (c < '0' || c > '9') throw DomainError("bad selector digit '" + std::string(1, c) + "'");
        out.push_back(static_cast<MapIndex>(c - '0'));
    }
    return out;
}

std::size_t checked_power(std::size_t base, int k) {
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) {
        if (total > kMaxDerivedMaps / base) throw GuardError("derived system exceeds 4096 maps");
        total *= base;
    }
    return total;
}

}  // namespace

// IFSSpec -------------------------------------------------------------------

IFSSpec::IFSSpec(SpaceKind space, std::vector<Map> maps, std::optional<double> claimed_contraction,
                 std::vector<bool> surjective)
    : space_(std::move(space)), maps_(std::move(maps)), claimed_(claimed_contraction), surjective_(std::move(surjective)) {
    if (maps_.empty()) throw DomainError("an IFS needs at least one map");
    if (claimed_ && !(*claimed_ > 0.0 && *claimed_ < 1.0)) {
        throw DomainError("claimed contraction ratio must lie in (0, 1)");
    }
    if (surjective_.empty()) surjective_.assign(maps_.size(), false);
    if (surjective_.size() != maps_.size()) throw DomainError("one surjectivity flag per map required");
}

const Map& IFSSpec::map(MapIndex i) const {
    if (i >= maps_.size()) {
        throw DomainError("map index " + std::to_string(i) + " out of range (" + std::to_string(maps_.size()) + " maps)");
    }
    return maps_[i];
}

// SelectorSequence ----------------------------------------------------------

SelectorSequence SelectorSequence::explicit_entries(std::vector<MapIndex> entries) {
    SelectorSequence s;
    s.entries_ = std::move(entries);
    s.generator_ = "explicit";
    return s;
}

SelectorSequence SelectorSequence::periodic(std::vector<MapIndex> pattern, std::size_t length) {
    if (pattern.empty()) throw DomainError("periodic selector needs a nonempty pattern");
    SelectorSequence s;
    s.entries_.reserve(length);
    for (std::size_t i = 0; i < length; ++i) s.entries_.push_back(pattern[i % pattern.size()]);
    s.generator_ = "periodic:";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (i) s.generator_ += ',';
        s.generator_ += std::to_string(pattern[i]);
    }
    return s;
}

SelectorSequence SelectorSequence::constant(MapIndex index, std::size_t length) { return periodic({index}, length); }

SelectorSequence SelectorSequence::random(std::uint64_t seed, std::size_t alphabet, std::size_t length) {
    if (alphabet == 0) throw DomainError("random selector needs a nonempty alphabet");
    Rng rng(seed);
    SelectorSequence s;
    s.entries_.reserve(length);
    for (std::size_t i = 0; i < length; ++i) s.entries_.push_back(rng.index(alphabet));
    s.generator_ = "random:" + std::to_string(seed);
    return s;
}

SelectorSequence SelectorSequence::shifted(std::size_t offset) const {
    SelectorSequence s;
    if (offset < entries_.size()) s.entries_.assign(entries_.begin() + static_cast<std::ptrdiff_t>(offset), entries_.end());
    s.generator_ = "explicit";
    return s;
}

SelectorSequence SelectorSequence::prefix(std::size_t n) const {
    require(n);
    SelectorSequence s = *this;
    s.entries_.resize(n);
    return s;
}

void SelectorSequence::require(std::size_t n) const {
    if (entries_.size() < n) {
        throw LengthError("selector has " + std::to_string(entries_.size()) + " entries, " + std::to_string(n) + " needed");
    }
}

void SelectorSequence::check_alphabet(std::size_t alphabet) const {
    for (auto e : entries_) {
        if (e >= alphabet) throw DomainError("selector entry " + std::to_string(e) + " outside alphabet");
    }
}

SelectorSequence parse_selector(std::string_view text, std::size_t alphabet, std::size_t length) {
    SelectorSequence s;
    if (text.starts_with("periodic:")) {
        s = SelectorSequence::periodic(parse_digits(text.substr(9)), length);
    } else if (text.starts_with("random:")) {
        const std::string_view rest = text.substr(7);
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), seed);
        if (rest.empty() || ec != std::errc() || ptr != rest.data() + rest.size()) {
            throw DomainError("bad random selector seed '" + std::string(rest) + "'");
        }
        s = SelectorSequence::random(seed, alphabet, length);
    } else {
        s = SelectorSequence::explicit_entries(parse_digits(text));
    }
    s.check_alphabet(alphabet);
    return s;
}

nlohmann::json to_json(const SelectorSequence& s) {
    return {{"entries", s.entries()}, {"generator", s.generator()}};
}

SelectorSequence selector_from_json(const nlohmann::json& j) {
    if (j.is_array()) return SelectorSequence::explicit_entries(j.get<std::vector<MapIndex>>());
    // the stored realization is authoritative; the generator tag is provenance only
    return SelectorSequence::explicit_entries(j.at("entries").get<std::vector<MapIndex>>());
}

// Orbits --------------------------------------------------------------------

Point apply(const IFSSpec& ifs, MapIndex lambda, const Point& x) {
    const Map& f = ifs.map(lambda);
    if (!(x.kind() == ifs.space())) {
        throw DomainError("point in " + x.kind().describe() + " applied to an IFS on " + ifs.space().describe());
    }
    Point y = f(x);
    if (!(y.kind() == ifs.space())) throw DomainError("map '" + f.name() + "' left the space");
    return y;
}

OrbitRecord orbit(const IFSSpec& ifs, const SelectorSequence& selector, const Point& x0, std::size_t n) {
    selector.require(n);
    OrbitRecord rec{x0, selector.prefix(n), {}};
    rec.points.reserve(n + 1);
    rec.points.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) rec.points.push_back(apply(ifs, selector[i], rec.points.back()));
    return rec;
}

Point compose_apply(const IFSSpec& ifs, const SelectorSequence& selector, std::size_t n, const Point& x) {
    selector.require(n);
    Point y = x;
    if (n == 0 && !(x.kind() == ifs.space())) throw DomainError("point does not belong to the IFS space");
    for (std::size_t i = 0; i < n; ++i) y = apply(ifs, selector[i], y);
    return y;
}

std::vector<double> contraction_ratio_trace(const IFSSpec& ifs, std::size_t sample_pairs, std::uint64_t seed) {
    if (sample_pairs == 0) throw DomainError("at least one sample pair required");
    Rng rng(seed);
    std::vector<double> trace;
    trace.reserve(sample_pairs);
    double best = 0.0;
    for (std::size_t p = 0; p < sample_pairs; ++p) {
        const Point x = random_point(ifs.space(), rng);
        const Point y = random_point(ifs.space(), rng);
        const double d = distance(x, y);
        if (d > 0.0) {
            for (MapIndex l = 0; l < ifs.size(); ++l) {
                best = std::max(best, distance(apply(ifs, l, x), apply(ifs, l, y)) / d);
            }
        }
        trace.push_back(best);
    }
    return trace;
}

double estimate_contraction_ratio(const IFSSpec& ifs, std::size_t sample_pairs, std::uint64_t seed) {
    return contraction_ratio_trace(ifs, sample_pairs, seed).back();
}

bool claimed_contraction_holds(const IFSSpec& ifs, std::size_t sample_pairs, std::uint64_t seed) {
    const auto beta = ifs.claimed_contraction();
    if (!beta) return false;
    return estimate_contraction_ratio(ifs, sample_pairs, seed) <= *beta + 1e-9;
}

void validate_maps(const IFSSpec& ifs, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Point x = random_point(ifs.space(), rng);
        for (MapIndex l = 0; l < ifs.size(); ++l) {
            const Point y = apply(ifs, l, x);
            if (!in_space(ifs.space(), y)) throw DomainError("map '" + ifs.map(l).name() + "' left the space");
        }
    }
}

// Constructions -------------------------------------------------------------

MapIndex word_index(std::span<const MapIndex> word, std::size_t alphabet) {
    MapIndex mu = 0;
    for (MapIndex letter : word) {
        if (letter >= alphabet) throw DomainError("word letter outside alphabet");
        mu = mu * alphabet + letter;
    }
    return mu;
}

std::vector<MapIndex> index_word(MapIndex mu, std::size_t alphabet, int k) {
    std::vector<MapIndex> word(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        word[static_cast<std::size_t>(j)] = mu % alphabet;
        mu /= alphabet;
    }
    if (mu != 0) throw DomainError("word index exceeds alphabet^k");
    return word;
}

SelectorSequence word_selector(const SelectorSequence& selector, int k, std::size_t alphabet) {
    if (k < 1) throw DomainError("block length must be positive");
    const auto kk = static_cast<std::size_t>(k);
    std::vector<MapIndex> out;
    out.reserve(selector.size() / kk);
    for (std::size_t i = 0; i + kk <= selector.size(); i += kk) {
        out.push_back(word_index(std::span(selector.entries()).subspan(i, kk), alphabet));
    }
    return SelectorSequence::explicit_entries(std::move(out));
}

IFSSpec power_ifs(const IFSSpec& ifs, int k) {
    if (k < 2) throw DomainError("power_ifs needs k >= 2");
    const std::size_t alphabet = ifs.size();
    const std::size_t count = checked_power(alphabet, k);
    std::vector<Map> maps;
    std::vector<bool> surjective;
    maps.reserve(count);
    for (MapIndex mu = 0; mu < count; ++mu) {
        const auto word = index_word(mu, alphabet, k);
        MapDescriptor d;
        d.form = "word";
        std::vector<Evaluator> letters;
        bool onto = true;
        for (std::size_t j = 0; j < word.size(); ++j) {
            const Map& f = ifs.map(word[j]);
            d.parts.push_back(f.descriptor());
            letters.push_back(f.evaluator());
            onto = onto && ifs.surjective(word[j]);
            // name reads as a composition: last-applied map first
            d.name = j == 0 ? f.name() : f.name() + " o " + d.name;
        }
        maps.emplace_back(std::move(d), [letters](const Point& x) {
            Point y = x;
            for (const auto& f : letters) y = f(y);
            return y;
        });
        surjective.push_back(onto);
    }
    std::optional<double> claimed;
    if (ifs.claimed_contraction()) claimed = std::pow(*ifs.claimed_contraction(), k);
    return IFSSpec(ifs.space(), std::move(maps), claimed, std::move(surjective));
}

MapIndex product_index(MapIndex left, MapIndex right, std::size_t left_size) { return left + left_size * right; }

SelectorSequence product_selector(const SelectorSequence& left, const SelectorSequence& right, std::size_t left_size) {
    const std::size_t n = std::min(left.size(), right.size());
    std::vector<MapIndex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (left[i] >= left_size) throw DomainError("left selector entry outside alphabet");
        out[i] = product_index(left[i], right[i], left_size);
    }
    return SelectorSequence::explicit_entries(std::move(out));
}

IFSSpec product_ifs(const IFSSpec& left, const IFSSpec& right) {
    if (left.size() > kMaxDerivedMaps / right.size()) throw GuardError("product system exceeds 4096 maps");
    const SpaceKind space = SpaceKind::product(left.space(), right.space());
    std::vector<Map> maps;
    std::vector<bool> surjective;
    for (MapIndex g = 0; g < right.size(); ++g) {
        for (MapIndex l = 0; l < left.size(); ++l) {
            const Map& f = left.map(l);
            const Map& h = right.map(g);
            MapDescriptor d{f.name() + " x " + h.name(), "product", {}, {f.descriptor(), h.descriptor()}, {}};
            Evaluator fe = f.evaluator();
            Evaluator he = h.evaluator();
            maps.emplace_back(std::move(d),
                              [space, fe, he](const Point& x) { return Point::pair(space, fe(x.left()), he(x.right())); });
            surjective.push_back(left.surjective(l) && right.surjective(g));
        }
    }
    std::optional<double> claimed;
    if (left.claimed_contraction() && right.claimed_contraction()) {
        claimed = std::max(*left.claimed_contraction(), *right.claimed_contraction());
    }
    return IFSSpec(space, std::move(maps), claimed, std::move(surjective));
}

IFSSpec conjugate_ifs(const IFSSpec& ifs, const Homeomorphism& h, std::size_t samples, std::uint64_t seed) {
    if (!(h.source == ifs.space())) throw ConjugacyError("conjugacy source does not match the IFS space");
    constexpr double tol = 1e-9;
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Point y = random_point(h.target, rng);
        const Point x = random_point(h.source, rng);
        const Point hx = h.forward(x);
        const Point hy = h.inverse(y);
        if (!(hx.kind() == h.target) || !(hy.kind() == h.source)) throw ConjugacyError("conjugacy maps to the wrong space");
        if (distance(h.forward(hy), y) > tol || distance(h.inverse(hx), x) > tol) {
            throw ConjugacyError("conjugacy '" + h.name + "' failed the round-trip check");
        }
    }
    std::vector<Map> maps;
    for (const Map& f : ifs.maps()) {
        MapDescriptor d{h.name + "(" + f.name() + ")", "conjugate", {}, {f.descriptor()}, h.name};
        Evaluator fe = f.evaluator();
        Evaluator fwd = h.forward;
        Evaluator inv = h.inverse;
        maps.emplace_back(std::move(d), [fe, fwd, inv](const Point& y) { return fwd(fe(inv(y))); });
    }
    return IFSSpec(h.target, std::move(maps), std::nullopt, ifs.surjective_flags());
}

IFSSpec restrict_maps(const IFSSpec& ifs, const std::vector<MapIndex>& keep) {
    if (keep.empty()) throw DomainError("restriction keeps no maps");
    std::vector<Map> maps;
    std::vector<bool> surjective;
    for (MapIndex i : keep) {
        maps.push_back(ifs.map(i));
        surjective.push_back(ifs.surjective(i));
    }
    return IFSSpec(ifs.space(), std::move(maps), ifs.claimed_contraction(), std::move(surjective));
}

// JSON ----------------------------------------------------------------------

nlohmann::json to_json(const IFSSpec& ifs) {
    nlohmann::json j;
    j["space"] = to_json(ifs.space());
    j["maps"] = nlohmann::json::array();
    for (const Map& m : ifs.maps()) j["maps"].push_back(to_json(m.descriptor()));
    j["claimed_contraction"] = ifs.claimed_contraction() ? nlohmann::json(*ifs.claimed_contraction()) : nlohmann::json();
    j["surjective"] = ifs.surjective_flags();
    return j;
}

IFSSpec ifs_from_json(const nlohmann::json& j) {
    const SpaceKind space = space_from_json(j.at("space"));
    std::vector<Map> maps;
    for (const auto& m : j.at("maps")) maps.push_back(make_map(space, descriptor_from_json(m)));
    std::optional<double> claimed;
    if (j.contains("claimed_contraction") && !j.at("claimed_contraction").is_null()) {
        claimed = j.at("claimed_contraction").get<double>();
    }
    std::vector<bool> surjective;
    if (j.contains("surjective")) surjective = j.at("surjective").get<std::vector<bool>>();
    IFSSpec ifs(space, std::move(maps), claimed, std::move(surjective));
    validate_maps(ifs, 16);
    return ifs;
}

}  // namespace ifs
