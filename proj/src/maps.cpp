#include "ifs/maps.hpp"

#include <algorithm>
#include <cmath>

#include "ifs/errors.hpp"

namespace ifs {

namespace {

void require_params(const MapDescriptor& d, std::size_t n) {
    if (d.params.size() != n) {
        throw DomainError("map '" + d.name + "' (" + d.form + ") expects " + std::to_string(n) + " parameters");
    }
}

void require_unit_interval(const SpaceKind& space, const MapDescriptor& d) {
    if (!(space == SpaceKind::interval(0.0, 1.0))) {
        throw DomainError("map '" + d.name + "' (" + d.form + ") needs interval[0,1], got " + space.describe());
    }
}

Evaluator affine_eval(const SpaceKind& space, const MapDescriptor& d) {
    require_params(d, 2);
    const double slope = d.params[0];
    const double offset = d.params[1];
    if (space.tag() == SpaceKind::Tag::kCircle) {
        return [space, slope, offset](const Point& x) { return Point::real(space, slope * x.coord() + offset); };
    }
    if (space.tag() != SpaceKind::Tag::kInterval) {
        throw DomainError("affine map '" + d.name + "' needs an interval or circle");
    }
    const double a = slope * space.lo() + offset;
    const double b = slope * space.hi() + offset;
    constexpr double slack = 1e-12;
    if (std::min(a, b) < space.lo() - slack || std::max(a, b) > space.hi() + slack) {
        throw DomainError("affine map '" + d.name + "' does not map " + space.describe() + " into itself");
    }
    return [space, slope, offset](const Point& x) { return Point::real_settled(space, slope * x.coord() + offset); };
}

Evaluator piecewise_eval(const SpaceKind& space, const MapDescriptor& d) {
    if (space.tag() != SpaceKind::Tag::kInterval) {
        throw DomainError("piecewise map '" + d.name + "' needs an interval");
    }
    if (d.params.size() < 4 || d.params.size() % 2 != 0) {
        throw DomainError("piecewise map '" + d.name + "' needs at least two (x, y) knots");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < d.params.size(); i += 2) {
        xs.push_back(d.params[i]);
        ys.push_back(d.params[i + 1]);
    }
    if (xs.front() != space.lo() || xs.back() != space.hi()) {
        throw DomainError("piecewise map '" + d.name + "' knots must span the interval");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw DomainError("piecewise map '" + d.name + "' knots must increase");
    }
    for (double y : ys) {
        if (y < space.lo() || y > space.hi()) throw DomainError("piecewise map '" + d.name + "' leaves the interval");
    }
    return [space, xs, ys](const Point& p) {
        const double x = p.coord();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin());
        if (i == 0) i = 1;
        if (i >= xs.size()) i = xs.size() - 1;
        const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return Point::real_settled(space, ys[i - 1] + w * (ys[i] - ys[i - 1]));
    };
}

Evaluator prepend_eval(const SpaceKind& space, const MapDescriptor& d) {
    require_params(d, 1);
    if (space.tag() != SpaceKind::Tag::kSymbols) {
        throw DomainError("prepend map '" + d.name + "' needs a symbol space");
    }
    if (d.params[0] != 0.0 && d.params[0] != 1.0) throw DomainError("prepend symbol must be 0 or 1");
    const std::uint64_t bit = d.params[0] == 1.0 ? 1 : 0;
    const std::uint64_t mask = symbol_mask(space.depth());
    return [space, bit, mask](const Point& s) { return Point::symbols(space, ((s.word() << 1) | bit) & mask); };
}

Evaluator lift_eval(const SpaceKind& space, const MapDescriptor& d, bool on_circle) {
    require_params(d, 2);
    const double a = d.params[0];
    const double b = d.params[1];
    if (std::abs(a) > 2.0 || std::abs(b) > 2.0) {
        throw DomainError("quadratic lift '" + d.name + "' needs |a|, |b| <= 2");
    }
    if (on_circle) {
        if (space.tag() != SpaceKind::Tag::kCircle) throw DomainError("circle_lift '" + d.name + "' needs the circle");
        return [space, a, b](const Point& x) { return Point::real(space, quadratic_lift(a, b, x.coord())); };
    }
    require_unit_interval(space, d);
    return [space, a, b](const Point& x) { return Point::real_settled(space, quadratic_lift(a, b, x.coord())); };
}

Evaluator permutation_eval(const SpaceKind& space, const MapDescriptor& d) {
    if (space.tag() != SpaceKind::Tag::kFinite || d.params.size() != space.size()) {
        throw DomainError("permutation '" + d.name + "' must list one image per element");
    }
    std::vector<std::size_t> images;
    std::vector<bool> hit(space.size(), false);
    for (double v : d.params) {
        if (v < 0 || v != std::floor(v) || v >= static_cast<double>(space.size())) {
            throw DomainError("permutation '" + d.name + "' image out of range");
        }
        const auto i = static_cast<std::size_t>(v);
        if (hit[i]) throw DomainError("permutation '" + d.name + "' is not a bijection");
        hit[i] = true;
        images.push_back(i);
    }
    return [space, images](const Point& x) { return Point::element(space, images[x.element()]); };
}

}  // namespace

Map::Map(MapDescriptor descriptor, Evaluator eval) : descriptor_(std::move(descriptor)), eval_(std::move(eval)) {
    if (!eval_) throw DomainError("map '" + descriptor_.name + "' has no evaluator");
}

double quadratic_lift(double a, double b, double t) {
    if (t <= 0.5) return t + a * (0.5 - t) * t;
    return t + b * (1.0 - t) * (t - 0.5);
}

Map make_map(const SpaceKind& space, const MapDescriptor& d) {
    const std::string& f = d.form;
    if (f == "identity") return Map(d, [](const Point& x) { return x; });
    if (f == "affine") return Map(d, affine_eval(space, d));
    if (f == "piecewise") return Map(d, piecewise_eval(space, d));
    if (f == "prepend") return Map(d, prepend_eval(space, d));
    if (f == "circle_lift") return Map(d, lift_eval(space, d, true));
    if (f == "bump") return Map(d, lift_eval(space, d, false));
    if (f == "permutation") return Map(d, permutation_eval(space, d));
    if (f == "word") {
        if (d.parts.empty()) throw DomainError("word map '" + d.name + "' has no letters");
        std::vector<Evaluator> letters;
        for (const auto& part : d.parts) letters.push_back(make_map(space, part).evaluator());
        return Map(d, [letters](const Point& x) {
            Point y = x;
            for (const auto& f : letters) y = f(y);
            return y;
        });
    }
    if (f == "product") {
        if (space.tag() != SpaceKind::Tag::kProduct || d.parts.size() != 2) {
            throw DomainError("product map '" + d.name + "' needs a product space and two factors");
        }
        Evaluator l = make_map(space.left(), d.parts[0]).evaluator();
        Evaluator r = make_map(space.right(), d.parts[1]).evaluator();
        return Map(d, [space, l, r](const Point& x) { return Point::pair(space, l(x.left()), r(x.right())); });
    }
    if (f == "conjugate") {
        if (d.parts.size() != 1) throw DomainError("conjugate map '" + d.name + "' needs one inner map");
        const Homeomorphism h = find_homeomorphism(d.conjugacy, space);
        if (!(h.target == space)) throw DomainError("conjugacy target does not match " + space.describe());
        Evaluator inner = make_map(h.source, d.parts[0]).evaluator();
        return Map(d, [h, inner](const Point& y) { return h.forward(inner(h.inverse(y))); });
    }
    if (f == "custom") throw DomainError("map '" + d.name + "' has a custom evaluator and cannot be rebuilt");
    throw DomainError("unknown map form '" + f + "'");
}

MapDescriptor identity_descriptor(std::string name) { return {std::move(name), "identity", {}, {}, {}}; }

MapDescriptor affine_descriptor(std::string name, double slope, double offset) {
    return {std::move(name), "affine", {slope, offset}, {}, {}};
}

MapDescriptor piecewise_descriptor(std::string name, std::vector<double> knots) {
    return {std::move(name), "piecewise", std::move(knots), {}, {}};
}

MapDescriptor prepend_descriptor(std::string name, int bit) {
    return {std::move(name), "prepend", {static_cast<double>(bit)}, {}, {}};
}

MapDescriptor circle_lift_descriptor(std::string name, double a, double b) {
    return {std::move(name), "circle_lift", {a, b}, {}, {}};
}

MapDescriptor bump_descriptor(std::string name, double a, double b) { return {std::move(name), "bump", {a, b}, {}, {}}; }

MapDescriptor permutation_descriptor(std::string name, const std::vector<std::size_t>& images) {
    MapDescriptor d{std::move(name), "permutation", {}, {}, {}};
    for (auto i : images) d.params.push_back(static_cast<double>(i));
    return d;
}

Homeomorphism find_homeomorphism(std::string_view name, const SpaceKind& space) {
    if (name == "identity") {
        return {"identity", space, space, [](const Point& x) { return x; }, [](const Point& x) { return x; }};
    }
    const SpaceKind unit = SpaceKind::interval(0.0, 1.0);
    if (name == "square" || name == "sqrt") {
        if (!(space == unit)) throw DomainError(std::string(name) + " conjugacy is defined on interval[0,1]");
        Evaluator sq = [unit](const Point& x) { return Point::real_settled(unit, x.coord() * x.coord()); };
        Evaluator rt = [unit](const Point& y) { return Point::real_settled(unit, std::sqrt(y.coord())); };
        if (name == "square") return {"square", unit, unit, sq, rt};
        return {"sqrt", unit, unit, rt, sq};
    }
    throw DomainError("unknown homeomorphism '" + std::string(name) + "'");
}

nlohmann::json to_json(const MapDescriptor& d) {
    nlohmann::json j;
    j["name"] = d.name;
    j["form"] = d.form;
    j["params"] = d.params;
    if (!d.parts.empty()) {
        j["parts"] = nlohmann::json::array();
        for (const auto& p : d.parts) j["parts"].push_back(to_json(p));
    }
    if (!d.conjugacy.empty()) j["conjugacy"] = d.conjugacy;
    return j;
}

MapDescriptor descriptor_from_json(const nlohmann::json& j) {
    MapDescriptor d;
    d.name = j.value("name", std::string());
    d.form = j.at("form").get<std::string>();
    if (j.contains("params")) d.params = j.at("params").get<std::vector<double>>();
    if (j.contains("parts")) {
        for (const auto& p : j.at("parts")) d.parts.push_back(descriptor_from_json(p));
    }
    d.conjugacy = j.value("conjugacy", std::string());
    return d;
}

}  // namespace ifs
