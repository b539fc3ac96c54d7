#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/spaces.hpp"

namespace ifs {

using Evaluator = std::function<Point(const Point&)>;

/// Serializable description of a closed-form map.
///
/// Forms and their parameters:
///   identity     -
///   affine       [slope, offset]               interval (clamped image) or circle (mod 1)
///   piecewise    [x0, y0, x1, y1, ...]          piecewise-linear interpolant on an interval
///   prepend      [bit]                          s -> bit s on a symbol space
///   circle_lift  [a, b]                         quadratic lift on the circle
///   bump         [a, b]                         the same quadratic formula on [0,1]
///   permutation  [p(0), p(1), ...]              bijection of a finite space
///   word         parts = maps, parts[0] applied first
///   product      parts = {left map, right map}
///   conjugate    parts = {map}, conjugacy = homeomorphism name
///   custom       evaluator supplied in code; not reconstructible from JSON
///
/// The quadratic lift is t + a(1/2 - t)t on [0, 1/2] and t + b(1 - t)(t - 1/2)
/// on [1/2, 1]; it fixes 0, 1/2 and 1 and is monotone for |a|, |b| <= 2.
struct MapDescriptor {
    std::string name;
    std::string form;
    std::vector<double> params;
    std::vector<MapDescriptor> parts;
    std::string conjugacy;
};

/// A named continuous self-map with its evaluator.
class Map {
public:
    Map(MapDescriptor descriptor, Evaluator eval);

    const std::string& name() const { return descriptor_.name; }
    const MapDescriptor& descriptor() const { return descriptor_; }
    Point operator()(const Point& x) const { return eval_(x); }
    const Evaluator& evaluator() const { return eval_; }

private:
    MapDescriptor descriptor_;
    Evaluator eval_;
};

/// Builds the evaluator for a descriptor on `space`. Throws DomainError
/// when the form does not fit the space or parameters are out of range.
Map make_map(const SpaceKind& space, const MapDescriptor& descriptor);

MapDescriptor identity_descriptor(std::string name = "id");
MapDescriptor affine_descriptor(std::string name, double slope, double offset);
MapDescriptor piecewise_descriptor(std::string name, std::vector<double> knots);
MapDescriptor prepend_descriptor(std::string name, int bit);
MapDescriptor circle_lift_descriptor(std::string name, double a, double b);
MapDescriptor bump_descriptor(std::string name, double a, double b);
MapDescriptor permutation_descriptor(std::string name, const std::vector<std::size_t>& images);

/// Value of the quadratic lift at t in [0, 1].
double quadratic_lift(double a, double b, double t);

/// Homeomorphism between two spaces with its inverse.
struct Homeomorphism {
    std::string name;
    SpaceKind source;
    SpaceKind target;
    Evaluator forward;
    Evaluator inverse;
};

/// Catalog: "identity" on any space, "square" (t -> t^2) and "sqrt" on [0,1].
Homeomorphism find_homeomorphism(std::string_view name, const SpaceKind& space);

nlohmann::json to_json(const MapDescriptor& d);
MapDescriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace ifs
