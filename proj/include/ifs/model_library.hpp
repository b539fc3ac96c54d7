#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ifs/ifs_core.hpp"

namespace ifs {

/// Catalog entry with its parameters.
///
/// Text forms: "binary_affine", "sigma2_prepend", "sigma2_prepend:32",
/// "circle_pair", "interval_pair", "finite_permutations:3",
/// "affine_family:0.5@0,0.5@0.5" (slope@offset pairs), "identity".
struct ModelId {
    std::string name;
    std::size_t n = 0;
    int depth = kMaxSymbolDepth;
    std::vector<double> betas;
    std::vector<double> offsets;

    std::string to_string() const;
};

/// Throws DomainError for unknown names and guard violations.
ModelId parse_model_id(std::string_view text);

IFSSpec make_system(const ModelId& id);
inline IFSSpec make_system(std::string_view text) { return make_system(parse_model_id(text)); }

struct ModelInfo {
    std::string name;
    std::string example;
    std::string description;
};

const std::vector<ModelInfo>& model_catalog();

/// y_{-m}, ..., y_{-1}, y with f_g(y_{-j}) = y_{-j+1} checked to 1e-12.
///
/// Affine maps invert in closed form, quadratic lifts by bisection on the
/// monotone lift, prepend maps by stripping the leading symbol, permutations
/// by the inverse permutation. Throws DomainError when a preimage leaves the
/// space or does not exist.
std::vector<Point> backward_branch(const IFSSpec& ifs, MapIndex g, const Point& y, std::size_t m);
std::vector<Point> backward_branch(const ModelId& id, MapIndex g, const Point& y, std::size_t m);

/// Preimage of t under the quadratic lift with parameters (a, b), t in [0, 1].
double quadratic_lift_inverse(double a, double b, double t);

}  // namespace ifs
