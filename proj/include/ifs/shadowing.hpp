#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/ifs_core.hpp"
#include "ifs/pseudo_orbits.hpp"

namespace ifs {

/// Distances d_i = d(F_{sigma_i}(z), x_i) between a candidate orbit and a record.
struct ShadowReport {
    explicit ShadowReport(Point z) : candidate(std::move(z)) {}

    Point candidate;
    SelectorSequence selector;
    std::vector<double> distances;
    std::vector<double> cesaro_curve;
    double sup_error = 0.0;
    double final_average = 0.0;
    std::optional<double> bound;
    double tol_avg = 1e-2;
    double tol_sup = 0.0;
    bool verdict_avg = false;
    bool verdict_sup = false;
    /// Contracting case only: every d_i stays within the inductive bound + 1e-9.
    std::optional<bool> pointwise_holds;
};

/// Compares the orbit of z under sigma with the first n record points.
/// Needs n <= record points and sigma with at least n - 1 entries (LengthError otherwise).
ShadowReport shadow_verify(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& z,
                           const SelectorSequence& sigma, std::size_t n, double tol_avg = 1e-2, double tol_sup = 0.0);

/// (1/n) (1/(1-beta)) (M + sum_{i<=n-2} alpha_i). Throws DomainError unless
/// 0 < beta < 1, M >= 0 and n >= 1.
double contracting_shadow_bound(double beta, double m, const std::vector<double>& alphas, std::size_t n);

/// b_0 = M, b_i = alpha_{i-1} + beta b_{i-1} for i < n.
std::vector<double> pointwise_shadow_bounds(double beta, double m, const std::vector<double>& alphas, std::size_t n);

/// Shadows with the record's own selector from y0 and attaches the bound.
/// The claimed ratio must exist and survive sampling (ContractionError otherwise).
/// n defaults to the number of record points.
ShadowReport contracting_shadow(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& y0,
                                std::size_t n = 0, double tol_avg = 1e-2);

/// Greedy orbit from z: at each step the map landing closest to the next
/// record point, ties to the lowest index.
ShadowReport greedy_shadow(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& z, std::size_t n,
                           double tol_avg = 1e-2, double tol_sup = 0.0);

struct GreedySearchResult {
    /// Lowest final average over the grid (first grid point on ties).
    ShadowReport best_average;
    std::size_t best_average_index = 0;
    /// Lowest sup error over the grid (first grid point on ties).
    ShadowReport best_sup;
    std::size_t best_sup_index = 0;
};

/// Runs greedy_shadow from every grid start. Throws DomainError for an empty grid.
GreedySearchResult greedy_search(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const std::vector<Point>& grid,
                                 std::size_t n, double tol_avg = 1e-2, double tol_sup = 0.0, int threads = 0);

/// Best report by final average.
ShadowReport greedy_shadow_search(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const std::vector<Point>& grid,
                                  std::size_t n, double tol_avg = 1e-2, double tol_sup = 0.0, int threads = 0);

struct FiniteShadowingResult {
    /// An orbit staying within epsilon was found. False means "not found".
    bool found = false;
    double epsilon = 0.0;
    /// Smallest sup error attained over the grid.
    double infimum = 0.0;
    ShadowReport witness;
};

FiniteShadowingResult finite_shadowing_check(const IFSSpec& ifs, const PseudoOrbitRecord& rec, double epsilon,
                                             const std::vector<Point>& grid, std::size_t n, int threads = 0);

nlohmann::json to_json(const ShadowReport& r, bool with_curves = false);
nlohmann::json to_json(const FiniteShadowingResult& r, bool with_curves = false);

}  // namespace ifs
