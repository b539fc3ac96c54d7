#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/ifs_core.hpp"

namespace ifs {

/// Points x_0..x_T, selector lambda_0..lambda_{T-1} and step errors
/// alpha_i = d(f_{lambda_i}(x_i), x_{i+1}).
struct PseudoOrbitRecord {
    std::vector<Point> points;
    SelectorSequence selector;
    std::vector<double> errors;

    std::size_t horizon() const { return errors.size(); }
};

/// Builds a record and computes its errors. Needs points.size() == steps + 1
/// and a selector with at least `steps` entries.
PseudoOrbitRecord make_record(const IFSSpec& ifs, std::vector<Point> points, const SelectorSequence& selector);

std::vector<double> step_errors(const IFSSpec& ifs, const std::vector<Point>& points, const SelectorSequence& selector);

struct DeltaReport {
    bool verdict = true;
    std::size_t worst_index = 0;
    double worst_error = 0.0;
};

/// True iff every error is < delta. Throws DomainError for delta <= 0.
DeltaReport validate_delta_pseudo_orbit(const PseudoOrbitRecord& rec, double delta);

struct AapoReport {
    std::size_t horizon = 0;
    double final_average = 0.0;
    std::vector<double> curve;
    double tolerance = 0.0;
    bool verdict = false;
};

/// Cesàro average of the first n errors against tol. Throws LengthError for n > T.
AapoReport validate_aapo(const PseudoOrbitRecord& rec, std::size_t n, double tol);

/// alpha_i = 1/(i+1).
std::vector<double> harmonic_schedule(std::size_t n);
std::vector<double> constant_schedule(std::size_t n, double value);
/// 2^{1 - ceil(log2(i+1))}: a flip at symbol depth ceil(log2(i+1)) under the
/// 1/2^{k-1} metric.
std::vector<double> symbolic_schedule(std::size_t n);

/// Orbit with each image displaced by noise_schedule[i] in a seeded random
/// direction. Interval edges clip the step, which then records the smaller
/// realized error. Throws DomainError for schedule values above the diameter.
PseudoOrbitRecord perturbed_orbit(const IFSSpec& ifs, const SelectorSequence& selector, const Point& x0,
                                  const std::vector<double>& noise_schedule, std::uint64_t seed);

/// The dyadic block sequence on 2^{K+1} points.
///
/// t_0 = x and t_1 = y; block k >= 1 fills [2^k, 2^{k+1}) with
/// x, g(x), ..., g^{2^{k-1}-1}(x) followed by y_{-2^{k-1}+1}, ..., y_{-1}, y.
/// `backward_branch` lists y_{-m}, ..., y_{-1}, y with g(y_{-j}) = y_{-j+1}
/// (checked to 1e-9) and m + 1 >= 2^{K-1}. Map g must be flagged surjective.
PseudoOrbitRecord dyadic_block_sequence(const IFSSpec& ifs, MapIndex g, const Point& x, const Point& y,
                                        const std::vector<Point>& backward_branch, int depth);

/// Step indices below n where the dyadic block sequence may jump:
/// 0, 2^{k+1} - 1 for k >= 0, and 2^k + 2^{k-1} - 1 for k >= 1.
std::vector<std::size_t> dyadic_seams(std::size_t n);
bool is_dyadic_seam(std::size_t i);

/// Points x_0, x_k, x_2k, ... with the k-block word selector over `power`
/// (which must be power_ifs(base, k)); errors recomputed under `power`.
/// Throws DomainError when the horizon is not a multiple of k.
PseudoOrbitRecord stride_subsample(const IFSSpec& base, const IFSSpec& power, const PseudoOrbitRecord& rec, int k);

/// {"points": [...], "selector": {...}, "errors": [...]}
nlohmann::json to_json(const PseudoOrbitRecord& rec);
/// Recomputes errors; stored errors that differ by more than 1e-12 are rejected.
PseudoOrbitRecord record_from_json(const nlohmann::json& j, const IFSSpec& ifs);

/// CSV with columns index, coordinate leaves, lambda, alpha (the last row
/// leaves lambda and alpha empty).
void write_record_csv(std::ostream& os, const PseudoOrbitRecord& rec);

nlohmann::json to_json(const DeltaReport& r);
nlohmann::json to_json(const AapoReport& r, bool with_curve = false);

}  // namespace ifs
