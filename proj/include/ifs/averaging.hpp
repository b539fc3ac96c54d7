#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ifs {

/// Bounded nonnegative sequence a_0, ..., a_{T-1}.
class Series {
public:
    Series() = default;
    /// Bound defaults to the largest value (1 for an all-zero series).
    explicit Series(std::vector<double> values);
    /// Throws DomainError for a negative, non-finite or over-bound value.
    Series(std::vector<double> values, double bound);

    const std::vector<double>& values() const { return values_; }
    double bound() const { return bound_; }
    std::size_t horizon() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
    double bound_ = 1.0;
};

/// Strictly increasing indices below a horizon.
class IndexSet {
public:
    IndexSet() = default;
    /// Sorts and deduplicates; throws DomainError for an index >= horizon.
    IndexSet(std::vector<std::size_t> indices, std::size_t horizon);

    static IndexSet range(std::size_t begin, std::size_t end, std::size_t horizon);

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t horizon() const { return horizon_; }
    std::size_t size() const { return indices_.size(); }
    bool contains(std::size_t i) const;
    /// |J ∩ [0, n)|.
    std::size_t count_below(std::size_t n) const;

private:
    std::vector<std::size_t> indices_;
    std::size_t horizon_ = 0;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);

/// All k-blocks {jk, ..., jk+k-1} that meet J, clipped to the horizon.
IndexSet block_saturation(const IndexSet& j, std::size_t k);

/// (1/n) sum_{i<n} a_i. Throws DomainError for n = 0 or n > horizon.
double cesaro_average(const Series& s, std::size_t n);
double cesaro_average(const std::vector<double>& values, std::size_t n);

/// c_n = cesaro_average(s, n) for n = 1..T.
std::vector<double> running_average_curve(const std::vector<double>& values);
inline std::vector<double> running_average_curve(const Series& s) { return running_average_curve(s.values()); }

/// |J ∩ [0,n)| / n. Throws DomainError for n = 0.
double density(const IndexSet& j, std::size_t n);

struct NullDensityExtraction {
    IndexSet set;
    bool no_decay = false;
    /// N_1, N_2, ... for the thresholds 2^-1, 2^-2, ... (nondecreasing).
    std::vector<std::size_t> cuts;
    double density = 0.0;
    /// max{a_j : j not in J, j >= T/2}; 0 when no such j.
    double tail_max = 0.0;
};

/// Level-set construction of a density-zero set off which the series is small.
///
/// With theta_k = 2^-k, N_k is the least m such that the running average of
/// the indicator {a_i > theta_k} stays below 2^-k on every prefix length in
/// (m, T]. J collects the indices i in [N_k, N_{k+1}) with a_i > theta_k.
/// When the Cesàro average at T is at least B/2 the whole prefix is returned
/// with `no_decay` set.
NullDensityExtraction extract_null_density_set(const Series& s, int threads = 0);

/// Largest threshold exponent used by the extraction.
inline constexpr int kMaxDensityLevel = 60;

struct NullDensityReport {
    double average = 0.0;
    double density = 0.0;
    /// max{a_j : j not in J} over the whole horizon.
    double off_set_max = 0.0;
    /// max{a_j : j not in J, j >= T/2}.
    double tail_max = 0.0;
    double tolerance = 0.0;
    /// density * B + off_set_max + tolerance.
    double bound = 0.0;
    bool verdict = false;
};

/// Checks average(T) <= density(J,T) * B + max{a_j : j not in J} + tol.
NullDensityReport verify_null_density_implies_average(const Series& s, const IndexSet& j, double tol);

nlohmann::json to_json(const IndexSet& j);
nlohmann::json to_json(const NullDensityExtraction& e);
nlohmann::json to_json(const NullDensityReport& r);

/// CSV with columns (index, value); indices start at `first_index`.
void write_series_csv(std::ostream& os, const std::vector<double>& values, std::size_t first_index = 0,
                      const std::string& index_name = "index", const std::string& value_name = "value");

}  // namespace ifs
