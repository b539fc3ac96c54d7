#include "ifs/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ifs/errors.hpp"
#include "ifs/parallel.hpp"

namespace ifs {

namespace {

// Neumaier-compensated running sum; the curve and the single average share it
// so final averages match the last curve entry exactly.
struct Accumulator {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

// Least m such that count(n) * 2^k < n for every n in (m, T].
std::size_t level_cut(const std::vector<double>& a, int k) {
    const double theta = std::ldexp(1.0, -k);
    const std::size_t t = a.size();
    std::size_t count = 0;
    for (double v : a) count += v > theta ? 1 : 0;
    // count now holds count(T); walk n downward keeping count(n)
    for (std::size_t n = t; n >= 1; --n) {
        if ((static_cast<unsigned __int128>(count) << k) >= n) return n;
        if (a[n - 1] > theta) --count;
    }
    return 0;
}

}  // namespace

Series::Series(std::vector<double> values) : values_(std::move(values)) {
    double b = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("series values must be finite and nonnegative");
        b = std::max(b, v);
    }
    bound_ = b > 0.0 ? b : 1.0;
}

Series::Series(std::vector<double> values, double bound) : values_(std::move(values)), bound_(bound) {
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw DomainError("series bound must be positive and finite");
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("series values must be finite and nonnegative");
        if (v > bound_) throw DomainError("series value exceeds the declared bound");
    }
}

IndexSet::IndexSet(std::vector<std::size_t> indices, std::size_t horizon)
    : indices_(std::move(indices)), horizon_(horizon) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.back() >= horizon_) throw DomainError("index set entry beyond horizon");
}

IndexSet IndexSet::range(std::size_t begin, std::size_t end, std::size_t horizon) {
    std::vector<std::size_t> v;
    for (std::size_t i = begin; i < end; ++i) v.push_back(i);
    return IndexSet(std::move(v), horizon);
}

bool IndexSet::contains(std::size_t i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

std::size_t IndexSet::count_below(std::size_t n) const {
    return static_cast<std::size_t>(std::lower_bound(indices_.begin(), indices_.end(), n) - indices_.begin());
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    std::vector<std::size_t> out;
    std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                   std::back_inserter(out));
    return IndexSet(std::move(out), std::max(a.horizon(), b.horizon()));
}

IndexSet block_saturation(const IndexSet& j, std::size_t k) {
    if (k == 0) throw DomainError("block size must be positive");
    std::vector<std::size_t> out;
    std::size_t last_block = static_cast<std::size_t>(-1);
    for (std::size_t i : j.indices()) {
        const std::size_t block = i / k;
        if (block == last_block) continue;
        last_block = block;
        for (std::size_t m = block * k; m < std::min(block * k + k, j.horizon()); ++m) out.push_back(m);
    }
    return IndexSet(std::move(out), j.horizon());
}

double cesaro_average(const std::vector<double>& values, std::size_t n) {
    if (n == 0) throw DomainError("Cesàro average needs n >= 1");
    if (n > values.size()) throw DomainError("Cesàro prefix exceeds the series horizon");
    Accumulator acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(values[i]);
    return acc.value() / static_cast<double>(n);
}

double cesaro_average(const Series& s, std::size_t n) { return cesaro_average(s.values(), n); }

std::vector<double> running_average_curve(const std::vector<double>& values) {
    std::vector<double> curve;
    curve.reserve(values.size());
    Accumulator acc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc.add(values[i]);
        curve.push_back(acc.value() / static_cast<double>(i + 1));
    }
    return curve;
}

double density(const IndexSet& j, std::size_t n) {
    if (n == 0) throw DomainError("density needs n >= 1");
    return static_cast<double>(j.count_below(n)) / static_cast<double>(n);
}

NullDensityExtraction extract_null_density_set(const Series& s, int threads) {
    NullDensityExtraction out;
    const std::size_t t = s.horizon();
    if (t == 0) return out;
    const auto& a = s.values();
    const double avg = cesaro_average(s, t);
    if (avg > 0.0 && avg >= s.bound() / 2.0) {
        out.no_decay = true;
        out.set = IndexSet::range(0, t, t);
        out.density = 1.0;
        return out;
    }

    std::vector<std::size_t> cuts(kMaxDensityLevel);
    parallel_for(cuts.size(), static_cast<unsigned>(std::max(threads, 0)),
                 [&](std::size_t i) { cuts[i] = level_cut(a, static_cast<int>(i) + 1); });
    for (std::size_t i = 1; i < cuts.size(); ++i) cuts[i] = std::max(cuts[i], cuts[i - 1]);
    const auto full = std::find(cuts.begin(), cuts.end(), t);
    if (full != cuts.end()) cuts.erase(full + 1, cuts.end());

    std::vector<std::size_t> members;
    for (std::size_t level = 0; level < cuts.size(); ++level) {
        const double theta = std::ldexp(1.0, -static_cast<int>(level + 1));
        const std::size_t end = level + 1 < cuts.size() ? cuts[level + 1] : t;
        for (std::size_t i = cuts[level]; i < end; ++i) {
            if (a[i] > theta) members.push_back(i);
        }
    }
    out.set = IndexSet(std::move(members), t);
    out.cuts = std::move(cuts);
    out.density = density(out.set, t);
    for (std::size_t i = t / 2; i < t; ++i) {
        if (!out.set.contains(i)) out.tail_max = std::max(out.tail_max, a[i]);
    }
    return out;
}

NullDensityReport verify_null_density_implies_average(const Series& s, const IndexSet& j, double tol) {
    NullDensityReport r;
    const std::size_t t = s.horizon();
    r.tolerance = tol;
    if (t == 0) {
        r.verdict = true;
        r.bound = tol;
        return r;
    }
    r.average = cesaro_average(s, t);
    r.density = density(j, t);
    for (std::size_t i = 0; i < t; ++i) {
        if (j.contains(i)) continue;
        r.off_set_max = std::max(r.off_set_max, s[i]);
        if (i >= t / 2) r.tail_max = std::max(r.tail_max, s[i]);
    }
    r.bound = r.density * s.bound() + r.off_set_max + tol;
    r.verdict = r.average <= r.bound;
    return r;
}

nlohmann::json to_json(const IndexSet& j) { return j.indices(); }

nlohmann::json to_json(const NullDensityExtraction& e) {
    return {{"set", to_json(e.set)},   {"horizon", e.set.horizon()}, {"no_decay", e.no_decay},
            {"cuts", e.cuts},          {"density", e.density},       {"tail_max", e.tail_max}};
}

nlohmann::json to_json(const NullDensityReport& r) {
    return {{"average", r.average},   {"density", r.density}, {"off_set_max", r.off_set_max},
            {"tail_max", r.tail_max}, {"tolerance", r.tolerance}, {"bound", r.bound},
            {"verdict", r.verdict}};
}

void write_series_csv(std::ostream& os, const std::vector<double>& values, std::size_t first_index,
                      const std::string& index_name, const std::string& value_name) {
    os << index_name << ',' << value_name << '\n';
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) os << first_index + i << ',' << values[i] << '\n';
    os.precision(old);
}

}  // namespace ifs
