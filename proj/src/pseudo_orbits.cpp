#include "ifs/pseudo_orbits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "ifs/averaging.hpp"
#include "ifs/errors.hpp"
#include "ifs/random.hpp"

namespace ifs {

std::vector<double> step_errors(const IFSSpec& ifs, const std::vector<Point>& points, const SelectorSequence& selector) {
    if (points.empty()) throw DomainError("a record needs at least one point");
    const std::size_t steps = points.size() - 1;
    selector.require(steps);
    std::vector<double> errors(steps);
    for (std::size_t i = 0; i < steps; ++i) errors[i] = distance(apply(ifs, selector[i], points[i]), points[i + 1]);
    return errors;
}

PseudoOrbitRecord make_record(const IFSSpec& ifs, std::vector<Point> points, const SelectorSequence& selector) {
    PseudoOrbitRecord rec;
    rec.errors = step_errors(ifs, points, selector);
    rec.selector = selector.prefix(rec.errors.size());
    rec.points = std::move(points);
    return rec;
}

DeltaReport validate_delta_pseudo_orbit(const PseudoOrbitRecord& rec, double delta) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    DeltaReport r;
    for (std::size_t i = 0; i < rec.errors.size(); ++i) {
        if (rec.errors[i] > r.worst_error) {
            r.worst_error = rec.errors[i];
            r.worst_index = i;
        }
    }
    r.verdict = r.worst_error < delta;
    return r;
}

AapoReport validate_aapo(const PseudoOrbitRecord& rec, std::size_t n, double tol) {
    if (n > rec.horizon()) {
        throw LengthError("horizon " + std::to_string(n) + " exceeds record length " + std::to_string(rec.horizon()));
    }
    AapoReport r;
    r.horizon = n;
    r.tolerance = tol;
    r.curve = running_average_curve(std::vector<double>(rec.errors.begin(), rec.errors.begin() + static_cast<std::ptrdiff_t>(n)));
    r.final_average = r.curve.empty() ? 0.0 : r.curve.back();
    r.verdict = r.final_average <= tol;
    return r;
}

std::vector<double> harmonic_schedule(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 / static_cast<double>(i + 1);
    return s;
}

std::vector<double> constant_schedule(std::size_t n, double value) { return std::vector<double>(n, value); }

std::vector<double> symbolic_schedule(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int depth = static_cast<int>(std::bit_width(i));  // ceil(log2(i+1))
        s[i] = std::ldexp(1.0, 1 - depth);
    }
    return s;
}

PseudoOrbitRecord perturbed_orbit(const IFSSpec& ifs, const SelectorSequence& selector, const Point& x0,
                                  const std::vector<double>& noise_schedule, std::uint64_t seed) {
    const std::size_t n = noise_schedule.size();
    selector.require(n);
    const double diam = diameter(ifs.space());
    for (double r : noise_schedule) {
        if (!(r >= 0.0) || r > diam) throw DomainError("noise schedule values must lie in [0, diameter]");
    }
    Rng rng(seed);
    std::vector<Point> points;
    points.reserve(n + 1);
    points.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        const Point image = apply(ifs, selector[i], points.back());
        points.push_back(noise_schedule[i] > 0.0 ? displace(image, noise_schedule[i], rng) : image);
    }
    return make_record(ifs, std::move(points), selector);
}

bool is_dyadic_seam(std::size_t i) {
    if (i == 0) return true;
    const std::size_t j = i + 1;
    if (std::has_single_bit(j)) return true;  // 2^{k+1} - 1
    // 2^k + 2^{k-1} - 1: j has exactly two adjacent top bits
    return std::popcount(j) == 2 && (j & (j >> 1)) != 0;
}

std::vector<std::size_t> dyadic_seams(std::size_t n) {
    std::vector<std::size_t> out;
    if (n > 0) out.push_back(0);
    for (int k = 0; k < 63; ++k) {
        const std::size_t p = std::size_t{1} << k;
        if (k >= 1 && p + p / 2 - 1 < n) out.push_back(p + p / 2 - 1);
        if (2 * p - 1 < n) out.push_back(2 * p - 1);
        if (p >= n) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PseudoOrbitRecord dyadic_block_sequence(const IFSSpec& ifs, MapIndex g, const Point& x, const Point& y,
                                        const std::vector<Point>& backward_branch, int depth) {
    if (depth < 1 || depth > 26) throw DomainError("dyadic depth must lie in 1..26");
    if (!ifs.surjective(g)) throw DomainError("map '" + ifs.map(g).name() + "' is not flagged surjective");
    const std::size_t half_max = std::size_t{1} << (depth - 1);
    if (backward_branch.size() < half_max) {
        throw LengthError("backward branch has " + std::to_string(backward_branch.size()) + " points, " +
                          std::to_string(half_max) + " needed");
    }
    constexpr double tol = 1e-9;
    if (distance(backward_branch.back(), y) > tol) throw DomainError("backward branch does not end at y");
    for (std::size_t j = 0; j + 1 < backward_branch.size(); ++j) {
        if (distance(apply(ifs, g, backward_branch[j]), backward_branch[j + 1]) > tol) {
            throw DomainError("backward branch fails g(y_{-j}) = y_{-j+1} at position " + std::to_string(j));
        }
    }

    // forward orbit x, g(x), ... shared by every block
    std::vector<Point> forward;
    forward.reserve(half_max);
    forward.push_back(x);
    while (forward.size() < half_max) forward.push_back(apply(ifs, g, forward.back()));

    const std::size_t total = std::size_t{1} << (depth + 1);
    std::vector<Point> points;
    points.reserve(total);
    points.push_back(x);
    points.push_back(y);
    const std::size_t last = backward_branch.size() - 1;
    for (int k = 1; k <= depth; ++k) {
        const std::size_t half = std::size_t{1} << (k - 1);
        for (std::size_t j = 0; j < half; ++j) points.push_back(forward[j]);
        for (std::size_t j = 0; j < half; ++j) points.push_back(backward_branch[last - (half - 1) + j]);
    }
    return make_record(ifs, std::move(points), SelectorSequence::constant(g, total - 1));
}

PseudoOrbitRecord stride_subsample(const IFSSpec& base, const IFSSpec& power, const PseudoOrbitRecord& rec, int k) {
    if (k < 2) throw DomainError("stride needs k >= 2");
    const auto kk = static_cast<std::size_t>(k);
    if (rec.horizon() % kk != 0) {
        throw DomainError("record length " + std::to_string(rec.horizon()) + " is not a multiple of " + std::to_string(k));
    }
    std::size_t expected = 1;
    for (int i = 0; i < k; ++i) expected *= base.size();
    if (power.size() != expected) throw DomainError("power system does not match base^k");
    std::vector<Point> points;
    points.reserve(rec.horizon() / kk + 1);
    for (std::size_t i = 0; i < rec.points.size(); i += kk) points.push_back(rec.points[i]);
    return make_record(power, std::move(points), word_selector(rec.selector.prefix(rec.horizon()), k, base.size()));
}

nlohmann::json to_json(const PseudoOrbitRecord& rec) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Point& p : rec.points) pts.push_back(to_json(p));
    return {{"points", pts}, {"selector", to_json(rec.selector)}, {"errors", rec.errors}};
}

PseudoOrbitRecord record_from_json(const nlohmann::json& j, const IFSSpec& ifs) {
    std::vector<Point> points;
    for (const auto& p : j.at("points")) points.push_back(point_from_json(p, ifs.space()));
    PseudoOrbitRecord rec = make_record(ifs, std::move(points), selector_from_json(j.at("selector")));
    if (j.contains("errors")) {
        const auto stored = j.at("errors").get<std::vector<double>>();
        if (stored.size() != rec.errors.size()) throw DomainError("stored error series has the wrong length");
        for (std::size_t i = 0; i < stored.size(); ++i) {
            if (std::abs(stored[i] - rec.errors[i]) > 1e-12) {
                throw DomainError("stored error at step " + std::to_string(i) + " does not match the points");
            }
        }
    }
    return rec;
}

void write_record_csv(std::ostream& os, const PseudoOrbitRecord& rec) {
    const std::size_t leaves = rec.points.empty() ? 1 : rec.points.front().kind().leaves();
    os << "index";
    if (leaves == 1) {
        os << ",x";
    } else {
        for (std::size_t l = 0; l < leaves; ++l) os << ",x" << l;
    }
    os << ",lambda,alpha\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        os << i;
        for (const auto& f : point_fields(rec.points[i])) os << ',' << f;
        if (i < rec.errors.size()) {
            os << ',' << rec.selector[i] << ',' << rec.errors[i] << '\n';
        } else {
            os << ",,\n";
        }
    }
    os.precision(old);
}

nlohmann::json to_json(const DeltaReport& r) {
    return {{"verdict", r.verdict}, {"worst_index", r.worst_index}, {"worst_error", r.worst_error}};
}

nlohmann::json to_json(const AapoReport& r, bool with_curve) {
    nlohmann::json j{{"horizon", r.horizon}, {"final_average", r.final_average}, {"tolerance", r.tolerance},
                     {"verdict", r.verdict}};
    if (with_curve) j["curve"] = r.curve;
    return j;
}

}  // namespace ifs
