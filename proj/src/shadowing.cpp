#include "ifs/shadowing.hpp"

#include <algorithm>
#include <cmath>

#include "ifs/averaging.hpp"
#include "ifs/errors.hpp"
#include "ifs/parallel.hpp"

namespace ifs {

namespace {

ShadowReport finish(Point z, SelectorSequence sigma, std::vector<double> distances, double tol_avg, double tol_sup) {
    ShadowReport r(std::move(z));
    r.selector = std::move(sigma);
    r.distances = std::move(distances);
    r.cesaro_curve = running_average_curve(r.distances);
    r.final_average = r.cesaro_curve.empty() ? 0.0 : r.cesaro_curve.back();
    for (double d : r.distances) r.sup_error = std::max(r.sup_error, d);
    r.tol_avg = tol_avg;
    r.tol_sup = tol_sup;
    r.verdict_avg = r.final_average <= tol_avg;
    r.verdict_sup = r.sup_error <= tol_sup;
    return r;
}

void require_horizon(const PseudoOrbitRecord& rec, std::size_t n) {
    if (n == 0) throw DomainError("shadow horizon must be positive");
    if (n > rec.points.size()) {
        throw LengthError("horizon " + std::to_string(n) + " exceeds the record's " + std::to_string(rec.points.size()) +
                          " points");
    }
}

struct GreedyPath {
    std::vector<MapIndex> labels;
    std::vector<double> distances;
};

GreedyPath greedy_path(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& z, std::size_t n) {
    GreedyPath p;
    p.distances.reserve(n);
    p.labels.reserve(n - 1);
    Point current = z;
    p.distances.push_back(distance(current, rec.points[0]));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Point& target = rec.points[i + 1];
        MapIndex best = 0;
        Point best_image = apply(ifs, 0, current);
        double best_d = distance(best_image, target);
        for (MapIndex l = 1; l < ifs.size(); ++l) {
            Point image = apply(ifs, l, current);
            const double d = distance(image, target);
            if (d < best_d) {
                best = l;
                best_d = d;
                best_image = std::move(image);
            }
        }
        p.labels.push_back(best);
        p.distances.push_back(best_d);
        current = std::move(best_image);
    }
    return p;
}

}  // namespace

ShadowReport shadow_verify(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& z,
                           const SelectorSequence& sigma, std::size_t n, double tol_avg, double tol_sup) {
    require_horizon(rec, n);
    sigma.require(n - 1);
    std::vector<double> distances;
    distances.reserve(n);
    Point y = z;
    distances.push_back(distance(y, rec.points[0]));
    for (std::size_t i = 1; i < n; ++i) {
        y = apply(ifs, sigma[i - 1], y);
        distances.push_back(distance(y, rec.points[i]));
    }
    return finish(z, sigma.prefix(n - 1), std::move(distances), tol_avg, tol_sup);
}

double contracting_shadow_bound(double beta, double m, const std::vector<double>& alphas, std::size_t n) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("contraction ratio must lie in (0, 1)");
    if (!(m >= 0.0)) throw DomainError("initial gap must be nonnegative");
    if (n == 0) throw DomainError("bound needs n >= 1");
    if (alphas.size() + 1 < n) throw LengthError("error series shorter than n - 1");
    double sum = m;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += alphas[i];
    return sum / (1.0 - beta) / static_cast<double>(n);
}

std::vector<double> pointwise_shadow_bounds(double beta, double m, const std::vector<double>& alphas, std::size_t n) {
    if (n == 0) return {};
    if (alphas.size() + 1 < n) throw LengthError("error series shorter than n - 1");
    std::vector<double> b(n);
    b[0] = m;
    for (std::size_t i = 1; i < n; ++i) b[i] = alphas[i - 1] + beta * b[i - 1];
    return b;
}

ShadowReport contracting_shadow(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& y0, std::size_t n,
                                double tol_avg) {
    const auto beta = ifs.claimed_contraction();
    if (!beta) throw ContractionError("system has no claimed contraction ratio");
    if (!claimed_contraction_holds(ifs)) {
        throw ContractionError("sampled contraction ratio exceeds the claimed " + std::to_string(*beta));
    }
    if (n == 0) n = rec.points.size();
    ShadowReport r = shadow_verify(ifs, rec, y0, rec.selector, n, tol_avg, 0.0);
    const double m = distance(y0, rec.points[0]);
    r.bound = contracting_shadow_bound(*beta, m, rec.errors, n);
    const auto b = pointwise_shadow_bounds(*beta, m, rec.errors, n);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = r.distances[i] <= b[i] + 1e-9;
    r.pointwise_holds = ok;
    r.tol_sup = *std::max_element(b.begin(), b.end()) + 1e-9;
    r.verdict_sup = r.sup_error <= r.tol_sup;
    return r;
}

ShadowReport greedy_shadow(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const Point& z, std::size_t n,
                           double tol_avg, double tol_sup) {
    require_horizon(rec, n);
    GreedyPath p = greedy_path(ifs, rec, z, n);
    return finish(z, SelectorSequence::explicit_entries(std::move(p.labels)), std::move(p.distances), tol_avg, tol_sup);
}

GreedySearchResult greedy_search(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const std::vector<Point>& grid,
                                 std::size_t n, double tol_avg, double tol_sup, int threads) {
    if (grid.empty()) throw DomainError("shadow search needs a nonempty start grid");
    require_horizon(rec, n);
    std::vector<double> averages(grid.size());
    std::vector<double> sups(grid.size());
    parallel_for(grid.size(), static_cast<unsigned>(std::max(threads, 0)), [&](std::size_t g) {
        const GreedyPath p = greedy_path(ifs, rec, grid[g], n);
        averages[g] = cesaro_average(p.distances, n);
        sups[g] = *std::max_element(p.distances.begin(), p.distances.end());
    });
    const auto avg_it = std::min_element(averages.begin(), averages.end());
    const auto sup_it = std::min_element(sups.begin(), sups.end());
    const auto ai = static_cast<std::size_t>(avg_it - averages.begin());
    const auto si = static_cast<std::size_t>(sup_it - sups.begin());
    return {greedy_shadow(ifs, rec, grid[ai], n, tol_avg, tol_sup), ai,
            greedy_shadow(ifs, rec, grid[si], n, tol_avg, tol_sup), si};
}

ShadowReport greedy_shadow_search(const IFSSpec& ifs, const PseudoOrbitRecord& rec, const std::vector<Point>& grid,
                                  std::size_t n, double tol_avg, double tol_sup, int threads) {
    return greedy_search(ifs, rec, grid, n, tol_avg, tol_sup, threads).best_average;
}

FiniteShadowingResult finite_shadowing_check(const IFSSpec& ifs, const PseudoOrbitRecord& rec, double epsilon,
                                             const std::vector<Point>& grid, std::size_t n, int threads) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    GreedySearchResult s = greedy_search(ifs, rec, grid, n, 1e-2, epsilon, threads);
    FiniteShadowingResult r{false, epsilon, s.best_sup.sup_error, std::move(s.best_sup)};
    r.found = r.infimum <= epsilon;
    return r;
}

nlohmann::json to_json(const ShadowReport& r, bool with_curves) {
    nlohmann::json j{{"candidate", to_json(r.candidate)},
                     {"selector", to_json(r.selector)},
                     {"sup_error", r.sup_error},
                     {"final_average", r.final_average},
                     {"bound", r.bound ? nlohmann::json(*r.bound) : nlohmann::json()},
                     {"tol_avg", r.tol_avg},
                     {"tol_sup", r.tol_sup},
                     {"verdict_avg", r.verdict_avg},
                     {"verdict_sup", r.verdict_sup}};
    if (r.pointwise_holds) j["pointwise_holds"] = *r.pointwise_holds;
    if (with_curves) {
        j["distances"] = r.distances;
        j["cesaro_curve"] = r.cesaro_curve;
    }
    return j;
}

nlohmann::json to_json(const FiniteShadowingResult& r, bool with_curves) {
    return {{"found", r.found},
            {"epsilon", r.epsilon},
            {"infimum", r.infimum},
            {"witness", to_json(r.witness, with_curves)}};
}

}  // namespace ifs
