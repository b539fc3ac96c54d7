#include "ifs/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "ifs/averaging.hpp"
#include "ifs/chains.hpp"
#include "ifs/errors.hpp"
#include "ifs/model_library.hpp"
#include "ifs/pseudo_orbits.hpp"
#include "ifs/random.hpp"
#include "ifs/shadowing.hpp"

namespace ifs {

namespace fs = std::filesystem;

namespace {

struct Context {
    nlohmann::json p;
    fs::path dir;
    int threads = 0;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;

    std::uint64_t seed() const { return p.at("seed").get<std::uint64_t>(); }
    double num(const char* key) const { return p.at(key).get<double>(); }
    std::size_t count(const char* key) const { return p.at(key).get<std::size_t>(); }

    std::ofstream open(const std::string& file) {
        const fs::path path = dir / file;
        std::ofstream os(path);
        if (!os) throw DomainError("cannot write " + path.string());
        artifacts.push_back(path.string());
        return os;
    }
};

using Procedure = std::function<bool(Context&)>;

double flag(bool b) { return b ? 1.0 : 0.0; }

void write_curve(Context& ctx, const std::string& file, const std::vector<double>& curve, std::size_t stride) {
    auto os = ctx.open(file);
    os << "n,average\n";
    os.precision(17);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if ((i + 1) % stride == 0 || i + 1 == curve.size()) os << i + 1 << ',' << curve[i] << '\n';
    }
}

// Contracting shadow average against its analytic bound on two systems.
bool contracting_bound(Context& ctx) {
    const std::size_t n = ctx.count("n");
    const std::uint64_t seed = ctx.seed();

    const IFSSpec affine = make_system("binary_affine");
    const SelectorSequence sel = SelectorSequence::random(seed, 2, n);
    const auto rec = perturbed_orbit(affine, sel, Point::real(affine.space(), ctx.num("x0")), harmonic_schedule(n), seed + 1);
    const auto rep = contracting_shadow(affine, rec, Point::real(affine.space(), ctx.num("y0")), n);
    ctx.metrics["affine_final_average"] = rep.final_average;
    ctx.metrics["affine_bound"] = *rep.bound;
    ctx.metrics["affine_ratio"] = rep.final_average / *rep.bound;
    ctx.metrics["affine_pointwise"] = flag(*rep.pointwise_holds);
    write_curve(ctx, "affine_curve.csv", rep.cesaro_curve, ctx.count("curve_stride"));

    const IFSSpec symbols = make_system("sigma2_prepend");
    const Point ones = Point::symbols(symbols.space(), symbol_mask(symbols.space().depth()));
    const auto srec = perturbed_orbit(symbols, sel, ones, symbolic_schedule(n), seed + 2);
    const auto srep = contracting_shadow(symbols, srec, Point::symbols(symbols.space(), std::uint64_t{0}), n);
    ctx.metrics["symbols_final_average"] = srep.final_average;
    ctx.metrics["symbols_bound"] = *srep.bound;
    ctx.metrics["symbols_ratio"] = srep.final_average / *srep.bound;
    ctx.metrics["symbols_pointwise"] = flag(*srep.pointwise_holds);
    write_curve(ctx, "symbols_curve.csv", srep.cesaro_curve, ctx.count("curve_stride"));

    const double max_ratio = ctx.num("max_ratio");
    return ctx.metrics["affine_ratio"] <= max_ratio && ctx.metrics["symbols_ratio"] <= max_ratio &&
           rep.final_average <= ctx.num("max_average") && *rep.pointwise_holds && *srep.pointwise_holds;
}

// Orbit of the k-fold system against every k-th point of the base orbit.
bool power_consistency(Context& ctx) {
    const std::size_t trials = ctx.count("trials");
    const std::size_t steps = ctx.count("steps");
    const auto ks = ctx.p.at("k").get<std::vector<int>>();
    Rng rng(ctx.seed());
    double dev_symbols = 0.0;
    double dev_interval = 0.0;
    auto os = ctx.open("deviations.csv");
    os << "model,k,max_deviation\n";
    os.precision(17);
    for (const std::string model : {"sigma2_prepend", "binary_affine", "interval_pair"}) {
        const IFSSpec base = make_system(model);
        for (int k : ks) {
            if (steps % static_cast<std::size_t>(k) != 0) throw DomainError("steps must be a multiple of every k");
            const IFSSpec power = power_ifs(base, k);
            double dev = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                const auto sel = SelectorSequence::random(rng.bits(), base.size(), steps);
                const Point x0 = random_point(base.space(), rng);
                const auto fine = orbit(base, sel, x0, steps);
                const auto coarse = orbit(power, word_selector(sel, k, base.size()), x0, steps / static_cast<std::size_t>(k));
                for (std::size_t i = 0; i < coarse.points.size(); ++i) {
                    dev = std::max(dev, distance(coarse.points[i], fine.points[i * static_cast<std::size_t>(k)]));
                }
                const auto strided = stride_subsample(base, power, make_record(base, fine.points, sel), k);
                for (double e : strided.errors) dev = std::max(dev, e);
            }
            os << model << ',' << k << ',' << dev << '\n';
            if (base.space().tag() == SpaceKind::Tag::kSymbols) {
                dev_symbols = std::max(dev_symbols, dev);
            } else {
                dev_interval = std::max(dev_interval, dev);
            }
        }
    }
    ctx.metrics["max_deviation_symbols"] = dev_symbols;
    ctx.metrics["max_deviation_interval"] = dev_interval;
    return dev_symbols <= ctx.num("tol_symbols") && dev_interval <= ctx.num("tol_interval");
}

// Shadow verdicts before and after transport by h(t) = t^2.
bool conjugacy(Context& ctx) {
    const std::size_t trials = ctx.count("trials");
    const std::size_t n = ctx.count("n");
    const double tol = ctx.num("tol");
    const IFSSpec f = make_system("binary_affine");
    const Homeomorphism h = find_homeomorphism("square", f.space());
    const IFSSpec g = conjugate_ifs(f, h);
    Rng rng(ctx.seed());
    std::size_t matches = 0;
    std::size_t total = 0;
    double sum_before = 0.0;
    double sum_after = 0.0;
    auto os = ctx.open("trials.csv");
    os << "trial,noise,average_original,average_transported,verdict_original,verdict_transported\n";
    os.precision(17);
    for (const std::string noise : {"harmonic", "constant"}) {
        const auto schedule = noise == "harmonic" ? harmonic_schedule(n) : constant_schedule(n, ctx.num("constant_noise"));
        for (std::size_t t = 0; t < trials; ++t) {
            const auto sel = SelectorSequence::random(rng.bits(), 2, n);
            const Point x0 = random_point(f.space(), rng);
            const Point z = random_point(f.space(), rng);
            const auto rec = perturbed_orbit(f, sel, x0, schedule, rng.bits());
            std::vector<Point> moved;
            moved.reserve(rec.points.size());
            for (const Point& p : rec.points) moved.push_back(h.forward(p));
            const auto trec = make_record(g, std::move(moved), rec.selector);
            const auto before = shadow_verify(f, rec, z, rec.selector, n + 1, tol);
            const auto after = shadow_verify(g, trec, h.forward(z), rec.selector, n + 1, tol);
            matches += before.verdict_avg == after.verdict_avg ? 1 : 0;
            ++total;
            sum_before += before.final_average;
            sum_after += after.final_average;
            os << t << ',' << noise << ',' << before.final_average << ',' << after.final_average << ','
               << before.verdict_avg << ',' << after.verdict_avg << '\n';
        }
    }
    ctx.metrics["verdict_matches"] = static_cast<double>(matches);
    ctx.metrics["trials_total"] = static_cast<double>(total);
    ctx.metrics["mean_average_original"] = sum_before / static_cast<double>(total);
    ctx.metrics["mean_average_transported"] = sum_after / static_cast<double>(total);
    return matches == total;
}

// Max-metric sandwich between product and component shadow averages.
bool product(Context& ctx) {
    const std::size_t trials = ctx.count("trials");
    const std::size_t n = ctx.count("n");
    const IFSSpec a = make_system("binary_affine");
    const IFSSpec b = make_system("sigma2_prepend");
    const IFSSpec p = product_ifs(a, b);
    Rng rng(ctx.seed());
    double excess_sum = -std::numeric_limits<double>::infinity();
    double excess_component = -std::numeric_limits<double>::infinity();
    double worst_product_average = 0.0;
    auto os = ctx.open("trials.csv");
    os << "trial,component_left,component_right,product\n";
    os.precision(17);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto sa = SelectorSequence::random(rng.bits(), a.size(), n);
        const auto sb = SelectorSequence::random(rng.bits(), b.size(), n);
        const auto ra = perturbed_orbit(a, sa, random_point(a.space(), rng), harmonic_schedule(n), rng.bits());
        const auto rb = perturbed_orbit(b, sb, random_point(b.space(), rng), symbolic_schedule(n), rng.bits());
        std::vector<Point> pts;
        pts.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) pts.push_back(Point::pair(p.space(), ra.points[i], rb.points[i]));
        const auto rp = make_record(p, std::move(pts), product_selector(sa, sb, a.size()));
        const Point za = random_point(a.space(), rng);
        const Point zb = random_point(b.space(), rng);
        const double ca = shadow_verify(a, ra, za, sa, n + 1).final_average;
        const double cb = shadow_verify(b, rb, zb, sb, n + 1).final_average;
        const double cp = shadow_verify(p, rp, Point::pair(p.space(), za, zb), rp.selector, n + 1).final_average;
        excess_sum = std::max(excess_sum, cp - ca - cb);
        excess_component = std::max(excess_component, std::max(ca, cb) - cp);
        worst_product_average = std::max(worst_product_average, cp);
        os << t << ',' << ca << ',' << cb << ',' << cp << '\n';
    }
    ctx.metrics["max_excess_over_sum"] = excess_sum;
    ctx.metrics["max_component_excess"] = excess_component;
    ctx.metrics["max_product_average"] = worst_product_average;
    const double tol = ctx.num("tol");
    return excess_sum <= tol && excess_component <= tol;
}

// Density-zero decomposition on a sparse-spike series and a no-decay series.
bool lemma_density(Context& ctx) {
    const std::size_t horizon = ctx.count("T");
    std::vector<double> spikes(horizon);
    for (std::size_t i = 0; i < horizon; ++i) spikes[i] = std::has_single_bit(i) ? 1.0 : 1.0 / static_cast<double>(i + 1);
    const Series s(std::move(spikes), 1.0);
    const auto ex = extract_null_density_set(s, ctx.threads);
    const auto rep = verify_null_density_implies_average(s, ex.set, ctx.num("tol"));
    std::vector<double> evens(horizon);
    for (std::size_t i = 0; i < horizon; i += 2) evens[i] = 1.0;
    const auto ev = extract_null_density_set(Series(std::move(evens), 1.0), ctx.threads);

    ctx.metrics["density"] = ex.density;
    ctx.metrics["tail_max"] = ex.tail_max;
    ctx.metrics["set_size"] = static_cast<double>(ex.set.size());
    ctx.metrics["average"] = rep.average;
    ctx.metrics["verify_bound"] = rep.bound;
    ctx.metrics["verify_verdict"] = flag(rep.verdict);
    ctx.metrics["no_decay_spikes"] = flag(ex.no_decay);
    ctx.metrics["no_decay_evens"] = flag(ev.no_decay);
    {
        auto os = ctx.open("cuts.csv");
        os << "level,threshold,cut\n";
        for (std::size_t k = 0; k < ex.cuts.size(); ++k) os << k + 1 << ',' << std::ldexp(1.0, -static_cast<int>(k + 1)) << ',' << ex.cuts[k] << '\n';
    }
    {
        auto os = ctx.open("set.json");
        os << to_json(ex.set).dump() << '\n';
    }
    return !ex.no_decay && ex.density < ctx.num("density_max") && ex.tail_max < ctx.num("tail_max") && rep.verdict &&
           ev.no_decay;
}

// Chain recurrence on the circle for the pair versus the first map alone.
bool circle_chain(Context& ctx) {
    const double eps = ctx.num("epsilon");
    const double h = ctx.num("resolution");
    const IFSSpec pair = make_system("circle_pair");
    const IFSSpec single = restrict_maps(pair, {0});
    const ChainGraph gp = build_chain_graph(pair, h, eps, ctx.threads);
    const ChainGraph gs = build_chain_graph(single, h, eps, ctx.threads);
    const auto tp = is_chain_transitive(gp);
    const auto ts = is_chain_transitive(gs);
    const auto crp = chain_recurrent_set(gp);
    const auto crs = chain_recurrent_set(gs);
    const Point half = Point::real(pair.space(), 0.5);
    const Point zero = Point::real(pair.space(), 0.0);
    const auto down = find_chain(gp, half, zero);
    const auto up = find_chain(gp, zero, half);

    bool witness_ok = false;
    double witness_len = 0.0;
    double witness_step = 0.0;
    if (down.found && up.found) {
        ChainWitness loop = *down.witness;
        const auto& back = *up.witness;
        loop.points.insert(loop.points.end(), back.points.begin() + 1, back.points.end());
        loop.nodes.insert(loop.nodes.end(), back.nodes.begin() + 1, back.nodes.end());
        loop.labels.insert(loop.labels.end(), back.labels.begin(), back.labels.end());
        witness_ok = validate_witness(pair, loop, eps) && loop.points.front() == loop.points.back();
        witness_len = static_cast<double>(loop.points.size());
        witness_step = witness_step_error(pair, loop);
        auto os = ctx.open("witness.json");
        os << to_json(loop).dump(2) << '\n';
    }
    const std::size_t half_node = gp.snap(half);
    ctx.metrics["nodes"] = static_cast<double>(gp.size());
    ctx.metrics["edges_pair"] = static_cast<double>(gp.edge_count());
    ctx.metrics["edges_single"] = static_cast<double>(gs.edge_count());
    ctx.metrics["pair_transitive"] = flag(tp.transitive);
    ctx.metrics["single_transitive"] = flag(ts.transitive);
    ctx.metrics["cr_pair"] = static_cast<double>(crp.size());
    ctx.metrics["cr_single"] = static_cast<double>(crs.size());
    ctx.metrics["half_recurrent_pair"] = flag(std::binary_search(crp.begin(), crp.end(), half_node));
    ctx.metrics["half_recurrent_single"] = flag(std::binary_search(crs.begin(), crs.end(), half_node));
    ctx.metrics["witness_valid"] = flag(witness_ok);
    ctx.metrics["witness_length"] = witness_len;
    ctx.metrics["witness_max_step"] = witness_step;
    {
        auto os = ctx.open("cr.csv");
        os << "node,x,in_cr_pair,in_cr_single\n";
        os.precision(17);
        for (std::size_t u = 0; u < gp.size(); ++u) {
            os << u << ',' << gp.nodes()[u].coord() << ',' << std::binary_search(crp.begin(), crp.end(), u) << ','
               << std::binary_search(crs.begin(), crs.end(), u) << '\n';
        }
    }
    return tp.transitive && witness_ok && !ts.transitive;
}

// No-shadowing certificate for the interval pair.
bool interval_no_shadowing(Context& ctx) {
    const IFSSpec ifs = make_system("interval_pair");
    const SpaceKind& space = ifs.space();

    const std::size_t cells = ctx.count("invariance_grid");
    std::size_t violations = 0;
    std::size_t order_violations = 0;
    for (std::size_t i = 0; i <= cells; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(cells);
        const Point p = Point::real(space, x);
        const double y1 = apply(ifs, 0, p).coord();
        const double y2 = apply(ifs, 1, p).coord();
        for (double y : {y1, y2}) {
            if (x <= 0.5 && y > 0.5 + 1e-12) ++violations;
            if (x >= 0.5 && y < 0.5 - 1e-12) ++violations;
        }
        const bool fixed = x == 0.0 || x == 0.5 || x == 1.0;
        if (!fixed && !(y1 > y2 && y2 > x)) ++order_violations;
    }

    const double step = ctx.num("step");
    const double target = ctx.num("target");
    const MapIndex lambda = ctx.count("map_index");
    std::vector<Point> pts{Point::real(space, ctx.num("start"))};
    while (pts.back().coord() < target) {
        if (pts.size() > 100000) throw DomainError("crossing pseudo-orbit did not reach the target");
        const double next = std::min(apply(ifs, lambda, pts.back()).coord() + step, 1.0);
        pts.push_back(Point::real(space, next));
    }
    const auto selector = SelectorSequence::constant(lambda, pts.size() - 1);
    const auto rec = make_record(ifs, std::move(pts), selector);
    const auto delta = validate_delta_pseudo_orbit(rec, ctx.num("delta"));
    {
        auto os = ctx.open("pseudo_orbit.csv");
        write_record_csv(os, rec);
    }

    const auto starts = grid(space, ctx.num("grid_step"));
    const auto search = greedy_search(ifs, rec, starts, rec.points.size(), 1e-2, ctx.num("epsilon"), ctx.threads);
    const auto check = finite_shadowing_check(ifs, rec, ctx.num("epsilon"), starts, rec.points.size(), ctx.threads);

    ctx.metrics["invariance_violations"] = static_cast<double>(violations);
    ctx.metrics["order_violations"] = static_cast<double>(order_violations);
    ctx.metrics["pseudo_steps"] = static_cast<double>(rec.horizon());
    ctx.metrics["pseudo_max_error"] = delta.worst_error;
    ctx.metrics["pseudo_valid"] = flag(delta.verdict);
    ctx.metrics["pseudo_min"] = rec.points.front().coord();
    ctx.metrics["pseudo_max"] = rec.points.back().coord();
    ctx.metrics["greedy_floor"] = search.best_sup.sup_error;
    ctx.metrics["greedy_best_average"] = search.best_average.final_average;
    ctx.metrics["shadow_found"] = flag(check.found);
    return violations == 0 && delta.verdict && search.best_sup.sup_error >= ctx.num("floor_min") && !check.found;
}

// Strong connectivity of the interval pair across chain scales.
bool interval_chain_probe(Context& ctx) {
    const IFSSpec ifs = make_system("interval_pair");
    const auto eps_list = ctx.p.at("epsilons").get<std::vector<double>>();
    const double ratio = ctx.num("resolution_ratio");
    auto os = ctx.open("probe.csv");
    os << "epsilon,resolution,nodes,edges,transitive,components,right_found,left_found,cr_size\n";
    os.precision(17);
    for (double eps : eps_list) {
        const ChainGraph g = build_chain_graph(ifs, eps * ratio, eps, ctx.threads);
        const auto tr = is_chain_transitive(g);
        const auto right = find_chain(g, Point::real(ifs.space(), 0.1), Point::real(ifs.space(), 0.9));
        const auto left = find_chain(g, Point::real(ifs.space(), 0.9), Point::real(ifs.space(), 0.1));
        const auto cr = chain_recurrent_set(g);
        std::ostringstream key;
        key << eps;
        ctx.metrics["transitive@" + key.str()] = flag(tr.transitive);
        ctx.metrics["components@" + key.str()] = static_cast<double>(tr.components);
        ctx.metrics["left_found@" + key.str()] = flag(left.found);
        os << eps << ',' << g.resolution() << ',' << g.size() << ',' << g.edge_count() << ',' << tr.transitive << ','
           << tr.components << ',' << right.found << ',' << left.found << ',' << cr.size() << '\n';
    }
    return true;
}

struct Entry {
    std::string name;
    nlohmann::json defaults;
    Procedure run;
};

const std::vector<Entry>& catalog() {
    static const std::vector<Entry> entries{
        {"thm-contracting-bound",
         {{"n", 100000}, {"x0", 1.0}, {"y0", 0.0}, {"curve_stride", 100}, {"max_ratio", 1.0}, {"max_average", 1e-3}},
         contracting_bound},
        {"thm-power-consistency",
         {{"trials", 100}, {"steps", 60}, {"k", {2, 3, 4}}, {"tol_symbols", 0.0}, {"tol_interval", 1e-12}},
         power_consistency},
        {"thm-conjugacy", {{"trials", 20}, {"n", 10000}, {"tol", 1e-2}, {"constant_noise", 0.2}}, conjugacy},
        {"thm-product", {{"trials", 20}, {"n", 10000}, {"tol", 1e-12}}, product},
        {"lemma-density", {{"T", 1000000}, {"tol", 1e-3}, {"density_max", 0.01}, {"tail_max", 0.05}}, lemma_density},
        {"ex-circle-chain", {{"epsilon", 0.05}, {"resolution", 1.0 / 512.0}}, circle_chain},
        {"ex-interval-no-shadowing",
         {{"invariance_grid", 10000},
          {"start", 0.01},
          {"target", 0.99},
          {"step", 0.009},
          {"map_index", 1},
          {"delta", 0.01},
          {"grid_step", 1e-3},
          {"epsilon", 0.2},
          {"floor_min", 0.2}},
         interval_no_shadowing},
        {"ex-interval-chain-probe", {{"epsilons", {0.005, 0.02, 0.08}}, {"resolution_ratio", 0.25}}, interval_chain_probe},
    };
    return entries;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return e;
    }
    throw DomainError("unknown experiment '" + name + "'");
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : catalog()) v.push_back(e.name);
        return v;
    }();
    return names;
}

nlohmann::json experiment_defaults(const std::string& name) {
    nlohmann::json p = find_entry(name).defaults;
    p["seed"] = 0;
    return p;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& options) {
    const Entry& entry = find_entry(name);
    Context ctx;
    ctx.p = experiment_defaults(name);
    ctx.p["seed"] = options.seed;
    for (const auto& [key, value] : options.overrides.items()) {
        if (!ctx.p.contains(key)) throw DomainError("experiment '" + name + "' has no parameter '" + key + "'");
        ctx.p[key] = value;
    }
    ctx.threads = options.threads;

    const std::string base = options.run_label.empty() ? utc_stamp() : options.run_label;
    fs::path dir = options.output_root / name / base;
    for (int i = 2; fs::exists(dir); ++i) dir = options.output_root / name / (base + "-" + std::to_string(i));
    fs::create_directories(dir);
    ctx.dir = dir;

    const auto start = std::chrono::steady_clock::now();
    ExperimentResult r;
    r.verdict = entry.run(ctx);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.name = name;
    r.parameters = ctx.p;
    r.metrics = std::move(ctx.metrics);
    r.directory = dir;
    const fs::path result_path = dir / "result.json";
    ctx.artifacts.insert(ctx.artifacts.begin(), result_path.string());
    r.artifacts = std::move(ctx.artifacts);
    std::ofstream os(result_path);
    if (!os) throw DomainError("cannot write " + result_path.string());
    os << to_json(r).dump(2) << '\n';
    return r;
}

nlohmann::json to_json(const ExperimentResult& r) {
    return {{"name", r.name},           {"parameters", r.parameters}, {"verdict", r.verdict},
            {"metrics", r.metrics},     {"artifacts", r.artifacts},   {"wall_time", r.wall_time},
            {"directory", r.directory.string()}};
}

}  // namespace ifs
