#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ifs/averaging.hpp"
#include "ifs/chains.hpp"
#include "ifs/errors.hpp"
#include "ifs/experiments.hpp"
#include "ifs/ifs_core.hpp"
#include "ifs/model_library.hpp"
#include "ifs/pseudo_orbits.hpp"
#include "ifs/shadowing.hpp"

namespace ifs::cli {

namespace {

using nlohmann::json;

struct Config {
    std::string model;
    std::string spec;
    std::string format = "json";
    std::string output;
    int threads = 0;
    std::uint64_t seed = 0;

    std::string sigma = "random:0";
    bool sigma_given = false;
    std::string x0;
    std::size_t steps = 0;
    std::string noise = "harmonic";
    double delta = 0.0;
    double tol = 1e-2;
    double tol_sup = -1.0;
    std::size_t horizon = 0;

    std::string record;
    std::string mode = "verify";
    std::string z;
    double epsilon = 0.0;
    double grid = 0.0;
    std::string from;
    std::string to;
    bool dot = false;

    std::string input;
    std::string series;
    std::size_t length = 0;
    std::size_t n = 0;
    double bound = 0.0;
    bool extract = false;

    std::size_t samples = 4096;

    std::string experiment;
    std::vector<std::string> sets;
    std::string out_dir = "results";
    std::string label;
};

json typed(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    return v.is_discarded() || v.is_object() ? json(text) : v;
}

// Every option of the active subcommand, with its value or default.
json collect_params(const CLI::App* sub) {
    json p = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help") continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_type_size() == 0) {
                p[name] = true;
            } else if (res.size() == 1) {
                p[name] = typed(res.front());
            } else {
                json arr = json::array();
                for (const auto& r : res) arr.push_back(typed(r));
                p[name] = arr;
            }
        } else if (!opt->get_default_str().empty()) {
            p[name] = typed(opt->get_default_str());
        }
    }
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty() && opt->get_positional() && opt->count() > 0) p[opt->get_name()] = opt->results().front();
    }
    return p;
}

std::string csv_comment(const json& params) {
    std::string s = "#";
    for (const auto& [k, v] : params.items()) s += " " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    return s + "\n";
}

class Emitter {
public:
    Emitter(const Config& cfg, std::ostream& out) : out_(out) {
        if (!cfg.output.empty()) {
            file_.open(cfg.output);
            if (!file_) throw DomainError("cannot open output file " + cfg.output);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : out_; }

private:
    std::ostream& out_;
    std::ofstream file_;
};

IFSSpec load_system(const Config& cfg) {
    if (!cfg.model.empty() && !cfg.spec.empty()) throw DomainError("give either --model or --spec, not both");
    if (!cfg.spec.empty()) {
        std::ifstream in(cfg.spec);
        if (!in) throw DomainError("cannot read system file " + cfg.spec);
        return ifs_from_json(json::parse(in));
    }
    if (cfg.model.empty()) throw DomainError("one of --model or --spec is required");
    return make_system(cfg.model);
}

std::vector<double> noise_schedule(const std::string& noise, std::size_t n) {
    if (noise == "zero") return constant_schedule(n, 0.0);
    if (noise == "harmonic") return harmonic_schedule(n);
    if (noise == "symbolic") return symbolic_schedule(n);
    if (noise.rfind("constant:", 0) == 0) return constant_schedule(n, std::stod(noise.substr(9)));
    throw DomainError("unknown noise '" + noise + "' (zero, harmonic, symbolic, constant:<c>)");
}

std::vector<double> load_series(const Config& cfg) {
    if (!cfg.input.empty() && !cfg.series.empty()) throw DomainError("give either --input or --series, not both");
    if (!cfg.series.empty()) {
        if (cfg.length == 0) throw DomainError("--series needs --length");
        const std::size_t t = cfg.length;
        std::vector<double> v(t, 0.0);
        if (cfg.series == "harmonic") return harmonic_schedule(t);
        if (cfg.series == "zero") return v;
        if (cfg.series == "evens") {
            for (std::size_t i = 0; i < t; i += 2) v[i] = 1.0;
            return v;
        }
        if (cfg.series == "powers") {
            for (std::size_t i = 0; i < t; ++i) v[i] = (i & (i - 1)) == 0 && i > 0 ? 1.0 : 1.0 / static_cast<double>(i + 1);
            return v;
        }
        if (cfg.series.rfind("constant:", 0) == 0) return constant_schedule(t, std::stod(cfg.series.substr(9)));
        throw DomainError("unknown series '" + cfg.series + "' (harmonic, powers, evens, zero, constant:<c>)");
    }
    if (cfg.input.empty()) throw DomainError("one of --input or --series is required");
    std::ifstream in(cfg.input);
    if (!in) throw DomainError("cannot read series file " + cfg.input);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') return json::parse(text).get<std::vector<double>>();
    std::vector<double> v;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::string field = line.substr(line.find_last_of(',') == std::string::npos ? 0 : line.find_last_of(',') + 1);
        try {
            std::size_t used = 0;
            const double x = std::stod(field, &used);
            v.push_back(x);
        } catch (const std::invalid_argument&) {
            if (!v.empty()) throw DomainError("bad series value '" + field + "'");
            // header line
        }
    }
    return v;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read " + path);
    return json::parse(in);
}

int run_orbit(const Config& cfg, const json& params, std::ostream& out) {
    const IFSSpec ifs = load_system(cfg);
    const auto sel = parse_selector(cfg.sigma, ifs.size(), cfg.steps);
    const auto rec = orbit(ifs, sel, parse_point(ifs.space(), cfg.x0), cfg.steps);
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << csv_comment(params);
        write_record_csv(em.stream(), make_record(ifs, rec.points, rec.selector));
        return 0;
    }
    json pts = json::array();
    for (const Point& p : rec.points) pts.push_back(to_json(p));
    em.stream() << json{{"params", params}, {"space", to_json(ifs.space())}, {"selector", to_json(rec.selector)}, {"points", pts}}.dump(2)
                << '\n';
    return 0;
}

int run_pseudo(const Config& cfg, const json& params, std::ostream& out) {
    const IFSSpec ifs = load_system(cfg);
    const auto sel = parse_selector(cfg.sigma, ifs.size(), cfg.steps);
    const auto rec = perturbed_orbit(ifs, sel, parse_point(ifs.space(), cfg.x0), noise_schedule(cfg.noise, cfg.steps), cfg.seed);
    const std::size_t horizon = cfg.horizon == 0 ? rec.horizon() : cfg.horizon;
    const auto aapo = validate_aapo(rec, horizon, cfg.tol);
    bool ok = aapo.verdict;
    json j{{"params", params}, {"space", to_json(ifs.space())}, {"record", to_json(rec)}, {"aapo", to_json(aapo)}};
    if (cfg.delta > 0.0) {
        const auto d = validate_delta_pseudo_orbit(rec, cfg.delta);
        j["delta"] = to_json(d);
        ok = ok && d.verdict;
    }
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << csv_comment(params);
        write_record_csv(em.stream(), rec);
    } else {
        em.stream() << j.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int run_shadow(const Config& cfg, const json& params, std::ostream& out) {
    const IFSSpec ifs = load_system(cfg);
    const json doc = load_json_file(cfg.record);
    const auto rec = record_from_json(doc.contains("record") ? doc.at("record") : doc, ifs);
    const std::size_t n = cfg.horizon == 0 ? rec.points.size() : cfg.horizon;
    const Point z = cfg.z.empty() ? rec.points.front() : parse_point(ifs.space(), cfg.z);
    double tol_sup = cfg.tol_sup >= 0.0 ? cfg.tol_sup : (cfg.epsilon > 0.0 ? cfg.epsilon : diameter(ifs.space()));
    json j{{"params", params}, {"record_errors", rec.errors}};
    std::optional<ShadowReport> report;
    bool ok = false;
    if (cfg.mode == "verify") {
        const auto sigma = cfg.sigma_given ? parse_selector(cfg.sigma, ifs.size(), n == 0 ? 0 : n - 1) : rec.selector;
        report = shadow_verify(ifs, rec, z, sigma, n, cfg.tol, tol_sup);
        ok = report->verdict_avg;
    } else if (cfg.mode == "contracting") {
        report = contracting_shadow(ifs, rec, z, n, cfg.tol);
        ok = report->verdict_avg;
    } else if (cfg.mode == "search" || cfg.mode == "finite") {
        if (!(cfg.grid > 0.0)) throw DomainError("--grid is required for search modes");
        const auto starts = grid(ifs.space(), cfg.grid);
        if (cfg.mode == "search") {
            report = greedy_shadow_search(ifs, rec, starts, n, cfg.tol, tol_sup, cfg.threads);
            ok = report->verdict_avg;
        } else {
            if (!(cfg.epsilon > 0.0)) throw DomainError("--epsilon is required for finite mode");
            const auto r = finite_shadowing_check(ifs, rec, cfg.epsilon, starts, n, cfg.threads);
            j["finite"] = to_json(r);
            report = r.witness;
            ok = r.found;
        }
    } else {
        throw DomainError("unknown --mode '" + cfg.mode + "' (verify, contracting, search, finite)");
    }
    j["report"] = to_json(*report);
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << csv_comment(params) << "i,distance,average\n";
        em.stream().precision(17);
        for (std::size_t i = 0; i < report->distances.size(); ++i) {
            em.stream() << i << ',' << report->distances[i] << ',' << report->cesaro_curve[i] << '\n';
        }
    } else {
        em.stream() << j.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int run_chain(const std::string& action, const Config& cfg, const json& params, std::ostream& out) {
    const IFSSpec ifs = load_system(cfg);
    const ChainGraph g = build_chain_graph(ifs, cfg.grid, cfg.epsilon, cfg.threads);
    Emitter em(cfg, out);
    std::ostream& os = em.stream();
    if (action == "graph") {
        if (cfg.dot) {
            os << "// " << csv_comment(params).substr(2);
            write_dot(os, g);
        } else if (cfg.format == "csv") {
            os << csv_comment(params);
            write_edges_csv(os, g);
        } else {
            os << json{{"params", params}, {"nodes", g.size()}, {"edges", g.edge_count()}}.dump(2) << '\n';
        }
        return 0;
    }
    if (action == "find") {
        const auto s = find_chain(g, parse_point(ifs.space(), cfg.from), parse_point(ifs.space(), cfg.to));
        if (cfg.format == "csv") {
            os << csv_comment(params) << "step,node,x,lambda\n";
            if (s.witness) {
                for (std::size_t i = 0; i < s.witness->points.size(); ++i) {
                    os << i << ',' << s.witness->nodes[i] << ',' << format_point(s.witness->points[i]) << ',';
                    if (i < s.witness->labels.size()) os << s.witness->labels[i];
                    os << '\n';
                }
            }
        } else {
            json j = to_json(s, g);
            j["params"] = params;
            os << j.dump(2) << '\n';
        }
        return s.found ? 0 : 1;
    }
    if (action == "cr") {
        const auto cr = chain_recurrent_set(g);
        if (cfg.format == "csv") {
            os << csv_comment(params) << "node,x\n";
            for (auto u : cr) os << u << ',' << format_point(g.nodes()[u]) << '\n';
        } else {
            json pts = json::array();
            for (auto u : cr) pts.push_back(to_json(g.nodes()[u]));
            os << json{{"params", params}, {"nodes", g.size()}, {"recurrent", cr.size()}, {"indices", cr}, {"points", pts}}.dump(2)
               << '\n';
        }
        return 0;
    }
    const auto r = is_chain_transitive(g);
    if (cfg.format == "csv") {
        os << csv_comment(params) << "transitive,components\n" << r.transitive << ',' << r.components << '\n';
    } else {
        json j = to_json(r, g);
        j["params"] = params;
        os << j.dump(2) << '\n';
    }
    return r.transitive ? 0 : 1;
}

int run_cesaro(const Config& cfg, const json& params, std::ostream& out) {
    auto values = load_series(cfg);
    if (values.empty()) throw DomainError("series is empty");
    const Series s = cfg.bound > 0.0 ? Series(values, cfg.bound) : Series(values);
    const std::size_t n = cfg.n == 0 ? s.horizon() : cfg.n;
    json j{{"params", params}, {"horizon", s.horizon()}, {"n", n}, {"bound", s.bound()}, {"average", cesaro_average(s, n)}};
    bool ok = true;
    if (cfg.extract) {
        const auto ex = extract_null_density_set(s, cfg.threads);
        const auto rep = verify_null_density_implies_average(s, ex.set, cfg.tol);
        j["extraction"] = to_json(ex);
        j["verify"] = to_json(rep);
        ok = rep.verdict;
    }
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << csv_comment(params);
        const auto curve = running_average_curve(std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n)));
        write_series_csv(em.stream(), curve, 1, "n", "average");
    } else {
        em.stream() << j.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int run_ratio(const Config& cfg, const json& params, std::ostream& out) {
    const IFSSpec ifs = load_system(cfg);
    const auto trace = contraction_ratio_trace(ifs, cfg.samples, cfg.seed);
    const auto claimed = ifs.claimed_contraction();
    const bool holds = claimed && trace.back() <= *claimed + 1e-9;
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << csv_comment(params);
        write_series_csv(em.stream(), trace, 1, "pairs", "running_max");
    } else {
        em.stream() << json{{"params", params},
                            {"estimate", trace.back()},
                            {"claimed", claimed ? json(*claimed) : json()},
                            {"claimed_holds", holds}}
                           .dump(2)
                    << '\n';
    }
    return !claimed || holds ? 0 : 1;
}

int run_experiment_cmd(const Config& cfg, std::ostream& out) {
    ExperimentOptions opt;
    opt.seed = cfg.seed;
    opt.output_root = cfg.out_dir;
    opt.threads = cfg.threads;
    opt.run_label = cfg.label;
    for (const auto& kv : cfg.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        json parsed = json::parse(value, nullptr, false);
        opt.overrides[key] = parsed.is_discarded() ? json(value) : parsed;
    }
    const auto r = run_experiment(cfg.experiment, opt);
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << "# experiment=" << r.name << " seed=" << cfg.seed << "\nmetric,value\n";
        em.stream().precision(17);
        for (const auto& [k, v] : r.metrics) em.stream() << k << ',' << v << '\n';
        em.stream() << "verdict," << (r.verdict ? 1 : 0) << '\n';
    } else {
        em.stream() << to_json(r).dump(2) << '\n';
    }
    return r.verdict ? 0 : 1;
}

int run_list(const Config& cfg, std::ostream& out) {
    Emitter em(cfg, out);
    if (cfg.format == "csv") {
        em.stream() << "name,example,description\n";
        for (const auto& m : model_catalog()) em.stream() << m.name << ',' << m.example << ",\"" << m.description << "\"\n";
        return 0;
    }
    json models = json::array();
    for (const auto& m : model_catalog()) models.push_back({{"name", m.name}, {"example", m.example}, {"description", m.description}});
    em.stream() << json{{"models", models}, {"experiments", experiment_names()}}.dump(2) << '\n';
    return 0;
}

void add_output(CLI::App* sub, Config& cfg) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output,-o", cfg.output, "Write to this file instead of stdout");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
}

void add_system(CLI::App* sub, Config& cfg) {
    sub->add_option("--model", cfg.model, "Catalog model id, e.g. binary_affine");
    sub->add_option("--spec", cfg.spec, "System JSON file");
    add_output(sub, cfg);
}

void add_chain_options(CLI::App* sub, Config& cfg) {
    add_system(sub, cfg);
    sub->add_option("--epsilon", cfg.epsilon, "Chain tolerance")->required()->check(CLI::PositiveNumber);
    sub->add_option("--grid", cfg.grid, "Grid resolution h (h <= epsilon/4)")->required()->check(CLI::PositiveNumber);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Iterated function system toolkit", "ifs"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(0, 1);
    bool list_flag = false;
    app.add_flag("--list-models", list_flag, "List catalog models and exit");

    auto* orbit_cmd = app.add_subcommand("orbit", "Orbit of a point under a selector");
    add_system(orbit_cmd, cfg);
    orbit_cmd->add_option("--sigma", cfg.sigma, "Selector: digits, periodic:<p> or random:<seed>");
    orbit_cmd->add_option("--x0", cfg.x0, "Initial point")->required();
    orbit_cmd->add_option("--steps", cfg.steps, "Number of steps")->required();

    auto* pseudo_cmd = app.add_subcommand("pseudo", "Generate and validate a perturbed orbit");
    add_system(pseudo_cmd, cfg);
    pseudo_cmd->add_option("--sigma", cfg.sigma, "Selector: digits, periodic:<p> or random:<seed>");
    pseudo_cmd->add_option("--x0", cfg.x0, "Initial point")->required();
    pseudo_cmd->add_option("--steps", cfg.steps, "Number of steps")->required();
    pseudo_cmd->add_option("--noise", cfg.noise, "zero, harmonic, symbolic or constant:<c>");
    pseudo_cmd->add_option("--seed", cfg.seed, "Noise seed");
    pseudo_cmd->add_option("--delta", cfg.delta, "Also check a delta-pseudo-orbit bound (0 = skip)");
    pseudo_cmd->add_option("--tol", cfg.tol, "Average-error tolerance");
    pseudo_cmd->add_option("--horizon", cfg.horizon, "Averaging horizon (0 = all steps)");

    auto* shadow_cmd = app.add_subcommand("shadow", "Verify or search for a shadowing orbit");
    add_system(shadow_cmd, cfg);
    shadow_cmd->add_option("--record", cfg.record, "Record JSON (output of pseudo)")->required();
    shadow_cmd->add_option("--mode", cfg.mode, "verify, contracting, search or finite")
        ->check(CLI::IsMember({"verify", "contracting", "search", "finite"}));
    auto* shadow_sigma = shadow_cmd->add_option("--sigma", cfg.sigma, "Candidate selector (verify mode; default: the record's)");
    shadow_cmd->add_option("--z", cfg.z, "Candidate start (default: first record point)");
    shadow_cmd->add_option("--horizon", cfg.horizon, "Points compared (0 = all)");
    shadow_cmd->add_option("--tol", cfg.tol, "Average tolerance");
    shadow_cmd->add_option("--tol-sup", cfg.tol_sup, "Sup tolerance (default: epsilon or the diameter)");
    shadow_cmd->add_option("--epsilon", cfg.epsilon, "Shadowing epsilon for finite mode");
    shadow_cmd->add_option("--grid", cfg.grid, "Start grid step for search modes");

    auto* chain_cmd = app.add_subcommand("chain", "Epsilon-chain analysis on a grid");
    chain_cmd->require_subcommand(1);
    auto* chain_graph = chain_cmd->add_subcommand("graph", "Build the chain graph");
    add_chain_options(chain_graph, cfg);
    chain_graph->add_flag("--dot", cfg.dot, "Emit a Graphviz description");
    auto* chain_find = chain_cmd->add_subcommand("find", "Shortest chain between two points");
    add_chain_options(chain_find, cfg);
    chain_find->add_option("--from", cfg.from, "Start point")->required();
    chain_find->add_option("--to", cfg.to, "End point")->required();
    auto* chain_cr = chain_cmd->add_subcommand("cr", "Chain-recurrent grid nodes");
    add_chain_options(chain_cr, cfg);
    auto* chain_tr = chain_cmd->add_subcommand("transitive", "Chain transitivity check");
    add_chain_options(chain_tr, cfg);

    auto* cesaro_cmd = app.add_subcommand("cesaro", "Cesàro averages and density-zero extraction");
    add_output(cesaro_cmd, cfg);
    cesaro_cmd->add_option("--input", cfg.input, "Series file: JSON array, CSV or one value per line");
    cesaro_cmd->add_option("--series", cfg.series, "harmonic, powers, evens, zero or constant:<c>");
    cesaro_cmd->add_option("--length", cfg.length, "Length for --series");
    cesaro_cmd->add_option("--n", cfg.n, "Prefix length (0 = all)");
    cesaro_cmd->add_option("--bound", cfg.bound, "Declared bound B (0 = max value)");
    cesaro_cmd->add_flag("--extract", cfg.extract, "Extract a density-zero set and verify the average");
    cesaro_cmd->add_option("--tol", cfg.tol, "Verification tolerance");

    auto* ratio_cmd = app.add_subcommand("ratio", "Sampled contraction ratio");
    add_system(ratio_cmd, cfg);
    ratio_cmd->add_option("--samples", cfg.samples, "Sampled point pairs")->check(CLI::PositiveNumber);
    ratio_cmd->add_option("--seed", cfg.seed, "Sampling seed");

    auto* exp_cmd = app.add_subcommand("experiment", "Run a named experiment");
    exp_cmd->add_option("name", cfg.experiment, "Experiment name")->required();
    exp_cmd->add_option("--seed", cfg.seed, "Seed");
    exp_cmd->add_option("--set", cfg.sets, "Parameter override key=value (repeatable)");
    exp_cmd->add_option("--out", cfg.out_dir, "Results root directory");
    exp_cmd->add_option("--label", cfg.label, "Run directory name (default: UTC timestamp)");
    add_output(exp_cmd, cfg);

    auto* list_cmd = app.add_subcommand("list-models", "List catalog models and experiments");
    add_output(list_cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    // the active (innermost) subcommand
    const CLI::App* active = &app;
    while (!active->get_subcommands().empty()) active = active->get_subcommands().front();
    cfg.sigma_given = shadow_sigma->count() > 0;

    try {
        if (list_flag || list_cmd->parsed()) return run_list(cfg, out);
        if (cesaro_cmd->parsed() && cesaro_cmd->count("--tol") == 0) cfg.tol = 1e-3;
        const json params = collect_params(active);
        if (orbit_cmd->parsed()) return run_orbit(cfg, params, out);
        if (pseudo_cmd->parsed()) return run_pseudo(cfg, params, out);
        if (shadow_cmd->parsed()) return run_shadow(cfg, params, out);
        if (chain_graph->parsed()) return run_chain("graph", cfg, params, out);
        if (chain_find->parsed()) return run_chain("find", cfg, params, out);
        if (chain_cr->parsed()) return run_chain("cr", cfg, params, out);
        if (chain_tr->parsed()) return run_chain("transitive", cfg, params, out);
        if (cesaro_cmd->parsed()) return run_cesaro(cfg, params, out);
        if (ratio_cmd->parsed()) return run_ratio(cfg, params, out);
        if (exp_cmd->parsed()) return run_experiment_cmd(cfg, out);
        err << "error: a subcommand is required (try --help)\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ifs::cli
