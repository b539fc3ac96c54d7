#include "ifs/chains.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <memory>
#include <ostream>

#include "ifs/errors.hpp"
#include "ifs/parallel.hpp"

namespace ifs {

namespace {

constexpr double kSlack = 1e-12;

// Grid layout mirrored per factor, so neighbor queries avoid a full scan.
struct Axis {
    SpaceKind kind;
    std::vector<double> coords;
    std::size_t count = 0;
    std::unique_ptr<Axis> left;
    std::unique_ptr<Axis> right;
};

std::unique_ptr<Axis> make_axis(const SpaceKind& kind, double h) {
    auto a = std::make_unique<Axis>(Axis{kind, {}, 0, nullptr, nullptr});
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle:
            for (const Point& p : grid(kind, h)) a->coords.push_back(p.coord());
            a->count = a->coords.size();
            break;
        case SpaceKind::Tag::kFinite: a->count = kind.size(); break;
        case SpaceKind::Tag::kProduct:
            a->left = make_axis(kind.left(), h);
            a->right = make_axis(kind.right(), h);
            a->count = a->left->count * a->right->count;
            break;
        case SpaceKind::Tag::kSymbols: throw UnsupportedKind("chain graphs need a grid-supported space");
    }
    return a;
}

void push_range(const std::vector<double>& c, double lo, double hi, std::vector<std::size_t>& out) {
    auto it = std::lower_bound(c.begin(), c.end(), lo);
    for (; it != c.end() && *it <= hi; ++it) out.push_back(static_cast<std::size_t>(it - c.begin()));
}

// Superset of the nodes within eps of p, as grid indices.
void candidates(const Axis& a, const Point& p, double eps, std::vector<std::size_t>& out) {
    switch (a.kind.tag()) {
        case SpaceKind::Tag::kInterval:
            push_range(a.coords, p.coord() - eps - kSlack, p.coord() + eps + kSlack, out);
            return;
        case SpaceKind::Tag::kCircle: {
            const double x = p.coord();
            if (eps >= 0.25) {
                for (std::size_t i = 0; i < a.count; ++i) out.push_back(i);
                return;
            }
            const std::size_t start = out.size();
            push_range(a.coords, x - eps - kSlack, x + eps + kSlack, out);
            if (x - eps - kSlack < 0.0) push_range(a.coords, x - eps - kSlack + 1.0, 1.0, out);
            if (x + eps + kSlack >= 1.0) push_range(a.coords, 0.0, x + eps + kSlack - 1.0, out);
            std::sort(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
            out.erase(std::unique(out.begin() + static_cast<std::ptrdiff_t>(start), out.end()), out.end());
            return;
        }
        case SpaceKind::Tag::kFinite:
            if (eps >= 1.0) {
                for (std::size_t i = 0; i < a.count; ++i) out.push_back(i);
            } else {
                out.push_back(p.element());
            }
            return;
        case SpaceKind::Tag::kProduct: {
            std::vector<std::size_t> l;
            std::vector<std::size_t> r;
            candidates(*a.left, p.left(), eps, l);
            candidates(*a.right, p.right(), eps, r);
            for (std::size_t li : l) {
                for (std::size_t ri : r) out.push_back(li * a.right->count + ri);
            }
            return;
        }
        case SpaceKind::Tag::kSymbols: break;
    }
}

struct Edge {
    std::uint32_t target;
    std::uint32_t label;
    double d;
};

std::vector<bool> bfs(const ChainGraph& g, std::size_t source, std::vector<std::size_t>* parent) {
    std::vector<bool> seen(g.size(), false);
    std::deque<std::size_t> queue;
    // seed with one step so that a chain always has length >= 1
    for (auto v : g.successors(source)) {
        if (!seen[v]) {
            seen[v] = true;
            if (parent) (*parent)[v] = source;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (auto v : g.successors(u)) {
            if (seen[v]) continue;
            seen[v] = true;
            if (parent) (*parent)[v] = u;
            queue.push_back(v);
        }
    }
    return seen;
}

}  // namespace

ChainGraph::ChainGraph(IFSSpec ifs, double resolution, double epsilon, std::vector<Point> nodes,
                       std::vector<std::size_t> offsets, std::vector<std::uint32_t> targets,
                       std::vector<std::uint32_t> labels)
    : ifs_(std::move(ifs)),
      resolution_(resolution),
      epsilon_(epsilon),
      nodes_(std::move(nodes)),
      offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      labels_(std::move(labels)) {
    if (offsets_.size() != nodes_.size() + 1 || targets_.size() != labels_.size() || offsets_.back() != targets_.size()) {
        throw DomainError("inconsistent chain graph adjacency");
    }
}

std::span<const std::uint32_t> ChainGraph::successors(std::size_t u) const {
    return std::span(targets_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
}

std::span<const std::uint32_t> ChainGraph::labels(std::size_t u) const {
    return std::span(labels_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
}

bool ChainGraph::has_edge(std::size_t u, std::size_t v) const { return edge_label(u, v).has_value(); }

std::optional<MapIndex> ChainGraph::edge_label(std::size_t u, std::size_t v) const {
    const auto succ = successors(u);
    const auto it = std::lower_bound(succ.begin(), succ.end(), v);
    if (it == succ.end() || *it != v) return std::nullopt;
    return labels(u)[static_cast<std::size_t>(it - succ.begin())];
}

std::size_t ChainGraph::snap(const Point& p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = distance(p, nodes_[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

ChainGraph build_chain_graph(const IFSSpec& ifs, double resolution, double epsilon, int threads) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (!(resolution > 0.0)) throw DomainError("grid resolution must be positive");
    if (resolution > epsilon / 4.0 * (1.0 + 1e-9)) {
        throw GuardError("grid resolution " + std::to_string(resolution) + " exceeds epsilon/4 = " +
                         std::to_string(epsilon / 4.0));
    }
    const SpaceKind& space = ifs.space();
    if (!space.grid_supported()) throw UnsupportedKind("chain graphs need a grid-supported space");
    std::vector<Point> nodes = grid(space, resolution);
    if (nodes.size() > std::numeric_limits<std::uint32_t>::max()) throw GuardError("grid too large for a chain graph");
    const auto axis = make_axis(space, resolution);

    std::vector<std::vector<Edge>> adjacency(nodes.size());
    parallel_for(nodes.size(), static_cast<unsigned>(std::max(threads, 0)), [&](std::size_t u) {
        std::vector<Edge> edges;
        std::vector<std::size_t> cand;
        for (MapIndex l = 0; l < ifs.size(); ++l) {
            const Point image = apply(ifs, l, nodes[u]);
            cand.clear();
            candidates(*axis, image, epsilon, cand);
            for (std::size_t v : cand) {
                const double d = distance(image, nodes[v]);
                if (d <= epsilon) edges.push_back({static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(l), d});
            }
        }
        // keep the closest map per target, lowest index on ties
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            if (a.target != b.target) return a.target < b.target;
            if (a.d != b.d) return a.d < b.d;
            return a.label < b.label;
        });
        edges.erase(std::unique(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.target == b.target; }),
                    edges.end());
        adjacency[u] = std::move(edges);
    });

    std::vector<std::size_t> offsets(nodes.size() + 1, 0);
    for (std::size_t u = 0; u < nodes.size(); ++u) offsets[u + 1] = offsets[u] + adjacency[u].size();
    std::vector<std::uint32_t> targets;
    std::vector<std::uint32_t> labels;
    targets.reserve(offsets.back());
    labels.reserve(offsets.back());
    for (auto& edges : adjacency) {
        for (const Edge& e : edges) {
            targets.push_back(e.target);
            labels.push_back(e.label);
        }
        std::vector<Edge>().swap(edges);
    }
    return ChainGraph(ifs, resolution, epsilon, std::move(nodes), std::move(offsets), std::move(targets), std::move(labels));
}

double witness_step_error(const IFSSpec& ifs, const ChainWitness& w) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (MapIndex l = 0; l < ifs.size(); ++l) best = std::min(best, distance(apply(ifs, l, w.points[i]), w.points[i + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}

bool validate_witness(const IFSSpec& ifs, const ChainWitness& w, double epsilon) {
    if (w.points.size() < 2 || w.labels.size() + 1 != w.points.size()) return false;
    for (std::size_t i = 0; i + 1 < w.points.size(); ++i) {
        if (distance(apply(ifs, w.labels[i], w.points[i]), w.points[i + 1]) > epsilon + kSlack) return false;
    }
    return true;
}

std::vector<bool> reachable_from(const ChainGraph& g, std::size_t source) { return bfs(g, source, nullptr); }

ChainSearch find_chain(const ChainGraph& g, const Point& x, const Point& y) {
    ChainSearch s;
    s.from_node = g.snap(x);
    s.to_node = g.snap(y);
    s.snap_from = distance(x, g.nodes()[s.from_node]);
    s.snap_to = distance(y, g.nodes()[s.to_node]);
    std::vector<std::size_t> parent(g.size(), g.size());
    const auto seen = bfs(g, s.from_node, &parent);
    s.reachable = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
    if (!seen[s.to_node]) {
        for (std::size_t u = 0; u < g.size(); ++u) {
            if (!seen[u]) continue;
            const bool left_open = u > 0 && !seen[u - 1];
            const bool right_open = u + 1 < g.size() && !seen[u + 1];
            if (left_open || right_open) s.frontier.push_back(u);
        }
        return s;
    }
    // walk parents back; the first hop out of the source is always recorded
    std::vector<std::size_t> path{s.to_node};
    std::size_t v = s.to_node;
    do {
        v = parent[v];
        path.push_back(v);
    } while (v != s.from_node);
    std::reverse(path.begin(), path.end());
    ChainWitness w;
    for (std::size_t i = 0; i < path.size(); ++i) {
        w.nodes.push_back(path[i]);
        w.points.push_back(g.nodes()[path[i]]);
        if (i + 1 < path.size()) w.labels.push_back(*g.edge_label(path[i], path[i + 1]));
    }
    if (!validate_witness(g.ifs(), w, g.epsilon())) throw DomainError("chain witness failed re-validation");
    s.found = true;
    s.witness = std::move(w);
    return s;
}

std::vector<std::size_t> strongly_connected_components(const ChainGraph& g) {
    // iterative Tarjan over nodes in index order
    const std::size_t n = g.size();
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unset);
    std::vector<std::size_t> low(n, 0);
    std::vector<std::size_t> comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next successor position)
    std::size_t counter = 0;
    std::size_t components = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [u, pos] = call.back();
            const auto succ = g.successors(u);
            if (pos < succ.size()) {
                const std::size_t v = succ[pos++];
                if (index[v] == unset) {
                    index[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = true;
                    call.emplace_back(v, 0);
                } else if (on_stack[v]) {
                    low[u] = std::min(low[u], index[v]);
                }
                continue;
            }
            const std::size_t done = u;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = components;
                } while (w != done);
                ++components;
            }
        }
    }
    return comp;
}

std::vector<std::size_t> chain_recurrent_set(const ChainGraph& g) {
    const auto comp = strongly_connected_components(g);
    std::vector<std::size_t> sizes(g.size(), 0);
    for (auto c : comp) ++sizes[c];
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (sizes[comp[u]] >= 2 || g.has_edge(u, u)) out.push_back(u);
    }
    return out;
}

TransitivityReport is_chain_transitive(const ChainGraph& g) {
    TransitivityReport r;
    if (g.size() == 0) return r;
    const auto comp = strongly_connected_components(g);
    r.components = *std::max_element(comp.begin(), comp.end()) + 1;
    // a single node needs its self-loop to chain back to itself
    r.transitive = r.components == 1 && (g.size() > 1 || g.has_edge(0, 0));
    if (r.transitive) return r;

    const auto seen = reachable_from(g, 0);
    std::optional<std::size_t> far;
    double far_d = -1.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (seen[v]) continue;
        const double d = distance(g.nodes()[0], g.nodes()[v]);
        if (d > far_d) {
            far_d = d;
            far = v;
        }
    }
    if (far) {
        r.counterexample = std::make_pair(std::size_t{0}, *far);
        return r;
    }
    for (std::size_t u = 1; u < g.size(); ++u) {
        if (!reachable_from(g, u)[0]) {
            r.counterexample = std::make_pair(u, std::size_t{0});
            return r;
        }
    }
    return r;
}

void write_edges_csv(std::ostream& os, const ChainGraph& g) {
    os << "u,v,lambda\n";
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto succ = g.successors(u);
        const auto lab = g.labels(u);
        for (std::size_t i = 0; i < succ.size(); ++i) os << u << ',' << succ[i] << ',' << lab[i] << '\n';
    }
}

void write_dot(std::ostream& os, const ChainGraph& g) {
    os << "digraph chain {\n";
    os << "  graph [epsilon=\"" << g.epsilon() << "\", resolution=\"" << g.resolution() << "\"];\n";
    for (std::size_t u = 0; u < g.size(); ++u) os << "  n" << u << " [label=\"" << format_point(g.nodes()[u]) << "\"];\n";
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto succ = g.successors(u);
        const auto lab = g.labels(u);
        for (std::size_t i = 0; i < succ.size(); ++i) {
            os << "  n" << u << " -> n" << succ[i] << " [label=\"" << lab[i] << "\"];\n";
        }
    }
    os << "}\n";
}

nlohmann::json to_json(const ChainWitness& w) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Point& p : w.points) pts.push_back(to_json(p));
    return {{"points", pts}, {"labels", w.labels}, {"nodes", w.nodes}, {"length", w.points.size()}};
}

nlohmann::json to_json(const ChainSearch& s, const ChainGraph& g) {
    nlohmann::json j{{"found", s.found},
                     {"from", to_json(g.nodes()[s.from_node])},
                     {"to", to_json(g.nodes()[s.to_node])},
                     {"snap_from", s.snap_from},
                     {"snap_to", s.snap_to},
                     {"reachable", s.reachable}};
    if (s.witness) {
        j["witness"] = to_json(*s.witness);
        j["max_step_error"] = witness_step_error(g.ifs(), *s.witness);
    } else {
        nlohmann::json f = nlohmann::json::array();
        for (auto u : s.frontier) f.push_back(to_json(g.nodes()[u]));
        j["frontier"] = f;
    }
    return j;
}

nlohmann::json to_json(const TransitivityReport& r, const ChainGraph& g) {
    nlohmann::json j{{"transitive", r.transitive}, {"components", r.components}};
    if (r.counterexample) {
        j["counterexample"] = {{"from", to_json(g.nodes()[r.counterexample->first])},
                               {"to", to_json(g.nodes()[r.counterexample->second])}};
    }
    return j;
}

}  // namespace ifs
