#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifs/ifs_core.hpp"

namespace ifs {

/// Epsilon-chain graph on an h-grid: u -> v iff min_lambda d(f_lambda(u), v) <= epsilon.
/// Adjacency is stored compressed; each edge keeps its minimizing map index.
class ChainGraph {
public:
    ChainGraph(IFSSpec ifs, double resolution, double epsilon, std::vector<Point> nodes,
               std::vector<std::size_t> offsets, std::vector<std::uint32_t> targets, std::vector<std::uint32_t> labels);

    const IFSSpec& ifs() const { return ifs_; }
    double resolution() const { return resolution_; }
    double epsilon() const { return epsilon_; }
    const std::vector<Point>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t edge_count() const { return targets_.size(); }

    std::span<const std::uint32_t> successors(std::size_t u) const;
    std::span<const std::uint32_t> labels(std::size_t u) const;
    bool has_edge(std::size_t u, std::size_t v) const;
    std::optional<MapIndex> edge_label(std::size_t u, std::size_t v) const;

    /// Index of the nearest node (lowest index on ties).
    std::size_t snap(const Point& p) const;

private:
    IFSSpec ifs_;
    double resolution_;
    double epsilon_;
    std::vector<Point> nodes_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> targets_;
    std::vector<std::uint32_t> labels_;
};

/// Throws GuardError unless resolution <= epsilon / 4, UnsupportedKind for
/// spaces without a grid.
ChainGraph build_chain_graph(const IFSSpec& ifs, double resolution, double epsilon, int threads = 0);

struct ChainWitness {
    std::vector<Point> points;
    std::vector<MapIndex> labels;
    std::vector<std::size_t> nodes;
};

/// Largest step error min_lambda d(f_lambda(p_i), p_{i+1}) evaluated on the raw maps.
double witness_step_error(const IFSSpec& ifs, const ChainWitness& w);
/// Every step satisfies d(f_{label}(p_i), p_{i+1}) <= epsilon + 1e-12.
bool validate_witness(const IFSSpec& ifs, const ChainWitness& w, double epsilon);

struct ChainSearch {
    bool found = false;
    std::size_t from_node = 0;
    std::size_t to_node = 0;
    double snap_from = 0.0;
    double snap_to = 0.0;
    std::optional<ChainWitness> witness;
    /// When not found: reachable nodes next to an unreachable grid neighbor.
    std::vector<std::size_t> frontier;
    std::size_t reachable = 0;
};

/// Shortest chain of length >= 1 between the snapped endpoints (breadth-first).
ChainSearch find_chain(const ChainGraph& g, const Point& x, const Point& y);

/// Nodes reachable in one or more steps from `source`.
std::vector<bool> reachable_from(const ChainGraph& g, std::size_t source);

/// Strongly connected component id per node, numbered in order of completion.
std::vector<std::size_t> strongly_connected_components(const ChainGraph& g);

/// Nodes with a self-loop or in a component of size >= 2, ascending.
std::vector<std::size_t> chain_recurrent_set(const ChainGraph& g);

struct TransitivityReport {
    bool transitive = false;
    std::size_t components = 0;
    /// A pair (x, y) with no chain from x to y.
    std::optional<std::pair<std::size_t, std::size_t>> counterexample;
};

TransitivityReport is_chain_transitive(const ChainGraph& g);

/// CSV edge list (u, v, lambda).
void write_edges_csv(std::ostream& os, const ChainGraph& g);
/// Graphviz digraph with nodes labeled by coordinates.
void write_dot(std::ostream& os, const ChainGraph& g);

nlohmann::json to_json(const ChainWitness& w);
nlohmann::json to_json(const ChainSearch& s, const ChainGraph& g);
nlohmann::json to_json(const TransitivityReport& r, const ChainGraph& g);

}  // namespace ifs
