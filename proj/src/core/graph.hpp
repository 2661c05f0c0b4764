// Undirected simple graphs, their Laplacians, and the algebraic
// connectivity lambda2 that enters the synchronization condition.

#ifndef STOCHSYNC_CORE_GRAPH_HPP
#define STOCHSYNC_CORE_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/linalg.hpp"

namespace stochsync {

using Edge = std::pair<int, int>; // normalized to first < second

enum class TopologyKind {
    chain,
    ring,
    complete,
    star,
    edge_list,
    erdos_renyi,
};

class Graph {
public:
    // Edges are validated (0 <= i,j < n, no self-loops), normalized and
    // de-duplicated. Throws ValidationError on out-of-range or self-loop.
    Graph(int node_count, std::vector<Edge> edges);

    int node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }
    int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }

    // One-line description used in run metadata, e.g. "chain(n=5)".
    const std::string& description() const { return description_; }
    void set_description(std::string d) { description_ = std::move(d); }

private:
    int node_count_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> neighbors_;
    std::string description_;
};

struct SpectralInfo {
    std::vector<double> eigenvalues; // ascending, eigenvalues[0] ~ 0
    double lambda2 = 0.0;            // +inf for the single-node graph
    bool connected = false;
    double zero_tolerance = 0.0;     // 1e-9 * max(1, lambda_max)
};

// L = Delta - A. Symmetric, rows sum to zero.
Matrix laplacian(const Graph& g);

// Laplacian spectrum. Throws EigensolverError if the solver stalls.
SpectralInfo spectral_info(const Graph& g);

struct TopologyParams {
    double edge_probability = 0.0; // erdos_renyi
    std::uint64_t seed = 0;        // erdos_renyi
    std::vector<Edge> edges;       // edge_list
};

Graph build_topology(TopologyKind kind, int n, const TopologyParams& params = {});

TopologyKind topology_kind_from_string(const std::string& name);
std::string topology_kind_name(TopologyKind kind);

// Plain-text edge list: header line "nodes N", then one "i j" pair per line.
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

} // namespace stochsync

#endif
