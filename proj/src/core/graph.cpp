#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace stochsync {

Graph::Graph(int node_count, std::vector<Edge> edges)
    : node_count_(node_count) {
    if (node_count < 1)
        throw ValidationError("graph: node_count must be >= 1, got " +
                              std::to_string(node_count));
    for (auto& [i, j] : edges) {
        if (i == j)
            throw ValidationError("graph: self-loop at node " +
                                  std::to_string(i));
        if (i < 0 || j < 0 || i >= node_count || j >= node_count)
            throw ValidationError("graph: edge (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") out of range for " +
                                  std::to_string(node_count) + " nodes");
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    neighbors_.resize(node_count_);
    for (const auto& [i, j] : edges_) {
        neighbors_[i].push_back(j);
        neighbors_[j].push_back(i);
    }
    description_ = "edge_list(n=" + std::to_string(node_count_) +
                   ",m=" + std::to_string(edges_.size()) + ")";
}

Matrix laplacian(const Graph& g) {
    const int n = g.node_count();
    Matrix l(n, n);
    for (const auto& [i, j] : g.edges()) {
        l(i, j) = -1.0;
        l(j, i) = -1.0;
        l(i, i) += 1.0;
        l(j, j) += 1.0;
    }
    return l;
}

SpectralInfo spectral_info(const Graph& g) {
    SpectralInfo info;
    info.eigenvalues = symmetric_eigenvalues(laplacian(g));
    const double lambda_max = info.eigenvalues.back();
    info.zero_tolerance = 1e-9 * std::max(1.0, lambda_max);
    if (g.node_count() == 1) {
        // No direction orthogonal to 1_N exists; the Rayleigh minimum is
        // vacuously +inf and a single node counts as connected.
        info.lambda2 = std::numeric_limits<double>::infinity();
        info.connected = true;
    } else {
        info.lambda2 = info.eigenvalues[1];
        info.connected = info.lambda2 > info.zero_tolerance;
    }
    return info;
}

TopologyKind topology_kind_from_string(const std::string& name) {
    if (name == "chain") return TopologyKind::chain;
    if (name == "ring") return TopologyKind::ring;
    if (name == "complete") return TopologyKind::complete;
    if (name == "star") return TopologyKind::star;
    if (name == "edge_list") return TopologyKind::edge_list;
    if (name == "erdos_renyi") return TopologyKind::erdos_renyi;
    throw ValidationError("unknown topology kind '" + name + "'");
}

std::string topology_kind_name(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::chain: return "chain";
        case TopologyKind::ring: return "ring";
        case TopologyKind::complete: return "complete";
        case TopologyKind::star: return "star";
        case TopologyKind::edge_list: return "edge_list";
        case TopologyKind::erdos_renyi: return "erdos_renyi";
    }
    return "?";
}

Graph build_topology(TopologyKind kind, int n, const TopologyParams& params) {
    std::vector<Edge> edges;
    switch (kind) {
        case TopologyKind::chain:
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            break;
        case TopologyKind::ring:
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            if (n >= 3) edges.emplace_back(0, n - 1);
            break;
        case TopologyKind::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
            break;
        case TopologyKind::star:
            for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case TopologyKind::edge_list:
            edges = params.edges;
            break;
        case TopologyKind::erdos_renyi: {
            const double p = params.edge_probability;
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError(
                    "erdos_renyi: edge probability must be in [0,1]");
            std::mt19937_64 eng(
                rng::derive_seed(params.seed, rng::Stream::graph, 0));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (unif(eng) < p) edges.emplace_back(i, j);
            break;
        }
    }
    Graph g(n, std::move(edges));
    std::ostringstream desc;
    desc << topology_kind_name(kind) << "(n=" << n;
    if (kind == TopologyKind::erdos_renyi)
        desc << ",p=" << params.edge_probability << ",seed=" << params.seed;
    if (kind == TopologyKind::edge_list) desc << ",m=" << g.edges().size();
    desc << ")";
    g.set_description(desc.str());
    return g;
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "nodes " << g.node_count() << "\n";
    for (const auto& [i, j] : g.edges()) out << i << " " << j << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    int line_no = 0;
    int n = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (n < 0) {
            std::string word;
            if (!(ls >> word)) continue; // blank prologue
            if (word != "nodes")
                throw ParseError(path, line_no,
                                 "expected header 'nodes N', got '" + word + "'");
            if (!(ls >> n) || n < 1)
                throw ParseError(path, line_no, "invalid node count");
            continue;
        }
        int i, j;
        if (!(ls >> i)) continue; // blank line
        if (!(ls >> j))
            throw ParseError(path, line_no, "expected 'i j' edge pair");
        std::string extra;
        if (ls >> extra)
            throw ParseError(path, line_no, "trailing tokens after edge pair");
        edges.emplace_back(i, j);
    }
    if (n < 0) throw ParseError(path, line_no, "missing 'nodes N' header");
    try {
        Graph g(n, std::move(edges));
        g.set_description("file(" + path + ")");
        return g;
    } catch (const ValidationError& e) {
        throw ParseError(path, line_no, e.what());
    }
}

} // namespace stochsync
