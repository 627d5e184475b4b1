#include "pdnet/graph.hpp"

#include "pdnet/random.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace pdnet {

Graph::Graph(std::size_t n) : adjacency_(n) {}

Graph::Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges)
    : adjacency_(n) {
    for (auto [i, j] : edges) {
        if (i >= n || j >= n) throw std::invalid_argument("edge endpoint out of range");
        if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i));
        adjacency_[i].push_back(j);
        adjacency_[j].push_back(i);
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
}

bool Graph::adjacent(NodeId i, NodeId j) const {
    const auto& nbrs = adjacency_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

bool Graph::is_complete() const {
    const std::size_t n = size();
    return n >= 1 && edge_count_ == n * (n - 1) / 2;
}

bool Graph::is_regular() const {
    return std::all_of(adjacency_.begin(), adjacency_.end(), [&](const auto& nbrs) {
        return nbrs.size() == adjacency_.front().size();
    });
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId i = 0; i < size(); ++i)
        for (NodeId j : adjacency_[i])
            if (i < j) out.emplace_back(i, j);
    return out;
}

Graph Graph::induced(std::span<const NodeId> keep) const {
    std::vector<std::size_t> remap(size(), size());
    for (std::size_t k = 0; k < keep.size(); ++k) remap.at(keep[k]) = k;
    std::vector<std::pair<NodeId, NodeId>> kept;
    for (auto [i, j] : edges())
        if (remap[i] < size() && remap[j] < size()) kept.emplace_back(remap[i], remap[j]);
    return Graph(keep.size(), kept);
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

NodeId LabeledGraph::index_of(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    return static_cast<NodeId>(it - ids.begin());
}

LabeledGraph load_edge_list(std::istream& in) {
    LabeledGraph result;
    std::unordered_map<std::string, NodeId> index;
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto intern = [&](const std::string& id) {
        auto [it, inserted] = index.try_emplace(id, result.ids.size());
        if (inserted) result.ids.push_back(id);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream tokens(line);
        std::vector<std::string> fields;
        for (std::string tok; tokens >> tok;) fields.push_back(tok);
        if (fields.empty() || fields.front().front() == '#') continue;
        if (fields.size() != 2)
            throw ParseError(lineno, "expected two node identifiers, got " +
                                         std::to_string(fields.size()) + " tokens");
        if (fields[0] == fields[1]) throw ParseError(lineno, "self-loop on '" + fields[0] + "'");
        const NodeId i = intern(fields[0]);
        const NodeId j = intern(fields[1]);
        edges.emplace_back(i, j);
    }
    result.graph = Graph(result.ids.size(), edges);
    return result;
}

LabeledGraph load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
    return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const LabeledGraph& g) {
    for (auto [i, j] : g.graph.edges()) out << g.ids[i] << ' ' << g.ids[j] << '\n';
}

void write_id_map(std::ostream& out, const LabeledGraph& g) {
    out << "identifier,index\n";
    for (std::size_t k = 0; k < g.ids.size(); ++k) out << g.ids[k] << ',' << k << '\n';
}

LabeledGraph with_index_labels(Graph g) {
    LabeledGraph out{std::move(g), {}};
    out.ids.reserve(out.graph.size());
    for (std::size_t k = 0; k < out.graph.size(); ++k) out.ids.push_back(std::to_string(k));
    return out;
}

Graph complete_graph(std::size_t n) {
    if (n < 2) throw std::domain_error("complete_graph requires n >= 2");
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(n * (n - 1) / 2);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph(n, edges);
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("random_graph requires n >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("edge probability must lie in [0,1]");
    Rng rng(seed);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (uniform01(rng) < p) edges.emplace_back(i, j);
    return Graph(n, edges);
}

}  // namespace pdnet
