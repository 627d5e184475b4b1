#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdnet {

using NodeId = std::size_t;

/// Undirected simple graph on nodes 0..n-1. Neighbor lists are sorted and
/// symmetric, with no self-loops or duplicates. Immutable after construction.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n);

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are collapsed; self-loops and out-of-range endpoints throw
    /// std::invalid_argument.
    Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t size() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t degree(NodeId i) const { return adjacency_[i].size(); }

    std::span<const NodeId> neighbors(NodeId i) const { return adjacency_[i]; }
    bool adjacent(NodeId i, NodeId j) const;

    bool is_complete() const;
    bool is_regular() const;

    /// Edges as (i, j) with i < j, in lexicographic order.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    /// Subgraph induced by `keep`; node k of the result is keep[k].
    Graph induced(std::span<const NodeId> keep) const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::vector<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A graph together with the external identifiers of its nodes.
struct LabeledGraph {
    Graph graph;
    std::vector<std::string> ids;  // ids[index] = identifier

    /// Index of `id`, or size() if unknown.
    NodeId index_of(const std::string& id) const;
};

/// Parses a whitespace-separated edge list. Blank lines and lines starting
/// with '#' are skipped. Node indices are assigned in order of first
/// appearance.
LabeledGraph load_edge_list(std::istream& in);
LabeledGraph load_edge_list_file(const std::string& path);

void write_edge_list(std::ostream& out, const LabeledGraph& g);
/// Two-column CSV `identifier,index`.
void write_id_map(std::ostream& out, const LabeledGraph& g);

/// Identifiers "0".."n-1".
LabeledGraph with_index_labels(Graph g);

Graph complete_graph(std::size_t n);

/// Erdos-Renyi G(n, p): each unordered pair independently with probability p.
Graph random_graph(std::size_t n, double p, std::uint64_t seed);

}  // namespace pdnet
