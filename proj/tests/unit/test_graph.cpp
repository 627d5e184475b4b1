#include "doctest.h"

#include "pdnet/graph.hpp"

#include <numeric>
#include <sstream>

using namespace pdnet;

namespace {

void check_simple(const Graph& g) {
    std::size_t degree_sum = 0;
    for (NodeId i = 0; i < g.size(); ++i) {
        degree_sum += g.degree(i);
        for (NodeId j : g.neighbors(i)) {
            CHECK(j != i);
            CHECK(g.adjacent(j, i));
        }
        auto nbrs = g.neighbors(i);
        CHECK(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end());
    }
    CHECK(degree_sum == 2 * g.edge_count());
}

}  // namespace

TEST_CASE("edge list: path graph") {
    std::istringstream in("0 1\n1 2");
    auto lg = load_edge_list(in);
    CHECK(lg.graph.size() == 3);
    CHECK(lg.graph.edge_count() == 2);
    CHECK(lg.graph.adjacent(0, 1));
    CHECK(lg.graph.adjacent(1, 2));
    CHECK_FALSE(lg.graph.adjacent(0, 2));
}

TEST_CASE("edge list: duplicates collapse, ids by first appearance") {
    std::istringstream in("# header\n\na b\nb a\n  c   a  \n");
    auto lg = load_edge_list(in);
    CHECK(lg.graph.size() == 3);
    CHECK(lg.graph.edge_count() == 2);
    CHECK(lg.ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(lg.index_of("c") == 2);
    CHECK(lg.index_of("zz") == 3);
}

TEST_CASE("edge list: errors carry the line number") {
    std::istringstream selfloop("x x");
    try {
        load_edge_list(selfloop);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    std::istringstream three("a b\na b c\n");
    CHECK_THROWS_AS(load_edge_list(three), ParseError);
    std::istringstream one("a b\n\nq\n");
    try {
        load_edge_list(one);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("complete graph") {
    CHECK(complete_graph(2).edge_count() == 1);
    CHECK(complete_graph(4).edge_count() == 6);
    auto k10 = complete_graph(10);
    CHECK(k10.edge_count() == 45);
    for (NodeId i = 0; i < 10; ++i) CHECK(k10.degree(i) == 9);
    CHECK(k10.is_complete());
    CHECK(k10.is_regular());
    check_simple(k10);
    CHECK_THROWS_AS(complete_graph(1), std::domain_error);
}

TEST_CASE("random graph") {
    CHECK(random_graph(10, 0.0, 3).edge_count() == 0);
    CHECK(random_graph(10, 1.0, 3) == complete_graph(10));
    CHECK(random_graph(10, 0.4, 42) == random_graph(10, 0.4, 42));
    CHECK_FALSE(random_graph(30, 0.4, 1) == random_graph(30, 0.4, 2));
    CHECK_THROWS_AS(random_graph(5, 1.5, 0), std::domain_error);
    CHECK_THROWS_AS(random_graph(5, -0.1, 0), std::domain_error);
    for (std::uint64_t seed = 0; seed < 20; ++seed) check_simple(random_graph(25, 0.2, seed));
}

TEST_CASE("write then load preserves the edge set") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto lg = with_index_labels(random_graph(20, 0.3, seed));
        std::stringstream buf;
        write_edge_list(buf, lg);
        auto back = load_edge_list(buf);
        std::vector<std::pair<std::string, std::string>> a, b;
        for (auto [i, j] : lg.graph.edges()) a.emplace_back(lg.ids[i], lg.ids[j]);
        for (auto [i, j] : back.graph.edges()) {
            auto u = back.ids[i], v = back.ids[j];
            if (std::stoi(u) > std::stoi(v)) std::swap(u, v);
            b.emplace_back(u, v);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("id map csv and induced subgraph") {
    std::istringstream in("u v\nv w\n");
    auto lg = load_edge_list(in);
    std::ostringstream out;
    write_id_map(out, lg);
    CHECK(out.str() == "identifier,index\nu,0\nv,1\nw,2\n");

    std::vector<NodeId> keep{2, 1};
    auto sub = lg.graph.induced(keep);
    CHECK(sub.size() == 2);
    CHECK(sub.edge_count() == 1);
}
