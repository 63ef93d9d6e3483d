#include "graphdeconv/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace graphdeconv;

TEST(EdgeList, ParsesWeightsAndComments) {
    std::istringstream in("# comment\n0 1\n1 2 0.5\n\n  2 3   2\n");
    const auto edges = io::read_edges(in);
    ASSERT_EQ(edges.size(), 3u);
    EXPECT_EQ(edges[1].weight, 0.5);
    const Graph g = io::graph_from_edges(edges);
    EXPECT_EQ(g.n_nodes(), 4);
    EXPECT_EQ(g.adjacency()(0, 1), 1.0);
    EXPECT_EQ(g.adjacency()(2, 1), 0.5);
    EXPECT_EQ(g.adjacency()(3, 2), 2.0);
}

TEST(EdgeList, MalformedLinesReportLineNumber) {
    std::istringstream bad("0 1\n0 x\n");
    try {
        io::read_edges(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream neg("0 1 -2\n");
    EXPECT_THROW(io::read_edges(neg), ParseError);
    std::istringstream extra("0 1 1 1\n");
    EXPECT_THROW(io::read_edges(extra), ParseError);
}

TEST(EdgeList, DuplicateAndSelfLoopRejected) {
    std::istringstream dup("0 1\n1 0\n");
    EXPECT_THROW(io::graph_from_edges(io::read_edges(dup)), ValidationError);
    std::istringstream loop("0 0\n");
    EXPECT_THROW(io::graph_from_edges(io::read_edges(loop)), ValidationError);
}

TEST(EdgeList, WriteThenReadPreservesGraph) {
    Matrix a = Matrix::Zero(4, 4);
    a(0, 1) = a(1, 0) = 0.1;
    a(2, 3) = a(3, 2) = 3.0;
    a(1, 3) = a(3, 1) = 1.0 / 3.0;
    std::stringstream buf;
    io::write_edges(buf, Graph(a));
    EXPECT_EQ(io::graph_from_edges(io::read_edges(buf), 4).adjacency(), a);
}

TEST(MatrixCsv, ExactRoundtrip) {
    Matrix m(2, 3);
    m << 0.1, -2.5e-300, 1.0 / 3.0, 7, 0, -1e17;
    std::stringstream buf;
    io::write_matrix_csv(buf, m);
    EXPECT_EQ(io::read_matrix_csv(buf), m);
    std::istringstream ragged("1,2\n3\n");
    EXPECT_THROW(io::read_matrix_csv(ragged), ParseError);
}
