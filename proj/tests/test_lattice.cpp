#include <gtest/gtest.h>

#include <set>

#include "toricgap/error.hpp"
#include "toricgap/lattice.hpp"

using namespace toricgap;

TEST(Lattice, TorusCounts) {
    for (auto [a, b] : {std::pair{2, 2}, {3, 3}, {4, 3}, {2, 5}}) {
        const Lattice lat = Lattice::build(Topology::Torus, a, b);
        EXPECT_EQ(lat.num_edges(), 2 * a * b);
        EXPECT_EQ(lat.num_vertices(), a * b);
        EXPECT_EQ(lat.num_faces(), a * b);
    }
}

TEST(Lattice, PlanarCounts) {
    const Lattice lat = Lattice::build(Topology::Planar, 3, 4);
    EXPECT_EQ(lat.num_edges(), 2 * 4 + 3 * 3);
    EXPECT_EQ(lat.num_vertices(), 12);
    EXPECT_EQ(lat.num_faces(), 2 * 3);
    // Euler characteristic of a disc.
    EXPECT_EQ(lat.num_vertices() - lat.num_edges() + lat.num_faces(), 1);
}

TEST(Lattice, TorusEdgeFormula) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 2);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) {
            EXPECT_EQ(lat.edge_index(i, j, EdgeDir::Horizontal), 2 * (j * 3 + i));
            EXPECT_EQ(lat.edge_index(i, j, EdgeDir::Vertical), 2 * (j * 3 + i) + 1);
        }
    for (int e = 0; e < lat.num_edges(); ++e) {
        const EdgeCoord c = lat.edge_coord(e);
        EXPECT_EQ(lat.edge_index(c.i, c.j, c.dir), e);
    }
}

TEST(Lattice, RejectsTinyLattices) {
    EXPECT_THROW(Lattice::build(Topology::Torus, 1, 3), Error);
    EXPECT_THROW(Lattice::build(Topology::Planar, 3, 0), Error);
    try {
        Lattice::build(Topology::Torus, 1, 1);
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Sizing);
    }
}

TEST(Lattice, PlanarMissingEdge) {
    const Lattice lat = Lattice::build(Topology::Planar, 3, 3);
    EXPECT_FALSE(lat.has_edge(2, 0, EdgeDir::Horizontal));
    EXPECT_THROW(lat.edge_index(2, 0, EdgeDir::Horizontal), Error);
}

TEST(Lattice, StarsAndPlaquettesOnTorus) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 4);
    std::vector<int> in_star(static_cast<std::size_t>(lat.num_edges())), in_plaq(in_star.size());
    for (int v = 0; v < lat.num_vertices(); ++v) {
        const EdgeSet s = lat.star(v);
        EXPECT_EQ(s.count(), 4u);
        for (auto e : s.indices()) ++in_star[e];
    }
    for (int f = 0; f < lat.num_faces(); ++f) {
        const EdgeSet p = lat.plaquette(f);
        EXPECT_EQ(p.count(), 4u);
        for (auto e : p.indices()) ++in_plaq[e];
    }
    for (std::size_t e = 0; e < in_star.size(); ++e) {
        EXPECT_EQ(in_star[e], 2);
        EXPECT_EQ(in_plaq[e], 2);
    }
    // X-stars and Z-plaquettes commute: even overlap everywhere.
    for (int v = 0; v < lat.num_vertices(); ++v)
        for (int f = 0; f < lat.num_faces(); ++f) EXPECT_FALSE(overlap_parity(lat.star(v), lat.plaquette(f)));
}

TEST(Lattice, EndpointsMatchStars) {
    for (auto topo : {Topology::Torus, Topology::Planar}) {
        const Lattice lat = Lattice::build(topo, 3, 3);
        for (int e = 0; e < lat.num_edges(); ++e) {
            const auto ends = lat.endpoints(e);
            EXPECT_NE(ends[0], ends[1]);
            for (int v = 0; v < lat.num_vertices(); ++v)
                EXPECT_EQ(lat.star(v).test(static_cast<std::size_t>(e)), v == ends[0] || v == ends[1]);
        }
    }
}

TEST(Lattice, FacesOfEdge) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    for (int e = 0; e < lat.num_edges(); ++e) {
        const auto faces = lat.faces_of_edge(e);
        ASSERT_EQ(faces.size(), 2u);
        for (int f : faces) EXPECT_TRUE(lat.plaquette(f).test(static_cast<std::size_t>(e)));
    }
    const Lattice open = Lattice::build(Topology::Planar, 3, 3);
    std::size_t boundary = 0;
    for (int e = 0; e < open.num_edges(); ++e)
        if (open.faces_of_edge(e).size() == 1) ++boundary;
    EXPECT_EQ(boundary, 8u);
}

TEST(Lattice, HomologyCycles) {
    const Lattice lat = Lattice::build(Topology::Torus, 4, 3);
    const EdgeSet c1 = lat.homology_cycle(1), c2 = lat.homology_cycle(2);
    EXPECT_EQ(c1.count(), 4u);
    EXPECT_EQ(c2.count(), 3u);
    // Closed z-cycles: every star overlaps evenly.
    for (int v = 0; v < lat.num_vertices(); ++v) {
        EXPECT_FALSE(overlap_parity(lat.star(v), c1));
        EXPECT_FALSE(overlap_parity(lat.star(v), c2));
    }
    // Closed dual cycles commute with every plaquette.
    const EdgeSet d1 = lat.dual_cycle(1), d2 = lat.dual_cycle(2);
    for (int f = 0; f < lat.num_faces(); ++f) {
        EXPECT_FALSE(overlap_parity(lat.plaquette(f), d1));
        EXPECT_FALSE(overlap_parity(lat.plaquette(f), d2));
    }
    EXPECT_EQ(overlap_count(c1, d2), 1u);
    EXPECT_EQ(overlap_count(c2, d1), 1u);
    EXPECT_FALSE(overlap_parity(c1, d1));
    EXPECT_FALSE(overlap_parity(c2, d2));
}

TEST(Lattice, TranslationIsBijective) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 4);
    std::set<int> image;
    for (int e = 0; e < lat.num_edges(); ++e) {
        const int t = lat.translate_edge(e, 2, 1);
        EXPECT_EQ(lat.edge_coord(t).dir, lat.edge_coord(e).dir);
        image.insert(t);
        EXPECT_EQ(lat.translate_edge(t, -2, -1), e);
    }
    EXPECT_EQ(image.size(), static_cast<std::size_t>(lat.num_edges()));
}

TEST(Lattice, KingNeighbours) {
    EXPECT_EQ(Lattice::build(Topology::Torus, 3, 3).king_neighbours(4).size(), 8u);
    EXPECT_EQ(Lattice::build(Topology::Torus, 2, 2).king_neighbours(0).size(), 3u);
    EXPECT_EQ(Lattice::build(Topology::Planar, 3, 3).king_neighbours(0).size(), 3u);
    EXPECT_EQ(Lattice::build(Topology::Planar, 3, 3).king_neighbours(4).size(), 8u);
    const Lattice lat = Lattice::build(Topology::Torus, 4, 5);
    for (int v = 0; v < lat.num_vertices(); ++v)
        for (int w : lat.king_neighbours(v)) {
            const auto nb = lat.king_neighbours(w);
            EXPECT_NE(std::find(nb.begin(), nb.end(), v), nb.end());
        }
}

TEST(Lattice, TopologyNames) {
    EXPECT_EQ(parse_topology("torus"), Topology::Torus);
    EXPECT_EQ(parse_topology(to_string(Topology::Planar)), Topology::Planar);
    EXPECT_THROW(parse_topology("sphere!"), Error);
}
