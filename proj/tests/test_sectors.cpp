#include <gtest/gtest.h>

#include <map>
#include <set>

#include <Eigen/Dense>

#include "toricgap/dense.hpp"
#include "toricgap/error.hpp"
#include "toricgap/sectors.hpp"

using namespace toricgap;

namespace {

int dense_ground_count(const HamiltonianSpec &h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian_matrix(h), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    int c = 0;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (ev(k) < ev(0) + 1e-9) ++c;
    return c;
}

}  // namespace

TEST(Sectors, DegeneracyTorusAndPlanar) {
    for (auto [a, b] : {std::pair{2, 2}, {3, 3}, {4, 5}})
        EXPECT_EQ(ground_degeneracy(build_toric_code(Lattice::build(Topology::Torus, a, b))), 4u);
    for (auto [a, b] : {std::pair{2, 2}, {3, 3}, {4, 3}})
        EXPECT_EQ(ground_degeneracy(build_toric_code(Lattice::build(Topology::Planar, a, b))), 1u);
}

TEST(Sectors, DegeneracyMatchesDense) {
    EXPECT_EQ(dense_ground_count(build_toric_code(Lattice::build(Topology::Torus, 2, 2))), 4);
    EXPECT_EQ(dense_ground_count(build_toric_code(Lattice::build(Topology::Planar, 3, 2))), 1);
    EXPECT_EQ(ground_degeneracy(build_toric_code(Lattice::build(Topology::Planar, 3, 3))), 1u);
}

TEST(Sectors, DegeneracyNeedsCommutingTerms) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    HamiltonianSpec h = build_toric_code(lat);
    h.terms.push_back({0.1, PauliString::single(8, 0, 'Z'), TermGroup::Perturbation, 0});
    EXPECT_THROW(ground_degeneracy(h), Error);
}

TEST(Sectors, Gf2Rank) {
    std::vector<PauliString> rows = {PauliString::parse("X0 X1", 3), PauliString::parse("X1 X2", 3),
                                     PauliString::parse("X0 X2", 3), PauliString::parse("Z0", 3)};
    EXPECT_EQ(gf2_rank(rows), 3u);
}

TEST(Sectors, EnumerationMatchesBruteForce) {
    // Every z-configuration lands in exactly one (syndrome, sigma, mu) class.
    const Lattice lat = Lattice::build(Topology::Torus, 2, 3);
    const int n = lat.num_edges();
    std::map<std::string, std::set<std::uint64_t>> classes;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) classes[classify(lat, s).to_string()].insert(s);
    std::size_t total = 0;
    for (const auto &[name, set] : classes) {
        const SectorLabel l = classify(lat, *set.begin());
        const SectorBasis b = enumerate_sector(lat, l);
        ASSERT_EQ(b.size(), set.size()) << name;
        for (std::size_t k = 0; k < b.size(); ++k) EXPECT_TRUE(set.count(b.basis->config(k)));
        total += b.size();
    }
    EXPECT_EQ(total, std::size_t{1} << n);
    EXPECT_EQ(classes.size(), 4u * (std::size_t{1} << (lat.num_faces() - 1)));
}

TEST(Sectors, BasisIsSorted) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    const SectorBasis b = enumerate_sector(lat, trivial_label(lat, -1, 1));
    EXPECT_EQ(b.size(), 256u);
    const auto &c = b.basis->configs();
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    for (auto s : c) EXPECT_EQ(classify(lat, s).to_string(), "-+");
}

TEST(Sectors, LabelParsing) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    const SectorLabel l = parse_sector_label(lat, "+-,x-pair@(0,4)");
    EXPECT_EQ(l.sigma, 1);
    EXPECT_EQ(l.mu, -1);
    EXPECT_EQ(l.n_x(), 2);
    EXPECT_THROW(parse_sector_label(lat, "+*"), Error);
    EXPECT_THROW(parse_sector_label(lat, "++,x-pair@(2,2)"), Error);
    EXPECT_THROW(parse_sector_label(lat, "++,x-pair@(0,99)"), Error);
    const Lattice open = Lattice::build(Topology::Planar, 3, 3);
    EXPECT_NO_THROW(parse_sector_label(open, "++"));
    EXPECT_THROW(parse_sector_label(open, "-+"), Error);
    try {
        parse_sector_label(lat, "nonsense");
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}

TEST(Sectors, OddSyndromeRejected) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    SectorLabel l = trivial_label(lat, 1, 1);
    l.syndrome.set(0);
    EXPECT_THROW(enumerate_sector(lat, l), Error);
}

TEST(Sectors, ReducedOperatorMatchesDenseBlock) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(lat, {PerturbationKind::ZIsing, 0.2, {}});
    const Eigen::MatrixXcd full = hamiltonian_matrix(h);
    for (const auto &label : all_labels(lat, BitVec(4))) {
        const SectorBasis b = enumerate_sector(lat, label);
        const ReducedOperator op(h, b.basis);
        const Eigen::MatrixXcd red = operator_matrix(op);
        for (std::size_t r = 0; r < b.size(); ++r)
            for (std::size_t c = 0; c < b.size(); ++c)
                EXPECT_LT(std::abs(red(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                   full(static_cast<Eigen::Index>(b.basis->config(r)),
                                        static_cast<Eigen::Index>(b.basis->config(c)))),
                          1e-12);
    }
}

TEST(Sectors, FullOperatorMatchesDense) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(
        lat, {PerturbationKind::Custom, 0.2, {{1.0, "X0 Y3"}, {0.5, "Z1 Z2"}, {-0.7, "Y5"}}});
    const ReducedOperator op(h);
    EXPECT_LT((operator_matrix(op) - hamiltonian_matrix(h)).norm(), 1e-12);
}

TEST(Sectors, WorkersDoNotChangeResults) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    const HamiltonianSpec h = build_perturbed(lat, {PerturbationKind::ZField, 0.1, {}});
    const SectorBasis b = enumerate_sector(lat, trivial_label(lat, 1, 1));
    const ReducedOperator one(h, b.basis, 1), four(h, b.basis, 4);
    StateVector v(b.basis);
    for (std::size_t k = 0; k < v.dim(); ++k) v[k] = cplx(std::sin(1.0 + k), std::cos(2.0 * k));
    const StateVector a = one.apply(v), c = four.apply(v);
    for (std::size_t k = 0; k < v.dim(); ++k) EXPECT_EQ(a[k], c[k]);
}

TEST(Sectors, XTermsLeaveTheSector) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(lat, {PerturbationKind::Custom, 0.1, {{1.0, "X0"}}});
    const SectorBasis b = enumerate_sector(lat, trivial_label(lat, 1, 1));
    try {
        ReducedOperator op(h, b.basis);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Sector);
    }
}

TEST(Sectors, GroundStatesAreStabilized) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    const auto gs = ground_states(lat);
    ASSERT_EQ(gs.size(), 4u);
    for (const auto &[key, psi] : gs) {
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const StateVector w = apply(PauliString::x_string(lat.star(v)), psi);
            EXPECT_NEAR(std::abs(inner(psi, w) - 1.0), 0.0, 1e-12);
        }
        const StateVector t1 = apply(loop_operator(lat, 1), psi), t2 = apply(loop_operator(lat, 2), psi);
        EXPECT_NEAR(inner(psi, t1).real(), key.first, 1e-12);
        EXPECT_NEAR(inner(psi, t2).real(), key.second, 1e-12);
    }
}
