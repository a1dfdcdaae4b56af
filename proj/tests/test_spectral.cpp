#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "toricgap/dense.hpp"
#include "toricgap/error.hpp"
#include "toricgap/spectral.hpp"

using namespace toricgap;

namespace {

Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXcd &m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::MatrixXcd block(const Eigen::MatrixXcd &full, const ConfigBasis &b) {
    const auto d = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = full(static_cast<Eigen::Index>(b.config(static_cast<std::size_t>(r))),
                           static_cast<Eigen::Index>(b.config(static_cast<std::size_t>(c))));
    return m;
}

SolverOptions tight(int k = 1) {
    SolverOptions o;
    o.k = k;
    o.tol = 1e-10;
    o.dense_threshold = 0;  // force Lanczos
    return o;
}

}  // namespace

TEST(Spectral, Multiplets) {
    const auto m = cluster_multiplets({0.0, 1e-12, 2.0, 2.0, 2.0, 3.5}, 1e-9);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].multiplicity, 2);
    EXPECT_EQ(m[1].multiplicity, 3);
    EXPECT_DOUBLE_EQ(m[2].value, 3.5);
}

TEST(Spectral, LanczosMatchesDenseFullSpace) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(
        lat, {PerturbationKind::Custom, 0.3, {{1.0, "X0 X1"}, {0.6, "Z2"}, {-0.4, "Y3 Y7"}, {0.8, "X5"}}});
    const ReducedOperator op(h);
    const SpectrumReport r = lowest_eigenvalues(op, tight(6));
    const Eigen::VectorXd ev = dense_eigenvalues(hamiltonian_matrix(h));
    ASSERT_GE(r.eigenvalues.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(r.eigenvalues[k], ev(static_cast<Eigen::Index>(k)), 1e-9);
        EXPECT_LT(r.residuals[k], 1e-9);
    }
    EXPECT_EQ(r.method.empty(), false);
}

TEST(Spectral, DegenerateGroundResolved) {
    // Unperturbed torus: 4-fold ground at 0, gap 2.
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const SpectrumReport r = lowest_eigenvalues(ReducedOperator(build_toric_code(lat)), tight(5));
    ASSERT_FALSE(r.multiplets.empty());
    EXPECT_NEAR(r.multiplets[0].value, 0.0, 1e-10);
    EXPECT_EQ(r.multiplets[0].multiplicity, 4);
    EXPECT_NEAR(r.gap, 2.0, 1e-10);
}

TEST(Spectral, SectorEnergiesMatchDenseBlocks) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const PerturbationSpec pert{PerturbationKind::ZField, 0.1, {}};
    const Eigen::MatrixXcd full = hamiltonian_matrix(build_perturbed(lat, pert));
    const auto reps = sector_energies(lat, pert, tight(2));
    ASSERT_EQ(reps.size(), 4u);
    const char *names[4] = {"++", "+-", "-+", "--"};
    for (std::size_t s = 0; s < 4; ++s) {
        EXPECT_EQ(reps[s].label, names[s]);
        const SectorBasis b = enumerate_sector(lat, parse_sector_label(lat, names[s]));
        const Eigen::VectorXd ev = dense_eigenvalues(block(full, *b.basis));
        EXPECT_NEAR(reps[s].ground, ev(0), 1e-9);
        EXPECT_NEAR(reps[s].eigenvalues[1], ev(1), 1e-9);
    }
    // Sector minima exhaust the x-free low spectrum of the full matrix.
    const Eigen::VectorXd all = dense_eigenvalues(full);
    EXPECT_NEAR(std::min({reps[0].ground, reps[1].ground, reps[2].ground, reps[3].ground}), all(0), 1e-9);
}

TEST(Spectral, SeedDoesNotChangeEigenvalues) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    const PerturbationSpec pert{PerturbationKind::ZField, 0.1, {}};
    SolverOptions a = tight(2), b = tight(2);
    b.seed = 99;
    const auto ra = sector_energies(lat, pert, a), rb = sector_energies(lat, pert, b);
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(ra[s].ground, rb[s].ground, 1e-9);
}

TEST(Spectral, SplittingDecreases) {
    SolverOptions opt;
    const SplittingReport s = splitting_scan({PerturbationKind::ZField, 0.1, {}}, {{2, 2}, {3, 3}}, opt);
    ASSERT_EQ(s.rows.size(), 2u);
    EXPECT_LT(s.rows[1].delta, s.rows[0].delta);
    EXPECT_GT(s.kappa, 0);
    EXPECT_EQ(s.flag, "ok");
}

TEST(Spectral, UnperturbedSplittingIsDegenerate) {
    const SplittingReport s = splitting_scan({PerturbationKind::ZField, 0.0, {}}, {{2, 2}, {3, 3}}, SolverOptions{});
    EXPECT_EQ(s.flag, "degenerate");
}

TEST(Spectral, ExcitationGapUnperturbed) {
    const Lattice lat = Lattice::build(Topology::Torus, 3, 3);
    BitVec syn(9);
    syn.set(0);
    syn.set(4);
    const ExcitationGap g = excitation_gap(lat, {PerturbationKind::ZField, 0.0, {}}, syn, SolverOptions{});
    EXPECT_NEAR(g.gap, 2.0, 1e-10);
    EXPECT_EQ(g.n_x, 2);
}

TEST(Spectral, XcIdentity) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(lat, {PerturbationKind::ZIsing, 0.15, {}});
    EdgeSet c = lat.empty_set();
    c.set(0);
    EXPECT_LT(xc_identity_residual(h, c, 1.0), 1e-10);
    c.set(5);
    EXPECT_LT(xc_identity_residual(h, c, 2.5), 1e-10);
}

TEST(Spectral, StringStateOnGaplessThinTorus) {
    const Lattice lat = Lattice::build(Topology::Torus, 4, 2);
    const HamiltonianSpec h = build_thin_torus_gapless(lat);
    const StringState full = string_state(h, thin_torus_cut(lat, 0, 2), 1, -1);
    EXPECT_NEAR(full.energy, -6.0, 1e-12);
    EXPECT_LT(full.residual, 1e-12);
    const StringState shorter = string_state(h, thin_torus_cut(lat, 0, 1), 1, -1);
    EXPECT_NEAR(shorter.energy - full.energy, 2.0, 1e-12);
}

TEST(Spectral, PartitionAmplitudeMatchesDense) {
    const Lattice lat = Lattice::build(Topology::Torus, 2, 2);
    const HamiltonianSpec h = build_perturbed(lat, {PerturbationKind::ZField, 0.1, {}});
    const auto gs = ground_states(lat);
    const StateVector &psi = gs.at({1, 1});
    const ReducedOperator op(h, psi.basis());

    const Eigen::MatrixXcd m = operator_matrix(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Eigen::VectorXcd v = to_eigen(psi);
    for (double n : {0.5, 2.0, 7.0}) {
        const Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
        double want = 0;
        for (Eigen::Index k = 0; k < c.size(); ++k) want += std::norm(c(k)) * std::exp(-n * es.eigenvalues()(k));
        EXPECT_NEAR(partition_amplitude(op, psi, n) / want, 1.0, 1e-10);
        PartitionOptions kry;
        kry.dense_max = 0;
        EXPECT_NEAR(partition_amplitude(op, psi, n, kry) / want, 1.0, 1e-7);
    }
}

TEST(Spectral, AsymptoticFitRecoversEnergy) {
    std::vector<double> ns, lz;
    for (int n = 1; n <= 20; ++n) {
        ns.push_back(n);
        lz.push_back(std::log(0.9 * std::exp(0.3 * n) + 0.1 * std::exp(-1.7 * n)));
    }
    const AsymptoticFit f = asymptotic_fit(ns, lz);
    EXPECT_NEAR(f.energy, -0.3, 1e-9);
    EXPECT_NEAR(f.c, std::log(0.9), 1e-8);
    EXPECT_TRUE(f.monotone);
    EXPECT_NEAR(f.gamma, 2.0, 0.05);
}

TEST(Spectral, LineFitAndErrors) {
    const LineFit f = fit_line({0, 1, 2}, {1, 3, 5});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_THROW(fit_line({1, 1}, {0, 1}), Error);
    EXPECT_THROW(asymptotic_fit({1, 2, 3}, {0, 0, 0}), Error);
    SolverOptions bad;
    bad.k = 0;
    EXPECT_THROW(lowest_eigenvalues(ReducedOperator(build_toric_code(Lattice::build(Topology::Torus, 2, 2))), bad),
                 Error);
}
