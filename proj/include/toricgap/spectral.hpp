#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "toricgap/model.hpp"
#include "toricgap/sectors.hpp"

namespace toricgap {

inline constexpr double kTolStabilizer = 1e-10;
inline constexpr double kTolPerturbed = 1e-8;

struct SolverOptions {
    int k = 1;
    double tol = kTolPerturbed;
    std::uint64_t seed = 1;
    int max_krylov = 150;
    int max_restarts = 60;
    /// Dimensions up to this size are diagonalized densely.
    std::size_t dense_threshold = 64;
    bool want_vectors = false;
};

struct Multiplet {
    double value;
    int multiplicity;
};

struct SpectrumReport {
    std::string label;
    std::size_t dim = 0;
    std::vector<double> eigenvalues;  // ascending; may exceed k when the top multiplet is degenerate
    std::vector<double> residuals;
    std::vector<Multiplet> multiplets;
    double ground = std::numeric_limits<double>::quiet_NaN();
    /// Second multiplet minus the first; NaN when only one multiplet was resolved.
    double gap = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    int restarts = 0;
    std::uint64_t seed = 0;
    double tol = 0;
    std::string method;
    std::vector<Eigen::VectorXcd> vectors;
};

/// Multiplets formed by chaining neighbours closer than `width`.
std::vector<Multiplet> cluster_multiplets(const std::vector<double> &sorted_values, double width);

/// Lowest eigenvalues of a Hermitian operator by Lanczos with full
/// reorthogonalization and deflation of converged pairs. Throws Convergence.
SpectrumReport lowest_eigenvalues(const LinearOperator &op, const SolverOptions &opt);

/// Ground energies of the four (sigma, mu) sectors with the given plaquette
/// syndrome (trivial when empty). Requires a z-only perturbation.
std::vector<SpectrumReport> sector_energies(const Lattice &lat, const PerturbationSpec &pert, const SolverOptions &opt,
                                            const BitVec &syndrome = {}, int workers = 1);
/// Same for an explicit Hamiltonian whose terms preserve the sectors.
std::vector<SpectrumReport> sector_energies(const HamiltonianSpec &h, const SolverOptions &opt,
                                            const BitVec &syndrome = {}, int workers = 1);

struct SplittingRow {
    int l1;
    int l2;
    std::vector<double> energies;  // ++, +-, -+, --
    double delta;
};

struct SplittingReport {
    double beta = 0;
    std::vector<SplittingRow> rows;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    /// "ok", "degenerate" (some delta at solver precision), "non-decaying" (kappa <= 0)
    /// or "undetermined" (fewer than two distinct abscissas).
    std::string flag;
};

/// Delta = max - min of the sector ground energies per torus size; ln Delta fitted against min(l1, l2).
SplittingReport splitting_scan(const PerturbationSpec &pert, const std::vector<std::pair<int, int>> &sizes,
                               const SolverOptions &opt, int workers = 1);

struct ExcitationGap {
    double gap;
    double e_excited;
    double e_ground;
    int n_x;
};

/// min over sectors of E(syndrome) minus min over sectors of E(trivial).
ExcitationGap excitation_gap(const Lattice &lat, const PerturbationSpec &pert, const BitVec &syndrome,
                             const SolverOptions &opt, int workers = 1);

/// max over the four |sigma mu> of |<psi|X_C e^{-N H} X_C|psi> - <psi|e^{-N (H_C + n_x)}|psi>|,
/// with H_C from x_particle_hamiltonian. Dense; at most 12 edges.
double xc_identity_residual(const HamiltonianSpec &h, const EdgeSet &c, double n);

struct StringState {
    double energy;    // <psi|H|psi> for psi = X_C |sigma mu>
    double residual;  // ||H psi - energy psi||
    int n_x;
};
/// H applied to X_C |sigma mu>, evaluated as X_C H X_C on |sigma mu>.
StringState string_state(const HamiltonianSpec &h, const EdgeSet &c, int sigma, int mu);

struct PartitionOptions {
    std::size_t dense_max = 4096;
    double rel_tol = 1e-8;
    int krylov_dim = 40;
    int max_steps = 4096;
};

/// <psi| e^{-N H} |psi> for a fixed operator and state. Small operators are
/// diagonalized once; larger ones are propagated with Krylov steps, halving
/// the step until successive grids agree.
class PartitionEvaluator {
  public:
    PartitionEvaluator(const LinearOperator &op, Eigen::VectorXcd psi, PartitionOptions opt = {});

    double log_z(double n) const;
    double z(double n) const;
    bool dense() const { return dense_; }

  private:
    double krylov_log_norm(double tau_total, int steps) const;

    const LinearOperator &op_;
    Eigen::VectorXcd psi_;
    PartitionOptions opt_;
    bool dense_ = false;
    Eigen::VectorXd energies_;
    Eigen::VectorXd weights_;
};

double partition_amplitude(const LinearOperator &op, const StateVector &psi, double n, PartitionOptions opt = {});

struct AsymptoticFit {
    double c;
    double energy;
    /// Decay rate of ln|residual| on the head of the series; +inf when the residuals vanish.
    double gamma;
    bool monotone;
    std::vector<double> residuals;
};

/// log Z(N) ~ c - E N on the tail half of the series.
AsymptoticFit asymptotic_fit(const std::vector<double> &ns, const std::vector<double> &log_z);

struct LineFit {
    double slope;
    double intercept;
    double rms;
};
LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace toricgap
