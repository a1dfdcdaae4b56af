#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toricgap/model.hpp"

namespace toricgap {

/// Charge representation of a z-perturbed stabilizer model: one qubit per
/// site (1 = non-trivial charge, costing h0 = 1) and perturbations
/// V_i = coeff_i * prod_{s in flip_i} X_s. In a fixed x-free torus sector
/// (sigma, mu) the toric code with z-only perturbations is exactly of this
/// form, with the vacuum |0...0> playing the ground state |sigma mu>.
struct ExpansionModel {
    int n_sites = 0;
    std::vector<std::uint64_t> flip;
    std::vector<double> coeff;
    std::string label;

    std::size_t n_perturbations() const { return flip.size(); }
    std::size_t dim() const { return std::size_t{1} << n_sites; }
    /// Sites affected by the perturbations in I (bit i of I selects V_i).
    std::uint64_t closure(std::uint64_t perturbations) const;

    /// Signs follow a reference configuration of the sector, so products of
    /// Z over contractible loops are +1 and over the two windings sigma, mu.
    static ExpansionModel charge_sector(const Lattice &lat, const PerturbationSpec &pert, int sigma = 1, int mu = 1);
    /// One site, h = n, V = beta X.
    static ExpansionModel single_site(double beta);
};

/// Ground energy of the model restricted to even total charge (dense, small models only).
double model_ground_energy(const ExpansionModel &m);

struct Slice {
    std::uint64_t I = 0;  // perturbation indices
    std::uint64_t J = 0;  // charged sites, disjoint from the closure of I
    friend bool operator==(const Slice &, const Slice &) = default;
    friend auto operator<=>(const Slice &, const Slice &) = default;
};

/// Time-ordered list of slices; slice 0 acts first.
struct Configuration {
    std::vector<Slice> steps;
    int volume() const;
};

/// Evaluates T_{I,J} and configuration weights for one model. The local
/// alternating sums sum_L (-1)^{|I|-|L|} exp(-(sum_{closure} h + V_L)) are cached by I.
class WeightEngine {
  public:
    explicit WeightEngine(ExpansionModel model);

    const ExpansionModel &model() const { return model_; }
    /// v <- T_{I,J} v.
    void apply_T(const Slice &s, Eigen::VectorXd &v) const;
    Eigen::MatrixXd T_matrix(const Slice &s) const;
    /// <0| T_{N-1} ... T_0 |0>.
    double weight(const Configuration &c) const;
    /// Local alternating sum on the closure of I, as a 2^|closure| matrix.
    const Eigen::MatrixXd &local_alternating(std::uint64_t I) const;
    /// Largest eigenvalue of H_L = sum_{closure(I)} h + sum_{i in L} V_i.
    double local_max_energy(std::uint64_t I, std::uint64_t L) const;

  private:
    Eigen::MatrixXd local_exp(std::uint64_t sites, std::uint64_t L) const;
    Eigen::MatrixXd local_hamiltonian(std::uint64_t sites, std::uint64_t L) const;

    ExpansionModel model_;
    mutable std::map<std::uint64_t, Eigen::MatrixXd> cache_;
};

/// Space-time cells of a configuration thickened by one step in time.
std::size_t support_size(const ExpansionModel &m, const Configuration &c);
/// Cells (site, time) with site in closure(I_k) or J_k.
std::vector<std::uint64_t> used_sites(const ExpansionModel &m, const Configuration &c);

/// Dense operators for checking the one-step identities literally: site terms
/// h_s (projectors onto a charge), perturbations V_i with their ranges, and a vacuum vector.
struct DenseExpansion {
    std::vector<Eigen::MatrixXd> h;
    std::vector<Eigen::MatrixXd> v;
    std::vector<std::uint64_t> range;
    Eigen::VectorXd vacuum;

    int n_sites() const { return static_cast<int>(h.size()); }
    std::uint64_t closure(std::uint64_t I) const;

    /// Full z-basis of the edge spins; sites are the stars followed by the
    /// plaquettes. `edges` selects the perturbed edges (all when empty).
    static DenseExpansion toric_code(const Lattice &lat, const PerturbationSpec &pert, const std::vector<int> &edges = {});
    static DenseExpansion from_model(const ExpansionModel &m);
};

Eigen::MatrixXd build_T(const DenseExpansion &d, std::uint64_t I, std::uint64_t J);
/// Frobenius norm of sum_{J in complement of closure(I)} Q_J P_rest - Id.
double verify_partition_of_identity(const DenseExpansion &d, std::uint64_t I);
/// Frobenius norm of e^{-H} minus the alternating sum over I, L.
double verify_inclusion_exclusion(const DenseExpansion &d);

struct NormSample {
    std::uint64_t I;
    std::uint64_t J;
    double norm;
    double bound;
};

struct NormBoundReport {
    double beta;
    double c_hat;
    std::vector<NormSample> samples;
    double max_ratio;  // max norm / bound
    bool holds;
};

/// Samples (I, J) with 1 <= |I| <= max_I, measures c_hat as the largest
/// lambda_max(H_L)/|I| over the ensemble and every L in I, then compares
/// ||T_{I,J}|| with (2 beta e^c_hat)^{|I|} e^{-|J| h0}.
NormBoundReport verify_norm_bound(const WeightEngine &eng, double beta, int samples, std::uint64_t seed, int max_I = 3);

struct Polymer {
    Configuration config;
    double weight;
    int volume;
    std::vector<std::uint64_t> used;  // sites per slice
    int length() const { return static_cast<int>(config.steps.size()); }
};

/// All connected configurations starting at t = 0 with volume <= max_volume
/// and non-zero weight. Units are linked when they use a common site in the
/// same or adjacent slices.
std::vector<Polymer> enumerate_polymers(const WeightEngine &eng, int max_volume);

struct FactorizationReport {
    int pairs = 0;
    double max_residual = 0;  // |omega(c1 u c2) - omega(c1) omega(c2)|
    double min_product = 0;   // smallest |omega(c1) omega(c2)| among the pairs
};

/// Random pairs of enumerated polymers placed at random offsets with disjoint
/// thickened supports; the merged configuration is evaluated directly.
FactorizationReport verify_factorization(const WeightEngine &eng, const std::vector<Polymer> &polymers, int pairs,
                                         std::uint64_t seed);

/// Places c at offset t inside a configuration of the given length.
Configuration place(const Configuration &c, int offset, int length);
/// Slice-wise union; the pieces must not overlap.
Configuration merge(const Configuration &a, const Configuration &b);

/// Incompatibility of two polymers placed at time offsets a and b.
bool polymers_overlap(const Polymer &p, int a, const Polymer &q, int b);

/// sum over connected spanning subgraphs of (-1)^{#edges}; adjacency as bit rows.
double connected_subgraph_sum(const std::vector<std::uint32_t> &adjacency);

struct ClusterTerm {
    std::vector<std::pair<int, int>> elements;  // (polymer index, time offset), sorted
    int volume;
    int length;  // t_max - t_min
    double omega;
};

struct ClusterEnergy {
    int max_volume = 0;
    double e0 = 0;        // ground energy shift, -sum omega(X)
    double constant = 0;  // -sum l(X) omega(X)
    std::vector<double> e0_by_volume;  // index v: truncation at volume v
    std::size_t n_polymers = 0;
    std::vector<ClusterTerm> terms;
};

/// Truncated linked-cluster sums over collections X of at most max_polymers
/// polymers, total volume <= max_volume, with connected incompatibility graph
/// and earliest time 0.
ClusterEnergy cluster_energy(const WeightEngine &eng, int max_volume, int max_polymers = 4);
ClusterEnergy cluster_energy(const Lattice &lat, const PerturbationSpec &pert, int max_volume, int sigma = 1, int mu = 1);

/// Volume-graded sums of the same linked-cluster series from the generating
/// function Z_N(lambda) = <0| (sum_{I,J} lambda^{|I|+|J|} T_{I,J})^N |0>: for
/// N > V the coefficients of log Z_N up to lambda^V are exactly linear in N,
/// slope sum_{vol(X)=v} omega(X) and intercept -sum_{vol(X)=v} l(X) omega(X).
/// Includes clusters of any number of polymers.
struct ClusterSeries {
    int max_volume = 0;
    std::vector<double> omega_by_volume;    // index v: sum of omega(X) over X at t=0 with volume v
    std::vector<double> e0_by_volume;       // index v: truncation at volume v
    std::vector<double> constant_by_volume; // index v: truncation at volume v
    double e0 = 0;
    double constant = 0;
};
ClusterSeries cluster_series(const WeightEngine &eng, int max_volume);

/// sum over clusters with l(X) > N of (l(X) - N) omega(X).
double gap_term_tail(const ClusterEnergy &ce, int n);
double gap_term_tail(const Lattice &lat, const PerturbationSpec &pert, int n, int max_volume);

/// Connected space-time cell sets on Lambda x {0..N-1} (vertices, king
/// adjacency within a slice, same vertex in adjacent slices).
struct ClusterCounts {
    int n_cells;
    std::vector<std::uint64_t> total;   // index L: all connected sets of L cells
    std::vector<std::uint64_t> rooted;  // index L: those containing the root cell
    int root;
    double nu;      // max_L rooted(L) / rooted(L-1)
    double nu_fit;  // exp(slope) of ln rooted(L) against L
    bool bound_holds;  // rooted(L) <= nu^L for all L
};

struct SpaceTime {
    int n_cells;
    std::vector<std::vector<int>> adj;
};
SpaceTime space_time_graph(const Lattice &lat, int n_slices);

ClusterCounts count_clusters(const Lattice &lat, int n_slices, int max_volume);
/// Explicit list of cell sets (cell = t * n_vertices + v), capped at `cap` entries.
std::vector<std::vector<int>> enumerate_clusters(const Lattice &lat, int n_slices, int max_volume,
                                                 std::size_t cap = 1000000);

inline constexpr int kMaxClusterVolume = 8;

}  // namespace toricgap
