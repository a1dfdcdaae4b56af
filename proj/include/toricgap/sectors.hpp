#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toricgap/model.hpp"

namespace toricgap {

/// Rank over GF(2) of the symplectic rows [x | z].
std::size_t gf2_rank(const std::vector<PauliString> &rows);

/// 2^(n - rank) for a Hamiltonian of mutually commuting Pauli terms.
std::size_t ground_degeneracy(const HamiltonianSpec &h);

struct SectorLabel {
    int sigma = 1;   // T_1 eigenvalue
    int mu = 1;      // T_2 eigenvalue
    BitVec syndrome; // faces with plaquette eigenvalue -1; empty means trivial

    int n_x() const { return static_cast<int>(syndrome.count()); }
    std::string to_string() const;
};

/// "++", "+-", "-+", "--", optionally followed by ",x-pair@(f1,f2)".
/// Planar patches accept only "++".
SectorLabel parse_sector_label(const Lattice &lat, const std::string &text);
SectorLabel trivial_label(const Lattice &lat, int sigma, int mu);
SectorLabel x_pair_label(const Lattice &lat, int sigma, int mu, int f1, int f2);
/// The four (sigma, mu) labels in the order ++, +-, -+, -- (only ++ on the planar patch).
std::vector<SectorLabel> all_labels(const Lattice &lat, const BitVec &syndrome);

/// Plaquette syndrome and winding parities of one z-configuration.
SectorLabel classify(const Lattice &lat, std::uint64_t config);

struct SectorBasis {
    Lattice lattice;
    SectorLabel label;
    std::shared_ptr<const ConfigBasis> basis;

    std::size_t size() const { return basis->size(); }
};

/// All z-configurations with the label's syndrome and winding parities, ascending.
SectorBasis enumerate_sector(const Lattice &lat, const SectorLabel &label);

/// Uniform superpositions |sigma mu> over the trivial-syndrome sectors.
std::map<std::pair<int, int>, StateVector> ground_states(const Lattice &lat);

/// Hermitian linear operator on a fixed basis.
class LinearOperator {
  public:
    virtual ~LinearOperator() = default;
    virtual std::size_t dim() const = 0;
    virtual void apply(const cplx *in, cplx *out) const = 0;
};

/// Sparse matvec of a Hamiltonian restricted to a reduced basis (or the full
/// z-basis when constructed without one). Rows are independent, so results
/// do not depend on the worker count.
class ReducedOperator : public LinearOperator {
  public:
    /// Throws Sector if some term does not preserve the basis.
    ReducedOperator(const HamiltonianSpec &h, std::shared_ptr<const ConfigBasis> basis, int workers = 1);
    /// Full 2^n space.
    explicit ReducedOperator(const HamiltonianSpec &h, int workers = 1);

    std::size_t dim() const override { return diag_.size(); }
    void apply(const cplx *in, cplx *out) const override;
    StateVector apply(const StateVector &v) const;

    const std::shared_ptr<const ConfigBasis> &basis() const { return basis_; }
    std::size_t n_sites() const { return n_; }
    const std::vector<double> &diagonal() const { return diag_; }

  private:
    void build(const HamiltonianSpec &h);

    std::size_t n_;
    std::shared_ptr<const ConfigBasis> basis_;
    int workers_;
    std::vector<double> diag_;
    struct Hop {
        std::vector<std::uint32_t> col;
        std::vector<cplx> amp;
    };
    std::vector<Hop> hops_;
};

/// Runs f(begin, end) over [0, n) split into contiguous chunks.
void parallel_rows(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)> &f);

}  // namespace toricgap
