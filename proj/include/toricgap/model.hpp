#pragma once

#include <string>
#include <vector>

#include "toricgap/lattice.hpp"
#include "toricgap/pauli.hpp"

namespace toricgap {

enum class TermGroup { Star, Plaquette, Perturbation, Loop };
std::string to_string(TermGroup g);

/// coefficient * op, op a Hermitian Pauli string with phase +1.
struct Term {
    double coefficient;
    PauliString op;
    TermGroup group;
    int index;  // vertex, face, edge or loop number within the group
};

/// offset + sum of real-weighted Pauli terms on a fixed lattice.
struct HamiltonianSpec {
    Lattice lattice;
    double offset = 0.0;
    std::vector<Term> terms;

    std::size_t n_sites() const { return static_cast<std::size_t>(lattice.num_edges()); }
    /// Terms whose x-mask is empty, stabilizer or not.
    bool is_z_only(TermGroup g) const;
    bool all_commute() const;
    void add(const HamiltonianSpec &other);
    std::vector<Term> group(TermGroup g) const;
};

HamiltonianSpec operator+(HamiltonianSpec a, const HamiltonianSpec &b);

enum class PerturbationKind { ZField, ZIsing, ZLoopRow, Custom };
std::string to_string(PerturbationKind k);
PerturbationKind parse_perturbation_kind(const std::string &s);

struct CustomTerm {
    double coefficient;
    std::string pauli;
};

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::ZField;
    double beta = 0.0;
    std::vector<CustomTerm> terms;  // Custom only

    bool z_only(std::size_t n_sites) const;
};

HamiltonianSpec build_toric_code(const Lattice &lat);
/// ZField: beta sum_a Z_a. ZIsing: beta sum Z_a Z_b over edge pairs sharing a vertex.
/// ZLoopRow: (beta / l1) sum_m l_m. Custom: beta c_k / max|c| P_k.
HamiltonianSpec build_perturbation(const Lattice &lat, const PerturbationSpec &spec);
HamiltonianSpec build_perturbed(const Lattice &lat, const PerturbationSpec &spec);

/// l_m = prod_j Z on the vertical edges of column m (torus only).
PauliString column_loop(const Lattice &lat, int m);

/// H_TC + (1/l1) sum_m l_m.
HamiltonianSpec build_thin_torus_split(const Lattice &lat);
/// First dimension l1 = 2 L1:
/// H_TC - (2/L1) sum_{m<L1} (l_m + 1) - (2/L1) sum_{m>=L1} (1 - l_m).
HamiltonianSpec build_thin_torus_gapless(const Lattice &lat);
/// Cut {v(m, row) : m < L1}: applied to a ground state it produces the |X,-mu> state.
EdgeSet thin_torus_cut(const Lattice &lat, int row, int length);

/// T_1 (direction 1) or T_2 (direction 2).
PauliString loop_operator(const Lattice &lat, int direction);

enum class StringType { X, Z };

struct StringOperator {
    PauliString op;
    BitVec syndrome;  // flipped faces for X strings, flipped vertices for Z strings
    int n_particles;
};
StringOperator string_operator(const Lattice &lat, const EdgeSet &c, StringType type);

/// Faces whose plaquette overlaps c oddly.
BitVec face_syndrome(const Lattice &lat, const EdgeSet &c);

/// Literal X_C H X_C: every term picks up (-1)^{|C & z-mask|}.
HamiltonianSpec conjugated_hamiltonian(const HamiltonianSpec &h, const EdgeSet &c);

struct XParticleHamiltonian {
    HamiltonianSpec h_c;  // stabilizers untouched, perturbation and loop terms conjugated
    int n_x;
};
XParticleHamiltonian x_particle_hamiltonian(const HamiltonianSpec &h, const EdgeSet &c);

}  // namespace toricgap
