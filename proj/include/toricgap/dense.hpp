#pragma once

#include <Eigen/Dense>

#include "toricgap/model.hpp"
#include "toricgap/sectors.hpp"

namespace toricgap {

/// Dense 2^n matrix in the z-basis (index bit k = edge k, bit set means sigma^z = -1).
Eigen::MatrixXcd pauli_matrix(const PauliString &p);
Eigen::MatrixXcd hamiltonian_matrix(const HamiltonianSpec &h);
/// Columns are op applied to unit vectors.
Eigen::MatrixXcd operator_matrix(const LinearOperator &op);

Eigen::VectorXcd to_eigen(const StateVector &v);

/// Largest number of spins for which dense 2^n matrices are built.
inline constexpr std::size_t kMaxDenseSites = 12;

}  // namespace toricgap
