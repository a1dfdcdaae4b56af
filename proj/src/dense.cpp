#include "toricgap/dense.hpp"

#include "toricgap/error.hpp"

namespace toricgap {

Eigen::MatrixXcd pauli_matrix(const PauliString &p) {
    require(p.size() <= kMaxDenseSites, ErrorKind::Capacity, "dense matrices are limited to 12 spins");
    const std::size_t dim = std::size_t{1} << p.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        BasisAction a = act_on_config(p, s);
        m(static_cast<Eigen::Index>(a.target), static_cast<Eigen::Index>(s)) += a.amplitude;
    }
    return m;
}

Eigen::MatrixXcd hamiltonian_matrix(const HamiltonianSpec &h) {
    require(h.n_sites() <= kMaxDenseSites, ErrorKind::Capacity, "dense matrices are limited to 12 spins");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_sites());
    Eigen::MatrixXcd m = h.offset * Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto &t : h.terms) m += t.coefficient * pauli_matrix(t.op);
    return m;
}

Eigen::MatrixXcd operator_matrix(const LinearOperator &op) {
    const auto dim = static_cast<Eigen::Index>(op.dim());
    require(dim <= 8192, ErrorKind::Capacity, "dense operator matrices are limited to dimension 8192");
    Eigen::MatrixXcd m(dim, dim);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim), col(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        e(j) = 1;
        op.apply(e.data(), col.data());
        m.col(j) = col;
        e(j) = 0;
    }
    return m;
}

Eigen::VectorXcd to_eigen(const StateVector &v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.dim()));
    for (std::size_t i = 0; i < v.dim(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

}  // namespace toricgap
