#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "toricgap/bitvec.hpp"

namespace toricgap {

using cplx = std::complex<double>;

/// n-spin Pauli operator i^phase * prod_k P_k with P_k in {I, X, Y, Z}.
/// A site set in both masks is Y (Hermitian), i.e. Y = i X Z.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::size_t n) : x_(n), z_(n) {}
    PauliString(BitVec x, BitVec z, int phase = 0);

    static PauliString identity(std::size_t n) { return PauliString(n); }
    static PauliString x_string(const BitVec &sites) { return PauliString(sites, BitVec(sites.size())); }
    static PauliString z_string(const BitVec &sites) { return PauliString(BitVec(sites.size()), sites); }
    /// One-site operator; op in {'I','X','Y','Z'}.
    static PauliString single(std::size_t n, std::size_t site, char op);

    std::size_t size() const noexcept { return x_.size(); }
    const BitVec &x() const noexcept { return x_; }
    const BitVec &z() const noexcept { return z_; }
    /// Exponent k of the global factor i^k, in [0, 4).
    int phase() const noexcept { return phase_; }
    cplx phase_factor() const;

    bool is_identity() const { return x_.none() && z_.none(); }
    bool is_z_only() const { return x_.none(); }
    /// Pauli products of I/X/Y/Z are Hermitian, so only the global phase matters.
    bool is_hermitian() const noexcept { return phase_ % 2 == 0; }
    std::size_t weight() const { return (x_ | z_).count(); }
    std::size_t y_count() const { return overlap_count(x_, z_); }

    PauliString with_phase(int phase) const;
    PauliString negated() const { return with_phase(phase_ + 2); }

    friend PauliString operator*(const PauliString &a, const PauliString &b);
    friend bool operator==(const PauliString &a, const PauliString &b) = default;

    std::string to_string() const;
    /// Parses "X3 Z7 Z8", "+i X0 Y2", "-Z1", "I". Sites must be < n; repeated
    /// sites are multiplied left to right.
    static PauliString parse(const std::string &text, std::size_t n);

  private:
    BitVec x_;
    BitVec z_;
    int phase_ = 0;
};

PauliString multiply(const PauliString &a, const PauliString &b);
bool commutes(const PauliString &a, const PauliString &b);
/// u p u for an involutory Hermitian u; the result is +p or -p.
PauliString conjugate(const PauliString &u, const PauliString &p);

/// Action on one z-basis configuration (bit = 1 means sigma^z = -1):
/// P|s> = amplitude * |s ^ x>.
struct BasisAction {
    std::uint64_t target;
    cplx amplitude;
};
BasisAction act_on_config(const PauliString &p, std::uint64_t config);

/// Sorted list of z-configurations (edge k = bit k) with binary-search lookup.
class ConfigBasis {
  public:
    ConfigBasis(std::size_t n_sites, std::vector<std::uint64_t> configs);

    std::size_t n_sites() const noexcept { return n_; }
    std::size_t size() const noexcept { return configs_.size(); }
    std::uint64_t config(std::size_t idx) const { return configs_[idx]; }
    const std::vector<std::uint64_t> &configs() const noexcept { return configs_; }
    /// Position of the configuration, or -1 when absent.
    std::int64_t find(std::uint64_t config) const;

  private:
    std::size_t n_;
    std::vector<std::uint64_t> configs_;
};

/// Amplitudes over either the full 2^n z-basis (basis == nullptr) or a reduced basis.
class StateVector {
  public:
    StateVector() = default;
    /// Zero vector on the full basis.
    explicit StateVector(std::size_t n_sites);
    /// Zero vector on the reduced basis.
    explicit StateVector(std::shared_ptr<const ConfigBasis> basis);

    static StateVector basis_state(std::size_t n_sites, std::uint64_t config);

    std::size_t n_sites() const noexcept { return n_; }
    std::size_t dim() const noexcept { return amp_.size(); }
    const std::shared_ptr<const ConfigBasis> &basis() const noexcept { return basis_; }
    bool is_reduced() const noexcept { return basis_ != nullptr; }
    std::uint64_t config(std::size_t idx) const { return basis_ ? basis_->config(idx) : idx; }
    std::int64_t index_of(std::uint64_t config) const;

    cplx &operator[](std::size_t i) { return amp_[i]; }
    const cplx &operator[](std::size_t i) const { return amp_[i]; }
    std::vector<cplx> &amplitudes() noexcept { return amp_; }
    const std::vector<cplx> &amplitudes() const noexcept { return amp_; }

    double norm() const;
    void normalize();
    /// Same state written on the full 2^n basis.
    StateVector to_full() const;

  private:
    std::size_t n_ = 0;
    std::shared_ptr<const ConfigBasis> basis_;
    std::vector<cplx> amp_;
};

cplx inner(const StateVector &a, const StateVector &b);

/// Throws Sector if p maps a populated configuration outside a reduced basis.
StateVector apply(const PauliString &p, const StateVector &v);

/// Largest full-space dimension (log2) accepted by StateVector.
inline constexpr std::size_t kMaxFullSites = 26;

}  // namespace toricgap
