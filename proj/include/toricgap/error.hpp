#pragma once

#include <stdexcept>
#include <string>

namespace toricgap {

enum class ErrorKind {
    Sizing,       // lattice dimensions or operator lengths out of range
    Domain,       // operation not defined for the given topology / operator
    Sector,       // label infeasible or operator leaves the sector
    Convergence,  // iterative solver or propagator missed its tolerance
    Capacity,     // problem exceeds a documented size cap
    Config,       // malformed run configuration
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string &what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace toricgap
