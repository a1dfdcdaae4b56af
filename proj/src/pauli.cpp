#include "toricgap/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "toricgap/error.hpp"

namespace toricgap {

namespace {

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int mod4(int k) { return ((k % 4) + 4) % 4; }

void check_same_size(const PauliString &a, const PauliString &b) {
    require(a.size() == b.size(), ErrorKind::Sizing,
            "Pauli strings have different lengths (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
}

}  // namespace

PauliString::PauliString(BitVec x, BitVec z, int phase) : x_(std::move(x)), z_(std::move(z)), phase_(mod4(phase)) {
    require(x_.size() == z_.size(), ErrorKind::Sizing, "x and z masks differ in length");
}

PauliString PauliString::single(std::size_t n, std::size_t site, char op) {
    require(site < n, ErrorKind::Sizing, "site " + std::to_string(site) + " out of range");
    PauliString p(n);
    switch (op) {
        case 'I': break;
        case 'X': p.x_.set(site); break;
        case 'Z': p.z_.set(site); break;
        case 'Y':
            p.x_.set(site);
            p.z_.set(site);
            break;
        default: fail(ErrorKind::Config, std::string("unknown Pauli letter '") + op + "'");
    }
    return p;
}

cplx PauliString::phase_factor() const { return kIPow[phase_]; }

PauliString PauliString::with_phase(int phase) const {
    PauliString p = *this;
    p.phase_ = mod4(phase);
    return p;
}

PauliString operator*(const PauliString &a, const PauliString &b) {
    check_same_size(a, b);
    // Per site, P(x1,z1) P(x2,z2) = i^g P(x1^x2, z1^z2) with
    // Y*: g = z2 - x2;  X*: g = z2 (2 x2 - 1);  Z*: g = x2 (1 - 2 z2).
    long g = 0;
    const auto &ax = a.x().words(), &az = a.z().words(), &bx = b.x().words(), &bz = b.z().words();
    for (std::size_t k = 0; k < ax.size(); ++k) {
        std::uint64_t y1 = ax[k] & az[k], x1 = ax[k] & ~az[k], z1 = ~ax[k] & az[k];
        g += std::popcount(y1 & bz[k] & ~bx[k]) - std::popcount(y1 & bx[k] & ~bz[k]);
        g += std::popcount(x1 & bz[k] & bx[k]) - std::popcount(x1 & bz[k] & ~bx[k]);
        g += std::popcount(z1 & bx[k] & ~bz[k]) - std::popcount(z1 & bx[k] & bz[k]);
    }
    return PauliString(a.x() ^ b.x(), a.z() ^ b.z(), static_cast<int>((a.phase() + b.phase() + g) % 4));
}

PauliString multiply(const PauliString &a, const PauliString &b) { return a * b; }

bool commutes(const PauliString &a, const PauliString &b) {
    check_same_size(a, b);
    return overlap_parity(a.x(), b.z()) == overlap_parity(a.z(), b.x());
}

PauliString conjugate(const PauliString &u, const PauliString &p) {
    check_same_size(u, p);
    require(u.is_hermitian(), ErrorKind::Domain, "conjugating operator must be Hermitian and involutory");
    return commutes(u, p) ? p : p.negated();
}

std::string PauliString::to_string() const {
    std::ostringstream os;
    static const char *kPhase[4] = {"", "+i", "-", "-i"};
    bool first = true;
    if (phase_ != 0) {
        os << kPhase[phase_];
        first = false;
    }
    for (std::size_t k = 0; k < size(); ++k) {
        bool xb = x_.test(k), zb = z_.test(k);
        if (!xb && !zb) continue;
        if (!first) os << ' ';
        os << (xb && zb ? 'Y' : xb ? 'X' : 'Z') << k;
        first = false;
    }
    if (is_identity()) os << (first ? "" : " ") << 'I';
    return os.str();
}

PauliString PauliString::parse(const std::string &text, std::size_t n) {
    std::istringstream is(text);
    std::string tok;
    PauliString acc(n);
    int phase = 0;
    bool seen_op = false;
    while (is >> tok) {
        std::size_t pos = 0;
        if (!seen_op) {
            if (tok[0] == '+' || tok[0] == '-') {
                if (tok[0] == '-') phase += 2;
                pos = 1;
            }
            if (pos < tok.size() && tok[pos] == 'i') {
                phase += 1;
                ++pos;
            }
            if (pos == tok.size()) continue;
        }
        char op = tok[pos];
        if (op == 'I' && pos + 1 == tok.size()) {
            seen_op = true;
            continue;
        }
        require(op == 'X' || op == 'Y' || op == 'Z', ErrorKind::Config, "bad Pauli token '" + tok + "'");
        std::string digits = tok.substr(pos + 1);
        require(!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit), ErrorKind::Config,
                "bad Pauli token '" + tok + "'");
        std::size_t site = std::stoul(digits);
        require(site < n, ErrorKind::Sizing,
                "Pauli site " + std::to_string(site) + " out of range for " + std::to_string(n) + " spins");
        acc = acc * single(n, site, op);
        seen_op = true;
    }
    require(seen_op, ErrorKind::Config, "empty Pauli literal '" + text + "'");
    return acc.with_phase(acc.phase() + phase);
}

BasisAction act_on_config(const PauliString &p, std::uint64_t config) {
    // P = i^(phase + ny) X^x Z^z; Z^z contributes (-1)^{|z & s|} before the flip.
    std::uint64_t x = p.x().word0(), z = p.z().word0();
    int k = p.phase() + std::popcount(x & z) + 2 * (std::popcount(z & config) & 1);
    return {config ^ x, kIPow[k % 4]};
}

ConfigBasis::ConfigBasis(std::size_t n_sites, std::vector<std::uint64_t> configs)
    : n_(n_sites), configs_(std::move(configs)) {
    require(n_ <= 64, ErrorKind::Capacity, "configuration bases hold at most 64 spins");
    std::sort(configs_.begin(), configs_.end());
    configs_.erase(std::unique(configs_.begin(), configs_.end()), configs_.end());
}

std::int64_t ConfigBasis::find(std::uint64_t config) const {
    auto it = std::lower_bound(configs_.begin(), configs_.end(), config);
    if (it == configs_.end() || *it != config) return -1;
    return it - configs_.begin();
}

StateVector::StateVector(std::size_t n_sites) : n_(n_sites) {
    require(n_sites <= kMaxFullSites, ErrorKind::Capacity,
            "full-space vectors are limited to " + std::to_string(kMaxFullSites) + " spins");
    amp_.assign(std::size_t{1} << n_sites, cplx(0));
}

StateVector::StateVector(std::shared_ptr<const ConfigBasis> basis) : n_(basis->n_sites()), basis_(std::move(basis)) {
    amp_.assign(basis_->size(), cplx(0));
}

StateVector StateVector::basis_state(std::size_t n_sites, std::uint64_t config) {
    StateVector v(n_sites);
    require(config < v.dim(), ErrorKind::Sizing, "configuration out of range");
    v[config] = 1;
    return v;
}

std::int64_t StateVector::index_of(std::uint64_t config) const {
    if (basis_) return basis_->find(config);
    return config < amp_.size() ? static_cast<std::int64_t>(config) : -1;
}

double StateVector::norm() const {
    double s = 0;
    for (const auto &a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    double nrm = norm();
    require(nrm > 0, ErrorKind::Domain, "cannot normalize the zero vector");
    for (auto &a : amp_) a /= nrm;
}

StateVector StateVector::to_full() const {
    if (!basis_) return *this;
    StateVector out(n_);
    for (std::size_t i = 0; i < amp_.size(); ++i) out[basis_->config(i)] = amp_[i];
    return out;
}

cplx inner(const StateVector &a, const StateVector &b) {
    require(a.dim() == b.dim() && a.basis() == b.basis(), ErrorKind::Sizing, "vectors live on different bases");
    cplx s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

StateVector apply(const PauliString &p, const StateVector &v) {
    require(p.size() == v.n_sites(), ErrorKind::Sizing, "operator and state sizes differ");
    require(p.size() <= 64, ErrorKind::Capacity, "basis action is limited to 64 spins");
    StateVector out = v.is_reduced() ? StateVector(v.basis()) : StateVector(v.n_sites());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (v[i] == cplx(0)) continue;
        BasisAction act = act_on_config(p, v.config(i));
        std::int64_t j = out.index_of(act.target);
        require(j >= 0, ErrorKind::Sector, "operator " + p.to_string() + " leaves the reduced basis");
        out[static_cast<std::size_t>(j)] += act.amplitude * v[i];
    }
    return out;
}

}  // namespace toricgap
