#include "toricgap/sectors.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <regex>
#include <thread>

#include "toricgap/error.hpp"

namespace toricgap {

std::size_t gf2_rank(const std::vector<PauliString> &rows) {
    if (rows.empty()) return 0;
    const std::size_t n = rows.front().size();
    std::vector<BitVec> m;
    m.reserve(rows.size());
    for (const auto &p : rows) {
        require(p.size() == n, ErrorKind::Sizing, "rows have different lengths");
        BitVec r(2 * n);
        for (auto k : p.x().indices()) r.set(k);
        for (auto k : p.z().indices()) r.set(n + k);
        m.push_back(std::move(r));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < 2 * n && rank < m.size(); ++col) {
        std::size_t piv = rank;
        while (piv < m.size() && !m[piv].test(col)) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[rank], m[piv]);
        for (std::size_t r = 0; r < m.size(); ++r)
            if (r != rank && m[r].test(col)) m[r] ^= m[rank];
        ++rank;
    }
    return rank;
}

std::size_t ground_degeneracy(const HamiltonianSpec &h) {
    require(h.all_commute(), ErrorKind::Domain, "ground degeneracy by rank needs mutually commuting terms");
    std::vector<PauliString> rows;
    for (const auto &t : h.terms)
        if (!t.op.is_identity()) rows.push_back(t.op);
    std::size_t r = gf2_rank(rows);
    std::size_t free = h.n_sites() - r;
    require(free < 63, ErrorKind::Capacity, "degeneracy exceeds 2^62");
    return std::size_t{1} << free;
}

std::string SectorLabel::to_string() const {
    std::string s;
    s += sigma > 0 ? '+' : '-';
    s += mu > 0 ? '+' : '-';
    auto faces = syndrome.indices();
    if (!faces.empty()) {
        s += ",x@(";
        for (std::size_t k = 0; k < faces.size(); ++k) s += (k ? "," : "") + std::to_string(faces[k]);
        s += ")";
    }
    return s;
}

SectorLabel trivial_label(const Lattice &lat, int sigma, int mu) {
    return {sigma, mu, BitVec(static_cast<std::size_t>(lat.num_faces()))};
}

SectorLabel x_pair_label(const Lattice &lat, int sigma, int mu, int f1, int f2) {
    require(f1 != f2, ErrorKind::Sector, "x-pair needs two distinct faces");
    require(f1 >= 0 && f2 >= 0 && f1 < lat.num_faces() && f2 < lat.num_faces(), ErrorKind::Sector,
            "x-pair face out of range");
    SectorLabel l = trivial_label(lat, sigma, mu);
    l.syndrome.set(static_cast<std::size_t>(f1));
    l.syndrome.set(static_cast<std::size_t>(f2));
    return l;
}

SectorLabel parse_sector_label(const Lattice &lat, const std::string &text) {
    static const std::regex re(R"(^([+-])([+-])(?:,x-pair@\((\d+),(\d+)\))?$)");
    std::smatch m;
    require(std::regex_match(text, m, re), ErrorKind::Config,
            "bad sector '" + text + "' (expected ++, +-, -+, -- with optional ,x-pair@(f1,f2))");
    int sigma = m[1] == "+" ? 1 : -1, mu = m[2] == "+" ? 1 : -1;
    if (!lat.is_torus())
        require(sigma == 1 && mu == 1, ErrorKind::Sector, "the planar patch has a single winding sector (++)");
    if (m[3].matched) return x_pair_label(lat, sigma, mu, std::stoi(m[3]), std::stoi(m[4]));
    return trivial_label(lat, sigma, mu);
}

std::vector<SectorLabel> all_labels(const Lattice &lat, const BitVec &syndrome) {
    std::vector<SectorLabel> out;
    for (int s : {1, -1})
        for (int u : {1, -1}) {
            if (!lat.is_torus() && (s < 0 || u < 0)) continue;
            out.push_back({s, u, syndrome});
        }
    return out;
}

SectorLabel classify(const Lattice &lat, std::uint64_t config) {
    BitVec s = BitVec::from_word(static_cast<std::size_t>(lat.num_edges()), config);
    SectorLabel l = trivial_label(lat, 1, 1);
    for (int f = 0; f < lat.num_faces(); ++f)
        if (overlap_parity(lat.plaquette(f), s)) l.syndrome.set(static_cast<std::size_t>(f));
    if (lat.is_torus()) {
        l.sigma = overlap_parity(lat.homology_cycle(1), s) ? -1 : 1;
        l.mu = overlap_parity(lat.homology_cycle(2), s) ? -1 : 1;
    }
    return l;
}

namespace {

/// Solves rows * s = rhs over GF(2) for s in at most 64 bits.
bool gf2_solve(std::vector<std::uint64_t> rows, std::vector<int> rhs, std::uint64_t &solution) {
    std::size_t rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < 64 && rank < rows.size(); ++col) {
        std::uint64_t bit = std::uint64_t{1} << col;
        std::size_t piv = rank;
        while (piv < rows.size() && !(rows[piv] & bit)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        std::swap(rhs[rank], rhs[piv]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && (rows[r] & bit)) {
                rows[r] ^= rows[rank];
                rhs[r] ^= rhs[rank];
            }
        pivot_col.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < rows.size(); ++r)
        if (rhs[r]) return false;
    solution = 0;
    for (std::size_t r = 0; r < rank; ++r)
        if (rhs[r]) solution |= std::uint64_t{1} << pivot_col[r];
    return true;
}

constexpr int kMaxSectorBits = 24;

}  // namespace

SectorBasis enumerate_sector(const Lattice &lat, const SectorLabel &label) {
    const int n = lat.num_edges();
    require(n <= 64, ErrorKind::Capacity, "sector enumeration supports at most 64 edges");
    require(label.syndrome.size() == static_cast<std::size_t>(lat.num_faces()), ErrorKind::Sector,
            "syndrome length does not match the face count");
    require(label.sigma == 1 || label.sigma == -1, ErrorKind::Sector, "sigma must be +1 or -1");
    require(label.mu == 1 || label.mu == -1, ErrorKind::Sector, "mu must be +1 or -1");
    if (lat.is_torus()) {
        require(label.n_x() % 2 == 0, ErrorKind::Sector,
                "torus syndromes need an even number of -1 plaquettes (product of all plaquettes is +1)");
    } else {
        require(label.sigma == 1 && label.mu == 1, ErrorKind::Sector, "the planar patch has a single winding sector");
    }
    const int gens = lat.num_vertices() - 1;
    require(gens <= kMaxSectorBits, ErrorKind::Capacity,
            "sector of size 2^" + std::to_string(gens) + " exceeds the cap 2^" + std::to_string(kMaxSectorBits));

    std::vector<std::uint64_t> rows;
    std::vector<int> rhs;
    for (int f = 0; f < lat.num_faces(); ++f) {
        rows.push_back(lat.plaquette(f).word0());
        rhs.push_back(label.syndrome.test(static_cast<std::size_t>(f)) ? 1 : 0);
    }
    if (lat.is_torus()) {
        rows.push_back(lat.homology_cycle(1).word0());
        rhs.push_back(label.sigma < 0);
        rows.push_back(lat.homology_cycle(2).word0());
        rhs.push_back(label.mu < 0);
    }
    std::uint64_t s0 = 0;
    require(gf2_solve(rows, rhs, s0), ErrorKind::Sector, "infeasible sector label " + label.to_string());

    std::vector<std::uint64_t> star(static_cast<std::size_t>(gens));
    for (int v = 0; v < gens; ++v) star[static_cast<std::size_t>(v)] = lat.star(v).word0();
    const std::uint64_t count = std::uint64_t{1} << gens;
    std::vector<std::uint64_t> configs;
    configs.reserve(count);
    std::uint64_t s = s0;
    configs.push_back(s);
    for (std::uint64_t k = 1; k < count; ++k) {
        s ^= star[static_cast<std::size_t>(std::countr_zero(k))];
        configs.push_back(s);
    }
    return {lat, label, std::make_shared<ConfigBasis>(static_cast<std::size_t>(n), std::move(configs))};
}

std::map<std::pair<int, int>, StateVector> ground_states(const Lattice &lat) {
    require(lat.is_torus(), ErrorKind::Domain, "ground_states enumerates the four torus sectors");
    std::map<std::pair<int, int>, StateVector> out;
    for (const auto &label : all_labels(lat, BitVec(static_cast<std::size_t>(lat.num_faces())))) {
        SectorBasis b = enumerate_sector(lat, label);
        StateVector v(b.basis);
        const double a = 1.0 / std::sqrt(static_cast<double>(b.size()));
        for (auto &x : v.amplitudes()) x = a;
        out.emplace(std::make_pair(label.sigma, label.mu), std::move(v));
    }
    return out;
}

void parallel_rows(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)> &f) {
    if (workers <= 1 || n < 4096) {
        f(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(f, b, std::min(n, b + chunk));
    for (auto &t : pool) t.join();
}

ReducedOperator::ReducedOperator(const HamiltonianSpec &h, std::shared_ptr<const ConfigBasis> basis, int workers)
    : n_(h.n_sites()), basis_(std::move(basis)), workers_(workers) {
    require(basis_ != nullptr, ErrorKind::Domain, "reduced operator needs a basis");
    require(basis_->n_sites() == n_, ErrorKind::Sizing, "basis and Hamiltonian sizes differ");
    build(h);
}

ReducedOperator::ReducedOperator(const HamiltonianSpec &h, int workers) : n_(h.n_sites()), workers_(workers) {
    require(n_ <= kMaxFullSites, ErrorKind::Capacity,
            "full-space operators are limited to " + std::to_string(kMaxFullSites) + " spins");
    build(h);
}

void ReducedOperator::build(const HamiltonianSpec &h) {
    require(n_ <= 64, ErrorKind::Capacity, "basis action is limited to 64 spins");
    const Lattice &lat = h.lattice;
    if (basis_) {
        std::vector<PauliString> conserved;
        for (int f = 0; f < lat.num_faces(); ++f) conserved.push_back(PauliString::z_string(lat.plaquette(f)));
        if (lat.is_torus()) {
            conserved.push_back(loop_operator(lat, 1));
            conserved.push_back(loop_operator(lat, 2));
        }
        for (const auto &t : h.terms)
            for (const auto &c : conserved)
                require(commutes(t.op, c), ErrorKind::Sector,
                        to_string(t.group) + " term " + t.op.to_string() + " does not preserve the sector");
    }
    const std::size_t dim = basis_ ? basis_->size() : (std::size_t{1} << n_);
    auto config_of = [&](std::size_t i) -> std::uint64_t { return basis_ ? basis_->config(i) : i; };
    auto index_of = [&](std::uint64_t c) -> std::int64_t {
        return basis_ ? basis_->find(c) : static_cast<std::int64_t>(c);
    };

    diag_.assign(dim, h.offset);
    std::map<std::uint64_t, std::vector<const Term *>> by_x;
    std::vector<const Term *> diag_terms;
    for (const auto &t : h.terms) {
        if (t.coefficient == 0.0) continue;
        if (t.op.is_z_only())
            diag_terms.push_back(&t);
        else
            by_x[t.op.x().word0()].push_back(&t);
    }
    parallel_rows(dim, workers_, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            std::uint64_t s = config_of(r);
            double d = h.offset;
            for (const Term *t : diag_terms) d += (std::popcount(t->op.z().word0() & s) & 1) ? -t->coefficient : t->coefficient;
            diag_[r] = d;
        }
    });
    for (const auto &[x, group] : by_x) {
        Hop hop;
        hop.col.resize(dim);
        hop.amp.resize(dim);
        std::atomic<bool> ok{true};
        parallel_rows(dim, workers_, [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r) {
                std::uint64_t src = config_of(r) ^ x;
                std::int64_t c = index_of(src);
                if (c < 0) {
                    ok = false;
                    continue;
                }
                cplx a = 0;
                for (const Term *t : group) a += t->coefficient * act_on_config(t->op, src).amplitude;
                hop.col[r] = static_cast<std::uint32_t>(c);
                hop.amp[r] = a;
            }
        });
        require(ok, ErrorKind::Sector, "operator leaves the reduced basis");
        hops_.push_back(std::move(hop));
    }
}

void ReducedOperator::apply(const cplx *in, cplx *out) const {
    parallel_rows(dim(), workers_, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            cplx acc = diag_[r] * in[r];
            for (const auto &hop : hops_) acc += hop.amp[r] * in[hop.col[r]];
            out[r] = acc;
        }
    });
}

StateVector ReducedOperator::apply(const StateVector &v) const {
    require(v.dim() == dim(), ErrorKind::Sizing, "vector dimension does not match the operator");
    StateVector out = basis_ ? StateVector(basis_) : StateVector(n_);
    apply(v.amplitudes().data(), out.amplitudes().data());
    return out;
}

}  // namespace toricgap
