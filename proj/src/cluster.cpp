#include "toricgap/cluster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "toricgap/dense.hpp"
#include "toricgap/error.hpp"
#include "toricgap/sectors.hpp"
#include "toricgap/spectral.hpp"

namespace toricgap {

namespace {

constexpr int kMaxModelSites = 20;
constexpr std::size_t kMaxPolymers = 20000000;
constexpr std::size_t kMaxClusterTerms = 50000000;

int popcount(std::uint64_t w) { return std::popcount(w); }

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd &m, double scale = -1.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd d = (scale * es.eigenvalues().array()).exp();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Local index bits -> global site masks.
std::vector<std::uint64_t> local_offsets(std::uint64_t sites) {
    std::vector<int> pos;
    for (int s = 0; s < 64; ++s)
        if ((sites >> s) & 1u) pos.push_back(s);
    std::vector<std::uint64_t> off(std::size_t{1} << pos.size(), 0);
    for (std::size_t x = 0; x < off.size(); ++x)
        for (std::size_t b = 0; b < pos.size(); ++b)
            if ((x >> b) & 1u) off[x] |= std::uint64_t{1} << pos[b];
    return off;
}

std::uint64_t compress(std::uint64_t global, std::uint64_t sites) {
    std::uint64_t out = 0;
    int b = 0;
    for (int s = 0; s < 64; ++s)
        if ((sites >> s) & 1u) {
            if ((global >> s) & 1u) out |= std::uint64_t{1} << b;
            ++b;
        }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- model

std::uint64_t ExpansionModel::closure(std::uint64_t perturbations) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < flip.size(); ++i)
        if ((perturbations >> i) & 1u) out |= flip[i];
    return out;
}

ExpansionModel ExpansionModel::charge_sector(const Lattice &lat, const PerturbationSpec &pert, int sigma, int mu) {
    require(sigma == 1 || sigma == -1, ErrorKind::Sector, "sigma must be +1 or -1");
    require(mu == 1 || mu == -1, ErrorKind::Sector, "mu must be +1 or -1");
    require(lat.is_torus() || (sigma == 1 && mu == 1), ErrorKind::Sector, "planar patches have a single sector");
    require(lat.num_vertices() <= kMaxModelSites, ErrorKind::Capacity, "charge representation limited to 20 vertices");

    EdgeSet ref = lat.empty_set();
    if (sigma < 0) ref ^= lat.dual_cycle(2);
    if (mu < 0) ref ^= lat.dual_cycle(1);

    HamiltonianSpec v = build_perturbation(lat, pert);
    require(v.terms.size() <= 64, ErrorKind::Capacity, "at most 64 perturbation terms");
    ExpansionModel m;
    m.n_sites = lat.num_vertices();
    for (const auto &t : v.terms) {
        require(t.op.is_z_only(), ErrorKind::Domain, "cluster expansion requires a z-only perturbation");
        std::uint64_t f = 0;
        for (std::size_t e = 0; e < t.op.size(); ++e)
            if (t.op.z().test(e)) {
                auto ends = lat.endpoints(static_cast<int>(e));
                f ^= std::uint64_t{1} << ends[0];
                f ^= std::uint64_t{1} << ends[1];
            }
        require(f != 0, ErrorKind::Domain, "perturbation term without local range (closed loop)");
        const double sign = overlap_parity(t.op.z(), ref) ? -1.0 : 1.0;
        m.flip.push_back(f);
        m.coeff.push_back(sign * t.coefficient);
    }
    m.label = std::string(sigma > 0 ? "+" : "-") + (mu > 0 ? "+" : "-");
    return m;
}

ExpansionModel ExpansionModel::single_site(double beta) {
    ExpansionModel m;
    m.n_sites = 1;
    m.flip = {1};
    m.coeff = {beta};
    m.label = "single-site";
    return m;
}

double model_ground_energy(const ExpansionModel &m) {
    // States reachable from the vacuum.
    std::vector<std::uint64_t> states{0};
    std::set<std::uint64_t> seen{0};
    for (std::size_t k = 0; k < states.size(); ++k)
        for (auto f : m.flip) {
            std::uint64_t t = states[k] ^ f;
            if (seen.insert(t).second) states.push_back(t);
        }
    require(states.size() <= 4096, ErrorKind::Capacity, "dense model ground energy limited to dimension 4096");
    std::sort(states.begin(), states.end());
    const auto n = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        h(a, a) = popcount(states[static_cast<std::size_t>(a)]);
        for (std::size_t i = 0; i < m.flip.size(); ++i) {
            auto t = states[static_cast<std::size_t>(a)] ^ m.flip[i];
            auto b = std::lower_bound(states.begin(), states.end(), t) - states.begin();
            h(b, a) += m.coeff[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

int Configuration::volume() const {
    int v = 0;
    for (const auto &s : steps) v += popcount(s.I) + popcount(s.J);
    return v;
}

// ---------------------------------------------------------------- weights

WeightEngine::WeightEngine(ExpansionModel model) : model_(std::move(model)) {
    require(model_.n_sites >= 1 && model_.n_sites <= kMaxModelSites, ErrorKind::Capacity,
            "charge representation limited to 20 sites");
    require(model_.flip.size() == model_.coeff.size() && model_.flip.size() <= 64, ErrorKind::Sizing,
            "malformed expansion model");
}

Eigen::MatrixXd WeightEngine::local_hamiltonian(std::uint64_t sites, std::uint64_t L) const {
    const auto off = local_offsets(sites);
    const auto dim = static_cast<Eigen::Index>(off.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) h(x, x) = popcount(off[static_cast<std::size_t>(x)]);
    for (std::size_t i = 0; i < model_.flip.size(); ++i) {
        if (!((L >> i) & 1u)) continue;
        const auto f = static_cast<Eigen::Index>(compress(model_.flip[i], sites));
        for (Eigen::Index x = 0; x < dim; ++x) h(x ^ f, x) += model_.coeff[i];
    }
    return h;
}

Eigen::MatrixXd WeightEngine::local_exp(std::uint64_t sites, std::uint64_t L) const {
    Eigen::MatrixXd e = sym_exp(local_hamiltonian(sites, L));
    // Entries between configurations not connected by the flips in L vanish exactly.
    std::vector<std::uint64_t> basis;
    for (std::size_t i = 0; i < model_.flip.size(); ++i) {
        if (!((L >> i) & 1u)) continue;
        std::uint64_t f = compress(model_.flip[i], sites);
        for (auto b : basis) f = std::min(f, f ^ b);
        if (f) {
            basis.push_back(f);
            std::sort(basis.rbegin(), basis.rend());
        }
    }
    auto reduce = [&](std::uint64_t x) {
        for (auto b : basis) x = std::min(x, x ^ b);
        return x;
    };
    for (Eigen::Index r = 0; r < e.rows(); ++r)
        for (Eigen::Index c = 0; c < e.cols(); ++c)
            if (reduce(static_cast<std::uint64_t>(r ^ c)) != 0) e(r, c) = 0;
    return e;
}

const Eigen::MatrixXd &WeightEngine::local_alternating(std::uint64_t I) const {
    auto it = cache_.find(I);
    if (it != cache_.end()) return it->second;
    const std::uint64_t sites = model_.closure(I);
    require(popcount(sites) <= 12, ErrorKind::Capacity, "closure of I limited to 12 sites");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << popcount(sites));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
    // Submasks L of I, sign (-1)^{|I|-|L|}.
    std::uint64_t L = I;
    while (true) {
        const double sign = ((popcount(I) - popcount(L)) & 1) ? -1.0 : 1.0;
        acc += sign * local_exp(sites, L);
        if (L == 0) break;
        L = (L - 1) & I;
    }
    return cache_.emplace(I, std::move(acc)).first->second;
}

double WeightEngine::local_max_energy(std::uint64_t I, std::uint64_t L) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(local_hamiltonian(model_.closure(I), L), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

void WeightEngine::apply_T(const Slice &s, Eigen::VectorXd &v) const {
    const std::uint64_t bar = model_.closure(s.I);
    require((bar & s.J) == 0, ErrorKind::Domain, "J overlaps the closure of I");
    require(static_cast<std::size_t>(v.size()) == model_.dim(), ErrorKind::Sizing, "state dimension mismatch");
    const double damp = std::exp(-static_cast<double>(popcount(s.J)));
    const auto n = static_cast<std::uint64_t>(v.size());
    for (std::uint64_t x = 0; x < n; ++x) {
        if ((x & ~bar) != s.J)
            v(static_cast<Eigen::Index>(x)) = 0;
        else
            v(static_cast<Eigen::Index>(x)) *= damp;
    }
    if (s.I == 0) return;
    const Eigen::MatrixXd &a = local_alternating(s.I);
    const auto off = local_offsets(bar);
    Eigen::VectorXd loc(static_cast<Eigen::Index>(off.size()));
    // Only the block with the outside configuration equal to J survives the projectors.
    for (std::size_t k = 0; k < off.size(); ++k) loc(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(s.J | off[k]));
    Eigen::VectorXd out = a * loc;
    for (std::size_t k = 0; k < off.size(); ++k) v(static_cast<Eigen::Index>(s.J | off[k])) = out(static_cast<Eigen::Index>(k));
}

Eigen::MatrixXd WeightEngine::T_matrix(const Slice &s) const {
    const auto dim = static_cast<Eigen::Index>(model_.dim());
    require(dim <= 4096, ErrorKind::Capacity, "dense T limited to dimension 4096");
    Eigen::MatrixXd t(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e(c) = 1;
        apply_T(s, e);
        t.col(c) = e;
    }
    return t;
}

double WeightEngine::weight(const Configuration &c) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model_.dim()));
    v(0) = 1;
    for (const auto &s : c.steps) apply_T(s, v);
    return v(0);
}

std::vector<std::uint64_t> used_sites(const ExpansionModel &m, const Configuration &c) {
    std::vector<std::uint64_t> u;
    u.reserve(c.steps.size());
    for (const auto &s : c.steps) u.push_back(m.closure(s.I) | s.J);
    return u;
}

std::size_t support_size(const ExpansionModel &m, const Configuration &c) {
    const auto u = used_sites(m, c);
    const long n = static_cast<long>(u.size());
    std::size_t total = 0;
    for (long t = -1; t <= n; ++t) {
        std::uint64_t cell = 0;
        for (long k = t - 1; k <= t + 1; ++k)
            if (k >= 0 && k < n) cell |= u[static_cast<std::size_t>(k)];
        total += static_cast<std::size_t>(popcount(cell));
    }
    return total;
}

// ---------------------------------------------------------------- dense identities

std::uint64_t DenseExpansion::closure(std::uint64_t I) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < range.size(); ++i)
        if ((I >> i) & 1u) out |= range[i];
    return out;
}

namespace {

Eigen::MatrixXd real_matrix(const PauliString &p) {
    Eigen::MatrixXcd m = pauli_matrix(p);
    require(m.imag().cwiseAbs().maxCoeff() == 0.0, ErrorKind::Domain, "dense expansion requires real operators");
    return m.real();
}

}  // namespace

DenseExpansion DenseExpansion::toric_code(const Lattice &lat, const PerturbationSpec &pert, const std::vector<int> &edges) {
    require(lat.num_edges() <= 10, ErrorKind::Capacity, "dense expansion limited to 10 edges");
    const std::size_t n = static_cast<std::size_t>(lat.num_edges());
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    DenseExpansion d;
    for (int v = 0; v < lat.num_vertices(); ++v)
        d.h.push_back(0.5 * (id - real_matrix(PauliString::x_string(lat.star(v)))));
    for (int f = 0; f < lat.num_faces(); ++f)
        d.h.push_back(0.5 * (id - real_matrix(PauliString::z_string(lat.plaquette(f)))));
    require(d.h.size() <= 64, ErrorKind::Capacity, "at most 64 sites");

    HamiltonianSpec v = build_perturbation(lat, pert);
    for (std::size_t k = 0; k < v.terms.size(); ++k) {
        const auto &t = v.terms[k];
        if (!edges.empty() && std::find(edges.begin(), edges.end(), static_cast<int>(k)) == edges.end()) continue;
        require(t.op.is_z_only(), ErrorKind::Domain, "dense expansion requires a z-only perturbation");
        std::uint64_t r = 0;
        for (std::size_t e = 0; e < n; ++e)
            if (t.op.z().test(e)) {
                auto ends = lat.endpoints(static_cast<int>(e));
                r ^= std::uint64_t{1} << ends[0];
                r ^= std::uint64_t{1} << ends[1];
            }
        d.v.push_back(t.coefficient * real_matrix(t.op));
        d.range.push_back(r);
    }
    require(d.v.size() <= 10, ErrorKind::Capacity, "dense expansion limited to 10 perturbation terms");

    auto gs = ground_states(lat);
    auto it = gs.find({1, 1});
    require(it != gs.end(), ErrorKind::Sector, "no ++ ground state");
    d.vacuum = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k < it->second.dim(); ++k)
        d.vacuum(static_cast<Eigen::Index>(it->second.config(k))) = it->second[k].real();
    return d;
}

DenseExpansion DenseExpansion::from_model(const ExpansionModel &m) {
    require(m.n_sites <= 10, ErrorKind::Capacity, "dense expansion limited to 10 sites");
    const auto dim = static_cast<Eigen::Index>(m.dim());
    DenseExpansion d;
    for (int s = 0; s < m.n_sites; ++s) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index x = 0; x < dim; ++x) h(x, x) = (x >> s) & 1;
        d.h.push_back(h);
    }
    for (std::size_t i = 0; i < m.flip.size(); ++i) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index x = 0; x < dim; ++x) v(x ^ static_cast<Eigen::Index>(m.flip[i]), x) = m.coeff[i];
        d.v.push_back(v);
        d.range.push_back(m.flip[i]);
    }
    d.vacuum = Eigen::VectorXd::Zero(dim);
    d.vacuum(0) = 1;
    return d;
}

Eigen::MatrixXd build_T(const DenseExpansion &d, std::uint64_t I, std::uint64_t J) {
    const std::uint64_t bar = d.closure(I);
    require((bar & J) == 0, ErrorKind::Domain, "J overlaps the closure of I");
    const auto dim = d.vacuum.size();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd inside = Eigen::MatrixXd::Zero(dim, dim), outside = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd proj = id;
    for (int s = 0; s < d.n_sites(); ++s) {
        if ((bar >> s) & 1u) {
            inside += d.h[static_cast<std::size_t>(s)];
            continue;
        }
        outside += d.h[static_cast<std::size_t>(s)];
        proj = proj * (((J >> s) & 1u) ? d.h[static_cast<std::size_t>(s)] : Eigen::MatrixXd(id - d.h[static_cast<std::size_t>(s)]));
    }
    Eigen::MatrixXd alt = Eigen::MatrixXd::Zero(dim, dim);
    std::uint64_t L = I;
    while (true) {
        Eigen::MatrixXd hl = inside;
        for (std::size_t i = 0; i < d.v.size(); ++i)
            if ((L >> i) & 1u) hl += d.v[i];
        alt += (((popcount(I) - popcount(L)) & 1) ? -1.0 : 1.0) * sym_exp(hl);
        if (L == 0) break;
        L = (L - 1) & I;
    }
    return sym_exp(outside) * alt * proj;
}

double verify_partition_of_identity(const DenseExpansion &d, std::uint64_t I) {
    const std::uint64_t bar = d.closure(I);
    const auto dim = d.vacuum.size();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    std::vector<int> rest;
    for (int s = 0; s < d.n_sites(); ++s)
        if (!((bar >> s) & 1u)) rest.push_back(s);
    require(rest.size() <= 16, ErrorKind::Capacity, "partition of identity limited to 16 free sites");
    // Depth-first over the free sites so each prefix product is formed once.
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<Eigen::MatrixXd> prefix(rest.size() + 1);
    prefix[0] = id;
    auto descend = [&](auto &&self, std::size_t k) -> void {
        if (k == rest.size()) {
            sum += prefix[k];
            return;
        }
        const auto &h = d.h[static_cast<std::size_t>(rest[k])];
        prefix[k + 1] = prefix[k] * h;
        self(self, k + 1);
        prefix[k + 1] = prefix[k] * (id - h);
        self(self, k + 1);
    };
    descend(descend, 0);
    return (sum - id).norm();
}

double verify_inclusion_exclusion(const DenseExpansion &d) {
    const std::size_t np = d.v.size();
    require(np <= 10, ErrorKind::Capacity, "inclusion-exclusion limited to 10 perturbation terms");
    const auto dim = d.vacuum.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto &x : d.h) h += x;
    for (const auto &x : d.v) h += x;
    const Eigen::MatrixXd exact = sym_exp(h);

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
    for (std::uint64_t I = 0; I < (std::uint64_t{1} << np); ++I) {
        const std::uint64_t bar = d.closure(I);
        Eigen::MatrixXd inside = Eigen::MatrixXd::Zero(dim, dim), outside = Eigen::MatrixXd::Zero(dim, dim);
        for (int s = 0; s < d.n_sites(); ++s) ((bar >> s) & 1u ? inside : outside) += d.h[static_cast<std::size_t>(s)];
        const Eigen::MatrixXd eo = sym_exp(outside);
        std::uint64_t L = I;
        while (true) {
            Eigen::MatrixXd hl = inside;
            for (std::size_t i = 0; i < np; ++i)
                if ((L >> i) & 1u) hl += d.v[i];
            sum += (((popcount(I) - popcount(L)) & 1) ? -1.0 : 1.0) * (eo * sym_exp(hl));
            if (L == 0) break;
            L = (L - 1) & I;
        }
    }
    return (sum - exact).norm();
}

// ---------------------------------------------------------------- norm bound

NormBoundReport verify_norm_bound(const WeightEngine &eng, double beta, int samples, std::uint64_t seed, int max_I) {
    const auto &m = eng.model();
    const int np = static_cast<int>(m.n_perturbations());
    require(np >= 1, ErrorKind::Domain, "no perturbation terms");
    require(samples >= 1 && max_I >= 1, ErrorKind::Sizing, "need at least one sample");
    std::mt19937_64 rng(seed);
    NormBoundReport rep{beta, 0.0, {}, 0.0, true};

    for (int k = 0; k < samples; ++k) {
        const int size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(max_I, np)));
        std::vector<int> idx(static_cast<std::size_t>(np));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::uint64_t I = 0;
        for (int i = 0; i < size; ++i) I |= std::uint64_t{1} << idx[static_cast<std::size_t>(i)];
        const std::uint64_t bar = m.closure(I);
        std::uint64_t J = 0;
        for (int s = 0; s < m.n_sites; ++s)
            if (!((bar >> s) & 1u) && rng() % 3 == 0) J |= std::uint64_t{1} << s;
        rep.samples.push_back({I, J, 0.0, 0.0});
    }
    for (const auto &s : rep.samples) {
        std::uint64_t L = s.I;
        while (true) {
            rep.c_hat = std::max(rep.c_hat, eng.local_max_energy(s.I, L) / popcount(s.I));
            if (L == 0) break;
            L = (L - 1) & s.I;
        }
    }
    for (auto &s : rep.samples) {
        Eigen::MatrixXd t = eng.T_matrix({s.I, s.J});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
        s.norm = es.eigenvalues().cwiseAbs().maxCoeff();
        s.bound = std::pow(2.0 * beta * std::exp(rep.c_hat), popcount(s.I)) * std::exp(-static_cast<double>(popcount(s.J)));
        rep.max_ratio = std::max(rep.max_ratio, s.norm / s.bound);
        if (s.norm > s.bound * (1 + 1e-12)) rep.holds = false;
    }
    return rep;
}

// ---------------------------------------------------------------- polymers

namespace {

struct PolymerSearch {
    const WeightEngine &eng;
    const ExpansionModel &m;
    int max_volume;
    std::vector<Polymer> out;
    std::vector<Slice> steps;
    std::vector<std::uint64_t> used;
    // Subsets of perturbations grouped by popcount.
    std::vector<std::vector<std::uint64_t>> subsets;

    PolymerSearch(const WeightEngine &e, int mv) : eng(e), m(e.model()), max_volume(mv) {
        const int np = static_cast<int>(m.n_perturbations());
        subsets.resize(static_cast<std::size_t>(mv) + 1);
        // Gosper enumeration per popcount.
        for (int k = 1; k <= std::min(mv, np); ++k) {
            std::uint64_t x = (std::uint64_t{1} << k) - 1;
            const std::uint64_t limit = np == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << np);
            while (x < limit && x != 0) {
                subsets[static_cast<std::size_t>(k)].push_back(x);
                const std::uint64_t c = x & (~x + 1), r = x + c;
                if (r == 0) break;
                x = (((r ^ x) >> 2) / c) | r;
            }
        }
    }

    // Units of a slice: connected components of I under overlapping ranges, plus single J sites.
    std::vector<std::uint64_t> units(const Slice &s) const {
        std::vector<std::uint64_t> u;
        for (std::size_t i = 0; i < m.flip.size(); ++i)
            if ((s.I >> i) & 1u) u.push_back(m.flip[i]);
        bool merged = true;
        while (merged) {
            merged = false;
            for (std::size_t a = 0; a < u.size() && !merged; ++a)
                for (std::size_t b = a + 1; b < u.size(); ++b)
                    if (u[a] & u[b]) {
                        u[a] |= u[b];
                        u.erase(u.begin() + static_cast<long>(b));
                        merged = true;
                        break;
                    }
        }
        for (int site = 0; site < m.n_sites; ++site)
            if ((s.J >> site) & 1u) u.push_back(std::uint64_t{1} << site);
        return u;
    }

    void check_capacity() const {
        require(out.size() < kMaxPolymers, ErrorKind::Capacity, "polymer enumeration exceeded its cap");
    }

    // comps: site masks of the open components in the latest slice.
    void extend(const std::vector<std::uint64_t> &comps, const Eigen::VectorXd &v, int volume) {
        const int budget = max_volume - volume;
        if (budget <= 0) return;
        std::uint64_t prev = 0;
        for (auto c : comps) prev |= c;
        for (int ni = 0; ni <= budget; ++ni) {
            const std::vector<std::uint64_t> none{0};
            const auto &choices = ni == 0 ? none : subsets[static_cast<std::size_t>(ni)];
            for (std::uint64_t I : choices) {
                const std::uint64_t bar = m.closure(I);
                const std::uint64_t free = prev & ~bar;
                // Submasks of free with |J| <= budget - ni.
                std::uint64_t J = free;
                while (true) {
                    const int vol = ni + popcount(J);
                    if (vol >= 1 && vol <= budget) try_slice({I, J}, comps, v, volume + vol);
                    if (J == 0) break;
                    J = (J - 1) & free;
                }
            }
        }
    }

    void try_slice(const Slice &s, const std::vector<std::uint64_t> &comps, const Eigen::VectorXd &v, int volume) {
        const auto u = units(s);
        // Union-find over previous components (0..P-1) and new units (P..).
        const std::size_t P = comps.size(), n = P + u.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t a = 0; a < P; ++a) {
            bool linked = false;
            for (std::size_t b = 0; b < u.size(); ++b)
                if (comps[a] & u[b]) {
                    parent[find(a)] = find(P + b);
                    linked = true;
                }
            if (!linked) return;  // that component can never rejoin
        }
        std::vector<std::uint64_t> next;
        std::vector<std::size_t> roots;
        for (std::size_t b = 0; b < u.size(); ++b) {
            const std::size_t r = find(P + b);
            auto it = std::find(roots.begin(), roots.end(), r);
            if (it == roots.end()) {
                roots.push_back(r);
                next.push_back(u[b]);
            } else {
                next[static_cast<std::size_t>(it - roots.begin())] |= u[b];
            }
        }
        Eigen::VectorXd w = v;
        eng.apply_T(s, w);
        if (w.cwiseAbs().maxCoeff() == 0.0) return;
        steps.push_back(s);
        used.push_back(m.closure(s.I) | s.J);
        if (next.size() == 1 && w(0) != 0.0) {
            check_capacity();
            out.push_back({Configuration{steps}, w(0), volume, used});
        }
        extend(next, w, volume);
        steps.pop_back();
        used.pop_back();
    }

    void run() {
        Eigen::VectorXd vac = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dim()));
        vac(0) = 1;
        for (int ni = 1; ni <= max_volume; ++ni)
            for (std::uint64_t I : subsets[static_cast<std::size_t>(ni)]) {
                const Slice s{I, 0};
                const auto u = units(s);
                Eigen::VectorXd w = vac;
                eng.apply_T(s, w);
                if (w.cwiseAbs().maxCoeff() == 0.0) continue;
                steps.push_back(s);
                used.push_back(m.closure(I));
                if (u.size() == 1 && w(0) != 0.0) {
                    check_capacity();
                    out.push_back({Configuration{steps}, w(0), ni, used});
                }
                extend(u, w, ni);
                steps.pop_back();
                used.pop_back();
            }
    }
};

}  // namespace

std::vector<Polymer> enumerate_polymers(const WeightEngine &eng, int max_volume) {
    require(max_volume >= 0, ErrorKind::Sizing, "max_volume must be non-negative");
    require(max_volume <= 16, ErrorKind::Capacity, "polymer volume limited to 16");
    PolymerSearch search(eng, max_volume);
    search.run();
    return std::move(search.out);
}

Configuration place(const Configuration &c, int offset, int length) {
    require(offset >= 0 && offset + static_cast<int>(c.steps.size()) <= length, ErrorKind::Sizing,
            "configuration does not fit the time window");
    Configuration out;
    out.steps.assign(static_cast<std::size_t>(length), Slice{});
    for (std::size_t t = 0; t < c.steps.size(); ++t) out.steps[static_cast<std::size_t>(offset) + t] = c.steps[t];
    return out;
}

Configuration merge(const Configuration &a, const Configuration &b) {
    Configuration out;
    out.steps.resize(std::max(a.steps.size(), b.steps.size()));
    for (std::size_t t = 0; t < out.steps.size(); ++t) {
        Slice s;
        if (t < a.steps.size()) s = a.steps[t];
        if (t < b.steps.size()) {
            require(!(s.I & b.steps[t].I) && !(s.J & b.steps[t].J), ErrorKind::Domain, "configurations overlap");
            s.I |= b.steps[t].I;
            s.J |= b.steps[t].J;
        }
        out.steps[t] = s;
    }
    return out;
}

FactorizationReport verify_factorization(const WeightEngine &eng, const std::vector<Polymer> &polymers, int pairs,
                                         std::uint64_t seed) {
    require(!polymers.empty(), ErrorKind::Domain, "no polymers to pair");
    std::mt19937_64 rng(seed);
    FactorizationReport rep;
    rep.min_product = std::numeric_limits<double>::infinity();
    const auto &m = eng.model();
    int attempts = 0;
    while (rep.pairs < pairs) {
        require(++attempts < 1000 * pairs + 1000, ErrorKind::Capacity, "could not find disjoint-support pairs");
        const auto &p = polymers[rng() % polymers.size()];
        const auto &q = polymers[rng() % polymers.size()];
        const int a = static_cast<int>(rng() % 4), b = static_cast<int>(rng() % 4);
        const int len = std::max(a + p.length(), b + q.length());
        const Configuration c1 = place(p.config, a, len), c2 = place(q.config, b, len);
        // Thickened supports must be disjoint.
        const auto u1 = used_sites(m, c1), u2 = used_sites(m, c2);
        bool disjoint = true;
        for (int t = 0; t < len && disjoint; ++t)
            for (int d = -2; d <= 2; ++d) {
                const int k = t + d;
                if (k >= 0 && k < len && (u1[static_cast<std::size_t>(t)] & u2[static_cast<std::size_t>(k)])) {
                    disjoint = false;
                    break;
                }
            }
        if (!disjoint) continue;
        const double w1 = eng.weight(c1), w2 = eng.weight(c2), w = eng.weight(merge(c1, c2));
        rep.max_residual = std::max(rep.max_residual, std::abs(w - w1 * w2));
        rep.min_product = std::min(rep.min_product, std::abs(w1 * w2));
        ++rep.pairs;
    }
    return rep;
}

bool polymers_overlap(const Polymer &p, int a, const Polymer &q, int b) {
    for (int t = 0; t < p.length(); ++t) {
        const int abs_t = a + t;
        for (int d = -1; d <= 1; ++d) {
            const int k = abs_t + d - b;
            if (k >= 0 && k < q.length() && (p.used[static_cast<std::size_t>(t)] & q.used[static_cast<std::size_t>(k)]))
                return true;
        }
    }
    return false;
}

double connected_subgraph_sum(const std::vector<std::uint32_t> &adjacency) {
    const std::size_t n = adjacency.size();
    require(n >= 1 && n <= 8, ErrorKind::Capacity, "subgraph sums limited to 8 vertices");
    if (n == 1) return 1.0;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if ((adjacency[a] >> b) & 1u) edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    require(edges.size() <= 20, ErrorKind::Capacity, "too many edges for subgraph enumeration");
    double sum = 0;
    const std::uint32_t all = (1u << n) - 1;
    for (std::uint32_t mask = 0; mask < (1u << edges.size()); ++mask) {
        std::vector<std::uint32_t> nb(n, 0);
        for (std::size_t k = 0; k < edges.size(); ++k)
            if ((mask >> k) & 1u) {
                nb[static_cast<std::size_t>(edges[k].first)] |= 1u << edges[k].second;
                nb[static_cast<std::size_t>(edges[k].second)] |= 1u << edges[k].first;
            }
        std::uint32_t seen = 1, frontier = 1;
        while (frontier) {
            std::uint32_t nxt = 0;
            for (std::size_t v = 0; v < n; ++v)
                if ((frontier >> v) & 1u) nxt |= nb[v];
            frontier = nxt & ~seen;
            seen |= nxt;
        }
        if (seen == all) sum += (std::popcount(mask) & 1) ? -1.0 : 1.0;
    }
    return sum;
}

// ---------------------------------------------------------------- linked clusters

namespace {

using Element = std::pair<int, int>;  // polymer, offset
using Cluster = std::vector<Element>;

struct ClusterHash {
    std::size_t operator()(const Cluster &c) const {
        std::size_t h = 1469598103934665603ull;
        for (const auto &e : c) {
            h = (h ^ static_cast<std::size_t>(e.first)) * 1099511628211ull;
            h = (h ^ static_cast<std::size_t>(e.second + 1024)) * 1099511628211ull;
        }
        return h;
    }
};

Cluster normalized(Cluster c) {
    int lo = c.front().second;
    for (const auto &e : c) lo = std::min(lo, e.second);
    for (auto &e : c) e.second -= lo;
    std::sort(c.begin(), c.end());
    return c;
}

}  // namespace

ClusterEnergy cluster_energy(const WeightEngine &eng, int max_volume, int max_polymers) {
    require(max_polymers >= 1 && max_polymers <= 6, ErrorKind::Capacity, "clusters limited to 6 polymers");
    ClusterEnergy ce;
    ce.max_volume = max_volume;
    const auto polys = enumerate_polymers(eng, max_volume);
    ce.n_polymers = polys.size();

    // Relative offsets of incompatible partners, restricted by volume.
    // site -> (polymer, relative time), ordered by polymer volume.
    std::vector<std::vector<std::pair<int, int>>> site_index(static_cast<std::size_t>(eng.model().n_sites));
    for (std::size_t p = 0; p < polys.size(); ++p)
        for (int t = 0; t < polys[p].length(); ++t)
            for (int s = 0; s < eng.model().n_sites; ++s)
                if ((polys[p].used[static_cast<std::size_t>(t)] >> s) & 1u)
                    site_index[static_cast<std::size_t>(s)].emplace_back(static_cast<int>(p), t);
    for (auto &list : site_index)
        std::stable_sort(list.begin(), list.end(), [&](const auto &a, const auto &b) {
            return polys[static_cast<std::size_t>(a.first)].volume < polys[static_cast<std::size_t>(b.first)].volume;
        });

    // Incompatible partners (q, relative offset) of polymer p with volume <= budget, ordered by volume.
    auto partners = [&](int p, int budget) {
        std::vector<Element> out;
        const auto &P = polys[static_cast<std::size_t>(p)];
        for (int t = 0; t < P.length(); ++t)
            for (int s = 0; s < eng.model().n_sites; ++s) {
                if (!((P.used[static_cast<std::size_t>(t)] >> s) & 1u)) continue;
                for (const auto &[q, tq] : site_index[static_cast<std::size_t>(s)]) {
                    if (polys[static_cast<std::size_t>(q)].volume > budget) break;
                    for (int d = -1; d <= 1; ++d) out.emplace_back(q, t + d - tq);
                }
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        std::stable_sort(out.begin(), out.end(), [&](const Element &a, const Element &b) {
            return polys[static_cast<std::size_t>(a.first)].volume < polys[static_cast<std::size_t>(b.first)].volume;
        });
        return out;
    };

    std::vector<Cluster> level;
    for (std::size_t p = 0; p < polys.size(); ++p) level.push_back({{static_cast<int>(p), 0}});

    auto emit = [&](const Cluster &c) {
        const std::size_t n = c.size();
        std::vector<std::uint32_t> adj(n, 0);
        int volume = 0, lo = 0, hi = 0;
        double prod = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
            const auto &pa = polys[static_cast<std::size_t>(c[a].first)];
            volume += pa.volume;
            hi = std::max(hi, c[a].second + pa.length() - 1);
            prod *= pa.weight;
            for (std::size_t b = a + 1; b < n; ++b)
                if (polymers_overlap(pa, c[a].second, polys[static_cast<std::size_t>(c[b].first)], c[b].second)) {
                    adj[a] |= 1u << b;
                    adj[b] |= 1u << a;
                }
        }
        // Multiplicities n_k!.
        for (std::size_t a = 0; a < n;) {
            std::size_t b = a;
            while (b < n && c[b] == c[a]) ++b;
            for (std::size_t f = 2; f <= b - a; ++f) prod /= static_cast<double>(f);
            a = b;
        }
        const double omega = prod * connected_subgraph_sum(adj);
        ce.terms.push_back({c, volume, hi - lo, omega});
    };

    for (const auto &c : level) emit(c);
    std::unordered_map<int, std::vector<Element>> memo;
    for (int size = 2; size <= max_polymers; ++size) {
        std::unordered_map<Cluster, char, ClusterHash> next;
        for (const auto &c : level) {
            int volume = 0;
            for (const auto &e : c) volume += polys[static_cast<std::size_t>(e.first)].volume;
            const int budget = max_volume - volume;
            if (budget <= 0) continue;
            for (const auto &e : c) {
                // Partner lists are cached per polymer at the full budget and filtered here.
                auto it = memo.find(e.first);
                if (it == memo.end())
                    it = memo.emplace(e.first, partners(e.first, max_volume - polys[static_cast<std::size_t>(e.first)].volume)).first;
                for (const auto &[q, d] : it->second) {
                    if (polys[static_cast<std::size_t>(q)].volume > budget) break;
                    Cluster grown = c;
                    grown.emplace_back(q, e.second + d);
                    next.emplace(normalized(std::move(grown)), 0);
                    require(next.size() < kMaxClusterTerms, ErrorKind::Capacity, "cluster enumeration exceeded its cap");
                }
            }
        }
        level.clear();
        level.reserve(next.size());
        for (auto &kv : next) level.push_back(kv.first);
        std::sort(level.begin(), level.end());
        for (const auto &c : level) emit(c);
    }

    std::sort(ce.terms.begin(), ce.terms.end(), [](const ClusterTerm &a, const ClusterTerm &b) {
        if (a.volume != b.volume) return a.volume < b.volume;
        if (a.elements.size() != b.elements.size()) return a.elements.size() < b.elements.size();
        return a.elements < b.elements;
    });
    std::vector<double> per_volume(static_cast<std::size_t>(max_volume) + 1, 0.0);
    for (const auto &t : ce.terms) {
        per_volume[static_cast<std::size_t>(t.volume)] += t.omega;
        ce.constant -= t.length * t.omega;
    }
    ce.e0_by_volume.assign(per_volume.size(), 0.0);
    double acc = 0;
    for (std::size_t v = 0; v < per_volume.size(); ++v) {
        acc -= per_volume[v];
        ce.e0_by_volume[v] = acc;
    }
    ce.e0 = acc;
    return ce;
}

ClusterEnergy cluster_energy(const Lattice &lat, const PerturbationSpec &pert, int max_volume, int sigma, int mu) {
    return cluster_energy(WeightEngine(ExpansionModel::charge_sector(lat, pert, sigma, mu)), max_volume);
}

ClusterSeries cluster_series(const WeightEngine &eng, int max_volume) {
    require(max_volume >= 0, ErrorKind::Sizing, "max_volume must be non-negative");
    require(max_volume <= 16, ErrorKind::Capacity, "series limited to volume 16");
    const auto &m = eng.model();
    const auto V = static_cast<std::size_t>(max_volume);
    const int np = static_cast<int>(m.n_perturbations());
    require(np < 31, ErrorKind::Capacity, "series limited to 30 perturbation terms");

    std::vector<Slice> slices;
    for (std::uint64_t I = 0; I < (std::uint64_t{1} << np); ++I) {
        const int ni = popcount(I);
        if (ni > max_volume) continue;
        const std::uint64_t bar = m.closure(I);
        const std::uint64_t free = ((std::uint64_t{1} << m.n_sites) - 1) & ~bar;
        std::uint64_t J = free;
        while (true) {
            if (ni + popcount(J) <= max_volume) slices.push_back({I, J});
            if (J == 0) break;
            J = (J - 1) & free;
        }
    }

    const auto dim = static_cast<Eigen::Index>(m.dim());
    // w[d]: coefficient of lambda^d in the propagated vector.
    std::vector<Eigen::VectorXd> w(V + 1, Eigen::VectorXd::Zero(dim));
    w[0](0) = 1;
    auto log_series = [&](const std::vector<double> &z) {
        // log of a series with z[0] = 1: d log z = z'/z.
        std::vector<double> l(V + 1, 0.0);
        for (std::size_t n = 1; n <= V; ++n) {
            double s = static_cast<double>(n) * z[n];
            for (std::size_t k = 1; k < n; ++k) s -= static_cast<double>(k) * l[k] * z[n - k];
            l[n] = s / static_cast<double>(n);
        }
        return l;
    };
    std::vector<double> prev_log;
    const int steps = max_volume + 2;
    for (int step = 1; step <= steps; ++step) {
        std::vector<Eigen::VectorXd> nw(V + 1, Eigen::VectorXd::Zero(dim));
        for (const auto &s : slices) {
            const auto vol = static_cast<std::size_t>(popcount(s.I) + popcount(s.J));
            for (std::size_t d = 0; d + vol <= V; ++d) {
                if (w[d].cwiseAbs().maxCoeff() == 0.0) continue;
                Eigen::VectorXd x = w[d];
                eng.apply_T(s, x);
                nw[d + vol] += x;
            }
        }
        w = std::move(nw);
        std::vector<double> z(V + 1);
        for (std::size_t d = 0; d <= V; ++d) z[d] = w[d](0);
        const auto l = log_series(z);
        if (step == steps) {
            ClusterSeries cs;
            cs.max_volume = max_volume;
            cs.omega_by_volume.assign(V + 1, 0.0);
            cs.e0_by_volume.assign(V + 1, 0.0);
            cs.constant_by_volume.assign(V + 1, 0.0);
            double e = 0, c = 0;
            for (std::size_t d = 1; d <= V; ++d) {
                const double slope = l[d] - prev_log[d];
                cs.omega_by_volume[d] = slope;
                e -= slope;
                c += l[d] - step * slope;
                cs.e0_by_volume[d] = e;
                cs.constant_by_volume[d] = c;
            }
            cs.e0 = e;
            cs.constant = c;
            return cs;
        }
        prev_log = l;
    }
    return {};
}

double gap_term_tail(const ClusterEnergy &ce, int n) {
    require(n >= 0, ErrorKind::Sizing, "N must be non-negative");
    double s = 0;
    for (const auto &t : ce.terms)
        if (t.length > n) s += (t.length - n) * t.omega;
    return s;
}

double gap_term_tail(const Lattice &lat, const PerturbationSpec &pert, int n, int max_volume) {
    return gap_term_tail(cluster_energy(lat, pert, max_volume), n);
}

// ---------------------------------------------------------------- cluster counting

SpaceTime space_time_graph(const Lattice &lat, int n_slices) {
    require(n_slices >= 1, ErrorKind::Sizing, "need at least one slice");
    const int nv = lat.num_vertices();
    SpaceTime g{nv * n_slices, {}};
    g.adj.resize(static_cast<std::size_t>(g.n_cells));
    for (int t = 0; t < n_slices; ++t)
        for (int v = 0; v < nv; ++v) {
            auto &a = g.adj[static_cast<std::size_t>(t * nv + v)];
            for (int w : lat.king_neighbours(v))
                if (w != v) a.push_back(t * nv + w);
            if (t > 0) a.push_back((t - 1) * nv + v);
            if (t + 1 < n_slices) a.push_back((t + 1) * nv + v);
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
    return g;
}

namespace {

// Each connected cell set containing the root is visited once; cells below
// `floor` are excluded so that summing over roots counts each set once.
struct Redelmeier {
    const SpaceTime &g;
    int max_volume;
    int floor;
    std::vector<char> seen;
    std::vector<int> current;
    std::vector<std::uint64_t> *counts;
    std::vector<std::vector<int>> *sets = nullptr;
    std::size_t cap = 0;

    void rec(std::vector<int> untried) {
        while (!untried.empty()) {
            const int c = untried.back();
            untried.pop_back();
            current.push_back(c);
            ++(*counts)[current.size()];
            if (sets) {
                require(sets->size() < cap, ErrorKind::Capacity, "cluster list exceeded its cap");
                sets->push_back(current);
                std::sort(sets->back().begin(), sets->back().end());
            }
            if (static_cast<int>(current.size()) < max_volume) {
                std::vector<int> added;
                for (int nb : g.adj[static_cast<std::size_t>(c)])
                    if (nb >= floor && !seen[static_cast<std::size_t>(nb)]) {
                        seen[static_cast<std::size_t>(nb)] = 1;
                        added.push_back(nb);
                    }
                std::vector<int> next = untried;
                next.insert(next.end(), added.begin(), added.end());
                rec(std::move(next));
                for (int a : added) seen[static_cast<std::size_t>(a)] = 0;
            }
            current.pop_back();
        }
    }

    void run(int root) {
        seen.assign(static_cast<std::size_t>(g.n_cells), 0);
        seen[static_cast<std::size_t>(root)] = 1;
        rec({root});
    }
};

}  // namespace

ClusterCounts count_clusters(const Lattice &lat, int n_slices, int max_volume) {
    require(max_volume >= 1, ErrorKind::Sizing, "max_volume must be positive");
    require(max_volume <= kMaxClusterVolume, ErrorKind::Capacity, "cluster counting limited to volume 8");
    const SpaceTime g = space_time_graph(lat, n_slices);
    ClusterCounts cc;
    cc.n_cells = g.n_cells;
    cc.total.assign(static_cast<std::size_t>(max_volume) + 1, 0);
    cc.rooted.assign(static_cast<std::size_t>(max_volume) + 1, 0);
    for (int r = 0; r < g.n_cells; ++r) {
        Redelmeier rd{g, max_volume, r, {}, {}, &cc.total};
        rd.run(r);
    }
    cc.root = (n_slices / 2) * lat.num_vertices();
    Redelmeier rd{g, max_volume, 0, {}, {}, &cc.rooted};
    rd.run(cc.root);

    cc.nu = 0;
    for (int l = 2; l <= max_volume; ++l)
        if (cc.rooted[static_cast<std::size_t>(l - 1)] > 0)
            cc.nu = std::max(cc.nu, static_cast<double>(cc.rooted[static_cast<std::size_t>(l)]) /
                                        static_cast<double>(cc.rooted[static_cast<std::size_t>(l - 1)]));
    if (max_volume == 1) cc.nu = 1;
    std::vector<double> xs, ys;
    for (int l = 1; l <= max_volume; ++l) {
        xs.push_back(l);
        ys.push_back(std::log(static_cast<double>(cc.rooted[static_cast<std::size_t>(l)])));
    }
    cc.nu_fit = xs.size() >= 2 ? std::exp(fit_line(xs, ys).slope) : cc.nu;
    cc.bound_holds = true;
    for (int l = 1; l <= max_volume; ++l)
        if (static_cast<double>(cc.rooted[static_cast<std::size_t>(l)]) > std::pow(cc.nu, l) * (1 + 1e-12))
            cc.bound_holds = false;
    return cc;
}

std::vector<std::vector<int>> enumerate_clusters(const Lattice &lat, int n_slices, int max_volume, std::size_t cap) {
    require(max_volume >= 1, ErrorKind::Sizing, "max_volume must be positive");
    require(max_volume <= kMaxClusterVolume, ErrorKind::Capacity, "cluster enumeration limited to volume 8");
    const SpaceTime g = space_time_graph(lat, n_slices);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_volume) + 1, 0);
    std::vector<std::vector<int>> sets;
    for (int r = 0; r < g.n_cells; ++r) {
        Redelmeier rd{g, max_volume, r, {}, {}, &counts, &sets, cap};
        rd.run(r);
    }
    std::sort(sets.begin(), sets.end(), [](const auto &a, const auto &b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return sets;
}

}  // namespace toricgap
