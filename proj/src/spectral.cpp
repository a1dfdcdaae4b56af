#include "toricgap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "toricgap/dense.hpp"
#include "toricgap/error.hpp"

namespace toricgap {

namespace {

using Vec = Eigen::VectorXcd;

// Keeps the Krylov basis under ~256 MiB.
constexpr std::size_t kKrylovBudget = std::size_t{1} << 24;

Vec random_vector(std::size_t dim, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
    return v;
}

void project_out(const std::vector<Vec> &basis, Vec &w) {
    for (const auto &y : basis) w -= y * y.dot(w);
}

struct LanczosRun {
    std::vector<Vec> q;
    Eigen::VectorXd theta;
    Eigen::MatrixXd s;
    std::vector<double> resid;
    int converged = 0;  // bottom Ritz pairs with residual <= tol
    bool exhausted = false;
};

LanczosRun lanczos(const LinearOperator &op, const std::vector<Vec> &locked, Vec start, int m_max, int need,
                   double tol, int &iterations) {
    LanczosRun run;
    const std::size_t dim = op.dim();
    for (int pass = 0; pass < 2; ++pass) project_out(locked, start);
    double nrm = start.norm();
    if (nrm < 1e-10) {
        run.exhausted = true;
        return run;
    }
    run.q.push_back(start / nrm);
    std::vector<double> alpha, beta;
    double scale = 1.0;
    Vec w(static_cast<Eigen::Index>(dim));
    for (int j = 0; j < m_max; ++j) {
        op.apply(run.q[static_cast<std::size_t>(j)].data(), w.data());
        ++iterations;
        project_out(locked, w);
        double a = run.q[static_cast<std::size_t>(j)].dot(w).real();
        w -= a * run.q[static_cast<std::size_t>(j)];
        if (j > 0) w -= beta.back() * run.q[static_cast<std::size_t>(j - 1)];
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &qi : run.q) w -= qi * qi.dot(w);
            project_out(locked, w);
        }
        double b = w.norm();
        alpha.push_back(a);
        scale = std::max(scale, std::abs(a) + b);
        const int m = j + 1;
        const bool breakdown = b < 1e-12 * scale;
        if (breakdown || m % 5 == 0 || m == m_max) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
            for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            run.theta = es.eigenvalues();
            run.s = es.eigenvectors();
            run.resid.assign(static_cast<std::size_t>(m), 0.0);
            run.converged = 0;
            for (int i = 0; i < m; ++i) run.resid[static_cast<std::size_t>(i)] = breakdown ? 0.0 : b * std::abs(run.s(m - 1, i));
            while (run.converged < m && run.resid[static_cast<std::size_t>(run.converged)] <= tol) ++run.converged;
            if (breakdown || run.converged >= need || m == m_max) return run;
        }
        beta.push_back(b);
        run.q.push_back(w / b);
    }
    return run;
}

Vec ritz_vector(const LanczosRun &run, int i) {
    Vec y = Vec::Zero(run.q.front().size());
    for (std::size_t j = 0; j < run.q.size() && static_cast<Eigen::Index>(j) < run.s.rows(); ++j)
        y += run.s(static_cast<Eigen::Index>(j), i) * run.q[j];
    return y;
}

double rayleigh(const LinearOperator &op, const Vec &y, double *residual) {
    Vec ay(y.size());
    op.apply(y.data(), ay.data());
    double theta = y.dot(ay).real();
    if (residual) *residual = (ay - theta * y).norm();
    return theta;
}

void finish_report(SpectrumReport &rep, double width) {
    rep.multiplets = cluster_multiplets(rep.eigenvalues, width);
    rep.ground = rep.eigenvalues.empty() ? std::numeric_limits<double>::quiet_NaN() : rep.eigenvalues.front();
    if (rep.multiplets.size() >= 2) rep.gap = rep.multiplets[1].value - rep.multiplets[0].value;
}

SpectrumReport dense_lowest(const LinearOperator &op, const SolverOptions &opt) {
    SpectrumReport rep;
    rep.method = "dense";
    Eigen::MatrixXcd m = operator_matrix(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const auto &vals = es.eigenvalues();
    const Eigen::Index k = std::min<Eigen::Index>(opt.k, vals.size());
    Eigen::Index count = k;
    while (count < vals.size() && vals(count) - vals(k - 1) <= 10 * opt.tol) ++count;
    for (Eigen::Index i = 0; i < count; ++i) {
        Vec y = es.eigenvectors().col(i);
        double r = 0;
        rayleigh(op, y, &r);
        rep.eigenvalues.push_back(vals(i));
        rep.residuals.push_back(r);
        if (opt.want_vectors) rep.vectors.push_back(y);
    }
    return rep;
}

}  // namespace

std::vector<Multiplet> cluster_multiplets(const std::vector<double> &sorted_values, double width) {
    std::vector<Multiplet> out;
    double sum = 0, last = 0;
    int count = 0;
    for (double v : sorted_values) {
        if (count > 0 && v - last > width) {
            out.push_back({sum / count, count});
            sum = 0;
            count = 0;
        }
        sum += v;
        last = v;
        ++count;
    }
    if (count > 0) out.push_back({sum / count, count});
    return out;
}

SpectrumReport lowest_eigenvalues(const LinearOperator &op, const SolverOptions &opt) {
    const std::size_t dim = op.dim();
    require(opt.k >= 1, ErrorKind::Domain, "k must be at least 1");
    require(opt.tol > 0, ErrorKind::Domain, "tolerance must be positive");
    require(dim >= static_cast<std::size_t>(opt.k), ErrorKind::Domain,
            "operator dimension " + std::to_string(dim) + " is smaller than k = " + std::to_string(opt.k));

    SpectrumReport rep;
    rep.dim = dim;
    rep.seed = opt.seed;
    rep.tol = opt.tol;
    if (dim <= opt.dense_threshold) {
        SpectrumReport d = dense_lowest(op, opt);
        d.dim = dim;
        d.seed = opt.seed;
        d.tol = opt.tol;
        finish_report(d, 10 * opt.tol);
        return d;
    }
    rep.method = "lanczos";

    std::mt19937_64 rng(opt.seed);
    std::vector<Vec> locked;
    std::vector<double> values;
    const int m_cap = static_cast<int>(std::max<std::size_t>(20, std::min<std::size_t>(
                                                                     static_cast<std::size_t>(opt.max_krylov),
                                                                     kKrylovBudget / std::max<std::size_t>(dim, 1))));
    Vec start = random_vector(dim, rng);
    int stalls = 0, runs = 0;
    const int max_runs = 4 * opt.k + 4 * opt.max_restarts + 64;
    while (locked.size() < dim) {
        require(++runs <= max_runs, ErrorKind::Convergence, "Lanczos exceeded its run budget");
        const int need = std::max(1, opt.k - static_cast<int>(locked.size()));
        const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(m_cap), dim - locked.size()));
        LanczosRun run = lanczos(op, locked, start, m_max, need, opt.tol, rep.iterations);
        if (run.exhausted) {
            start = random_vector(dim, rng);
            continue;
        }
        if (run.converged == 0) {
            require(++stalls <= opt.max_restarts, ErrorKind::Convergence,
                    "Lanczos did not reach residual " + std::to_string(opt.tol) + " after " +
                        std::to_string(opt.max_restarts) + " restarts");
            ++rep.restarts;
            start = ritz_vector(run, 0);
            continue;
        }
        double kth = std::numeric_limits<double>::infinity();
        const bool verifying = locked.size() >= static_cast<std::size_t>(opt.k);
        if (verifying) {
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            kth = sorted[static_cast<std::size_t>(opt.k - 1)];
            if (run.theta(0) >= kth - 10 * opt.tol) break;
        }
        for (int i = 0; i < run.converged; ++i) {
            if (verifying && run.theta(i) >= kth - 10 * opt.tol) break;
            Vec y = ritz_vector(run, i);
            for (int pass = 0; pass < 2; ++pass) project_out(locked, y);
            double nrm = y.norm();
            if (nrm < 1e-8) continue;
            y /= nrm;
            values.push_back(rayleigh(op, y, nullptr));
            locked.push_back(std::move(y));
        }
        start = random_vector(dim, rng);
    }

    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double kth = values[order[static_cast<std::size_t>(opt.k - 1)]];
    for (std::size_t idx : order) {
        if (rep.eigenvalues.size() >= static_cast<std::size_t>(opt.k) && values[idx] > kth + 10 * opt.tol) break;
        double r = 0;
        rayleigh(op, locked[idx], &r);
        rep.eigenvalues.push_back(values[idx]);
        rep.residuals.push_back(r);
        if (opt.want_vectors) rep.vectors.push_back(locked[idx]);
    }
    finish_report(rep, 10 * opt.tol);
    return rep;
}

std::vector<SpectrumReport> sector_energies(const HamiltonianSpec &h, const SolverOptions &opt, const BitVec &syndrome,
                                            int workers) {
    const Lattice &lat = h.lattice;
    BitVec syn = syndrome.size() ? syndrome : BitVec(static_cast<std::size_t>(lat.num_faces()));
    auto labels = all_labels(lat, syn);

    // Terms commuting with both dual loops make the four sectors unitarily equivalent.
    bool symmetric = lat.is_torus();
    if (symmetric) {
        PauliString d1 = PauliString::x_string(lat.dual_cycle(1)), d2 = PauliString::x_string(lat.dual_cycle(2));
        for (const auto &t : h.terms)
            if (!commutes(t.op, d1) || !commutes(t.op, d2)) symmetric = false;
    }
    std::vector<SpectrumReport> out;
    for (const auto &label : labels) {
        if (symmetric && !out.empty()) {
            SpectrumReport copy = out.front();
            copy.label = label.to_string();
            out.push_back(std::move(copy));
            continue;
        }
        SectorBasis basis = enumerate_sector(lat, label);
        ReducedOperator op(h, basis.basis, workers);
        SpectrumReport rep = lowest_eigenvalues(op, opt);
        rep.label = label.to_string();
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<SpectrumReport> sector_energies(const Lattice &lat, const PerturbationSpec &pert, const SolverOptions &opt,
                                            const BitVec &syndrome, int workers) {
    require(pert.z_only(static_cast<std::size_t>(lat.num_edges())), ErrorKind::Domain,
            "sector decomposition needs a z-only perturbation");
    return sector_energies(build_perturbed(lat, pert), opt, syndrome, workers);
}

LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::Domain, "line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, ErrorKind::Domain, "line fit needs distinct abscissas");
    LineFit f{sxy / sxx, 0, 0};
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

SplittingReport splitting_scan(const PerturbationSpec &pert, const std::vector<std::pair<int, int>> &sizes,
                               const SolverOptions &opt, int workers) {
    require(sizes.size() >= 2, ErrorKind::Domain, "splitting scan needs at least two sizes");
    SplittingReport rep;
    rep.beta = pert.beta;
    bool degenerate = false;
    std::vector<double> xs, ys;
    for (auto [l1, l2] : sizes) {
        Lattice lat = Lattice::build(Topology::Torus, l1, l2);
        auto reports = sector_energies(lat, pert, opt, {}, workers);
        SplittingRow row{l1, l2, {}, 0};
        for (const auto &r : reports) row.energies.push_back(r.ground);
        auto [lo, hi] = std::minmax_element(row.energies.begin(), row.energies.end());
        row.delta = *hi - *lo;
        if (row.delta <= 10 * opt.tol) degenerate = true;
        xs.push_back(std::min(l1, l2));
        ys.push_back(std::log(std::max(row.delta, 1e-300)));
        rep.rows.push_back(std::move(row));
    }
    if (degenerate) {
        rep.flag = "degenerate";
        return rep;
    }
    if (std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs.front(); })) {
        rep.flag = "undetermined";
        return rep;
    }
    LineFit f = fit_line(xs, ys);
    rep.kappa = -f.slope;
    rep.intercept = f.intercept;
    rep.fit_residual = f.rms;
    rep.flag = rep.kappa > 0 ? "ok" : "non-decaying";
    return rep;
}

ExcitationGap excitation_gap(const Lattice &lat, const PerturbationSpec &pert, const BitVec &syndrome,
                             const SolverOptions &opt, int workers) {
    require(syndrome.size() == static_cast<std::size_t>(lat.num_faces()), ErrorKind::Sector,
            "syndrome length does not match the face count");
    auto min_ground = [](const std::vector<SpectrumReport> &reps) {
        double e = std::numeric_limits<double>::infinity();
        for (const auto &r : reps) e = std::min(e, r.ground);
        return e;
    };
    double e0 = min_ground(sector_energies(lat, pert, opt, {}, workers));
    double e1 = min_ground(sector_energies(lat, pert, opt, syndrome, workers));
    return {e1 - e0, e1, e0, static_cast<int>(syndrome.count())};
}

double xc_identity_residual(const HamiltonianSpec &h, const EdgeSet &c, double n) {
    require(h.n_sites() <= kMaxDenseSites, ErrorKind::Capacity, "dense identity check limited to 12 edges");
    const auto xp = x_particle_hamiltonian(h, c);
    const PauliString xc = PauliString::x_string(c);
    auto expm = [n](const Eigen::MatrixXcd &m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        Eigen::VectorXd d = (-n * es.eigenvalues().array()).exp();
        return Eigen::MatrixXcd(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint());
    };
    const Eigen::MatrixXcd lhs_op = expm(hamiltonian_matrix(h));
    const auto dim = lhs_op.rows();
    const Eigen::MatrixXcd rhs_op =
        expm(hamiltonian_matrix(xp.h_c) + static_cast<double>(xp.n_x) * Eigen::MatrixXcd::Identity(dim, dim));
    double worst = 0;
    for (const auto &[key, gs] : ground_states(h.lattice)) {
        const StateVector full = gs.to_full();
        const Eigen::VectorXcd psi = to_eigen(full);
        const Eigen::VectorXcd phi = to_eigen(apply(xc, full));
        const cplx lhs = phi.dot(lhs_op * phi);
        const cplx rhs = psi.dot(rhs_op * psi);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

StringState string_state(const HamiltonianSpec &h, const EdgeSet &c, int sigma, int mu) {
    const auto gs = ground_states(h.lattice);
    const auto it = gs.find({sigma, mu});
    require(it != gs.end(), ErrorKind::Sector, "unknown sector");
    const StateVector &psi = it->second;
    ReducedOperator op(conjugated_hamiltonian(h, c), psi.basis());
    const StateVector hpsi = op.apply(psi);
    const double e = inner(psi, hpsi).real();
    double r2 = 0;
    for (std::size_t i = 0; i < psi.dim(); ++i) r2 += std::norm(hpsi[i] - e * psi[i]);
    return {e, std::sqrt(r2), static_cast<int>(face_syndrome(h.lattice, c).count())};
}

PartitionEvaluator::PartitionEvaluator(const LinearOperator &op, Eigen::VectorXcd psi, PartitionOptions opt)
    : op_(op), psi_(std::move(psi)), opt_(opt) {
    require(static_cast<std::size_t>(psi_.size()) == op.dim(), ErrorKind::Sizing, "state and operator sizes differ");
    if (op.dim() <= opt_.dense_max) {
        dense_ = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(operator_matrix(op));
        energies_ = es.eigenvalues();
        weights_ = (es.eigenvectors().adjoint() * psi_).cwiseAbs2();
    }
}

double PartitionEvaluator::krylov_log_norm(double tau_total, int steps) const {
    const double tau = tau_total / steps;
    const Eigen::Index dim = psi_.size();
    const int m = static_cast<int>(std::min<Eigen::Index>(opt_.krylov_dim, dim));
    Vec phi = psi_;
    double log_norm = 0;
    Vec w(dim);
    for (int s = 0; s < steps; ++s) {
        double nrm = phi.norm();
        require(nrm > 0, ErrorKind::Convergence, "propagated state vanished");
        log_norm += std::log(nrm);
        std::vector<Vec> q{phi / nrm};
        std::vector<double> alpha, beta;
        for (int j = 0; j < m; ++j) {
            op_.apply(q.back().data(), w.data());
            double a = q.back().dot(w).real();
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto &qi : q) w -= qi * qi.dot(w);
            double b = w.norm();
            if (j + 1 == m || b < 1e-12 * (1 + std::abs(a))) break;
            beta.push_back(b);
            q.push_back(w / b);
        }
        const int mm = static_cast<int>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mm, mm);
        for (int i = 0; i < mm; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < mm; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const double shift = es.eigenvalues()(0);
        Eigen::VectorXd c = es.eigenvectors() *
                            (es.eigenvalues().array() - shift).unaryExpr([&](double x) { return std::exp(-tau * x); }).matrix()
                                .cwiseProduct(es.eigenvectors().row(0).transpose());
        log_norm -= tau * shift;
        phi = Vec::Zero(dim);
        for (int i = 0; i < mm; ++i) phi += c(i) * q[static_cast<std::size_t>(i)];
    }
    return log_norm + std::log(phi.norm());
}

double PartitionEvaluator::log_z(double n) const {
    require(n >= 0, ErrorKind::Domain, "N must be non-negative");
    if (dense_) {
        double e0 = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < energies_.size(); ++i)
            if (weights_(i) > 0) e0 = std::min(e0, energies_(i));
        double acc = 0;
        for (Eigen::Index i = 0; i < energies_.size(); ++i) acc += weights_(i) * std::exp(-n * (energies_(i) - e0));
        require(acc > 0, ErrorKind::Domain, "state has zero norm");
        return -n * e0 + std::log(acc);
    }
    if (n == 0) return 2 * std::log(psi_.norm());
    double prev = 2 * krylov_log_norm(n / 2, 1);
    for (int steps = 2; steps <= opt_.max_steps; steps *= 2) {
        double cur = 2 * krylov_log_norm(n / 2, steps);
        if (std::abs(cur - prev) <= opt_.rel_tol) return cur;
        prev = cur;
    }
    fail(ErrorKind::Convergence, "imaginary-time propagation did not reach relative accuracy " +
                                     std::to_string(opt_.rel_tol));
}

double PartitionEvaluator::z(double n) const { return std::exp(log_z(n)); }

double partition_amplitude(const LinearOperator &op, const StateVector &psi, double n, PartitionOptions opt) {
    return PartitionEvaluator(op, to_eigen(psi), opt).z(n);
}

AsymptoticFit asymptotic_fit(const std::vector<double> &ns, const std::vector<double> &log_z) {
    require(ns.size() == log_z.size(), ErrorKind::Domain, "series lengths differ");
    require(ns.size() >= 4, ErrorKind::Domain, "asymptotic fit needs at least four values of N");
    for (std::size_t i = 1; i < ns.size(); ++i) require(ns[i] > ns[i - 1], ErrorKind::Domain, "N must increase");
    const std::size_t tail = ns.size() / 2;
    std::vector<double> tx(ns.begin() + static_cast<long>(tail), ns.end()),
        ty(log_z.begin() + static_cast<long>(tail), log_z.end());
    LineFit f = fit_line(tx, ty);
    AsymptoticFit out{f.intercept, -f.slope, std::numeric_limits<double>::infinity(), true, {}};
    for (std::size_t i = 0; i < ns.size(); ++i) out.residuals.push_back(log_z[i] - (f.intercept + f.slope * ns[i]));

    std::vector<double> hx, hy;
    for (std::size_t i = 0; i < tail; ++i) {
        double r = std::abs(out.residuals[i]);
        if (r > 1e-13) {
            hx.push_back(ns[i]);
            hy.push_back(std::log(r));
        }
    }
    for (std::size_t i = 1; i < tail; ++i)
        if (std::abs(out.residuals[i]) > std::abs(out.residuals[i - 1]) + 1e-14) out.monotone = false;
    if (hx.size() >= 2)
        out.gamma = -fit_line(hx, hy).slope;
    else if (!hx.empty())
        out.gamma = std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace toricgap
