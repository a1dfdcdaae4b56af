#include "toricgap/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "toricgap/error.hpp"

namespace toricgap {

std::string to_string(TermGroup g) {
    switch (g) {
        case TermGroup::Star: return "star";
        case TermGroup::Plaquette: return "plaquette";
        case TermGroup::Perturbation: return "perturbation";
        case TermGroup::Loop: return "loop";
    }
    return "?";
}

std::string to_string(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::ZField: return "z-field";
        case PerturbationKind::ZIsing: return "z-ising";
        case PerturbationKind::ZLoopRow: return "z-loop-row";
        case PerturbationKind::Custom: return "custom";
    }
    return "?";
}

PerturbationKind parse_perturbation_kind(const std::string &text) {
    std::string s;
    for (char ch : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "z-field" || s == "zfield") return PerturbationKind::ZField;
    if (s == "z-ising" || s == "zising") return PerturbationKind::ZIsing;
    if (s == "z-loop-row" || s == "zlooprow") return PerturbationKind::ZLoopRow;
    if (s == "custom") return PerturbationKind::Custom;
    fail(ErrorKind::Config, "unknown perturbation kind '" + text + "' (expected z-field|z-ising|z-loop-row|custom)");
}

bool HamiltonianSpec::is_z_only(TermGroup g) const {
    for (const auto &t : terms)
        if (t.group == g && !t.op.is_z_only()) return false;
    return true;
}

bool HamiltonianSpec::all_commute() const {
    for (std::size_t a = 0; a < terms.size(); ++a)
        for (std::size_t b = a + 1; b < terms.size(); ++b)
            if (!commutes(terms[a].op, terms[b].op)) return false;
    return true;
}

void HamiltonianSpec::add(const HamiltonianSpec &other) {
    require(other.n_sites() == n_sites(), ErrorKind::Sizing, "Hamiltonians live on different lattices");
    offset += other.offset;
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
}

std::vector<Term> HamiltonianSpec::group(TermGroup g) const {
    std::vector<Term> out;
    for (const auto &t : terms)
        if (t.group == g) out.push_back(t);
    return out;
}

HamiltonianSpec operator+(HamiltonianSpec a, const HamiltonianSpec &b) {
    a.add(b);
    return a;
}

bool PerturbationSpec::z_only(std::size_t n_sites) const {
    if (kind != PerturbationKind::Custom) return true;
    for (const auto &t : terms)
        if (!PauliString::parse(t.pauli, n_sites).is_z_only()) return false;
    return true;
}

HamiltonianSpec build_toric_code(const Lattice &lat) {
    HamiltonianSpec h{lat, 0.0, {}};
    for (int v = 0; v < lat.num_vertices(); ++v) {
        h.offset += 0.5;
        h.terms.push_back({-0.5, PauliString::x_string(lat.star(v)), TermGroup::Star, v});
    }
    for (int f = 0; f < lat.num_faces(); ++f) {
        h.offset += 0.5;
        h.terms.push_back({-0.5, PauliString::z_string(lat.plaquette(f)), TermGroup::Plaquette, f});
    }
    return h;
}

PauliString column_loop(const Lattice &lat, int m) {
    require(lat.is_torus(), ErrorKind::Domain, "loop operators need the torus");
    require(m >= 0 && m < lat.l1(), ErrorKind::Domain, "column out of range");
    EdgeSet s = lat.empty_set();
    for (int j = 0; j < lat.l2(); ++j) s.set(static_cast<std::size_t>(lat.edge_index(m, j, EdgeDir::Vertical)));
    return PauliString::z_string(s);
}

HamiltonianSpec build_perturbation(const Lattice &lat, const PerturbationSpec &spec) {
    require(std::isfinite(spec.beta), ErrorKind::Config, "beta must be finite");
    HamiltonianSpec h{lat, 0.0, {}};
    const std::size_t n = static_cast<std::size_t>(lat.num_edges());
    switch (spec.kind) {
        case PerturbationKind::ZField:
            for (std::size_t e = 0; e < n; ++e)
                h.terms.push_back({spec.beta, PauliString::single(n, e, 'Z'), TermGroup::Perturbation, static_cast<int>(e)});
            break;
        case PerturbationKind::ZIsing: {
            std::set<std::pair<std::size_t, std::size_t>> pairs;
            for (int v = 0; v < lat.num_vertices(); ++v) {
                auto es = lat.star(v).indices();
                for (std::size_t a = 0; a < es.size(); ++a)
                    for (std::size_t b = a + 1; b < es.size(); ++b) pairs.insert({es[a], es[b]});
            }
            int k = 0;
            for (auto [a, b] : pairs) {
                EdgeSet s = lat.empty_set();
                s.set(a);
                s.set(b);
                h.terms.push_back({spec.beta, PauliString::z_string(s), TermGroup::Perturbation, k++});
            }
            break;
        }
        case PerturbationKind::ZLoopRow:
            require(lat.is_torus(), ErrorKind::Domain, "z-loop-row perturbation needs the torus");
            for (int m = 0; m < lat.l1(); ++m)
                h.terms.push_back({spec.beta / lat.l1(), column_loop(lat, m), TermGroup::Loop, m});
            break;
        case PerturbationKind::Custom: {
            require(!spec.terms.empty(), ErrorKind::Config, "custom perturbation needs at least one term");
            double cmax = 0;
            for (const auto &t : spec.terms) {
                require(std::isfinite(t.coefficient), ErrorKind::Config, "custom coefficient must be finite");
                cmax = std::max(cmax, std::abs(t.coefficient));
            }
            int k = 0;
            for (const auto &t : spec.terms) {
                PauliString p = PauliString::parse(t.pauli, n);
                require(p.is_hermitian(), ErrorKind::Config, "custom term '" + t.pauli + "' is not Hermitian");
                double c = cmax > 0 ? t.coefficient / cmax : 0.0;
                if (p.phase() == 2) c = -c;
                h.terms.push_back({spec.beta * c, p.with_phase(0), TermGroup::Perturbation, k++});
            }
            break;
        }
    }
    return h;
}

HamiltonianSpec build_perturbed(const Lattice &lat, const PerturbationSpec &spec) {
    return build_toric_code(lat) + build_perturbation(lat, spec);
}

HamiltonianSpec build_thin_torus_split(const Lattice &lat) {
    require(lat.is_torus(), ErrorKind::Domain, "thin-torus Hamiltonians need the torus");
    HamiltonianSpec h = build_toric_code(lat);
    for (int m = 0; m < lat.l1(); ++m) h.terms.push_back({1.0 / lat.l1(), column_loop(lat, m), TermGroup::Loop, m});
    return h;
}

HamiltonianSpec build_thin_torus_gapless(const Lattice &lat) {
    require(lat.is_torus(), ErrorKind::Domain, "thin-torus Hamiltonians need the torus");
    require(lat.l1() % 2 == 0, ErrorKind::Sizing, "gapless thin torus needs an even first dimension 2*L1");
    const int half = lat.l1() / 2;
    const double w = 2.0 / half;
    HamiltonianSpec h = build_toric_code(lat);
    h.offset -= 4.0;
    for (int m = 0; m < lat.l1(); ++m)
        h.terms.push_back({m < half ? -w : w, column_loop(lat, m), TermGroup::Loop, m});
    return h;
}

EdgeSet thin_torus_cut(const Lattice &lat, int row, int length) {
    require(length >= 1 && length <= lat.l1(), ErrorKind::Domain, "cut length out of range");
    EdgeSet c = lat.empty_set();
    for (int m = 0; m < length; ++m) c.set(static_cast<std::size_t>(lat.edge_index(m, row, EdgeDir::Vertical)));
    return c;
}

PauliString loop_operator(const Lattice &lat, int direction) {
    return PauliString::z_string(lat.homology_cycle(direction));
}

BitVec face_syndrome(const Lattice &lat, const EdgeSet &c) {
    BitVec s(static_cast<std::size_t>(lat.num_faces()));
    for (int f = 0; f < lat.num_faces(); ++f)
        if (overlap_parity(lat.plaquette(f), c)) s.set(static_cast<std::size_t>(f));
    return s;
}

StringOperator string_operator(const Lattice &lat, const EdgeSet &c, StringType type) {
    require(c.size() == static_cast<std::size_t>(lat.num_edges()), ErrorKind::Sizing, "edge set has wrong length");
    require(c.any(), ErrorKind::Domain, "string support must be nonempty");
    if (type == StringType::X) {
        BitVec syn = face_syndrome(lat, c);
        return {PauliString::x_string(c), syn, static_cast<int>(syn.count())};
    }
    BitVec syn(static_cast<std::size_t>(lat.num_vertices()));
    for (int v = 0; v < lat.num_vertices(); ++v)
        if (overlap_parity(lat.star(v), c)) syn.set(static_cast<std::size_t>(v));
    return {PauliString::z_string(c), syn, static_cast<int>(syn.count())};
}

HamiltonianSpec conjugated_hamiltonian(const HamiltonianSpec &h, const EdgeSet &c) {
    HamiltonianSpec out = h;
    for (auto &t : out.terms)
        if (overlap_parity(t.op.z(), c)) t.coefficient = -t.coefficient;
    return out;
}

XParticleHamiltonian x_particle_hamiltonian(const HamiltonianSpec &h, const EdgeSet &c) {
    XParticleHamiltonian out{h, static_cast<int>(face_syndrome(h.lattice, c).count())};
    for (auto &t : out.h_c.terms)
        if ((t.group == TermGroup::Perturbation || t.group == TermGroup::Loop) && overlap_parity(t.op.z(), c))
            t.coefficient = -t.coefficient;
    return out;
}

}  // namespace toricgap
