#include "toricgap/lattice.hpp"

#include <algorithm>

#include "toricgap/error.hpp"

namespace toricgap {

std::string to_string(Topology t) { return t == Topology::Torus ? "torus" : "planar"; }

Topology parse_topology(const std::string &s) {
    if (s == "torus") return Topology::Torus;
    if (s == "planar") return Topology::Planar;
    fail(ErrorKind::Config, "unknown topology '" + s + "' (expected torus|planar)");
}

Lattice Lattice::build(Topology topology, int l1, int l2) {
    require(l1 >= 2 && l2 >= 2, ErrorKind::Sizing,
            "lattice needs at least 2 vertices in each direction, got " + std::to_string(l1) + "x" +
                std::to_string(l2));
    require(static_cast<long>(l1) * l2 <= 4096, ErrorKind::Sizing, "lattice too large");
    Lattice lat;
    lat.topology_ = topology;
    lat.l1_ = l1;
    lat.l2_ = l2;
    const bool torus = topology == Topology::Torus;
    lat.face_w_ = torus ? l1 : l1 - 1;
    lat.face_h_ = torus ? l2 : l2 - 1;
    lat.lookup_.assign(static_cast<std::size_t>(2 * l1 * l2), -1);
    for (int j = 0; j < l2; ++j) {
        for (int i = 0; i < l1; ++i) {
            for (int d = 0; d < 2; ++d) {
                bool present = torus || (d == 0 ? i + 1 < l1 : j + 1 < l2);
                if (!present) continue;
                lat.lookup_[static_cast<std::size_t>((j * l1 + i) * 2 + d)] = static_cast<int>(lat.edges_.size());
                lat.edges_.push_back({i, j, static_cast<EdgeDir>(d)});
            }
        }
    }
    return lat;
}

bool Lattice::has_edge(int i, int j, EdgeDir dir) const {
    if (is_torus()) return true;
    if (i < 0 || j < 0 || i >= l1_ || j >= l2_) return false;
    return lookup_[static_cast<std::size_t>((j * l1_ + i) * 2 + static_cast<int>(dir))] >= 0;
}

int Lattice::edge_index(int i, int j, EdgeDir dir) const {
    if (is_torus()) {
        i = ((i % l1_) + l1_) % l1_;
        j = ((j % l2_) + l2_) % l2_;
    }
    require(i >= 0 && j >= 0 && i < l1_ && j < l2_, ErrorKind::Domain, "edge coordinate out of range");
    int e = lookup_[static_cast<std::size_t>((j * l1_ + i) * 2 + static_cast<int>(dir))];
    require(e >= 0, ErrorKind::Domain, "no such edge on the open patch");
    return e;
}

EdgeCoord Lattice::edge_coord(int e) const {
    require(e >= 0 && e < num_edges(), ErrorKind::Domain, "edge index out of range");
    return edges_[static_cast<std::size_t>(e)];
}

std::array<int, 2> Lattice::endpoints(int e) const {
    EdgeCoord c = edge_coord(e);
    int a = vertex_index(c.i, c.j);
    int b = c.dir == EdgeDir::Horizontal ? vertex_index((c.i + 1) % l1_, c.j) : vertex_index(c.i, (c.j + 1) % l2_);
    return {a, b};
}

int Lattice::vertex_index(int i, int j) const {
    require(i >= 0 && j >= 0 && i < l1_ && j < l2_, ErrorKind::Domain, "vertex out of range");
    return j * l1_ + i;
}

VertexCoord Lattice::vertex_coord(int v) const {
    require(v >= 0 && v < num_vertices(), ErrorKind::Domain, "vertex out of range");
    return {v % l1_, v / l1_};
}

int Lattice::face_index(int i, int j) const {
    require(i >= 0 && j >= 0 && i < face_w_ && j < face_h_, ErrorKind::Domain,
            "(" + std::to_string(i) + "," + std::to_string(j) + ") is not a plaquette");
    return j * face_w_ + i;
}

VertexCoord Lattice::face_coord(int f) const {
    require(f >= 0 && f < num_faces(), ErrorKind::Domain, "face out of range");
    return {f % face_w_, f / face_w_};
}

EdgeSet Lattice::star(int v) const {
    VertexCoord c = vertex_coord(v);
    EdgeSet s = empty_set();
    auto add = [&](int i, int j, EdgeDir d) {
        if (has_edge(i, j, d)) s.set(static_cast<std::size_t>(edge_index(i, j, d)));
    };
    if (is_torus()) {
        add(c.i, c.j, EdgeDir::Horizontal);
        add(c.i - 1, c.j, EdgeDir::Horizontal);
        add(c.i, c.j, EdgeDir::Vertical);
        add(c.i, c.j - 1, EdgeDir::Vertical);
    } else {
        add(c.i, c.j, EdgeDir::Horizontal);
        if (c.i > 0) add(c.i - 1, c.j, EdgeDir::Horizontal);
        add(c.i, c.j, EdgeDir::Vertical);
        if (c.j > 0) add(c.i, c.j - 1, EdgeDir::Vertical);
    }
    return s;
}

EdgeSet Lattice::plaquette(int f) const {
    VertexCoord c = face_coord(f);
    EdgeSet s = empty_set();
    s.set(static_cast<std::size_t>(edge_index(c.i, c.j, EdgeDir::Horizontal)));
    s.set(static_cast<std::size_t>(edge_index(c.i, c.j + 1, EdgeDir::Horizontal)));
    s.set(static_cast<std::size_t>(edge_index(c.i, c.j, EdgeDir::Vertical)));
    s.set(static_cast<std::size_t>(edge_index(c.i + 1, c.j, EdgeDir::Vertical)));
    return s;
}

EdgeSet Lattice::plaquette_at(int i, int j) const { return plaquette(face_index(i, j)); }

std::vector<int> Lattice::faces_of_edge(int e) const {
    EdgeCoord c = edge_coord(e);
    std::vector<int> out;
    auto try_face = [&](int i, int j) {
        if (is_torus()) {
            out.push_back(face_index(((i % l1_) + l1_) % l1_, ((j % l2_) + l2_) % l2_));
        } else if (i >= 0 && j >= 0 && i < face_w_ && j < face_h_) {
            out.push_back(face_index(i, j));
        }
    };
    if (c.dir == EdgeDir::Horizontal) {
        try_face(c.i, c.j - 1);
        try_face(c.i, c.j);
    } else {
        try_face(c.i - 1, c.j);
        try_face(c.i, c.j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

EdgeSet Lattice::homology_cycle(int direction) const {
    require(is_torus(), ErrorKind::Domain, "the planar patch has no non-trivial cycles");
    require(direction == 1 || direction == 2, ErrorKind::Domain, "direction must be 1 or 2");
    EdgeSet s = empty_set();
    if (direction == 1)
        for (int i = 0; i < l1_; ++i) s.set(static_cast<std::size_t>(edge_index(i, 0, EdgeDir::Horizontal)));
    else
        for (int j = 0; j < l2_; ++j) s.set(static_cast<std::size_t>(edge_index(0, j, EdgeDir::Vertical)));
    return s;
}

EdgeSet Lattice::dual_cycle(int direction) const {
    require(is_torus(), ErrorKind::Domain, "the planar patch has no non-trivial cycles");
    require(direction == 1 || direction == 2, ErrorKind::Domain, "direction must be 1 or 2");
    EdgeSet s = empty_set();
    if (direction == 1)
        for (int i = 0; i < l1_; ++i) s.set(static_cast<std::size_t>(edge_index(i, 0, EdgeDir::Vertical)));
    else
        for (int j = 0; j < l2_; ++j) s.set(static_cast<std::size_t>(edge_index(0, j, EdgeDir::Horizontal)));
    return s;
}

int Lattice::translate_edge(int e, int di, int dj) const {
    require(is_torus(), ErrorKind::Domain, "translations are defined on the torus only");
    EdgeCoord c = edge_coord(e);
    return edge_index(c.i + di, c.j + dj, c.dir);
}

std::vector<int> Lattice::king_neighbours(int v) const {
    VertexCoord c = vertex_coord(v);
    std::vector<int> out;
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            int i = c.i + di, j = c.j + dj;
            if (is_torus()) {
                i = ((i % l1_) + l1_) % l1_;
                j = ((j % l2_) + l2_) % l2_;
            } else if (i < 0 || j < 0 || i >= l1_ || j >= l2_) {
                continue;
            }
            int w = vertex_index(i, j);
            if (w != v) out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace toricgap
