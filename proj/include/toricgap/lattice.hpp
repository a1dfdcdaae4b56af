#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "toricgap/bitvec.hpp"

namespace toricgap {

enum class Topology { Torus, Planar };

std::string to_string(Topology t);
Topology parse_topology(const std::string &s);

/// Edge orientation: Horizontal joins (i,j)-(i+1,j) (direction 1),
/// Vertical joins (i,j)-(i,j+1) (direction 2).
enum class EdgeDir : int { Horizontal = 0, Vertical = 1 };

struct EdgeCoord {
    int i;
    int j;
    EdgeDir dir;
    friend bool operator==(const EdgeCoord &, const EdgeCoord &) = default;
};

struct VertexCoord {
    int i;
    int j;
};

/// Square lattice with spins on edges, either periodic in both directions or
/// an open l1 x l2 vertex grid. Immutable after construction.
///
/// Edges are numbered row-major by (j, i, dir); on the torus this gives
/// edge = 2 * (j * l1 + i) + dir. Vertices and faces are numbered j * width + i.
class Lattice {
  public:
    static Lattice build(Topology topology, int l1, int l2);

    Topology topology() const noexcept { return topology_; }
    bool is_torus() const noexcept { return topology_ == Topology::Torus; }
    int l1() const noexcept { return l1_; }
    int l2() const noexcept { return l2_; }
    int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
    int num_vertices() const noexcept { return l1_ * l2_; }
    int num_faces() const noexcept { return face_w_ * face_h_; }

    /// Throws Domain if the edge does not exist (open boundary).
    int edge_index(int i, int j, EdgeDir dir) const;
    bool has_edge(int i, int j, EdgeDir dir) const;
    EdgeCoord edge_coord(int e) const;
    std::array<int, 2> endpoints(int e) const;

    int vertex_index(int i, int j) const;
    VertexCoord vertex_coord(int v) const;

    /// Face (i,j) has corners (i,j), (i+1,j), (i,j+1), (i+1,j+1).
    int face_index(int i, int j) const;
    VertexCoord face_coord(int f) const;
    std::vector<int> faces_of_edge(int e) const;

    EdgeSet empty_set() const { return EdgeSet(static_cast<std::size_t>(num_edges())); }
    EdgeSet star(int v) const;
    EdgeSet plaquette(int f) const;
    /// Face by corner coordinates; on the planar patch the last row/column has no plaquette.
    EdgeSet plaquette_at(int i, int j) const;

    /// Canonical non-contractible z-cycle: direction 1 is the row of horizontal
    /// edges at j = 0, direction 2 the column of vertical edges at i = 0.
    EdgeSet homology_cycle(int direction) const;
    /// Dual cycle (x-type loop) winding in the given direction: direction 1 is the
    /// vertical edges at j = 0, direction 2 the horizontal edges at i = 0. It
    /// crosses homology_cycle of the other direction exactly once.
    EdgeSet dual_cycle(int direction) const;

    /// Edge index after shifting the lattice origin by (di, dj). Torus only.
    int translate_edge(int e, int di, int dj) const;

    /// Minimum-image Chebyshev distance between vertices <= 1 (nearest and
    /// next-nearest neighbours), excluding the vertex itself.
    std::vector<int> king_neighbours(int v) const;

  private:
    Lattice() = default;

    Topology topology_ = Topology::Torus;
    int l1_ = 0;
    int l2_ = 0;
    int face_w_ = 0;
    int face_h_ = 0;
    std::vector<EdgeCoord> edges_;
    std::vector<int> lookup_;  // (j*l1 + i)*2 + dir -> edge index or -1
};

}  // namespace toricgap
