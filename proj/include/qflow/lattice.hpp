// Finite lattice geometry: open hypercubic lattices in one or two dimensions,
// regions, cuts (crossing-edge boundaries), balls, collars and shells.
//
// Sites are indexed 0..n-1 in row-major order (x fastest). The metric is the
// nearest-neighbor graph distance, which on an open hypercubic lattice equals
// the Manhattan distance between coordinates.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace qflow {

// ---------------------------------------------------------------------------
// Lattice
// ---------------------------------------------------------------------------

struct Coord {
  int x = 0;
  int y = 0;
};

class Lattice {
 public:
  // 1D chain of `extent` sites.
  explicit Lattice(int extent);
  // 2D open grid of nx * ny sites.
  Lattice(int nx, int ny);

  int dimension() const { return dim_; }
  int extent(int axis) const { return extent_[axis]; }
  int n_sites() const { return extent_[0] * extent_[1]; }

  bool contains(int site) const { return site >= 0 && site < n_sites(); }
  Coord coord_of(int site) const;
  int index_of(Coord c) const;

  // Nearest-neighbor graph distance (equals Manhattan distance on open grids).
  int distance(int u, int v) const;

  // All nearest-neighbor edges (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

 private:
  int dim_;
  std::array<int, 2> extent_;
};

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

// An ordered (ascending) duplicate-free set of site indices on a lattice.
class Region {
 public:
  Region() = default;
  // Validates membership and strips nothing: duplicates are an error.
  Region(std::vector<int> sites, const Lattice& lattice);

  const std::vector<int>& sites() const { return sites_; }
  int size() const { return static_cast<int>(sites_.size()); }
  bool empty() const { return sites_.empty(); }
  bool contains(int site) const;
  bool contains_all(const Region& other) const;

  Region complement(const Lattice& lattice) const;
  Region united(const Region& other) const;
  Region intersected(const Region& other) const;

  bool operator==(const Region& other) const { return sites_ == other.sites_; }

 private:
  std::vector<int> sites_;
};

// ---------------------------------------------------------------------------
// Cut
// ---------------------------------------------------------------------------

// A bipartition A : A^c together with its crossing-edge boundary. The boundary
// size |/A| is the number of crossing edges, and the distance from a site to
// the boundary is the distance to the nearest endpoint of any crossing edge.
class Cut {
 public:
  Cut(Region a, const Lattice& lattice);

  const Region& a() const { return a_; }
  const Region& a_complement() const { return a_comp_; }
  const std::vector<std::pair<int, int>>& crossing_edges() const { return edges_; }
  int boundary_size() const { return static_cast<int>(edges_.size()); }

  // min over crossing edges (u, v) of min(d(x, u), d(x, v)).
  int distance_to_boundary(const Lattice& lattice, int x) const;

 private:
  Region a_;
  Region a_comp_;
  std::vector<std::pair<int, int>> edges_;
};

// ---------------------------------------------------------------------------
// Geometry operations
// ---------------------------------------------------------------------------

// Ball of radius r centered on site u, clipped at the open lattice edge.
Region ball(const Lattice& lattice, int u, int r);

// Sites of A within distance R of the boundary.
Region inner_collar(const Lattice& lattice, const Cut& cut, int R);
// Sites of A^c within distance R of the boundary.
Region outer_collar(const Lattice& lattice, const Cut& cut, int R);
// inner_collar union outer_collar.
Region boundary_collar(const Lattice& lattice, const Cut& cut, int R);

// Sites at distance exactly k from the boundary; these partition the lattice.
Region shell(const Lattice& lattice, const Cut& cut, int k);

// True if the region is an interval (1D) or an axis-aligned rectangle (2D).
bool is_convex_region(const Lattice& lattice, const Region& region);

}  // namespace qflow
