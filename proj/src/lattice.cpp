#include "qflow/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "qflow/errors.hpp"

namespace qflow {

// ---------------------------------------------------------------------------
// Lattice
// ---------------------------------------------------------------------------

Lattice::Lattice(int extent) : dim_(1), extent_{extent, 1} {
  if (extent < 1) throw DomainError("lattice extent must be positive");
}

Lattice::Lattice(int nx, int ny) : dim_(2), extent_{nx, ny} {
  if (nx < 1 || ny < 1) throw DomainError("lattice extents must be positive");
}

Coord Lattice::coord_of(int site) const {
  if (!contains(site)) throw DomainError("site index " + std::to_string(site) + " outside lattice");
  return Coord{site % extent_[0], site / extent_[0]};
}

int Lattice::index_of(Coord c) const {
  if (c.x < 0 || c.x >= extent_[0] || c.y < 0 || c.y >= extent_[1])
    throw DomainError("coordinate outside lattice");
  return c.y * extent_[0] + c.x;
}

int Lattice::distance(int u, int v) const {
  Coord a = coord_of(u);
  Coord b = coord_of(v);
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

std::vector<std::pair<int, int>> Lattice::edges() const {
  std::vector<std::pair<int, int>> result;
  for (int s = 0; s < n_sites(); ++s) {
    Coord c = coord_of(s);
    if (c.x + 1 < extent_[0]) result.emplace_back(s, index_of({c.x + 1, c.y}));
    if (c.y + 1 < extent_[1]) result.emplace_back(s, index_of({c.x, c.y + 1}));
  }
  std::sort(result.begin(), result.end());
  return result;
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

Region::Region(std::vector<int> sites, const Lattice& lattice) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (!lattice.contains(sites_[i]))
      throw DomainError("region site " + std::to_string(sites_[i]) + " outside lattice");
    if (i > 0 && sites_[i] == sites_[i - 1])
      throw DomainError("duplicate site " + std::to_string(sites_[i]) + " in region");
  }
}

bool Region::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool Region::contains_all(const Region& other) const {
  return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end());
}

Region Region::complement(const Lattice& lattice) const {
  std::vector<int> rest;
  rest.reserve(lattice.n_sites() - sites_.size());
  for (int s = 0; s < lattice.n_sites(); ++s)
    if (!contains(s)) rest.push_back(s);
  return Region(std::move(rest), lattice);
}

Region Region::united(const Region& other) const {
  std::vector<int> merged;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                 std::back_inserter(merged));
  Region r;
  r.sites_ = std::move(merged);
  return r;
}

Region Region::intersected(const Region& other) const {
  std::vector<int> common;
  std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(),
                        other.sites_.end(), std::back_inserter(common));
  Region r;
  r.sites_ = std::move(common);
  return r;
}

// ---------------------------------------------------------------------------
// Cut
// ---------------------------------------------------------------------------

Cut::Cut(Region a, const Lattice& lattice) : a_(std::move(a)), a_comp_(a_.complement(lattice)) {
  if (a_.empty() || a_comp_.empty())
    throw DomainError("cut requires a proper nonempty region");
  for (const auto& [u, v] : lattice.edges()) {
    const bool u_in = a_.contains(u);
    const bool v_in = a_.contains(v);
    if (u_in != v_in) edges_.emplace_back(u, v);
  }
  if (edges_.empty()) throw StructuralError("cut of a connected lattice has no crossing edges");
}

int Cut::distance_to_boundary(const Lattice& lattice, int x) const {
  int best = lattice.n_sites();
  for (const auto& [u, v] : edges_)
    best = std::min(best, std::min(lattice.distance(x, u), lattice.distance(x, v)));
  return best;
}

// ---------------------------------------------------------------------------
// Geometry operations
// ---------------------------------------------------------------------------

Region ball(const Lattice& lattice, int u, int r) {
  if (!lattice.contains(u)) throw DomainError("ball center " + std::to_string(u) + " outside lattice");
  if (r < 0) throw DomainError("ball radius must be non-negative");
  std::vector<int> sites;
  for (int v = 0; v < lattice.n_sites(); ++v)
    if (lattice.distance(u, v) <= r) sites.push_back(v);
  return Region(std::move(sites), lattice);
}

Region inner_collar(const Lattice& lattice, const Cut& cut, int R) {
  if (R < 0) throw DomainError("collar width must be non-negative");
  std::vector<int> sites;
  for (int x : cut.a().sites())
    if (cut.distance_to_boundary(lattice, x) <= R) sites.push_back(x);
  return Region(std::move(sites), lattice);
}

Region outer_collar(const Lattice& lattice, const Cut& cut, int R) {
  if (R < 0) throw DomainError("collar width must be non-negative");
  std::vector<int> sites;
  for (int x : cut.a_complement().sites())
    if (cut.distance_to_boundary(lattice, x) <= R) sites.push_back(x);
  return Region(std::move(sites), lattice);
}

Region boundary_collar(const Lattice& lattice, const Cut& cut, int R) {
  return inner_collar(lattice, cut, R).united(outer_collar(lattice, cut, R));
}

Region shell(const Lattice& lattice, const Cut& cut, int k) {
  if (k < 0) throw DomainError("shell distance must be non-negative");
  std::vector<int> sites;
  for (int x = 0; x < lattice.n_sites(); ++x)
    if (cut.distance_to_boundary(lattice, x) == k) sites.push_back(x);
  Region r;  // may legitimately be empty for large k
  if (!sites.empty()) r = Region(std::move(sites), lattice);
  return r;
}

bool is_convex_region(const Lattice& lattice, const Region& region) {
  if (region.empty()) return false;
  int min_x = lattice.extent(0), max_x = -1;
  int min_y = lattice.extent(1), max_y = -1;
  for (int s : region.sites()) {
    Coord c = lattice.coord_of(s);
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  const long expected = static_cast<long>(max_x - min_x + 1) * (max_y - min_y + 1);
  return expected == region.size();
}

}  // namespace qflow
