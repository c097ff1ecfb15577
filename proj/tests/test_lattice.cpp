#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/lattice.hpp"

using namespace qflow;

namespace {

// Enumerate every nonempty proper subset of {0..n-1}. Only feasible for the
// small lattices the exhaustive geometry checks run on.
std::vector<std::vector<int>> all_proper_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> sites;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sites.push_back(i);
    out.push_back(std::move(sites));
  }
  return out;
}

// Axis-aligned rectangles [x0,x1] x [y0,y1] as site lists, excluding the full
// lattice (which admits no cut).
std::vector<std::vector<int>> all_proper_rectangles(const Lattice& lat) {
  std::vector<std::vector<int>> out;
  const int nx = lat.extent(0), ny = lat.extent(1);
  for (int x0 = 0; x0 < nx; ++x0)
    for (int x1 = x0; x1 < nx; ++x1)
      for (int y0 = 0; y0 < ny; ++y0)
        for (int y1 = y0; y1 < ny; ++y1) {
          if (x0 == 0 && y0 == 0 && x1 == nx - 1 && y1 == ny - 1) continue;
          std::vector<int> sites;
          for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) sites.push_back(lat.index_of({x, y}));
          out.push_back(std::move(sites));
        }
  return out;
}

}  // namespace

TEST_CASE("coordinate indexing round-trips on chains and grids") {
  Lattice chain(8);
  CHECK(chain.dimension() == 1);
  CHECK(chain.n_sites() == 8);
  for (int s = 0; s < 8; ++s) CHECK(chain.index_of(chain.coord_of(s)) == s);

  Lattice grid(3, 4);
  CHECK(grid.dimension() == 2);
  CHECK(grid.n_sites() == 12);
  for (int s = 0; s < 12; ++s) {
    Coord c = grid.coord_of(s);
    CHECK(c.x == s % 3);
    CHECK(c.y == s / 3);
    CHECK(grid.index_of(c) == s);
  }

  CHECK_THROWS_AS(chain.coord_of(8), DomainError);
  CHECK_THROWS_AS(chain.coord_of(-1), DomainError);
  CHECK_THROWS_AS(grid.index_of(Coord{3, 0}), DomainError);
  CHECK_THROWS_AS(Lattice(0), DomainError);
}

TEST_CASE("graph distance equals the coordinate-difference closed form") {
  Lattice chain(12);
  for (int u = 0; u < 12; ++u)
    for (int v = 0; v < 12; ++v) CHECK(chain.distance(u, v) == std::abs(u - v));

  Lattice grid(3, 4);
  for (int u = 0; u < 12; ++u)
    for (int v = 0; v < 12; ++v) {
      const int dx = std::abs(u % 3 - v % 3);
      const int dy = std::abs(u / 3 - v / 3);
      CHECK(grid.distance(u, v) == dx + dy);
    }
}

TEST_CASE("distance is a metric on all site pairs") {
  for (const Lattice& lat : {Lattice(12), Lattice(3, 4)}) {
    const int n = lat.n_sites();
    for (int u = 0; u < n; ++u) {
      CHECK(lat.distance(u, u) == 0);
      for (int v = 0; v < n; ++v) {
        CHECK(lat.distance(u, v) == lat.distance(v, u));
        CHECK((lat.distance(u, v) == 0) == (u == v));
        for (int w = 0; w < n; ++w)
          CHECK(lat.distance(u, w) <= lat.distance(u, v) + lat.distance(v, w));
      }
    }
  }
}

TEST_CASE("edge enumeration lists each nearest-neighbor bond once") {
  Lattice chain(8);
  auto chain_edges = chain.edges();
  REQUIRE(chain_edges.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(chain_edges[i] == std::make_pair(i, i + 1));

  Lattice grid(3, 4);
  auto grid_edges = grid.edges();
  CHECK(grid_edges.size() == 2 * 4 + 3 * 3);  // horizontal + vertical bonds
  CHECK(std::is_sorted(grid_edges.begin(), grid_edges.end()));
  for (auto [u, v] : grid_edges) {
    CHECK(u < v);
    CHECK(grid.distance(u, v) == 1);
  }
}

TEST_CASE("balls collect sites within radius and clip at open boundaries") {
  Lattice chain(8);
  CHECK(ball(chain, 3, 1) == Region({2, 3, 4}, chain));
  CHECK(ball(chain, 0, 0) == Region({0}, chain));
  CHECK(ball(chain, 0, 2) == Region({0, 1, 2}, chain));
  CHECK(ball(chain, 7, 3) == Region({4, 5, 6, 7}, chain));

  Lattice grid(3, 3);
  const int center = grid.index_of({1, 1});
  CHECK(ball(grid, center, 1) == Region({1, 3, 4, 5, 7}, grid));
  CHECK(ball(grid, 0, 1) == Region({0, 1, 3}, grid));

  CHECK_THROWS_AS(ball(chain, 9, 1), DomainError);
  CHECK_THROWS_AS(ball(chain, 3, -1), DomainError);
}

TEST_CASE("balls nest with increasing radius") {
  Lattice grid(3, 4);
  for (int u = 0; u < grid.n_sites(); ++u)
    for (int r = 0; r < 6; ++r)
      CHECK(ball(grid, u, r + 1).contains_all(ball(grid, u, r)));
}

TEST_CASE("regions reject duplicates and sites outside the lattice") {
  Lattice chain(8);
  CHECK_THROWS_AS(Region({1, 1, 2}, chain), DomainError);
  CHECK_THROWS_AS(Region({0, 8}, chain), DomainError);
  Region r({5, 1, 3}, chain);
  CHECK(r.sites() == std::vector<int>{1, 3, 5});  // stored ascending
}

TEST_CASE("complement of the complement is the region itself") {
  Lattice chain(10);
  for (const auto& sites : {std::vector<int>{0}, std::vector<int>{2, 3, 7}, std::vector<int>{0, 9}}) {
    Region a(sites, chain);
    CHECK(a.complement(chain).complement(chain) == a);
    CHECK(a.united(a.complement(chain)).size() == 10);
  }
}

TEST_CASE("cut crossing edges straddle the bipartition, exhaustively") {
  Lattice chain(6);
  for (const auto& sites : all_proper_subsets(6)) {
    Cut cut(Region(sites, chain), chain);
    CHECK(cut.boundary_size() >= 1);
    for (auto [u, v] : cut.crossing_edges()) {
      CHECK(cut.a().contains(u) != cut.a().contains(v));
      CHECK(chain.distance(u, v) == 1);
    }
  }
}

TEST_CASE("cuts require a proper nonempty region") {
  Lattice chain(4);
  CHECK_THROWS_AS(Cut(Region({}, chain), chain), DomainError);
  CHECK_THROWS_AS(Cut(Region({0, 1, 2, 3}, chain), chain), DomainError);
}

TEST_CASE("collars of a chain cut, edge-distance convention") {
  Lattice chain(8);
  Cut cut(Region({0, 1, 2, 3}, chain), chain);
  REQUIRE(cut.boundary_size() == 1);
  CHECK(cut.crossing_edges()[0] == std::make_pair(3, 4));

  CHECK(inner_collar(chain, cut, 0) == Region({3}, chain));
  CHECK(outer_collar(chain, cut, 0) == Region({4}, chain));
  CHECK(inner_collar(chain, cut, 1) == Region({2, 3}, chain));
  CHECK(outer_collar(chain, cut, 1) == Region({4, 5}, chain));
  CHECK(boundary_collar(chain, cut, 1) == Region({2, 3, 4, 5}, chain));
  CHECK(boundary_collar(chain, cut, 2) == Region({1, 2, 3, 4, 5, 6}, chain));

  // inner stays in A, outer stays in A^c
  CHECK(cut.a().contains_all(inner_collar(chain, cut, 3)));
  CHECK(cut.a_complement().contains_all(outer_collar(chain, cut, 3)));
}

TEST_CASE("collars nest with increasing width") {
  Lattice grid(3, 4);
  Cut cut(Region({0, 1, 3, 4}, grid), grid);
  for (int R = 0; R < 5; ++R) {
    CHECK(inner_collar(grid, cut, R + 1).contains_all(inner_collar(grid, cut, R)));
    CHECK(outer_collar(grid, cut, R + 1).contains_all(outer_collar(grid, cut, R)));
    CHECK(boundary_collar(grid, cut, R + 1).contains_all(boundary_collar(grid, cut, R)));
  }
}

TEST_CASE("shells stratify the lattice by distance to the cut") {
  Lattice chain(8);
  Cut cut(Region({0, 1, 2, 3}, chain), chain);
  CHECK(shell(chain, cut, 0) == Region({3, 4}, chain));
  CHECK(shell(chain, cut, 1) == Region({2, 5}, chain));
  CHECK(shell(chain, cut, 3) == Region({0, 7}, chain));
  CHECK(shell(chain, cut, 4).empty());
}

TEST_CASE("shells partition the lattice") {
  for (const Lattice& lat : {Lattice(9), Lattice(3, 3)}) {
    Cut cut(Region({0, 1, 2}, lat), lat);
    std::vector<char> seen(lat.n_sites(), 0);
    int total = 0;
    for (int k = 0; k <= 2 * lat.n_sites(); ++k) {
      const Region sh = shell(lat, cut, k);
      for (int x : sh.sites()) {
        CHECK(!seen[x]);
        seen[x] = 1;
        ++total;
      }
    }
    CHECK(total == lat.n_sites());
  }
}

TEST_CASE("chain shell sizes never exceed twice the crossing-edge count") {
  for (int n = 2; n <= 12; ++n) {
    Lattice chain(n);
    for (const auto& sites : all_proper_subsets(n)) {
      Cut cut(Region(sites, chain), chain);
      for (int k = 0; k < n; ++k)
        CHECK(shell(chain, cut, k).size() <= 2 * cut.boundary_size());
    }
  }
}

TEST_CASE("grid shell sizes obey the linear-in-distance area bound") {
  // |B_k| <= 2 d k^(d-1) |cut edges| for k >= 1, rectangles on small grids
  for (const Lattice& grid : {Lattice(3, 3), Lattice(3, 4)}) {
    for (const auto& sites : all_proper_rectangles(grid)) {
      Cut cut(Region(sites, grid), grid);
      for (int k = 1; k <= grid.extent(0) + grid.extent(1); ++k)
        CHECK(shell(grid, cut, k).size() <= 4 * k * cut.boundary_size());
    }
  }
}

TEST_CASE("convex regions are intervals or rectangles") {
  Lattice chain(8);
  CHECK(is_convex_region(chain, Region({2, 3, 4}, chain)));
  CHECK(is_convex_region(chain, Region({0}, chain)));
  CHECK(!is_convex_region(chain, Region({2, 4}, chain)));

  Lattice grid(3, 3);
  CHECK(is_convex_region(grid, Region({0, 1, 3, 4}, grid)));
  CHECK(is_convex_region(grid, Region({3, 4, 5}, grid)));
  CHECK(!is_convex_region(grid, Region({0, 1, 3}, grid)));  // L-shape
  CHECK(!is_convex_region(grid, Region({0, 8}, grid)));
}
