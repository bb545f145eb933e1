#include "rvb/lattice.hpp"

#include "rvb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

namespace rvb {

std::string_view to_string(Boundary bc) { return bc == Boundary::Periodic ? "periodic" : "open"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic" || text == "pbc") return Boundary::Periodic;
  if (text == "open" || text == "obc") return Boundary::Open;
  throw ValidationError("unknown boundary condition '" + std::string(text) + "' (expected periodic or open)");
}

Lattice::Lattice(int L, Boundary bc) : L_(L), bc_(bc) {
  if (L < 2) throw ValidationError("lattice size must be at least 2, got " + std::to_string(L));
  if (L % 2 != 0) throw ValidationError("odd L = " + std::to_string(L) + " admits no perfect matching");
  if (bc == Boundary::Periodic && L < 4)
    throw ValidationError("periodic lattice needs L >= 4 (L = 2 would double its edges)");

  const int n = L * L;
  sublattice_.resize(n);
  neighbours_.assign(n, {-1, -1, -1, -1});
  bond_of_.assign(n, {-1, -1, -1, -1});

  const bool periodic = bc == Boundary::Periodic;
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      const int s = site(x, y);
      sublattice_[s] = static_cast<std::uint8_t>((x + y) & 1);
      auto& nb = neighbours_[s];
      if (x + 1 < L || periodic) nb[0] = site((x + 1) % L, y);
      if (y + 1 < L || periodic) nb[1] = site(x, (y + 1) % L);
      if (x > 0 || periodic) nb[2] = site((x + L - 1) % L, y);
      if (y > 0 || periodic) nb[3] = site(x, (y + L - 1) % L);
    }
  }

  for (int s = 0; s < n; ++s) {
    for (int d = 0; d < 2; ++d) {
      const int t = neighbours_[s][d];
      if (t >= 0) bonds_.push_back({s, t, static_cast<Direction>(d)});
    }
  }
  std::sort(bonds_.begin(), bonds_.end(), [](const Bond& a, const Bond& b) {
    auto key = [](const Bond& bd) {
      return std::tuple(std::min(bd.first, bd.second), static_cast<int>(bd.dir), std::max(bd.first, bd.second));
    };
    return key(a) < key(b);
  });
  for (int b = 0; b < n_bonds(); ++b) {
    const Bond& bd = bonds_[b];
    const int d = static_cast<int>(bd.dir);
    bond_of_[bd.first][d] = b;
    bond_of_[bd.second][d + 2] = b;
  }

  const int span = periodic ? L : L - 1;
  for (int y = 0; y < span; ++y) {
    for (int x = 0; x < span; ++x) {
      const int x1 = (x + 1) % L;
      const int y1 = (y + 1) % L;
      plaquettes_.push_back({site(x, y), site(x1, y), site(x, y1), site(x1, y1)});
    }
  }
}

int Lattice::degree(int s) const {
  return static_cast<int>(std::count_if(neighbours_[s].begin(), neighbours_[s].end(), [](int t) { return t >= 0; }));
}

int Lattice::bond_index(int s, int t) const {
  for (int d = 0; d < 4; ++d) {
    if (neighbours_[s][d] == t) return bond_of_[s][d];
  }
  return -1;
}

std::vector<std::vector<int>> symmetry_generators(const Lattice& lat) {
  const int L = lat.size();
  const int n = lat.n_sites();
  auto make = [&](auto&& f) {
    std::vector<int> perm(n);
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x) {
        auto [xn, yn] = f(x, y);
        perm[lat.site(x, y)] = lat.site(xn, yn);
      }
    return perm;
  };

  std::vector<std::vector<int>> gens;
  if (lat.boundary() == Boundary::Periodic) {
    gens.push_back(make([&](int x, int y) { return std::pair((x + 1) % L, y); }));
    gens.push_back(make([&](int x, int y) { return std::pair(x, (y + 1) % L); }));
    gens.push_back(make([&](int x, int y) { return std::pair((L - y) % L, x); }));
    gens.push_back(make([&](int x, int y) { return std::pair((L - x) % L, y); }));
  } else {
    gens.push_back(make([&](int x, int y) { return std::pair(L - 1 - y, x); }));
    gens.push_back(make([&](int x, int y) { return std::pair(L - 1 - x, y); }));
  }
  return gens;
}

namespace {

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

std::vector<std::vector<int>> group_closure(const std::vector<std::vector<int>>& gens, int n) {
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  std::set<std::vector<int>> seen{identity};
  std::vector<std::vector<int>> elements{identity};
  for (std::size_t k = 0; k < elements.size(); ++k) {
    for (const auto& g : gens) {
      std::vector<int> composed(n);
      for (int s = 0; s < n; ++s) composed[s] = g[elements[k][s]];
      if (seen.insert(composed).second) elements.push_back(std::move(composed));
    }
  }
  return elements;
}

}  // namespace

std::vector<BondOrbit> bond_orbits(const Lattice& lat) {
  const int nb = lat.n_bonds();
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);

  for (const auto& g : symmetry_generators(lat)) {
    for (int b = 0; b < nb; ++b) {
      const Bond& bd = lat.bond(b);
      const int image = lat.bond_index(g[bd.first], g[bd.second]);
      if (image < 0) throw std::logic_error("symmetry generator does not preserve bonds");
      parent[find_root(parent, b)] = find_root(parent, image);
    }
  }

  std::vector<BondOrbit> orbits;
  std::vector<int> orbit_of_root(nb, -1);
  for (int b = 0; b < nb; ++b) {
    const int r = find_root(parent, b);
    if (orbit_of_root[r] < 0) {
      orbit_of_root[r] = static_cast<int>(orbits.size());
      orbits.emplace_back();
    }
    orbits[orbit_of_root[r]].push_back(b);
  }

  const double centre = 0.5 * (lat.size() - 1);
  auto midpoint_distance = [&](int b) {
    const Bond& bd = lat.bond(b);
    const double mx = lat.x_of(bd.first) + (bd.dir == Direction::PlusX ? 0.5 : 0.0);
    const double my = lat.y_of(bd.first) + (bd.dir == Direction::PlusY ? 0.5 : 0.0);
    return std::hypot(mx - centre, my - centre);
  };
  auto key = [&](const BondOrbit& o) {
    double d = midpoint_distance(o.front());
    for (int b : o) d = std::min(d, midpoint_distance(b));
    return std::pair(std::round(d * 1e9), o.front());
  };
  std::sort(orbits.begin(), orbits.end(), [&](const BondOrbit& a, const BondOrbit& b) { return key(a) < key(b); });
  return orbits;
}

int equivalent_partner_count(const Lattice& lat, int i, int j) {
  if (i == j) throw ValidationError("equivalent_partner_count: i == j");
  const auto group = group_closure(symmetry_generators(lat), lat.n_sites());
  std::set<int> partners;
  for (const auto& g : group) {
    if (g[i] == i) partners.insert(g[j]);
  }
  return static_cast<int>(partners.size());
}

}  // namespace rvb
