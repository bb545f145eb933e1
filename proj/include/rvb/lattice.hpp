#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rvb {

enum class Boundary { Periodic, Open };

std::string_view to_string(Boundary bc);
Boundary parse_boundary(std::string_view text);

enum class Direction : std::uint8_t { PlusX = 0, PlusY = 1, MinusX = 2, MinusY = 3 };

struct Bond {
  int first;   // origin site; `second` is its +x or +y neighbour
  int second;
  Direction dir;  // PlusX or PlusY
};

/// Sites of a plaquette with origin (x, y): (x,y), (x+1,y), (x,y+1), (x+1,y+1).
struct Plaquette {
  int s00, s10, s01, s11;
};

/// L x L square lattice. Sites are indexed row-major (y * L + x); sublattice
/// is (x + y) mod 2 with A = 0 and B = 1. Immutable after construction.
class Lattice {
 public:
  /// Throws ValidationError for odd L, L < 2, or L == 2 with periodic
  /// boundaries (the torus would carry doubled edges).
  Lattice(int L, Boundary bc);

  int size() const { return L_; }
  Boundary boundary() const { return bc_; }
  int n_sites() const { return L_ * L_; }
  int n_bonds() const { return static_cast<int>(bonds_.size()); }
  int n_plaquettes() const { return static_cast<int>(plaquettes_.size()); }

  int site(int x, int y) const { return y * L_ + x; }
  int x_of(int s) const { return s % L_; }
  int y_of(int s) const { return s / L_; }
  std::uint8_t sublattice(int s) const { return static_cast<std::uint8_t>((x_of(s) + y_of(s)) & 1); }
  const std::vector<std::uint8_t>& sublattices() const { return sublattice_; }

  /// Neighbour in direction d, or -1 across an open edge.
  int neighbour(int s, Direction d) const { return neighbours_[s][static_cast<int>(d)]; }
  int degree(int s) const;

  const std::vector<Bond>& bonds() const { return bonds_; }
  const Bond& bond(int b) const { return bonds_[b]; }
  /// Index of the bond joining s and t, or -1 if they are not neighbours.
  int bond_index(int s, int t) const;

  const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }

 private:
  int L_;
  Boundary bc_;
  std::vector<std::uint8_t> sublattice_;
  std::vector<std::array<int, 4>> neighbours_;
  std::vector<std::array<int, 4>> bond_of_;  // per site, per direction
  std::vector<Bond> bonds_;
  std::vector<Plaquette> plaquettes_;
};

inline Lattice build_lattice(int L, Boundary bc) { return Lattice(L, bc); }

using BondOrbit = std::vector<int>;

/// Partition of the bonds into classes under the lattice symmetry group
/// (translations and square point group on the torus; point group about the
/// centre for open boundaries). Orbits are ordered by the distance of their
/// bond midpoints from the lattice centre, closest first; members ascend.
std::vector<BondOrbit> bond_orbits(const Lattice& lat);

/// Site permutations generating the symmetry group used by bond_orbits.
std::vector<std::vector<int>> symmetry_generators(const Lattice& lat);

/// Number of sites j' for which (i, j') is the image of (i, j) under some
/// symmetry fixing i. This is the coordination z entering the Anderson bound
/// for the pair (i, j).
int equivalent_partner_count(const Lattice& lat, int i, int j);

}  // namespace rvb
