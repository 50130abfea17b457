#pragma once

// Constrained Delaunay refinement over closed loops of circular arcs.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scherklab/hypgeom.hpp"

namespace scherklab::mesh::detail {

struct Piece {
  hyp::Arc curve;
  std::string tag;
  int loop = 0;
};

struct Loop {
  /// Boundary loops toggle inside/outside; interface loops only mark a region.
  bool boundary = true;
  int region = 0;
};

struct Input {
  /// Pieces of each loop listed consecutively and in loop order; piece k ends
  /// where the next piece of the same loop starts.
  std::vector<Piece> pieces;
  std::vector<Loop> loops;
  std::function<double(Complex)> size;
  double min_angle_deg = 30.0;
  std::size_t max_nodes = 400000;
};

struct Edge {
  int a = 0;
  int b = 0;
  int piece = 0;
};

struct Output {
  std::vector<Complex> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> region;
  /// Oriented with the meshed region on the left.
  std::vector<Edge> boundary;
  /// Interface edges, oriented like their loop.
  std::vector<Edge> interfaces;
};

Output triangulate(const Input& in);

int orient(Complex a, Complex b, Complex c);
int incircle(Complex a, Complex b, Complex c, Complex d);

}  // namespace scherklab::mesh::detail
