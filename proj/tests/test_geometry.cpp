#include <doctest.h>

#include "beadlab/errors.hpp"
#include "beadlab/geometry.hpp"

using namespace beadlab;

TEST_CASE("floor division and modulus follow the floor convention") {
  CHECK(floor_div(7, 3) == 2);
  CHECK(floor_div(-7, 3) == -3);
  CHECK(floor_div(-6, 3) == -2);
  CHECK(floor_mod(-1, 5) == 4);
  CHECK(floor_mod(10, 5) == 0);
  for (int64_t a = -20; a <= 20; ++a)
    for (int64_t b : {1, 2, 3, 7}) {
      CHECK(floor_div(a, b) * b + floor_mod(a, b) == a);
      CHECK(floor_mod(a, b) >= 0);
      CHECK(floor_mod(a, b) < b);
    }
}

TEST_CASE("hex geometry: one bead position per face, vertices 2p+1 and 2p+2") {
  const Geometry g(LatticeKind::kHex, 5);
  CHECK(g.positions() == 5);
  CHECK(g.zigzag_length() == 10);
  CHECK(g.face_count() == 25);
  CHECK(g.height_scale() == 1);
  for (int64_t p = -4; p < 8; ++p) {
    CHECK(g.right_vertex(p) == 2 * p + 1);
    CHECK(g.left_vertex(p) == 2 * p + 2);
  }
}

TEST_CASE("square geometry: paired bead positions share a vertex") {
  const Geometry g(LatticeKind::kSquare, 4);
  CHECK(g.positions() == 8);
  CHECK(g.zigzag_length() == 8);
  CHECK(g.face_count() == 32);
  CHECK(g.height_scale() == 4);
  // Consecutive positions alternate which side they share with the previous one.
  CHECK(g.right_vertex(0) == g.right_vertex(1));
  CHECK(g.left_vertex(1) == g.left_vertex(2));
  CHECK(g.right_vertex(2) == g.right_vertex(1) + 2);
  for (int64_t p = -6; p < 10; ++p) {
    CHECK(g.right_vertex(p) % 2 != 0);
    CHECK(floor_mod(g.left_vertex(p), 2) == 0);
  }
}

TEST_CASE("extremal vertex queries invert right and left vertices") {
  for (LatticeKind k : {LatticeKind::kHex, LatticeKind::kSquare}) {
    const Geometry g(k, 6);
    for (int64_t v = -10; v < 20; ++v) {
      const int64_t a = g.max_right_below(v);
      CHECK(g.right_vertex(a) < v);
      CHECK(g.right_vertex(a + 1) >= v);
      const int64_t b = g.min_right_above(v);
      CHECK(g.right_vertex(b) > v);
      CHECK(g.right_vertex(b - 1) <= v);
      const int64_t c = g.max_left_below(v);
      CHECK(g.left_vertex(c) < v);
      CHECK(g.left_vertex(c + 1) >= v);
      const int64_t d = g.min_left_above(v);
      CHECK(g.left_vertex(d) > v);
      CHECK(g.left_vertex(d - 1) <= v);
    }
  }
}

TEST_CASE("lattice names round trip") {
  CHECK(lattice_from_string(to_string(LatticeKind::kHex)) == LatticeKind::kHex);
  CHECK(lattice_from_string(to_string(LatticeKind::kSquare)) == LatticeKind::kSquare);
  CHECK_THROWS_AS(lattice_from_string("triangular"), ConfigError);
}

TEST_CASE("geometry rejects tiny tori") {
  CHECK_THROWS_AS(Geometry(LatticeKind::kHex, 2), ConfigError);
}
