#include <doctest.h>

#include "beadlab/bead_config.hpp"
#include "beadlab/bead_dynamics.hpp"
#include "beadlab/errors.hpp"
#include "beadlab/gibbs_sampler.hpp"
#include "beadlab/hex_lattice.hpp"
#include "test_util.hpp"

using namespace beadlab;
using beadlab::testing::hex_sample;

namespace {

// |I+_b| by repeated single flips of the bead's own face, validating after
// each one.
int64_t brute_room(TorusBeadConfig c, BeadId b, Direction d) {
  int64_t n = 0;
  for (;;) {
    const int64_t p = c.position(b);
    const Face f{b.column, floor_mod(d == Direction::kUp ? p : p - 1, c.geometry().positions())};
    if (!c.flippable(f, d)) return n;
    c.flip(f, d);
    REQUIRE(validate(c).ok());
    ++n;
    if (n > c.geometry().positions()) return -1;
  }
}

int horizontal_dimers(const DimerOccupation& d) {
  int n = 0;
  for (uint8_t e : d.bead_edges) n += e;
  return n;
}

}  // namespace

TEST_CASE("slope construction rejects extremal slopes") {
  CHECK_NOTHROW(make_slope(0.2, 0.3));
  CHECK_THROWS_AS(make_slope(0.0, 0.5), ExtremalSlope);
  CHECK_THROWS_AS(make_slope(0.5, 0.5), ExtremalSlope);
  CHECK_THROWS_AS(make_slope(-0.1, 0.5), ExtremalSlope);
  const Slope s = make_slope(0.5, 0.25);
  CHECK(s.rho3 == doctest::Approx(0.25));
}

TEST_CASE("minimal sector: L=3 with one bead per column is a perfect matching") {
  const TorusBeadConfig c = staircase_config(3, make_slope(1.0 / 3, 1.0 / 3));
  CHECK(validate(c).ok());
  CHECK(c.beads_per_column() == 1);
  const DimerOccupation d = c.dimers();
  CHECK(horizontal_dimers(d) == 3);
  CHECK(d.dimer_count() == 9);
  CHECK(validate_dimers(d).ok());
}

TEST_CASE("beads and dimers round trip on sampled configurations") {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const TorusBeadConfig c = hex_sample(12, seed);
    const DimerOccupation d = c.dimers();
    CHECK(validate_dimers(d).ok());
    // Labels are lifted, so compare the tilings.
    const TorusBeadConfig back = TorusBeadConfig::from_dimers(d);
    CHECK(back.column_positions() == c.column_positions());
    CHECK(back.dimers() == d);
    const TorusBeadConfig again = TorusBeadConfig::from_positions(c.geometry(), c.column_positions());
    CHECK(again.column_positions() == c.column_positions());
    CHECK(again.dimers() == d);
  }
}

TEST_CASE("non-interlaced input and empty columns are rejected") {
  const Geometry g(LatticeKind::kHex, 4);
  // Column 0 has beads at 0 and 1 with nothing of column 1 between them.
  CHECK_THROWS_AS(TorusBeadConfig::from_positions(g, {{0, 1}, {3, 3}, {0, 2}, {1, 3}}),
                  InterlacingViolation);
  CHECK_THROWS_AS(TorusBeadConfig::from_positions(g, {{0, 1}, {2, 3}, {0, 2}, {1, 3}}),
                  InterlacingViolation);
  CHECK_THROWS_AS(TorusBeadConfig::from_positions(g, {{0}, {}, {0}, {0}}), EmptyColumn);
  CHECK_THROWS_AS(TorusBeadConfig::from_positions(g, {{0}, {0}}), InterlacingViolation);
}

TEST_CASE("available positions agree with the brute-force flip oracle") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const TorusBeadConfig c = hex_sample(12, 100 + seed);
    for (int l = 0; l < 12; ++l)
      for (int k = 0; k < c.beads_per_column(); ++k) {
        const BeadId b{l, k};
        CHECK(c.up_room(b) == brute_room(c, b, Direction::kUp));
        CHECK(c.down_room(b) == brute_room(c, b, Direction::kDown));
        const auto up = c.available_positions(b, Direction::kUp);
        for (size_t i = 0; i < up.size(); ++i) {
          CHECK(up[i] == c.position(b) + 1 + static_cast<int64_t>(i));
          CHECK(!c.bead_edge(l, up[i]));
        }
        const auto down = c.available_positions(b, Direction::kDown);
        for (size_t i = 0; i < down.size(); ++i) CHECK(down[i] == c.position(b) - 1 - static_cast<int64_t>(i));
      }
  }
}

TEST_CASE("a bead with a blocked face above has no up room") {
  const TorusBeadConfig c = hex_sample(12, 7);
  int blocked = 0;
  for (int l = 0; l < 12; ++l)
    for (int k = 0; k < c.beads_per_column(); ++k) {
      const BeadId b{l, k};
      if (!c.flippable({l, floor_mod(c.position(b), 12)}, Direction::kUp)) {
        CHECK(c.up_room(b) == 0);
        CHECK(c.available_positions(b, Direction::kUp).empty());
        ++blocked;
      }
    }
  CHECK(blocked > 0);
}

TEST_CASE("densest sector: every column packed, no available positions") {
  const Geometry g(LatticeKind::kHex, 3);
  const TorusBeadConfig c = TorusBeadConfig::from_positions(g, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  CHECK(validate(c).ok());
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) {
      CHECK(c.up_room({l, k}) == 0);
      CHECK(c.down_room({l, k}) == 0);
    }
  CHECK(enumerate_moves(c).empty());
  TorusBeadConfig d = c;
  Rng rng = make_rng(3);
  mcmc_sweep(d, rng);
  heat_bath_sweep(d, rng);
  CHECK(d == c);
}

TEST_CASE("elementary flips: definition, errors and involution") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const TorusBeadConfig c = hex_sample(12, 200 + seed);
    const int64_t cw = c.cross_winding(), vw = c.column_winding(0);
    int tried = 0;
    for (int l = 0; l < 12; ++l)
      for (int64_t s = 0; s < 12; ++s)
        for (Direction d : {Direction::kUp, Direction::kDown}) {
          const Face f{l, s};
          if (!c.flippable(f, d)) {
            TorusBeadConfig x = c;
            CHECK_THROWS_AS(x.flip(f, d), NotFlippable);
            continue;
          }
          TorusBeadConfig x = c;
          const int64_t from = d == Direction::kUp ? s : s + 1;
          const int k = c.bead_at(l, from);
          x.flip(f, d);
          ++tried;
          CHECK(validate(x).ok());
          CHECK(x.bead_at(l, d == Direction::kUp ? s + 1 : s) == k);
          CHECK(!x.bead_edge(l, from));
          CHECK(x.cross_winding() == cw);
          CHECK(x.column_winding(0) == vw);
          CHECK(x.flippable(f, d == Direction::kUp ? Direction::kDown : Direction::kUp));
          x.flip(f, d == Direction::kUp ? Direction::kDown : Direction::kUp);
          CHECK(x == c);
        }
    CHECK(tried > 0);
  }
}

TEST_CASE("height differences: trivial path, antisymmetry and path independence") {
  Rng rng = make_rng(11);
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const TorusBeadConfig c = hex_sample(12, 300 + seed);
    const Geometry& g = c.geometry();
    CHECK(height_diff(c, {{3, 4}}) == 0);
    const auto loop = testing::random_contractible_loop(g, {0, 0}, 40, rng);
    REQUIRE(!loop.empty());
    CHECK(height_diff(c, testing::to_faces(loop)) == 0);
    // Two halves of the loop are paths with the same endpoints.
    const size_t mid = loop.size() / 2;
    std::vector<testing::LiftedFace> a(loop.begin(), loop.begin() + mid + 1);
    std::vector<testing::LiftedFace> b(loop.rbegin(), loop.rend() - mid);
    CHECK(height_diff(c, testing::to_faces(a)) == height_diff(c, testing::to_faces(b)));
    std::vector<testing::LiftedFace> ar(a.rbegin(), a.rend());
    CHECK(height_diff(c, testing::to_faces(ar)) == -height_diff(c, testing::to_faces(a)));
  }
}

TEST_CASE("non-adjacent faces form an invalid path") {
  const TorusBeadConfig c = hex_sample(12, 5);
  CHECK_THROWS_AS(height_diff(c, {{0, 0}, {0, 5}}), InvalidPath);
  CHECK_THROWS_AS(height_diff(c, {{0, 0}, {4, 0}}), InvalidPath);
  CHECK_THROWS_AS(height_diff(c, {}), InvalidPath);
}

TEST_CASE("windings: the cross-column loop returns floor(rho2 L)") {
  const Slope s = make_slope(1.0 / 3, 1.0 / 3);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const TorusBeadConfig c = hex_sample(12, 400 + seed);
    CHECK(height_diff(c, cross_loop(c.geometry(), {0, 0})) == 4);
    CHECK(height_diff(c, cross_loop(c.geometry(), {5, 7})) == 4);
    const HexWindings w = hex_windings(c);
    CHECK(w.w2 == 4);
    CHECK(w.w3 == -8);
    CHECK(validate(c, nullptr).ok());
    const Sector want = hex_sector(12, s);
    CHECK(validate(c, &want).ok());
  }
  const TorusBeadConfig c = staircase_config(12, make_slope(0.5, 0.25));
  CHECK(hex_windings(c).w2 == 3);
}

TEST_CASE("validate reports the first violation") {
  const TorusBeadConfig c = hex_sample(12, 9);
  CHECK(validate(c).ok());
  {
    TorusBeadConfig x = c;
    int64_t t = 0;
    while (!x.zigzag_edge(0, t)) ++t;
    x.unsafe_set_zigzag_edge(0, t, false);
    CHECK(validate(x).kind == Violation::kMatching);
  }
  {
    // Move a bead past the next bead of the neighboring column.
    TorusBeadConfig x = c;
    const BeadId b{0, 0};
    const int64_t p = x.position(b);
    int64_t q = p + 1;
    while (!x.bead_edge(0, q)) ++q;
    x.unsafe_move_bead_edge(b, q - 1 > p + 2 ? q - 1 : p + 2);
    const ValidationReport r = validate(x);
    CHECK(!r.ok());
    CHECK((r.kind == Violation::kInterlacing || r.kind == Violation::kMatching));
  }
  {
    const Sector wrong{c.beads_per_column() + 1, c.cross_winding()};
    CHECK(validate(c, &wrong).kind == Violation::kBeadCount);
    const Sector wrong_w{c.beads_per_column(), c.cross_winding() + 1};
    CHECK(validate(c, &wrong_w).kind == Violation::kWinding);
  }
}

TEST_CASE("hex edge helpers agree with the configuration") {
  const TorusBeadConfig c = hex_sample(9, 12);
  for (int l = 0; l < 9; ++l)
    for (int64_t p = 0; p < 9; ++p) {
      CHECK(hex_edge_occupied(c, HexEdge::kHorizontal, l, p) == c.bead_edge(l, p));
      CHECK(hex_bead_edge(l, p).kind == HexEdge::kHorizontal);
    }
  // Every vertex of Z_l is covered exactly once.
  const Geometry& g = c.geometry();
  for (int l = 0; l < 9; ++l)
    for (int64_t v = 0; v < g.zigzag_length(); ++v) {
      int cover = c.zigzag_edge(l, v) + c.zigzag_edge(l, v - 1);
      for (int64_t p = 0; p < 9; ++p) {
        if (c.bead_edge(l, p) && g.right_vertex(p) == v) ++cover;
        if (c.bead_edge(l + 1 < 9 ? l + 1 : 0, p) && floor_mod(g.left_vertex(p), g.zigzag_length()) == v) ++cover;
      }
      CHECK(cover == 1);
    }
}
