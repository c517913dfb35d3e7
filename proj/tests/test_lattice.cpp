#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "qpkick/errors.hpp"
#include "qpkick/lattice.hpp"

using namespace qpkick;

namespace {

std::map<Color, int> color_counts(const LatticeSpec &l) {
  std::map<Color, int> c;
  for (const auto &e : l.edges) ++c[e.color];
  return c;
}

void check_partition_and_matching(const LatticeSpec &l) {
  std::set<std::pair<int, int>> seen;
  for (const auto &e : l.edges) CHECK(seen.insert({e.a, e.b}).second);
  for (Color c : l.bond_colors()) {
    std::set<int> used;
    for (const auto &e : l.edges_of(c)) {
      CHECK(used.insert(e.a).second);
      CHECK(used.insert(e.b).second);
    }
  }
  std::size_t total = 0;
  for (Color c : l.bond_colors()) total += l.edges_of(c).size();
  CHECK(total == l.edges.size());
}

}  // namespace

TEST_CASE("chain construction") {
  auto l = build_chain(129);
  CHECK(l.num_qubits == 129);
  CHECK(l.edges.size() == 128);
  auto c = color_counts(l);
  // Parity rule on j = 0..127 splits the 128 bonds evenly.
  CHECK(c[Color::Even] == 64);
  CHECK(c[Color::Odd] == 64);
  REQUIRE(l.stripes.at(Color::Line).size() == 1);
  CHECK(l.stripes.at(Color::Line)[0].size() == 129);
  check_partition_and_matching(l);

  auto two = build_chain(2);
  REQUIRE(two.edges.size() == 1);
  CHECK(two.edges[0] == Edge{0, 1, Color::Even});

  auto five = build_chain(5);
  const std::vector<Edge> want{{0, 1, Color::Even}, {1, 2, Color::Odd}, {2, 3, Color::Even}, {3, 4, Color::Odd}};
  CHECK(five.edges == want);

  CHECK_THROWS_AS(build_chain(1), ConfigError);
}

TEST_CASE("chain fields") {
  auto l = assign_qp_fields(build_chain(6), QpFieldParams{2.0});
  CHECK(l.fields_z.at({0, Color::Line}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l.fields_z.at({1, Color::Line}) == doctest::Approx(-0.7373688780783197).epsilon(1e-12));
  for (const auto &[k, h] : l.fields_z) CHECK(std::abs(h) <= 1.0);
  auto again = assign_qp_fields(build_chain(6), QpFieldParams{2.0});
  CHECK(again.fields_z == l.fields_z);
}

TEST_CASE("single hexagon matches the reference coloring up to relabeling") {
  auto l = build_heavy_hex(1, 1);
  REQUIRE(l.num_qubits == 12);
  REQUIRE(l.edges.size() == 12);
  check_partition_and_matching(l);
  // Reference ring 0-1-...-11 with bond (k, k+1 mod 12) colors.
  const std::array<Color, 12> ref{Color::Green, Color::Red,  Color::Green, Color::Blue, Color::Red,   Color::Blue,
                                  Color::Red,   Color::Green, Color::Blue, Color::Green, Color::Blue, Color::Red};
  // Walk our ring starting from qubit 0.
  std::vector<int> ring{0};
  int prev = -1;
  while (ring.size() < 12) {
    const int cur = ring.back();
    for (const auto &e : l.edges) {
      const int other = e.a == cur ? e.b : (e.b == cur ? e.a : -1);
      if (other >= 0 && other != prev && other != ring.front()) {
        prev = cur;
        ring.push_back(other);
        break;
      }
    }
  }
  auto color_between = [&](int a, int b) {
    for (const auto &e : l.edges)
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.color;
    FAIL("missing edge");
    return Color::Line;
  };
  bool found = false;
  for (int shift = 0; shift < 12 && !found; ++shift) {
    for (int dir : {1, -1}) {
      bool ok = true;
      for (int k = 0; k < 12 && ok; ++k) {
        const int a = ring[static_cast<std::size_t>(((shift + dir * k) % 12 + 12) % 12)];
        const int b = ring[static_cast<std::size_t>(((shift + dir * (k + 1)) % 12 + 12) % 12)];
        ok = color_between(a, b) == ref[static_cast<std::size_t>(k)];
      }
      found = found || ok;
    }
  }
  CHECK(found);
}

TEST_CASE("144-qubit heavy hex bond counts") {
  auto l = build_heavy_hex(7, 3);
  CHECK(l.num_qubits == 144);
  CHECK(l.edges.size() == 164);
  auto c = color_counts(l);
  CHECK(c[Color::Red] == 54);
  CHECK(c[Color::Green] == 55);
  CHECK(c[Color::Blue] == 55);
  check_partition_and_matching(l);
}

TEST_CASE("heavy hex stripes are disjoint simple paths") {
  for (auto [r, c] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 2}, {7, 3}}) {
    auto l = build_heavy_hex(r, c);
    CHECK_FALSE(l.stripes_degenerate);
    std::set<std::pair<int, int>> adj;
    for (const auto &e : l.edges) {
      adj.insert({e.a, e.b});
      adj.insert({e.b, e.a});
    }
    std::set<int> any;
    std::size_t placements = 0;
    for (const auto &[color, stripes] : l.stripes) {
      std::set<int> covered;
      int prev_min = -1;
      for (const auto &s : stripes) {
        CHECK(s.front() < s.back());
        const int mn = *std::min_element(s.begin(), s.end());
        CHECK(mn > prev_min);
        prev_min = mn;
        for (std::size_t i = 0; i < s.size(); ++i) {
          CHECK(covered.insert(s[i]).second);
          if (i > 0) CHECK(adj.count({s[i - 1], s[i]}) == 1);
        }
      }
      any.insert(covered.begin(), covered.end());
      placements += covered.size();
    }
    CHECK(static_cast<int>(any.size()) == l.num_qubits);
    auto f = assign_qp_fields(l, QpFieldParams{3.0});
    for (const auto &[k, h] : f.fields_z) {
      CHECK(std::abs(h) <= 1.5);
      const auto &mine = f.stripes.at(k.second);
      CHECK(std::any_of(mine.begin(), mine.end(),
                        [&](const Stripe &s) { return std::find(s.begin(), s.end(), k.first) != s.end(); }));
    }
    CHECK(f.fields_z.size() == placements);
  }
}

TEST_CASE("coupling map import") {
  auto path = load_coupling_map({{0, 1}, {1, 2}});
  CHECK(path.bond_colors().size() == 2);
  CHECK(path.edges[0].color != path.edges[1].color);

  EdgeColoring bad{{{0, 1}, Color::Red}, {{1, 2}, Color::Red}};
  CHECK_THROWS_AS(load_coupling_map({{0, 1}, {1, 2}}, bad), ConfigError);
  CHECK_THROWS_AS(load_coupling_map({{0, 0}}), ConfigError);
  CHECK_THROWS_AS(load_coupling_map({{0, 1}, {1, 0}}), ConfigError);

  // The reference hexagon, colored as in the figure.
  const std::vector<Color> ref{Color::Green, Color::Red,  Color::Green, Color::Blue, Color::Red,   Color::Blue,
                               Color::Red,   Color::Green, Color::Blue, Color::Green, Color::Blue, Color::Red};
  std::vector<std::pair<int, int>> edges;
  EdgeColoring coloring;
  for (int k = 0; k < 12; ++k) {
    const int a = std::min(k, (k + 1) % 12), b = std::max(k, (k + 1) % 12);
    edges.emplace_back(a, b);
    coloring[{a, b}] = ref[static_cast<std::size_t>(k)];
  }
  auto hex = load_coupling_map(edges, coloring);
  for (const auto &e : hex.edges) CHECK(e.color == coloring.at({e.a, e.b}));
  check_partition_and_matching(hex);
}

TEST_CASE("odd cycle cannot be three colored greedily as heavy hex; stripes degrade") {
  auto tri = load_coupling_map({{0, 1}, {1, 2}, {0, 2}});
  check_partition_and_matching(tri);
  CHECK(tri.stripes_degenerate);
}
