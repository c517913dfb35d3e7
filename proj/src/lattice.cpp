// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/lattice.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

#include "qpkick/errors.hpp"

namespace qpkick {

std::string_view to_string(Color c) {
  switch (c) {
    case Color::Line: return "line";
    case Color::Even: return "even";
    case Color::Odd: return "odd";
    case Color::Red: return "R";
    case Color::Green: return "G";
    case Color::Blue: return "B";
  }
  return "?";
}

Color color_from_string(std::string_view s) {
  for (Color c : {Color::Line, Color::Even, Color::Odd, Color::Red, Color::Green, Color::Blue}) {
    if (s == to_string(c)) return c;
  }
  throw ConfigError("unknown color '" + std::string(s) + "'");
}

std::string_view to_string(LatticeKind k) {
  switch (k) {
    case LatticeKind::Chain: return "chain";
    case LatticeKind::HeavyHex: return "heavyhex";
    case LatticeKind::Custom: return "custom";
  }
  return "?";
}

LatticeKind lattice_kind_from_string(std::string_view s) {
  for (LatticeKind k : {LatticeKind::Chain, LatticeKind::HeavyHex, LatticeKind::Custom}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown lattice kind '" + std::string(s) + "'");
}

double QpFieldParams::field_at(int position) const {
  return 0.5 * W * std::cos(2.0 * std::numbers::pi * beta * position + omega0);
}

std::vector<Color> LatticeSpec::bond_colors() const {
  std::set<Color> seen;
  for (const auto &e : edges) seen.insert(e.color);
  return {seen.begin(), seen.end()};
}

std::vector<Color> LatticeSpec::field_colors() const {
  std::vector<Color> out;
  for (const auto &[c, list] : stripes) {
    if (!list.empty()) out.push_back(c);
  }
  return out;
}

std::vector<Edge> LatticeSpec::edges_of(Color c) const {
  std::vector<Edge> out;
  for (const auto &e : edges) {
    if (e.color == c) out.push_back(e);
  }
  return out;
}

void LatticeSpec::validate() const {
  if (num_qubits < 1) throw ConfigError("lattice must have at least one qubit");
  std::set<std::pair<int, int>> seen;
  std::map<Color, std::set<int>> touched;
  for (const auto &e : edges) {
    if (e.a < 0 || e.b >= num_qubits || e.a >= e.b) {
      std::ostringstream os;
      os << "invalid edge (" << e.a << ", " << e.b << ")";
      throw ConfigError(os.str());
    }
    if (!seen.insert({e.a, e.b}).second) {
      std::ostringstream os;
      os << "duplicate edge (" << e.a << ", " << e.b << ")";
      throw ConfigError(os.str());
    }
    auto &used = touched[e.color];
    if (!used.insert(e.a).second || !used.insert(e.b).second) {
      std::ostringstream os;
      os << "color class " << to_string(e.color) << " is not a matching at edge (" << e.a << ", " << e.b
         << ")";
      throw ConfigError(os.str());
    }
  }
  for (const auto &[color, list] : stripes) {
    std::set<int> covered;
    for (const auto &stripe : list) {
      for (std::size_t i = 0; i < stripe.size(); ++i) {
        const int q = stripe[i];
        if (q < 0 || q >= num_qubits) throw ConfigError("stripe qubit out of range");
        if (!covered.insert(q).second) {
          throw ConfigError("stripes of color " + std::string(to_string(color)) + " overlap at qubit " +
                            std::to_string(q));
        }
        if (i > 0) {
          const auto key = std::minmax(stripe[i - 1], q);
          if (!seen.count({key.first, key.second})) {
            throw ConfigError("stripe step " + std::to_string(stripe[i - 1]) + "->" + std::to_string(q) +
                              " is not a lattice edge");
          }
        }
      }
    }
  }
}

LatticeSpec build_chain(int n) {
  if (n < 2) throw ConfigError("chain needs at least 2 qubits, got " + std::to_string(n));
  LatticeSpec lat;
  lat.kind = LatticeKind::Chain;
  lat.num_qubits = n;
  for (int j = 0; j + 1 < n; ++j) {
    lat.edges.push_back({j, j + 1, j % 2 == 0 ? Color::Even : Color::Odd});
  }
  Stripe line(n);
  for (int j = 0; j < n; ++j) line[j] = j;
  lat.stripes[Color::Line] = {line};
  return lat;
}

namespace {

struct Neighbor {
  int qubit;
  Color color;
};

std::vector<std::vector<Neighbor>> adjacency(int n, const std::vector<Edge> &edges) {
  std::vector<std::vector<Neighbor>> adj(n);
  for (const auto &e : edges) {
    adj[e.a].push_back({e.b, e.color});
    adj[e.b].push_back({e.a, e.color});
  }
  return adj;
}

// Splits the stripe subgraph (given as an edge list) into simple paths, each
// starting at its lower-index endpoint. Fails on branching or cycles.
std::optional<std::vector<Stripe>> paths_of(int n, const std::vector<std::pair<int, int>> &bonds) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : bonds) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> visited(n, 0);
  std::vector<Stripe> out;
  for (int q = 0; q < n; ++q) {
    if (adj[q].size() > 2) return std::nullopt;
  }
  for (int q = 0; q < n; ++q) {
    if (adj[q].size() != 1 || visited[q]) continue;
    Stripe path{q};
    visited[q] = 1;
    int prev = -1;
    int cur = q;
    for (;;) {
      int next = -1;
      for (int nb : adj[cur]) {
        if (nb != prev) next = nb;
      }
      if (next < 0) break;
      if (visited[next]) return std::nullopt;
      visited[next] = 1;
      path.push_back(next);
      prev = cur;
      cur = next;
    }
    out.push_back(std::move(path));
  }
  for (int q = 0; q < n; ++q) {
    if (!adj[q].empty() && !visited[q]) return std::nullopt;  // cycle
  }
  std::sort(out.begin(), out.end(), [](const Stripe &x, const Stripe &y) {
    return *std::min_element(x.begin(), x.end()) < *std::min_element(y.begin(), y.end());
  });
  return out;
}

struct HoneycombEdge {
  int u, bridge, v;
  Color cu, cv;  // color of bond (u, bridge) and (bridge, v)
};

// Tries one corner/bridge assignment of a connected component. Succeeds iff
// the corner graph is bipartite and the A-side color determines the B-side
// color through one fixed map (the signature of direction-based coloring).
std::optional<std::vector<HoneycombEdge>> honeycomb_edges(const std::vector<std::vector<Neighbor>> &adj,
                                                         const std::vector<int> &component,
                                                         const std::vector<int> &side, int bridge_side) {
  std::vector<HoneycombEdge> hc;
  for (int q : component) {
    if (side[q] != bridge_side) continue;
    if (adj[q].size() != 2) return std::nullopt;
    const auto &x = adj[q][0];
    const auto &y = adj[q][1];
    if (x.qubit < y.qubit) {
      hc.push_back({x.qubit, q, y.qubit, x.color, y.color});
    } else {
      hc.push_back({y.qubit, q, x.qubit, y.color, x.color});
    }
  }
  std::map<int, std::vector<const HoneycombEdge *>> corner_adj;
  for (const auto &e : hc) {
    corner_adj[e.u].push_back(&e);
    corner_adj[e.v].push_back(&e);
  }
  std::map<int, int> sub;
  std::map<Color, Color> sigma;
  std::map<Color, Color> sigma_inv;
  for (const auto &[start, _] : corner_adj) {
    if (sub.count(start)) continue;
    sub[start] = 0;
    std::queue<int> todo;
    todo.push(start);
    while (!todo.empty()) {
      const int c = todo.front();
      todo.pop();
      for (const HoneycombEdge *e : corner_adj[c]) {
        const int other = e->u == c ? e->v : e->u;
        auto it = sub.find(other);
        if (it == sub.end()) {
          sub[other] = 1 - sub[c];
          todo.push(other);
        } else if (it->second == sub[c]) {
          return std::nullopt;
        }
      }
    }
  }
  for (const auto &e : hc) {
    const bool u_is_a = sub[e.u] == 0;
    const Color ca = u_is_a ? e.cu : e.cv;
    const Color cb = u_is_a ? e.cv : e.cu;
    auto [it, fresh] = sigma.emplace(ca, cb);
    if (!fresh && it->second != cb) return std::nullopt;
    auto [jt, fresh_inv] = sigma_inv.emplace(cb, ca);
    if (!fresh_inv && jt->second != ca) return std::nullopt;
  }
  return hc;
}

}  // namespace

std::optional<std::map<Color, std::vector<Stripe>>> derive_heavy_hex_stripes(int num_qubits,
                                                                          const std::vector<Edge> &edges) {
  const auto adj = adjacency(num_qubits, edges);
  std::vector<int> side(num_qubits, -1);
  std::vector<HoneycombEdge> all_hc;
  for (int root = 0; root < num_qubits; ++root) {
    if (side[root] >= 0) continue;
    if (adj[root].empty()) return std::nullopt;
    std::vector<int> component{root};
    side[root] = 0;
    for (std::size_t i = 0; i < component.size(); ++i) {
      const int q = component[i];
      for (const auto &nb : adj[q]) {
        if (side[nb.qubit] < 0) {
          side[nb.qubit] = 1 - side[q];
          component.push_back(nb.qubit);
        } else if (side[nb.qubit] == side[q]) {
          return std::nullopt;
        }
      }
    }
    // The component root (lowest index) is preferred as a corner.
    std::optional<std::vector<HoneycombEdge>> found;
    for (int bridge_side : {1, 0}) {
      found = honeycomb_edges(adj, component, side, bridge_side);
      if (found) break;
    }
    if (!found) return std::nullopt;
    all_hc.insert(all_hc.end(), found->begin(), found->end());
  }

  std::map<Color, std::vector<Stripe>> out;
  std::set<Color> colors;
  for (const auto &e : edges) colors.insert(e.color);
  for (Color alpha : colors) {
    std::vector<std::pair<int, int>> bonds;
    for (const auto &e : all_hc) {
      if (e.cu == alpha || e.cv == alpha) {
        bonds.emplace_back(e.u, e.bridge);
        bonds.emplace_back(e.bridge, e.v);
      }
    }
    auto paths = paths_of(num_qubits, bonds);
    if (!paths) return std::nullopt;
    out[alpha] = std::move(*paths);
  }
  return out;
}

LatticeSpec build_heavy_hex(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("heavy-hex needs rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  // Honeycomb as a brick wall: corner (r, c); brick (h, k) spans corner rows
  // h, h+1 and columns s..s+2 with s = 2k + h % 2. Vertical bonds exist where
  // r + c is even. Sublattice A is r + c even.
  using Corner = std::pair<int, int>;
  struct HcEdge {
    Corner p, q;  // p is the A-sublattice endpoint
    Color color_a, color_b;
  };
  std::set<std::pair<Corner, Corner>> seen;
  std::vector<HcEdge> hc;
  auto add = [&](Corner x, Corner y) {
    if (!seen.insert({std::min(x, y), std::max(x, y)}).second) return;
    const bool x_is_a = (x.first + x.second) % 2 == 0;
    const Corner a = x_is_a ? x : y;
    const Corner b = x_is_a ? y : x;
    Color ca, cb;
    if (x.first != y.first) {  // vertical
      ca = Color::Blue;
      cb = Color::Green;
    } else if (std::min(x.second, y.second) == a.second) {  // horizontal, A on the left
      ca = Color::Red;
      cb = Color::Blue;
    } else {  // horizontal, A on the right
      ca = Color::Green;
      cb = Color::Red;
    }
    hc.push_back({a, b, ca, cb});
  };
  for (int h = 0; h < rows; ++h) {
    for (int k = 0; k < cols; ++k) {
      const int s = 2 * k + h % 2;
      for (int r : {h, h + 1}) {
        add({r, s}, {r, s + 1});
        add({r, s + 1}, {r, s + 2});
      }
      add({h, s}, {h + 1, s});
      add({h, s + 2}, {h + 1, s + 2});
    }
  }

  // Fine grid: corner (r, c) -> (2r, 2c); bridges at edge midpoints.
  std::map<std::pair<int, int>, int> index;
  for (const auto &e : hc) {
    index[{2 * e.p.first, 2 * e.p.second}] = 0;
    index[{2 * e.q.first, 2 * e.q.second}] = 0;
    index[{e.p.first + e.q.first, e.p.second + e.q.second}] = 0;
  }
  int next = 0;
  for (auto &[pos, idx] : index) idx = next++;

  LatticeSpec lat;
  lat.kind = LatticeKind::HeavyHex;
  lat.num_qubits = next;
  for (const auto &e : hc) {
    const int a = index.at({2 * e.p.first, 2 * e.p.second});
    const int b = index.at({2 * e.q.first, 2 * e.q.second});
    const int m = index.at({e.p.first + e.q.first, e.p.second + e.q.second});
    lat.edges.push_back({std::min(a, m), std::max(a, m), e.color_a});
    lat.edges.push_back({std::min(b, m), std::max(b, m), e.color_b});
  }
  std::sort(lat.edges.begin(), lat.edges.end(),
            [](const Edge &x, const Edge &y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  auto stripes = derive_heavy_hex_stripes(lat.num_qubits, lat.edges);
  if (!stripes) throw InvariantError("heavy-hex generator produced a lattice without stripe structure");
  lat.stripes = std::move(*stripes);
  return lat;
}

LatticeSpec load_coupling_map(const std::vector<std::pair<int, int>> &edge_list,
                              const std::optional<EdgeColoring> &coloring, std::optional<int> num_qubits) {
  if (edge_list.empty()) throw ConfigError("coupling map has no edges");
  int max_q = -1;
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> normalized;
  for (auto [a, b] : edge_list) {
    if (a == b) throw ConfigError("coupling map has a self-loop at qubit " + std::to_string(a));
    if (a < 0 || b < 0) throw ConfigError("coupling map has a negative qubit index");
    auto key = std::minmax(a, b);
    if (!seen.insert({key.first, key.second}).second) {
      throw ConfigError("coupling map lists edge (" + std::to_string(key.first) + ", " +
                        std::to_string(key.second) + ") twice");
    }
    normalized.emplace_back(key.first, key.second);
    max_q = std::max(max_q, key.second);
  }
  const int n = num_qubits.value_or(max_q + 1);
  if (n <= max_q) throw ConfigError("num_qubits smaller than the largest qubit index");
  std::sort(normalized.begin(), normalized.end());

  LatticeSpec lat;
  lat.kind = LatticeKind::Custom;
  lat.num_qubits = n;
  if (coloring) {
    EdgeColoring canon;
    for (const auto &[pair, color] : *coloring) {
      auto key = std::minmax(pair.first, pair.second);
      canon[{key.first, key.second}] = color;
    }
    if (canon.size() != normalized.size()) throw ConfigError("coloring does not cover exactly the edge list");
    for (auto [a, b] : normalized) {
      auto it = canon.find({a, b});
      if (it == canon.end()) {
        throw ConfigError("coloring misses edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      }
      lat.edges.push_back({a, b, it->second});
    }
  } else {
    constexpr std::array<Color, 3> palette{Color::Red, Color::Green, Color::Blue};
    std::vector<std::set<Color>> used(n);
    for (auto [a, b] : normalized) {
      auto pick = std::find_if(palette.begin(), palette.end(),
                               [&](Color c) { return !used[a].count(c) && !used[b].count(c); });
      if (pick == palette.end()) {
        throw ConfigError("greedy matching decomposition needs more than 3 colors at edge (" +
                          std::to_string(a) + ", " + std::to_string(b) + ")");
      }
      used[a].insert(*pick);
      used[b].insert(*pick);
      lat.edges.push_back({a, b, *pick});
    }
  }
  lat.validate();  // rejects colorings that share a qubit within one class

  if (auto stripes = derive_heavy_hex_stripes(n, lat.edges)) {
    lat.kind = LatticeKind::HeavyHex;
    lat.stripes = std::move(*stripes);
  } else {
    lat.stripes_degenerate = true;
    for (Color c : lat.bond_colors()) {
      auto &list = lat.stripes[c];
      for (int q = 0; q < n; ++q) list.push_back({q});
    }
  }
  return lat;
}

LatticeSpec assign_qp_fields(LatticeSpec lattice, const QpFieldParams &params) {
  std::map<Color, QpFieldParams> per_color;
  for (const auto &[c, _] : lattice.stripes) per_color[c] = params;
  return assign_qp_fields(std::move(lattice), per_color);
}

LatticeSpec assign_qp_fields(LatticeSpec lattice, const std::map<Color, QpFieldParams> &params) {
  lattice.fields_z.clear();
  for (const auto &[color, list] : lattice.stripes) {
    auto it = params.find(color);
    if (it == params.end()) continue;
    for (const auto &stripe : list) {
      for (std::size_t p = 0; p < stripe.size(); ++p) {
        lattice.fields_z[{stripe[p], color}] = it->second.field_at(static_cast<int>(p));
      }
    }
  }
  return lattice;
}

}  // namespace qpkick
