// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qpkick/errors.hpp"

namespace qpkick {

namespace {

template <class T>
T required(const json &j, const char *key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json lattice_to_json(const LatticeSpec &lattice) {
  json j;
  j["kind"] = to_string(lattice.kind);
  j["N"] = lattice.num_qubits;
  j["stripes_degenerate"] = lattice.stripes_degenerate;
  json edges = json::array();
  for (const auto &e : lattice.edges) edges.push_back({e.a, e.b, to_string(e.color)});
  j["edges"] = edges;
  json stripes = json::object();
  for (const auto &[c, list] : lattice.stripes) stripes[std::string(to_string(c))] = list;
  j["stripes"] = stripes;
  json fields = json::object();
  for (const auto &[key, h] : lattice.fields_z) fields[std::string(to_string(key.second))].push_back({key.first, h});
  j["fields"] = fields;
  return j;
}

LatticeSpec lattice_from_json(const json &j) {
  LatticeSpec l;
  l.kind = lattice_kind_from_string(required<std::string>(j, "kind"));
  l.num_qubits = required<int>(j, "N");
  l.stripes_degenerate = j.value("stripes_degenerate", false);
  for (const auto &e : required<json>(j, "edges")) {
    if (!e.is_array() || e.size() != 3) throw ConfigError("edge entries must be [a, b, color]");
    l.edges.push_back({e[0].get<int>(), e[1].get<int>(), color_from_string(e[2].get<std::string>())});
  }
  if (j.contains("stripes")) {
    for (const auto &[c, list] : j.at("stripes").items()) l.stripes[color_from_string(c)] = list.get<std::vector<Stripe>>();
  }
  if (j.contains("fields")) {
    for (const auto &[c, list] : j.at("fields").items()) {
      const Color color = color_from_string(c);
      for (const auto &entry : list) l.fields_z[{entry.at(0).get<int>(), color}] = entry.at(1).get<double>();
    }
  }
  l.validate();
  return l;
}

json circuit_to_json(const Circuit &circuit) {
  json j;
  j["num_qubits"] = circuit.num_qubits;
  j["cycle_boundaries"] = circuit.cycle_boundaries;
  json layers = json::array();
  for (const auto &layer : circuit.layers) {
    json l = json::array();
    for (const auto &g : layer) {
      json gate;
      gate["kind"] = to_string(g.kind);
      gate["qubits"] = g.arity() == 1 ? json::array({g.qubits[0]}) : json::array({g.qubits[0], g.qubits[1]});
      gate["angle"] = g.angle;
      l.push_back(gate);
    }
    layers.push_back(l);
  }
  j["layers"] = layers;
  return j;
}

Circuit circuit_from_json(const json &j) {
  Circuit c;
  c.num_qubits = required<int>(j, "num_qubits");
  c.cycle_boundaries = required<std::vector<std::size_t>>(j, "cycle_boundaries");
  for (const auto &layer : required<json>(j, "layers")) {
    Layer l;
    for (const auto &g : layer) {
      Gate gate;
      gate.kind = gate_kind_from_string(required<std::string>(g, "kind"));
      const auto qs = required<std::vector<int>>(g, "qubits");
      if (static_cast<int>(qs.size()) != gate.arity()) throw ConfigError("gate has the wrong number of qubits");
      gate.qubits = {qs[0], qs.size() > 1 ? qs[1] : -1};
      gate.angle = g.value("angle", 0.0);
      l.push_back(gate);
    }
    c.layers.push_back(std::move(l));
  }
  c.check_layers();
  return c;
}

json fit_to_json(const FitResult &fit) {
  json j;
  j["model"] = to_string(fit.model);
  j["coeffs"] = fit.coeffs;
  j["window"] = {fit.window.first, fit.window.second};
  j["residual"] = fit.residual;
  j["r2"] = fit.r2;
  j["n"] = fit.num_points;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string &path, const std::string &contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace qpkick
