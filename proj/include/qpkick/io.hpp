// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qpkick/circuit.hpp"
#include "qpkick/lattice.hpp"
#include "qpkick/observables.hpp"

namespace qpkick {

using nlohmann::json;

/// {kind, N, edges: [[a, b, color]...], stripes: {color: [[q...]...]},
///  fields: {color: [[q, h]...]}, stripes_degenerate}. Keys serialize sorted.
json lattice_to_json(const LatticeSpec &lattice);
LatticeSpec lattice_from_json(const json &j);

/// {num_qubits, cycle_boundaries, layers: [[{kind, qubits, angle}...]...]}.
json circuit_to_json(const Circuit &circuit);
Circuit circuit_from_json(const json &j);

/// {model, coeffs, window, residual, r2, n}.
json fit_to_json(const FitResult &fit);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Reads a whole file; throws std::runtime_error naming the path.
std::string read_text_file(const std::string &path);
/// Writes atomically through a temporary file in the same directory.
void write_text_file(const std::string &path, const std::string &contents);

}  // namespace qpkick
