#pragma once

// Network document format:
//
//   { "nodes": [ { "id": "c1", "dim": 1, "mean": [0.0], "cov": [[0.5]],
//                  "parents": [ { "id": "a1", "B": [[2.0]] } ] } ] }
//
// Matrices are row-major nested arrays. Reals are written with shortest
// round-trip precision, so parse(serialize(net)) is bit-exact.

#include <string>
#include <string_view>

#include "lgspi/network.hpp"

namespace lgspi {

Network parse_network(std::string_view document, const Tolerances& tol = default_tolerances());
Network load_network(const std::string& path, const Tolerances& tol = default_tolerances());

std::string serialize_network(const Network& net, int indent = 2);

}  // namespace lgspi
