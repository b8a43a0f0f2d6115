#pragma once

#include "laf/equations.hpp"
#include "laf/graph.hpp"
#include "laf/solver.hpp"

#include <string>

namespace laf {

/// Graphviz rendering. I-nodes are boxes, RA-nodes ellipses, CA-nodes
/// diamonds; nodes appear in key order. With a solution, each I-node label
/// carries "label: acc / weak" per attribute (labels from `sys` if given).
/// The empty graph renders as "digraph laf { }".
std::string export_dot(const ArgGraph& g, const LabelingSolution* sol = nullptr,
                       const EquationSystem* sys = nullptr);

}  // namespace laf
