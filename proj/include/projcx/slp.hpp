#pragma once

#include <string>
#include <string_view>

#include "projcx/circuit.hpp"

namespace projcx {

/// Parses the line-based straight-line-program format:
///
///     blocks x:3 y:2
///     field gf 101        # or: field q
///     g1 = input x 0
///     g3 = sum 2*g1 3*g1
///     g4 = prod g3 1*g2
///     outputs g4
///
/// Operands are `weight*name` or a bare `name` (weight 1); an instruction may
/// only refer to names defined above it. `name = const c` declares a constant,
/// which is folded into edge weights; a constant may not be mixed into a sum
/// with non-constant terms, nor be an output.
Circuit parse_slp(std::string_view text);

/// Emits gates in topological order named `g<id>`.
std::string serialize_slp(const Circuit& c);

/// Graphviz rendering: nodes labeled `kind:degree`, edges labeled by weight.
std::string export_dot(const Circuit& c);

}  // namespace projcx
