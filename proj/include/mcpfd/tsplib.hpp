#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcpfd/sequencing.hpp"

namespace mcpfd {

// ATSP in TSPLIB EXPLICIT / FULL_MATRIX form. Arc constraints are folded into
// the weights with a penalty P larger than any tour over unpenalised arcs:
// absent and excluded arcs cost P, and a node with a forced successor (or
// predecessor) pays P on every other out-arc (in-arc). All weights stay
// non-negative.
struct TsplibAtsp {
  std::string name;
  int n = 0;
  std::vector<Cost> weights;  // n^2
};

TsplibAtsp make_tsplib_atsp(const std::string& name, int n, const std::vector<Cost>& cost,
                            const ArcConstraints& constraints = {});
std::string write_tsplib_atsp(const TsplibAtsp& problem);
TsplibAtsp read_tsplib_atsp(std::istream& in);

// TOUR_SECTION with 1-based node ids terminated by -1. Reading returns 0-based
// ids.
std::string write_tsplib_tour(const std::string& name, const std::vector<int>& nodes);
std::vector<int> read_tsplib_tour(std::istream& in);

// Runs `command` after substituting {problem} and {tour}, then reads the tour
// back and recomputes its cost on the original arcs. Returns nullopt when the
// returned tour breaks a constraint, uses an absent arc or is not proper.
// Exactness depends on the external solver.
std::optional<Tour> solve_external(const TransformedGraph& tfg, const ArcConstraints& constraints,
                                   const std::string& command, const Deadline& deadline = {});

}  // namespace mcpfd
