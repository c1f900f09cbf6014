#pragma once

#include <string>

#include "json.hpp"

#include "mcpfd/cbss.hpp"
#include "mcpfd/workspace.hpp"

namespace mcpfd {

// {width, height, blocked, starts, goals, targets, eligibility: {v: [a]},
//  duration: {v: {a: tau}}}; vertex and agent keys are decimal strings.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

// {cost, paths, tasks, stats, algorithm, status}. `tasks` holds the task
// windows per agent as [v, start, end] triples.
nlohmann::json solution_to_json(const Solution& sol);
Solution solution_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mcpfd
