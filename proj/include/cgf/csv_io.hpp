#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cgf/cascade_graph.hpp"
#include "cgf/tiers.hpp"

namespace cgf::io {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

// Header `fan_id,friend_id` (or the reverse order `friend_id,fan_id`).
FollowerGraph read_follower_graph(const std::filesystem::path& path);

// Header `story_id,node_id,timestamp`. Stories come back sorted by id, records
// in file order. Syntax errors carry file:line.
std::vector<ActivationLog> read_activations(const std::filesystem::path& path);

// Header `node_id,weight`.
std::map<NodeId, double> read_seed_weights(const std::filesystem::path& path);

// Header `node_id,in_degree,out_degree`; aligned to the labels of `cg`.
DegreeHints read_degree_hints(const std::filesystem::path& path, const CascadeGraph& cg);

// The `value` column of a population file.
std::vector<double> read_population(const std::filesystem::path& path);

void write_follower_graph(const std::filesystem::path& path, const std::vector<std::pair<NodeId, NodeId>>& fan_friend);
void write_activations(const std::filesystem::path& path, const std::vector<ActivationLog>& logs);

// Writes through a sibling temporary file and renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

// Story ids made safe for file names.
std::string file_stem(const std::string& story_id);

} // namespace cgf::io
