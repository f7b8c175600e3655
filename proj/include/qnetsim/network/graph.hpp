#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qnetsim {

/// Directed graph: node -> (neighbour -> edge weight). Every node appears as
/// a key, even without out-edges.
using DiGraph = std::map<std::string, std::map<std::string, double>>;

using Path = std::vector<std::string>;

/// Routing hook: (graph, source, target) -> node list from source to target.
/// Throws NoRoute when the target is unreachable.
using RoutingFn = std::function<Path(const DiGraph&, const std::string&, const std::string&)>;

/// Fewest hops; among equally short paths the lexicographically smallest
/// node sequence wins. Edge weights are ignored.
Path shortest_path(const DiGraph& graph, const std::string& source, const std::string& target);

/// Minimum total edge weight (weights must be positive), same tie-break.
Path weighted_shortest_path(const DiGraph& graph, const std::string& source, const std::string& target);

/// Sum of edge weights along `path`; throws NoRoute if an edge is missing.
double path_weight(const DiGraph& graph, const Path& path);

/// True if consecutive nodes of `path` are joined by edges of `graph`.
bool is_path(const DiGraph& graph, const Path& path);

/// Every simple path from source to target, in lexicographic order.
std::vector<Path> all_simple_paths(const DiGraph& graph, const std::string& source, const std::string& target);

/// Nodes reachable from `source` (excluding it), sorted.
std::vector<std::string> reachable_from(const DiGraph& graph, const std::string& source);

/// Deterministic DOT text: nodes sorted, edges sorted by (src, dst).
std::string to_dot(const DiGraph& graph, std::string_view name);

}  // namespace qnetsim
