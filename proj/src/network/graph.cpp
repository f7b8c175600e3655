#include "qnetsim/network/graph.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "qnetsim/core/errors.hpp"

namespace qnetsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Distances = std::map<std::string, double>;

std::map<std::string, std::vector<std::pair<std::string, double>>> reversed(const DiGraph& graph) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> rev;
    for (const auto& [u, edges] : graph)
        for (const auto& [v, w] : edges) rev[v].emplace_back(u, w);
    return rev;
}

// Distances to `target` with every edge weighing `unit` (or its own weight
// when unit <= 0).
Distances distances_to(const DiGraph& graph, const std::string& target, double unit) {
    const auto rev = reversed(graph);
    Distances dist;
    using Item = std::pair<double, std::string>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[target] = 0.0;
    heap.emplace(0.0, target);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        auto it = rev.find(v);
        if (it == rev.end()) continue;
        for (const auto& [u, w] : it->second) {
            const double step = unit > 0 ? unit : w;
            if (!(step > 0)) throw RoutingError("non-positive edge weight " + u + "->" + v);
            const double nd = d + step;
            auto found = dist.find(u);
            if (found == dist.end() || nd < found->second) {
                dist[u] = nd;
                heap.emplace(nd, u);
            }
        }
    }
    return dist;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

Path greedy_walk(const DiGraph& graph, const std::string& source, const std::string& target, double unit) {
    if (!graph.count(source)) throw NoRoute("unknown node " + source);
    if (!graph.count(target)) throw NoRoute("unknown node " + target);
    if (source == target) return {source};
    const Distances dist = distances_to(graph, target, unit);
    if (!dist.count(source)) throw NoRoute("no path " + source + " -> " + target);

    Path path{source};
    std::string at = source;
    while (at != target) {
        const double here = dist.at(at);
        const std::string* next = nullptr;
        for (const auto& [v, w] : graph.at(at)) {
            auto it = dist.find(v);
            if (it == dist.end()) continue;
            if (close(here, (unit > 0 ? unit : w) + it->second)) {
                next = &v;
                break;
            }
        }
        if (!next || path.size() > graph.size()) throw RoutingError("inconsistent distances at " + at);
        at = *next;
        path.push_back(at);
    }
    return path;
}

}  // namespace

Path shortest_path(const DiGraph& graph, const std::string& source, const std::string& target) {
    return greedy_walk(graph, source, target, 1.0);
}

Path weighted_shortest_path(const DiGraph& graph, const std::string& source, const std::string& target) {
    return greedy_walk(graph, source, target, 0.0);
}

double path_weight(const DiGraph& graph, const Path& path) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto u = graph.find(path[i]);
        if (u == graph.end()) throw NoRoute("unknown node " + path[i]);
        auto e = u->second.find(path[i + 1]);
        if (e == u->second.end()) throw NoRoute("missing edge " + path[i] + "->" + path[i + 1]);
        total += e->second;
    }
    return total;
}

bool is_path(const DiGraph& graph, const Path& path) {
    if (path.empty() || !graph.count(path.front())) return false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto u = graph.find(path[i]);
        if (u == graph.end() || !u->second.count(path[i + 1])) return false;
    }
    return true;
}

std::vector<Path> all_simple_paths(const DiGraph& graph, const std::string& source, const std::string& target) {
    std::vector<Path> out;
    if (!graph.count(source) || !graph.count(target)) return out;
    Path current{source};
    std::set<std::string> on_path{source};
    std::function<void(const std::string&)> walk = [&](const std::string& at) {
        if (at == target) {
            out.push_back(current);
            return;
        }
        for (const auto& [v, w] : graph.at(at)) {
            if (on_path.count(v) || !graph.count(v)) continue;
            current.push_back(v);
            on_path.insert(v);
            walk(v);
            on_path.erase(v);
            current.pop_back();
        }
    };
    walk(source);
    return out;
}

std::vector<std::string> reachable_from(const DiGraph& graph, const std::string& source) {
    std::set<std::string> seen{source};
    std::deque<std::string> frontier{source};
    while (!frontier.empty()) {
        const std::string u = frontier.front();
        frontier.pop_front();
        auto it = graph.find(u);
        if (it == graph.end()) continue;
        for (const auto& [v, w] : it->second)
            if (seen.insert(v).second) frontier.push_back(v);
    }
    seen.erase(source);
    return {seen.begin(), seen.end()};
}

std::string to_dot(const DiGraph& graph, std::string_view name) {
    std::ostringstream out;
    out << "digraph \"" << name << "\" {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (const auto& [node, edges] : graph) out << "  \"" << node << "\";\n";
    for (const auto& [node, edges] : graph)
        for (const auto& [peer, w] : edges) out << "  \"" << node << "\" -> \"" << peer << "\";\n";
    out << "}\n";
    return out.str();
}

}  // namespace qnetsim
