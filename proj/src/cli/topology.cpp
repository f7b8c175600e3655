#include "qnetsim/cli/topology.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qnetsim/core/errors.hpp"
#include "qnetsim/host/host.hpp"

namespace qnetsim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
    if (line > 0) throw ConfigError("line " + std::to_string(line) + ": " + what);
    throw ConfigError(what);
}

bool parse_flag(const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(line, "expected true or false, got '" + value + "'");
}

}  // namespace

bool TopologyConfig::has_host(const std::string& id) const {
    for (const auto& h : hosts)
        if (h == id) return true;
    return false;
}

void TopologyConfig::validate() const {
    std::set<std::string> seen;
    for (const auto& h : hosts)
        if (!seen.insert(h).second) fail(0, "duplicate host " + h);
    for (const auto& l : links) {
        if (l.a == l.b) fail(l.line, "self-link on " + l.a);
        if (!seen.count(l.a)) fail(l.line, "unknown host " + l.a);
        if (!seen.count(l.b)) fail(l.line, "unknown host " + l.b);
    }
    if (settings.delay < 0) fail(0, "delay must be non-negative");
}

TopologyConfig parse_topology(std::string_view text) {
    TopologyConfig config;
    std::map<std::string, int> host_lines;
    std::string section;
    std::istringstream in{std::string(text)};
    int n = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++n;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(n, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "hosts" && section != "links" && section != "settings")
                fail(n, "unknown section [" + section + "]");
            continue;
        }
        if (section.empty()) fail(n, "content before any section");
        if (section == "hosts") {
            for (const auto& id : words(line)) {
                if (host_lines.count(id))
                    fail(n, "duplicate host " + id + " (first declared on line " + std::to_string(host_lines[id]) + ")");
                host_lines[id] = n;
                config.hosts.push_back(id);
            }
        } else if (section == "links") {
            const auto w = words(line);
            if (w.size() < 3 || w.size() > 4) fail(n, "expected '<a> <-> <b> [kind]' or '<a> -> <b> [kind]'");
            TopologyLink link{w[0], w[2], LinkKind::both, true, n};
            if (w[1] == "->")
                link.bidirectional = false;
            else if (w[1] != "<->")
                fail(n, "unknown link operator '" + w[1] + "'");
            if (w.size() == 4) {
                auto kind = parse_link_kind(w[3]);
                if (!kind) fail(n, "unknown link kind '" + w[3] + "'");
                link.kind = *kind;
            }
            config.links.push_back(link);
        } else {
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(n, "expected key = value");
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key == "use_hop_by_hop") {
                config.settings.use_hop_by_hop = parse_flag(value, n);
            } else if (key == "use_ent_swap") {
                config.settings.use_ent_swap = parse_flag(value, n);
            } else if (key == "delay") {
                std::size_t used = 0;
                double d = 0;
                try {
                    d = std::stod(value, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0 || used != value.size()) fail(n, "delay must be a number");
                if (d < 0) fail(n, "delay must be non-negative");
                config.settings.delay = d;
            } else {
                fail(n, "unknown setting '" + key + "'");
            }
        }
    }
    if (config.hosts.empty()) fail(0, "no hosts declared");
    config.validate();
    return config;
}

TopologyConfig load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_topology(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string format_topology(const TopologyConfig& config) {
    std::ostringstream out;
    out << "[hosts]\n";
    for (const auto& h : config.hosts) out << h << "\n";
    out << "\n[links]\n";
    for (const auto& l : config.links)
        out << l.a << (l.bidirectional ? " <-> " : " -> ") << l.b << " " << to_string(l.kind) << "\n";
    out << "\n[settings]\n"
        << "use_hop_by_hop = " << (config.settings.use_hop_by_hop ? "true" : "false") << "\n"
        << "use_ent_swap = " << (config.settings.use_ent_swap ? "true" : "false") << "\n"
        << "delay = " << config.settings.delay << "\n";
    return out.str();
}

std::vector<std::shared_ptr<Host>> populate(Network& network, const TopologyConfig& config) {
    config.validate();
    network.set_use_hop_by_hop(config.settings.use_hop_by_hop);
    network.set_use_ent_swap(config.settings.use_ent_swap);
    network.set_delay(config.settings.delay);
    network.start(config.hosts);

    std::vector<std::shared_ptr<Host>> hosts;
    std::map<std::string, Host*> by_id;
    for (const auto& id : config.hosts) {
        hosts.push_back(std::make_shared<Host>(id, network));
        by_id[id] = hosts.back().get();
    }
    for (const auto& l : config.links) {
        by_id[l.a]->add_connection(l.b, l.kind);
        if (l.bidirectional) by_id[l.b]->add_connection(l.a, l.kind);
    }
    for (auto& h : hosts) h->start();
    network.add_hosts(hosts);
    return hosts;
}

}  // namespace qnetsim
