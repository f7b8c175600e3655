#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qnetsim/core/errors.hpp"
#include "qnetsim/core/log.hpp"
#include "qnetsim/scenarios/scenarios.hpp"

namespace qnetsim::cli {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_field(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

std::string take_field(const std::string& bytes, std::size_t& pos) {
    if (bytes.size() - pos < 4) throw DecodeError("truncated record length");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(bytes[pos + i]);
    pos += 4;
    if (bytes.size() - pos < n) throw DecodeError("truncated record");
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
}

NetworkPacket without_qubit(const NetworkPacket& p) {
    NetworkPacket copy;
    copy.id = p.id;
    copy.src = p.src;
    copy.dst = p.dst;
    copy.ttl = p.ttl;
    copy.route_hint = p.route_hint;
    const TransportPacket& t = p.inner;
    copy.inner.sender = t.sender;
    copy.inner.receiver = t.receiver;
    copy.inner.protocol = t.protocol;
    copy.inner.sequence = t.sequence;
    copy.inner.await_ack = t.await_ack;
    copy.inner.meta = t.meta;
    std::visit(
        [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (!std::is_same_v<V, qsim::Qubit>) copy.inner.payload = v;
        },
        t.payload);
    return copy;
}

std::string describe_payload(const TransportPacket& t) {
    if (const auto* s = std::get_if<std::string>(&t.payload)) return "\"" + *s + "\"";
    if (const auto* c = std::get_if<CorrectionBits>(&t.payload))
        return "m1=" + std::to_string(c->m1) + " m2=" + std::to_string(c->m2) + " epr=" + c->epr_id;
    if (const auto* c = std::get_if<ControlRecord>(&t.payload))
        return c->kind + " seq=" + std::to_string(c->sequence) + " for " + std::string(to_string(c->answers));
    return "-";
}

std::uint64_t default_seed() {
    const char* env = std::getenv("QNETSIM_SEED");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("QNETSIM_SEED is not an integer: ") + env);
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw ConfigError("cannot write " + path);
}

std::string scenario_list() {
    std::string s;
    for (const auto& n : scenario_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
}

TopologyConfig known_topology(const std::string& scenario) {
    try {
        return scenario_topology(scenario);
    } catch (const std::out_of_range&) {
        throw ConfigError("unknown scenario '" + scenario + "'; valid scenarios: " + scenario_list());
    }
}

}  // namespace

std::string encode_hop(const NetworkPacket& packet, const std::string& from, const std::string& to) {
    std::string out;
    put_field(out, from);
    put_field(out, to);
    put_field(out, serialize(without_qubit(packet)));
    return out;
}

std::vector<HopRecord> decode_hops(const std::string& bytes) {
    std::vector<HopRecord> hops;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        HopRecord h;
        h.from = take_field(bytes, pos);
        h.to = take_field(bytes, pos);
        h.packet = deserialize_network(take_field(bytes, pos));
        hops.push_back(std::move(h));
    }
    return hops;
}

std::string describe(const HopRecord& hop) {
    const auto& t = hop.packet.inner;
    return hop.from + " -> " + hop.to + " | " + std::string(to_string(t.protocol)) + " " + t.sender + "->" +
           t.receiver + " seq=" + std::to_string(t.sequence) + " " + describe_payload(t);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Seeded quantum network simulations", "qnetsim"};
    app.require_subcommand(1);

    std::string scenario, topology_path, out_path, transcript_path, record_path, kind = "quantum";
    std::string log_level = "error";
    std::optional<std::uint64_t> seed;
    std::string replay_path;

    auto* run_cmd = app.add_subcommand("run", "Run a scenario and print its result as JSON");
    run_cmd->add_option("--scenario", scenario, "Scenario name")->required();
    run_cmd->add_option("--seed", seed, "Simulation seed (default: QNETSIM_SEED or 0)");
    run_cmd->add_option("--topology", topology_path, "Topology file replacing the built-in one");
    run_cmd->add_option("--out", out_path, "Write the JSON here instead of stdout");
    run_cmd->add_option("--transcript", transcript_path, "Write the event transcript here");
    run_cmd->add_option("--record", record_path, "Write every forwarded hop here for replay");
    run_cmd->add_option("--log-level", log_level, "Logging to stderr")
        ->check(CLI::IsMember({"error", "info", "debug"}));

    auto* graph_cmd = app.add_subcommand("graph", "Export a topology as DOT");
    auto* topo_opt = graph_cmd->add_option("--topology", topology_path, "Topology file");
    graph_cmd->add_option("--scenario", scenario, "Use a scenario's built-in topology")->excludes(topo_opt);
    graph_cmd->add_option("--kind", kind, "Graph to export")->check(CLI::IsMember({"classical", "quantum"}));
    graph_cmd->add_option("--out", out_path, "Write the DOT here instead of stdout");

    auto* replay_cmd = app.add_subcommand("replay", "Print a recorded hop log");
    replay_cmd->add_option("file", replay_path, "File written by run --record")->required();

    auto* list_cmd = app.add_subcommand("list", "List scenario names");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "qnetsim: " << e.what() << "\n";
        if (e.get_exit_code() == 0) return kOk;
        return kUsage;
    }

    try {
        if (list_cmd->parsed()) {
            for (const auto& n : scenario_names()) out << n << "\n";
            return kOk;
        }

        if (replay_cmd->parsed()) {
            for (const auto& hop : decode_hops(read_file(replay_path))) out << describe(hop) << "\n";
            return kOk;
        }

        if (graph_cmd->parsed()) {
            TopologyConfig config;
            if (!topology_path.empty())
                config = load_topology(topology_path);
            else if (!scenario.empty())
                config = known_topology(scenario);
            else
                throw ConfigError("graph needs --topology or --scenario");
            Network net;
            populate(net, config);
            const std::string dot = net.export_graph(*parse_graph_kind(kind));
            net.stop();
            if (out_path.empty())
                out << dot;
            else
                write_file(out_path, dot);
            return kOk;
        }

        // run
        const auto names = scenario_names();
        if (std::find(names.begin(), names.end(), scenario) == names.end())
            throw ConfigError("unknown scenario '" + scenario + "'; valid scenarios: " + scenario_list());
        const auto level = *parse_log_level(log_level);
        EventLog::set_default_stderr_level(level);

        ScenarioOptions options;
        if (!topology_path.empty()) options.topology = load_topology(topology_path);
        options.transcript_level = level == LogLevel::debug ? LogLevel::debug : LogLevel::info;
        std::string record;
        if (!record_path.empty())
            options.on_network = [&record](Network& net) {
                net.set_hop_tap([&record](const NetworkPacket& p, const std::string& from, const std::string& to) {
                    record += encode_hop(p, from, to);
                });
            };

        const ScenarioResult result = run_scenario(scenario, seed ? *seed : default_seed(), options);
        const std::string json = to_json(result).dump(2) + "\n";
        if (out_path.empty())
            out << json;
        else
            write_file(out_path, json);
        if (!transcript_path.empty()) {
            std::string text;
            for (const auto& line : result.transcript) text += line + "\n";
            write_file(transcript_path, text);
        }
        if (!record_path.empty()) write_file(record_path, record);
        return result.success ? kOk : kScenarioFailed;
    } catch (const ConfigError& e) {
        err << "qnetsim: " << e.what() << "\n";
        return kUsage;
    } catch (const DecodeError& e) {
        err << "qnetsim: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "qnetsim: " << e.what() << "\n";
        return kScenarioFailed;
    }
}

}  // namespace qnetsim::cli
