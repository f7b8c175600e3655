#include "session.hpp"

#include "qnetsim/core/errors.hpp"

namespace qnetsim::detail {

Session::Session(std::string name, std::uint64_t seed, const ScenarioOptions& options, TopologyConfig fallback,
                 const std::vector<std::string>& required)
    : net_(std::make_unique<Network>(seed)) {
    result_.name = std::move(name);
    result_.seed = seed;
    const TopologyConfig& config = options.topology ? *options.topology : fallback;
    for (const auto& id : required)
        if (!config.has_host(id)) throw ConfigError(result_.name + " needs a host named " + id);
    backend_ = net_->backend();
    net_->log().set_transcript_level(options.transcript_level);
    hosts_ = populate(*net_, config);
    if (options.on_network) options.on_network(*net_);
}

ScenarioResult Session::finish() {
    net_->stop();
    result_.transcript = net_->log().transcript();
    hosts_.clear();
    net_.reset();
    result_.metrics["live_qubits_after_teardown"] = static_cast<double>(backend_->live_qubits());
    return result_;
}

void rethrow_errors(const std::vector<TaskHandle>& tasks) {
    for (const auto& t : tasks)
        if (t.valid() && t.error()) std::rethrow_exception(t.error());
}

}  // namespace qnetsim::detail
