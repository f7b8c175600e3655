#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qnetsim/host/host.hpp"
#include "qnetsim/scenarios/scenarios.hpp"

namespace qnetsim::detail {

/// A populated network for one scenario run, torn down by finish().
class Session {
public:
    Session(std::string name, std::uint64_t seed, const ScenarioOptions& options, TopologyConfig fallback,
            const std::vector<std::string>& required);

    Network& net() { return *net_; }
    Host& operator[](const std::string& id) { return *net_->host(id); }
    void note(const std::string& who, const std::string& event, const std::string& detail) {
        net_->log().info(who, event, detail);
    }

    ScenarioResult& result() { return result_; }
    double& metric(const std::string& key) { return result_.metrics[key]; }

    /// Stops the network, collects the transcript, destroys every host and
    /// records live_qubits_after_teardown.
    ScenarioResult finish();

private:
    ScenarioResult result_;
    std::shared_ptr<qsim::Backend> backend_;
    std::unique_ptr<Network> net_;
    std::vector<std::shared_ptr<Host>> hosts_;
};

/// Rethrows the first protocol error, if any.
void rethrow_errors(const std::vector<TaskHandle>& tasks);

}  // namespace qnetsim::detail
