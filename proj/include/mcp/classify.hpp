#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mcp/observer.hpp"
#include "mcp/trace.hpp"

namespace mcp::harness {

struct MismatchedScenarios : std::runtime_error {
    explicit MismatchedScenarios(const std::string& what) : std::runtime_error(what) {}
};

// What an endpoint actor experienced: delivery outcomes and policy signals.
struct EndpointView {
    size_t delivered = 0;
    size_t delivered_flagged = 0;
    size_t verify_fails = 0;
    size_t policy_signals = 0;
    // Per delivered packet: arrival time and the summary with writable scratch
    // values masked (the path is allowed to write those).
    std::vector<std::pair<SimTime, PacketSummary>> deliveries;
};

EndpointView endpoint_view(const Trace& trace);

// The config digest embedded as the first trace event, or "" if absent.
std::string trace_digest(const Trace& trace);

// D: the attack trace shows more verification failures or policy signals at
// the endpoints than the baseline. P: the masked delivered sequences differ
// in content or shift by more than 1 ms. Throws MismatchedScenarios when the
// two traces carry different config digests.
observer::ManipulationClass classify_dp(const Trace& baseline, const Trace& attack);

}  // namespace mcp::harness
