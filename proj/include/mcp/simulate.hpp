#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcp/endpoint.hpp"
#include "mcp/observer.hpp"
#include "mcp/scenario.hpp"
#include "mcp/trace.hpp"

namespace mcp::harness {

struct SimResult {
    Trace trace;  // first event carries the config digest
    endpoint::ConnectionState client;
    endpoint::ConnectionState server;
    size_t nat_rebinds = 0;
    size_t flow_expiries = 0;
    size_t attacker_drops = 0;
    std::vector<observer::ObservationRecord> tap_records;
    std::vector<Bytes> exfil_sent;
    std::vector<Bytes> exfil_received;
};

// Deterministic: equal configs give byte-identical traces.
SimResult run_scenario(const ScenarioConfig& config);

// One JSON object per line.
std::string trace_to_jsonl(const Trace& trace);
void write_trace_file(const Trace& trace, const std::string& path);
Trace trace_from_jsonl(std::istream& in);
Trace load_trace_file(const std::string& path);

}  // namespace mcp::harness
