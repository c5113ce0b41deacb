#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcp/trace.hpp"

namespace mcp::harness {

struct TraceReport {
    std::string source;
    SimTime first_time = 0, last_time = 0;
    std::map<std::string, size_t> kind_counts;  // event kind name -> count
    size_t keepalives = 0;
    size_t verify_fails = 0;
    size_t nat_rebinds = 0;
    size_t flow_expiries = 0;
    size_t lola_drops = 0;
    size_t injected = 0;
    size_t policy_signals = 0;
    std::map<std::string, size_t> drops_by_actor;
};

TraceReport summarize_trace(const std::string& source, const Trace& trace);

std::string report_text(const std::vector<TraceReport>& reports);
std::string report_json(const std::vector<TraceReport>& reports);

}  // namespace mcp::harness
