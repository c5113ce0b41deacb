#include "mcp/classify.hpp"

#include <cmath>

namespace mcp::harness {

namespace {

constexpr SimTime kTimeTolerance = 1000;  // 1 ms

bool endpoint_actor(const std::string& actor) {
    return actor == "client" || actor == "server";
}

PacketSummary masked(const PacketSummary& p) {
    PacketSummary m = p;
    if (m.has_scratch && m.scratch_mode == uint8_t(wire::IntegrityMode::WRITABLE))
        m.scratch_value.assign(m.scratch_value.size(), 0);
    return m;
}

}  // namespace

EndpointView endpoint_view(const Trace& trace) {
    EndpointView v;
    for (const TraceEvent& ev : trace) {
        if (!endpoint_actor(ev.actor)) continue;
        switch (ev.kind) {
            case EventKind::DELIVERED:
                ++v.delivered;
                v.deliveries.emplace_back(ev.time, masked(ev.packet));
                break;
            case EventKind::DELIVERED_FLAGGED:
                ++v.delivered_flagged;
                v.deliveries.emplace_back(ev.time, masked(ev.packet));
                break;
            case EventKind::VERIFY_FAIL:
                ++v.verify_fails;
                break;
            case EventKind::POLICY_SIGNAL:
                ++v.policy_signals;
                break;
            default:
                break;
        }
    }
    return v;
}

std::string trace_digest(const Trace& trace) {
    if (trace.empty()) return "";
    const TraceEvent& first = trace.front();
    if (first.actor != "config") return "";
    auto pos = first.detail.find("digest=");
    if (pos == std::string::npos) return "";
    auto end = first.detail.find(' ', pos);
    return first.detail.substr(pos + 7, end == std::string::npos ? end : end - pos - 7);
}

observer::ManipulationClass classify_dp(const Trace& baseline, const Trace& attack) {
    std::string db = trace_digest(baseline), da = trace_digest(attack);
    if (db.empty() || da.empty())
        throw MismatchedScenarios("trace is missing its config digest");
    if (db != da)
        throw MismatchedScenarios("traces come from different scenario configs (" + db +
                                  " vs " + da + ")");

    EndpointView vb = endpoint_view(baseline);
    EndpointView va = endpoint_view(attack);

    observer::ManipulationClass c;
    c.detectable =
        va.verify_fails > vb.verify_fails || va.policy_signals > vb.policy_signals;

    if (va.deliveries.size() != vb.deliveries.size()) {
        c.behavior_changing = true;
        return c;
    }
    for (size_t i = 0; i < va.deliveries.size(); ++i) {
        if (va.deliveries[i].second != vb.deliveries[i].second ||
            std::llabs(va.deliveries[i].first - vb.deliveries[i].first) > kTimeTolerance) {
            c.behavior_changing = true;
            break;
        }
    }
    return c;
}

}  // namespace mcp::harness
