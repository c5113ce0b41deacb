#include "mcp/report.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace mcp::harness {

using nlohmann::json;

TraceReport summarize_trace(const std::string& source, const Trace& trace) {
    TraceReport r;
    r.source = source;
    bool first = true;
    for (const TraceEvent& ev : trace) {
        if (ev.actor == "config") continue;
        if (first) {
            r.first_time = r.last_time = ev.time;
            first = false;
        }
        r.first_time = std::min(r.first_time, ev.time);
        r.last_time = std::max(r.last_time, ev.time);
        ++r.kind_counts[event_kind_name(ev.kind)];
        switch (ev.kind) {
            case EventKind::KEEPALIVE: ++r.keepalives; break;
            case EventKind::VERIFY_FAIL: ++r.verify_fails; break;
            case EventKind::INJECTED: ++r.injected; break;
            case EventKind::POLICY_SIGNAL: ++r.policy_signals; break;
            case EventKind::DROPPED:
                ++r.drops_by_actor[ev.actor];
                if (ev.detail == "latency queue full") ++r.lola_drops;
                break;
            case EventKind::STATE_TRANSITION:
                if (ev.detail.rfind("REBIND", 0) == 0) ++r.nat_rebinds;
                if (ev.detail.rfind("EXPIRED ", 0) == 0)
                    r.flow_expiries += std::stoul(ev.detail.substr(8));
                break;
            default:
                break;
        }
    }
    return r;
}

std::string report_text(const std::vector<TraceReport>& reports) {
    std::ostringstream out;
    for (const TraceReport& r : reports) {
        out << "trace " << r.source << "\n";
        out << "  span: " << r.first_time << " .. " << r.last_time << " us\n";
        out << "  events:";
        for (const auto& [kind, n] : r.kind_counts) out << " " << kind << "=" << n;
        out << "\n";
        out << "  keepalives: " << r.keepalives << "\n";
        out << "  verify_fails: " << r.verify_fails << "\n";
        out << "  policy_signals: " << r.policy_signals << "\n";
        out << "  nat_rebinds: " << r.nat_rebinds << "\n";
        out << "  flow_expiries: " << r.flow_expiries << "\n";
        out << "  lola_drops: " << r.lola_drops << "\n";
        out << "  injected: " << r.injected << "\n";
        if (!r.drops_by_actor.empty()) {
            out << "  drops_by_actor:";
            for (const auto& [actor, n] : r.drops_by_actor) out << " " << actor << "=" << n;
            out << "\n";
        }
    }
    return out.str();
}

std::string report_json(const std::vector<TraceReport>& reports) {
    json arr = json::array();
    for (const TraceReport& r : reports) {
        json j;
        j["source"] = r.source;
        j["first_time_us"] = r.first_time;
        j["last_time_us"] = r.last_time;
        j["events"] = r.kind_counts;
        j["keepalives"] = r.keepalives;
        j["verify_fails"] = r.verify_fails;
        j["policy_signals"] = r.policy_signals;
        j["nat_rebinds"] = r.nat_rebinds;
        j["flow_expiries"] = r.flow_expiries;
        j["lola_drops"] = r.lola_drops;
        j["injected"] = r.injected;
        j["drops_by_actor"] = r.drops_by_actor;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

}  // namespace mcp::harness
