#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcp/wire.hpp"

namespace mcp {

// Simulated time is integer microseconds.
using SimTime = int64_t;

inline constexpr SimTime kSecond = 1'000'000;

enum class EventKind {
    SENT,
    FORWARDED,
    DROPPED,
    DELIVERED,
    DELIVERED_FLAGGED,
    VERIFY_FAIL,
    STATE_TRANSITION,
    POLICY_SIGNAL,
    KEEPALIVE,
    INJECTED,
};

const char* event_kind_name(EventKind k);
bool event_kind_from_name(const std::string& name, EventKind& out);

// Header-level view of a packet; payload bytes never appear here.
struct PacketSummary {
    uint64_t cid = 0;
    uint32_t psn = 0;
    uint32_t pse = 0;
    wire::Flags flags;
    bool has_scratch = false;
    uint8_t scratch_type = 0;
    uint8_t scratch_mode = 0;
    Bytes scratch_value;
    size_t payload_len = 0;

    bool operator==(const PacketSummary&) const = default;
};

PacketSummary summarize(const wire::Packet& p);

struct TraceEvent {
    SimTime time = 0;
    std::string actor;
    EventKind kind = EventKind::SENT;
    bool has_packet = false;
    PacketSummary packet;
    std::string detail;

    bool operator==(const TraceEvent&) const = default;
};

using Trace = std::vector<TraceEvent>;

}  // namespace mcp
