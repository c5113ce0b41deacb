#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "mcp/cid.hpp"
#include "mcp/rng.hpp"
#include "mcp/trace.hpp"
#include "mcp/wire.hpp"

namespace mcp::pathdev {

enum class Direction { FORWARD, REVERSE };

inline Direction other(Direction d) {
    return d == Direction::FORWARD ? Direction::REVERSE : Direction::FORWARD;
}

struct FiveTuple {
    uint32_t src_addr = 0;
    uint32_t dst_addr = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint8_t proto = 17;

    FiveTuple reversed() const { return {dst_addr, src_addr, dst_port, src_port, proto}; }
    // Direction-independent form: the lexicographically smaller orientation.
    FiveTuple canonical() const;

    auto tie() const { return std::tie(src_addr, dst_addr, src_port, dst_port, proto); }
    bool operator==(const FiveTuple& o) const { return tie() == o.tie(); }
    bool operator<(const FiveTuple& o) const { return tie() < o.tie(); }
};

std::string tuple_str(const FiveTuple& t);

// ---------------------------------------------------------------------------
// Transport-independent flow state machine with three timeouts.
// The "zero" state is entry absence.

enum class FlowState { UNIFLOW, ASSOCIATING, ASSOCIATED, STOPWAIT, STOPPING };

const char* flow_state_name(FlowState s);

struct FlowTimeouts {
    SimTime idle = 30 * kSecond;
    SimTime associated = 300 * kSecond;
    SimTime stopping = 5 * kSecond;
};

struct FlowEntry {
    FlowState state = FlowState::UNIFLOW;
    Direction fwd_dir = Direction::FORWARD;  // direction of the first observed packet
    std::optional<uint32_t> fwd_max_psn;
    std::optional<uint32_t> rev_max_psn;
    bool stop_seen_fwd = false;
    bool stop_seen_rev = false;
    SimTime last_activity = 0;
};

SimTime flow_timeout(const FlowEntry& entry, const FlowTimeouts& timeouts);

struct ObserveOutcome {
    bool created = false;
    FlowState before = FlowState::UNIFLOW;
    FlowState after = FlowState::UNIFLOW;
    bool transitioned() const { return created || before != after; }
};

class FlowTable {
   public:
    explicit FlowTable(FlowTimeouts timeouts = {}) : timeouts_(timeouts) {}

    ObserveOutcome observe(uint64_t cid, const FiveTuple& tuple, Direction dir,
                           uint32_t psn, uint32_t pse, bool stop, SimTime now);

    // Removes entries idle past their timeout; returns how many expired.
    size_t expire(SimTime now);

    const FlowEntry* find(uint64_t cid, const FiveTuple& tuple) const;
    size_t size() const { return entries_.size(); }
    const FlowTimeouts& timeouts() const { return timeouts_; }

   private:
    using Key = std::pair<uint64_t, FiveTuple>;
    FlowTimeouts timeouts_;
    std::map<Key, FlowEntry> entries_;
};

// ---------------------------------------------------------------------------
// CID-based stateless load balancing.

// SERVER_ROUTED cids only: validates the embedded authenticator under lb_key
// and returns backend id mod backend_count; nullopt means DROP.
std::optional<uint32_t> lb_route(uint64_t cid_value, const cid::Key& lb_key,
                                 uint32_t backend_count);

// ---------------------------------------------------------------------------
// Loss/latency treatment queues.

struct LolaConfig {
    size_t capacity = 8;               // latency queue, packets
    SimTime latency_service_us = 200;  // per-packet service time
    SimTime loss_service_us = 1000;
};

enum class LolaQueue { LATENCY, LOSS };

struct ForwardDecision {
    bool dropped = false;
    LolaQueue queue = LolaQueue::LATENCY;
    SimTime depart_time = 0;
};

struct LolaQueues {
    LolaConfig config;
    SimTime latency_busy_until = 0;
    SimTime loss_busy_until = 0;
    size_t latency_drops = 0;
};

// lola-marked packets take the bounded latency queue (overflow drops);
// everything else takes the unbounded loss queue whose delay grows with
// backlog.
ForwardDecision lola_forward(LolaQueues& queues, bool lola_bit, SimTime now);

// ---------------------------------------------------------------------------
// Benign scratch-writing middlebox (path MTU assist).

// Lowers a WRITABLE MTU scratch value to min(value, device_mtu); READ_ONLY
// scratch is left untouched. Returns true if the packet was modified.
bool middlebox_write_scratch(wire::Packet& packet, uint16_t device_mtu);

// ---------------------------------------------------------------------------
// NAT with idle-expiring bindings.

struct NatConfig {
    SimTime binding_idle = 30 * kSecond;
    uint32_t external_addr = 0x0A000001;
    uint64_t seed = 0;
};

class Nat {
   public:
    explicit Nat(NatConfig config) : config_(config), rng_(mix64(config.seed)) {}

    // FORWARD packets get their source mapped to the external address and an
    // allocated port; REVERSE packets get their destination mapped back.
    // A forward packet arriving after binding expiry allocates a fresh
    // external port; a reverse packet with no live binding is unroutable
    // (nullopt = drop).
    std::optional<FiveTuple> rewrite(const FiveTuple& tuple, Direction dir, SimTime now);

    size_t rebind_count() const { return rebind_count_; }
    // Rebinds recorded since the last call.
    std::vector<std::pair<uint16_t, uint16_t>> take_rebinds();

   private:
    struct Binding {
        uint16_t external_port = 0;
        SimTime last_use = 0;
    };
    uint16_t allocate_port();

    NatConfig config_;
    Rng rng_;
    std::map<std::pair<uint32_t, uint16_t>, Binding> bindings_;  // internal -> binding
    std::map<uint16_t, std::pair<uint32_t, uint16_t>> reverse_;  // ext port -> internal
    size_t rebind_count_ = 0;
    std::vector<std::pair<uint16_t, uint16_t>> recent_rebinds_;
};

}  // namespace mcp::pathdev
