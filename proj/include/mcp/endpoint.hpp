#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>

#include "mcp/cid.hpp"
#include "mcp/integrity.hpp"
#include "mcp/rng.hpp"
#include "mcp/trace.hpp"
#include "mcp/wire.hpp"

namespace mcp::endpoint {

enum class Role { CLIENT, SERVER };

enum class VerifyPolicy { HARD_FAIL, DELIVER_WITH_FLAG };

enum class CidModeKind { RANDOM_STATIC, SERVER_ROUTED, HOTP_ROTATING };

struct CidMode {
    CidModeKind kind = CidModeKind::RANDOM_STATIC;
    cid::Key cid_key{};      // HOTP_ROTATING
    cid::Key lb_key{};       // SERVER_ROUTED
    uint8_t backend_id = 0;  // SERVER_ROUTED
};

// One signal observed from the path, queued for (encrypted) echo to the peer.
struct PathSignal {
    uint8_t pcf_type = 0;
    Bytes observed_value;
    Role observed_by = Role::CLIENT;

    bool operator==(const PathSignal&) const = default;
};

struct ConnectionState {
    Role role = Role::CLIENT;
    CidMode cid_mode;
    uint64_t current_cid = 0;
    uint64_t hotp_counter = 0;  // HOTP_ROTATING only
    uint32_t next_psn = 1;
    std::optional<uint32_t> highest_received_psn;
    integrity::ConnectionKey key;
    VerifyPolicy verify_policy = VerifyPolicy::HARD_FAIL;
    bool stop_sent = false;
    bool stop_received = false;
    bool open = true;
    std::deque<PathSignal> feedback_queue;
    std::optional<uint16_t> learned_path_mtu;
};

struct ScratchRequest {
    uint8_t pcf_type = 0;
    wire::IntegrityMode mode = wire::IntegrityMode::READ_ONLY;
    Bytes initial_value;
};

struct SendOptions {
    bool lola = false;
    bool stop = false;
    std::optional<ScratchRequest> scratch_request;
};

enum class AcceptDecision { DELIVERED, DELIVERED_FLAGGED, DROPPED };

struct AcceptResult {
    AcceptDecision decision = AcceptDecision::DELIVERED;
    // Kind/packet/detail are filled here; the harness stamps time and actor.
    std::vector<TraceEvent> events;
};

struct StoppedConnection : std::runtime_error {
    StoppedConnection() : std::runtime_error("connection torn down") {}
};

// PSN "newer" in a modular window of 2^16 above the reference.
bool psn_newer(uint32_t reference, uint32_t candidate);

// Seeded and deterministic: identical arguments give identical state.
ConnectionState open_connection(Role role, const CidMode& mode, uint64_t seed,
                                VerifyPolicy policy, const integrity::ConnectionKey& key);

// Advance the HOTP counter after an address change; no-op for other modes.
void rotate_cid(ConnectionState& conn);

// Payload layout produced by this endpoint: a one-byte feedback item count,
// then per item {type, len, value}, then the application bytes.
Bytes frame_payload(const std::deque<PathSignal>& feedback, ByteView app_bytes);

wire::Packet next_packet(ConnectionState& conn, ByteView app_payload,
                         const SendOptions& options = {});

AcceptResult accept_packet(ConnectionState& conn, const wire::Packet& packet);

// next_packet with the stop flag and an empty application payload.
wire::Packet signal_stop(ConnectionState& conn);

}  // namespace mcp::endpoint
