#include "mcp/endpoint.hpp"

namespace mcp::endpoint {

bool psn_newer(uint32_t reference, uint32_t candidate) {
    return wire::psn_newer(reference, candidate);
}

static uint64_t pick_cid(const CidMode& mode, Rng& rng) {
    switch (mode.kind) {
        case CidModeKind::RANDOM_STATIC:
            return rng();
        case CidModeKind::SERVER_ROUTED:
            return cid::make_routed(mode.lb_key, mode.backend_id, rng());
        case CidModeKind::HOTP_ROTATING:
            return cid::hotp(mode.cid_key, 0);
    }
    return 0;
}

ConnectionState open_connection(Role role, const CidMode& mode, uint64_t seed,
                                VerifyPolicy policy, const integrity::ConnectionKey& key) {
    Rng rng(seed);
    ConnectionState conn;
    conn.role = role;
    conn.cid_mode = mode;
    conn.next_psn = static_cast<uint32_t>(rand_range(rng, 1, 0xFFFFFFFFull));
    conn.current_cid = pick_cid(mode, rng);
    conn.key = key;
    conn.verify_policy = policy;
    return conn;
}

void rotate_cid(ConnectionState& conn) {
    if (conn.cid_mode.kind != CidModeKind::HOTP_ROTATING) return;
    ++conn.hotp_counter;
    conn.current_cid = cid::hotp(conn.cid_mode.cid_key, conn.hotp_counter);
}

Bytes frame_payload(const std::deque<PathSignal>& feedback, ByteView app_bytes) {
    Bytes out;
    out.push_back(static_cast<uint8_t>(feedback.size()));
    for (const PathSignal& fb : feedback) {
        out.push_back(fb.pcf_type);
        out.push_back(static_cast<uint8_t>(fb.observed_value.size()));
        out.insert(out.end(), fb.observed_value.begin(), fb.observed_value.end());
    }
    out.insert(out.end(), app_bytes.begin(), app_bytes.end());
    return out;
}

wire::Packet next_packet(ConnectionState& conn, ByteView app_payload,
                         const SendOptions& options) {
    if (!conn.open) throw StoppedConnection();

    wire::Packet p;
    p.flags.lola = options.lola;
    p.flags.stop = options.stop;
    p.cid = conn.current_cid;
    p.psn = conn.next_psn;
    p.pse = conn.highest_received_psn.value_or(0);
    if (options.scratch_request) {
        const ScratchRequest& req = *options.scratch_request;
        p.flags.extended = true;
        p.scratch = wire::ScratchSpace{req.pcf_type, req.mode, req.initial_value};
    }
    p.payload = frame_payload(conn.feedback_queue, app_payload);
    conn.feedback_queue.clear();
    p.tag = integrity::compute_tag(conn.key, p);

    if (++conn.next_psn == 0) conn.next_psn = 1;  // 0 is the "no echo" sentinel
    if (options.stop) conn.stop_sent = true;
    return p;
}

// The payload prefix carries echoed path signals; returns the items, or
// nothing if the framing is malformed.
static std::optional<std::vector<PathSignal>> parse_feedback(const Bytes& payload) {
    if (payload.empty()) return std::nullopt;
    std::vector<PathSignal> items;
    size_t off = 1;
    for (uint8_t i = 0; i < payload[0]; ++i) {
        if (off + 2 > payload.size()) return std::nullopt;
        PathSignal s;
        s.pcf_type = payload[off];
        uint8_t len = payload[off + 1];
        off += 2;
        if (off + len > payload.size()) return std::nullopt;
        s.observed_value.assign(payload.begin() + off, payload.begin() + off + len);
        off += len;
        items.push_back(std::move(s));
    }
    return items;
}

AcceptResult accept_packet(ConnectionState& conn, const wire::Packet& packet) {
    AcceptResult result;
    if (integrity::verify(conn.key, packet) == integrity::VerifyResult::FAIL) {
        result.events.push_back({0, "", EventKind::VERIFY_FAIL, true, summarize(packet), ""});
        if (conn.verify_policy == VerifyPolicy::HARD_FAIL) {
            result.decision = AcceptDecision::DROPPED;
        } else {
            result.decision = AcceptDecision::DELIVERED_FLAGGED;
            result.events.push_back(
                {0, "", EventKind::DELIVERED_FLAGGED, true, summarize(packet), ""});
        }
        return result;
    }

    if (!conn.highest_received_psn || psn_newer(*conn.highest_received_psn, packet.psn))
        conn.highest_received_psn = packet.psn;
    if (packet.flags.stop) conn.stop_received = true;

    if (packet.scratch && packet.scratch->pcf_type == wire::kPcfMtu) {
        conn.feedback_queue.push_back(
            {packet.scratch->pcf_type, packet.scratch->value, conn.role});
    }

    if (auto fb = parse_feedback(packet.payload)) {
        for (const PathSignal& item : *fb) {
            if (item.pcf_type == wire::kPcfMtu && item.observed_value.size() == 2)
                conn.learned_path_mtu = get_u16(item.observed_value.data());
        }
    }

    result.decision = AcceptDecision::DELIVERED;
    result.events.push_back({0, "", EventKind::DELIVERED, true, summarize(packet), ""});
    return result;
}

wire::Packet signal_stop(ConnectionState& conn) {
    SendOptions opt;
    opt.stop = true;
    return next_packet(conn, {}, opt);
}

}  // namespace mcp::endpoint
