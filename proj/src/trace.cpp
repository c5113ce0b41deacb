#include "mcp/trace.hpp"

namespace mcp {

namespace {
struct KindName {
    EventKind kind;
    const char* name;
};
constexpr KindName kKindNames[] = {
    {EventKind::SENT, "SENT"},
    {EventKind::FORWARDED, "FORWARDED"},
    {EventKind::DROPPED, "DROPPED"},
    {EventKind::DELIVERED, "DELIVERED"},
    {EventKind::DELIVERED_FLAGGED, "DELIVERED_FLAGGED"},
    {EventKind::VERIFY_FAIL, "VERIFY_FAIL"},
    {EventKind::STATE_TRANSITION, "STATE_TRANSITION"},
    {EventKind::POLICY_SIGNAL, "POLICY_SIGNAL"},
    {EventKind::KEEPALIVE, "KEEPALIVE"},
    {EventKind::INJECTED, "INJECTED"},
};
}  // namespace

const char* event_kind_name(EventKind k) {
    for (const auto& kn : kKindNames)
        if (kn.kind == k) return kn.name;
    return "?";
}

bool event_kind_from_name(const std::string& name, EventKind& out) {
    for (const auto& kn : kKindNames) {
        if (name == kn.name) {
            out = kn.kind;
            return true;
        }
    }
    return false;
}

PacketSummary summarize(const wire::Packet& p) {
    PacketSummary s;
    s.cid = p.cid;
    s.psn = p.psn;
    s.pse = p.pse;
    s.flags = p.flags;
    if (p.scratch) {
        s.has_scratch = true;
        s.scratch_type = p.scratch->pcf_type;
        s.scratch_mode = static_cast<uint8_t>(p.scratch->mode);
        s.scratch_value = p.scratch->value;
    }
    s.payload_len = p.payload.size();
    return s;
}

}  // namespace mcp
