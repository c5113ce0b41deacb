#include "mcp/pathdev.hpp"

#include <algorithm>
#include <sstream>

namespace mcp::pathdev {

FiveTuple FiveTuple::canonical() const {
    FiveTuple rev = reversed();
    return tie() < rev.tie() ? *this : rev;
}

std::string tuple_str(const FiveTuple& t) {
    std::ostringstream os;
    os << t.src_addr << ":" << t.src_port << ">" << t.dst_addr << ":" << t.dst_port << "/"
       << int(t.proto);
    return os.str();
}

const char* flow_state_name(FlowState s) {
    switch (s) {
        case FlowState::UNIFLOW: return "UNIFLOW";
        case FlowState::ASSOCIATING: return "ASSOCIATING";
        case FlowState::ASSOCIATED: return "ASSOCIATED";
        case FlowState::STOPWAIT: return "STOPWAIT";
        case FlowState::STOPPING: return "STOPPING";
    }
    return "?";
}

SimTime flow_timeout(const FlowEntry& entry, const FlowTimeouts& t) {
    switch (entry.state) {
        case FlowState::UNIFLOW:
        case FlowState::ASSOCIATING: return t.idle;
        case FlowState::ASSOCIATED:
        case FlowState::STOPWAIT: return t.associated;
        case FlowState::STOPPING: return t.stopping;
    }
    return t.idle;
}

ObserveOutcome FlowTable::observe(uint64_t cid, const FiveTuple& tuple, Direction dir,
                                  uint32_t psn, uint32_t pse, bool stop, SimTime now) {
    Key key{cid, tuple.canonical()};
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        FlowEntry entry;
        entry.fwd_dir = dir;
        entry.fwd_max_psn = psn;
        if (stop) entry.stop_seen_fwd = true;
        entry.last_activity = now;
        entries_.emplace(key, entry);
        ObserveOutcome out;
        out.created = true;
        out.after = FlowState::UNIFLOW;
        return out;
    }

    FlowEntry& e = it->second;
    ObserveOutcome out;
    out.before = e.state;
    bool is_fwd = (dir == e.fwd_dir);

    // Association transitions check pse against the opposite direction's
    // previously observed PSNs, before this packet updates the maxima.
    if (e.state == FlowState::UNIFLOW && !is_fwd && pse != 0 && e.fwd_max_psn &&
        wire::psn_in_window(*e.fwd_max_psn, pse)) {
        e.state = FlowState::ASSOCIATING;
    } else if (e.state == FlowState::ASSOCIATING && is_fwd && pse != 0 && e.rev_max_psn &&
               wire::psn_in_window(*e.rev_max_psn, pse)) {
        e.state = FlowState::ASSOCIATED;
    }

    auto& max_psn = is_fwd ? e.fwd_max_psn : e.rev_max_psn;
    if (!max_psn || wire::psn_newer(*max_psn, psn)) max_psn = psn;

    if (stop) (is_fwd ? e.stop_seen_fwd : e.stop_seen_rev) = true;

    if (e.state == FlowState::ASSOCIATED || e.state == FlowState::STOPWAIT) {
        if (e.stop_seen_fwd && e.stop_seen_rev)
            e.state = FlowState::STOPPING;
        else if (e.state == FlowState::ASSOCIATED && (e.stop_seen_fwd || e.stop_seen_rev))
            e.state = FlowState::STOPWAIT;
    }

    e.last_activity = std::max(e.last_activity, now);
    out.after = e.state;
    return out;
}

size_t FlowTable::expire(SimTime now) {
    size_t expired = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (now - it->second.last_activity > flow_timeout(it->second, timeouts_)) {
            it = entries_.erase(it);
            ++expired;
        } else {
            ++it;
        }
    }
    return expired;
}

const FlowEntry* FlowTable::find(uint64_t cid, const FiveTuple& tuple) const {
    auto it = entries_.find({cid, tuple.canonical()});
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<uint32_t> lb_route(uint64_t cid_value, const cid::Key& lb_key,
                                 uint32_t backend_count) {
    if (!cid::routed_valid(lb_key, cid_value)) return std::nullopt;
    return cid::routed_backend(cid_value) % backend_count;
}

ForwardDecision lola_forward(LolaQueues& q, bool lola_bit, SimTime now) {
    ForwardDecision d;
    if (lola_bit) {
        d.queue = LolaQueue::LATENCY;
        SimTime backlog = std::max<SimTime>(0, q.latency_busy_until - now);
        size_t occupancy = static_cast<size_t>(
            (backlog + q.config.latency_service_us - 1) / q.config.latency_service_us);
        if (occupancy >= q.config.capacity) {
            d.dropped = true;
            ++q.latency_drops;
            return d;
        }
        d.depart_time = std::max(now, q.latency_busy_until) + q.config.latency_service_us;
        q.latency_busy_until = d.depart_time;
    } else {
        d.queue = LolaQueue::LOSS;
        d.depart_time = std::max(now, q.loss_busy_until) + q.config.loss_service_us;
        q.loss_busy_until = d.depart_time;
    }
    return d;
}

bool middlebox_write_scratch(wire::Packet& packet, uint16_t device_mtu) {
    if (!packet.scratch || packet.scratch->pcf_type != wire::kPcfMtu) return false;
    if (packet.scratch->mode != wire::IntegrityMode::WRITABLE) return false;
    if (packet.scratch->value.size() != 2) return false;
    uint16_t value = wire::scratch_mtu_value(*packet.scratch);
    if (device_mtu >= value) return false;
    packet.scratch->value = wire::mtu_scratch_bytes(device_mtu);
    return true;
}

uint16_t Nat::allocate_port() {
    for (;;) {
        auto port = static_cast<uint16_t>(rand_range(rng_, 1024, 65535));
        if (!reverse_.contains(port)) return port;
    }
}

std::optional<FiveTuple> Nat::rewrite(const FiveTuple& tuple, Direction dir, SimTime now) {
    if (dir == Direction::FORWARD) {
        std::pair<uint32_t, uint16_t> internal{tuple.src_addr, tuple.src_port};
        auto it = bindings_.find(internal);
        if (it != bindings_.end() && now - it->second.last_use > config_.binding_idle) {
            // Idle binding: a rebind allocates a fresh external port.
            uint16_t old_port = it->second.external_port;
            reverse_.erase(old_port);
            bindings_.erase(it);
            it = bindings_.end();
            uint16_t fresh = allocate_port();
            bindings_[internal] = {fresh, now};
            reverse_[fresh] = internal;
            ++rebind_count_;
            recent_rebinds_.emplace_back(old_port, fresh);
        } else if (it == bindings_.end()) {
            uint16_t port = allocate_port();
            bindings_[internal] = {port, now};
            reverse_[port] = internal;
        } else {
            it->second.last_use = now;
        }
        FiveTuple out = tuple;
        out.src_addr = config_.external_addr;
        out.src_port = bindings_[internal].external_port;
        return out;
    }

    // Reverse: destination is the external mapping.
    auto rit = reverse_.find(tuple.dst_port);
    if (rit == reverse_.end() || tuple.dst_addr != config_.external_addr) return std::nullopt;
    auto bit = bindings_.find(rit->second);
    if (bit == bindings_.end() || now - bit->second.last_use > config_.binding_idle)
        return std::nullopt;
    bit->second.last_use = now;
    FiveTuple out = tuple;
    out.dst_addr = rit->second.first;
    out.dst_port = rit->second.second;
    return out;
}

std::vector<std::pair<uint16_t, uint16_t>> Nat::take_rebinds() {
    auto out = std::move(recent_rebinds_);
    recent_rebinds_.clear();
    return out;
}

}  // namespace mcp::pathdev
