#include "mcp/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

#include "mcp/pathdev.hpp"
#include "mcp/rng.hpp"

namespace mcp::harness {

using nlohmann::json;
using pathdev::Direction;
using pathdev::FiveTuple;
using pathdev::flow_state_name;

namespace {

constexpr uint32_t kClientAddr = 0x0A000002;
constexpr uint32_t kServerAddr = 0x08080808;
constexpr uint16_t kClientPort = 40000;
constexpr uint16_t kServerPort = 443;

cid::Key derive_key(uint64_t seed, uint64_t salt) {
    Rng rng(derive_seed(seed, salt));
    cid::Key k;
    for (auto& b : k) b = uint8_t(rng() & 0xFF);
    return k;
}

struct Event {
    SimTime time;
    uint64_t seq;
    std::function<void()> fn;
};
struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
};

struct Transit {
    wire::Packet pkt;
    Direction dir = Direction::FORWARD;
    FiveTuple tuple;
    int link = 0;  // next link to cross; link i sits between node i and i+1
};

struct DeviceState {
    DeviceConfig cfg;
    std::optional<pathdev::Nat> nat;
    std::optional<pathdev::FlowTable> flows;
    pathdev::LolaQueues lola;
    std::set<uint64_t> advertised;  // gate: cids already notified
};

struct EndpointState {
    endpoint::ConnectionState conn;
    const EndpointConfig* cfg = nullptr;
    std::string name;
    Rng rng{0};
    uint64_t data_sent = 0;
    SimTime last_tx = 0;
    bool reply_tuple_known = false;
    FiveTuple reply_tuple;  // where this endpoint addresses its packets
};

struct TapMemory {
    bool seen = false;
    uint64_t cid = 0;
    uint32_t psn = 0;
    uint32_t pse = 0;
    FiveTuple tuple;
};

class Sim {
   public:
    explicit Sim(const ScenarioConfig& cfg) : cfg_(cfg) {}

    SimResult run();

   private:
    void push(SimTime t, std::function<void()> fn) {
        queue_.push({t, next_seq_++, std::move(fn)});
    }
    void emit(SimTime t, const std::string& actor, EventKind kind, const wire::Packet* pkt,
              const std::string& detail) {
        TraceEvent ev;
        ev.time = t;
        ev.actor = actor;
        ev.kind = kind;
        if (pkt) {
            ev.has_packet = true;
            ev.packet = summarize(*pkt);
        }
        ev.detail = detail;
        result_.trace.push_back(std::move(ev));
    }

    std::string device_actor(size_t i) const;
    void launch(SimTime t, const wire::Packet& pkt, Direction dir, const FiveTuple& tuple);
    void hop(SimTime t, Transit tr);
    // Returns extra delay imposed at the tap, or nullopt if the packet died there.
    std::optional<SimTime> apply_tap(SimTime t, Transit& tr);
    void arrive_device(SimTime t, Transit tr, size_t dev);
    void arrive_endpoint(SimTime t, Transit tr);
    void send_data(EndpointState& ep, SimTime t);
    void send_keepalive_check(EndpointState& ep, SimTime t);
    void send_stop(EndpointState& ep, SimTime t);
    void send_from(EndpointState& ep, SimTime t, const wire::Packet& pkt);
    void expiry_sweep(SimTime t);
    void inject_stops(SimTime t);
    void advertise_policy(SimTime t, const observer::CoercePolicy& policy, const Transit& tr,
                          int links_back, std::set<uint64_t>& advertised);

    SimTime jittered_interval(const TrafficConfig& t, Rng& rng) const;

    const ScenarioConfig& cfg_;
    SimResult result_;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
    uint64_t next_seq_ = 0;
    SimTime end_ = 0;

    EndpointState client_, server_;
    std::vector<DeviceState> devices_;
    cid::Key lb_key_{};

    std::optional<observer::TwoPointExfil> exfil_;
    Rng attacker_rng_{0};
    std::set<uint64_t> coerce_advertised_;
    std::map<std::pair<int, Direction>, TapMemory> tap_memory_;
};

std::string Sim::device_actor(size_t i) const {
    static const char* names[] = {"nat", "stateful", "lb", "lola", "mtu_writer", "gate"};
    return "dev" + std::to_string(i + 1) + ":" + names[int(devices_[i].cfg.type)];
}

SimTime Sim::jittered_interval(const TrafficConfig& t, Rng& rng) const {
    SimTime base = SimTime(1e6 / t.packet_rate_pps);
    if (t.jitter_us <= 0) return std::max<SimTime>(1, base);
    SimTime j = SimTime(rand_unit(rng) * 2 * t.jitter_us) - SimTime(t.jitter_us);
    return std::max<SimTime>(1, base + j);
}

void Sim::launch(SimTime t, const wire::Packet& pkt, Direction dir, const FiveTuple& tuple) {
    Transit tr{pkt, dir, tuple, 0};
    tr.link = dir == Direction::FORWARD ? 0 : int(devices_.size());
    hop(t, tr);
}

std::optional<SimTime> Sim::apply_tap(SimTime t, Transit& tr) {
    if (!cfg_.attacker) return 0;
    const AttackerConfig& atk = *cfg_.attacker;
    auto tap_it = std::find(atk.taps.begin(), atk.taps.end(), tr.link);
    if (tap_it == atk.taps.end()) return 0;
    size_t tap_idx = size_t(tap_it - atk.taps.begin());
    SimTime extra = 0;

    using AT = AttackerConfig::Type;
    if (exfil_ && tr.dir == Direction::FORWARD) {
        if (tap_idx == 0) {
            Bytes covert(atk.covert_len);
            for (auto& b : covert) b = uint8_t(attacker_rng_() & 0xFF);
            if (exfil_->ingress(tr.pkt, covert)) result_.exfil_sent.push_back(covert);
        } else if (atk.type != AT::EXFIL_PSN_NORESTORE) {
            if (auto got = exfil_->egress(tr.pkt)) result_.exfil_received.push_back(*got);
        }
    }
    bool dropped = false;
    if (atk.type == AT::COERCE && tr.dir == Direction::FORWARD) {
        advertise_policy(t, atk.coerce, tr, tr.link + 1, coerce_advertised_);
        auto d = observer::coerce_gate(tr.pkt, atk.coerce);
        if (d.action == observer::GateDecision::Action::DROP) {
            emit(t, "attacker", EventKind::DROPPED, &tr.pkt, "gate policy");
            ++result_.attacker_drops;
            dropped = true;
        } else if (d.action == observer::GateDecision::Action::DELAY) {
            extra = d.extra_delay;
        }
    }

    // Passive observation, after any manipulation at this point.
    result_.tap_records.push_back(observer::observe(t, tr.link, tr.dir, tr.tuple, tr.pkt));
    TapMemory& mem = tap_memory_[{tr.link, tr.dir}];
    mem.seen = true;
    mem.cid = tr.pkt.cid;
    mem.psn = tr.pkt.psn;
    mem.pse = tr.pkt.pse;
    mem.tuple = tr.tuple;

    if (dropped) return std::nullopt;
    return extra;
}

void Sim::hop(SimTime t, Transit tr) {
    auto extra = apply_tap(t, tr);
    if (!extra) return;

    SimTime arrival = t + *extra + cfg_.link_delay_us;
    bool to_device = tr.dir == Direction::FORWARD ? tr.link < int(devices_.size()) : tr.link >= 1;
    size_t dev = tr.dir == Direction::FORWARD ? size_t(tr.link) : size_t(tr.link - 1);
    if (to_device)
        push(arrival, [this, arrival, tr, dev]() { arrive_device(arrival, tr, dev); });
    else
        push(arrival, [this, arrival, tr]() { arrive_endpoint(arrival, tr); });
}

void Sim::advertise_policy(SimTime t, const observer::CoercePolicy& policy, const Transit& tr,
                           int links_back, std::set<uint64_t>& advertised) {
    if (!policy.advertise) return;
    if (advertised.count(tr.pkt.cid)) return;
    advertised.insert(tr.pkt.cid);
    SimTime back = t + links_back * cfg_.link_delay_us;
    std::string actor = tr.dir == Direction::FORWARD ? "client" : "server";
    std::string detail =
        "scratch pcf_type " + std::to_string(policy.required_pcf) + " required on path";
    push(back, [this, back, actor, detail]() {
        emit(back, actor, EventKind::POLICY_SIGNAL, nullptr, detail);
    });
}

void Sim::arrive_device(SimTime t, Transit tr, size_t dev) {
    DeviceState& d = devices_[dev];
    std::string actor = device_actor(dev);
    SimTime depart = t;

    switch (d.cfg.type) {
        case DeviceConfig::Type::NAT: {
            auto rewritten = d.nat->rewrite(tr.tuple, tr.dir, t);
            for (auto [oldp, newp] : d.nat->take_rebinds()) {
                emit(t, actor, EventKind::STATE_TRANSITION, nullptr,
                     "REBIND " + std::to_string(oldp) + "->" + std::to_string(newp));
                ++result_.nat_rebinds;
            }
            if (!rewritten) {
                emit(t, actor, EventKind::DROPPED, &tr.pkt, "no binding");
                return;
            }
            tr.tuple = *rewritten;
            emit(t, actor, EventKind::FORWARDED, &tr.pkt, "");
            break;
        }
        case DeviceConfig::Type::STATEFUL: {
            auto out = d.flows->observe(tr.pkt.cid, tr.tuple, tr.dir, tr.pkt.psn, tr.pkt.pse,
                                        tr.pkt.flags.stop, t);
            if (out.transitioned()) {
                std::string detail = out.created
                                         ? std::string("NEW ") + flow_state_name(out.after)
                                         : std::string(flow_state_name(out.before)) + "->" +
                                               flow_state_name(out.after);
                emit(t, actor, EventKind::STATE_TRANSITION, &tr.pkt, detail);
            }
            emit(t, actor, EventKind::FORWARDED, &tr.pkt, "");
            break;
        }
        case DeviceConfig::Type::LB: {
            if (tr.dir == Direction::FORWARD) {
                auto backend = pathdev::lb_route(tr.pkt.cid, lb_key_, d.cfg.backend_count);
                if (!backend) {
                    emit(t, actor, EventKind::DROPPED, &tr.pkt, "cid authenticator invalid");
                    return;
                }
                emit(t, actor, EventKind::FORWARDED, &tr.pkt,
                     "backend " + std::to_string(*backend));
            } else {
                emit(t, actor, EventKind::FORWARDED, &tr.pkt, "");
            }
            break;
        }
        case DeviceConfig::Type::LOLA: {
            auto fd = pathdev::lola_forward(d.lola, tr.pkt.flags.lola, t);
            if (fd.dropped) {
                emit(t, actor, EventKind::DROPPED, &tr.pkt, "latency queue full");
                return;
            }
            depart = fd.depart_time;
            emit(t, actor, EventKind::FORWARDED, &tr.pkt,
                 std::string(fd.queue == pathdev::LolaQueue::LATENCY ? "latency" : "loss") +
                     " queue delay=" + std::to_string(depart - t));
            break;
        }
        case DeviceConfig::Type::MTU_WRITER: {
            bool wrote = pathdev::middlebox_write_scratch(tr.pkt, d.cfg.mtu);
            emit(t, actor, EventKind::FORWARDED, &tr.pkt, wrote ? "mtu written" : "");
            break;
        }
        case DeviceConfig::Type::GATE: {
            if (tr.dir == Direction::FORWARD) {
                advertise_policy(t, d.cfg.gate, tr, int(dev) + 1, d.advertised);
                auto gd = observer::coerce_gate(tr.pkt, d.cfg.gate);
                if (gd.action == observer::GateDecision::Action::DROP) {
                    emit(t, actor, EventKind::DROPPED, &tr.pkt, "gate policy");
                    return;
                }
                if (gd.action == observer::GateDecision::Action::DELAY) depart = t + gd.extra_delay;
            }
            emit(t, actor, EventKind::FORWARDED, &tr.pkt, "");
            break;
        }
    }

    tr.link += tr.dir == Direction::FORWARD ? 1 : -1;
    push(depart, [this, depart, tr]() { hop(depart, tr); });
}

void Sim::arrive_endpoint(SimTime t, Transit tr) {
    EndpointState& ep = tr.dir == Direction::FORWARD ? server_ : client_;
    auto res = endpoint::accept_packet(ep.conn, tr.pkt);
    for (TraceEvent ev : res.events) {
        ev.time = t;
        ev.actor = ep.name;
        result_.trace.push_back(std::move(ev));
    }
    if (res.decision == endpoint::AcceptDecision::DROPPED)
        emit(t, ep.name, EventKind::DROPPED, &tr.pkt, "verification failed");
    if (res.decision != endpoint::AcceptDecision::DELIVERED) return;

    ep.reply_tuple = tr.tuple.reversed();
    ep.reply_tuple_known = true;

    // Payload beyond the feedback framing is application data; reply if asked.
    if (ep.cfg->traffic.respond_to_data && !ep.conn.stop_sent && tr.pkt.payload.size() > 1) {
        wire::Packet reply = endpoint::next_packet(ep.conn, {});
        emit(t, ep.name, EventKind::SENT, &reply, "reply");
        send_from(ep, t, reply);
    }
}

void Sim::send_from(EndpointState& ep, SimTime t, const wire::Packet& pkt) {
    bool is_client = &ep == &client_;
    Direction dir = is_client ? Direction::FORWARD : Direction::REVERSE;
    FiveTuple tuple = is_client
                          ? FiveTuple{kClientAddr, kServerAddr, kClientPort, kServerPort, 17}
                          : ep.reply_tuple;
    ep.last_tx = t;
    launch(t, pkt, dir, tuple);
}

void Sim::send_data(EndpointState& ep, SimTime t) {
    const TrafficConfig& tc = ep.cfg->traffic;
    SimTime data_end = tc.data_duration_s < 0 ? end_ : SimTime(tc.data_duration_s * kSecond);
    if (t > std::min(end_, data_end)) return;
    if (ep.conn.stop_sent) return;
    if (tc.max_packets && ep.data_sent >= tc.max_packets) return;

    bool is_client = &ep == &client_;
    if (is_client || ep.reply_tuple_known) {
        size_t len = tc.payload_len.kind == PayloadDist::Kind::FIXED
                         ? tc.payload_len.a
                         : size_t(rand_range(ep.rng, tc.payload_len.a, tc.payload_len.b));
        Bytes app(len);
        for (auto& b : app) b = uint8_t(ep.rng() & 0xFF);
        endpoint::SendOptions opt;
        opt.lola = tc.lola_prob > 0 && rand_bernoulli(ep.rng, tc.lola_prob);
        if (tc.scratch)
            opt.scratch_request = endpoint::ScratchRequest{tc.scratch->pcf_type, tc.scratch->mode,
                                                           tc.scratch->value};
        wire::Packet pkt = endpoint::next_packet(ep.conn, app, opt);
        emit(t, ep.name, EventKind::SENT, &pkt, "");
        ++ep.data_sent;
        send_from(ep, t, pkt);
    }

    SimTime next = t + jittered_interval(tc, ep.rng);
    push(next, [this, &ep, next]() { send_data(ep, next); });
}

void Sim::send_keepalive_check(EndpointState& ep, SimTime t) {
    if (t > end_ || ep.conn.stop_sent) return;
    SimTime interval = SimTime(ep.cfg->traffic.keepalive_interval_s * kSecond);
    SimTime next;
    if (t - ep.last_tx >= interval) {
        bool is_client = &ep == &client_;
        if (is_client || ep.reply_tuple_known) {
            wire::Packet pkt = endpoint::next_packet(ep.conn, {});
            emit(t, ep.name, EventKind::KEEPALIVE, &pkt, "");
            send_from(ep, t, pkt);
        }
        next = t + interval;
    } else {
        next = ep.last_tx + interval;
    }
    push(next, [this, &ep, next]() { send_keepalive_check(ep, next); });
}

void Sim::send_stop(EndpointState& ep, SimTime t) {
    if (ep.conn.stop_sent) return;
    if (&ep != &client_ && !ep.reply_tuple_known) return;
    wire::Packet pkt = endpoint::signal_stop(ep.conn);
    emit(t, ep.name, EventKind::SENT, &pkt, "stop");
    send_from(ep, t, pkt);
}

void Sim::expiry_sweep(SimTime t) {
    for (size_t i = 0; i < devices_.size(); ++i) {
        if (!devices_[i].flows) continue;
        size_t n = devices_[i].flows->expire(t);
        if (n) {
            emit(t, device_actor(i), EventKind::STATE_TRANSITION, nullptr,
                 "EXPIRED " + std::to_string(n));
            result_.flow_expiries += n;
        }
    }
    SimTime next = t + kSecond;
    if (next <= end_) push(next, [this, next]() { expiry_sweep(next); });
}

void Sim::inject_stops(SimTime t) {
    const AttackerConfig& atk = *cfg_.attacker;
    for (size_t k = 0; k < atk.taps.size(); ++k) {
        int tap = atk.taps[k];
        Direction dir = atk.inject_directions[k];
        auto it = tap_memory_.find({tap, dir});
        if (it == tap_memory_.end() || !it->second.seen) continue;
        TapMemory mem = it->second;
        for (int n = 0; n < atk.inject_count; ++n) {
            SimTime when = t + n * 1000;
            wire::Packet forged =
                observer::make_forged_stop(mem.cid, mem.psn + 1 + uint32_t(n), mem.pse);
            push(when, [this, when, forged, dir, tap, mem]() {
                emit(when, "attacker", EventKind::INJECTED, &forged, "forged stop");
                Transit tr{forged, dir, mem.tuple, tap};
                hop(when, tr);
            });
        }
    }
}

SimResult Sim::run() {
    end_ = SimTime(cfg_.duration_s * kSecond);

    // Deterministic key material shared by the endpoints and path devices.
    integrity::ConnectionKey conn_key{derive_key(cfg_.seed, 1)};
    cid::Key cid_key = derive_key(cfg_.seed, 2);
    lb_key_ = derive_key(cfg_.seed, 3);

    endpoint::CidMode mode;
    mode.kind = cfg_.client.cid_mode;
    mode.cid_key = cid_key;
    mode.lb_key = lb_key_;
    mode.backend_id = cfg_.server.backend_id;

    client_.conn =
        endpoint::open_connection(endpoint::Role::CLIENT, mode, derive_seed(cfg_.seed, 30),
                                  cfg_.client.verify_policy, conn_key);
    server_.conn =
        endpoint::open_connection(endpoint::Role::SERVER, mode, derive_seed(cfg_.seed, 31),
                                  cfg_.server.verify_policy, conn_key);
    server_.conn.current_cid = client_.conn.current_cid;  // one cid per connection
    server_.conn.hotp_counter = client_.conn.hotp_counter;
    client_.cfg = &cfg_.client;
    server_.cfg = &cfg_.server;
    client_.name = "client";
    server_.name = "server";
    client_.rng.seed(derive_seed(cfg_.seed, 40));
    server_.rng.seed(derive_seed(cfg_.seed, 41));
    attacker_rng_.seed(derive_seed(cfg_.seed, 42));

    for (size_t i = 0; i < cfg_.path.size(); ++i) {
        DeviceState d;
        d.cfg = cfg_.path[i];
        switch (d.cfg.type) {
            case DeviceConfig::Type::NAT:
                d.nat.emplace(pathdev::NatConfig{SimTime(d.cfg.binding_idle_s * kSecond),
                                                 0x0A000001, derive_seed(cfg_.seed, 50 + i)});
                break;
            case DeviceConfig::Type::STATEFUL:
                d.flows.emplace(pathdev::FlowTimeouts{SimTime(d.cfg.idle_s * kSecond),
                                                      SimTime(d.cfg.associated_s * kSecond),
                                                      SimTime(d.cfg.stopping_s * kSecond)});
                break;
            case DeviceConfig::Type::LOLA:
                d.lola.config = d.cfg.lola;
                break;
            default:
                break;
        }
        devices_.push_back(std::move(d));
    }

    if (cfg_.attacker) {
        using AT = AttackerConfig::Type;
        switch (cfg_.attacker->type) {
            case AT::EXFIL_SCRATCH:
                exfil_.emplace(observer::ExfilChannelKind::WRITABLE_SCRATCH);
                break;
            case AT::EXFIL_PSN:
            case AT::EXFIL_PSN_NORESTORE:
                exfil_.emplace(observer::ExfilChannelKind::PROTECTED_PSN);
                break;
            default:
                break;
        }
        if (cfg_.attacker->type == AT::INJECT_STOP) {
            SimTime t = SimTime(cfg_.attacker->inject_time_s * kSecond);
            push(t, [this, t]() { inject_stops(t); });
        }
    }

    emit(0, "config", EventKind::STATE_TRANSITION, nullptr,
         "digest=" + config_digest(cfg_) + " seed=" + std::to_string(cfg_.seed));

    if (cfg_.client.traffic.packet_rate_pps > 0) push(0, [this]() { send_data(client_, 0); });
    if (cfg_.server.traffic.packet_rate_pps > 0) push(0, [this]() { send_data(server_, 0); });
    if (cfg_.client.traffic.keepalive_interval_s > 0) {
        SimTime iv = SimTime(cfg_.client.traffic.keepalive_interval_s * kSecond);
        push(iv, [this, iv]() { send_keepalive_check(client_, iv); });
    }
    if (cfg_.server.traffic.keepalive_interval_s > 0) {
        SimTime iv = SimTime(cfg_.server.traffic.keepalive_interval_s * kSecond);
        push(iv, [this, iv]() { send_keepalive_check(server_, iv); });
    }
    if (cfg_.client.traffic.stop_time_s >= 0) {
        SimTime t = SimTime(cfg_.client.traffic.stop_time_s * kSecond);
        push(t, [this, t]() { send_stop(client_, t); });
    }
    if (cfg_.server.traffic.stop_time_s >= 0) {
        SimTime t = SimTime(cfg_.server.traffic.stop_time_s * kSecond);
        push(t, [this, t]() { send_stop(server_, t); });
    }
    if (!devices_.empty()) push(kSecond, [this]() { expiry_sweep(kSecond); });

    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        ev.fn();
    }

    std::stable_sort(result_.trace.begin(), result_.trace.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; });
    result_.client = client_.conn;
    result_.server = server_.conn;
    return result_;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSONL trace serialization.

static json flags_to_json(const wire::Flags& f) {
    return json{{"l", f.lola}, {"r", f.resume}, {"s", f.stop}, {"x", f.extended}};
}

static json event_to_json(const TraceEvent& ev) {
    json j;
    j["t"] = ev.time;
    j["actor"] = ev.actor;
    j["kind"] = event_kind_name(ev.kind);
    j["detail"] = ev.detail;
    if (ev.has_packet) {
        const PacketSummary& p = ev.packet;
        json pj;
        pj["cid"] = p.cid;
        pj["psn"] = p.psn;
        pj["pse"] = p.pse;
        pj["flags"] = flags_to_json(p.flags);
        if (p.has_scratch) {
            pj["scratch"] = json{{"type", p.scratch_type},
                                 {"mode", p.scratch_mode},
                                 {"value_hex", to_hex(p.scratch_value)}};
        }
        pj["plen"] = p.payload_len;
        j["pkt"] = pj;
    }
    return j;
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (const TraceEvent& ev : trace) {
        out += event_to_json(ev).dump();
        out += '\n';
    }
    return out;
}

void write_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open trace file '" + path + "' for writing");
    out << trace_to_jsonl(trace);
}

Trace trace_from_jsonl(std::istream& in) {
    Trace trace;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            TraceEvent ev;
            ev.time = j.at("t").get<SimTime>();
            ev.actor = j.at("actor").get<std::string>();
            std::string kind = j.at("kind").get<std::string>();
            if (!event_kind_from_name(kind, ev.kind))
                throw ConfigError("trace line " + std::to_string(lineno) + ": unknown kind '" +
                                  kind + "'");
            ev.detail = j.value("detail", "");
            if (j.contains("pkt")) {
                ev.has_packet = true;
                const json& pj = j.at("pkt");
                ev.packet.cid = pj.at("cid").get<uint64_t>();
                ev.packet.psn = pj.at("psn").get<uint32_t>();
                ev.packet.pse = pj.at("pse").get<uint32_t>();
                const json& fj = pj.at("flags");
                ev.packet.flags = {fj.at("l").get<bool>(), fj.at("r").get<bool>(),
                                   fj.at("s").get<bool>(), fj.at("x").get<bool>()};
                if (pj.contains("scratch")) {
                    ev.packet.has_scratch = true;
                    ev.packet.scratch_type = pj.at("scratch").at("type").get<uint8_t>();
                    ev.packet.scratch_mode = pj.at("scratch").at("mode").get<uint8_t>();
                    ev.packet.scratch_value =
                        from_hex(pj.at("scratch").at("value_hex").get<std::string>());
                }
                ev.packet.payload_len = pj.at("plen").get<size_t>();
            }
            trace.push_back(std::move(ev));
        } catch (const json::exception& e) {
            throw ConfigError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return trace;
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file '" + path + "'");
    return trace_from_jsonl(in);
}

SimResult run_scenario(const ScenarioConfig& config) {
    validate(config);
    return Sim(config).run();
}

}  // namespace mcp::harness
