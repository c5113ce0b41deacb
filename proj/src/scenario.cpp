#include "mcp/scenario.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "mcp/integrity.hpp"

namespace mcp::harness {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

PayloadDist payload_dist_from_json(const json& j) {
    check_keys(j, {"dist", "a", "b"}, "payload_len");
    PayloadDist d;
    std::string kind = get_or<std::string>(j, "dist", "fixed");
    if (kind == "fixed") {
        d.kind = PayloadDist::Kind::FIXED;
        d.a = d.b = get_or<size_t>(j, "a", 100);
    } else if (kind == "uniform") {
        d.kind = PayloadDist::Kind::UNIFORM;
        d.a = get_or<size_t>(j, "a", 0);
        d.b = get_or<size_t>(j, "b", 100);
        if (d.b < d.a) throw ConfigError("payload_len: b < a");
    } else {
        throw ConfigError("payload_len: unknown dist '" + kind + "'");
    }
    return d;
}

json payload_dist_to_json(const PayloadDist& d) {
    json j;
    j["dist"] = d.kind == PayloadDist::Kind::FIXED ? "fixed" : "uniform";
    j["a"] = d.a;
    j["b"] = d.b;
    return j;
}

uint8_t pcf_from_string(const std::string& s) {
    if (s == "mtu") return wire::kPcfMtu;
    if (s == "test") return wire::kPcfTestPayload;
    throw ConfigError("unknown pcf_type '" + s + "'");
}

std::string pcf_to_string(uint8_t t) {
    return t == wire::kPcfMtu ? "mtu" : "test";
}

ScratchConfig scratch_from_json(const json& j) {
    check_keys(j, {"pcf_type", "mode", "value_hex"}, "scratch");
    ScratchConfig s;
    s.pcf_type = pcf_from_string(get_or<std::string>(j, "pcf_type", "mtu"));
    std::string mode = get_or<std::string>(j, "mode", "writable");
    if (mode == "writable")
        s.mode = wire::IntegrityMode::WRITABLE;
    else if (mode == "read_only")
        s.mode = wire::IntegrityMode::READ_ONLY;
    else
        throw ConfigError("scratch: unknown mode '" + mode + "'");
    s.value = from_hex(get_or<std::string>(j, "value_hex", "05dc"));
    if (s.value.size() > wire::kMaxScratchLen) throw ConfigError("scratch: value too long");
    return s;
}

json scratch_to_json(const ScratchConfig& s) {
    json j;
    j["pcf_type"] = pcf_to_string(s.pcf_type);
    j["mode"] = s.mode == wire::IntegrityMode::WRITABLE ? "writable" : "read_only";
    j["value_hex"] = to_hex(s.value);
    return j;
}

TrafficConfig traffic_from_json(const json& j) {
    check_keys(j,
               {"packet_rate_pps", "payload_len", "lola_prob", "max_packets",
                "data_duration_s", "keepalive_interval_s", "stop_time_s", "jitter_us",
                "scratch", "respond_to_data"},
               "traffic");
    TrafficConfig t;
    t.packet_rate_pps = get_or<double>(j, "packet_rate_pps", 10.0);
    if (j.contains("payload_len")) t.payload_len = payload_dist_from_json(j.at("payload_len"));
    t.lola_prob = get_or<double>(j, "lola_prob", 0.0);
    t.max_packets = get_or<uint64_t>(j, "max_packets", 0);
    t.data_duration_s = get_or<double>(j, "data_duration_s", -1.0);
    t.keepalive_interval_s = get_or<double>(j, "keepalive_interval_s", -1.0);
    t.stop_time_s = get_or<double>(j, "stop_time_s", -1.0);
    t.jitter_us = get_or<double>(j, "jitter_us", 0.0);
    if (j.contains("scratch") && !j.at("scratch").is_null())
        t.scratch = scratch_from_json(j.at("scratch"));
    t.respond_to_data = get_or<bool>(j, "respond_to_data", false);
    return t;
}

json traffic_to_json(const TrafficConfig& t) {
    json j;
    j["packet_rate_pps"] = t.packet_rate_pps;
    j["payload_len"] = payload_dist_to_json(t.payload_len);
    j["lola_prob"] = t.lola_prob;
    j["max_packets"] = t.max_packets;
    j["data_duration_s"] = t.data_duration_s;
    j["keepalive_interval_s"] = t.keepalive_interval_s;
    j["stop_time_s"] = t.stop_time_s;
    j["jitter_us"] = t.jitter_us;
    if (t.scratch) j["scratch"] = scratch_to_json(*t.scratch);
    j["respond_to_data"] = t.respond_to_data;
    return j;
}

EndpointConfig endpoint_from_json(const json& j, const std::string& where) {
    check_keys(j, {"cid_mode", "verify_policy", "backend_id", "traffic"}, where);
    EndpointConfig e;
    std::string mode = get_or<std::string>(j, "cid_mode", "random_static");
    if (mode == "random_static")
        e.cid_mode = endpoint::CidModeKind::RANDOM_STATIC;
    else if (mode == "server_routed")
        e.cid_mode = endpoint::CidModeKind::SERVER_ROUTED;
    else if (mode == "hotp_rotating")
        e.cid_mode = endpoint::CidModeKind::HOTP_ROTATING;
    else
        throw ConfigError(where + ": unknown cid_mode '" + mode + "'");
    std::string policy = get_or<std::string>(j, "verify_policy", "hard_fail");
    if (policy == "hard_fail")
        e.verify_policy = endpoint::VerifyPolicy::HARD_FAIL;
    else if (policy == "deliver_with_flag")
        e.verify_policy = endpoint::VerifyPolicy::DELIVER_WITH_FLAG;
    else
        throw ConfigError(where + ": unknown verify_policy '" + policy + "'");
    e.backend_id = get_or<uint8_t>(j, "backend_id", 0);
    if (j.contains("traffic")) e.traffic = traffic_from_json(j.at("traffic"));
    return e;
}

json endpoint_to_json(const EndpointConfig& e) {
    json j;
    switch (e.cid_mode) {
        case endpoint::CidModeKind::RANDOM_STATIC: j["cid_mode"] = "random_static"; break;
        case endpoint::CidModeKind::SERVER_ROUTED: j["cid_mode"] = "server_routed"; break;
        case endpoint::CidModeKind::HOTP_ROTATING: j["cid_mode"] = "hotp_rotating"; break;
    }
    j["verify_policy"] = e.verify_policy == endpoint::VerifyPolicy::HARD_FAIL
                             ? "hard_fail"
                             : "deliver_with_flag";
    j["backend_id"] = e.backend_id;
    j["traffic"] = traffic_to_json(e.traffic);
    return j;
}

observer::CoercePolicy gate_from_json(const json& j, const std::string& where) {
    check_keys(j, {"required_pcf", "penalty", "delay_us", "advertise"}, where);
    observer::CoercePolicy p;
    p.required_pcf = pcf_from_string(get_or<std::string>(j, "required_pcf", "mtu"));
    std::string penalty = get_or<std::string>(j, "penalty", "drop");
    if (penalty == "drop")
        p.penalty = observer::CoercePolicy::Penalty::DROP;
    else if (penalty == "delay")
        p.penalty = observer::CoercePolicy::Penalty::DELAY;
    else
        throw ConfigError(where + ": unknown penalty '" + penalty + "'");
    p.delay_us = get_or<SimTime>(j, "delay_us", 50'000);
    p.advertise = get_or<bool>(j, "advertise", true);
    return p;
}

json gate_to_json(const observer::CoercePolicy& p) {
    json j;
    j["required_pcf"] = pcf_to_string(p.required_pcf);
    j["penalty"] = p.penalty == observer::CoercePolicy::Penalty::DROP ? "drop" : "delay";
    j["delay_us"] = p.delay_us;
    j["advertise"] = p.advertise;
    return j;
}

DeviceConfig device_from_json(const json& j) {
    check_keys(j,
               {"type", "binding_idle_s", "idle_s", "associated_s", "stopping_s",
                "backend_count", "capacity", "latency_service_us", "loss_service_us", "mtu",
                "gate"},
               "path device");
    DeviceConfig d;
    std::string type = get_or<std::string>(j, "type", "");
    if (type == "nat")
        d.type = DeviceConfig::Type::NAT;
    else if (type == "stateful")
        d.type = DeviceConfig::Type::STATEFUL;
    else if (type == "lb")
        d.type = DeviceConfig::Type::LB;
    else if (type == "lola")
        d.type = DeviceConfig::Type::LOLA;
    else if (type == "mtu_writer")
        d.type = DeviceConfig::Type::MTU_WRITER;
    else if (type == "gate")
        d.type = DeviceConfig::Type::GATE;
    else
        throw ConfigError("unknown device type '" + type + "'");
    d.binding_idle_s = get_or<double>(j, "binding_idle_s", 30.0);
    d.idle_s = get_or<double>(j, "idle_s", 30.0);
    d.associated_s = get_or<double>(j, "associated_s", 300.0);
    d.stopping_s = get_or<double>(j, "stopping_s", 5.0);
    d.backend_count = get_or<uint32_t>(j, "backend_count", 4);
    if (d.backend_count == 0) throw ConfigError("lb: backend_count must be >= 1");
    d.lola.capacity = get_or<size_t>(j, "capacity", 8);
    d.lola.latency_service_us = get_or<SimTime>(j, "latency_service_us", 200);
    d.lola.loss_service_us = get_or<SimTime>(j, "loss_service_us", 1000);
    d.mtu = get_or<uint16_t>(j, "mtu", 1280);
    if (j.contains("gate")) d.gate = gate_from_json(j.at("gate"), "gate");
    return d;
}

json device_to_json(const DeviceConfig& d) {
    json j;
    switch (d.type) {
        case DeviceConfig::Type::NAT:
            j["type"] = "nat";
            j["binding_idle_s"] = d.binding_idle_s;
            break;
        case DeviceConfig::Type::STATEFUL:
            j["type"] = "stateful";
            j["idle_s"] = d.idle_s;
            j["associated_s"] = d.associated_s;
            j["stopping_s"] = d.stopping_s;
            break;
        case DeviceConfig::Type::LB:
            j["type"] = "lb";
            j["backend_count"] = d.backend_count;
            break;
        case DeviceConfig::Type::LOLA:
            j["type"] = "lola";
            j["capacity"] = d.lola.capacity;
            j["latency_service_us"] = d.lola.latency_service_us;
            j["loss_service_us"] = d.lola.loss_service_us;
            break;
        case DeviceConfig::Type::MTU_WRITER:
            j["type"] = "mtu_writer";
            j["mtu"] = d.mtu;
            break;
        case DeviceConfig::Type::GATE:
            j["type"] = "gate";
            j["gate"] = gate_to_json(d.gate);
            break;
    }
    return j;
}

AttackerConfig attacker_from_json(const json& j) {
    check_keys(j,
               {"type", "taps", "inject_directions", "covert_len", "inject_count",
                "inject_time_s", "coerce"},
               "attacker");
    AttackerConfig a;
    std::string type = get_or<std::string>(j, "type", "passive");
    if (type == "passive")
        a.type = AttackerConfig::Type::PASSIVE;
    else if (type == "exfil_scratch")
        a.type = AttackerConfig::Type::EXFIL_SCRATCH;
    else if (type == "exfil_psn")
        a.type = AttackerConfig::Type::EXFIL_PSN;
    else if (type == "exfil_psn_norestore")
        a.type = AttackerConfig::Type::EXFIL_PSN_NORESTORE;
    else if (type == "inject_stop")
        a.type = AttackerConfig::Type::INJECT_STOP;
    else if (type == "coerce")
        a.type = AttackerConfig::Type::COERCE;
    else
        throw ConfigError("unknown attacker type '" + type + "'");
    if (j.contains("taps")) a.taps = j.at("taps").get<std::vector<int>>();
    if (j.contains("inject_directions")) {
        for (const auto& s : j.at("inject_directions")) {
            std::string dir = s.get<std::string>();
            if (dir == "fwd")
                a.inject_directions.push_back(pathdev::Direction::FORWARD);
            else if (dir == "rev")
                a.inject_directions.push_back(pathdev::Direction::REVERSE);
            else
                throw ConfigError("attacker: unknown direction '" + dir + "'");
        }
    }
    a.covert_len = get_or<size_t>(j, "covert_len", 4);
    a.inject_count = get_or<int>(j, "inject_count", 3);
    a.inject_time_s = get_or<double>(j, "inject_time_s", 1.0);
    if (j.contains("coerce")) a.coerce = gate_from_json(j.at("coerce"), "coerce");
    return a;
}

json attacker_to_json(const AttackerConfig& a) {
    json j;
    switch (a.type) {
        case AttackerConfig::Type::PASSIVE: j["type"] = "passive"; break;
        case AttackerConfig::Type::EXFIL_SCRATCH: j["type"] = "exfil_scratch"; break;
        case AttackerConfig::Type::EXFIL_PSN: j["type"] = "exfil_psn"; break;
        case AttackerConfig::Type::EXFIL_PSN_NORESTORE: j["type"] = "exfil_psn_norestore"; break;
        case AttackerConfig::Type::INJECT_STOP: j["type"] = "inject_stop"; break;
        case AttackerConfig::Type::COERCE: j["type"] = "coerce"; break;
    }
    j["taps"] = a.taps;
    json dirs = json::array();
    for (auto d : a.inject_directions)
        dirs.push_back(d == pathdev::Direction::FORWARD ? "fwd" : "rev");
    j["inject_directions"] = dirs;
    j["covert_len"] = a.covert_len;
    j["inject_count"] = a.inject_count;
    j["inject_time_s"] = a.inject_time_s;
    j["coerce"] = gate_to_json(a.coerce);
    return j;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
    check_keys(j, {"seed", "duration_s", "link_delay_us", "client", "server", "path", "attacker"},
               "scenario");
    ScenarioConfig c;
    c.seed = get_or<uint64_t>(j, "seed", 1);
    c.duration_s = get_or<double>(j, "duration_s", 10.0);
    c.link_delay_us = get_or<SimTime>(j, "link_delay_us", 5000);
    if (j.contains("client")) c.client = endpoint_from_json(j.at("client"), "client");
    if (j.contains("server")) c.server = endpoint_from_json(j.at("server"), "server");
    if (j.contains("path")) {
        for (const auto& dev : j.at("path")) c.path.push_back(device_from_json(dev));
    }
    if (j.contains("attacker") && !j.at("attacker").is_null())
        c.attacker = attacker_from_json(j.at("attacker"));
    validate(c);
    return c;
}

json scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["duration_s"] = c.duration_s;
    j["link_delay_us"] = c.link_delay_us;
    j["client"] = endpoint_to_json(c.client);
    j["server"] = endpoint_to_json(c.server);
    json path = json::array();
    for (const auto& d : c.path) path.push_back(device_to_json(d));
    j["path"] = path;
    if (c.attacker) j["attacker"] = attacker_to_json(*c.attacker);
    return j;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

void validate(const ScenarioConfig& c) {
    if (c.duration_s < 0) throw ConfigError("negative duration");
    if (c.link_delay_us < 0) throw ConfigError("negative link delay");
    if (c.attacker) {
        int num_links = static_cast<int>(c.path.size()) + 1;
        for (int tap : c.attacker->taps)
            if (tap < 0 || tap >= num_links) throw ConfigError("attacker tap out of range");
        using AT = AttackerConfig::Type;
        auto type = c.attacker->type;
        if ((type == AT::EXFIL_SCRATCH || type == AT::EXFIL_PSN ||
             type == AT::EXFIL_PSN_NORESTORE) &&
            c.attacker->taps.size() != 2)
            throw ConfigError("exfil attackers need exactly two taps (ingress, egress)");
        if (type == AT::INJECT_STOP &&
            c.attacker->inject_directions.size() != c.attacker->taps.size())
            throw ConfigError("inject_stop: one direction per tap required");
        if (type == AT::COERCE && c.attacker->taps.size() != 1)
            throw ConfigError("coerce attacker needs exactly one tap");
    }
}

std::string config_digest(const ScenarioConfig& c) {
    ScenarioConfig stripped = c;
    stripped.attacker.reset();
    std::string canon = scenario_to_json(stripped).dump();
    auto mac = integrity::hmac_sha256(Bytes{}, ByteView(
        reinterpret_cast<const uint8_t*>(canon.data()), canon.size()));
    return to_hex(ByteView(mac.data(), 8));
}

}  // namespace mcp::harness
