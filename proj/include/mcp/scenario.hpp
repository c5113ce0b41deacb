#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcp/endpoint.hpp"
#include "mcp/observer.hpp"
#include "mcp/pathdev.hpp"

namespace mcp::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PayloadDist {
    enum class Kind { FIXED, UNIFORM };
    Kind kind = Kind::FIXED;
    size_t a = 100;
    size_t b = 100;  // inclusive upper bound for UNIFORM
};

struct ScratchConfig {
    uint8_t pcf_type = wire::kPcfMtu;
    wire::IntegrityMode mode = wire::IntegrityMode::WRITABLE;
    Bytes value;  // initial value, also fixes the length
};

struct TrafficConfig {
    double packet_rate_pps = 10.0;
    PayloadDist payload_len;
    double lola_prob = 0.0;
    uint64_t max_packets = 0;          // 0 = no cap
    double data_duration_s = -1.0;     // < 0: whole scenario
    double keepalive_interval_s = -1;  // < 0: no keepalives
    double stop_time_s = -1;           // < 0: never
    double jitter_us = 0.0;
    std::optional<ScratchConfig> scratch;
    bool respond_to_data = false;  // send an empty reply per delivered data packet
};

struct EndpointConfig {
    endpoint::CidModeKind cid_mode = endpoint::CidModeKind::RANDOM_STATIC;
    endpoint::VerifyPolicy verify_policy = endpoint::VerifyPolicy::HARD_FAIL;
    uint8_t backend_id = 0;  // SERVER_ROUTED
    TrafficConfig traffic;
};

struct DeviceConfig {
    enum class Type { NAT, STATEFUL, LB, LOLA, MTU_WRITER, GATE };
    Type type = Type::STATEFUL;
    // nat
    double binding_idle_s = 30.0;
    // stateful
    double idle_s = 30.0, associated_s = 300.0, stopping_s = 5.0;
    // lb
    uint32_t backend_count = 4;
    // lola
    pathdev::LolaConfig lola;
    // mtu_writer
    uint16_t mtu = 1280;
    // gate
    observer::CoercePolicy gate;
};

struct AttackerConfig {
    enum class Type {
        PASSIVE,
        EXFIL_SCRATCH,
        EXFIL_PSN,
        EXFIL_PSN_NORESTORE,
        INJECT_STOP,
        COERCE,
    };
    Type type = Type::PASSIVE;
    std::vector<int> taps;  // link indices; link i sits between node i and i+1
    std::vector<pathdev::Direction> inject_directions;  // one per tap, INJECT_STOP
    size_t covert_len = 4;
    int inject_count = 3;
    double inject_time_s = 1.0;
    observer::CoercePolicy coerce;
};

struct ScenarioConfig {
    uint64_t seed = 1;
    double duration_s = 10.0;
    SimTime link_delay_us = 5000;
    EndpointConfig client;
    EndpointConfig server;
    std::vector<DeviceConfig> path;
    std::optional<AttackerConfig> attacker;
};

// Strict parse: unknown keys are ConfigError.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario_file(const std::string& path);

// Throws ConfigError on out-of-range taps, negative durations, etc.
void validate(const ScenarioConfig& config);

// Hex digest over the canonical config JSON with the attacker block removed;
// classify_dp uses it to refuse mismatched scenario pairs.
std::string config_digest(const ScenarioConfig& config);

}  // namespace mcp::harness
