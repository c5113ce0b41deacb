#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "mcp/pathdev.hpp"
#include "mcp/trace.hpp"
#include "mcp/wire.hpp"

namespace mcp::observer {

using pathdev::Direction;
using pathdev::FiveTuple;

// What a passive on-path observer can see of one packet. Payload bytes never
// enter this type; only their length does.
struct ObservationRecord {
    SimTime time = 0;
    int tap = 0;
    Direction direction = Direction::FORWARD;
    FiveTuple tuple;
    uint64_t cid = 0;
    uint32_t psn = 0;
    uint32_t pse = 0;
    wire::Flags flags;
    bool has_scratch = false;
    uint8_t scratch_type = 0;
    wire::IntegrityMode scratch_mode = wire::IntegrityMode::READ_ONLY;
    Bytes scratch_value;
    size_t payload_len = 0;
};

ObservationRecord observe(SimTime time, int tap, Direction dir, const FiveTuple& tuple,
                          const wire::Packet& packet);

// The (D, P) manipulation lattice. Preference for the attacker is total:
// (!D,!P) < (!D,P) < (D,!P) < (D,P), lower being more attractive.
struct ManipulationClass {
    bool detectable = false;        // D
    bool behavior_changing = false; // P

    bool operator==(const ManipulationClass&) const = default;
};

int preference_rank(const ManipulationClass& c);  // 0 = most preferred
std::string manipulation_class_str(const ManipulationClass& c);

// ---------------------------------------------------------------------------
// Passive path measurement.

struct PathMetrics {
    size_t loss_fwd = 0, loss_rev = 0;
    size_t reorder_fwd = 0, reorder_rev = 0;
    std::vector<SimTime> rtt_samples;  // forward send to first covering echo
};

// Records must be time-sorted.
PathMetrics measure_path_metrics(const std::vector<ObservationRecord>& records);

// ---------------------------------------------------------------------------
// Linkability.

// Cluster id per record; records with equal cid share a cluster.
std::vector<size_t> link_by_cid(const std::vector<ObservationRecord>& records);

struct Migration {
    size_t cluster = 0;
    FiveTuple new_tuple;
    double confidence = 0.0;
};

struct PsnLinkResult {
    std::vector<size_t> clusters;  // per record
    std::vector<Migration> migrations;
};

// PSN-delta linker: a new source whose psn lands within `delta` above a
// tracked flow's high-water mark is read as that flow migrating.
PsnLinkResult link_by_psn(const std::vector<ObservationRecord>& records, uint32_t delta = 64);

struct LinkScore {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

// Pairwise scoring over ground-truth segments (one segment = one 5-tuple
// epoch of one true flow). Majority predicted cluster per segment.
LinkScore score_linkage(const std::vector<size_t>& predicted,
                        const std::vector<int>& true_flow,
                        const std::vector<int>& segment);

// ---------------------------------------------------------------------------
// LoLa-augmented traffic classification.

struct FlowFeatures {
    double mean_payload_len = 0.0;
    double mean_interarrival_us = 0.0;
    double lola_rate = 0.0;
    int label = 0;
};

struct InsufficientData : std::runtime_error {
    InsufficientData() : std::runtime_error("a class has fewer than 10 training flows") {}
};

struct LolaClassifyResult {
    double accuracy = 0.0;
    std::vector<int> predictions;  // for the evaluation half
};

// Gaussian naive Bayes, fit on the first half of the flows, evaluated on the
// rest. With use_lola the lola-bit rate joins the feature set.
LolaClassifyResult classify_lola(const std::vector<FlowFeatures>& flows, bool use_lola);

// ---------------------------------------------------------------------------
// Fingerprinting.

struct Fingerprint {
    double scratch_rate = 0.0;
    std::set<uint8_t> pcf_types;
    double lola_rate = 0.0;
    double stop_rate = 0.0;
    double echo_rate = 0.0;  // fraction of packets carrying a nonzero pse

    bool operator==(const Fingerprint&) const = default;
};

Fingerprint fingerprint(const std::vector<ObservationRecord>& flow_records);

// Index of the nearest profile.
size_t match_fingerprint(const Fingerprint& observed, const std::vector<Fingerprint>& profiles);

// ---------------------------------------------------------------------------
// Two-point data exfiltration.

enum class ExfilChannelKind { WRITABLE_SCRATCH, PROTECTED_PSN };

struct ChannelTooSmall : std::runtime_error {
    ChannelTooSmall() : std::runtime_error("covert bits exceed channel capacity") {}
};

// Ingress XORs covert bytes onto a field whose original value the egress can
// predict (constant scratch value / unit-increment psn), so the restore needs
// no coordination side channel. The first packet of each flow passes through
// untouched to synchronize both taps.
class TwoPointExfil {
   public:
    explicit TwoPointExfil(ExfilChannelKind kind) : kind_(kind) {}

    // Returns true if covert bytes were embedded into this packet.
    bool ingress(wire::Packet& packet, ByteView covert);

    // Restores the packet to its pre-ingress bytes; returns the extracted
    // covert bytes once synchronized.
    std::optional<Bytes> egress(wire::Packet& packet);

    ExfilChannelKind kind() const { return kind_; }

   private:
    struct FlowSync {
        bool synced = false;
        uint32_t expected_psn = 0;
        Bytes baseline_value;
    };
    ExfilChannelKind kind_;
    std::map<uint64_t, FlowSync> ingress_flows_;
    std::map<uint64_t, FlowSync> egress_flows_;
};

// ---------------------------------------------------------------------------
// Active state-signal injection (attacker lacks the connection key).

wire::Packet make_forged_stop(uint64_t cid, uint32_t psn, uint32_t pse);

// ---------------------------------------------------------------------------
// Scratch-space coercion gate.

struct CoercePolicy {
    uint8_t required_pcf = wire::kPcfMtu;
    enum class Penalty { DROP, DELAY };
    Penalty penalty = Penalty::DROP;
    SimTime delay_us = 50'000;
    // The advertisement makes the coercion endpoint-visible (class D). The
    // silent variant is behavior-changing instead and off by default.
    bool advertise = true;
};

struct GateDecision {
    enum class Action { FORWARD, DELAY, DROP };
    Action action = Action::FORWARD;
    SimTime extra_delay = 0;
};

GateDecision coerce_gate(const wire::Packet& packet, const CoercePolicy& policy);

}  // namespace mcp::observer
