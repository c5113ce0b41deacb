#pragma once

#include <vector>

#include "mcp/cid.hpp"
#include "mcp/endpoint.hpp"
#include "mcp/observer.hpp"

namespace mcp::harness {

// Synthetic multi-flow observation corpus for the linkability experiments.
// A subset of flows migrates to a new source port mid-life; some migrations
// happen behind an observation blackout long enough to defeat psn-delta
// linking while cid equality still links them.
struct LinkabilityWorkload {
    std::vector<observer::ObservationRecord> records;  // time-sorted
    std::vector<int> flow;     // ground-truth flow id per record
    std::vector<int> segment;  // 5-tuple epoch within the flow
    size_t rebinds = 0;
    size_t blackout_rebinds = 0;
    // Per rotation: flow id, counter before, observed cid after. Lets the
    // key-holding server attempt re-association.
    struct Rotation {
        int flow = 0;
        uint64_t base_counter = 0;
        uint64_t observed_cid = 0;
    };
    std::vector<Rotation> rotations;            // HOTP_ROTATING only
    std::vector<cid::Key> flow_keys;            // per-flow cid keys
};

LinkabilityWorkload make_linkability_workload(endpoint::CidModeKind mode, uint64_t seed);

// Flow feature corpus for the lola-bit traffic classification experiment.
// Size/timing features overlap heavily between the two classes; the lola
// mark rate is strongly class-correlated.
std::vector<observer::FlowFeatures> make_lola_flows(int count, uint64_t seed);

}  // namespace mcp::harness
