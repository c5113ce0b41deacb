#include "mcp/workloads.hpp"

#include <algorithm>

#include "mcp/rng.hpp"

namespace mcp::harness {

using observer::ObservationRecord;

namespace {

cid::Key random_key(Rng& rng) {
    cid::Key k;
    for (auto& b : k) b = uint8_t(rng() & 0xFF);
    return k;
}

}  // namespace

LinkabilityWorkload make_linkability_workload(endpoint::CidModeKind mode, uint64_t seed) {
    constexpr int kFlows = 100;
    constexpr int kRebindFlows = 20;    // flows 0..19 migrate once
    constexpr int kBlackoutFlows = 8;   // flows 0..7 migrate behind a blackout
    constexpr int kPacketsPerSegment = 10;
    constexpr uint32_t kBlackoutGap = 100;  // unobserved packets; > linker delta

    Rng rng(derive_seed(seed, 0x11));
    LinkabilityWorkload w;

    struct FlowPlan {
        uint64_t static_cid;
        cid::Key key;
        uint32_t base_psn;
        uint32_t src_addr;
    };
    std::vector<FlowPlan> plans;
    for (int f = 0; f < kFlows; ++f) {
        FlowPlan p;
        p.static_cid = rng();
        p.key = random_key(rng);
        p.base_psn = uint32_t(rand_range(rng, 1, 0xFFFFFFFFull));
        p.src_addr = 0x0B000000 + uint32_t(f);
        plans.push_back(p);
        w.flow_keys.push_back(p.key);
    }

    struct Pending {
        SimTime time;
        ObservationRecord rec;
        int flow, segment;
    };
    std::vector<Pending> pending;

    for (int f = 0; f < kFlows; ++f) {
        const FlowPlan& plan = plans[f];
        bool rebind = f < kRebindFlows;
        bool blackout = f < kBlackoutFlows;
        int segments = rebind ? 2 : 1;
        uint32_t psn = plan.base_psn;
        for (int seg = 0; seg < segments; ++seg) {
            uint64_t cid = mode == endpoint::CidModeKind::HOTP_ROTATING
                               ? cid::hotp(plan.key, uint64_t(seg))
                               : plan.static_cid;
            if (seg > 0) {
                if (mode == endpoint::CidModeKind::HOTP_ROTATING)
                    w.rotations.push_back({f, uint64_t(seg - 1), cid});
                ++w.rebinds;
                if (blackout) {
                    psn += kBlackoutGap;  // packets the observer never saw
                    ++w.blackout_rebinds;
                }
            }
            for (int i = 0; i < kPacketsPerSegment; ++i) {
                Pending p;
                p.time = SimTime(f) * 10 + (SimTime(seg) * kPacketsPerSegment + i) * 1000;
                p.rec.time = p.time;
                p.rec.direction = pathdev::Direction::FORWARD;
                p.rec.tuple = {plan.src_addr, 0x08080808, uint16_t(10000 + seg), 443, 17};
                p.rec.cid = cid;
                p.rec.psn = psn;
                p.rec.pse = 0;
                p.rec.payload_len = 100;
                p.flow = f;
                p.segment = seg;
                pending.push_back(p);
                psn = psn + 1 == 0 ? 1 : psn + 1;
            }
        }
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) { return a.time < b.time; });
    for (const Pending& p : pending) {
        w.records.push_back(p.rec);
        w.flow.push_back(p.flow);
        w.segment.push_back(p.segment);
    }
    return w;
}

std::vector<observer::FlowFeatures> make_lola_flows(int count, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x22));
    std::vector<observer::FlowFeatures> flows;
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    for (int i = 0; i < count; ++i) {
        int label = i % 2;
        observer::FlowFeatures f;
        // Size/timing means barely separated relative to their spread.
        f.mean_payload_len = 500.0 + label * 40.0 + rand_gauss(rng) * 200.0;
        f.mean_interarrival_us = 100'000.0 + label * 5'000.0 + rand_gauss(rng) * 30'000.0;
        // Interactive traffic marks most packets for the latency queue.
        double base = label == 0 ? 0.1 : 0.9;
        f.lola_rate = clamp01(base + rand_gauss(rng) * 0.05);
        f.label = label;
        flows.push_back(f);
    }
    return flows;
}

}  // namespace mcp::harness
