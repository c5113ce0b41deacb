#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcp/observer.hpp"
#include "mcp/scenario.hpp"

namespace mcp::harness {

// One attack study: a baseline/attack scenario pair sharing everything but
// the attacker block, plus the expected manipulation class (nullopt = either).
struct CatalogEntry {
    std::string name;
    ScenarioConfig baseline;
    ScenarioConfig attack;
    std::optional<bool> expect_d;
    std::optional<bool> expect_p;
};

std::vector<CatalogEntry> builtin_catalog();

struct CatalogOutcome {
    struct Row {
        std::string name;
        observer::ManipulationClass cls;
        std::string expected;
        bool matched = true;
    };
    std::vector<Row> rows;
    bool all_matched = true;
    std::string text;  // class table plus side-experiment summaries
};

CatalogOutcome run_catalog();

}  // namespace mcp::harness
