#pragma once

#include "gslond/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gslond {

/// Parses a scenario grid.
///
///   # comment
///   replications = 5000        top-level keys are defaults for every block
///   [fig4 cc]
///   procedure = LOND, gsLOND   comma lists expand to a Cartesian product
///   pi0 = 0, 0.25, 0.5         (first listed key varies slowest)
///
/// Each block yields scenarios with ids "<block>.<k>", k = 1, 2, ... in
/// expansion order. Keys: K, N (integer or inf), beta_mode
/// (descending|unbounded|bounded|equal|dependent), dependent_base, pi0, delta,
/// order, n, n1, n_delta, control, procedure, spending, alpha, alpha_futility,
/// replications, seed, budget (none|s1|s2|s3|s4).
///
/// "descending" picks the bounded sequence when N is finite and the unbounded
/// one otherwise. Errors are ConfigError naming the key.
///
/// Overrides are applied to every block after its own entries.
using ConfigOverride = std::pair<std::string, std::string>;

std::vector<TrialScenario> parse_scenario_config(std::string_view text,
                                                 const std::vector<ConfigOverride>& overrides = {});

std::vector<TrialScenario> load_scenario_config(const std::filesystem::path& path,
                                                const std::vector<ConfigOverride>& overrides = {});

}  // namespace gslond
