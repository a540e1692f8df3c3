#include <doctest.h>

#include "gslond/errors.hpp"
#include "gslond/scenario_config.hpp"

#include <filesystem>
#include <string>

using namespace gslond;

namespace {

std::string config_key_error(std::string_view text, const std::vector<ConfigOverride>& ov = {}) {
  try {
    parse_scenario_config(text, ov);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("grid expansion order and ids") {
  const auto s = parse_scenario_config(R"(
replications = 100
K = 12

[grid]
procedure = LOND, gsLOND
pi0 = 0, 0.5, 1   # inner loop
)");
  REQUIRE(s.size() == 6);
  CHECK(s[0].id == "grid.1");
  CHECK(s[5].id == "grid.6");
  CHECK(s[0].procedure == ProcedureKind::FixedLond);
  CHECK(s[2].procedure == ProcedureKind::FixedLond);
  CHECK(s[3].procedure == ProcedureKind::GsLond);
  CHECK(s[1].pi0 == 0.5);
  CHECK(s[4].pi0 == 0.5);
  for (const auto& x : s) {
    CHECK(x.replications == 100);
    CHECK(x.arms == 12);
  }
}

TEST_CASE("defaults for unspecified keys") {
  const auto s = parse_scenario_config("[one]\n");
  REQUIRE(s.size() == 1);
  const TrialScenario d;
  CHECK(s[0].arms == d.arms);
  CHECK(s[0].n == 50);
  CHECK(s[0].n1 == 25);
  CHECK(s[0].n_delta == 20);
  CHECK(s[0].alpha == 0.025);
  CHECK(s[0].alpha_futility == 0.5);
  CHECK(s[0].beta_mode == BetaMode::Unbounded);
  CHECK_FALSE(s[0].budget.has_value());
}

TEST_CASE("blocks override defaults and overrides win") {
  const auto text = R"(
alpha = 0.05
spending = po
[a]
spending = obf
[b]
)";
  auto s = parse_scenario_config(text);
  REQUIRE(s.size() == 2);
  CHECK(s[0].spending == SpendingKind::OBrienFleming);
  CHECK(s[1].spending == SpendingKind::Pocock);
  CHECK(s[0].alpha == 0.05);

  s = parse_scenario_config(text, {{"alpha", "0.01"}, {"seed", "7"}, {"pi0", "0.2, 0.4"}});
  REQUIRE(s.size() == 4);
  for (const auto& x : s) {
    CHECK(x.alpha == 0.01);
    CHECK(x.master_seed == 7);
  }
  CHECK(s[0].id == "a.1");
  CHECK(s[1].id == "a.2");
  CHECK(s[1].pi0 == 0.4);
  CHECK(s[2].id == "b.1");
}

TEST_CASE("descending resolves by bound") {
  auto s = parse_scenario_config("[x]\nK = 10\nN = 1000, inf\n");
  REQUIRE(s.size() == 2);
  CHECK(s[0].beta_mode == BetaMode::Bounded);
  CHECK(s[0].n_bound == 1000u);
  CHECK(s[1].beta_mode == BetaMode::Unbounded);
  CHECK_FALSE(s[1].n_bound.has_value());

  s = parse_scenario_config("[x]\nK = 10\nN = 10\nbeta_mode = equal\n");
  CHECK(s[0].beta_mode == BetaMode::Equal);
}

TEST_CASE("budget resolution") {
  const auto s = parse_scenario_config("[x]\nK = 10\nN = 100\nbudget = s3\n");
  REQUIRE(s[0].budget.has_value());
  CHECK(s[0].budget->scenario == BudgetScenario::S3);
  CHECK(s[0].budget->initial_arms == 10);
  CHECK(s[0].budget->total_budget == 10 * 50 + 230);
}

TEST_CASE("errors name the key") {
  CHECK(config_key_error("[x]\nfoo = 1\n") == "foo");
  CHECK(config_key_error("[x]\npi0 = abc\n") == "pi0");
  CHECK(config_key_error("[x]\npi0 = 1.5\n") == "pi0");
  CHECK(config_key_error("[x]\nprocedure = BH\n") == "procedure");
  CHECK(config_key_error("[x]\nspending = linear\n") == "spending");
  CHECK(config_key_error("[x]\nreplications = 0\n") == "replications");
  CHECK(config_key_error("[x]\nn1 = 60\n") == "n1");
  CHECK(config_key_error("[x]\nK = 20\nN = 10\n") == "N");
  CHECK(config_key_error("[x]\nbeta_mode = equal\n") == "N");
  CHECK(config_key_error("[x]\ncontrol = historical\n") == "control");
  CHECK(config_key_error("[x]\n", {{"alpha", "x"}}) == "alpha");
  CHECK(config_key_error("alpha = 0.05\n") == "");
}

TEST_CASE("error messages carry the line") {
  try {
    parse_scenario_config("# header\n[x]\n\nseed = -4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "seed");
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_scenario_config("[x]\n", {{"K", "zero"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("override") != std::string::npos);
  }
}

TEST_CASE("malformed lines") {
  CHECK_THROWS_AS(parse_scenario_config("[x\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_config("[x]\njust words\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_config("[x]\npi0 = 0.1,,0.2\n"), ConfigError);
}

TEST_CASE("bundled configurations parse") {
  const std::filesystem::path dir = GSLOND_CONFIG_DIR;
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") {
      continue;
    }
    ++files;
    CAPTURE(entry.path().string());
    std::vector<TrialScenario> s;
    CHECK_NOTHROW(s = load_scenario_config(entry.path()));
    CHECK_FALSE(s.empty());
  }
  CHECK(files >= 5);
  CHECK_THROWS_AS(load_scenario_config(dir / "missing.cfg"), ConfigError);
}
