#include "gslond/scenario_config.hpp"

#include "gslond/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace gslond {

namespace {

struct Entry {
  std::string key;
  std::vector<std::string> values;
  std::size_t line = 0;
};

struct Block {
  std::string name;
  std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

// Line 0 marks command-line overrides.
std::string at_line(std::size_t line) {
  return line == 0 ? std::string(" (override)") : " (line " + std::to_string(line) + ")";
}

void set_entry(std::vector<Entry>& entries, Entry e) {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const Entry& x) { return x.key == e.key; });
  if (it != entries.end()) {
    *it = std::move(e);
  } else {
    entries.push_back(std::move(e));
  }
}

std::size_t parse_count(const std::string& key, const std::string& v, std::size_t line) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'" + at_line(line));
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, std::size_t line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" + v + "'" + at_line(line));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v, std::size_t line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'" + at_line(line));
  }
  return out;
}

// Scenario under construction; mode-dependent fields are resolved at the end.
struct Draft {
  TrialScenario s;
  std::string beta_mode = "descending";
  std::optional<BudgetScenario> budget;
};

void apply(Draft& d, const std::string& key, const std::string& v, std::size_t line) {
  auto wrap = [&](auto parse) {
    try {
      return parse();
    } catch (const ConfigError& e) {
      throw ConfigError(key, std::string(e.what()).substr(e.key().size() + 2) + at_line(line));
    }
  };
  TrialScenario& s = d.s;
  if (key == "K") {
    s.arms = parse_count(key, v, line);
  } else if (key == "N") {
    if (v == "inf" || v == "Inf" || v == "infinity") {
      s.n_bound.reset();
    } else {
      s.n_bound = parse_count(key, v, line);
      if (*s.n_bound == 0) {
        throw ConfigError(key, "must be positive" + at_line(line));
      }
    }
  } else if (key == "beta_mode") {
    if (v != "descending") {
      wrap([&] { return parse_beta_mode(v); });
    }
    d.beta_mode = v;
  } else if (key == "dependent_base") {
    s.dependent_base = wrap([&] { return parse_beta_mode(v); });
  } else if (key == "pi0") {
    s.pi0 = parse_real(key, v, line);
  } else if (key == "delta") {
    s.delta = parse_real(key, v, line);
  } else if (key == "order") {
    s.order = wrap([&] { return parse_order(v); });
  } else if (key == "n") {
    s.n = parse_count(key, v, line);
  } else if (key == "n1") {
    s.n1 = parse_count(key, v, line);
  } else if (key == "n_delta") {
    s.n_delta = parse_count(key, v, line);
  } else if (key == "control") {
    s.control = wrap([&] { return parse_control_mode(v); });
  } else if (key == "procedure") {
    s.procedure = wrap([&] { return parse_procedure(v); });
  } else if (key == "spending") {
    s.spending = wrap([&] { return parse_spending_kind(v); });
  } else if (key == "alpha") {
    s.alpha = parse_real(key, v, line);
  } else if (key == "alpha_futility") {
    s.alpha_futility = parse_real(key, v, line);
  } else if (key == "replications") {
    s.replications = parse_count(key, v, line);
  } else if (key == "seed") {
    s.master_seed = parse_u64(key, v, line);
  } else if (key == "budget") {
    if (v == "none") {
      d.budget.reset();
    } else {
      d.budget = wrap([&] { return parse_budget_scenario(v); });
    }
  } else {
    throw ConfigError(key, "unknown key" + at_line(line));
  }
}

TrialScenario resolve(Draft d) {
  TrialScenario& s = d.s;
  if (d.beta_mode == "descending") {
    s.beta_mode = s.n_bound ? BetaMode::Bounded : BetaMode::Unbounded;
  } else {
    s.beta_mode = parse_beta_mode(d.beta_mode);
  }
  if (d.budget) {
    s.budget = BudgetConfig::planned(s.arms, s.n, s.n_delta, *d.budget);
  }
  s.validate();
  return s;
}

std::vector<Block> split_blocks(std::string_view text) {
  std::vector<Block> blocks(1);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) {
      continue;
    }
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("", "unterminated section header" + at_line(line));
      }
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (name.empty()) {
        throw ConfigError("", "empty section name" + at_line(line));
      }
      blocks.push_back(Block{name, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "expected 'key = value'" + at_line(line));
    }
    Entry e{trim(std::string_view(s).substr(0, eq)), split_list(std::string_view(s).substr(eq + 1)),
            line};
    if (e.key.empty()) {
      throw ConfigError("", "missing key" + at_line(line));
    }
    for (const auto& v : e.values) {
      if (v.empty()) {
        throw ConfigError(e.key, "empty value" + at_line(line));
      }
    }
    set_entry(blocks.back().entries, std::move(e));
  }
  return blocks;
}

void expand(const std::vector<Entry>& entries, std::size_t depth, Draft draft,
            const std::string& name, std::vector<TrialScenario>& out) {
  if (depth == entries.size()) {
    draft.s.id = name + "." + std::to_string(out.size() + 1);
    out.push_back(resolve(std::move(draft)));
    return;
  }
  const Entry& e = entries[depth];
  for (const auto& v : e.values) {
    Draft next = draft;
    apply(next, e.key, v, e.line);
    expand(entries, depth + 1, std::move(next), name, out);
  }
}

}  // namespace

std::vector<TrialScenario> parse_scenario_config(std::string_view text,
                                                 const std::vector<ConfigOverride>& overrides) {
  const auto blocks = split_blocks(text);
  const auto& defaults = blocks.front().entries;
  std::vector<TrialScenario> scenarios;
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    std::vector<Entry> merged = defaults;
    for (const auto& e : blocks[b].entries) {
      set_entry(merged, e);
    }
    for (const auto& [key, value] : overrides) {
      set_entry(merged, Entry{key, split_list(value), 0});
    }
    std::vector<TrialScenario> block;
    expand(merged, 0, Draft{}, blocks[b].name, block);
    scenarios.insert(scenarios.end(), block.begin(), block.end());
  }
  if (scenarios.empty()) {
    throw ConfigError("", "configuration defines no [scenario] block");
  }
  return scenarios;
}

std::vector<TrialScenario> load_scenario_config(const std::filesystem::path& path,
                                                const std::vector<ConfigOverride>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str(), overrides);
}

}  // namespace gslond
