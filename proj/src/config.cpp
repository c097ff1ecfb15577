#include "qflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "qflow/csv.hpp"
#include "qflow/errors.hpp"

namespace qflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// "section.key" -> raw value text
using Entries = std::map<std::string, std::string>;

Entries split_entries(const std::string& text) {
  Entries entries;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DomainError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw DomainError("config line " + std::to_string(line_no) +
                          ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    if (section.empty())
      throw DomainError("config line " + std::to_string(line_no) +
                        ": key outside any [section]");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (entries.count(key)) throw DomainError("duplicate config key '" + key + "'");
    entries[key] = trim(line.substr(eq + 1));
  }
  return entries;
}

double parse_double(const std::string& key, const std::string& raw) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (raw.empty() || used != raw.size())
    throw DomainError("config value for '" + key + "' is not a number: '" +
                      raw + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(raw, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (raw.empty() || used != raw.size())
    throw DomainError("config value for '" + key + "' is not an integer: '" +
                      raw + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& key, const std::string& raw) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(raw, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (raw.empty() || raw.front() == '-' || used != raw.size())
    throw DomainError("config value for '" + key +
                      "' is not a non-negative integer: '" + raw + "'");
  return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  std::istringstream in(raw);
  std::string token;
  while (in >> token) out.push_back(static_cast<int>(parse_int(key, token)));
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& raw) {
  std::vector<double> out;
  std::istringstream in(raw);
  std::string token;
  while (in >> token) out.push_back(parse_double(key, token));
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Entries entries = split_entries(text);
  auto take = [&entries](const std::string& key) -> std::optional<std::string> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string value = std::move(it->second);
    entries.erase(it);
    return value;
  };
  auto require = [&take](const std::string& key) -> std::string {
    auto v = take(key);
    if (!v) throw DomainError("missing config key '" + key + "'");
    return *v;
  };

  ExperimentConfig config;
  config.family = require("model.family");
  if (auto v = take("model.lambda"))
    config.model.lambda = parse_double("model.lambda", *v);
  if (auto v = take("model.eps")) config.model.eps = parse_double("model.eps", *v);
  if (auto v = take("model.seed")) config.model.seed = parse_seed("model.seed", *v);
  if (auto v = take("model.gamma_floor"))
    config.model.gamma_floor = parse_double("model.gamma_floor", *v);

  const auto extent = parse_int_list("lattice.extent", require("lattice.extent"));
  if (extent.size() == 1) {
    config.extent_x = extent[0];
    config.extent_y = 1;
  } else if (extent.size() == 2) {
    config.extent_x = extent[0];
    config.extent_y = extent[1];
  } else {
    throw DomainError("'lattice.extent' takes one or two integers");
  }

  config.a_sites = parse_int_list("cut.a_sites", require("cut.a_sites"));

  if (auto v = take("flow.steps"))
    config.steps = static_cast<int>(parse_int("flow.steps", *v));
  if (auto v = take("flow.filter")) config.filter = *v;
  if (auto v = take("flow.filter_gamma"))
    config.filter_gamma = parse_double("flow.filter_gamma", *v);
  config.s_grid = parse_double_list("flow.s_grid", require("flow.s_grid"));
  config.r_list = parse_int_list("flow.r_list", require("flow.r_list"));
  if (auto v = take("flow.workers"))
    config.workers = static_cast<int>(parse_int("flow.workers", *v));

  config.out_dir = require("output.dir");

  Tolerances& tol = config.tolerances;
  if (auto v = take("tolerances.unitarity"))
    tol.unitarity = parse_double("tolerances.unitarity", *v);
  if (auto v = take("tolerances.overlap_margin"))
    tol.overlap_margin = parse_double("tolerances.overlap_margin", *v);
  if (auto v = take("tolerances.tail_margin"))
    tol.tail_margin = parse_double("tolerances.tail_margin", *v);
  if (auto v = take("tolerances.entropy_slack"))
    tol.entropy_slack = parse_double("tolerances.entropy_slack", *v);
  if (auto v = take("tolerances.support_defect"))
    tol.support_defect = parse_double("tolerances.support_defect", *v);

  if (!entries.empty())
    throw DomainError("unrecognized config key '" + entries.begin()->first + "'");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_text(const ExperimentConfig& config) {
  std::vector<std::string> lines;
  auto put = [&lines](const std::string& key, const std::string& value) {
    lines.push_back(key + " = " + value);
  };
  auto put_real = [&put](const std::string& key, double v) {
    put(key, format_sig(v));
  };
  auto join_ints = [](const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out += (i ? " " : "") + std::to_string(v[i]);
    return out;
  };

  put("model.family", config.family);
  put_real("model.lambda", config.model.lambda);
  put_real("model.eps", config.model.eps);
  put("model.seed", std::to_string(config.model.seed));
  put_real("model.gamma_floor", config.model.gamma_floor);
  put("lattice.extent", config.extent_y == 1
                            ? std::to_string(config.extent_x)
                            : std::to_string(config.extent_x) + " " +
                                  std::to_string(config.extent_y));
  put("cut.a_sites", join_ints(config.a_sites));
  put("flow.steps", std::to_string(config.steps));
  put("flow.filter", config.filter);
  put_real("flow.filter_gamma", config.filter_gamma);
  {
    std::string grid;
    for (std::size_t i = 0; i < config.s_grid.size(); ++i)
      grid += (i ? " " : "") + format_sig(config.s_grid[i]);
    put("flow.s_grid", grid);
  }
  put("flow.r_list", join_ints(config.r_list));
  put_real("tolerances.unitarity", config.tolerances.unitarity);
  put_real("tolerances.overlap_margin", config.tolerances.overlap_margin);
  put_real("tolerances.tail_margin", config.tolerances.tail_margin);
  put_real("tolerances.entropy_slack", config.tolerances.entropy_slack);
  put_real("tolerances.support_defect", config.tolerances.support_defect);
  // workers and output.dir select resources and artifact placement, not
  // experiment content, so they stay out of the canonical form.

  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) out += line + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_text(config);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Lattice build_lattice(const ExperimentConfig& config) {
  if (config.extent_y == 1) return Lattice(config.extent_x);
  return Lattice(config.extent_x, config.extent_y);
}

Cut build_cut(const ExperimentConfig& config, const Lattice& lattice) {
  return Cut(Region(config.a_sites, lattice), lattice);
}

HamiltonianPath build_path(const ExperimentConfig& config) {
  return make_named_path(config.family, build_lattice(config), config.model);
}

void validate_config(const ExperimentConfig& config) {
  const Lattice lattice = build_lattice(config);
  if (lattice.n_sites() > 12)
    throw DomainError("lattice has " + std::to_string(lattice.n_sites()) +
                      " sites; the dense pipeline caps at 12");
  build_cut(config, lattice);
  build_path(config);

  if (config.filter != "spectral")
    throw DomainError("filter variant '" + config.filter +
                      "' is not available (expected 'spectral')");
  if (config.steps <= 0) throw DomainError("flow.steps must be positive");
  if (config.workers <= 0) throw DomainError("flow.workers must be positive");

  if (config.s_grid.empty()) throw DomainError("flow.s_grid is empty");
  for (std::size_t i = 0; i < config.s_grid.size(); ++i) {
    const double s = config.s_grid[i];
    if (!(s >= 0.0 && s <= 1.0))
      throw DomainError("flow.s_grid values must lie in [0, 1]");
    if (i > 0 && s <= config.s_grid[i - 1])
      throw DomainError("flow.s_grid must be strictly increasing");
    const double steps_in = s * config.steps;
    if (std::abs(steps_in - std::llround(steps_in)) > 1e-9 * config.steps)
      throw DomainError("flow.s_grid value " + format_sig(s) +
                        " does not land on a step boundary");
  }

  if (config.r_list.empty()) throw DomainError("flow.r_list is empty");
  for (std::size_t i = 0; i < config.r_list.size(); ++i) {
    if (config.r_list[i] < 1)
      throw DomainError("flow.r_list entries must be positive");
    if (i > 0 && config.r_list[i] <= config.r_list[i - 1])
      throw DomainError("flow.r_list must be strictly increasing");
  }

  if (config.out_dir.empty()) throw DomainError("output.dir is empty");
  if (!(config.tolerances.unitarity > 0))
    throw DomainError("tolerances.unitarity must be positive");
  if (!(config.tolerances.support_defect > 0))
    throw DomainError("tolerances.support_defect must be positive");
}

}  // namespace qflow
