#include "phishsim/scenario_io.hpp"

#include "phishsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

namespace phishsim {

namespace {

using nlohmann::json;

struct Errors {
  std::vector<std::string> list;

  void add(const std::string& m) { list.push_back(m); }

  void finish(const std::string& origin) const {
    if (list.empty()) return;
    std::ostringstream msg;
    msg << "invalid scenario (" << origin << "):";
    for (const auto& e : list) msg << "\n  - " << e;
    throw ValidationError(msg.str());
  }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Errors& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) errs.add(path + ": unknown field '" + it.key() + "'");
  }
}

const json* field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::optional<double> read_number(const json& obj, const char* key, const std::string& path,
                                  Errors& errs, std::optional<double> fallback) {
  const json* f = field(obj, key);
  if (!f) {
    if (!fallback) errs.add(path + "." + key + " is required");
    return fallback;
  }
  if (!f->is_number()) {
    errs.add(path + "." + key + " must be a number");
    return std::nullopt;
  }
  return f->get<double>();
}

std::optional<long long> read_integer(const json& obj, const char* key, const std::string& path,
                                      Errors& errs, std::optional<long long> fallback) {
  const json* f = field(obj, key);
  if (!f) {
    if (!fallback) errs.add(path + "." + key + " is required");
    return fallback;
  }
  if (!f->is_number_integer() && !f->is_number_unsigned()) {
    errs.add(path + "." + key + " must be an integer");
    return std::nullopt;
  }
  return f->get<long long>();
}

std::optional<std::uint64_t> read_seed(const json& obj, const char* key, const std::string& path,
                                       Errors& errs, std::optional<std::uint64_t> fallback) {
  const json* f = field(obj, key);
  if (!f) {
    if (!fallback) errs.add(path + "." + key + " is required");
    return fallback;
  }
  if (f->is_number_unsigned()) return f->get<std::uint64_t>();
  if (f->is_number_integer() && f->get<long long>() >= 0) {
    return static_cast<std::uint64_t>(f->get<long long>());
  }
  errs.add(path + "." + key + " must be a non-negative 64-bit integer");
  return std::nullopt;
}

std::optional<Norm> read_norm(const json& obj, Errors& errs) {
  const json* f = field(obj, "norm");
  if (!f) return Norm::L2;
  if (f->is_string()) {
    const std::string v = f->get<std::string>();
    if (v == "l1") return Norm::L1;
    if (v == "l2") return Norm::L2;
    if (v == "linf") return Norm::LInf;
  }
  errs.add("norm must be one of \"l1\", \"l2\", \"linf\"");
  return std::nullopt;
}

std::optional<VectorXd> read_vector(const json& j, const std::string& path, Eigen::Index size,
                                    Errors& errs) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    std::ostringstream msg;
    msg << path << " must be an array of " << size << " numbers";
    errs.add(msg.str());
    return std::nullopt;
  }
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      std::ostringstream msg;
      msg << path << "[" << i << "] must be a number";
      errs.add(msg.str());
      return std::nullopt;
    }
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

std::optional<SusceptibilityMatrix> read_matrix(const json& j, const std::string& path,
                                                Eigen::Index cols, Errors& errs) {
  if (!j.is_array() || j.size() != kCriterionCount) {
    std::ostringstream msg;
    msg << path << " must be an array of " << kCriterionCount << " rows";
    errs.add(msg.str());
    return std::nullopt;
  }
  SusceptibilityMatrix m(kCriterionCount, cols);
  for (int r = 0; r < kCriterionCount; ++r) {
    std::ostringstream row_path;
    row_path << path << "[" << r << "]";
    const auto row = read_vector(j[static_cast<std::size_t>(r)], row_path.str(), cols, errs);
    if (!row) return std::nullopt;
    m.row(r) = row->transpose();
  }
  return m;
}

void validate_unit_matrix(const SusceptibilityMatrix& m, const std::string& path, Errors& errs) {
  for (int r = 0; r < kCriterionCount; ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!(m(r, c) >= 0.0 && m(r, c) <= 1.0)) {
        std::ostringstream msg;
        msg << path << "[" << r << "][" << c << "] must lie in [0,1]";
        errs.add(msg.str());
      }
    }
  }
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

std::optional<Range> read_range(const json& obj, const char* key, const std::string& path,
                                Range fallback, double legal_lo, double legal_hi, Errors& errs) {
  const json* f = field(obj, key);
  if (!f) return fallback;
  const std::string rp = path + "." + key;
  if (!f->is_object()) {
    errs.add(rp + " must be an object {lo, hi}");
    return std::nullopt;
  }
  check_keys(*f, rp, {"lo", "hi"}, errs);
  const auto lo = read_number(*f, "lo", rp, errs, std::nullopt);
  const auto hi = read_number(*f, "hi", rp, errs, std::nullopt);
  if (!lo || !hi) return std::nullopt;
  if (!(*lo <= *hi)) {
    errs.add(rp + ": lo must be <= hi");
    return std::nullopt;
  }
  if (*lo < legal_lo || *hi > legal_hi) {
    std::ostringstream msg;
    msg << rp << " must lie within [" << legal_lo << ", " << legal_hi << "]";
    errs.add(msg.str());
    return std::nullopt;
  }
  return Range{*lo, *hi};
}

AgentProfile parse_agent(const json& j, const std::string& path, Eigen::Index cue_count,
                         Errors& errs) {
  AgentProfile agent;
  agent.susceptibility_prior = SusceptibilityMatrix::Zero(kCriterionCount, cue_count);
  agent.susceptibility_posterior = agent.susceptibility_prior;
  agent.baseline = Vector4d::Ones();
  agent.clickthrough << 0.01, 0.10, 1.0, 1.0;  // implementation defaults, not measured values

  if (!j.is_object()) {
    errs.add(path + " must be an object");
    return agent;
  }
  check_keys(j, path,
             {"susceptibility_prior", "susceptibility_posterior", "baseline", "clickthrough",
              "is_target"},
             errs);

  if (const json* f = field(j, "susceptibility_prior")) {
    if (auto m = read_matrix(*f, path + ".susceptibility_prior", cue_count, errs)) {
      validate_unit_matrix(*m, path + ".susceptibility_prior", errs);
      agent.susceptibility_prior = *m;
      agent.susceptibility_posterior = *m;  // default posterior: identical
    }
  } else {
    errs.add(path + ".susceptibility_prior is required");
  }

  if (const json* f = field(j, "susceptibility_posterior")) {
    if (auto m = read_matrix(*f, path + ".susceptibility_posterior", cue_count, errs)) {
      validate_unit_matrix(*m, path + ".susceptibility_posterior", errs);
      agent.susceptibility_posterior = *m;
      const int routine = criterion_index(ChoiceCriterion::Routine);
      for (Eigen::Index c = 0; c < cue_count; ++c) {
        if (m->coeff(routine, c) < agent.susceptibility_prior(routine, c)) {
          std::ostringstream msg;
          msg << path << ".susceptibility_posterior[" << routine << "][" << c
              << "] must be >= susceptibility_prior[" << routine << "][" << c << "]";
          errs.add(msg.str());
        }
      }
    }
  }

  if (const json* f = field(j, "baseline")) {
    if (auto v = read_vector(*f, path + ".baseline", kCriterionCount, errs)) {
      agent.baseline = *v;
      for (int i = 0; i < kCriterionCount; ++i) {
        if (!((*v)[i] >= 1e-9) || !std::isfinite((*v)[i])) {
          std::ostringstream msg;
          msg << path << ".baseline[" << i << "] must be > 0";
          errs.add(msg.str());
        }
      }
    }
  } else {
    errs.add(path + ".baseline is required");
  }

  if (const json* f = field(j, "clickthrough")) {
    if (auto v = read_vector(*f, path + ".clickthrough", kCriterionCount, errs)) {
      agent.clickthrough = *v;
      for (int i = 0; i < 2; ++i) {
        if (!((*v)[i] >= 0.0 && (*v)[i] <= 1.0)) {
          std::ostringstream msg;
          msg << path << ".clickthrough[" << i << "] must lie in [0,1]";
          errs.add(msg.str());
        }
      }
      // Impulsive and Routine click-through are structural, not configurable.
      for (int i = 2; i < kCriterionCount; ++i) {
        if ((*v)[i] != 1.0) {
          std::ostringstream msg;
          msg << path << ".clickthrough[" << i << "] must equal 1";
          errs.add(msg.str());
        }
      }
    }
  }

  if (const json* f = field(j, "is_target")) {
    if (f->is_boolean()) {
      agent.is_target = f->get<bool>();
    } else {
      errs.add(path + ".is_target must be a boolean");
    }
  }
  return agent;
}

std::vector<AgentProfile> generate_agents(const json& j, int n, int m, Eigen::Index cue_count,
                                          Errors& errs) {
  const std::string path = "agents";
  check_keys(j, path,
             {"count_targets", "count_nontargets", "generation_seed", "susceptibility_range",
              "routine_boost_range", "baseline_range", "rho1_range", "rho2_range"},
             errs);

  const auto targets = read_integer(j, "count_targets", path, errs, std::nullopt);
  const auto nontargets = read_integer(j, "count_nontargets", path, errs, std::nullopt);
  const auto gen_seed = read_seed(j, "generation_seed", path, errs, std::nullopt);
  const auto susceptibility = read_range(j, "susceptibility_range", path, {0.0, 1.0}, 0.0, 1.0, errs);
  const auto boost = read_range(j, "routine_boost_range", path, {0.0, 1.0}, 0.0, 1.0, errs);
  const auto baseline = read_range(j, "baseline_range", path, {0.1, 1.0}, 1e-9, 1e12, errs);
  const auto rho1 = read_range(j, "rho1_range", path, {0.0, 0.05}, 0.0, 1.0, errs);
  const auto rho2 = read_range(j, "rho2_range", path, {0.02, 0.2}, 0.0, 1.0, errs);

  std::vector<AgentProfile> agents;
  if (!targets || !nontargets || !gen_seed || !susceptibility || !boost || !baseline || !rho1 ||
      !rho2) {
    return agents;
  }
  if (*targets != m) errs.add("agents.count_targets must equal m");
  if (*targets + *nontargets != n) errs.add("agents.count_targets + count_nontargets must equal n");
  if (!errs.list.empty()) return agents;

  // Deterministic materialization: agents in index order (targets first);
  // per agent the draws are prior susceptibility (row-major), routine
  // posterior boosts, baselines, then the two click-through probabilities.
  SplitMix64 rng = SplitMix64::for_stream(*gen_seed, 0);
  const int routine = criterion_index(ChoiceCriterion::Routine);
  agents.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    AgentProfile agent;
    agent.is_target = i < m;
    agent.susceptibility_prior.resize(kCriterionCount, cue_count);
    for (int r = 0; r < kCriterionCount; ++r) {
      for (Eigen::Index c = 0; c < cue_count; ++c) {
        agent.susceptibility_prior(r, c) = rng.next_in(susceptibility->lo, susceptibility->hi);
      }
    }
    agent.susceptibility_posterior = agent.susceptibility_prior;
    for (Eigen::Index c = 0; c < cue_count; ++c) {
      const double b = rng.next_in(boost->lo, boost->hi);
      const double prior = agent.susceptibility_prior(routine, c);
      agent.susceptibility_posterior(routine, c) = prior + b * (1.0 - prior);
    }
    for (int r = 0; r < kCriterionCount; ++r) {
      agent.baseline[r] = rng.next_in(baseline->lo, baseline->hi);
    }
    agent.clickthrough << rng.next_in(rho1->lo, rho1->hi), rng.next_in(rho2->lo, rho2->hi), 1.0,
        1.0;
    agents.push_back(std::move(agent));
  }
  return agents;
}

ScenarioConfig parse_document(const json& doc, const std::string& origin) {
  Errors errs;
  if (!doc.is_object()) {
    errs.add("document root must be an object");
    errs.finish(origin);
  }
  check_keys(doc, "scenario",
             {"n", "m", "A", "horizon", "seed", "norm", "attacker", "payoffs", "agents",
              "cue_labels"},
             errs);

  ScenarioConfig cfg;
  const auto n = read_integer(doc, "n", "scenario", errs, std::nullopt);
  const auto m = read_integer(doc, "m", "scenario", errs, std::nullopt);
  const auto cue_count = read_integer(doc, "A", "scenario", errs, std::nullopt);
  const auto horizon = read_integer(doc, "horizon", "scenario", errs, 100);
  const auto seed = read_seed(doc, "seed", "scenario", errs, 0);
  const auto norm = read_norm(doc, errs);

  if (n && m && !(1 <= *m && *m < *n)) errs.add("m must satisfy 1 <= m < n");
  if (cue_count && *cue_count < 1) errs.add("A must be >= 1");
  if (horizon && *horizon < 1) errs.add("horizon must be >= 1");
  errs.finish(origin);  // structural problems make the rest unreadable

  cfg.n = static_cast<int>(*n);
  cfg.m = static_cast<int>(*m);
  cfg.cue_count = static_cast<int>(*cue_count);
  cfg.horizon = static_cast<int>(*horizon);
  cfg.seed = *seed;
  cfg.norm = *norm;

  cfg.attacker.effort_weights = VectorXd::Zero(cfg.cue_count);
  cfg.attacker.norm = cfg.norm;
  if (const json* att = field(doc, "attacker")) {
    if (!att->is_object()) {
      errs.add("attacker must be an object");
    } else {
      check_keys(*att, "attacker", {"value_of_success", "effort_base", "effort_weights"}, errs);
      if (const auto v = read_number(*att, "value_of_success", "attacker", errs, 1.0)) {
        if (!(*v > 0.0) || !std::isfinite(*v)) {
          errs.add("attacker.value_of_success must be > 0");
        } else {
          cfg.attacker.value_of_success = *v;
        }
      }
      if (const auto v = read_number(*att, "effort_base", "attacker", errs, 0.0)) {
        if (!(*v >= 0.0) || !std::isfinite(*v)) {
          errs.add("attacker.effort_base must be >= 0");
        } else {
          cfg.attacker.effort_base = *v;
        }
      }
      if (const json* w = field(*att, "effort_weights")) {
        if (auto vec = read_vector(*w, "attacker.effort_weights", cfg.cue_count, errs)) {
          cfg.attacker.effort_weights = *vec;
          for (Eigen::Index i = 0; i < vec->size(); ++i) {
            if (!((*vec)[i] >= 0.0) || !std::isfinite((*vec)[i])) {
              std::ostringstream msg;
              msg << "attacker.effort_weights[" << i << "] must be >= 0";
              errs.add(msg.str());
            }
          }
        }
      }
    }
  }

  if (const json* pay = field(doc, "payoffs")) {
    if (!pay->is_object()) {
      errs.add("payoffs must be an object");
    } else {
      check_keys(*pay, "payoffs", {"b_tn", "b_tp", "c_fn", "c_fp"}, errs);
      const auto get = [&](const char* key, double fallback) -> double {
        const auto v = read_number(*pay, key, "payoffs", errs, fallback);
        if (v && (!std::isfinite(*v) || *v < 0.0)) {
          errs.add(std::string("payoffs.") + key + " must be finite and >= 0");
          return fallback;
        }
        return v.value_or(fallback);
      };
      cfg.payoffs.b_tn = get("b_tn", 1.0);
      cfg.payoffs.b_tp = get("b_tp", 1.0);
      cfg.payoffs.c_fn = get("c_fn", 1.0);
      cfg.payoffs.c_fp = get("c_fp", 1.0);
    }
  }

  // labels are descriptive metadata for the cue axes; nothing keys off them
  if (const json* labels = field(doc, "cue_labels")) {
    if (!labels->is_array() || static_cast<int>(labels->size()) != cfg.cue_count) {
      errs.add("cue_labels must be an array of A strings");
    } else {
      for (const auto& l : *labels) {
        if (!l.is_string()) {
          errs.add("cue_labels must be an array of A strings");
          break;
        }
        cfg.cue_labels.push_back(l.get<std::string>());
      }
    }
  }

  const json* agents = field(doc, "agents");
  if (!agents) {
    errs.add("agents is required (explicit list or generator object)");
  } else if (agents->is_array()) {
    if (static_cast<int>(agents->size()) != cfg.n) {
      std::ostringstream msg;
      msg << "agents must list exactly n=" << cfg.n << " entries, found " << agents->size();
      errs.add(msg.str());
    }
    for (std::size_t i = 0; i < agents->size(); ++i) {
      std::ostringstream path;
      path << "agents[" << i << "]";
      cfg.agents.push_back(parse_agent((*agents)[i], path.str(), cfg.cue_count, errs));
    }
    const auto target_count =
        std::count_if(cfg.agents.begin(), cfg.agents.end(), [](const auto& a) { return a.is_target; });
    if (static_cast<int>(cfg.agents.size()) == cfg.n && target_count != cfg.m) {
      std::ostringstream msg;
      msg << "agents must contain exactly m=" << cfg.m << " targets, found " << target_count;
      errs.add(msg.str());
    }
  } else if (agents->is_object()) {
    cfg.agents = generate_agents(*agents, cfg.n, cfg.m, cfg.cue_count, errs);
  } else {
    errs.add("agents must be an array of agent objects or a generator object");
  }

  errs.finish(origin);
  return cfg;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json agent_to_json(const AgentProfile& agent) {
  json j;
  auto matrix_rows = [](const SusceptibilityMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < kCriterionCount; ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["susceptibility_prior"] = matrix_rows(agent.susceptibility_prior);
  j["susceptibility_posterior"] = matrix_rows(agent.susceptibility_posterior);
  j["baseline"] = {agent.baseline[0], agent.baseline[1], agent.baseline[2], agent.baseline[3]};
  j["clickthrough"] = {agent.clickthrough[0], agent.clickthrough[1], agent.clickthrough[2],
                       agent.clickthrough[3]};
  j["is_target"] = agent.is_target;
  return j;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario parse error (" + origin + "): " + e.what());
  }
  return parse_document(doc, origin);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

void save_scenario(const ScenarioConfig& scenario, const std::filesystem::path& path) {
  json doc;
  doc["n"] = scenario.n;
  doc["m"] = scenario.m;
  doc["A"] = scenario.cue_count;
  doc["horizon"] = scenario.horizon;
  doc["seed"] = scenario.seed;
  doc["norm"] = norm_name(scenario.norm);
  json att;
  att["value_of_success"] = scenario.attacker.value_of_success;
  att["effort_base"] = scenario.attacker.effort_base;
  json weights = json::array();
  for (Eigen::Index i = 0; i < scenario.attacker.effort_weights.size(); ++i) {
    weights.push_back(scenario.attacker.effort_weights[i]);
  }
  att["effort_weights"] = std::move(weights);
  doc["attacker"] = std::move(att);
  doc["payoffs"] = {{"b_tn", scenario.payoffs.b_tn},
                    {"b_tp", scenario.payoffs.b_tp},
                    {"c_fn", scenario.payoffs.c_fn},
                    {"c_fp", scenario.payoffs.c_fp}};
  if (!scenario.cue_labels.empty()) doc["cue_labels"] = scenario.cue_labels;
  json agents = json::array();
  for (const auto& agent : scenario.agents) agents.push_back(agent_to_json(agent));
  doc["agents"] = std::move(agents);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ResultFiles write_results(const SimulationResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ResultFiles files{out_dir / "replications.csv", out_dir / "aggregates.csv"};

  {
    std::ofstream out(files.replications_csv);
    if (!out) throw std::runtime_error("cannot open for writing: " + files.replications_csv.string());
    out << "replication,breached,breach_round,breach_path,rounds,recipient_payoff\n";
    for (const auto& r : result.records) {
      out << r.replication << ',' << (r.breached ? 1 : 0) << ',';
      if (r.breach_round) out << *r.breach_round;
      out << ',';
      if (r.breach_path) out << breach_path_name(*r.breach_path);
      out << ',' << r.rounds << ',' << format17(r.recipient_payoff) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + files.replications_csv.string());
  }
  {
    const Aggregates& a = result.aggregates;
    std::ofstream out(files.aggregates_csv);
    if (!out) throw std::runtime_error("cannot open for writing: " + files.aggregates_csv.string());
    out << "metric,value,ci_halfwidth\n";
    out << "replications," << a.replications << ",\n";
    out << "breaches," << a.breaches << ",\n";
    out << "censored," << a.censored << ",\n";
    out << "breach_probability," << format17(a.breach_probability) << ','
        << format17(a.breach_probability_hw) << '\n';
    out << "stepping_stone_fraction,";
    if (a.stepping_stone_fraction) {
      out << format17(*a.stepping_stone_fraction) << ',' << format17(*a.stepping_stone_fraction_hw);
    } else {
      out << ',';
    }
    out << '\n';
    out << "mean_rounds_to_breach,";
    if (a.mean_rounds_to_breach) {
      out << format17(*a.mean_rounds_to_breach) << ',' << format17(*a.mean_rounds_to_breach_hw);
    } else {
      out << ',';
    }
    out << '\n';
    out << "mean_recipient_payoff," << format17(a.mean_recipient_payoff) << ','
        << format17(a.mean_recipient_payoff_hw) << '\n';
    if (!out) throw std::runtime_error("write failed: " + files.aggregates_csv.string());
  }
  return files;
}

}  // namespace phishsim
