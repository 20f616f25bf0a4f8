#include "phishsim/cli.hpp"

#include "phishsim/analysis.hpp"
#include "phishsim/attacker.hpp"
#include "phishsim/campaign.hpp"
#include "phishsim/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace phishsim {

namespace {

using nlohmann::json;

unsigned thread_cap() {
  const char* env = std::getenv("PHISHSIM_THREADS");
  if (!env || !*env) return 0;  // auto
  std::string v(env);
  if (!std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ValidationError("PHISHSIM_THREADS must be a positive integer");
  }
  const unsigned long n = std::stoul(v);
  if (n < 1) throw ValidationError("PHISHSIM_THREADS must be a positive integer");
  return static_cast<unsigned>(n);
}

json bundle_to_json(const CueBundle& bundle) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < bundle.dim(); ++i) arr.push_back(bundle.emphasis[i]);
  return arr;
}

json verdict_to_json(const std::optional<bool>& v) {
  if (!v) return nullptr;  // indeterminate
  return *v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t replications,
                 const std::string& out_dir) {
  const ScenarioConfig scenario = load_scenario(scenario_path);
  const SimulationResult result = run_monte_carlo(scenario, replications, thread_cap());
  const ResultFiles files = write_results(result, out_dir);

  const Aggregates& a = result.aggregates;
  std::cout << "simulated " << a.replications << " replications of " << scenario_path << "\n"
            << "  breach probability     " << a.breach_probability << " +/- "
            << a.breach_probability_hw << "\n"
            << "  stepping-stone share   ";
  if (a.stepping_stone_fraction) {
    std::cout << *a.stepping_stone_fraction << " +/- " << *a.stepping_stone_fraction_hw;
  } else {
    std::cout << "n/a (no breaches)";
  }
  std::cout << "\n  mean rounds to breach  ";
  if (a.mean_rounds_to_breach) {
    std::cout << *a.mean_rounds_to_breach << " +/- " << *a.mean_rounds_to_breach_hw;
  } else {
    std::cout << "n/a";
  }
  std::cout << "\n  censored               " << a.censored << "\n"
            << "wrote " << files.replications_csv.string() << "\n"
            << "wrote " << files.aggregates_csv.string() << "\n";
  return 0;
}

int cmd_optimize(const std::string& scenario_path, const std::string& regime_name_arg,
                 bool use_oracle, double step, const std::string& out_dir) {
  const ScenarioConfig scenario = load_scenario(scenario_path);
  const Regime regime = regime_name_arg == "posterior" ? Regime::Posterior : Regime::Prior;

  const OptimizationResult result =
      use_oracle ? grid_oracle_optimize(scenario.agents, scenario.attacker, regime, step)
                 : optimize_bundle(scenario.agents, scenario.attacker, regime);

  json out;
  out["method"] = result.method == OptimizeMethod::GridOracle ? "grid_oracle" : "gradient_multistart";
  out["regime"] = regime_name(regime);
  out["bundle"] = bundle_to_json(result.best_bundle);
  out["value"] = result.best_value;
  out["evaluations"] = result.evaluations;
  out["converged"] = result.converged;
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "optimization.json";
  write_text(path, out.dump(2) + "\n");

  std::cout << (use_oracle ? "grid oracle" : "projected gradient ascent") << " ("
            << regime_name(regime) << " regime)\n"
            << "  best bundle [" << result.best_bundle.emphasis.transpose() << "]\n"
            << "  value       " << result.best_value << "\n"
            << "  evaluations " << result.evaluations << (result.converged ? " (converged)" : "")
            << "\n"
            << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_analyze(const std::string& scenario_path, double step, const std::string& out_dir) {
  const ScenarioConfig scenario = load_scenario(scenario_path);
  const DominanceReport report = dominance_report(scenario.agents, scenario.attacker, step);

  const int impulsive = criterion_index(ChoiceCriterion::Impulsive);
  const double pi3_max = report.prior[impulsive].max_selection;
  const FirstClickProbabilities fc = first_click_probabilities(pi3_max, scenario.n, scenario.m);

  json out;
  json dominance;
  auto criterion_stats = [&](const std::array<CriterionStats, kCriterionCount>& stats) {
    json arr = json::array();
    for (int i = 0; i < kCriterionCount; ++i) {
      json entry;
      entry["criterion"] = criterion_name(criterion_from_index(i));
      entry["bundle"] = bundle_to_json(stats[i].bundle);
      entry["max_selection"] = stats[i].max_selection;
      entry["effort"] = stats[i].effort;
      entry["channel_value"] = stats[i].channel_value;
      arr.push_back(std::move(entry));
    }
    return arr;
  };
  dominance["prior"] = criterion_stats(report.prior);
  dominance["posterior"] = criterion_stats(report.posterior);
  dominance["deliberative_dominated"] = verdict_to_json(report.deliberative_dominated);
  dominance["deliberative_operands"] = {report.deliberative_left, report.deliberative_right};
  dominance["behavioral_dominated_by_impulsive"] =
      verdict_to_json(report.behavioral_dominated_by_impulsive);
  dominance["behavioral_operands"] = {report.behavioral_left, report.behavioral_right};
  dominance["routine_dominates_impulsive_posterior"] =
      verdict_to_json(report.routine_dominates_impulsive_posterior);
  dominance["routine_operands"] = {report.routine_left, report.routine_right};
  out["dominance"] = std::move(dominance);

  out["first_click"] = {{"pi3_max", pi3_max},
                        {"p_nontarget", fc.nontarget},
                        {"p_target", fc.target}};

  json curve = json::array();
  const int k_max = std::min(scenario.horizon, 25);
  for (int k = 1; k <= k_max; ++k) {
    curve.push_back({{"k", k},
                     {"p_breach_target", disjunctive_accumulation(fc.target, k)},
                     {"p_breach_nontarget", disjunctive_accumulation(fc.nontarget, k)}});
  }
  out["disjunctive_curve"] = std::move(curve);

  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "analysis.json";
  write_text(path, out.dump(2) + "\n");

  auto verdict_str = [](const std::optional<bool>& v) {
    return !v ? "indeterminate" : (*v ? "yes" : "no");
  };
  std::cout << "dominance analysis of " << scenario_path << " (grid step " << step << ")\n"
            << "  deliberative dominated by behavioral:   "
            << verdict_str(report.deliberative_dominated) << "  (" << report.deliberative_left
            << " vs " << report.deliberative_right << ")\n"
            << "  behavioral dominated by impulsive:      "
            << verdict_str(report.behavioral_dominated_by_impulsive) << "  ("
            << report.behavioral_left << " < " << report.behavioral_right << ")\n"
            << "  routine dominates impulsive (insider):  "
            << verdict_str(report.routine_dominates_impulsive_posterior) << "  ("
            << report.routine_left << " < " << report.routine_right << ")\n"
            << "  round-1 click probability: non-target " << fc.nontarget << ", target "
            << fc.target << "\n"
            << "wrote " << path.string() << "\n";
  return 0;
}

std::vector<TrainingIntervention> load_interventions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open interventions file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("interventions parse error (" + path + "): " + e.what());
  }
  if (!doc.is_array()) {
    throw ValidationError("interventions file must contain an array of {kind, magnitude}");
  }
  std::vector<TrainingIntervention> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object() || !item.contains("kind") || !item.contains("magnitude") ||
        item.size() != 2 || !item["kind"].is_string() || !item["magnitude"].is_number()) {
      throw ValidationError("interventions[" + std::to_string(i) +
                            "] must be {\"kind\": string, \"magnitude\": number}");
    }
    const std::string kind = item["kind"].get<std::string>();
    TrainingIntervention intervention;
    using Kind = TrainingIntervention::Kind;
    if (kind == "reduce_rho1") {
      intervention.kind = Kind::ReduceRho1;
    } else if (kind == "reduce_rho2") {
      intervention.kind = Kind::ReduceRho2;
    } else if (kind == "raise_chi1") {
      intervention.kind = Kind::RaiseChi1;
    } else if (kind == "scale_chi34") {
      intervention.kind = Kind::ScaleChi34;
    } else if (kind == "scale_susceptibility34") {
      intervention.kind = Kind::ScaleSusceptibility34;
    } else {
      throw ValidationError("interventions[" + std::to_string(i) + "] has unknown kind '" + kind +
                            "'");
    }
    intervention.magnitude = item["magnitude"].get<double>();
    out.push_back(intervention);
  }
  return out;
}

int cmd_policy(const std::string& scenario_path, const std::string& interventions_path,
               std::uint64_t replications, const std::string& out_dir) {
  const ScenarioConfig scenario = load_scenario(scenario_path);
  const auto interventions = load_interventions(interventions_path);
  const PolicyComparison table =
      policy_comparison(scenario, interventions, replications, thread_cap());

  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "policy.csv";
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "label,breach_probability,ci_halfwidth,delta_vs_base\n";
    char buf[192];
    for (const auto& row : table.rows) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", row.label.c_str(),
                    row.breach_probability, row.ci_halfwidth, row.delta_vs_base);
      out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }

  std::cout << "policy comparison at R=" << replications << " (common random numbers)\n";
  for (const auto& row : table.rows) {
    std::cout << "  " << row.label << ": breach " << row.breach_probability << " +/- "
              << row.ci_halfwidth << ", delta vs base " << row.delta_vs_base << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"phishsim: phishing-campaign simulator and cue-bundle optimizer"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t replications = 1000;
  std::string regime = "prior";
  bool use_oracle = false;
  double step = 0.01;
  std::string interventions_path;

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo campaign");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--replications", replications, "number of replications")->required();
  simulate->add_option("--out", out_dir, "output directory");

  auto* optimize = app.add_subcommand("optimize", "solve the attacker's cue-design program");
  optimize->add_option("--scenario", scenario_path, "scenario file")->required();
  optimize->add_option("--regime", regime, "prior|posterior")
      ->check(CLI::IsMember({"prior", "posterior"}));
  optimize->add_flag("--oracle", use_oracle, "use the exhaustive lattice oracle");
  optimize->add_option("--step", step, "lattice step for --oracle");
  optimize->add_option("--out", out_dir, "output directory");

  auto* analyze = app.add_subcommand("analyze", "dominance report and closed forms");
  analyze->add_option("--scenario", scenario_path, "scenario file")->required();
  analyze->add_option("--step", step, "lattice step");
  analyze->add_option("--out", out_dir, "output directory");

  auto* policy = app.add_subcommand("policy", "compare training interventions");
  policy->add_option("--scenario", scenario_path, "scenario file")->required();
  policy->add_option("--interventions", interventions_path, "interventions file (JSON array)")
      ->required();
  policy->add_option("--replications", replications, "number of replications")->required();
  policy->add_option("--out", out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, replications, out_dir);
    if (optimize->parsed()) return cmd_optimize(scenario_path, regime, use_oracle, step, out_dir);
    if (analyze->parsed()) return cmd_analyze(scenario_path, step, out_dir);
    if (policy->parsed()) return cmd_policy(scenario_path, interventions_path, replications, out_dir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace phishsim
