#include "chartlab/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "chartlab/generalization.hpp"
#include "chartlab/parallel.hpp"
#include "chartlab/rng.hpp"
#include "chartlab/serialize.hpp"
#include "chartlab/trainer.hpp"

namespace chartlab {

namespace {

// Experiment-level stream tags, disjoint from the library's seed_tag set.
constexpr std::uint64_t kTagSourceAtlas = 0x30;
constexpr std::uint64_t kTagTargetAtlas = 0x31;
constexpr std::uint64_t kTagRun = 0x32;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const RunOptions& options,
                 const std::vector<std::string>& allowed) {
  std::ifstream in(options.config_path);
  if (!in) throw ConfigError("cannot open config: " + options.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (!cfg.contains("schema_version") ||
      cfg.at("schema_version") != 1) {
    throw ConfigError("config requires \"schema_version\": 1");
  }
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    if (key == "schema_version") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key: \"" + key + "\"");
    }
  }
  return cfg;
}

template <class T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for \"" + key + "\": " + e.what());
  }
}

template <class T>
T get_req(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw ConfigError("missing config key: \"" + key + "\"");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for \"" + key + "\": " + e.what());
  }
}

std::vector<std::uint64_t> resolve_seeds(const json& cfg,
                                         const RunOptions& options) {
  std::vector<std::uint64_t> seeds;
  if (options.seed_override.has_value()) {
    seeds.push_back(*options.seed_override);
    return seeds;
  }
  seeds = get_req<std::vector<std::uint64_t>>(cfg, "seeds");
  if (seeds.empty()) throw ConfigError("seed list must be non-empty");
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

std::string resolve_emit(const json& cfg, const RunOptions& options) {
  std::string emit = options.emit_override.value_or(
      get_or<std::string>(cfg, "emit", "csv"));
  if (emit != "csv" && emit != "json") {
    throw ConfigError("emit must be \"csv\" or \"json\"");
  }
  return emit;
}

std::filesystem::path prepare_out_dir(const RunOptions& options) {
  std::filesystem::path dir(options.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void apply_threads(const RunOptions& options) {
  if (options.threads > 0) par::set_max_threads(options.threads);
}

std::string perm_or_dash(const std::optional<Permutation>& p) {
  return p.has_value() ? p->cycle_string() : "-";
}

// --- verify-localization -------------------------------------------------

int run_verify_localization(const RunOptions& options) {
  const json cfg = load_config(
      options, {"dimension", "k", "mean_scale", "trace_source", "trace_target",
                "permutation", "n_per_pair", "seeds", "match_threshold",
                "emit"});
  const int d = get_req<int>(cfg, "dimension");
  const int k = get_req<int>(cfg, "k");
  const double mean_scale = get_req<double>(cfg, "mean_scale");
  const double trace_source = get_req<double>(cfg, "trace_source");
  const double trace_target = get_req<double>(cfg, "trace_target");
  const auto n_per_pair = get_req<std::int64_t>(cfg, "n_per_pair");
  const double match_threshold = get_or<double>(cfg, "match_threshold", 1.0);
  std::vector<int> mapping =
      get_or<std::vector<int>>(cfg, "permutation", std::vector<int>{});
  if (mapping.empty()) {
    mapping.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) mapping[static_cast<std::size_t>(i)] = i;
  }
  Permutation p = [&] {
    try {
      return Permutation(mapping);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad permutation: ") + e.what());
    }
  }();
  if (p.size() != k) throw ConfigError("permutation size must equal k");
  const auto seeds = resolve_seeds(cfg, options);
  const std::string emit = resolve_emit(cfg, options);
  const auto out_dir = prepare_out_dir(options);

  CsvTable table;
  table.header = {"seed",           "match",        "conclusive",
                  "recovered",      "objective_eq14", "objective_eq16",
                  "discrepancy"};
  json reports = json::array();
  int matches = 0;
  int inconclusive = 0;
  for (const std::uint64_t seed : seeds) {
    const ManifoldSpec source = build_atlas(
        k, d, mean_scale, trace_source, derive_seed(seed, kTagSourceAtlas));
    const ManifoldSpec target = build_atlas(
        k, d, mean_scale, trace_target, derive_seed(seed, kTagTargetAtlas));
    const PiecewiseAffineGenerator g = ideal_generator(source, target, p);
    const CostMatrix c =
        cost_matrix(g, source, target, n_per_pair, derive_seed(seed, kTagRun));
    const LocalizationReport report = verify_localization(c, p);
    matches += report.match ? 1 : 0;
    inconclusive += report.conclusive() ? 0 : 1;

    table.rows.push_back({std::to_string(seed), report.match ? "1" : "0",
                          report.conclusive() ? "1" : "0",
                          perm_or_dash(report.recovered),
                          fmt_double(report.objective_eq14),
                          fmt_double(report.objective_eq16),
                          fmt_double(report.discrepancy)});
    json entry = to_json(report);
    entry["seed"] = seed;
    reports.push_back(std::move(entry));

    if (emit == "csv") {
      write_text_file(
          (out_dir / ("cost_matrix_seed" + std::to_string(seed) + ".csv"))
              .string(),
          matrix_to_csv(c.entries));
      write_text_file(
          (out_dir / ("coupling_seed" + std::to_string(seed) + ".csv"))
              .string(),
          matrix_to_csv(solve_coupling(c).coupling.entries()));
    }
  }

  const double match_rate =
      static_cast<double>(matches) / static_cast<double>(seeds.size());
  const double inconclusive_rate =
      static_cast<double>(inconclusive) / static_cast<double>(seeds.size());

  if (emit == "csv") {
    write_text_file((out_dir / "verify_localization.csv").string(),
                    table.to_string());
    CsvTable summary;
    summary.header = {"n_seeds", "match_rate", "inconclusive_rate",
                      "match_threshold", "pass"};
    summary.rows.push_back({std::to_string(seeds.size()),
                            fmt_double(match_rate),
                            fmt_double(inconclusive_rate),
                            fmt_double(match_threshold),
                            match_rate >= match_threshold ? "1" : "0"});
    write_text_file((out_dir / "summary.csv").string(), summary.to_string());
  } else {
    json doc{{"reports", std::move(reports)},
             {"summary",
              json{{"n_seeds", seeds.size()},
                   {"match_rate", match_rate},
                   {"inconclusive_rate", inconclusive_rate},
                   {"match_threshold", match_threshold},
                   {"pass", match_rate >= match_threshold}}}};
    write_text_file((out_dir / "verify_localization.json").string(),
                    doc.dump(2) + "\n");
  }
  std::cout << "verify-localization: match_rate=" << fmt_double(match_rate)
            << " inconclusive_rate=" << fmt_double(inconclusive_rate) << "\n";
  return match_rate >= match_threshold ? 0 : 1;
}

// --- prop1 ----------------------------------------------------------------

int run_prop1(const RunOptions& options) {
  const json cfg = load_config(
      options, {"dimension", "k_list", "m_list", "mean_scale", "trace",
                "lk_forms", "seeds", "n_mc", "paper_threshold", "mc_threshold",
                "emit"});
  const int d = get_req<int>(cfg, "dimension");
  const auto k_list = get_req<std::vector<int>>(cfg, "k_list");
  const auto m_list = get_req<std::vector<std::int64_t>>(cfg, "m_list");
  const double mean_scale = get_req<double>(cfg, "mean_scale");
  const double trace = get_req<double>(cfg, "trace");
  const auto form_names = get_or<std::vector<std::string>>(
      cfg, "lk_forms", {"paper_closed", "monte_carlo"});
  const auto n_mc = get_or<std::int64_t>(cfg, "n_mc", 20000);
  const double paper_threshold = get_or<double>(cfg, "paper_threshold", 1.0);
  const double mc_threshold = get_or<double>(cfg, "mc_threshold", 0.95);
  if (k_list.empty() || m_list.empty() || form_names.empty()) {
    throw ConfigError("k_list, m_list and lk_forms must be non-empty");
  }
  std::vector<LkForm> forms;
  for (const auto& name : form_names) {
    try {
      forms.push_back(lk_form_from_string(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  const auto seeds = resolve_seeds(cfg, options);
  const std::string emit = resolve_emit(cfg, options);
  const auto out_dir = prepare_out_dir(options);

  CsvTable table;
  table.header = {"k", "m", "eps_local", "eps_global", "holds", "lk_form",
                  "seed"};
  json rows = json::array();
  std::int64_t paper_total = 0, paper_holds = 0;
  std::int64_t mc_total = 0, mc_holds = 0;
  for (const int k : k_list) {
    for (const std::int64_t m : m_list) {
      for (const LkForm form : forms) {
        for (const std::uint64_t seed : seeds) {
          const ManifoldSpec spec =
              build_atlas(k, d, mean_scale, trace,
                          derive_seed(seed, kTagSourceAtlas,
                                      static_cast<std::uint64_t>(k)));
          const LocalGlobalReport report = eps_local_global(
              spec, m, form,
              derive_seed(seed, kTagRun,
                          static_cast<std::uint64_t>(k) * 1000003u +
                              static_cast<std::uint64_t>(m)),
              n_mc);
          const bool holds = report.eps_local < report.eps_global;
          // K = 1 rows are degenerate (local == global) and stay out of the
          // pass rates.
          if (k >= 2) {
            if (form == LkForm::paper_closed) {
              ++paper_total;
              paper_holds += holds ? 1 : 0;
            } else {
              ++mc_total;
              mc_holds += holds ? 1 : 0;
            }
          }
          table.rows.push_back({std::to_string(k), std::to_string(m),
                                fmt_double(report.eps_local),
                                fmt_double(report.eps_global),
                                holds ? "1" : "0", to_string(form),
                                std::to_string(seed)});
          json row = to_json(report);
          row["holds"] = holds;
          row["seed"] = seed;
          rows.push_back(std::move(row));
        }
      }
    }
  }

  const double paper_rate =
      paper_total > 0
          ? static_cast<double>(paper_holds) / static_cast<double>(paper_total)
          : 1.0;
  const double mc_rate =
      mc_total > 0 ? static_cast<double>(mc_holds) / static_cast<double>(mc_total)
                   : 1.0;
  const bool pass = paper_rate >= paper_threshold && mc_rate >= mc_threshold;

  if (emit == "csv") {
    write_text_file((out_dir / "prop1.csv").string(), table.to_string());
    CsvTable summary;
    summary.header = {"paper_rows", "paper_rate", "mc_rows", "mc_rate", "pass"};
    summary.rows.push_back({std::to_string(paper_total), fmt_double(paper_rate),
                            std::to_string(mc_total), fmt_double(mc_rate),
                            pass ? "1" : "0"});
    write_text_file((out_dir / "summary.csv").string(), summary.to_string());
  } else {
    json doc{{"rows", std::move(rows)},
             {"summary",
              json{{"paper_rows", paper_total},
                   {"paper_rate", paper_rate},
                   {"mc_rows", mc_total},
                   {"mc_rate", mc_rate},
                   {"pass", pass}}}};
    write_text_file((out_dir / "prop1.json").string(), doc.dump(2) + "\n");
  }
  std::cout << "prop1: paper_rate=" << fmt_double(paper_rate)
            << " mc_rate=" << fmt_double(mc_rate) << "\n";
  return pass ? 0 : 1;
}

// --- thm-scan ---------------------------------------------------------------

int run_thm_scan(const RunOptions& options) {
  const json cfg = load_config(
      options,
      {"dimension", "k", "mean_scale", "m_list", "n_list", "trace_source_list",
       "trace_target_list", "epsilon_list", "m_g_list", "eps_classical",
       "eps_adv", "lk_form", "seeds", "emit"});
  const int d = get_req<int>(cfg, "dimension");
  const int k = get_req<int>(cfg, "k");
  const double mean_scale = get_req<double>(cfg, "mean_scale");
  const auto m_list = get_req<std::vector<std::int64_t>>(cfg, "m_list");
  const auto n_list = get_req<std::vector<std::int64_t>>(cfg, "n_list");
  const auto tr_m_list = get_req<std::vector<double>>(cfg, "trace_source_list");
  const auto tr_n_list = get_req<std::vector<double>>(cfg, "trace_target_list");
  const auto eps_list = get_req<std::vector<double>>(cfg, "epsilon_list");
  const auto mg_list =
      get_or<std::vector<double>>(cfg, "m_g_list", std::vector<double>{});
  const double eps_classical = get_or<double>(cfg, "eps_classical", 0.0);
  const double eps_adv = get_or<double>(cfg, "eps_adv", 0.0);
  const LkForm form = [&] {
    try {
      return lk_form_from_string(get_or<std::string>(cfg, "lk_form", "paper_closed"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (m_list.empty() || n_list.empty() || tr_m_list.empty() ||
      tr_n_list.empty() || eps_list.empty()) {
    throw ConfigError("scan grids must be non-empty");
  }
  const auto seeds = resolve_seeds(cfg, options);
  const std::string emit = resolve_emit(cfg, options);
  const auto out_dir = prepare_out_dir(options);

  CsvTable table;
  table.header = {"m",      "n",       "tr_sigma_m", "tr_sigma_n", "m_g",
                  "epsilon", "gap_adv", "eps_classical", "eta",   "eps_local",
                  "eps_global", "lhs_22", "rhs_22",  "lhs_28",   "rhs_28",
                  "satisfied", "thm2_satisfied", "lk_form", "seed"};
  json rows = json::array();

  std::uint64_t cell = 0;
  for (const std::int64_t m : m_list) {
    for (const std::int64_t n : n_list) {
      for (const double tr_m : tr_m_list) {
        for (const double tr_n : tr_n_list) {
          for (const double epsilon : eps_list) {
            for (const std::uint64_t seed : seeds) {
              ++cell;
              const ManifoldSpec source = build_atlas(
                  k, d, mean_scale, tr_m, derive_seed(seed, kTagSourceAtlas));
              const ManifoldSpec target = build_atlas(
                  k, d, mean_scale, tr_n, derive_seed(seed, kTagTargetAtlas));
              const PiecewiseAffineGenerator g =
                  ideal_generator(source, target, Permutation::identity(k));

              Thm3Report thm3 = thm3_sides(g, source, target, n, m, epsilon,
                                           derive_seed(seed, kTagRun, cell));
              const double gap =
                  adv_gap(g, source, target, m * k, n * k, form,
                          derive_seed(seed, kTagRun, cell * 7 + 1));
              const auto paired = draw_paired_batch(
                  source, target, std::max<std::int64_t>(m, 2),
                  derive_seed(seed, kTagRun, cell * 7 + 2));
              const double eta = erm_risk(g, paired);
              const LocalGlobalReport src_lg = eps_local_global(
                  source, m, form, derive_seed(seed, kTagRun, cell * 7 + 3));
              const LocalGlobalReport tgt_lg = eps_local_global(
                  target, n, form, derive_seed(seed, kTagRun, cell * 7 + 4));

              const std::vector<double> mg_values =
                  mg_list.empty() ? std::vector<double>{thm3.inputs.m_g}
                                  : mg_list;
              for (const double mg : mg_values) {
                const double rhs28 =
                    thm3_rhs_expression(tr_m, tr_n, mg, n, m);
                const Thm2Result thm2 =
                    thm2_condition(eps_classical, eps_adv, eta,
                                   tgt_lg.eps_global, src_lg.eps_global, mg);
                const bool sat = thm3.lhs < rhs28;
                table.rows.push_back(
                    {std::to_string(m), std::to_string(n), fmt_double(tr_m),
                     fmt_double(tr_n), fmt_double(mg), fmt_double(epsilon),
                     fmt_double(gap), fmt_double(eps_classical),
                     fmt_double(eta), fmt_double(src_lg.eps_local),
                     fmt_double(src_lg.eps_global), fmt_double(thm2.lhs),
                     fmt_double(thm2.rhs), fmt_double(thm3.lhs),
                     fmt_double(rhs28), sat ? "1" : "0",
                     thm2.satisfied ? "1" : "0", to_string(form),
                     std::to_string(seed)});
                rows.push_back(json{{"m", m},
                                    {"n", n},
                                    {"tr_sigma_m", tr_m},
                                    {"tr_sigma_n", tr_n},
                                    {"m_g", mg},
                                    {"epsilon", epsilon},
                                    {"gap_adv", gap},
                                    {"eps_classical", eps_classical},
                                    {"eta", eta},
                                    {"eps_local", src_lg.eps_local},
                                    {"eps_global", src_lg.eps_global},
                                    {"lhs_22", thm2.lhs},
                                    {"rhs_22", thm2.rhs},
                                    {"lhs_28", thm3.lhs},
                                    {"rhs_28", rhs28},
                                    {"satisfied", sat},
                                    {"thm2_satisfied", thm2.satisfied},
                                    {"lk_form", to_string(form)},
                                    {"seed", seed}});
              }
            }
          }
        }
      }
    }
  }

  if (emit == "csv") {
    write_text_file((out_dir / "thm_scan.csv").string(), table.to_string());
  } else {
    write_text_file((out_dir / "thm_scan.json").string(),
                    json{{"rows", std::move(rows)}}.dump(2) + "\n");
  }
  std::cout << "thm-scan: rows=" << table.rows.size() << "\n";
  return 0;
}

// --- train-demo -------------------------------------------------------------

int run_train_demo(const RunOptions& options) {
  const json cfg = load_config(
      options, {"dimension", "k", "mean_scale", "trace", "manifold_seed",
                "self_translation", "normalize_geometry", "lambda_list",
                "seeds", "steps", "step_size", "batch", "init_scale", "probe",
                "eval_batch", "write_traces", "emit"});
  const int d = get_req<int>(cfg, "dimension");
  const int k = get_req<int>(cfg, "k");
  const double mean_scale = get_req<double>(cfg, "mean_scale");
  const double trace = get_req<double>(cfg, "trace");
  const std::uint64_t manifold_seed =
      get_or<std::uint64_t>(cfg, "manifold_seed", 0);
  auto lambda_list = get_req<std::vector<double>>(cfg, "lambda_list");
  const int steps = get_req<int>(cfg, "steps");
  const double step_size = get_req<double>(cfg, "step_size");
  const auto batch = get_or<std::int64_t>(cfg, "batch", 64);
  const double init_scale = get_or<double>(cfg, "init_scale", 0.1);
  const auto probe = get_or<std::int64_t>(cfg, "probe", 64);
  const auto eval_batch = get_or<std::int64_t>(cfg, "eval_batch", 256);
  const bool write_traces = get_or<bool>(cfg, "write_traces", true);
  const bool self_translation = get_or<bool>(cfg, "self_translation", true);
  const bool normalize_geometry = get_or<bool>(cfg, "normalize_geometry", true);
  if (lambda_list.empty()) throw ConfigError("lambda_list must be non-empty");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  const auto seeds = resolve_seeds(cfg, options);
  const std::string emit = resolve_emit(cfg, options);
  const auto out_dir = prepare_out_dir(options);

  // Optionally re-express an atlas in centered, unit-separation coordinates.
  // The trainer's plain gradient steps act on absolute scales, so the demo
  // standardizes the geometry instead of the optimizer.
  const auto normalized = [&](const ManifoldSpec& spec) {
    if (!normalize_geometry || !std::isfinite(spec.separation)) return spec;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(spec.dimension);
    for (const auto& chart : spec.charts) centroid += chart.mean;
    centroid /= static_cast<double>(spec.chart_count());
    std::vector<Eigen::VectorXd> means;
    means.reserve(spec.charts.size());
    for (const auto& chart : spec.charts) {
      means.push_back((chart.mean - centroid) / spec.separation);
    }
    return make_spec(std::move(means), spec.covariance()->matrix());
  };

  const ManifoldSpec source = normalized(build_atlas(
      k, d, mean_scale, trace, derive_seed(manifold_seed, kTagSourceAtlas)));
  const ManifoldSpec target =
      self_translation
          ? source
          : normalized(build_atlas(k, d, mean_scale, trace,
                                   derive_seed(manifold_seed, kTagTargetAtlas)));

  CsvTable summary;
  summary.header = {"lambda",        "runs",
                    "diverged",      "identity_rate",
                    "nonidentity_rate", "membership_rate",
                    "persistence_rate"};
  json lambdas_json = json::array();

  for (std::size_t li = 0; li < lambda_list.size(); ++li) {
    const double lambda = lambda_list[li];
    int diverged = 0;
    int identity_runs = 0;
    int membership_runs = 0;
    int persisted_runs = 0;
    json runs_json = json::array();

    for (const std::uint64_t seed : seeds) {
      TrainConfig tc;
      tc.lambda = lambda;
      tc.steps = steps;
      tc.step_size = step_size;
      tc.batch = batch;
      tc.seed = seed;
      tc.init_scale = init_scale;
      tc.probe = probe;
      const TrainResult result = train(tc, source, target);

      // Final verdict from a fresh, larger evaluation batch.
      const CostMatrix eval_cost =
          cost_matrix(result.generator, source, target, eval_batch,
                      derive_seed(seed, kTagRun, li));
      const auto recovered = solve_coupling(eval_cost).permutation;
      const bool identity = recovered.has_value() && recovered->is_identity();
      const AttractorProbe probe_result = attractor_probe(result.trace);

      diverged += result.diverged ? 1 : 0;
      identity_runs += identity ? 1 : 0;
      if (probe_result.first_entry.has_value()) {
        ++membership_runs;
        persisted_runs += probe_result.persisted ? 1 : 0;
      }

      if (write_traces && emit == "csv") {
        CsvTable trace_table;
        trace_table.header = {"step", "loss_adv", "loss_l1",
                              "combined", "permutation", "member"};
        for (const TraceRow& row : result.trace.rows) {
          trace_table.rows.push_back(
              {std::to_string(row.step), fmt_double(row.loss_adv),
               fmt_double(row.loss_l1), fmt_double(row.combined(lambda)),
               perm_or_dash(row.recovered),
               row.pti_index.has_value() ? "1" : "0"});
        }
        write_text_file((out_dir / ("trace_l" + std::to_string(li) + "_seed" +
                                    std::to_string(seed) + ".csv"))
                            .string(),
                        trace_table.to_string());
        write_text_file((out_dir / ("final_generator_l" + std::to_string(li) +
                                    "_seed" + std::to_string(seed) + ".json"))
                            .string(),
                        to_json(result.generator).dump(2) + "\n");
      }
      json run{{"seed", seed},
               {"diverged", result.diverged},
               {"identity", identity},
               {"final_permutation", perm_or_dash(recovered)},
               {"final_generator", to_json(result.generator)},
               {"persisted", probe_result.persisted}};
      if (probe_result.first_entry.has_value()) {
        run["first_membership_step"] = *probe_result.first_entry;
      }
      runs_json.push_back(std::move(run));
    }

    const double n_runs = static_cast<double>(seeds.size());
    const double identity_rate = static_cast<double>(identity_runs) / n_runs;
    const double membership_rate =
        static_cast<double>(membership_runs) / n_runs;
    const double persistence_rate =
        membership_runs > 0 ? static_cast<double>(persisted_runs) /
                                  static_cast<double>(membership_runs)
                            : 0.0;
    summary.rows.push_back(
        {fmt_double(lambda), std::to_string(seeds.size()),
         std::to_string(diverged), fmt_double(identity_rate),
         fmt_double(1.0 - identity_rate), fmt_double(membership_rate),
         fmt_double(persistence_rate)});
    lambdas_json.push_back(json{{"lambda", lambda},
                                {"identity_rate", identity_rate},
                                {"membership_rate", membership_rate},
                                {"persistence_rate", persistence_rate},
                                {"diverged", diverged},
                                {"runs", std::move(runs_json)}});
  }

  if (emit == "csv") {
    write_text_file((out_dir / "summary.csv").string(), summary.to_string());
  } else {
    write_text_file((out_dir / "train_demo.json").string(),
                    json{{"lambdas", std::move(lambdas_json)}}.dump(2) + "\n");
  }
  std::cout << "train-demo: lambdas=" << lambda_list.size()
            << " seeds=" << seeds.size() << "\n";
  return 0;
}

// --- lk-bench ----------------------------------------------------------------

int run_lk_bench(const RunOptions& options) {
  const json cfg = load_config(
      options, {"gaps", "variances", "n_mc", "seeds", "emit"});
  const auto gaps = get_req<std::vector<double>>(cfg, "gaps");
  const auto variances = get_req<std::vector<double>>(cfg, "variances");
  const auto n_mc = get_or<std::int64_t>(cfg, "n_mc", 1000000);
  if (gaps.empty() || variances.empty()) {
    throw ConfigError("gaps and variances must be non-empty");
  }
  const auto seeds = resolve_seeds(cfg, options);
  const std::string emit = resolve_emit(cfg, options);
  const auto out_dir = prepare_out_dir(options);

  CsvTable table;
  table.header = {"gap",  "variance", "paper",     "exact", "mc",
                  "mc_stderr", "n_mc",     "discrepancy_flag", "seed"};
  json rows = json::array();
  for (const double gap : gaps) {
    for (const double variance : variances) {
      for (const std::uint64_t seed : seeds) {
        auto cov = std::make_shared<const Covariance>(
            Eigen::MatrixXd::Constant(1, 1, variance));
        ChartGaussian a{0, Eigen::VectorXd::Zero(1), cov};
        ChartGaussian b{1, Eigen::VectorXd::Constant(1, gap), cov};
        const LkEstimate paper = lk_paper_form(a, b);
        const LkEstimate exact = lk_exact_1d(a, b);
        const LkEstimate mc =
            lk_monte_carlo(a, b, n_mc, derive_seed(seed, kTagRun));
        const bool flag =
            std::fabs(paper.value - exact.value) > 3.0 * mc.stderr_;
        table.rows.push_back({fmt_double(gap), fmt_double(variance),
                              fmt_double(paper.value), fmt_double(exact.value),
                              fmt_double(mc.value), fmt_double(mc.stderr_),
                              std::to_string(n_mc), flag ? "1" : "0",
                              std::to_string(seed)});
        rows.push_back(json{{"gap", gap},
                            {"variance", variance},
                            {"paper", paper.value},
                            {"exact", exact.value},
                            {"mc", mc.value},
                            {"mc_stderr", mc.stderr_},
                            {"n_mc", n_mc},
                            {"discrepancy_flag", flag},
                            {"seed", seed}});
      }
    }
  }

  if (emit == "csv") {
    write_text_file((out_dir / "lk_bench.csv").string(), table.to_string());
  } else {
    write_text_file((out_dir / "lk_bench.json").string(),
                    json{{"rows", std::move(rows)}}.dump(2) + "\n");
  }
  std::cout << "lk-bench: rows=" << table.rows.size() << "\n";
  return 0;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_verify_localization(const RunOptions& options) {
  apply_threads(options);
  return guarded([&] { return run_verify_localization(options); });
}
int cmd_prop1(const RunOptions& options) {
  apply_threads(options);
  return guarded([&] { return run_prop1(options); });
}
int cmd_thm_scan(const RunOptions& options) {
  apply_threads(options);
  return guarded([&] { return run_thm_scan(options); });
}
int cmd_train_demo(const RunOptions& options) {
  apply_threads(options);
  return guarded([&] { return run_train_demo(options); });
}
int cmd_lk_bench(const RunOptions& options) {
  apply_threads(options);
  return guarded([&] { return run_lk_bench(options); });
}

}  // namespace chartlab
