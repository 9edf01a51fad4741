#include "iscore/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>

#include "CLI11.hpp"
#include "iscore/disease_model.hpp"
#include "iscore/estimators.hpp"
#include "iscore/exact_binomial.hpp"
#include "iscore/io.hpp"
#include "iscore/partition_retention.hpp"
#include "iscore/simulator.hpp"

namespace iscore::cli {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

RunManifest base_manifest(const std::string& command, const std::vector<std::string>& args) {
  RunManifest m;
  m.command = command;
  m.argv = args;
  return m;
}

void add_input(RunManifest& m, const std::string& path) {
  m.inputs.emplace_back(path, file_digest(path));
}

CostPriorSpec parse_costs(const std::string& text) {
  CostPriorSpec spec;
  bool have_pid = false, have_pih = false;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw DataError("costs: expected key=value pairs, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (key == "pi_d") {
      spec.pi_d = value;
      have_pid = true;
    } else if (key == "pi_h") {
      spec.pi_h = value;
      have_pih = true;
    } else if (key == "c_d") {
      spec.c_d = value;
    } else if (key == "c_h") {
      spec.c_h = value;
    } else {
      throw DataError("costs: unknown key '" + key + "'");
    }
  }
  if (have_pid && !have_pih) spec.pi_h = 1.0 - spec.pi_d;
  if (have_pih && !have_pid) spec.pi_d = 1.0 - spec.pi_h;
  return spec;
}

std::vector<int> resolve_subset(const std::string& text, const LabeledSample& sample) {
  std::vector<int> subset;
  std::istringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    bool numeric = !token.empty() &&
                   std::all_of(token.begin(), token.end(),
                               [](unsigned char c) { return std::isdigit(c); });
    if (numeric) {
      subset.push_back(std::stoi(token));
      continue;
    }
    const auto it = std::find(sample.variable_names.begin(), sample.variable_names.end(), token);
    if (it == sample.variable_names.end())
      throw DataError("subset: unknown variable '" + token + "'");
    subset.push_back(static_cast<int>(it - sample.variable_names.begin()));
  }
  if (subset.empty()) throw DataError("subset: no variables given");
  return subset;
}

char resolve_delim(const std::string& text) {
  if (text.empty() || text == "auto") return '\0';
  if (text == "comma") return ',';
  if (text == "tab") return '\t';
  if (text.size() == 1) return text[0];
  throw DataError("delimiter must be 'comma', 'tab' or a single character");
}

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"predictivity statistics, bias-corrected error estimates and "
               "partition-retention variable selection for case-control data"};
  app.name("iscore");
  app.require_subcommand(1);

  // ---- bias-table ----
  auto* bias_cmd = app.add_subcommand("bias-table",
                                      "evaluate b(n,lambda,r) and a(n,lambda,r) on a grid");
  std::vector<int> bt_n;
  std::vector<double> bt_lambda, bt_r;
  std::string bt_out;
  bias_cmd->add_option("--n", bt_n, "trial counts")->required();
  bias_cmd->add_option("--lambda", bt_lambda, "lambda = n p_Z values")->required();
  bias_cmd->add_option("--r", bt_r, "r = p_Z/p_W values")->required();
  bias_cmd->add_option("--out", bt_out, "output CSV")->required();
  bias_cmd->callback([&] {
    const auto grid = exact_binomial::bias_grid(bt_n, bt_lambda, bt_r);
    FigureTable table;
    table.header = {"n", "lambda", "r", "b", "a"};
    for (const auto& cell : grid)
      table.rows.push_back({std::to_string(cell.n), compact(cell.lambda), compact(cell.r),
                            fixed(cell.b, 4), fixed(cell.a, 4)});
    write_table_csv(table, bt_out);
    RunManifest m = base_manifest("bias-table", args);
    m.config = {{"n", join_ints(bt_n, ' ')},
                {"lambda", std::to_string(bt_lambda.size()) + " values"},
                {"r", std::to_string(bt_r.size()) + " values"}};
    m.outputs = {bt_out};
    write_manifest(m, bt_out);
  });

  // ---- oracle-params ----
  auto* oracle_cmd = app.add_subcommand("oracle-params",
                                        "exact model parameters for a model spec");
  std::string op_model, op_out;
  oracle_cmd->add_option("--model", op_model, "model spec file")->required();
  oracle_cmd->add_option("--out", op_out, "output report (default: stdout)");
  oracle_cmd->callback([&] {
    const DiseaseModel model = parse_model_spec(op_model);
    const auto params = oracle_params(model);
    Report report = {{"f_y_d", fixed(params.f_y_d, 6)},
                     {"noise_factor", fixed(params.noise_factor, 6)},
                     {"theta_e", fixed(params.theta_e, 6)},
                     {"theta_c", fixed(params.theta_c, 6)},
                     {"theta_I0", fixed(params.theta_I0, 6)},
                     {"theta_I", fixed(params.theta_I, 6)},
                     {"bound_on_theta_e", fixed(params.bound_on_theta_e, 6)}};
    if (op_out.empty()) {
      for (const auto& [key, value] : report) std::cout << key << " = " << value << '\n';
      return;
    }
    write_report(report, op_out);
    RunManifest m = base_manifest("oracle-params", args);
    add_input(m, op_model);
    m.outputs = {op_out};
    write_manifest(m, op_out);
  });

  // ---- figure-data ----
  auto* fig_cmd = app.add_subcommand("figure-data", "curve data behind the shipped figures");
  int fd_figure = 0;
  std::string fd_out;
  fig_cmd->add_option("--figure", fd_figure, "figure id (1-4)")->required();
  fig_cmd->add_option("--out", fd_out, "output CSV")->required();
  fig_cmd->callback([&] {
    write_table_csv(figure_curves(fd_figure), fd_out);
    RunManifest m = base_manifest("figure-data", args);
    m.config = {{"figure", std::to_string(fd_figure)}};
    m.outputs = {fd_out};
    write_manifest(m, fd_out);
  });

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "draw a case-control sample from a model");
  std::string sim_model, sim_out;
  long sim_n = 0;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--model", sim_model, "model spec file")->required();
  sim_cmd->add_option("--n", sim_n, "per-class sample size")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed")->required();
  sim_cmd->add_option("--out", sim_out, "output dataset CSV")->required();
  sim_cmd->callback([&] {
    const DiseaseModel model = parse_model_spec(sim_model);
    Rng rng = Rng(sim_seed).fork(0);
    const auto sample = draw_case_control(model, sim_n, rng);
    write_dataset_csv(sample, sim_out);
    RunManifest m = base_manifest("simulate", args);
    add_input(m, sim_model);
    m.config = {{"n", std::to_string(sim_n)}};
    m.seed = sim_seed;
    m.has_seed = true;
    m.outputs = {sim_out};
    write_manifest(m, sim_out);
  });

  // ---- bias-study ----
  auto* study_cmd = app.add_subcommand("bias-study",
                                       "replicate bias summaries for configured rows");
  std::string st_config, st_out;
  std::uint64_t st_seed = 0;
  study_cmd->add_option("--config", st_config, "study config file")->required();
  study_cmd->add_option("--out", st_out, "output CSV")->required();
  study_cmd->add_option("--seed", st_seed, "RNG seed")->required();
  study_cmd->callback([&] {
    const auto entries = parse_study_config(st_config);
    FigureTable table;
    table.header = {"row",  "m",      "n",    "theta_e", "b",      "b_o",  "b_bar",
                    "s_b",  "b1_bar", "s_b1", "bo_bar",  "s_bo",   "theta_I0", "bound"};
    const Rng root(st_seed);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      SimConfig cfg{entries[i].model, entries[i].n, entries[i].reps, root.fork(i).key()};
      const auto s = replicate_bias_study(cfg);
      table.rows.push_back({std::to_string(i + 1), std::to_string(entries[i].reps),
                            std::to_string(entries[i].n), fixed(s.theta_e, 3), fixed(s.b, 3),
                            fixed(s.b_o, 3), fixed(s.mean_b, 3), fixed(s.sd_b, 3),
                            fixed(s.mean_b1, 3), fixed(s.sd_b1, 3), fixed(s.mean_bo, 3),
                            fixed(s.sd_bo, 3), fixed(s.theta_I0, 3), fixed(s.bound, 3)});
    }
    write_table_csv(table, st_out);
    RunManifest m = base_manifest("bias-study", args);
    add_input(m, st_config);
    m.seed = st_seed;
    m.has_seed = true;
    m.outputs = {st_out};
    write_manifest(m, st_out);
  });

  // ---- estimate ----
  auto* est_cmd = app.add_subcommand("estimate", "scores and error estimates for a subset");
  std::string es_data, es_subset, es_model, es_costs, es_out;
  std::string es_label = "y", es_class_d = "d", es_class_h = "h", es_delim;
  est_cmd->add_option("--data", es_data, "dataset CSV/TSV")->required();
  est_cmd->add_option("--subset", es_subset, "comma list of variable names or indices")
      ->required();
  est_cmd->add_option("--model", es_model, "model spec for oracle quantities");
  est_cmd->add_option("--costs", es_costs, "e.g. pi_d=0.3,c_d=2,c_h=1");
  est_cmd->add_option("--out", es_out, "output report path")->required();
  est_cmd->add_option("--label", es_label, "label column name");
  est_cmd->add_option("--class-d", es_class_d, "label value for cases");
  est_cmd->add_option("--class-h", es_class_h, "label value for controls");
  est_cmd->add_option("--delimiter", es_delim, "comma, tab or a single character");
  est_cmd->callback([&] {
    DatasetSpec dspec;
    dspec.path = es_data;
    dspec.label_column = es_label;
    dspec.class_d = es_class_d;
    dspec.class_h = es_class_h;
    dspec.delimiter = resolve_delim(es_delim);
    const auto data = parse_dataset(dspec);
    const auto subset = resolve_subset(es_subset, data.sample);
    const auto counts = cell_counts(data.sample, subset);

    Report report;
    report.emplace_back("n_rows", std::to_string(data.sample.n_rows()));
    report.emplace_back("n_d", std::to_string(data.n_d));
    report.emplace_back("n_h", std::to_string(data.n_h));
    report.emplace_back("subset", join_ints(subset, ';'));
    const double i = i_score(data.sample, subset);
    report.emplace_back("i_score", fixed(i, 6));
    report.emplace_back("j_score", fixed(j_score(data.sample, subset), 6));

    const bool balanced = data.n_d == data.n_h;
    if (balanced) {
      const double theta_i_plugin = i / static_cast<double>(data.n_d);
      report.emplace_back("theta_I_plugin", fixed(theta_i_plugin, 6));
      report.emplace_back("bound_on_theta_e_plugin", fixed(error_bound(theta_i_plugin), 6));
      report.emplace_back("theta_e_train", fixed(theta_e_train(counts), 6));
      const auto corrected = theta_e_train_corrected(counts);
      report.emplace_back("theta_e_train_corrected", fixed(corrected.value, 6));
      report.emplace_back("correction_mode", "plugin,inverse");
      if (corrected.coverage_warning) report.emplace_back("coverage_warning", "1");
    } else {
      report.emplace_back("theta_e_train", "NA (classes unbalanced; subsample or reweight)");
    }
    if (!es_model.empty()) {
      const DiseaseModel model = parse_model_spec(es_model);
      const auto dist = full_cell_dist(model);
      const auto params = oracle_params(model);
      report.emplace_back("theta_e_model", fixed(params.theta_e, 6));
      if (balanced) {
        const long n = data.n_d;
        report.emplace_back("bias_training_model", fixed(bias_training(dist, n), 6));
        report.emplace_back("bias_oos_model", fixed(bias_oos(dist, n), 6));
        report.emplace_back("theta_e_oos", fixed(theta_e_oos_oracle(counts, dist), 6));
        report.emplace_back("theta_e_oos_corrected",
                            fixed(theta_e_oos_corrected(counts, dist, n), 6));
      }
    }
    if (!es_costs.empty()) {
      const auto spec = parse_costs(es_costs);
      report.emplace_back("i_score_weighted", fixed(i_score_weighted(counts, spec), 6));
      if (!es_model.empty()) {
        const auto wc = weighted_cost(parse_model_spec(es_model), spec);
        report.emplace_back("theta_C_model", fixed(wc.theta_C, 6));
      }
    }
    write_report(report, es_out);
    write_report_csv(report, es_out + ".csv");
    RunManifest m = base_manifest("estimate", args);
    add_input(m, es_data);
    if (!es_model.empty()) add_input(m, es_model);
    m.config = {{"subset", es_subset}, {"label", es_label}};
    m.outputs = {es_out, es_out + ".csv"};
    write_manifest(m, es_out);
  });

  // ---- pr-select ----
  auto* pr_cmd = app.add_subcommand("pr-select", "partition-retention variable selection");
  std::string pr_data, pr_out;
  std::string pr_label = "y", pr_class_d = "d", pr_class_h = "h", pr_delim;
  RetentionConfig pr_cfg;
  std::uint64_t pr_seed = 0;
  pr_cmd->add_option("--data", pr_data, "dataset CSV/TSV")->required();
  pr_cmd->add_option("--k", pr_cfg.group_size, "group size");
  pr_cmd->add_option("--groups", pr_cfg.num_groups, "number of random groups (0 = auto)");
  pr_cmd->add_option("--rounds", pr_cfg.rounds, "resuscitation rounds");
  pr_cmd->add_option("--stages", pr_cfg.stages, "stage schedule of group sizes");
  pr_cmd->add_option("--top-fraction", pr_cfg.top_fraction, "share treated as good");
  pr_cmd->add_option("--mix", pr_cfg.mix_count, "good variables per resuscitation group");
  pr_cmd->add_option("--seed", pr_seed, "RNG seed")->required();
  pr_cmd->add_option("--out", pr_out, "output directory")->required();
  pr_cmd->add_option("--label", pr_label, "label column name");
  pr_cmd->add_option("--class-d", pr_class_d, "label value for cases");
  pr_cmd->add_option("--class-h", pr_class_h, "label value for controls");
  pr_cmd->add_option("--delimiter", pr_delim, "comma, tab or a single character");
  pr_cmd->callback([&] {
    DatasetSpec dspec;
    dspec.path = pr_data;
    dspec.label_column = pr_label;
    dspec.class_d = pr_class_d;
    dspec.class_h = pr_class_h;
    dspec.delimiter = resolve_delim(pr_delim);
    const auto data = parse_dataset(dspec);
    pr_cfg.seed = pr_seed;

    RetentionResult result;
    if (!pr_cfg.stages.empty()) {
      result = staged_selection(data.sample, pr_cfg);
    } else {
      result = retention_scores(data.sample, pr_cfg);
      if (pr_cfg.rounds > 0) result = resuscitate(data.sample, result, pr_cfg);
    }

    std::filesystem::create_directories(pr_out);
    const auto name_of = [&](int v) {
      return data.sample.variable_names.empty() ? "x" + std::to_string(v)
                                                : data.sample.variable_names[
                                                      static_cast<std::size_t>(v)];
    };

    FigureTable retention;
    retention.header = {"variable", "name", "appearances", "survivals", "frequency"};
    for (std::size_t v = 0; v < result.appearances.size(); ++v)
      retention.rows.push_back(
          {std::to_string(v), name_of(static_cast<int>(v)),
           std::to_string(result.appearances[v]), std::to_string(result.survivals[v]),
           result.evaluated[v] ? fixed(result.retention_frequency[v], 6) : "NA"});
    const std::string retention_path = pr_out + "/retention.csv";
    write_table_csv(retention, retention_path);

    const bool balanced = data.n_d == data.n_h;
    FigureTable modules;
    modules.header = {"module", "variables", "names", "count",
                      "i_score", "theta_e_train", "bound_on_theta_e"};
    for (std::size_t i = 0; i < result.modules.size(); ++i) {
      const auto& mod = result.modules[i];
      std::string names;
      for (std::size_t j = 0; j < mod.variables.size(); ++j)
        names += (j ? ";" : "") + name_of(mod.variables[j]);
      std::string train = "NA", bound = "NA";
      if (balanced) {
        const auto counts = cell_counts(data.sample, mod.variables);
        train = fixed(theta_e_train(counts), 6);
        bound = fixed(error_bound(mod.i_score / static_cast<double>(data.n_d)), 6);
      }
      modules.rows.push_back({std::to_string(i + 1), join_ints(mod.variables, ';'), names,
                              std::to_string(mod.count), fixed(mod.i_score, 6), train, bound});
    }
    const std::string modules_path = pr_out + "/modules.csv";
    write_table_csv(modules, modules_path);

    RunManifest m = base_manifest("pr-select", args);
    add_input(m, pr_data);
    m.config = {{"k", std::to_string(pr_cfg.group_size)},
                {"groups", std::to_string(pr_cfg.num_groups)},
                {"rounds", std::to_string(pr_cfg.rounds)},
                {"stages", join_ints(pr_cfg.stages, ' ')},
                {"top_fraction", compact(pr_cfg.top_fraction)},
                {"mix", std::to_string(pr_cfg.mix_count)}};
    m.seed = pr_seed;
    m.has_seed = true;
    m.outputs = {retention_path, modules_path};
    write_manifest(m, pr_out, true);
  });

  // ---- reproduce ----
  auto* rep_cmd = app.add_subcommand("reproduce", "regenerate a shipped reference artifact");
  int rp_table = 0, rp_figure = 0;
  std::string rp_out;
  std::uint64_t rp_seed = kDefaultStudySeed;
  auto* t_opt = rep_cmd->add_option("--table", rp_table, "reference table id (1, 2, 4 or 6)");
  auto* f_opt = rep_cmd->add_option("--figure", rp_figure, "figure id (1-4)");
  rep_cmd->add_option("--out", rp_out, "output CSV")->required();
  rep_cmd->add_option("--seed", rp_seed, "RNG seed for the study tables");
  t_opt->excludes(f_opt);
  rep_cmd->callback([&] {
    if (rp_table == 0 && rp_figure == 0)
      throw CLI::ValidationError("reproduce", "give --table or --figure");
    FigureTable table;
    RunManifest m = base_manifest("reproduce", args);
    if (rp_table == 1 || rp_table == 2) {
      table = reference_bias_table(rp_table);
      m.config = {{"table", std::to_string(rp_table)}};
    } else if (rp_table == 4 || rp_table == 6) {
      table = reference_study_table(rp_table, rp_seed);
      m.config = {{"table", std::to_string(rp_table)}};
      m.seed = rp_seed;
      m.has_seed = true;
    } else if (rp_table != 0) {
      throw std::invalid_argument("reproduce: table id must be 1, 2, 4 or 6");
    } else {
      table = figure_curves(rp_figure);
      m.config = {{"figure", std::to_string(rp_figure)}};
    }
    write_table_csv(table, rp_out);
    m.outputs = {rp_out};
    write_manifest(m, rp_out);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace iscore::cli
