// daum: command-line driver for data generation, teacher training, SWAG
// fitting, sampled inference, interception, distillation, theory checks,
// evaluation and latency benchmarking.

#include "daum/checkpoint.hpp"
#include "daum/config.hpp"
#include "daum/core/errors.hpp"
#include "daum/experiments.hpp"
#include "daum/latency.hpp"
#include "daum/metrics.hpp"
#include "daum/pipeline.hpp"
#include "daum/ranking.hpp"
#include "daum/report_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace daum;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kMissing = 2, kRuntime = 3 };

struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  RunConfig config;
  json effective;
  std::string hash;
  fs::path workdir;

  fs::path at(const char* name) const { return workdir / name; }

  fs::path require(const char* name, const char* producer) const {
    const fs::path p = at(name);
    if (!fs::exists(p))
      throw MissingArtifact("missing " + p.string() + "; run `daum " + producer + "` with this --workdir first");
    return p;
  }

  OutputMeta meta(const std::string& kind, std::uint64_t seed) const { return {kind, hash, seed, 1, json::object()}; }
};

void write_csv_header(std::ofstream& out, const OutputMeta& meta, const char* columns) {
  out << csv_meta_comment(meta) << '\n' << columns << '\n';
}

std::string num(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

void check_alignment(const Dataset& data, const std::vector<std::int64_t>& ids, const char* what) {
  if (ids != data.ids)
    throw DataError(std::string(what) + " do not cover the expected split; rerun the producing subcommand");
}

// ---------------------------------------------------------------------------

void cmd_gen_data(const Context& ctx) {
  const auto& f = ctx.config.data.funnel;
  const auto gen = generate_funnel(f);
  write_dataset_ndjson(ctx.at("data.ndjson"), gen.data, ctx.meta("dataset", f.seed));
  if (ctx.config.data.write_csv) write_dataset_csv(ctx.at("data.csv"), gen.data, ctx.meta("dataset-csv", f.seed));
  std::cout << "generated " << gen.data.size() << " examples; positive rates";
  for (std::size_t k = 0; k < kFunnelStages; ++k) std::cout << ' ' << task_name(k) << '=' << gen.data.labels.col(static_cast<Eigen::Index>(k)).mean();
  std::cout << '\n';
}

void cmd_train(const Context& ctx) {
  const Dataset data = read_dataset_ndjson(ctx.require("data.ndjson", "gen-data"));
  const auto parts = split_dataset(data, ctx.config);
  const auto run = train_teacher(parts.train, ctx.config);
  const json meta = meta_to_json(ctx.meta("ple-model", ctx.config.train.seed));
  save_ple(ctx.at("model.ckpt"), run.net, meta);
  save_snapshots(ctx.at("snapshots.ckpt"), run.snapshots, run.net.arch->config(), meta);
  auto out = open_output(ctx.at("train_log.csv"));
  write_csv_header(out, ctx.meta("train-log", ctx.config.train.seed), "epoch,mean_loss");
  for (const auto& e : run.log) out << e.epoch << ',' << num(e.mean_loss) << '\n';
  std::cout << "trained on " << parts.train.size() << " rows; final loss " << run.log.back().mean_loss << '\n';
}

void cmd_swag_fit(const Context& ctx) {
  PleConfig model;
  const auto buffer = load_snapshots(ctx.require("snapshots.ckpt", "train"), &model);
  const auto posterior = fit_teacher_posterior(buffer, ctx.config);
  save_posterior(ctx.at("posterior.ckpt"), posterior, model,
                 meta_to_json(ctx.meta("swag-posterior", ctx.config.train.seed)));
  std::cout << "posterior over " << posterior.dim() << " weights, rank " << posterior.rank << '\n';
}

void cmd_infer(const Context& ctx) {
  PleConfig model;
  const auto posterior = load_posterior(ctx.require("posterior.ckpt", "swag-fit"), &model);
  const Dataset data = read_dataset_ndjson(ctx.require("data.ndjson", "gen-data"));
  const auto parts = split_dataset(data, ctx.config);
  const PleArchitecture arch(model);
  const auto& inf = ctx.config.inference;

  const auto test = infer_dataset(arch, posterior, parts.test, ctx.config);
  write_reports_ndjson(ctx.at("reports.ndjson"), test, ctx.meta("reports-test", inf.seed));
  const auto train = infer_dataset(arch, posterior, parts.train, ctx.config);
  write_reports_ndjson(ctx.at("reports_train.ndjson"), train, ctx.meta("reports-train", inf.seed));

  const std::size_t task = inf.decision_task;
  const double tau =
      inf.tau >= 0.0 ? inf.tau : uncertainty_quantile_threshold(test.task_variance(task), inf.pass_ratio).tau;
  OutputMeta meta = ctx.meta("decisions", inf.seed);
  meta.extra["tau"] = std::isinf(tau) ? json("inf") : json(tau);
  meta.extra["task"] = task_name(task);
  auto out = open_output(ctx.at("decisions.ndjson"));
  out << meta_line(meta) << '\n';
  std::size_t passed = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int d = threshold_decide(test.report(i), tau, task);
    passed += d > 0;
    out << "{\"id\":" << test.ids[i] << ",\"decision\":" << d << "}\n";
  }
  std::cout << "reports for " << test.size() << " test and " << train.size() << " train rows; " << passed
            << " test rows pass at tau " << tau << '\n';
}

void cmd_intercept(const Context& ctx) {
  const auto reports = read_reports_ndjson(ctx.require("reports.ndjson", "infer"));
  if (reports.size() == 0) throw DataError("reports.ndjson is empty");
  const auto& ic = ctx.config.intercept;
  InterceptPlan plan;
  if (ic.strategy == "reward") {
    const RewardConfig reward{ic.weights, ic.uncertainty_pass_fraction};
    plan = plan_interception(reports, reward, weighted_sum_reward(reward), ic.rate);
  } else {
    const std::size_t unc = ic.strategy == "direct" ? ic.score_task : ic.uncertainty_task;
    plan = plan_single_metric(reports, ic.score_task, unc, ic.uncertainty_pass_fraction, ic.rate);
  }
  write_plan_ndjson(ctx.at("plan.ndjson"), plan, reports.ids, ctx.meta("intercept-plan", ctx.config.inference.seed));
  std::cout << plan.strategy.describe() << ": intercepted " << plan.rate * 100.0 << "% of " << plan.z.size()
            << " requests\n";
}

void cmd_distill(const Context& ctx) {
  const Dataset data = read_dataset_ndjson(ctx.require("data.ndjson", "gen-data"));
  const auto teacher = read_reports_ndjson(ctx.require("reports_train.ndjson", "infer"));
  const auto parts = split_dataset(data, ctx.config);
  check_alignment(parts.train, teacher.ids, "teacher reports");
  const auto cfg = ctx.config.student_config();
  std::vector<StudentEpoch> log;
  DistillTargets targets;
  const auto student = train_student(parts.train.features, parts.train.labels, teacher.variance, cfg, &log, &targets);

  json meta = meta_to_json(ctx.meta("student", cfg.seed));
  meta["gamma"] = targets.gamma;
  save_student(ctx.at("student.ckpt"), student, meta);
  const auto outputs = student_infer(student, parts.test.features);
  write_student_reports_ndjson(ctx.at("student_reports.ndjson"), parts.test.ids, outputs, ctx.meta("student-reports", cfg.seed));
  auto out = open_output(ctx.at("distill_log.csv"));
  write_csv_header(out, ctx.meta("distill-log", cfg.seed), "epoch,mean_loss");
  for (const auto& e : log) out << e.epoch << ',' << num(e.mean_loss) << '\n';
  std::cout << "student trained; final loss " << log.back().mean_loss << '\n';
}

void cmd_theory(const Context& ctx) {
  const auto& th = ctx.config.theory;
  const auto cells = stationary_sweep(th.sweep);
  auto out = open_output(ctx.at("theory_sweep.csv"));
  write_csv_header(out, ctx.meta("theory-sweep", th.sweep.seed),
                   "eta,c,q,predicted_var,empirical_var,relative_error,ar1_var,ar1_relative_error,stationary");
  std::size_t stationary = 0, within = 0, ar1_within = 0;
  for (const auto& c : cells) {
    out << num(c.eta) << ',' << num(c.c) << ',' << num(c.q) << ',' << num(c.predicted_var) << ','
        << num(c.empirical_var) << ',' << num(c.relative_error) << ',' << num(c.ar1_var) << ','
        << num(c.ar1_relative_error) << ',' << (c.stationary ? 1 : 0) << '\n';
    if (!c.stationary) continue;
    ++stationary;
    within += c.relative_error < 0.15;
    ar1_within += c.ar1_relative_error < 0.15;
  }
  const auto nb = neighbor_trials(th.neighbor);
  auto nout = open_output(ctx.at("theory_neighbor.ndjson"));
  nout << meta_line(ctx.meta("theory-neighbor", th.neighbor.seed)) << '\n';
  nout << json{{"trials", nb.trials},
               {"sign_agreement", nb.sign_agreement},
               {"max_ratio_error", nb.max_ratio_error},
               {"median_ratio_error", nb.median_ratio_error}}
              .dump()
       << '\n';
  std::cout << "stationary cells: " << stationary << "; closed form within 15%: " << within
            << "; AR(1) variance within 15%: " << ar1_within << '\n'
            << "neighbor trials: sign agreement " << nb.sign_agreement << ", max |ratio-1| " << nb.max_ratio_error
            << '\n';
}

void write_curve(std::ofstream& out, const PassingCurve& c) {
  for (const auto& r : c.rows)
    out << task_name(c.pass_task) << ',' << task_name(c.eval_task) << ',' << num(r.ratio) << ',' << r.n_passed << ','
        << num(r.residual_auc_roc) << ',' << num(r.residual_auc_pr) << ',' << (r.residual_defined ? 1 : 0) << ','
        << r.directly_passed_positives << ',' << r.residual_classified_positives << ',' << r.total_downstream_positives
        << '\n';
}

void cmd_eval(const Context& ctx) {
  const Dataset data = read_dataset_ndjson(ctx.require("data.ndjson", "gen-data"));
  const auto reports = read_reports_ndjson(ctx.require("reports.ndjson", "infer"));
  const auto parts = split_dataset(data, ctx.config);
  check_alignment(parts.test, reports.ids, "test reports");
  const auto& ev = ctx.config.eval;
  const auto& labels = parts.test.labels;
  const std::uint64_t seed = ctx.config.inference.seed;
  const char* columns =
      "pass_task,eval_task,ratio,n_passed,residual_auc_roc,residual_auc_pr,residual_defined,"
      "directly_passed_positives,residual_classified_positives,total_downstream_positives";

  std::vector<json> summary;
  {
    auto out = open_output(ctx.at("passing_residual.csv"));
    write_csv_header(out, ctx.meta("passing-residual", seed), columns);
    const auto balanced = residual_passing_experiment(labels, reports, ev.balanced_task, ev.balanced_task, ev.ratios);
    const auto sparse = residual_passing_experiment(labels, reports, ev.sparse_task, ev.sparse_task, ev.sparse_ratios);
    const auto indirect = residual_passing_experiment(labels, reports, ev.balanced_task, ev.sparse_task, ev.sparse_ratios);
    for (const auto* c : {&balanced, &sparse, &indirect}) write_curve(out, *c);
    summary.push_back({{"experiment", "residual_balanced"},
                       {"auc_roc_first", balanced.rows.front().residual_auc_roc},
                       {"auc_roc_last", balanced.rows.back().residual_auc_roc}});
  }
  {
    auto out = open_output(ctx.at("passing_downstream.csv"));
    write_csv_header(out, ctx.meta("passing-downstream", seed), columns);
    for (std::size_t t = 0; t < reports.n_tasks(); ++t) {
      const auto c = downstream_positive_experiment(labels, reports, t, ev.sparse_ratios, ev.sparse_task);
      write_curve(out, c);
      summary.push_back({{"experiment", "downstream"},
                         {"pass_task", task_name(t)},
                         {"total_first", c.rows.front().total_downstream_positives},
                         {"total_last", c.rows.back().total_downstream_positives}});
    }
  }
  {
    auto out = open_output(ctx.at("fixed_budget.csv"));
    write_csv_header(out, ctx.meta("fixed-budget", seed), "pass_task,budget,reachable,ratio,n_passed,total_downstream_positives");
    std::vector<std::size_t> strategies(reports.n_tasks());
    std::iota(strategies.begin(), strategies.end(), std::size_t{0});
    for (const auto& r : fixed_passed_positives_experiment(labels, reports, strategies, ev.budgets, ev.sparse_task))
      out << task_name(r.pass_task) << ',' << r.budget << ',' << (r.reachable ? 1 : 0) << ',' << num(r.ratio) << ','
          << r.n_passed << ',' << r.total_downstream_positives << '\n';
  }

  const fs::path student_path = ctx.at("student_reports.ndjson");
  if (fs::exists(student_path)) {
    std::vector<std::int64_t> ids;
    const auto student = read_student_reports_ndjson(student_path, &ids);
    check_alignment(parts.test, ids, "student reports");
    std::vector<double> gamma(reports.n_tasks(), 1.0);
    if (fs::exists(ctx.at("student.ckpt"))) {
      json meta;
      load_student(ctx.at("student.ckpt"), &meta);
      if (meta.contains("gamma")) gamma = meta.at("gamma").get<std::vector<double>>();
    }
    auto out = open_output(ctx.at("histogram.csv"));
    write_csv_header(out, ctx.meta("uncertainty-histogram", seed), "task,bin_left,bin_right,teacher_count,student_count");
    for (std::size_t t = 0; t < reports.n_tasks(); ++t) {
      auto teacher = reports.task_variance(t);
      for (double& v : teacher) v *= gamma[t];
      const auto col = student.uncertainty.col(static_cast<Eigen::Index>(t));
      const std::vector<double> unc(col.begin(), col.end());
      const auto h = uncertainty_histogram_compare(teacher, unc, ev.histogram_bins);
      for (std::size_t b = 0; b < ev.histogram_bins; ++b)
        out << task_name(t) << ',' << num(h.edges[b]) << ',' << num(h.edges[b + 1]) << ',' << h.teacher_counts[b]
            << ',' << h.student_counts[b] << '\n';
      const std::size_t k = ratio_count(ev.overlap_ratio, teacher.size());
      const auto a = top_k(teacher, k);
      const auto s = top_k(unc, k);
      summary.push_back({{"experiment", "distillation"},
                         {"task", task_name(t)},
                         {"spearman", h.spearman_defined ? json(h.spearman) : json(nullptr)},
                         {"jaccard", jaccard(a, s)}});
    }
  }

  auto out = open_output(ctx.at("eval_summary.ndjson"));
  out << meta_line(ctx.meta("eval-summary", seed)) << '\n';
  for (const auto& j : summary) out << j.dump() << '\n';
  std::cout << "evaluation written for " << reports.size() << " test rows\n";
}

void cmd_bench(const Context& ctx) {
  PleConfig model;
  const auto posterior = load_posterior(ctx.require("posterior.ckpt", "swag-fit"), &model);
  const auto student = load_student(ctx.require("student.ckpt", "distill"));
  const Dataset data = read_dataset_ndjson(ctx.require("data.ndjson", "gen-data"));
  const auto parts = split_dataset(data, ctx.config);
  const auto& b = ctx.config.bench;
  std::vector<std::size_t> rows(std::min(b.batch_size, parts.test.size()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const Matrix batch = parts.test.subset(rows).features;
  const PleArchitecture arch(model);
  const TimingOptions timing{b.repetitions, b.warmups};

  const auto report = latency_bench(arch, posterior, student, batch, b.n_samples, timing, b.seed);
  const auto scaling = teacher_scaling(arch, posterior, batch, b.scaling_samples, timing, b.seed);
  auto out = open_output(ctx.at("latency.ndjson"));
  out << meta_line(ctx.meta("latency", b.seed)) << '\n';
  out << json{{"teacher_ms_per_batch", report.teacher_ms_per_batch},
              {"student_ms_per_batch", report.student_ms_per_batch},
              {"batch_size", report.batch_size},
              {"n_samples", report.n_samples},
              {"speedup", report.speedup},
              {"repetitions", report.repetitions},
              {"warmups", report.warmups},
              {"scaling_r_squared", scaling.fit.r_squared}}
             .dump()
      << '\n';
  auto sout = open_output(ctx.at("latency_scaling.csv"));
  write_csv_header(sout, ctx.meta("latency-scaling", b.seed), "n_samples,teacher_ms");
  for (const auto& p : scaling.points) sout << p.n_samples << ',' << num(p.teacher_ms) << '\n';
  std::cout << "teacher " << report.teacher_ms_per_batch << " ms, student " << report.student_ms_per_batch
            << " ms per batch of " << report.batch_size << " (speedup " << report.speedup << "x); time-vs-M R^2 "
            << scaling.fit.r_squared << '\n';
}

Context load_context(const std::string& config_path, const std::string& workdir, const std::vector<std::string>& sets) {
  json user = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file " + config_path);
    try {
      user = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
    }
  }
  apply_overrides(user, sets);
  Context ctx;
  ctx.config = run_config_from_json(user);
  ctx.effective = to_json(ctx.config);
  ctx.hash = config_hash(ctx.config);
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);
  auto out = open_output(ctx.at("effective_config.json"));
  out << ctx.effective.dump(2) << '\n';
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware multi-task traffic interception with a distilled single-pass student"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string workdir = ".";
  std::vector<std::string> sets;

  using Handler = void (*)(const Context&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"gen-data", "generate the synthetic funnel dataset", cmd_gen_data},
      {"train", "train the PLE teacher and keep late-epoch snapshots", cmd_train},
      {"swag-fit", "fit the SWAG posterior from the snapshots", cmd_swag_fit},
      {"infer", "sampled inference: per-task mean and variance", cmd_infer},
      {"intercept", "build an interception plan from the reports", cmd_intercept},
      {"distill", "train the single-pass student", cmd_distill},
      {"theory", "simulate the stationary-variance and neighbor-influence results", cmd_theory},
      {"eval", "passing experiments and distillation fidelity", cmd_eval},
      {"bench", "teacher versus student inference latency", cmd_bench},
  };
  Handler chosen = nullptr;
  for (const auto& [name, help, handler] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", config_path, "JSON config file (defaults when omitted)");
    sub->add_option("--workdir,-w", workdir, "directory holding inputs and outputs");
    sub->add_option("--set", sets, "override, e.g. --set train.epochs=5");
    sub->callback([&chosen, h = handler] { chosen = h; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Context ctx = load_context(config_path, workdir, sets);
    chosen(ctx);
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissing;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
