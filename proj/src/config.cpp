#include "daum/config.hpp"

#include "daum/core/errors.hpp"

#include <cstdio>
#include <sstream>

namespace daum {

using nlohmann::json;

PleConfig RunConfig::ple_config() const {
  PleConfig c;
  c.input_dim = data.funnel.feature_dim;
  c.n_tasks = kFunnelStages;
  c.n_shared_experts = model.n_shared_experts;
  c.experts_per_task = model.experts_per_task;
  c.expert_dims = model.expert_dims;
  c.gate_dims = model.gate_dims;
  c.tower_dims = model.tower_dims;
  return c;
}

StudentConfig RunConfig::student_config() const {
  StudentConfig c;
  c.input_dim = data.funnel.feature_dim;
  c.n_tasks = kFunnelStages;
  c.trunk_dims = distill.trunk_dims;
  c.lambda = distill.lambda;
  c.learning_rate = distill.learning_rate;
  c.epochs = distill.epochs;
  c.batch_size = distill.batch_size;
  c.seed = distill.seed;
  return c;
}

void RunConfig::validate() const {
  data.funnel.validate();
  if (!(data.train_fraction > 0.0 && data.train_fraction < 1.0))
    throw ConfigError("data.train_fraction must lie in (0, 1)");
  ple_config().validate();
  train.validate();
  if (swag.k_small < 2) throw ConfigError("swag.k_small must be at least 2");
  if (swag.rank < 1 || swag.rank > swag.k_small - 1) throw ConfigError("swag.rank must lie in [1, k_small - 1]");
  if (swag.k_small > train.epochs) throw ConfigError("swag.k_small exceeds train.epochs");
  if (inference.n_samples < 2) throw ConfigError("inference.n_samples must be at least 2");
  if (!(inference.pass_ratio >= 0.0 && inference.pass_ratio <= 1.0))
    throw ConfigError("inference.pass_ratio must lie in [0, 1]");
  if (inference.threads == 0) throw ConfigError("inference.threads must be positive");
  if (intercept.strategy != "reward" && intercept.strategy != "direct" && intercept.strategy != "indirect")
    throw ConfigError("intercept.strategy must be reward, direct or indirect");
  RewardConfig{intercept.weights, intercept.uncertainty_pass_fraction}.validate();
  if (!(intercept.rate >= 0.0 && intercept.rate <= 1.0)) throw ConfigError("intercept.rate must lie in [0, 1]");
  student_config().validate();
  for (std::size_t i = 0; i < eval.ratios.size(); ++i)
    if (!(eval.ratios[i] >= 0.0 && eval.ratios[i] <= 1.0) || (i && eval.ratios[i] < eval.ratios[i - 1]))
      throw ConfigError("eval.ratios must be ascending values in [0, 1]");
  for (std::size_t i = 0; i < eval.sparse_ratios.size(); ++i)
    if (!(eval.sparse_ratios[i] >= 0.0 && eval.sparse_ratios[i] <= 1.0) ||
        (i && eval.sparse_ratios[i] < eval.sparse_ratios[i - 1]))
      throw ConfigError("eval.sparse_ratios must be ascending values in [0, 1]");
  if (eval.histogram_bins == 0) throw ConfigError("eval.histogram_bins must be positive");
  if (!(eval.overlap_ratio > 0.0 && eval.overlap_ratio <= 1.0))
    throw ConfigError("eval.overlap_ratio must lie in (0, 1]");
  if (bench.batch_size == 0 || bench.repetitions == 0 || bench.n_samples == 0)
    throw ConfigError("bench.batch_size, repetitions and n_samples must be positive");
  if (bench.scaling_samples.size() < 2) throw ConfigError("bench.scaling_samples needs at least two entries");
  if (theory.sweep.steps < 10) throw ConfigError("theory.sweep.steps must be at least 10");
  if (!(theory.sweep.burn_in_fraction >= 0.0 && theory.sweep.burn_in_fraction < 1.0))
    throw ConfigError("theory.sweep.burn_in_fraction must lie in [0, 1)");
  if (theory.neighbor.trials == 0 || theory.neighbor.feature_dim == 0)
    throw ConfigError("theory.neighbor.trials and feature_dim must be positive");
}

json to_json(const RunConfig& c) {
  const auto& f = c.data.funnel;
  json j;
  j["data"] = {{"feature_dim", f.feature_dim},
               {"n_samples", f.n_samples},
               {"target_rates", f.target_rates},
               {"ambiguity_fraction", f.ambiguity_fraction},
               {"ambiguity_group_size", f.ambiguity_group_size},
               {"score_scale", f.score_scale},
               {"stage_correlation", f.stage_correlation},
               {"feature_decimals", f.feature_decimals},
               {"seed", f.seed},
               {"train_fraction", c.data.train_fraction},
               {"split_seed", c.data.split_seed},
               {"write_csv", c.data.write_csv}};
  j["model"] = {{"n_shared_experts", c.model.n_shared_experts},
                {"experts_per_task", c.model.experts_per_task},
                {"expert_dims", c.model.expert_dims},
                {"gate_dims", c.model.gate_dims},
                {"tower_dims", c.model.tower_dims},
                {"init_seed", c.model.init_seed}};
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"seed", c.train.seed}};
  j["swag"] = {{"k_small", c.swag.k_small}, {"rank", c.swag.rank}, {"scope", std::string(to_string(c.swag.scope))}};
  j["inference"] = {{"n_samples", c.inference.n_samples},
                    {"tau", c.inference.tau},
                    {"pass_ratio", c.inference.pass_ratio},
                    {"decision_task", task_name(c.inference.decision_task)},
                    {"seed", c.inference.seed},
                    {"threads", c.inference.threads}};
  j["intercept"] = {{"strategy", c.intercept.strategy},
                    {"weights", c.intercept.weights},
                    {"uncertainty_pass_fraction", c.intercept.uncertainty_pass_fraction},
                    {"rate", c.intercept.rate},
                    {"score_task", task_name(c.intercept.score_task)},
                    {"uncertainty_task", task_name(c.intercept.uncertainty_task)}};
  j["distill"] = {{"trunk_dims", c.distill.trunk_dims},
                  {"lambda", c.distill.lambda},
                  {"learning_rate", c.distill.learning_rate},
                  {"epochs", c.distill.epochs},
                  {"batch_size", c.distill.batch_size},
                  {"seed", c.distill.seed}};
  j["eval"] = {{"ratios", c.eval.ratios},
               {"sparse_ratios", c.eval.sparse_ratios},
               {"balanced_task", task_name(c.eval.balanced_task)},
               {"sparse_task", task_name(c.eval.sparse_task)},
               {"budgets", c.eval.budgets},
               {"histogram_bins", c.eval.histogram_bins},
               {"overlap_ratio", c.eval.overlap_ratio}};
  j["bench"] = {{"batch_size", c.bench.batch_size},
                {"repetitions", c.bench.repetitions},
                {"warmups", c.bench.warmups},
                {"n_samples", c.bench.n_samples},
                {"scaling_samples", c.bench.scaling_samples},
                {"seed", c.bench.seed}};
  const auto& s = c.theory.sweep;
  const auto& nb = c.theory.neighbor;
  j["theory"] = {{"sweep",
                  {{"etas", s.etas},
                   {"qs", s.qs},
                   {"cs", s.cs},
                   {"steps", s.steps},
                   {"burn_in_fraction", s.burn_in_fraction},
                   {"feature_dim", s.feature_dim},
                   {"seed", s.seed}}},
                 {"neighbor",
                  {{"trials", nb.trials},
                   {"eta", nb.eta},
                   {"feature_dim", nb.feature_dim},
                   {"neighbor_offset", nb.neighbor_offset},
                   {"min_cosine", nb.min_cosine},
                   {"min_q_gap", nb.min_q_gap},
                   {"min_q1_margin", nb.min_q1_margin},
                   {"seed", nb.seed}}}};
  return j;
}

namespace {

void find_unknown(const json& defaults, const json& user, const std::string& prefix,
                  std::vector<std::string>& errors) {
  if (!user.is_object()) {
    errors.push_back((prefix.empty() ? std::string("config") : prefix) + ": expected an object");
    return;
  }
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) {
      errors.push_back("unknown key " + path);
    } else if (defaults.at(key).is_object()) {
      find_unknown(defaults.at(key), value, path, errors);
    }
  }
}

void merge(json& base, const json& user) {
  for (const auto& [key, value] : user.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object())
      merge(base[key], value);
    else
      base[key] = value;
  }
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <class T>
  void operator()(const json& section, const std::string& path, T& out) {
    const auto dot = path.rfind('.');
    const std::string key = path.substr(dot + 1);
    const json& v = section.at(key);
    if (!accepts(v, out)) {
      errors_.push_back("bad value for " + path + ": " + v.dump());
      return;
    }
    try {
      out = v.get<T>();
    } catch (const json::exception&) {
      errors_.push_back("bad value for " + path + ": " + v.dump());
    }
  }

  void task(const json& section, const std::string& path, std::size_t& out) {
    const json& v = section.at(path.substr(path.rfind('.') + 1));
    try {
      if (v.is_string())
        out = task_from_string(v.get<std::string>(), kFunnelStages);
      else if (v.is_number_unsigned() && v.get<std::size_t>() < kFunnelStages)
        out = v.get<std::size_t>();
      else
        throw ArgumentError("bad task");
    } catch (const std::exception&) {
      errors_.push_back("bad task for " + path + ": " + v.dump());
    }
  }

 private:
  static bool accepts(const json& v, const double&) { return v.is_number(); }
  static bool accepts(const json& v, const bool&) { return v.is_boolean(); }
  static bool accepts(const json& v, const int&) { return v.is_number_integer(); }
  static bool accepts(const json& v, const std::string&) { return v.is_string(); }
  static bool accepts(const json& v, const std::size_t&) { return v.is_number_unsigned(); }
  static bool accepts(const json& v, const std::vector<double>&) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!e.is_number()) return false;
    return true;
  }
  static bool accepts(const json& v, const std::vector<std::size_t>&) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!e.is_number_unsigned()) return false;
    return true;
  }
  template <std::size_t N>
  static bool accepts(const json& v, const std::array<double, N>&) {
    if (!v.is_array() || v.size() != N) return false;
    for (const auto& e : v)
      if (!e.is_number()) return false;
    return true;
  }

  std::vector<std::string>& errors_;
};

}  // namespace

RunConfig run_config_from_json(const json& user) {
  const json defaults = to_json(RunConfig{});
  std::vector<std::string> errors;
  find_unknown(defaults, user, "", errors);
  json m = defaults;
  if (user.is_object()) merge(m, user);

  RunConfig c;
  Reader read(errors);
  auto section = [&](const char* name) -> const json& {
    if (!m.at(name).is_object()) {
      static const json empty = defaults;
      errors.push_back(std::string(name) + ": expected an object");
      return empty.at(name);
    }
    return m.at(name);
  };
  if (errors.empty()) {
    const json& d = section("data");
    auto& f = c.data.funnel;
    read(d, "data.feature_dim", f.feature_dim);
    read(d, "data.n_samples", f.n_samples);
    read(d, "data.target_rates", f.target_rates);
    read(d, "data.ambiguity_fraction", f.ambiguity_fraction);
    read(d, "data.ambiguity_group_size", f.ambiguity_group_size);
    read(d, "data.score_scale", f.score_scale);
    read(d, "data.stage_correlation", f.stage_correlation);
    read(d, "data.feature_decimals", f.feature_decimals);
    read(d, "data.seed", f.seed);
    read(d, "data.train_fraction", c.data.train_fraction);
    read(d, "data.split_seed", c.data.split_seed);
    read(d, "data.write_csv", c.data.write_csv);

    const json& mo = section("model");
    read(mo, "model.n_shared_experts", c.model.n_shared_experts);
    read(mo, "model.experts_per_task", c.model.experts_per_task);
    read(mo, "model.expert_dims", c.model.expert_dims);
    read(mo, "model.gate_dims", c.model.gate_dims);
    read(mo, "model.tower_dims", c.model.tower_dims);
    read(mo, "model.init_seed", c.model.init_seed);

    const json& t = section("train");
    read(t, "train.learning_rate", c.train.learning_rate);
    read(t, "train.epochs", c.train.epochs);
    read(t, "train.batch_size", c.train.batch_size);
    read(t, "train.seed", c.train.seed);

    const json& s = section("swag");
    read(s, "swag.k_small", c.swag.k_small);
    read(s, "swag.rank", c.swag.rank);
    std::string scope;
    read(s, "swag.scope", scope);
    try {
      if (!scope.empty()) c.swag.scope = swag_scope_from_string(scope);
    } catch (const std::exception&) {
      errors.push_back("bad value for swag.scope: \"" + scope + "\"");
    }

    const json& in = section("inference");
    read(in, "inference.n_samples", c.inference.n_samples);
    read(in, "inference.tau", c.inference.tau);
    read(in, "inference.pass_ratio", c.inference.pass_ratio);
    read.task(in, "inference.decision_task", c.inference.decision_task);
    read(in, "inference.seed", c.inference.seed);
    read(in, "inference.threads", c.inference.threads);

    const json& ic = section("intercept");
    read(ic, "intercept.strategy", c.intercept.strategy);
    read(ic, "intercept.weights", c.intercept.weights);
    read(ic, "intercept.uncertainty_pass_fraction", c.intercept.uncertainty_pass_fraction);
    read(ic, "intercept.rate", c.intercept.rate);
    read.task(ic, "intercept.score_task", c.intercept.score_task);
    read.task(ic, "intercept.uncertainty_task", c.intercept.uncertainty_task);

    const json& di = section("distill");
    read(di, "distill.trunk_dims", c.distill.trunk_dims);
    read(di, "distill.lambda", c.distill.lambda);
    read(di, "distill.learning_rate", c.distill.learning_rate);
    read(di, "distill.epochs", c.distill.epochs);
    read(di, "distill.batch_size", c.distill.batch_size);
    read(di, "distill.seed", c.distill.seed);

    const json& ev = section("eval");
    read(ev, "eval.ratios", c.eval.ratios);
    read(ev, "eval.sparse_ratios", c.eval.sparse_ratios);
    read.task(ev, "eval.balanced_task", c.eval.balanced_task);
    read.task(ev, "eval.sparse_task", c.eval.sparse_task);
    read(ev, "eval.budgets", c.eval.budgets);
    read(ev, "eval.histogram_bins", c.eval.histogram_bins);
    read(ev, "eval.overlap_ratio", c.eval.overlap_ratio);

    const json& b = section("bench");
    read(b, "bench.batch_size", c.bench.batch_size);
    read(b, "bench.repetitions", c.bench.repetitions);
    read(b, "bench.warmups", c.bench.warmups);
    read(b, "bench.n_samples", c.bench.n_samples);
    read(b, "bench.scaling_samples", c.bench.scaling_samples);
    read(b, "bench.seed", c.bench.seed);

    const json& th = section("theory");
    if (!th.at("sweep").is_object() || !th.at("neighbor").is_object()) {
      errors.push_back("theory.sweep and theory.neighbor must be objects");
    } else {
      const json& sw = th.at("sweep");
      auto& sc = c.theory.sweep;
      read(sw, "theory.sweep.etas", sc.etas);
      read(sw, "theory.sweep.qs", sc.qs);
      read(sw, "theory.sweep.cs", sc.cs);
      read(sw, "theory.sweep.steps", sc.steps);
      read(sw, "theory.sweep.burn_in_fraction", sc.burn_in_fraction);
      read(sw, "theory.sweep.feature_dim", sc.feature_dim);
      read(sw, "theory.sweep.seed", sc.seed);
      const json& nbj = th.at("neighbor");
      auto& nb = c.theory.neighbor;
      read(nbj, "theory.neighbor.trials", nb.trials);
      read(nbj, "theory.neighbor.eta", nb.eta);
      read(nbj, "theory.neighbor.feature_dim", nb.feature_dim);
      read(nbj, "theory.neighbor.neighbor_offset", nb.neighbor_offset);
      read(nbj, "theory.neighbor.min_cosine", nb.min_cosine);
      read(nbj, "theory.neighbor.min_q_gap", nb.min_q_gap);
      read(nbj, "theory.neighbor.min_q1_margin", nb.min_q1_margin);
      read(nbj, "theory.neighbor.seed", nb.seed);
    }
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  c.validate();
  return c;
}

void apply_overrides(json& j, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like section.key=value: " + a);
    const std::string path = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (key.empty()) throw ConfigError("override has an empty key: " + a);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
      node = &(*node)[key];
      start = dot + 1;
    }
  }
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace daum
