#include "daum/synth.hpp"

#include "daum/core/errors.hpp"
#include "daum/core/rng.hpp"
#include "daum/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace daum {

namespace {

constexpr std::uint64_t kGenerateStream = 0x67656e;
constexpr std::uint64_t kAmbiguityStream = 0x616d62;
constexpr std::uint64_t kSplitStream = 0x73706c;

double round_to(double v, double scale) { return std::nearbyint(v * scale) / scale; }

// Draws funnel labels for one row from its marginal truth.
void draw_labels(Rng& rng, const double* truth, double* labels) {
  bool alive = true;
  double previous = 1.0;
  for (std::size_t k = 0; k < kFunnelStages; ++k) {
    const double conditional = previous > 0.0 ? truth[k] / previous : 0.0;
    const bool hit = rng.uniform() < conditional;
    alive = alive && hit;
    labels[k] = alive ? 1.0 : 0.0;
    previous = truth[k];
  }
}

}  // namespace

void FunnelConfig::validate() const {
  if (feature_dim == 0) throw ConfigError("data.feature_dim must be positive");
  if (n_samples == 0) throw ConfigError("data.n_samples must be positive");
  for (std::size_t k = 0; k < kFunnelStages; ++k) {
    if (!(target_rates[k] > 0.0 && target_rates[k] < 1.0))
      throw ConfigError("data.target_rates must lie in (0, 1)");
    if (k > 0 && !(target_rates[k] < target_rates[k - 1]))
      throw ConfigError("data.target_rates must be strictly decreasing down the funnel");
  }
  if (!(ambiguity_fraction >= 0.0 && ambiguity_fraction <= 1.0))
    throw ConfigError("data.ambiguity_fraction must lie in [0, 1]");
  if (ambiguity_group_size < 2) throw ConfigError("data.ambiguity_group_size must be at least 2");
  if (ambiguity_fraction > 0.0 &&
      ambiguity_fraction * static_cast<double>(n_samples) < static_cast<double>(ambiguity_group_size))
    throw ConfigError("data.ambiguity_fraction * n_samples is smaller than one group");
  if (!(score_scale > 0.0) || !std::isfinite(score_scale)) throw ConfigError("data.score_scale must be positive");
  if (!(stage_correlation >= -1.0 && stage_correlation <= 1.0))
    throw ConfigError("data.stage_correlation must lie in [-1, 1]");
  if (feature_decimals < 0 || feature_decimals > 15) throw ConfigError("data.feature_decimals must lie in [0, 15]");
}

Example Dataset::example(std::size_t i) const {
  if (i >= size()) throw ArgumentError("Dataset::example: index out of range");
  Example ex;
  ex.id = ids[i];
  ex.features.assign(features.row(static_cast<Eigen::Index>(i)).data(),
                     features.row(static_cast<Eigen::Index>(i)).data() + features.cols());
  for (std::size_t k = 0; k < kFunnelStages; ++k)
    ex.labels[k] = static_cast<int>(labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
  if (has_truth()) {
    std::array<double, kFunnelStages> t{};
    for (std::size_t k = 0; k < kFunnelStages; ++k)
      t[k] = truth(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    ex.truth = t;
  }
  ex.group_id = group_ids[i];
  return ex;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.features.resize(n, features.cols());
  out.labels.resize(n, labels.cols());
  if (has_truth()) out.truth.resize(n, truth.cols());
  out.ids.reserve(rows.size());
  out.group_ids.reserve(rows.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
    if (src >= features.rows()) throw ArgumentError("Dataset::subset: row out of range");
    out.features.row(r) = features.row(src);
    out.labels.row(r) = labels.row(src);
    if (has_truth()) out.truth.row(r) = truth.row(src);
    out.ids.push_back(ids[static_cast<std::size_t>(src)]);
    out.group_ids.push_back(group_ids[static_cast<std::size_t>(src)]);
  }
  return out;
}

std::vector<double> Dataset::label_column(std::size_t stage) const {
  if (stage >= static_cast<std::size_t>(labels.cols())) throw ArgumentError("label_column: stage out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i)
    out[i] = labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(stage));
  return out;
}

void Dataset::check_funnel() const {
  for (Eigen::Index i = 0; i < labels.rows(); ++i)
    for (Eigen::Index k = 1; k < labels.cols(); ++k)
      if (labels(i, k) > labels(i, k - 1))
        throw DataError("funnel violated at id " + std::to_string(ids[static_cast<std::size_t>(i)]));
}

Dataset make_dataset(const std::vector<Example>& examples) {
  Dataset d;
  if (examples.empty()) return d;
  const std::size_t f = examples.front().features.size();
  const bool truth = std::all_of(examples.begin(), examples.end(), [](const Example& e) { return e.truth.has_value(); });
  const auto n = static_cast<Eigen::Index>(examples.size());
  d.features.resize(n, static_cast<Eigen::Index>(f));
  d.labels.resize(n, kFunnelStages);
  if (truth) d.truth.resize(n, kFunnelStages);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Example& e = examples[static_cast<std::size_t>(i)];
    if (e.features.size() != f) throw ShapeError("make_dataset: inconsistent feature dimension");
    for (std::size_t j = 0; j < f; ++j) d.features(i, static_cast<Eigen::Index>(j)) = e.features[j];
    for (std::size_t k = 0; k < kFunnelStages; ++k) {
      d.labels(i, static_cast<Eigen::Index>(k)) = e.labels[k];
      if (truth) d.truth(i, static_cast<Eigen::Index>(k)) = (*e.truth)[k];
    }
    d.ids.push_back(e.id);
    d.group_ids.push_back(e.group_id);
  }
  return d;
}

GeneratedFunnel generate_funnel(const FunnelConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.n_samples);
  const auto f = static_cast<Eigen::Index>(config.feature_dim);
  Rng rng(derive_seed(config.seed, kGenerateStream));

  Matrix directions(kFunnelStages, f);
  for (Eigen::Index k = 0; k < directions.rows(); ++k)
    for (Eigen::Index j = 0; j < f; ++j) directions(k, j) = rng.normal();
  directions.row(0).normalize();
  const double rho = config.stage_correlation;
  for (Eigen::Index k = 1; k < directions.rows(); ++k) {
    directions.row(k).normalize();
    directions.row(k) = rho * directions.row(0) + std::sqrt(1.0 - rho * rho) * directions.row(k);
    directions.row(k).normalize();
  }

  GeneratedFunnel out;
  Dataset& d = out.data;
  d.features.resize(n, f);
  const double scale = std::pow(10.0, config.feature_decimals);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < f; ++j) d.features(i, j) = round_to(rng.normal(), scale);

  const Matrix scores = config.score_scale * (d.features * directions.transpose());
  d.truth.resize(n, kFunnelStages);
  Vector cumulative = Vector::Ones(n);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kFunnelStages); ++k) {
    auto realized = [&](double offset) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) total += cumulative(i) * sigmoid(scores(i, k) + offset);
      return total / static_cast<double>(n);
    };
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (realized(mid) < config.target_rates[static_cast<std::size_t>(k)] ? lo : hi) = mid;
    }
    const double offset = 0.5 * (lo + hi);
    out.offsets[static_cast<std::size_t>(k)] = offset;
    for (Eigen::Index i = 0; i < n; ++i) {
      cumulative(i) *= sigmoid(scores(i, k) + offset);
      d.truth(i, k) = cumulative(i);
    }
  }

  d.labels.resize(n, kFunnelStages);
  for (Eigen::Index i = 0; i < n; ++i) draw_labels(rng, d.truth.row(i).data(), d.labels.row(i).data());
  d.ids.resize(config.n_samples);
  std::iota(d.ids.begin(), d.ids.end(), std::int64_t{0});
  d.group_ids.assign(config.n_samples, -1);

  if (config.ambiguity_fraction > 0.0) d = inject_ambiguity(d, config);
  return out;
}

Dataset generate(const FunnelConfig& config) { return generate_funnel(config).data; }

Dataset inject_ambiguity(const Dataset& data, const FunnelConfig& config) {
  if (config.ambiguity_fraction == 0.0) return data;
  if (!(config.ambiguity_fraction > 0.0 && config.ambiguity_fraction <= 1.0))
    throw ConfigError("ambiguity_fraction must lie in [0, 1]");
  if (config.ambiguity_group_size < 2) throw ConfigError("ambiguity_group_size must be at least 2");
  if (!data.has_truth()) throw DataError("inject_ambiguity needs ground-truth probabilities");
  const std::size_t g = config.ambiguity_group_size;
  const std::size_t members = static_cast<std::size_t>(config.ambiguity_fraction * static_cast<double>(data.size()));
  const std::size_t n_groups = members / g;
  if (n_groups == 0) throw ConfigError("ambiguity_fraction * n is smaller than one group");

  Rng rng(derive_seed(config.seed, kAmbiguityStream));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  Dataset out = data;
  for (std::size_t grp = 0; grp < n_groups; ++grp) {
    const auto leader = static_cast<Eigen::Index>(order[grp * g]);
    for (std::size_t m = 0; m < g; ++m) {
      const auto row = static_cast<Eigen::Index>(order[grp * g + m]);
      out.features.row(row) = data.features.row(leader);
      out.truth.row(row) = data.truth.row(leader);
      out.group_ids[static_cast<std::size_t>(row)] = static_cast<std::int64_t>(grp);
      draw_labels(rng, out.truth.row(row).data(), out.labels.row(row).data());
    }
  }
  return out;
}

SplitIndices split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ArgumentError("split: fraction must lie in (0, 1)");
  // Units are single rows or whole ambiguity groups, in first-seen order.
  std::vector<std::vector<std::size_t>> units;
  {
    std::vector<std::pair<std::int64_t, std::size_t>> grouped;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.group_ids[i] < 0) {
        units.push_back({i});
      } else {
        grouped.emplace_back(data.group_ids[i], i);
      }
    }
    std::stable_sort(grouped.begin(), grouped.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t j = 0; j < grouped.size(); ++j) {
      if (j == 0 || grouped[j].first != grouped[j - 1].first) units.emplace_back();
      units.back().push_back(grouped[j].second);
    }
  }
  Rng rng(derive_seed(seed, kSplitStream));
  std::shuffle(units.begin(), units.end(), rng.engine());

  const auto target = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.size())));
  SplitIndices out;
  for (const auto& unit : units) {
    auto& side = out.train.size() + unit.size() <= target ? out.train : out.test;
    side.insert(side.end(), unit.begin(), unit.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

void write_dataset_ndjson(const std::filesystem::path& path, const Dataset& data, const OutputMeta& meta) {
  auto out = open_output(path);
  out << meta_line(meta) << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    line.clear();
    line += "{\"id\":" + std::to_string(data.ids[i]) + ",\"features\":[";
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      if (j) line += ',';
      append_double(line, data.features(r, j));
    }
    line += "],\"labels\":[";
    for (Eigen::Index k = 0; k < data.labels.cols(); ++k) {
      if (k) line += ',';
      line += data.labels(r, k) > 0.5 ? '1' : '0';
    }
    line += ']';
    if (data.has_truth()) {
      line += ",\"truth\":[";
      for (Eigen::Index k = 0; k < data.truth.cols(); ++k) {
        if (k) line += ',';
        append_double(line, data.truth(r, k));
      }
      line += ']';
    }
    if (data.group_ids[i] >= 0) line += ",\"group_id\":" + std::to_string(data.group_ids[i]);
    line += "}\n";
    out << line;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

Dataset read_dataset_ndjson(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Example> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || is_meta_line(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Example e;
      e.id = j.at("id").get<std::int64_t>();
      e.features = j.at("features").get<std::vector<double>>();
      const auto labels = j.at("labels").get<std::vector<int>>();
      if (labels.size() != kFunnelStages) throw DataError("expected 4 labels");
      std::copy(labels.begin(), labels.end(), e.labels.begin());
      if (j.contains("truth")) {
        const auto t = j.at("truth").get<std::vector<double>>();
        if (t.size() != kFunnelStages) throw DataError("expected 4 truth values");
        std::array<double, kFunnelStages> a{};
        std::copy(t.begin(), t.end(), a.begin());
        e.truth = a;
      }
      if (j.contains("group_id")) e.group_id = j.at("group_id").get<std::int64_t>();
      examples.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return make_dataset(examples);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data, const OutputMeta& meta) {
  auto out = open_output(path);
  out << csv_meta_comment(meta) << '\n' << "id";
  for (std::size_t j = 0; j < data.feature_dim(); ++j) out << ",f" << j;
  for (const auto& name : {"c2s_click", "online", "add_to_cart", "deal"}) out << ',' << name;
  out << ",group_id\n";
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    line = std::to_string(data.ids[i]);
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      line += ',';
      append_double(line, data.features(r, j));
    }
    for (Eigen::Index k = 0; k < data.labels.cols(); ++k) line += data.labels(r, k) > 0.5 ? ",1" : ",0";
    line += ',' + std::to_string(data.group_ids[i]) + '\n';
    out << line;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace daum
