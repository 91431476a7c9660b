#include "daum/report_io.hpp"

#include "daum/core/errors.hpp"

#include <charconv>

namespace daum {

using nlohmann::json;

json meta_to_json(const OutputMeta& meta) {
  json j = {{"kind", meta.kind},
            {"config_hash", meta.config_hash},
            {"seed", meta.seed},
            {"format_version", meta.format_version}};
  for (const auto& [k, v] : meta.extra.items()) j[k] = v;
  return j;
}

std::string meta_line(const OutputMeta& meta) { return json{{"_meta", meta_to_json(meta)}}.dump(); }

std::string csv_meta_comment(const OutputMeta& meta) {
  return "# kind=" + meta.kind + " config_hash=" + meta.config_hash + " seed=" + std::to_string(meta.seed) +
         " format_version=" + std::to_string(meta.format_version);
}

bool is_meta_line(std::string_view line) { return line.starts_with("{\"_meta\""); }

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return in;
}

namespace {

void append_row(std::string& line, const Matrix& m, Eigen::Index r) {
  line += '[';
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    if (t) line += ',';
    append_double(line, m(r, t));
  }
  line += ']';
}

template <class Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || is_meta_line(line)) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void fill_row(Matrix& m, Eigen::Index r, const std::vector<double>& v) {
  if (static_cast<Eigen::Index>(v.size()) != m.cols()) throw DataError("inconsistent task count in reports");
  for (Eigen::Index t = 0; t < m.cols(); ++t) m(r, t) = v[static_cast<std::size_t>(t)];
}

}  // namespace

void write_reports_ndjson(const std::filesystem::path& path, const UncertaintyBatch& batch, const OutputMeta& meta) {
  auto out = open_output(path);
  out << meta_line(meta) << '\n';
  std::string line;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    line = "{\"id\":" + std::to_string(batch.ids[i]) + ",\"mean\":";
    append_row(line, batch.mean, r);
    line += ",\"variance\":";
    append_row(line, batch.variance, r);
    line += ",\"n_samples\":" + std::to_string(batch.n_samples) + ",\"seed\":" + std::to_string(batch.seed) + "}\n";
    out << line;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

UncertaintyBatch read_reports_ndjson(const std::filesystem::path& path) {
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> means, vars;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  for_each_record(path, [&](const json& j) {
    ids.push_back(j.at("id").get<std::int64_t>());
    means.push_back(j.at("mean").get<std::vector<double>>());
    vars.push_back(j.at("variance").get<std::vector<double>>());
    n_samples = j.at("n_samples").get<std::size_t>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  });
  UncertaintyBatch b;
  b.ids = ids;
  b.n_samples = n_samples;
  b.seed = seed;
  const auto T = static_cast<Eigen::Index>(means.empty() ? 0 : means.front().size());
  b.mean.resize(static_cast<Eigen::Index>(ids.size()), T);
  b.variance.resize(static_cast<Eigen::Index>(ids.size()), T);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    fill_row(b.mean, static_cast<Eigen::Index>(i), means[i]);
    fill_row(b.variance, static_cast<Eigen::Index>(i), vars[i]);
  }
  return b;
}

void write_plan_ndjson(const std::filesystem::path& path, const InterceptPlan& plan,
                       std::span<const std::int64_t> ids, const OutputMeta& meta) {
  if (ids.size() != plan.z.size()) throw ShapeError("write_plan_ndjson: ids and decisions differ in length");
  OutputMeta m = meta;
  m.extra["strategy"] = plan.strategy.describe();
  m.extra["rate"] = plan.rate;
  const std::string strategy = json(plan.strategy.describe()).dump();
  auto out = open_output(path);
  out << meta_line(m) << '\n';
  std::string line;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    line = "{\"id\":" + std::to_string(ids[i]) + ",\"z\":" + std::to_string(plan.z[i]) + ",\"reward\":";
    append_double(line, plan.reward[i]);
    line += ",\"strategy\":" + strategy + "}\n";
    out << line;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void write_student_reports_ndjson(const std::filesystem::path& path, std::span<const std::int64_t> ids,
                                  const StudentOutputs& outputs, const OutputMeta& meta) {
  if (static_cast<Eigen::Index>(ids.size()) != outputs.probs.rows())
    throw ShapeError("write_student_reports_ndjson: ids and outputs differ in length");
  auto out = open_output(path);
  out << meta_line(meta) << '\n';
  std::string line;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    line = "{\"id\":" + std::to_string(ids[i]) + ",\"prob\":";
    append_row(line, outputs.probs, r);
    line += ",\"uncertainty\":";
    append_row(line, outputs.uncertainty, r);
    line += "}\n";
    out << line;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

StudentOutputs read_student_reports_ndjson(const std::filesystem::path& path, std::vector<std::int64_t>* ids) {
  std::vector<std::int64_t> seen;
  std::vector<std::vector<double>> probs, uncs;
  for_each_record(path, [&](const json& j) {
    seen.push_back(j.at("id").get<std::int64_t>());
    probs.push_back(j.at("prob").get<std::vector<double>>());
    uncs.push_back(j.at("uncertainty").get<std::vector<double>>());
  });
  StudentOutputs o;
  const auto T = static_cast<Eigen::Index>(probs.empty() ? 0 : probs.front().size());
  o.probs.resize(static_cast<Eigen::Index>(seen.size()), T);
  o.uncertainty.resize(static_cast<Eigen::Index>(seen.size()), T);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    fill_row(o.probs, static_cast<Eigen::Index>(i), probs[i]);
    fill_row(o.uncertainty, static_cast<Eigen::Index>(i), uncs[i]);
  }
  if (ids) *ids = std::move(seen);
  return o;
}

}  // namespace daum
