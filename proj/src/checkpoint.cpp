#include "daum/checkpoint.hpp"

#include "daum/core/errors.hpp"
#include "daum/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace daum {

using nlohmann::json;

namespace {

constexpr std::size_t kValuesPerLine = 4;

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw DataError("malformed checkpoint " + path.string() + ": " + what);
}

std::vector<double> to_vector(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

const std::vector<double>& Checkpoint::segment(std::string_view name) const {
  for (const auto& [tag, values] : segments)
    if (tag == name) return values;
  throw DataError("checkpoint has no segment " + std::string(name));
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  auto out = open_output(path);
  out << kCheckpointMagic << '\n';
  out << "kind " << ck.kind << '\n';
  out << "meta " << ck.meta.dump() << '\n';
  out << "layout " << ck.layout.entries().size() << '\n';
  for (const auto& e : ck.layout.entries()) out << e.name << ' ' << e.rows << ' ' << e.cols << '\n';
  char buf[64];
  for (const auto& [tag, values] : ck.segments) {
    out << "segment " << tag << ' ' << values.size() << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%a", values[i]);
      out << buf << ((i + 1) % kValuesPerLine == 0 || i + 1 == values.size() ? '\n' : ' ');
    }
  }
  out << "end\n";
  if (!out) throw DataError("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path, std::string_view expected_kind) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) malformed(path, "missing or unsupported header");
  Checkpoint ck;
  if (!std::getline(in, line) || !line.starts_with("kind ")) malformed(path, "missing kind");
  ck.kind = line.substr(5);
  if (!expected_kind.empty() && ck.kind != expected_kind)
    throw DataError(path.string() + " holds a '" + ck.kind + "' checkpoint, expected '" + std::string(expected_kind) + "'");
  if (!std::getline(in, line) || !line.starts_with("meta ")) malformed(path, "missing meta");
  try {
    ck.meta = json::parse(line.substr(5));
  } catch (const json::exception& e) {
    malformed(path, e.what());
  }
  std::size_t n_entries = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "layout %zu", &n_entries) != 1)
    malformed(path, "missing layout");
  for (std::size_t i = 0; i < n_entries; ++i) {
    if (!std::getline(in, line)) malformed(path, "truncated layout");
    std::istringstream ls(line);
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(ls >> name >> rows >> cols)) malformed(path, "bad layout entry: " + line);
    ck.layout.add(name, rows, cols);
  }
  while (std::getline(in, line)) {
    if (line == "end") return ck;
    std::istringstream ls(line);
    std::string word, tag;
    std::size_t length = 0;
    if (!(ls >> word >> tag >> length) || word != "segment") malformed(path, "expected segment: " + line);
    std::vector<double> values;
    values.reserve(length);
    std::string token;
    while (values.size() < length && in >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size()) malformed(path, "bad value " + token);
      values.push_back(v);
    }
    if (values.size() != length) malformed(path, "truncated segment " + tag);
    std::getline(in, line);  // rest of the last value line
    ck.segments.emplace_back(tag, std::move(values));
  }
  malformed(path, "missing end marker");
}

json ple_config_to_json(const PleConfig& c) {
  return {{"input_dim", c.input_dim},     {"n_tasks", c.n_tasks},       {"n_shared_experts", c.n_shared_experts},
          {"experts_per_task", c.experts_per_task}, {"expert_dims", c.expert_dims}, {"gate_dims", c.gate_dims},
          {"tower_dims", c.tower_dims}};
}

PleConfig ple_config_from_json(const json& j) {
  try {
    PleConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.n_tasks = j.at("n_tasks").get<std::size_t>();
    c.n_shared_experts = j.at("n_shared_experts").get<std::size_t>();
    c.experts_per_task = j.at("experts_per_task").get<std::size_t>();
    c.expert_dims = j.at("expert_dims").get<std::vector<std::size_t>>();
    c.gate_dims = j.at("gate_dims").get<std::vector<std::size_t>>();
    c.tower_dims = j.at("tower_dims").get<std::vector<std::size_t>>();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad model description: ") + e.what());
  }
}

json student_config_to_json(const StudentConfig& c) {
  return {{"input_dim", c.input_dim},   {"n_tasks", c.n_tasks},     {"trunk_dims", c.trunk_dims},
          {"lambda", c.lambda},         {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size}, {"seed", c.seed}};
}

StudentConfig student_config_from_json(const json& j) {
  try {
    StudentConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.n_tasks = j.at("n_tasks").get<std::size_t>();
    c.trunk_dims = j.at("trunk_dims").get<std::vector<std::size_t>>();
    c.lambda = j.at("lambda").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad student description: ") + e.what());
  }
}

namespace {

json with_model(json meta, const char* key, json model) {
  if (meta.is_null()) meta = json::object();
  meta[key] = std::move(model);
  return meta;
}

const json& meta_field(const Checkpoint& ck, const char* key, const std::filesystem::path& path) {
  if (!ck.meta.is_object() || !ck.meta.contains(key)) malformed(path, std::string("meta lacks ") + key);
  return ck.meta.at(key);
}

void check_layout(const Checkpoint& ck, const ParamLayout& expected, const std::filesystem::path& path) {
  if (!(ck.layout == expected)) malformed(path, "layout does not match the model description");
}

}  // namespace

void save_ple(const std::filesystem::path& path, const PleNetwork& net, json meta) {
  Checkpoint ck{"ple-model", with_model(std::move(meta), "model", ple_config_to_json(net.arch->config())),
                net.arch->layout() ? *net.arch->layout() : ParamLayout{}, {}};
  ck.segments.emplace_back("params", to_vector(net.params.values()));
  write_checkpoint(path, ck);
}

PleNetwork load_ple(const std::filesystem::path& path, json* meta) {
  const auto ck = read_checkpoint(path, "ple-model");
  PleNetwork net = make_ple(ple_config_from_json(meta_field(ck, "model", path)));
  check_layout(ck, net.params.layout(), path);
  const auto& values = ck.segment("params");
  if (values.size() != net.params.size()) malformed(path, "parameter count mismatch");
  std::copy(values.begin(), values.end(), net.params.data());
  if (meta) *meta = ck.meta;
  return net;
}

void save_snapshots(const std::filesystem::path& path, const SnapshotBuffer& buffer, const PleConfig& config,
                    json meta) {
  const PleArchitecture arch(config);
  meta = with_model(std::move(meta), "model", ple_config_to_json(config));
  meta["count"] = buffer.size();
  Checkpoint ck{"snapshots", std::move(meta), *arch.layout(), {}};
  std::size_t i = 0;
  for (const auto& s : buffer.snapshots()) {
    if (s.size() != arch.param_count()) throw ShapeError("save_snapshots: snapshot does not match the model");
    ck.segments.emplace_back("snapshot." + std::to_string(i++), to_vector(s.values()));
  }
  write_checkpoint(path, ck);
}

SnapshotBuffer load_snapshots(const std::filesystem::path& path, PleConfig* config, json* meta) {
  const auto ck = read_checkpoint(path, "snapshots");
  const PleConfig cfg = ple_config_from_json(meta_field(ck, "model", path));
  const PleArchitecture arch(cfg);
  check_layout(ck, *arch.layout(), path);
  if (ck.segments.empty()) malformed(path, "no snapshots");
  SnapshotBuffer buffer(ck.segments.size());
  for (const auto& [tag, values] : ck.segments) {
    if (values.size() != arch.param_count()) malformed(path, "snapshot size mismatch in " + tag);
    buffer.push(ParamVector(arch.layout(), values));
  }
  if (config) *config = cfg;
  if (meta) *meta = ck.meta;
  return buffer;
}

void save_posterior(const std::filesystem::path& path, const SwagPosterior& posterior, const PleConfig& config,
                    json meta) {
  posterior.validate();
  const PleArchitecture arch(config);
  if (posterior.dim() != arch.param_count()) throw ShapeError("save_posterior: posterior does not match the model");
  meta = with_model(std::move(meta), "model", ple_config_to_json(config));
  meta["rank"] = posterior.rank;
  meta["scope"] = std::string(to_string(posterior.scope));
  Checkpoint ck{"swag-posterior", std::move(meta), *arch.layout(), {}};
  ck.segments.emplace_back("mean", to_vector(posterior.mean.values()));
  ck.segments.emplace_back("diag_var", posterior.diag_var);
  for (std::size_t r = 0; r < posterior.rank; ++r) {
    const auto col = posterior.deviations.col(static_cast<Eigen::Index>(r));
    ck.segments.emplace_back("deviation." + std::to_string(r), std::vector<double>(col.begin(), col.end()));
  }
  write_checkpoint(path, ck);
}

SwagPosterior load_posterior(const std::filesystem::path& path, PleConfig* config, json* meta) {
  const auto ck = read_checkpoint(path, "swag-posterior");
  const PleConfig cfg = ple_config_from_json(meta_field(ck, "model", path));
  const PleArchitecture arch(cfg);
  check_layout(ck, *arch.layout(), path);
  SwagPosterior p;
  try {
    p.rank = ck.meta.at("rank").get<std::size_t>();
    p.scope = swag_scope_from_string(ck.meta.at("scope").get<std::string>());
  } catch (const std::exception& e) {
    malformed(path, e.what());
  }
  const std::size_t d = arch.param_count();
  const auto& mean = ck.segment("mean");
  const auto& diag = ck.segment("diag_var");
  if (mean.size() != d || diag.size() != d) malformed(path, "mean or diag_var size mismatch");
  p.mean = ParamVector(arch.layout(), mean);
  p.diag_var = diag;
  p.deviations.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(p.rank));
  for (std::size_t r = 0; r < p.rank; ++r) {
    const auto& col = ck.segment("deviation." + std::to_string(r));
    if (col.size() != d) malformed(path, "deviation size mismatch");
    for (std::size_t i = 0; i < d; ++i) p.deviations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = col[i];
  }
  p.validate();
  if (config) *config = cfg;
  if (meta) *meta = ck.meta;
  return p;
}

void save_student(const std::filesystem::path& path, const StudentNet& student, json meta) {
  Checkpoint ck{"student", with_model(std::move(meta), "student", student_config_to_json(student.arch->config())),
                *student.arch->layout(), {}};
  ck.segments.emplace_back("params", to_vector(student.params.values()));
  write_checkpoint(path, ck);
}

StudentNet load_student(const std::filesystem::path& path, json* meta) {
  const auto ck = read_checkpoint(path, "student");
  StudentNet net = make_student(student_config_from_json(meta_field(ck, "student", path)));
  check_layout(ck, net.params.layout(), path);
  const auto& values = ck.segment("params");
  if (values.size() != net.params.size()) malformed(path, "parameter count mismatch");
  std::copy(values.begin(), values.end(), net.params.data());
  if (meta) *meta = ck.meta;
  return net;
}

}  // namespace daum
