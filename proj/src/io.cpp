#include "sembase/io.hpp"

#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>

#include "sembase/rng.hpp"

namespace sembase {

namespace {

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

json grid_json(const Grid& g) { return json(g.axes); }

Grid grid_from_json(const json& j) {
  Grid g;
  for (const auto& a : j) g.axes.push_back(a.get<std::size_t>());
  return g;
}

std::string sample_id(std::size_t i) { return "s" + std::to_string(i); }

}  // namespace

// ---- corpus ----------------------------------------------------------------

Corpus make_corpus(SampleSet samples, const json& generator) {
  json h;
  h["format"] = "sembase-corpus";
  h["version"] = 1;
  h["d"] = samples.dim();
  h["N"] = samples.size();
  h["grid"] = grid_json(samples.grid());
  h["modality"] = samples.modality();
  h["seed"] = samples.seed();
  h["generator"] = generator;
  h["prng"] = kPrngName;
  return Corpus{std::move(h), std::move(samples)};
}

std::vector<std::uint8_t> corpus_bytes(const Corpus& c) {
  const std::string header = c.header.dump();
  std::vector<std::uint8_t> out(std::begin(kCorpusMagic), std::end(kCorpusMagic));
  put_u64_le(out, header.size());
  out.insert(out.end(), header.begin(), header.end());
  const auto d = c.samples.dim();
  out.reserve(out.size() + 8 * d * c.samples.size());
  for (const auto& s : c.samples.samples()) {
    for (std::size_t i = 0; i < d; ++i) {
      std::uint64_t bits;
      const double v = s.values()[static_cast<Eigen::Index>(i)];
      std::memcpy(&bits, &v, sizeof bits);
      put_u64_le(out, bits);
    }
  }
  return out;
}

Corpus corpus_from_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kCorpusMagic, 8) != 0) {
    throw IoError("not a corpus file (bad magic)");
  }
  const auto hlen = get_u64_le(bytes.data() + 8);
  if (hlen > bytes.size() - 16) throw IoError("corpus header length exceeds file size");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(hlen));
  } catch (const json::exception& e) {
    throw IoError(std::string("corpus header is not valid JSON: ") + e.what());
  }
  std::size_t d = 0, n = 0;
  Grid grid;
  std::string modality;
  std::uint64_t seed = 0;
  try {
    d = header.at("d").get<std::size_t>();
    n = header.at("N").get<std::size_t>();
    grid = grid_from_json(header.at("grid"));
    modality = header.at("modality").get<std::string>();
    seed = header.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError(std::string("corpus header is missing fields: ") + e.what());
  }
  const std::size_t payload = bytes.size() - 16 - hlen;
  if (payload != 8 * d * n) {
    throw IoError("corpus payload holds " + std::to_string(payload) + " bytes, header implies " +
                  std::to_string(8 * d * n));
  }
  const std::uint8_t* p = bytes.data() + 16 + hlen;
  std::vector<Signal> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k, p += 8) {
      const std::uint64_t bits = get_u64_le(p);
      double x;
      std::memcpy(&x, &bits, sizeof x);
      v[static_cast<Eigen::Index>(k)] = x;
    }
    samples.emplace_back(std::move(v), grid, modality, sample_id(i));
  }
  return Corpus{std::move(header), SampleSet(std::move(samples), seed)};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void write_corpus(const std::filesystem::path& path, const Corpus& c) { write_file(path, corpus_bytes(c)); }

Corpus read_corpus(const std::filesystem::path& path) { return corpus_from_bytes(read_file(path)); }

json read_json(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw IoError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// ---- configuration ---------------------------------------------------------

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + " has the wrong type");
    }
  }

  void range(const char* key, std::size_t& lo, std::size_t& hi) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& r = j_.at(key);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer() || r[0].get<long long>() < 0 || r[1].get<long long>() < 0) {
      throw ConfigError(where_ + "." + key + " must be [min, max]");
    }
    lo = r[0].get<std::size_t>();
    hi = r[1].get<std::size_t>();
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + where_ + "." + k);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

PipelineConfig RunConfig::resolved() const {
  PipelineConfig p = pipeline;
  p.decompose.seed = seed;
  return p;
}

void RunConfig::validate() const {
  pipeline.coding.validate();
  pipeline.complexity.validate();
  pipeline.decompose.validate();
  pipeline.hierarchy.validate();
  if (compose.theta && !(*compose.theta >= 0.0)) throw ConfigError("compose.theta must be >= 0");
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Section top(j, "config");
  top.read("seed", c.seed);
  if (const auto* s = top.sub("coding")) {
    Section sec(*s, "coding");
    sec.read("sparsity", c.pipeline.coding.sparsity);
    sec.read("ridge", c.pipeline.coding.ridge);
    sec.finish();
  }
  if (const auto* s = top.sub("complexity")) {
    Section sec(*s, "complexity");
    sec.read("quant_bits", c.pipeline.complexity.quant_bits);
    sec.read("coeff_bits", c.pipeline.complexity.coeff_bits);
    sec.read("lambda", c.pipeline.complexity.lambda);
    sec.finish();
  }
  if (const auto* s = top.sub("decompose")) {
    auto& d = c.pipeline.decompose;
    Section sec(*s, "decompose");
    sec.read("epsilon", d.epsilon);
    sec.range("n_range", d.n_min, d.n_max);
    sec.read("restarts", d.restarts);
    sec.read("delta_d", d.delta_d);
    sec.read("max_iters", d.max_iters);
    sec.read("tau", d.tau);
    sec.finish();
  }
  if (const auto* s = top.sub("hierarchy")) {
    auto& h = c.pipeline.hierarchy;
    Section sec(*s, "hierarchy");
    sec.read("rho", h.rho);
    sec.read("min_subsample", h.min_subsample);
    sec.read("depth_cap", h.depth_cap);
    sec.range("child_n_range", h.child_n_min, h.child_n_max);
    sec.finish();
  }
  if (const auto* s = top.sub("compose")) {
    Section sec(*s, "compose");
    std::string mode = to_string(c.compose.mode);
    sec.read("mode", mode);
    c.compose.mode = validator_mode_from_string(mode);
    if (const auto* t = sec.sub("theta"); t && !t->is_null()) {
      if (!t->is_number()) throw ConfigError("compose.theta must be a number or null");
      c.compose.theta = t->get<double>();
    }
    sec.finish();
  }
  top.finish();
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  json j;
  j["seed"] = c.seed;
  j["coding"] = {{"sparsity", p.coding.sparsity}, {"ridge", p.coding.ridge}};
  j["complexity"] = {{"quant_bits", p.complexity.quant_bits},
                     {"coeff_bits", p.complexity.coeff_bits},
                     {"lambda", p.complexity.lambda}};
  j["decompose"] = {{"epsilon", p.decompose.epsilon},
                    {"n_range", {p.decompose.n_min, p.decompose.n_max}},
                    {"restarts", p.decompose.restarts},
                    {"delta_d", p.decompose.delta_d},
                    {"max_iters", p.decompose.max_iters},
                    {"tau", p.decompose.tau}};
  j["hierarchy"] = {{"rho", p.hierarchy.rho},
                    {"min_subsample", p.hierarchy.min_subsample},
                    {"depth_cap", p.hierarchy.depth_cap},
                    {"child_n_range", {p.hierarchy.child_n_min, p.hierarchy.child_n_max}}};
  j["compose"] = {{"mode", to_string(c.compose.mode)},
                  {"theta", c.compose.theta ? json(*c.compose.theta) : json(nullptr)}};
  return j;
}

// ---- value types -----------------------------------------------------------

namespace {

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json to_json(const Coefficients& c) {
  json entries = json::array();
  for (const auto& [i, v] : c.entries()) entries.push_back({i, v});
  return {{"length", c.length()}, {"entries", entries}, {"residual_norm", c.residual_norm()}};
}

Coefficients coefficients_from_json(const json& j) {
  try {
    Coefficients c(j.at("length").get<std::size_t>(), j.value("residual_norm", 0.0));
    for (const auto& e : j.at("entries")) c.set(e.at(0).get<std::size_t>(), e.at(1).get<double>());
    return c;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed coefficients: ") + e.what());
  }
}

json to_json(const BaseSet& K) {
  json bases = json::array();
  for (const auto& b : K.bases()) {
    json e = {{"vector", vector_json(b.vector)}, {"order", b.order}, {"ref", base_ref(b)}};
    e["name"] = b.name ? json(*b.name) : json(nullptr);
    bases.push_back(std::move(e));
  }
  return {{"dim", K.dim()}, {"quant_bits", K.quant_bits()}, {"bases", bases}};
}

BaseSet base_set_from_json(const json& j) {
  try {
    std::vector<SemanticBase> bases;
    for (const auto& e : j.at("bases")) {
      SemanticBase b;
      b.vector = vector_from_json(e.at("vector"));
      b.order = e.value("order", 1);
      if (e.contains("name") && !e.at("name").is_null()) b.name = e.at("name").get<std::string>();
      bases.push_back(std::move(b));
    }
    return BaseSet(std::move(bases), j.value("quant_bits", 16));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed base set: ") + e.what());
  }
}

json to_json(const ObjectiveValue& v) {
  return {{"storage_bits", v.storage},
          {"avg_complexity_bits", v.avg_complexity},
          {"lambda", v.lambda},
          {"total", v.total}};
}

json to_json(const CandidateRecord& c) {
  json j = {{"n_bases", c.n_bases}, {"restart", c.restart}, {"failed", c.failed}};
  if (c.failed) {
    j["failure"] = c.failure;
    return j;
  }
  j["avg_error"] = c.avg_error;
  j["diversity"] = c.diversity;
  j["objective"] = to_json(c.objective);
  j["feasible"] = c.feasible;
  return j;
}

json to_json(const DecomposeResult& r) {
  json trace = json::array();
  for (const auto& c : r.trace) trace.push_back(to_json(c));
  return {{"selected", r.selected},
          {"n_bases", r.base_set.size()},
          {"feasible", r.feasible},
          {"avg_error", r.avg_error},
          {"diversity", r.diversity},
          {"objective", to_json(r.objective)},
          {"base_set", to_json(r.base_set)},
          {"trace", trace}};
}

json to_json(const HierarchyTree& t) {
  json nodes = json::array();
  for (std::size_t i = 0; i < t.nodes().size(); ++i) {
    const auto& n = t.nodes()[i];
    json e = {{"id", i},
              {"order", n.base.order},
              {"path", t.path_of(i)},
              {"ref", base_ref(n.base)},
              {"vector", vector_json(n.base.vector)},
              {"accepted", n.accepted},
              {"children", n.children},
              {"subsample_ids", n.subsample_ids}};
    e["parent"] = n.parent == kNoParent ? json(nullptr) : json(n.parent);
    e["name"] = n.base.name ? json(*n.base.name) : json(nullptr);
    nodes.push_back(std::move(e));
  }
  json log = json::array();
  for (const auto& r : t.log()) {
    json e = {{"path", r.path},
              {"node", r.node},
              {"attempted", r.attempted},
              {"accepted", r.accepted},
              {"reason", r.reason},
              {"subsample_size", r.subsample_size},
              {"n_children", r.n_children},
              {"before", to_json(r.before)}};
    e["after"] = r.after ? to_json(*r.after) : json(nullptr);
    log.push_back(std::move(e));
  }
  return {{"depth", t.depth()},
          {"depth_cap", t.depth_cap()},
          {"root_feasible", t.root_feasible()},
          {"objective_sequence", t.objective_sequence()},
          {"leaves", t.leaves()},
          {"leaf_set", to_json(t.leaf_set())},
          {"nodes", nodes},
          {"log", log}};
}

json to_json(const KnowledgeRecord& r) {
  return {{"coefficients", to_json(r.coefficients)},
          {"composed", {{"values", vector_json(r.composed.values())},
                        {"grid", grid_json(r.composed.grid())},
                        {"modality", r.composed.modality()}}},
          {"verified", r.verified},
          {"novel", r.novel},
          {"timestamp", r.timestamp},
          {"provenance", {{"base_set_id", r.base_set_id}, {"validator_id", r.validator_id}}},
          {"key", r.key}};
}

KnowledgeRecord knowledge_record_from_json(const json& j) {
  try {
    const auto& c = j.at("composed");
    Signal s(vector_from_json(c.at("values")), grid_from_json(c.at("grid")),
             c.value("modality", ""), "knowledge");
    return KnowledgeRecord{coefficients_from_json(j.at("coefficients")),
                           std::move(s),
                           j.at("verified").get<bool>(),
                           j.at("novel").get<bool>(),
                           j.value("timestamp", ""),
                           j.at("provenance").at("base_set_id").get<std::string>(),
                           j.at("provenance").at("validator_id").get<std::string>(),
                           j.at("key").get<std::string>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed knowledge record: ") + e.what());
  }
}

json to_json(const SymbolSet& s) { return json(std::vector<SymbolId>(s.begin(), s.end())); }

SymbolSet symbol_set_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("symbol set must be a JSON array of integers");
  SymbolSet s;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ConfigError("symbol ids must be integers");
    s.insert(e.get<SymbolId>());
  }
  return s;
}

json to_json(const Partition& p) {
  return {{"information", to_json(p.information)},
          {"knowledge", to_json(p.knowledge)},
          {"dark", to_json(p.dark)}};
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sembase
