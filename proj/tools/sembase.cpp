// sembase: corpus synthesis, decomposition, hierarchy, coding and message
// partitioning from the command line.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sembase/io.hpp"
#include "sembase/rng.hpp"
#include "sembase/synth.hpp"

namespace fs = std::filesystem;
using namespace sembase;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

// SEMBASE_LOG = error | warn | info | debug (default warn)
int log_level() {
  static const int level = [] {
    const char* v = std::getenv("SEMBASE_LOG");
    const std::string s = v ? v : "warn";
    if (s == "error") return 0;
    if (s == "info") return 2;
    if (s == "debug") return 3;
    return 1;
  }();
  return level;
}

void log(int level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) std::cerr << "[" << names[level] << "] " << msg << "\n";
}

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& kind, const std::string& message) {
  throw Failure{code, kind, message};
}

struct Common {
  std::string corpus;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = run_config_from_json(read_json(c.config));
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

json stamp(json j, const RunConfig& cfg) {
  j["config"] = to_json(cfg);
  j["seed"] = cfg.seed;
  j["prng"] = kPrngName;
  return j;
}

fs::path run_dir(const Common& c) {
  if (c.out.empty()) fail(kExitUsage, "usage", "--out is required");
  fs::create_directories(c.out);
  return c.out;
}

SampleSet load_corpus(const Common& c) {
  if (c.corpus.empty()) fail(kExitUsage, "usage", "--corpus is required");
  return read_corpus(c.corpus).samples;
}

json maybe_read(const fs::path& p) { return fs::exists(p) ? read_json(p) : json(nullptr); }

// Summary of whatever a run directory holds. Absent stages are null.
json build_report(const fs::path& dir) {
  const json dec = maybe_read(dir / "decompose.json");
  const json hier = maybe_read(dir / "hierarchy.json");
  json r;
  const json& src = !dec.is_null() ? dec : hier;
  if (src.is_null()) fail(kExitIo, "io", "run directory has neither decompose.json nor hierarchy.json");
  r["config"] = src.at("config");
  r["seed"] = src.at("seed");
  r["prng"] = src.at("prng");
  r["corpus"] = src.value("corpus", json(nullptr));
  if (!dec.is_null()) {
    const auto& res = dec.at("result");
    r["feasible"] = res.at("feasible");
    r["n_bases"] = res.at("n_bases");
    r["avg_error"] = res.at("avg_error");
    r["diversity"] = res.at("diversity");
    r["objective"] = res.at("objective");
    r["base_set_fingerprint"] = dec.at("base_set_fingerprint");
  } else {
    r["feasible"] = hier.at("tree").at("root_feasible");
  }
  if (!hier.is_null()) {
    const auto& t = hier.at("tree");
    r["hierarchy"] = {{"depth", t.at("depth")},
                      {"leaves", t.at("leaves").size()},
                      {"objective_sequence", t.at("objective_sequence")},
                      {"root_feasible", t.at("root_feasible")}};
  } else {
    r["hierarchy"] = nullptr;
  }
  std::size_t knowledge = 0;
  if (fs::exists(dir / "knowledge.jsonl")) knowledge = KnowledgeLog((dir / "knowledge.jsonl").string()).size();
  r["knowledge_log_size"] = knowledge;
  r["timestamp"] = iso8601_now();
  return r;
}

void write_report(const fs::path& dir) {
  write_json(dir / "report.json", build_report(dir));
  log(2, "wrote " + (dir / "report.json").string());
}

int cmd_synth(const std::string& spec_path, const Common& c) {
  if (c.out.empty()) fail(kExitUsage, "usage", "--out is required");
  const std::uint64_t seed = c.seed.value_or(0);
  auto out = synth(read_json(spec_path), seed);
  write_corpus(c.out, out.corpus);
  out.truth["seed"] = seed;
  out.truth["prng"] = kPrngName;
  write_json(c.out + ".truth.json", out.truth);
  log(2, "wrote " + c.out);
  return 0;
}

int cmd_decompose(const Common& c, bool oracle) {
  const auto cfg = load_config(c);
  const auto D = load_corpus(c);
  const auto dir = run_dir(c);
  const auto p = cfg.resolved();
  json out = stamp(json::object(), cfg);
  out["corpus"] = {{"N", D.size()}, {"d", D.dim()}, {"fingerprint", sample_set_fingerprint(D)}};
  std::optional<DecomposeResult> solved;
  try {
    solved = solve(D, p.decompose, p.coding, p.complexity, ExecOptions{c.threads});
  } catch (const DegenerateCandidate& e) {
    out["result"] = {{"feasible", false}, {"failure", e.what()}, {"n_bases", 0}, {"avg_error", nullptr},
                     {"diversity", nullptr}, {"objective", nullptr}};
    out["base_set_fingerprint"] = nullptr;
    write_json(dir / "decompose.json", out);
    write_report(dir);
    fail(kExitInfeasible, "infeasible", e.what());
  }
  const DecomposeResult& r = *solved;
  out["result"] = to_json(r);
  out["base_set_fingerprint"] = r.base_set.fingerprint();
  if (oracle) {
    const std::vector<double> levels = {-1.0, 0.0, 1.0};
    try {
      const auto o = oracle_decompose(D, p.decompose, p.coding, p.complexity, levels);
      out["oracle"] = {{"levels", levels},
                       {"feasible", o.feasible},
                       {"objective", to_json(o.objective)},
                       {"base_set", to_json(o.base_set)},
                       {"objective_gap", r.objective.total - o.objective.total}};
    } catch (const ComplexityGuardError& e) {
      out["oracle"] = {{"skipped", e.what()}};
      log(1, std::string("oracle skipped: ") + e.what());
    }
  }
  write_json(dir / "decompose.json", out);
  write_json(dir / "bases.json", stamp(to_json(r.base_set), cfg));
  {
    const auto prof = activation_profile(D, r.base_set, p.coding, p.decompose.tau);
    std::ostringstream csv;
    write_profile_csv(csv, prof);
    write_file(dir / "profile.csv", csv.str());
  }
  write_report(dir);
  log(2, "selected N_K=" + std::to_string(r.base_set.size()));
  if (!r.feasible) fail(kExitInfeasible, "infeasible", "no candidate met the error bound");
  return 0;
}

int cmd_hierarchy(const Common& c) {
  const auto cfg = load_config(c);
  const auto D = load_corpus(c);
  const auto dir = run_dir(c);
  HierarchyTree t = [&] {
    try {
      return build_hierarchy(D, cfg.resolved(), ExecOptions{c.threads});
    } catch (const DegenerateCandidate& e) {
      fail(kExitInfeasible, "infeasible", e.what());
    }
  }();
  json out = stamp(json::object(), cfg);
  out["corpus"] = {{"N", D.size()}, {"d", D.dim()}, {"fingerprint", sample_set_fingerprint(D)}};
  out["tree"] = to_json(t);
  write_json(dir / "hierarchy.json", out);
  write_report(dir);
  if (!t.root_feasible()) fail(kExitInfeasible, "infeasible", "root decomposition is infeasible");
  return 0;
}

BaseSet load_bases(const std::string& path) {
  if (path.empty()) fail(kExitUsage, "usage", "--bases is required");
  return base_set_from_json(read_json(path));
}

int cmd_encode(const Common& c, const std::string& bases_path) {
  const auto cfg = load_config(c);
  const auto D = load_corpus(c);
  const auto K = load_bases(bases_path);
  if (c.out.empty()) fail(kExitUsage, "usage", "--out is required");
  json codes = json::array();
  for (const auto& x : D.samples()) {
    codes.push_back({{"id", x.id()}, {"coefficients", to_json(encode(x, K, cfg.pipeline.coding))}});
  }
  json out = stamp(json::object(), cfg);
  out["base_set_fingerprint"] = K.fingerprint();
  out["grid"] = D.grid().axes;
  out["modality"] = D.modality();
  out["codes"] = std::move(codes);
  write_json(c.out, out);
  return 0;
}

int cmd_compose(const Common& c, const std::string& bases_path, const std::string& codes_path,
                const std::string& journal) {
  const auto cfg = load_config(c);
  const auto K = load_bases(bases_path);
  if (codes_path.empty()) fail(kExitUsage, "usage", "--codes is required");
  if (c.out.empty()) fail(kExitUsage, "usage", "--out is required");
  const json in = read_json(codes_path);
  Grid grid{in.value("grid", std::vector<std::size_t>{K.dim()})};
  const std::string modality = in.value("modality", std::string(""));

  std::vector<Signal> out_signals;
  std::vector<Coefficients> coeffs;
  for (const auto& e : in.at("codes")) {
    coeffs.push_back(coefficients_from_json(e.at("coefficients")));
    const Signal s = reconstruct(coeffs.back(), K, grid, modality);
    out_signals.emplace_back(s.values(), grid, modality, e.value("id", s.id()));
  }
  if (out_signals.empty()) fail(kExitConfig, "config", "no codes to compose");
  write_corpus(c.out, make_corpus(SampleSet(std::move(out_signals), cfg.seed)));

  if (!journal.empty()) {
    const auto D = load_corpus(c);
    const auto v = build_validator(D, K, cfg.pipeline.coding, cfg.compose.mode, cfg.compose.theta);
    KnowledgeLog log_(journal);
    std::size_t kept = 0;
    for (const auto& co : coeffs) {
      if (discover(co, K, v, D, log_)) ++kept;
    }
    log(2, "recorded " + std::to_string(kept) + " of " + std::to_string(coeffs.size()) + " compositions");
  }
  return 0;
}

int cmd_partition(const std::string& universe, const std::string& message, const std::string& receiver,
                  const Common& c) {
  if (universe.empty() || message.empty() || receiver.empty()) {
    fail(kExitUsage, "usage", "--universe, --message and --receiver are required");
  }
  const auto cfg = load_config(c);
  const Universe omega(symbol_set_from_json(read_json(universe)));
  const json mj = read_json(message);
  const Message m{symbol_set_from_json(mj.is_object() ? mj.at("symbols") : mj)};
  const json rj = read_json(receiver);
  if (!rj.is_object() || !rj.contains("knowledge") || !rj.contains("codebook")) {
    fail(kExitConfig, "config", "receiver needs 'knowledge' and 'codebook' arrays");
  }
  const ReceiverState r(symbol_set_from_json(rj.at("knowledge")), symbol_set_from_json(rj.at("codebook")));
  json out = stamp(to_json(partition(m, r, omega)), cfg);
  if (c.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    write_json(c.out, out);
  }
  return 0;
}

int cmd_report(const Common& c) {
  if (c.out.empty()) fail(kExitUsage, "usage", "--out (the run directory) is required");
  const fs::path dir = c.out;
  if (!fs::is_directory(dir)) fail(kExitIo, "io", "no such run directory: " + c.out);
  const json r = build_report(dir);
  write_json(dir / "report.json", r);
  std::cout << r.dump(2) << "\n";
  if (!r.at("feasible").get<bool>()) return kExitInfeasible;
  return 0;
}

void add_common(CLI::App* app, Common& c, bool corpus = true) {
  if (corpus) app->add_option("--corpus", c.corpus, "corpus file");
  app->add_option("--config", c.config, "RunConfig JSON");
  app->add_option("--seed", c.seed, "overrides the config seed");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic base decomposition toolkit"};
  app.require_subcommand(1);
  Common c;
  std::string spec, bases, codes, journal, universe, message, receiver;
  bool oracle = false;

  auto* synth_cmd = app.add_subcommand("synth", "generate a corpus and its ground truth");
  synth_cmd->add_option("--spec", spec, "generator spec JSON")->required();
  synth_cmd->add_option("--seed", c.seed, "seed");
  synth_cmd->add_option("--out", c.out, "corpus path; truth goes to <out>.truth.json")->required();

  auto* dec = app.add_subcommand("decompose", "select a base set");
  add_common(dec, c);
  dec->add_option("--out", c.out, "run directory");
  dec->add_flag("--oracle", oracle, "also run the exhaustive search when the instance is small enough");

  auto* hier = app.add_subcommand("hierarchy", "build the semantic hierarchy");
  add_common(hier, c);
  hier->add_option("--out", c.out, "run directory");

  auto* enc = app.add_subcommand("encode", "sparse-code a corpus over a base set");
  add_common(enc, c);
  enc->add_option("--bases", bases, "bases.json");
  enc->add_option("--out", c.out, "codes JSON");

  auto* comp = app.add_subcommand("compose", "synthesize signals from coefficients");
  add_common(comp, c);
  comp->add_option("--bases", bases, "bases.json");
  comp->add_option("--codes", codes, "codes JSON from encode");
  comp->add_option("--out", c.out, "output corpus");
  comp->add_option("--journal", journal, "verify against --corpus and log discoveries here");

  auto* part = app.add_subcommand("partition", "split a message into information, knowledge, dark");
  add_common(part, c, false);
  part->add_option("--universe", universe, "symbol ids JSON array");
  part->add_option("--message", message, "symbol ids JSON array");
  part->add_option("--receiver", receiver, "{\"knowledge\": [...], \"codebook\": [...]}");
  part->add_option("--out", c.out, "output JSON (stdout if omitted)");

  auto* rep = app.add_subcommand("report", "summarize a run directory");
  rep->add_option("--out", c.out, "run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", kExitUsage}}}}.dump()
              << "\n";
    return kExitUsage;
  }

  int code = 0;
  std::string kind, message_text;
  try {
    if (*synth_cmd) return cmd_synth(spec, c);
    if (*dec) return cmd_decompose(c, oracle);
    if (*hier) return cmd_hierarchy(c);
    if (*enc) return cmd_encode(c, bases);
    if (*comp) return cmd_compose(c, bases, codes, journal);
    if (*part) return cmd_partition(universe, message, receiver, c);
    if (*rep) return cmd_report(c);
    return kExitUsage;
  } catch (const Failure& f) {
    code = f.code, kind = f.kind, message_text = f.message;
  } catch (const IoError& e) {
    code = kExitIo, kind = "io", message_text = e.what();
  } catch (const DegenerateCandidate& e) {
    code = kExitInfeasible, kind = "infeasible", message_text = e.what();
  } catch (const Error& e) {
    code = kExitConfig, kind = "config", message_text = e.what();
  } catch (const json::exception& e) {
    code = kExitConfig, kind = "config", message_text = e.what();
  } catch (const fs::filesystem_error& e) {
    code = kExitIo, kind = "io", message_text = e.what();
  }
  std::cerr << json{{"error", {{"kind", kind}, {"message", message_text}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}
