#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sembase/compose.hpp"
#include "sembase/decompose.hpp"
#include "sembase/hierarchy.hpp"
#include "sembase/message_algebra.hpp"
#include "sembase/signal.hpp"
#include "sembase/statistics.hpp"

namespace sembase {

using json = nlohmann::json;

// ---- corpus files ----------------------------------------------------------
//
// Layout: 8-byte magic "SBCORPUS", u64 little-endian header length, the
// header as compact JSON, then N*d little-endian IEEE-754 doubles, row-major
// (sample by sample).

inline constexpr char kCorpusMagic[8] = {'S', 'B', 'C', 'O', 'R', 'P', 'U', 'S'};

struct Corpus {
  json header;  // d, grid, modality, N, seed, generator, prng
  SampleSet samples;
};

// Builds the header from the sample set; `generator` may be null.
Corpus make_corpus(SampleSet samples, const json& generator = nullptr);

std::vector<std::uint8_t> corpus_bytes(const Corpus& c);
Corpus corpus_from_bytes(const std::vector<std::uint8_t>& bytes);
void write_corpus(const std::filesystem::path& path, const Corpus& c);
Corpus read_corpus(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

// ---- configuration ---------------------------------------------------------

struct ComposeConfig {
  ValidatorMode mode = ValidatorMode::CoefficientRange;
  std::optional<double> theta;  // unset: median nearest-neighbour distance
};

struct RunConfig {
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  ComposeConfig compose;

  // Copies the top-level seed into the decompose stage.
  PipelineConfig resolved() const;
  void validate() const;
};

// Unknown keys anywhere are rejected with ConfigError.
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& c);

// ---- value types -----------------------------------------------------------

json to_json(const Coefficients& c);
Coefficients coefficients_from_json(const json& j);

json to_json(const BaseSet& K);
BaseSet base_set_from_json(const json& j);

json to_json(const ObjectiveValue& v);
json to_json(const CandidateRecord& c);
json to_json(const DecomposeResult& r);
json to_json(const HierarchyTree& t);
json to_json(const KnowledgeRecord& r);
KnowledgeRecord knowledge_record_from_json(const json& j);

json to_json(const SymbolSet& s);
SymbolSet symbol_set_from_json(const json& j);
json to_json(const Partition& p);

std::string iso8601_now();

}  // namespace sembase
