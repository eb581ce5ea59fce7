#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sembase/coding.hpp"
#include "sembase/signal.hpp"

namespace sembase {

enum class ValidatorMode { CoefficientRange, SignalBounds, External };

std::string to_string(ValidatorMode m);
ValidatorMode validator_mode_from_string(const std::string& s);

// Stand-in for environment verification of a composed signal.
struct Validator {
  ValidatorMode mode = ValidatorMode::CoefficientRange;
  // Per base: observed [min, max] of nonzero training coefficients; nullopt
  // if the base was never used.
  std::vector<std::optional<std::pair<double, double>>> coeff_ranges;
  Eigen::VectorXd lower;  // signal bounding box
  Eigen::VectorXd upper;
  double theta = 0.0;     // novelty threshold (L2 distance)
  std::function<bool(const Signal&, const Coefficients&)> external;
  std::uint64_t training_fingerprint = 0;
  std::uint64_t base_fingerprint = 0;

  std::string id() const;
};

// Median nearest-neighbour L2 distance within the corpus (0 for N == 1).
double median_nn_distance(const SampleSet& D);

// Order-sensitive fingerprint of sample ids and values.
std::uint64_t sample_set_fingerprint(const SampleSet& D);

// Builds a validator from the training codes over K. theta defaults to the
// median nearest-neighbour distance of the training corpus.
Validator build_validator(const SampleSet& D_train, const BaseSet& K, const CodingConfig& coding,
                          ValidatorMode mode = ValidatorMode::CoefficientRange,
                          std::optional<double> theta = std::nullopt);

// Synthesizes sum c_n k_n.
Signal compose(const Coefficients& coeff_spec, const BaseSet& K);

struct Verdict {
  bool verified = false;
  bool novel = false;
};

Verdict verify(const Signal& candidate, const Coefficients& coeffs, const Validator& v,
               const SampleSet& D_train);

struct KnowledgeRecord {
  Coefficients coefficients;
  Signal composed;
  bool verified = false;
  bool novel = false;
  std::string timestamp;  // ISO-8601 UTC
  std::string base_set_id;
  std::string validator_id;
  std::string key;        // quantized coefficient key used for deduplication
};

// Coefficient values are quantized to multiples of this step for the
// deduplication key.
inline constexpr double kCoefficientKeyStep = 1e-9;

std::string coefficient_key(const Coefficients& c);

// Append-only, deduplicated log of discovered knowledge. When bound to a
// path, every appended record is written as one JSON line and existing lines
// are loaded on open.
class KnowledgeLog {
 public:
  KnowledgeLog() = default;
  explicit KnowledgeLog(std::string journal_path);

  // False if a record with the same key already exists.
  bool append(const KnowledgeRecord& rec);
  std::size_t size() const;
  std::vector<KnowledgeRecord> records() const;
  bool contains(const std::string& key) const;

 private:
  mutable std::mutex mutex_;
  std::optional<std::string> path_;
  std::set<std::string> keys_;
  std::vector<KnowledgeRecord> records_;
};

// compose -> verify -> record iff verified and novel.
std::optional<KnowledgeRecord> discover(const Coefficients& coeff_spec, const BaseSet& K,
                                        const Validator& v, const SampleSet& D_train,
                                        KnowledgeLog& log);

}  // namespace sembase
