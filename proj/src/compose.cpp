#include "sembase/compose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "sembase/io.hpp"

namespace sembase {

std::string to_string(ValidatorMode m) {
  switch (m) {
    case ValidatorMode::CoefficientRange: return "coefficient-range";
    case ValidatorMode::SignalBounds: return "signal-bounds";
    case ValidatorMode::External: return "external";
  }
  return "unknown";
}

ValidatorMode validator_mode_from_string(const std::string& s) {
  if (s == "coefficient-range") return ValidatorMode::CoefficientRange;
  if (s == "signal-bounds") return ValidatorMode::SignalBounds;
  if (s == "external") return ValidatorMode::External;
  throw ConfigError("unknown validator mode '" + s + "'");
}

std::string Validator::id() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%016llx", to_string(mode).c_str(),
                static_cast<unsigned long long>(training_fingerprint ^ (base_fingerprint * 31)));
  return buf;
}

double median_nn_distance(const SampleSet& D) {
  if (D.size() < 2) return 0.0;
  std::vector<double> nn(D.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < D.size(); ++i) {
    for (std::size_t j = 0; j < D.size(); ++j) {
      if (i != j) nn[i] = std::min(nn[i], (D[i].values() - D[j].values()).norm());
    }
  }
  std::sort(nn.begin(), nn.end());
  const auto m = nn.size() / 2;
  return nn.size() % 2 ? nn[m] : 0.5 * (nn[m - 1] + nn[m]);
}

std::uint64_t sample_set_fingerprint(const SampleSet& D) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& s : D.samples()) {
    eat(s.id().data(), s.id().size());
    eat(s.values().data(), sizeof(double) * static_cast<std::size_t>(s.values().size()));
  }
  return h;
}

Validator build_validator(const SampleSet& D_train, const BaseSet& K, const CodingConfig& coding,
                          ValidatorMode mode, std::optional<double> theta) {
  if (D_train.dim() != K.dim()) throw DimensionError("training set and bases differ in dimension");
  Validator v;
  v.mode = mode;
  v.coeff_ranges.assign(K.size(), std::nullopt);
  for (const auto& x : D_train.samples()) {
    const auto code = encode(x, K, coding);
    for (const auto& [j, c] : code.entries()) {
      auto& r = v.coeff_ranges[j];
      if (!r) {
        r.emplace(c, c);
      } else {
        r->first = std::min(r->first, c);
        r->second = std::max(r->second, c);
      }
    }
  }
  const auto X = D_train.matrix();
  v.lower = X.rowwise().minCoeff();
  v.upper = X.rowwise().maxCoeff();
  v.theta = theta.value_or(median_nn_distance(D_train));
  if (!(v.theta >= 0.0)) throw InvalidArgument("novelty threshold must be >= 0");
  v.training_fingerprint = sample_set_fingerprint(D_train);
  v.base_fingerprint = K.fingerprint();
  return v;
}

Signal compose(const Coefficients& coeff_spec, const BaseSet& K) {
  return reconstruct(coeff_spec, K);
}

Verdict verify(const Signal& candidate, const Coefficients& coeffs, const Validator& v,
               const SampleSet& D_train) {
  if (sample_set_fingerprint(D_train) != v.training_fingerprint) {
    throw InvalidArgument("validator was not built from this training set");
  }
  if (candidate.dim() != D_train.dim()) throw DimensionError("candidate dimension differs from training set");
  Verdict out;
  switch (v.mode) {
    case ValidatorMode::CoefficientRange: {
      if (coeffs.length() != v.coeff_ranges.size()) throw DimensionError("coefficient length mismatch");
      out.verified = true;
      for (const auto& [j, c] : coeffs.entries()) {
        const auto& r = v.coeff_ranges[j];
        if (!r || c < r->first || c > r->second) {
          out.verified = false;
          break;
        }
      }
      break;
    }
    case ValidatorMode::SignalBounds:
      out.verified = (candidate.values().array() >= v.lower.array()).all() &&
                     (candidate.values().array() <= v.upper.array()).all();
      break;
    case ValidatorMode::External:
      if (!v.external) throw InvalidArgument("external validator has no predicate");
      out.verified = v.external(candidate, coeffs);
      break;
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& x : D_train.samples()) nearest = std::min(nearest, (x.values() - candidate.values()).norm());
  out.novel = nearest > v.theta;
  return out;
}

std::string coefficient_key(const Coefficients& c) {
  std::string key = std::to_string(c.length());
  for (const auto& [j, v] : c.entries()) {
    const long long q = std::llround(v / kCoefficientKeyStep);
    if (q == 0) continue;
    key += ';' + std::to_string(j) + ':' + std::to_string(q);
  }
  return key;
}

KnowledgeLog::KnowledgeLog(std::string journal_path) : path_(std::move(journal_path)) {
  std::ifstream in(*path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto rec = knowledge_record_from_json(json::parse(line));
    if (keys_.insert(rec.key).second) records_.push_back(std::move(rec));
  }
}

bool KnowledgeLog::append(const KnowledgeRecord& rec) {
  if (!(rec.verified && rec.novel)) throw InvalidArgument("only verified and novel records may be logged");
  std::lock_guard lock(mutex_);
  if (!keys_.insert(rec.key).second) return false;
  records_.push_back(rec);
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw IoError("cannot open knowledge journal " + *path_);
    out << to_json(rec).dump() << '\n';
  }
  return true;
}

std::size_t KnowledgeLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::vector<KnowledgeRecord> KnowledgeLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

bool KnowledgeLog::contains(const std::string& key) const {
  std::lock_guard lock(mutex_);
  return keys_.count(key) > 0;
}

std::optional<KnowledgeRecord> discover(const Coefficients& coeff_spec, const BaseSet& K,
                                        const Validator& v, const SampleSet& D_train,
                                        KnowledgeLog& log) {
  const auto composed = compose(coeff_spec, K);
  const auto verdict = verify(composed, coeff_spec, v, D_train);
  if (!(verdict.verified && verdict.novel)) return std::nullopt;
  KnowledgeRecord rec{coeff_spec, composed, true, true, iso8601_now(),
                      [&] {
                        char buf[24];
                        std::snprintf(buf, sizeof buf, "%016llx",
                                      static_cast<unsigned long long>(K.fingerprint()));
                        return std::string(buf);
                      }(),
                      v.id(), coefficient_key(coeff_spec)};
  if (!log.append(rec)) return std::nullopt;
  return rec;
}

}  // namespace sembase
