#include "sembase/complexity.hpp"

#include <cmath>

namespace sembase {

void ComplexityConfig::validate() const {
  if (quant_bits < 1 || quant_bits > 31) throw ConfigError("complexity.quant_bits must be in [1, 31]");
  if (coeff_bits < 1) throw ConfigError("complexity.coeff_bits must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("complexity.lambda must be >= 0");
}

int index_bits(std::size_t n) {
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

double storage_volume(const BaseSet& K, const ComplexityConfig& cfg) {
  return static_cast<double>(K.size()) * static_cast<double>(K.dim()) * cfg.quant_bits;
}

double code_complexity(const Coefficients& c, const ComplexityConfig& cfg) {
  return static_cast<double>(c.nnz()) * (index_bits(c.length()) + cfg.coeff_bits);
}

double representation_complexity(const Signal& x, const BaseSet& K, const CodingConfig& coding,
                                  const ComplexityConfig& cfg) {
  return code_complexity(encode(x, K, coding), cfg);
}

ObjectiveValue objective(const SampleSet& D, const BaseSet& K, const CodingConfig& coding,
                         const ComplexityConfig& cfg) {
  double sum = 0.0;
  for (const auto& x : D.samples()) sum += representation_complexity(x, K, coding, cfg);
  ObjectiveValue v;
  v.storage = storage_volume(K, cfg);
  v.avg_complexity = sum / static_cast<double>(D.size());
  v.lambda = cfg.lambda;
  v.total = v.storage + cfg.lambda * v.avg_complexity;
  return v;
}

}  // namespace sembase
