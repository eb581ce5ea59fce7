#pragma once

#include "sembase/coding.hpp"
#include "sembase/signal.hpp"

namespace sembase {

struct ComplexityConfig {
  int quant_bits = 16;  // bits per stored base entry
  int coeff_bits = 16;  // bits per stored coefficient value
  double lambda = 1.0;

  void validate() const;
};

struct ObjectiveValue {
  double storage = 0.0;         // v(K), bits
  double avg_complexity = 0.0;  // (1/N) sum l(x|K), bits
  double lambda = 0.0;
  double total = 0.0;           // storage + lambda * avg_complexity
};

// ceil(log2 n) for n >= 1; 0 for n == 1.
int index_bits(std::size_t n);

double storage_volume(const BaseSet& K, const ComplexityConfig& cfg);

// Bits for a single code: nnz * (ceil(log2 N_K) + coeff_bits).
double code_complexity(const Coefficients& c, const ComplexityConfig& cfg);

double representation_complexity(const Signal& x, const BaseSet& K, const CodingConfig& coding,
                                 const ComplexityConfig& cfg);

ObjectiveValue objective(const SampleSet& D, const BaseSet& K, const CodingConfig& coding,
                         const ComplexityConfig& cfg);

}  // namespace sembase
