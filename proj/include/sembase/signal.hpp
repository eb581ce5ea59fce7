#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sembase/errors.hpp"

namespace sembase {

// Axis lengths of the (X, t) discretization. The product is the signal
// dimension d.
struct Grid {
  std::vector<std::size_t> axes;

  std::size_t size() const;
  bool operator==(const Grid&) const = default;
};

// A discretized characteristic function flattened to a real vector.
class Signal {
 public:
  Signal(Eigen::VectorXd values, Grid grid, std::string modality, std::string id);

  const Eigen::VectorXd& values() const { return values_; }
  const Grid& grid() const { return grid_; }
  const std::string& modality() const { return modality_; }
  const std::string& id() const { return id_; }
  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }

 private:
  Eigen::VectorXd values_;
  Grid grid_;
  std::string modality_;
  std::string id_;
};

// Builds a signal with a fresh process-unique id ("sig-<n>").
Signal make_signal(std::span<const double> values, const Grid& grid, std::string modality);
Signal make_signal(const Eigen::VectorXd& values, const Grid& grid, std::string modality);

class SampleSet {
 public:
  SampleSet(std::vector<Signal> samples, std::uint64_t seed = 0);

  const std::vector<Signal>& samples() const { return samples_; }
  const Signal& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return samples_.front().dim(); }
  const Grid& grid() const { return samples_.front().grid(); }
  const std::string& modality() const { return samples_.front().modality(); }
  std::uint64_t seed() const { return seed_; }

  // Samples as columns, d x N.
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<Signal> samples_;
  std::uint64_t seed_;
};

struct SemanticBase {
  Eigen::VectorXd vector;
  std::optional<std::string> name;
  int order = 1;
};

// Returns the unit-L2 base pointing along `vector`. Throws InvalidArgument on
// zero or non-finite input.
SemanticBase normalize_base(const Eigen::VectorXd& vector);
SemanticBase normalize_base(std::span<const double> vector);

// Uniform midrise quantizer over [-1, 1] with 2^bits cells; returns cell
// indices. Values outside the range are clamped into the edge cells.
std::vector<std::uint32_t> quantize(const Eigen::VectorXd& v, int bits);
Eigen::VectorXd dequantize(std::span<const std::uint32_t> codes, int bits);

inline constexpr double kUnitNormTolerance = 1e-9;

class BaseSet {
 public:
  // Validates: nonempty, shared dimension, unit norms, and no two bases equal
  // after quantization to `quant_bits`.
  BaseSet(std::vector<SemanticBase> bases, int quant_bits = 16);

  const std::vector<SemanticBase>& bases() const { return bases_; }
  const SemanticBase& operator[](std::size_t i) const { return bases_[i]; }
  std::size_t size() const { return bases_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  int quant_bits() const { return quant_bits_; }

  // Bases as columns, d x N_K.
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // Concatenated quantization codes, base by base. Drives the lexicographic
  // tie-break between base sets.
  std::vector<std::uint32_t> quantized_key() const;

  // Stable 64-bit content fingerprint (FNV-1a over the quantized key).
  std::uint64_t fingerprint() const;

 private:
  std::vector<SemanticBase> bases_;
  int quant_bits_;
  Eigen::MatrixXd matrix_;
};

// Sparse coefficient vector over a base set of size `length`.
class Coefficients {
 public:
  explicit Coefficients(std::size_t length, double residual_norm = 0.0);

  void set(std::size_t index, double value);
  double get(std::size_t index) const;
  const std::map<std::size_t, double>& entries() const { return entries_; }
  std::size_t length() const { return length_; }
  std::size_t nnz() const { return entries_.size(); }
  double residual_norm() const { return residual_norm_; }
  void set_residual_norm(double r);

  Eigen::VectorXd dense() const;

 private:
  std::size_t length_;
  std::map<std::size_t, double> entries_;
  double residual_norm_;
};

// Content-derived identifier of a semantic base, used as the f_real
// attribute of a symbol.
std::string base_ref(const SemanticBase& base);

struct SemanticSymbol {
  std::string name;
  std::string base_ref;
  std::string domain;

  bool operator==(const SemanticSymbol&) const = default;
};

// Codebook of semantic association pairs. Within one domain a name resolves
// to exactly one base; a base may carry several names. Bindings are
// serialized by an internal mutex (single-writer).
class SymbolTable {
 public:
  std::optional<std::string> lookup(const std::string& domain, const std::string& name) const;
  std::set<std::string> names_of(const std::string& domain, const std::string& ref) const;
  std::vector<SemanticSymbol> symbols() const;
  std::size_t size() const;

 private:
  friend SemanticSymbol bind_symbol(const std::string&, const SemanticBase&, const std::string&,
                                    SymbolTable&);
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::string> by_name_;
};

// Inserts (domain, name) -> base_ref(base). Rebinding the same name to the
// same base is a no-op; to a different base throws UniquenessError.
SemanticSymbol bind_symbol(const std::string& name, const SemanticBase& base,
                           const std::string& domain, SymbolTable& codebook);

}  // namespace sembase
