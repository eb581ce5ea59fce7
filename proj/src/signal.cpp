#include "sembase/signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sembase {

std::size_t Grid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (auto a : axes) n *= a;
  return n;
}

namespace {

std::string describe(const Grid& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.axes.size(); ++i) os << (i ? "x" : "") << g.axes[i];
  return os.str();
}

std::string fresh_id() {
  static std::atomic<std::uint64_t> counter{0};
  return "sig-" + std::to_string(counter.fetch_add(1));
}

}  // namespace

Signal::Signal(Eigen::VectorXd values, Grid grid, std::string modality, std::string id)
    : values_(std::move(values)),
      grid_(std::move(grid)),
      modality_(std::move(modality)),
      id_(std::move(id)) {
  if (grid_.size() != static_cast<std::size_t>(values_.size())) {
    throw DimensionError("signal has " + std::to_string(values_.size()) +
                         " values but grid " + describe(grid_) + " holds " +
                         std::to_string(grid_.size()));
  }
  if (!values_.allFinite()) throw InvalidArgument("signal values must be finite");
}

Signal make_signal(std::span<const double> values, const Grid& grid, std::string modality) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                        static_cast<Eigen::Index>(values.size()));
  return Signal(std::move(v), grid, std::move(modality), fresh_id());
}

Signal make_signal(const Eigen::VectorXd& values, const Grid& grid, std::string modality) {
  return Signal(values, grid, std::move(modality), fresh_id());
}

SampleSet::SampleSet(std::vector<Signal> samples, std::uint64_t seed)
    : samples_(std::move(samples)), seed_(seed) {
  if (samples_.empty()) throw InvalidArgument("sample set must contain at least one signal");
  const auto& g = samples_.front().grid();
  for (const auto& s : samples_) {
    if (!(s.grid() == g)) throw DimensionError("all samples must share one grid");
  }
}

Eigen::MatrixXd SampleSet::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) m.col(static_cast<Eigen::Index>(i)) = samples_[i].values();
  return m;
}

SemanticBase normalize_base(const Eigen::VectorXd& vector) {
  if (!vector.allFinite()) throw InvalidArgument("base vector must be finite");
  const double n = vector.norm();
  if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  return SemanticBase{vector / n, std::nullopt, 1};
}

SemanticBase normalize_base(std::span<const double> vector) {
  return normalize_base(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
      vector.data(), static_cast<Eigen::Index>(vector.size()))));
}

std::vector<std::uint32_t> quantize(const Eigen::VectorXd& v, int bits) {
  if (bits < 1 || bits > 31) throw InvalidArgument("quant_bits must be in [1, 31]");
  const double cells = std::ldexp(1.0, bits);
  const double step = 2.0 / cells;
  std::vector<std::uint32_t> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double c = std::floor((v[i] + 1.0) / step);
    c = std::clamp(c, 0.0, cells - 1.0);
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(c);
  }
  return out;
}

Eigen::VectorXd dequantize(std::span<const std::uint32_t> codes, int bits) {
  const double step = 2.0 / std::ldexp(1.0, bits);
  Eigen::VectorXd v(static_cast<Eigen::Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) v[static_cast<Eigen::Index>(i)] = -1.0 + (codes[i] + 0.5) * step;
  return v;
}

BaseSet::BaseSet(std::vector<SemanticBase> bases, int quant_bits)
    : bases_(std::move(bases)), quant_bits_(quant_bits) {
  if (bases_.empty()) throw InvalidArgument("base set must contain at least one base");
  if (quant_bits_ < 1 || quant_bits_ > 31) throw InvalidArgument("quant_bits must be in [1, 31]");
  const auto d = bases_.front().vector.size();
  matrix_.resize(d, static_cast<Eigen::Index>(bases_.size()));
  std::set<std::vector<std::uint32_t>> seen;
  for (std::size_t i = 0; i < bases_.size(); ++i) {
    const auto& v = bases_[i].vector;
    if (v.size() != d) throw DimensionError("all bases must share one dimension");
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
      throw InvalidArgument("base " + std::to_string(i) + " is not unit norm");
    }
    if (bases_[i].order < 1) throw InvalidArgument("base order must be >= 1");
    if (!seen.insert(quantize(v, quant_bits_)).second) {
      throw DegenerateCandidate("base " + std::to_string(i) + " duplicates an earlier base after quantization");
    }
    matrix_.col(static_cast<Eigen::Index>(i)) = v;
  }
}

std::vector<std::uint32_t> BaseSet::quantized_key() const {
  std::vector<std::uint32_t> key;
  key.reserve(bases_.size() * dim());
  for (const auto& b : bases_) {
    auto q = quantize(b.vector, quant_bits_);
    key.insert(key.end(), q.begin(), q.end());
  }
  return key;
}

namespace {

std::uint64_t fnv1a(std::span<const std::uint32_t> words, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (auto w : words) {
    for (int b = 0; b < 4; ++b) {
      h ^= (w >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

std::uint64_t BaseSet::fingerprint() const {
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(dim()),
                                   static_cast<std::uint32_t>(size())};
  return fnv1a(quantized_key(), fnv1a(header));
}

Coefficients::Coefficients(std::size_t length, double residual_norm)
    : length_(length), residual_norm_(0.0) {
  set_residual_norm(residual_norm);
}

void Coefficients::set(std::size_t index, double value) {
  if (index >= length_) throw DimensionError("coefficient index out of range");
  if (!std::isfinite(value)) throw InvalidArgument("coefficient must be finite");
  if (value == 0.0) {
    entries_.erase(index);
  } else {
    entries_[index] = value;
  }
}

double Coefficients::get(std::size_t index) const {
  auto it = entries_.find(index);
  return it == entries_.end() ? 0.0 : it->second;
}

void Coefficients::set_residual_norm(double r) {
  if (!std::isfinite(r) || r < 0.0) throw InvalidArgument("residual norm must be finite and >= 0");
  residual_norm_ = r;
}

Eigen::VectorXd Coefficients::dense() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(length_));
  for (const auto& [i, c] : entries_) v[static_cast<Eigen::Index>(i)] = c;
  return v;
}

std::string base_ref(const SemanticBase& base) {
  const auto q = quantize(base.vector, 16);
  const std::uint32_t d = static_cast<std::uint32_t>(q.size());
  const std::uint64_t h = fnv1a(q, fnv1a(std::span<const std::uint32_t>(&d, 1)));
  char buf[24];
  std::snprintf(buf, sizeof buf, "k%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::string> SymbolTable::lookup(const std::string& domain,
                                               const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto it = by_name_.find({domain, name});
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> SymbolTable::names_of(const std::string& domain, const std::string& ref) const {
  std::lock_guard lock(mutex_);
  std::set<std::string> out;
  for (const auto& [key, r] : by_name_) {
    if (key.first == domain && r == ref) out.insert(key.second);
  }
  return out;
}

std::vector<SemanticSymbol> SymbolTable::symbols() const {
  std::lock_guard lock(mutex_);
  std::vector<SemanticSymbol> out;
  out.reserve(by_name_.size());
  for (const auto& [key, r] : by_name_) out.push_back({key.second, r, key.first});
  return out;
}

std::size_t SymbolTable::size() const {
  std::lock_guard lock(mutex_);
  return by_name_.size();
}

SemanticSymbol bind_symbol(const std::string& name, const SemanticBase& base,
                           const std::string& domain, SymbolTable& codebook) {
  if (name.empty()) throw InvalidArgument("symbol name must be nonempty");
  const std::string ref = base_ref(base);
  std::lock_guard lock(codebook.mutex_);
  auto [it, inserted] = codebook.by_name_.try_emplace({domain, name}, ref);
  if (!inserted && it->second != ref) {
    throw UniquenessError("name '" + name + "' is already bound to " + it->second +
                          " in domain '" + domain + "'");
  }
  return SemanticSymbol{name, ref, domain};
}

}  // namespace sembase
