#include "sembase/message_algebra.hpp"

#include <algorithm>
#include <iterator>

namespace sembase {

namespace {

SymbolSet set_intersection(const SymbolSet& a, const SymbolSet& b) {
  SymbolSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

SymbolSet set_difference(const SymbolSet& a, const SymbolSet& b) {
  SymbolSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool subset(const SymbolSet& a, const SymbolSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

Universe::Universe(SymbolSet symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InvalidArgument("universe must be nonempty");
}

Universe Universe::from_codebook(const SymbolTable& codebook) {
  SymbolSet ids;
  const auto n = static_cast<SymbolId>(codebook.size());
  for (SymbolId i = 0; i < n; ++i) ids.insert(i);
  return Universe(std::move(ids));
}

bool Universe::contains(const SymbolSet& s) const { return subset(s, symbols_); }

ReceiverState::ReceiverState(SymbolSet knowledge, SymbolSet codebook)
    : knowledge_(std::move(knowledge)), codebook_(std::move(codebook)) {
  if (!subset(knowledge_, codebook_)) {
    throw InvalidArgument("receiver knowledge must be a subset of its codebook");
  }
}

Partition partition(const Message& m, const ReceiverState& r, const Universe& omega) {
  if (!omega.contains(m.symbols)) throw InvalidArgument("message contains symbols outside the universe");
  if (!omega.contains(r.codebook())) throw InvalidArgument("receiver codebook exceeds the universe");
  Partition p;
  p.knowledge = set_intersection(m.symbols, r.knowledge());
  p.information = set_difference(set_intersection(m.symbols, r.codebook()), r.knowledge());
  p.dark = set_difference(m.symbols, r.codebook());
  return p;
}

ReceiverState absorb(const ReceiverState& r, const Partition& p) {
  SymbolSet k = r.knowledge();
  k.insert(p.information.begin(), p.information.end());
  return ReceiverState(std::move(k), r.codebook());
}

Understanding understanding(const Signal& f_prime, const Signal& f, double tol) {
  if (!(f_prime.grid() == f.grid())) throw DimensionError("signals are on different grids");
  if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
  const double diff = f_prime.dim() ? (f_prime.values() - f.values()).cwiseAbs().maxCoeff() : 0.0;
  return diff <= tol ? Understanding::Correct : Understanding::Misunderstanding;
}

}  // namespace sembase
