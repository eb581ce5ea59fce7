#pragma once

#include <cstdint>
#include <set>

#include "sembase/signal.hpp"

namespace sembase {

using SymbolId = std::int64_t;
using SymbolSet = std::set<SymbolId>;

// Omega: every state symbol the sender can emit.
class Universe {
 public:
  explicit Universe(SymbolSet symbols);

  // One id per bound symbol, numbered 0.. in (domain, name) order.
  static Universe from_codebook(const SymbolTable& codebook);

  const SymbolSet& symbols() const { return symbols_; }
  bool contains(const SymbolSet& s) const;

 private:
  SymbolSet symbols_;
};

struct Message {
  SymbolSet symbols;
};

// Knowledge must be decodable: knowledge is a subset of the codebook.
class ReceiverState {
 public:
  ReceiverState(SymbolSet knowledge, SymbolSet codebook);

  const SymbolSet& knowledge() const { return knowledge_; }
  const SymbolSet& codebook() const { return codebook_; }

 private:
  SymbolSet knowledge_;
  SymbolSet codebook_;
};

struct Partition {
  SymbolSet information;  // decodable and not yet known
  SymbolSet knowledge;    // already known
  SymbolSet dark;         // not decodable by the receiver
};

// knowledge = M & K_r, information = (M & C_r) \ K_r, dark = M \ C_r.
Partition partition(const Message& m, const ReceiverState& r, const Universe& omega);

// K_r' = K_r | information; the codebook is unchanged.
ReceiverState absorb(const ReceiverState& r, const Partition& p);

enum class Understanding { Correct, Misunderstanding };

// Correct iff max |f' - f| <= tol.
Understanding understanding(const Signal& f_prime, const Signal& f, double tol);

}  // namespace sembase
