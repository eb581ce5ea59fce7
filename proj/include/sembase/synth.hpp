#pragma once

#include <cstdint>

#include "sembase/io.hpp"

namespace sembase {

struct SynthOutput {
  Corpus corpus;
  json truth;  // planted atoms / structure, written next to the corpus
};

// Registered generators (key "generator"):
//   atoms      random sparse mixtures of G orthonormal atoms plus Gaussian
//              noise. Keys: G, d, N, noise, max_active (default 1;
//              each sample mixes 1..max_active distinct atoms).
//   hierarchy  two-level planted structure. Child atoms are orthonormal
//              directions tilted by `overlap`; each parent is the normalized
//              sum of its children. A sample is a scaled parent with
//              probability parent_fraction, otherwise a scaled child.
//              Keys: parents, children, d, N, noise, overlap, parent_fraction.
//   pure       scaled copies of one random unit atom. Keys: d, N, noise.
// Common keys: grid (defaults to [d]), modality (defaults to "synthetic").
// Amplitudes are uniform in [0.5, 1.5] with a random sign.
SynthOutput synth(const json& spec, std::uint64_t seed);

}  // namespace sembase
