#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "smi/region.hpp"

namespace smi::app {

struct SynthManifest {
  std::uint64_t seed = 0;
  std::size_t users = 0;
  std::size_t fully_reducing_users = 0;
  std::size_t events = 0;
  // 1 - (1 - fully reducing share) * post / pre: the expected group
  // reduction when the index scales with the dispersion.
  double injected_group_reduction = 0;
};

// Writes a JSONL corpus in the normalized event schema. Each user gets a
// home point (inside a random state region when geometry is given) and
// Poisson-distributed weekly check-ins with Gaussian offsets of the pre- or
// post-split dispersion. Fully reducing users post only at home after the
// split. The seed fixes the whole stream.
SynthManifest generate_synthetic(const SyntheticSpec& spec, std::ostream& out,
                                 const geo::RegionIndex* regions = nullptr);

void write_manifest(const SynthManifest& manifest, const SyntheticSpec& spec, std::ostream& out);

}  // namespace smi::app
