#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "detlim/common.hpp"
#include "detlim/rng.hpp"

namespace detlim {

// Finite discrete distribution over an ordered, labeled alphabet.
// Immutable after construction; stored masses are nonnegative and sum to 1
// within kProbStoredTol.
class Pmf {
 public:
  Pmf() = default;

  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  double prob(std::size_t i) const { return probs_[i]; }

  double min_prob() const {
    return *std::min_element(probs_.begin(), probs_.end());
  }

  bool same_alphabet(const Pmf& other) const noexcept {
    return labels_ == other.labels_;
  }

  bool same_masses(const Pmf& other) const noexcept {
    return probs_ == other.probs_;
  }

  friend Pmf make_pmf(std::vector<double> probs, std::vector<std::string> labels);

 private:
  Pmf(std::vector<std::string> labels, std::vector<double> probs)
      : labels_(std::move(labels)), probs_(std::move(probs)) {}

  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

// Validates and normalizes raw masses: entries in [-kNegMassTol, 0) are
// clamped to zero, the sum must be within kProbInputTol of 1 and is then
// renormalized exactly.
inline Pmf make_pmf(std::vector<double> probs, std::vector<std::string> labels) {
  if (probs.size() != labels.size())
    throw LengthMismatch("probs has " + std::to_string(probs.size()) +
                         " entries, labels has " + std::to_string(labels.size()));
  if (probs.empty()) throw LengthMismatch("empty alphabet");

  for (double& p : probs) {
    if (p < -kNegMassTol)
      throw NegativeMass("mass " + std::to_string(p) + " below -1e-15");
    if (p < 0) p = 0.0;
  }

  double sum = 0.0;
  for (double p : probs) sum += p;
  if (std::abs(sum - 1.0) > kProbInputTol)
    throw BadSum("masses sum to " + std::to_string(sum));
  for (double& p : probs) p /= sum;

  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw DuplicateLabel("label '" + l + "' repeated");

  return Pmf(std::move(labels), std::move(probs));
}

// Alphabet with real positions on the line, nondecreasing in label order.
class MetricAlphabet {
 public:
  MetricAlphabet(std::vector<std::string> labels, std::vector<double> positions)
      : labels_(std::move(labels)), positions_(std::move(positions)) {
    if (labels_.size() != positions_.size())
      throw LengthMismatch("labels and positions differ in length");
    if (labels_.empty()) throw LengthMismatch("empty metric alphabet");
    for (std::size_t i = 1; i < positions_.size(); ++i)
      if (positions_[i] < positions_[i - 1])
        throw BadArgument("positions must be nondecreasing");
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  double diameter() const noexcept { return positions_.back() - positions_.front(); }

  bool matches(const Pmf& pmf) const noexcept { return labels_ == pmf.labels(); }

 private:
  std::vector<std::string> labels_;
  std::vector<double> positions_;
};

enum class Hypothesis { Legit, Fake };

// One i.i.d. draw of n symbols. Symbols are indices into the generating
// pmf's alphabet (per patch, for image samples).
struct Sample {
  std::vector<std::uint32_t> symbols;
  std::optional<Hypothesis> source;
  std::uint64_t seed = 0;
};

// Inverse-CDF sampler over a Pmf. The cumulative table ends at exactly 1.0
// so every u in [0,1) maps to a symbol.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Pmf& pmf) : cdf_(pmf.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      acc += pmf.prob(i);
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
  }

  std::uint32_t draw(SplitMix64& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline Sample sample_iid(const Pmf& pmf, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw BadArgument("sample size must be >= 1");
  CategoricalSampler sampler(pmf);
  SplitMix64 rng(seed);
  Sample out;
  out.seed = seed;
  out.symbols.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.symbols.push_back(sampler.draw(rng));
  return out;
}

// k patches of m i.i.d. pixels each; each patch carries its legitimate and
// generated distribution over a shared per-patch alphabet.
struct ImagePatch {
  std::int64_t pixel_count = 0;
  Pmf pmf_legit;
  Pmf pmf_fake;
};

class ImageModel {
 public:
  ImageModel(std::vector<ImagePatch> patches, bool m_large_enough)
      : patches_(std::move(patches)), m_large_enough_(m_large_enough) {
    if (patches_.empty()) throw BadArgument("image model needs at least one patch");
    for (const auto& patch : patches_) {
      if (patch.pixel_count < 1) throw BadArgument("patch pixel count must be >= 1");
      if (!patch.pmf_legit.same_alphabet(patch.pmf_fake))
        throw AlphabetMismatch("patch pmfs must share an alphabet");
    }
  }

  const std::vector<ImagePatch>& patches() const noexcept { return patches_; }
  // Caller-declared claim that every patch is large enough for asymptotic
  // analysis; recorded, never enforced.
  bool m_large_enough() const noexcept { return m_large_enough_; }

  std::int64_t total_pixels() const noexcept {
    std::int64_t n = 0;
    for (const auto& p : patches_) n += p.pixel_count;
    return n;
  }

 private:
  std::vector<ImagePatch> patches_;
  bool m_large_enough_ = false;
};

// Concatenation of per-patch i.i.d. samples; patch p draws from the
// sub-stream derive_seed(seed, p).
inline Sample sample_image(const ImageModel& model, Hypothesis hypothesis,
                           std::uint64_t seed) {
  Sample out;
  out.seed = seed;
  out.source = hypothesis;
  out.symbols.reserve(static_cast<std::size_t>(model.total_pixels()));
  for (std::size_t p = 0; p < model.patches().size(); ++p) {
    const auto& patch = model.patches()[p];
    const Pmf& pmf =
        hypothesis == Hypothesis::Legit ? patch.pmf_legit : patch.pmf_fake;
    Sample part = sample_iid(pmf, patch.pixel_count, derive_seed(seed, p));
    out.symbols.insert(out.symbols.end(), part.symbols.begin(), part.symbols.end());
  }
  return out;
}

}  // namespace detlim
