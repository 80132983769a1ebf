#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrszd/linalg.hpp"
#include "vrszd/rng.hpp"

namespace vrszd {

enum class FrameKind { HaarFrame, Canonical, SingleSphere };

/// l orthonormal directions in R^d. Stored direction-major so each column is
/// contiguous.
class DirectionSet {
 public:
  DirectionSet(std::size_t dim, std::size_t count, std::vector<double> columns, FrameKind kind);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return count_; }
  FrameKind kind() const { return kind_; }

  std::span<const double> column(std::size_t j) const { return {columns_.data() + j * dim_, dim_}; }

  // d x l matrix whose columns are the directions.
  Matrix to_matrix() const;

 private:
  std::size_t dim_;
  std::size_t count_;
  std::vector<double> columns_;
  FrameKind kind_;
};

// First l columns of a Haar-distributed element of O(d): thin QR of a d x l
// standard normal matrix with column j of Q multiplied by sign(R_jj).
DirectionSet sample_haar_frame(std::size_t d, std::size_t l, RandomStream& rng);

// e_1, ..., e_l.
DirectionSet canonical_frame(std::size_t d, std::size_t l);

// One direction uniform on the unit sphere (normalized Gaussian).
DirectionSet sample_sphere_direction(std::size_t d, RandomStream& rng);

/// Source of direction frames for the optimizers. Tests inject a canonical
/// sampler to make runs deterministic regardless of the stream.
class FrameSampler {
 public:
  virtual ~FrameSampler() = default;
  virtual DirectionSet sample(std::size_t d, std::size_t l, RandomStream& rng) const = 0;
};

class HaarSampler final : public FrameSampler {
 public:
  DirectionSet sample(std::size_t d, std::size_t l, RandomStream& rng) const override {
    return sample_haar_frame(d, l, rng);
  }
};

class CanonicalSampler final : public FrameSampler {
 public:
  DirectionSet sample(std::size_t d, std::size_t l, RandomStream&) const override {
    return canonical_frame(d, l);
  }
};

}  // namespace vrszd
