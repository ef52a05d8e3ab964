#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hyperfuse/types.hpp"

/// Fuzzy C-means segmentation of PAN superpixels (the r x r PAN block
/// under one low-resolution pixel), on intensity alone.
namespace hyperfuse::segment {

enum class CenterInit {
  quantile,  // evenly spaced quantiles of the data (deterministic)
  random,    // c distinct data values drawn with the seed
};

struct FcmConfig {
  double fuzzifier = 2.0;  // m
  int max_iter = 100;
  double tol = 1e-6;  // stop once no center moves by tol or more
  std::uint64_t seed = 0;
  CenterInit init = CenterInit::quantile;

  void validate() const;
};

struct FcmResult {
  std::size_t points = 0;
  std::size_t classes = 0;
  std::vector<double> memberships;  // points x classes, row-major
  std::vector<double> centers;
  std::vector<double> objective_trace;  // J_m after each membership update
  int iterations = 0;

  double membership(std::size_t point, std::size_t cls) const {
    return memberships[point * classes + cls];
  }
};

/// Membership row for every point given fixed centers. A point that sits
/// exactly on a center gets membership 1 there (lowest such index) and 0
/// elsewhere.
std::vector<double> fcm_memberships(std::span<const double> data, std::span<const double> centers,
                                    double fuzzifier);

/// J_m = sum_ij u_ij^m (x_i - v_j)^2.
double fcm_objective(std::span<const double> data, std::span<const double> memberships,
                     std::span<const double> centers, double fuzzifier);

/// Initial centers per `cfg.init`. Quantile centers are strictly increasing
/// whenever `c` does not exceed the number of distinct values.
std::vector<double> initial_centers(std::span<const double> data, std::size_t c,
                                    const FcmConfig& cfg);

/// Called after every membership update with the iteration number, the
/// memberships and the centers they were computed from.
using FcmObserver = std::function<void(int iteration, std::span<const double> memberships,
                                       std::span<const double> centers)>;

/// Alternating membership / center updates from `initial_centers`.
FcmResult fcm(std::span<const double> data, std::size_t c, const FcmConfig& cfg,
              const FcmObserver& observer = {});

/// Same, from caller-supplied starting centers.
FcmResult fcm(std::span<const double> data, std::span<const double> start_centers,
              const FcmConfig& cfg, const FcmObserver& observer = {});

struct SuperpixelSegmentation {
  Position block_origin;  // top-left PAN pixel
  std::size_t scale = 0;
  std::size_t classes = 0;
  std::vector<double> memberships;  // (scale*scale) x classes, row-major
  std::vector<int> labels;          // scale*scale, row-major within the block
  std::vector<double> centers;      // descending: class 0 is the brightest

  /// Fraction of block pixels labelled with each class.
  std::vector<double> area_fractions() const;
};

std::size_t distinct_count(std::span<const double> values);

/// Block intensities, row-major.
std::vector<double> block_values(const PanImage& pan, Position origin, std::size_t scale);

/// Segments the block at `origin` into min(c, distinct intensities) classes,
/// canonically ordered brightest first, labels by argmax membership.
SuperpixelSegmentation segment_superpixel(const PanImage& pan, Position origin, std::size_t scale,
                                          std::size_t c, const FcmConfig& cfg);

}  // namespace hyperfuse::segment
