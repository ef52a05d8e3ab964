#include "hyperfuse/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperfuse/error.hpp"
#include "hyperfuse/random.hpp"

namespace hyperfuse::segment {

namespace {

void check_data(std::span<const double> data, std::size_t c) {
  if (c < 1) throw DomainError("fcm: class count must be >= 1");
  if (c > data.size()) {
    throw DomainError("fcm: class count " + std::to_string(c) + " exceeds point count " +
                      std::to_string(data.size()));
  }
  for (double x : data) {
    if (!std::isfinite(x)) throw DomainError("fcm: intensities must be finite");
  }
  if (c >= 2 && distinct_count(data) == 1) {
    throw DomainError("fcm: all intensities identical, cannot form " + std::to_string(c) +
                      " classes");
  }
}

// Evenly spaced quantiles (j + 1/2) / c of sorted values, linearly
// interpolated between order statistics.
std::vector<double> quantiles(const std::vector<double>& sorted, std::size_t c) {
  std::vector<double> out(c);
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t j = 0; j < c; ++j) {
    const double pos = (static_cast<double>(j) + 0.5) / static_cast<double>(c) * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out[j] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  return out;
}

}  // namespace

void FcmConfig::validate() const {
  if (!(fuzzifier > 1.0)) throw DomainError("fcm: fuzzifier must be > 1");
  if (max_iter < 1) throw DomainError("fcm: max_iter must be >= 1");
  if (!(tol > 0.0)) throw DomainError("fcm: tol must be > 0");
}

std::size_t distinct_count(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

std::vector<double> fcm_memberships(std::span<const double> data, std::span<const double> centers,
                                    double fuzzifier) {
  const auto c = centers.size();
  const double power = 2.0 / (fuzzifier - 1.0);
  std::vector<double> u(data.size() * c, 0.0);
  std::vector<double> dist(c);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double* row = u.data() + i * c;
    for (std::size_t j = 0; j < c; ++j) dist[j] = std::abs(data[i] - centers[j]);
    const auto nearest =
        static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
    if (dist[nearest] == 0.0) {
      row[nearest] = 1.0;
      continue;
    }
    // u_ij = 1 / sum_k (d_ij / d_ik)^p, evaluated as w_j / sum w with
    // w_j = (d_min / d_ij)^p in (0, 1] to stay clear of overflow.
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = std::pow(dist[nearest] / dist[j], power);
      total += row[j];
    }
    for (std::size_t j = 0; j < c; ++j) row[j] /= total;
  }
  return u;
}

double fcm_objective(std::span<const double> data, std::span<const double> memberships,
                     std::span<const double> centers, double fuzzifier) {
  const auto c = centers.size();
  double j_m = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double d = data[i] - centers[j];
      const double uij = memberships[i * c + j];
      if (uij > 0.0) j_m += std::pow(uij, fuzzifier) * d * d;
    }
  }
  return j_m;
}

std::vector<double> initial_centers(std::span<const double> data, std::size_t c,
                                    const FcmConfig& cfg) {
  check_data(data, c);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  if (cfg.init == CenterInit::random) {
    UniformSource uniform(cfg.seed);
    for (std::size_t i = distinct.size(); i > 1; --i) {
      const auto j = std::min(i - 1, static_cast<std::size_t>(uniform() * static_cast<double>(i)));
      std::swap(distinct[i - 1], distinct[j]);
    }
    while (distinct.size() < c) {
      const auto j = std::min(sorted.size() - 1,
                              static_cast<std::size_t>(uniform() * static_cast<double>(sorted.size())));
      distinct.push_back(sorted[j]);
    }
    distinct.resize(c);
    return distinct;
  }

  auto centers = quantiles(sorted, c);
  const bool collide = std::adjacent_find(centers.begin(), centers.end(),
                                          [](double a, double b) { return !(a < b); }) !=
                       centers.end();
  // Heavily repeated values can pull two quantiles onto the same value;
  // quantiles of the distinct values are strictly increasing instead.
  if (collide && c <= distinct.size()) centers = quantiles(distinct, c);
  return centers;
}

FcmResult fcm(std::span<const double> data, std::size_t c, const FcmConfig& cfg,
              const FcmObserver& observer) {
  cfg.validate();
  const auto start = initial_centers(data, c, cfg);
  return fcm(data, start, cfg, observer);
}

FcmResult fcm(std::span<const double> data, std::span<const double> start_centers,
              const FcmConfig& cfg, const FcmObserver& observer) {
  cfg.validate();
  const auto c = start_centers.size();
  check_data(data, c);

  FcmResult r;
  r.points = data.size();
  r.classes = c;
  r.centers.assign(start_centers.begin(), start_centers.end());
  std::vector<double> next(c);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    r.memberships = fcm_memberships(data, r.centers, cfg.fuzzifier);
    r.objective_trace.push_back(fcm_objective(data, r.memberships, r.centers, cfg.fuzzifier));
    if (observer) observer(it, r.memberships, r.centers);

    double movement = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double w = std::pow(r.memberships[i * c + j], cfg.fuzzifier);
        num += w * data[i];
        den += w;
      }
      // A center that attracts no mass stays where it is.
      next[j] = den > 0.0 ? num / den : r.centers[j];
      movement = std::max(movement, std::abs(next[j] - r.centers[j]));
    }
    r.centers = next;
    r.iterations = it;
    if (movement < cfg.tol) break;
  }
  r.memberships = fcm_memberships(data, r.centers, cfg.fuzzifier);
  r.objective_trace.push_back(fcm_objective(data, r.memberships, r.centers, cfg.fuzzifier));
  if (observer) observer(r.iterations + 1, r.memberships, r.centers);
  return r;
}

std::vector<double> SuperpixelSegmentation::area_fractions() const {
  std::vector<double> area(classes, 0.0);
  for (int label : labels) area[static_cast<std::size_t>(label)] += 1.0;
  for (auto& a : area) a /= static_cast<double>(labels.size());
  return area;
}

std::vector<double> block_values(const PanImage& pan, Position origin, std::size_t scale) {
  if (scale < 1 || origin.line + scale > pan.lines || origin.sample + scale > pan.samples) {
    throw DomainError("segment: block at (" + std::to_string(origin.line) + ", " +
                      std::to_string(origin.sample) + ") of size " + std::to_string(scale) +
                      " exceeds PAN bounds " + std::to_string(pan.lines) + "x" +
                      std::to_string(pan.samples));
  }
  std::vector<double> values;
  values.reserve(scale * scale);
  for (std::size_t i = 0; i < scale; ++i) {
    for (std::size_t j = 0; j < scale; ++j) values.push_back(pan.at(origin.line + i, origin.sample + j));
  }
  return values;
}

SuperpixelSegmentation segment_superpixel(const PanImage& pan, Position origin, std::size_t scale,
                                          std::size_t c, const FcmConfig& cfg) {
  const auto values = block_values(pan, origin, scale);
  if (c < 1) throw DomainError("segment: class count must be >= 1");
  const auto classes = std::min(c, distinct_count(values));
  const auto result = fcm(values, classes, cfg);

  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.centers[a] > result.centers[b];
  });

  SuperpixelSegmentation seg;
  seg.block_origin = origin;
  seg.scale = scale;
  seg.classes = classes;
  seg.centers.resize(classes);
  seg.memberships.resize(values.size() * classes);
  seg.labels.resize(values.size());
  for (std::size_t k = 0; k < classes; ++k) seg.centers[k] = result.centers[order[k]];
  for (std::size_t i = 0; i < values.size(); ++i) {
    int best = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double u = result.membership(i, order[k]);
      seg.memberships[i * classes + k] = u;
      if (u > seg.memberships[i * classes + static_cast<std::size_t>(best)]) {
        best = static_cast<int>(k);
      }
    }
    seg.labels[i] = best;
  }
  return seg;
}

}  // namespace hyperfuse::segment
