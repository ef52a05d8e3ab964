#include "hyperfuse/fuse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperfuse/error.hpp"
#include "hyperfuse/raster_io.hpp"
#include "parallel.hpp"

namespace hyperfuse::fuse {

namespace {

constexpr double kCostTieTolerance = 1e-9;

std::vector<std::size_t> resolve_ids(std::span<const std::size_t> ids, std::size_t c) {
  if (ids.empty()) {
    std::vector<std::size_t> identity(c);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    return identity;
  }
  if (ids.size() != c) throw DomainError("matching: endmember id count mismatch");
  return {ids.begin(), ids.end()};
}

void check_matching_inputs(std::span<const double> area, std::span<const double> abundances) {
  if (area.empty() || abundances.empty()) throw DomainError("matching: empty inputs");
  if (area.size() != abundances.size()) {
    throw DomainError("matching: " + std::to_string(area.size()) + " segments vs " +
                      std::to_string(abundances.size()) + " endmembers");
  }
  for (double v : area)
    if (!(v >= 0.0)) throw DomainError("matching: area fractions must be >= 0");
  for (double v : abundances)
    if (!(v >= 0.0)) throw DomainError("matching: abundances must be >= 0");
}

bool lexicographically_less(const Assignment& a, const Assignment& b) {
  return a.class_to_endmember < b.class_to_endmember;
}

bool has_close_pair(std::span<const double> abundances, double delta) {
  for (std::size_t i = 0; i < abundances.size(); ++i)
    for (std::size_t j = i + 1; j < abundances.size(); ++j)
      if (std::abs(abundances[i] - abundances[j]) < delta) return true;
  return false;
}

}  // namespace

void FusionConfig::validate() const {
  if (!(distinct_delta > 0.0 && distinct_delta < 1.0)) {
    throw DomainError("fusion: distinct_delta must lie in (0, 1)");
  }
  if (!(abundance_threshold > 0.0 && abundance_threshold < 1.0)) {
    throw DomainError("fusion: abundance_threshold must lie in (0, 1)");
  }
  if (scale < 1) throw DomainError("fusion: scale must be >= 1");
  fcm.validate();
}

bool NeighborContext::empty() const {
  const auto unknown = [](int v) { return v < 0; };
  return std::all_of(north.begin(), north.end(), unknown) &&
         std::all_of(west.begin(), west.end(), unknown);
}

NeighborContext neighbor_context(const SubpixelMap& map, Position origin, std::size_t scale) {
  NeighborContext ctx{std::vector<int>(scale, -1), std::vector<int>(scale, -1)};
  if (origin.line > 0) {
    for (std::size_t j = 0; j < scale && origin.sample + j < map.samples; ++j) {
      ctx.north[j] = map.at(origin.line - 1, origin.sample + j);
    }
  }
  if (origin.sample > 0) {
    for (std::size_t i = 0; i < scale && origin.line + i < map.lines; ++i) {
      ctx.west[i] = map.at(origin.line + i, origin.sample - 1);
    }
  }
  return ctx;
}

std::vector<Assignment> enumerate_assignments(std::span<const double> area,
                                              std::span<const double> abundances,
                                              std::span<const std::size_t> endmember_ids) {
  check_matching_inputs(area, abundances);
  const auto c = area.size();
  const auto ids = resolve_ids(endmember_ids, c);

  // Permute positions sorted by global id so next_permutation walks the
  // mappings in lexicographic order of endmember ids.
  std::vector<std::size_t> perm(c);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return ids[a] < ids[b]; });

  std::vector<Assignment> out;
  do {
    Assignment a;
    a.class_to_endmember.resize(c);
    for (std::size_t k = 0; k < c; ++k) {
      a.class_to_endmember[k] = ids[perm[k]];
      a.cost += std::abs(area[k] - abundances[perm[k]]);
    }
    out.push_back(std::move(a));
  } while (std::next_permutation(perm.begin(), perm.end(),
                                 [&](auto a, auto b) { return ids[a] < ids[b]; }));
  return out;
}

Assignment match_segments(std::span<const double> area, std::span<const double> abundances,
                          std::span<const std::size_t> endmember_ids, double distinct_delta) {
  const auto all = enumerate_assignments(area, abundances, endmember_ids);
  // Enumeration is lexicographic, so the first strict minimum wins ties.
  const auto best = std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.cost < b.cost;
  });
  Assignment result = *best;
  const auto near_best = std::count_if(all.begin(), all.end(), [&](const Assignment& a) {
    return a.cost - best->cost < kCostTieTolerance;
  });
  result.ambiguous = near_best > 1 || has_close_pair(abundances, distinct_delta);
  return result;
}

std::vector<Assignment> ambiguity_candidates(std::span<const double> area,
                                             std::span<const double> abundances,
                                             std::span<const std::size_t> endmember_ids,
                                             double distinct_delta) {
  const auto all = enumerate_assignments(area, abundances, endmember_ids);
  const auto best = match_segments(area, abundances, endmember_ids, distinct_delta);
  const auto c = area.size();
  const auto ids = resolve_ids(endmember_ids, c);

  // Group endmembers whose abundances are chained within distinct_delta.
  std::vector<std::size_t> group(c);
  std::iota(group.begin(), group.end(), std::size_t{0});
  const auto root = [&](std::size_t i) {
    while (group[i] != i) i = group[i];
    return i;
  };
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i + 1; j < c; ++j)
      if (std::abs(abundances[i] - abundances[j]) < distinct_delta) group[root(j)] = root(i);
  const auto position_of = [&](std::size_t id) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Assignment> out;
  for (const auto& a : all) {
    bool same_groups = true;
    for (std::size_t k = 0; k < c && same_groups; ++k) {
      same_groups = root(position_of(a.class_to_endmember[k])) ==
                    root(position_of(best.class_to_endmember[k]));
    }
    if (same_groups || a.cost - best.cost < kCostTieTolerance) {
      out.push_back(a);
      out.back().ambiguous = best.ambiguous;
    }
  }
  return out;
}

std::size_t neighbor_agreement(const Assignment& candidate,
                               const segment::SuperpixelSegmentation& seg,
                               const NeighborContext& ctx) {
  const auto r = seg.scale;
  const auto endmember_at = [&](std::size_t i, std::size_t j) {
    const auto label = static_cast<std::size_t>(seg.labels[i * r + j]);
    return static_cast<int>(candidate.class_to_endmember.at(label));
  };
  std::size_t agree = 0;
  for (std::size_t j = 0; j < std::min(r, ctx.north.size()); ++j) {
    if (ctx.north[j] >= 0 && endmember_at(0, j) == ctx.north[j]) ++agree;
  }
  for (std::size_t i = 0; i < std::min(r, ctx.west.size()); ++i) {
    if (ctx.west[i] >= 0 && endmember_at(i, 0) == ctx.west[i]) ++agree;
  }
  return agree;
}

Assignment resolve_ambiguity(std::span<const Assignment> candidates, const NeighborContext& ctx,
                             const segment::SuperpixelSegmentation& seg) {
  if (candidates.empty()) throw DomainError("resolve_ambiguity: no candidates");
  if (candidates.size() == 1) return candidates.front();
  const Assignment* best = nullptr;
  std::size_t best_agree = 0;
  for (const auto& cand : candidates) {
    const auto agree = ctx.empty() ? 0 : neighbor_agreement(cand, seg, ctx);
    if (best == nullptr || agree > best_agree ||
        (agree == best_agree && lexicographically_less(cand, *best))) {
      best = &cand;
      best_agree = agree;
    }
  }
  return *best;
}

FusedSuperpixel fuse_superpixel(std::span<const double> abundance, const PanImage& pan,
                                Position superpixel, const FusionConfig& cfg,
                                const NeighborContext& ctx) {
  const auto r = static_cast<std::size_t>(cfg.scale);
  const Position origin{superpixel.line * r, superpixel.sample * r};

  const auto active = unmix::active_endmembers(abundance, cfg.abundance_threshold);
  const auto values = segment::block_values(pan, origin, r);
  const auto c = std::min(active.size(), segment::distinct_count(values));

  std::vector<std::size_t> kept(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(c));
  std::vector<double> kept_abundance;
  for (auto k : kept) kept_abundance.push_back(abundance[k]);
  const double total = std::accumulate(kept_abundance.begin(), kept_abundance.end(), 0.0);
  for (auto& a : kept_abundance) a = total > 0.0 ? a / total : 1.0 / static_cast<double>(c);

  FusedSuperpixel out;
  out.segmentation = segment::segment_superpixel(pan, origin, r, c, cfg.fcm);
  const auto area = out.segmentation.area_fractions();

  out.assignment = match_segments(area, kept_abundance, kept, cfg.distinct_delta);
  if (out.assignment.ambiguous) {
    const auto candidates = ambiguity_candidates(area, kept_abundance, kept, cfg.distinct_delta);
    out.assignment = resolve_ambiguity(candidates, ctx, out.segmentation);
  }
  out.assignment.superpixel = superpixel;

  out.endmembers.resize(r * r);
  for (std::size_t i = 0; i < r * r; ++i) {
    const auto label = static_cast<std::size_t>(out.segmentation.labels[i]);
    out.endmembers[i] = static_cast<int>(out.assignment.class_to_endmember[label]);
  }
  return out;
}

SceneFusion fuse_scene(const SpectralCube& lowres, const PanImage& pan,
                       const unmix::EndmemberModel& model, const FusionConfig& cfg) {
  cfg.validate();
  model.validate();
  const auto r = static_cast<std::size_t>(cfg.scale);
  if (pan.samples != lowres.samples * r || pan.lines != lowres.lines * r) {
    throw DomainError("fuse: PAN is " + std::to_string(pan.samples) + "x" +
                      std::to_string(pan.lines) + " but low-resolution " +
                      std::to_string(lowres.samples) + "x" + std::to_string(lowres.lines) +
                      " times scale " + std::to_string(r) + " requires " +
                      std::to_string(lowres.samples * r) + "x" + std::to_string(lowres.lines * r));
  }
  if (model.samples != lowres.samples || model.lines != lowres.lines) {
    throw DomainError("fuse: abundance geometry does not match the low-resolution cube");
  }

  SceneFusion scene;
  scene.map = SubpixelMap(pan.samples, pan.lines);
  scene.assignments.resize(lowres.pixel_count());

  const auto fuse_one = [&](std::size_t l, std::size_t s) {
    const Position origin{l * r, s * r};
    const auto ctx = neighbor_context(scene.map, origin, r);
    const auto a = model.abundance(l, s);
    auto fused = fuse_superpixel(a, pan, {l, s}, cfg, ctx);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        scene.map.at(origin.line + i, origin.sample + j) = fused.endmembers[i * r + j];
    scene.assignments[l * lowres.samples + s] = std::move(fused.assignment);
  };

  if (cfg.threads <= 1) {
    for (std::size_t l = 0; l < lowres.lines; ++l)
      for (std::size_t s = 0; s < lowres.samples; ++s) fuse_one(l, s);
    return scene;
  }

  // Superpixels on one anti-diagonal depend only on earlier diagonals.
  for (std::size_t d = 0; d + 1 < lowres.lines + lowres.samples; ++d) {
    const auto l_min = d >= lowres.samples ? d - lowres.samples + 1 : 0;
    const auto l_max = std::min(d, lowres.lines - 1);
    detail::parallel_chunks(l_max - l_min + 1, cfg.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) fuse_one(l_min + k, d - (l_min + k));
    });
  }
  return scene;
}

SpectralCube reconstruct_hr(const SubpixelMap& map, const unmix::EndmemberModel& model) {
  const auto p = static_cast<int>(model.endmember_count());
  SpectralCube cube(map.samples, map.lines, model.wavelengths_nm);
  for (std::size_t l = 0; l < map.lines; ++l) {
    for (std::size_t s = 0; s < map.samples; ++s) {
      const int k = map.at(l, s);
      if (k < 0 || k >= p) {
        throw DomainError("reconstruct: endmember index " + std::to_string(k) + " at (" +
                          std::to_string(l) + ", " + std::to_string(s) + ") outside [0, " +
                          std::to_string(p) + ")");
      }
      for (std::size_t b = 0; b < cube.bands; ++b) {
        cube.at(b, l, s) = static_cast<float>(
            model.signatures(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)));
      }
    }
  }
  return cube;
}

void write_subpixel_map(const SubpixelMap& map, const std::filesystem::path& path) {
  LabelMap labels(map.samples, map.lines);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (map.endmember_index[i] < 0) throw DomainError("subpixel map has unassigned pixels");
    labels.labels[i] = map.endmember_index[i] + 1;
  }
  io::write_labels(labels, path);
}

SubpixelMap read_subpixel_map(const std::filesystem::path& path) {
  const auto labels = io::read_labels(path);
  SubpixelMap map(labels.samples, labels.lines);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] < 1) {
      throw FormatError(path.string() + ": endmember numbers start at 1");
    }
    map.endmember_index[i] = labels.labels[i] - 1;
  }
  return map;
}

}  // namespace hyperfuse::fuse
