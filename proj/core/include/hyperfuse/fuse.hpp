#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "hyperfuse/segment.hpp"
#include "hyperfuse/types.hpp"
#include "hyperfuse/unmix.hpp"

/// Subpixel fusion: inside every superpixel, PAN segments are matched to the
/// active endmembers by comparing segment area fractions with abundance
/// fractions, and each high-resolution subpixel receives the signature of
/// the endmember its segment was matched to.
namespace hyperfuse::fuse {

/// Injective class -> endmember mapping for one superpixel. Endmember
/// indices are global (columns of the signature matrix).
struct Assignment {
  Position superpixel;
  std::vector<std::size_t> class_to_endmember;
  bool ambiguous = false;
  double cost = 0.0;  // sum over classes of |area fraction - abundance|

  bool operator==(const Assignment&) const = default;
};

/// Endmember index per high-resolution pixel; -1 marks "not fused yet".
struct SubpixelMap {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::vector<int> endmember_index;  // row-major

  SubpixelMap() = default;
  SubpixelMap(std::size_t samples, std::size_t lines)
      : samples(samples), lines(lines), endmember_index(samples * lines, -1) {}

  int at(std::size_t line, std::size_t sample) const { return endmember_index[line * samples + sample]; }
  int& at(std::size_t line, std::size_t sample) { return endmember_index[line * samples + sample]; }

  bool operator==(const SubpixelMap&) const = default;
};

struct FusionConfig {
  double distinct_delta = 0.1;
  double abundance_threshold = 0.05;
  int scale = 3;
  segment::FcmConfig fcm{};
  int threads = 1;  // > 1 processes superpixels in anti-diagonal wavefronts

  void validate() const;
};

/// Endmembers already placed on the high-resolution pixels just north
/// (one per block column) and just west (one per block row) of a
/// superpixel; -1 where nothing has been fused or the scene ends.
struct NeighborContext {
  std::vector<int> north;
  std::vector<int> west;

  bool empty() const;
};

NeighborContext neighbor_context(const SubpixelMap& map, Position block_origin, std::size_t scale);

/// Every injective mapping of the c classes onto the c given endmembers,
/// with its cost, in lexicographic order of the mapping. `endmember_ids`
/// names the global index of each abundance entry (identity when empty).
std::vector<Assignment> enumerate_assignments(std::span<const double> area_fractions,
                                              std::span<const double> abundances,
                                              std::span<const std::size_t> endmember_ids = {});

/// Minimum-cost mapping (ties go to the lexicographically smallest). It is
/// flagged ambiguous when another mapping costs within 1e-9 of it or when
/// two abundances differ by less than `distinct_delta`.
Assignment match_segments(std::span<const double> area_fractions,
                          std::span<const double> abundances,
                          std::span<const std::size_t> endmember_ids = {},
                          double distinct_delta = 0.1);

/// The mappings a spatial tie-break may choose from: every mapping within
/// 1e-9 of the minimum cost, plus every mapping that only permutes the best
/// one among endmembers whose abundances lie within `distinct_delta`.
std::vector<Assignment> ambiguity_candidates(std::span<const double> area_fractions,
                                             std::span<const double> abundances,
                                             std::span<const std::size_t> endmember_ids = {},
                                             double distinct_delta = 0.1);

/// Number of 4-adjacent pairs across the north and west block borders whose
/// neighbor already carries the endmember the candidate would place.
std::size_t neighbor_agreement(const Assignment& candidate,
                               const segment::SuperpixelSegmentation& segmentation,
                               const NeighborContext& context);

/// Candidate with the highest neighbor agreement; ties and empty context
/// fall back to the lexicographically smallest mapping.
Assignment resolve_ambiguity(std::span<const Assignment> candidates,
                             const NeighborContext& context,
                             const segment::SuperpixelSegmentation& segmentation);

struct FusedSuperpixel {
  std::vector<int> endmembers;  // scale*scale, row-major within the block
  Assignment assignment;
  segment::SuperpixelSegmentation segmentation;
};

/// Fuses the superpixel at low-resolution position `superpixel` given its
/// normalized abundance column.
FusedSuperpixel fuse_superpixel(std::span<const double> abundance, const PanImage& pan,
                                Position superpixel, const FusionConfig& cfg,
                                const NeighborContext& context);

struct SceneFusion {
  SubpixelMap map;
  std::vector<Assignment> assignments;  // raster order of superpixels
};

/// Fuses all superpixels in raster order so that the north and west
/// neighbors of each one are already fused.
SceneFusion fuse_scene(const SpectralCube& lowres, const PanImage& pan,
                       const unmix::EndmemberModel& model, const FusionConfig& cfg);

/// Cube whose pixel (i, j) is the signature of endmember map(i, j).
SpectralCube reconstruct_hr(const SubpixelMap& map, const unmix::EndmemberModel& model);

/// Label CSV holding endmember numbers 1..P (0 would be background).
void write_subpixel_map(const SubpixelMap& map, const std::filesystem::path& path);
SubpixelMap read_subpixel_map(const std::filesystem::path& path);

}  // namespace hyperfuse::fuse
