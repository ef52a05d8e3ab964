#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperfuse/types.hpp"

/// Linear spectral unmixing by nonnegative matrix factorization.
///
/// The low-resolution cube is flattened to X (L bands x N pixels) and
/// factored as X ~ U V^T with U (L x P) the endmember signatures and V
/// (N x P) the per-pixel abundances, minimizing the squared Frobenius
/// residual with Lee-Seung multiplicative updates.
namespace hyperfuse::unmix {

/// Endmember signatures S (L x P) and abundances A (P x N). Column n of A
/// belongs to low-resolution pixel (n / samples, n % samples).
struct EndmemberModel {
  Eigen::MatrixXd signatures;
  Eigen::MatrixXd abundances;
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::vector<double> wavelengths_nm;

  std::size_t endmember_count() const noexcept { return static_cast<std::size_t>(signatures.cols()); }
  std::size_t band_count() const noexcept { return static_cast<std::size_t>(signatures.rows()); }
  std::size_t pixel_count() const noexcept { return samples * lines; }

  /// Abundance column of low-resolution pixel (line, sample).
  std::vector<double> abundance(std::size_t line, std::size_t sample) const;

  void validate() const;
};

struct NmfInit {
  Eigen::MatrixXd signatures;  // U, L x P
  Eigen::MatrixXd abundances;  // V, N x P
};

enum class NmfInitMethod {
  random,                 // uniform (0, 1], scaled to the data mean
  successive_projection,  // signatures from pixel columns picked by successive projection
};

struct NmfConfig {
  std::size_t endmembers = 0;
  int max_iter = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  NmfInitMethod init_method = NmfInitMethod::random;
  std::optional<NmfInit> init;  // overrides init_method when set
  double epsilon_guard = 1e-12;
  int threads = 1;  // 1 is the sequential reference mode

  void validate() const;
};

struct NmfFactors {
  Eigen::MatrixXd signatures;  // U
  Eigen::MatrixXd abundances;  // V (N x P)
  std::vector<double> cost_trace;  // cost at the start, then after every iteration
  int iterations = 0;
};

/// Called with the iteration number (0 = initial point) and the current
/// factors after every update.
using NmfObserver =
    std::function<void(int iteration, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v)>;

/// ||X - U V^T||_F^2. Throws DomainError on shape mismatch.
double nmf_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Random start in (0, 1] scaled so mean(U V^T) equals mean(X).
NmfInit random_init(const Eigen::MatrixXd& x, std::size_t endmembers, std::uint64_t seed);

/// Signatures are the P pixel columns chosen by successive projection (the
/// column with the largest residual norm, then project it out, repeat);
/// abundances are the least-squares fit to those signatures clipped to a
/// small positive floor so multiplicative updates can still move them.
NmfInit successive_projection_init(const Eigen::MatrixXd& x, std::size_t endmembers);

/// Column indices picked by successive projection, in pick order.
std::vector<Eigen::Index> successive_projection(const Eigen::MatrixXd& x, std::size_t count);

NmfFactors nmf(const Eigen::MatrixXd& x, const NmfConfig& cfg, const NmfObserver& observer = {});

struct NmfResult {
  EndmemberModel model;  // abundances not yet normalized
  std::vector<double> cost_trace;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Factorizes a low-resolution cube.
NmfResult nmf_unmix(const SpectralCube& lowres, const NmfConfig& cfg);

/// Rescales each endmember k (S_k / w_k, A_k * w_k) with w >= 0 chosen by
/// nonnegative least squares so the abundance columns of non-empty pixels
/// sum as close to one as possible. S A is unchanged. Endmembers that get
/// w_k = 0 keep their scale.
EndmemberModel rescale_to_unit_sum(const EndmemberModel& model);

/// Divides each abundance column by its sum; columns summing to less than
/// `epsilon_guard` become uniform 1/P. Signatures are left untouched.
EndmemberModel normalize_abundances(const EndmemberModel& model, double epsilon_guard = 1e-12);

/// Indices with a_i >= threshold, sorted by descending abundance (ties to the
/// lower index). Returns the argmax alone when nothing qualifies.
std::vector<std::size_t> active_endmembers(std::span<const double> abundances, double threshold);

/// Signatures as `wavelength_nm,e1..eP` CSV; abundances as a P-band cube
/// whose wavelength header lists the endmember numbers 1..P.
void write_model(const EndmemberModel& model, const std::filesystem::path& signatures_csv,
                 const std::filesystem::path& abundance_cube);
EndmemberModel read_model(const std::filesystem::path& signatures_csv,
                          const std::filesystem::path& abundance_cube);

}  // namespace hyperfuse::unmix
