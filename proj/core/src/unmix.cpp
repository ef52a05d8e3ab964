#include "hyperfuse/unmix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperfuse/error.hpp"
#include "hyperfuse/random.hpp"
#include "hyperfuse/raster_io.hpp"
#include "parallel.hpp"

namespace hyperfuse::unmix {

namespace {

bool finite_nonnegative(const Eigen::MatrixXd& m) {
  return m.allFinite() && (m.size() == 0 || m.minCoeff() >= 0.0);
}

// out = a * b, computed in row blocks when threads > 1.
void product_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& out,
                  int threads) {
  out.resize(a.rows(), b.cols());
  if (threads <= 1) {
    out.noalias() = a * b;
    return;
  }
  detail::parallel_chunks(static_cast<std::size_t>(a.rows()), threads,
                          [&](std::size_t begin, std::size_t end) {
                            const auto n = static_cast<Eigen::Index>(end - begin);
                            const auto first = static_cast<Eigen::Index>(begin);
                            out.middleRows(first, n).noalias() = a.middleRows(first, n) * b;
                          });
}

}  // namespace

std::vector<double> EndmemberModel::abundance(std::size_t line, std::size_t sample) const {
  const auto col = static_cast<Eigen::Index>(line * samples + sample);
  std::vector<double> a(endmember_count());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = abundances(static_cast<Eigen::Index>(k), col);
  return a;
}

void EndmemberModel::validate() const {
  if (signatures.cols() < 1) throw DomainError("model: at least one endmember required");
  if (abundances.rows() != signatures.cols()) {
    throw DomainError("model: abundance rows do not match endmember count");
  }
  if (static_cast<std::size_t>(abundances.cols()) != pixel_count()) {
    throw DomainError("model: abundance columns do not match pixel count");
  }
  if (wavelengths_nm.size() != band_count()) {
    throw DomainError("model: wavelength count does not match signature rows");
  }
  if (!finite_nonnegative(signatures) || !finite_nonnegative(abundances)) {
    throw DomainError("model: entries must be finite and >= 0");
  }
}

void NmfConfig::validate() const {
  if (endmembers < 1) throw DomainError("nmf: endmember count must be >= 1");
  if (max_iter < 1) throw DomainError("nmf: max_iter must be >= 1");
  if (!(tol > 0)) throw DomainError("nmf: tol must be > 0");
  if (!(epsilon_guard > 0)) throw DomainError("nmf: epsilon_guard must be > 0");
}

double nmf_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.rows() != x.rows() || v.rows() != x.cols() || u.cols() != v.cols()) {
    throw DomainError("nmf_cost: shape mismatch, X is " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + ", U is " + std::to_string(u.rows()) + "x" +
                      std::to_string(u.cols()) + ", V is " + std::to_string(v.rows()) + "x" +
                      std::to_string(v.cols()));
  }
  return (x - u * v.transpose()).squaredNorm();
}

NmfInit random_init(const Eigen::MatrixXd& x, std::size_t endmembers, std::uint64_t seed) {
  const auto p = static_cast<Eigen::Index>(endmembers);
  UniformSource uniform(seed);
  NmfInit init{Eigen::MatrixXd(x.rows(), p), Eigen::MatrixXd(x.cols(), p)};
  // Column-major fill order, U then V.
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) init.signatures(i, j) = uniform();
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < x.cols(); ++i) init.abundances(i, j) = uniform();

  // mean(U V^T) = (sum of U column sums * V column sums) / (L N)
  const Eigen::VectorXd su = init.signatures.colwise().sum();
  const Eigen::VectorXd sv = init.abundances.colwise().sum();
  const double model_mean = su.dot(sv) / static_cast<double>(x.size());
  const double scale = std::sqrt(x.mean() / model_mean);
  init.signatures *= scale;
  init.abundances *= scale;
  return init;
}

std::vector<Eigen::Index> successive_projection(const Eigen::MatrixXd& x, std::size_t count) {
  Eigen::MatrixXd residual = x;
  std::vector<Eigen::Index> picked;
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::VectorXd norms = residual.colwise().squaredNorm();
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < norms.size(); ++j) {
      if (norms(j) > norms(best)) best = j;  // ties keep the lower index
    }
    picked.push_back(best);
    if (norms(best) <= 0.0) continue;
    const Eigen::VectorXd dir = residual.col(best) / std::sqrt(norms(best));
    residual -= dir * (dir.transpose() * residual);
  }
  return picked;
}

NmfInit successive_projection_init(const Eigen::MatrixXd& x, std::size_t endmembers) {
  const auto cols = successive_projection(x, endmembers);
  const auto p = static_cast<Eigen::Index>(endmembers);
  NmfInit init{Eigen::MatrixXd(x.rows(), p), Eigen::MatrixXd(x.cols(), p)};
  for (Eigen::Index k = 0; k < p; ++k) init.signatures.col(k) = x.col(cols[static_cast<std::size_t>(k)]);

  const Eigen::MatrixXd fit =
      init.signatures.colPivHouseholderQr().solve(x).transpose();  // N x P
  const double floor = 1e-6 * std::max(1e-300, fit.cwiseAbs().maxCoeff());
  init.abundances = fit.cwiseMax(floor);
  return init;
}

NmfFactors nmf(const Eigen::MatrixXd& x, const NmfConfig& cfg, const NmfObserver& observer) {
  cfg.validate();
  if (!x.allFinite()) throw DomainError("nmf: X contains non-finite values");
  if (x.size() == 0) throw DomainError("nmf: X is empty");
  if (x.minCoeff() < 0.0) throw DomainError("nmf: X contains a negative entry");
  if (x.maxCoeff() == 0.0) throw DomainError("nmf: X is all zero (degenerate)");
  const auto max_rank = static_cast<std::size_t>(std::min(x.rows(), x.cols()));
  if (cfg.endmembers > max_rank) {
    throw DomainError("nmf: endmember count " + std::to_string(cfg.endmembers) +
                      " exceeds min(L, N) = " + std::to_string(max_rank));
  }

  NmfInit start = cfg.init                                             ? *cfg.init
                  : cfg.init_method == NmfInitMethod::successive_projection
                      ? successive_projection_init(x, cfg.endmembers)
                      : random_init(x, cfg.endmembers, cfg.seed);
  const auto p = static_cast<Eigen::Index>(cfg.endmembers);
  if (start.signatures.rows() != x.rows() || start.signatures.cols() != p ||
      start.abundances.rows() != x.cols() || start.abundances.cols() != p) {
    throw DomainError("nmf: provided initial factors have the wrong shape");
  }
  if (!finite_nonnegative(start.signatures) || !finite_nonnegative(start.abundances)) {
    throw DomainError("nmf: provided initial factors must be finite and >= 0");
  }

  NmfFactors f{std::move(start.signatures), std::move(start.abundances), {}, 0};
  const Eigen::MatrixXd xt = x.transpose();
  const double eps = cfg.epsilon_guard;
  Eigen::MatrixXd numer;

  f.cost_trace.push_back(nmf_cost(x, f.signatures, f.abundances));
  if (observer) observer(0, f.signatures, f.abundances);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // U <- U .* (X V) ./ (U V^T V + eps)
    product_rows(x, f.abundances, numer, cfg.threads);
    const Eigen::MatrixXd vtv = f.abundances.transpose() * f.abundances;
    Eigen::MatrixXd denom = f.signatures * vtv;
    f.signatures.array() *= numer.array() / (denom.array() + eps);

    // V <- V .* (X^T U) ./ (V U^T U + eps)
    product_rows(xt, f.signatures, numer, cfg.threads);
    const Eigen::MatrixXd utu = f.signatures.transpose() * f.signatures;
    denom = f.abundances * utu;
    f.abundances.array() *= numer.array() / (denom.array() + eps);

    const double prev = f.cost_trace.back();
    const double cost = nmf_cost(x, f.signatures, f.abundances);
    f.cost_trace.push_back(cost);
    f.iterations = it;
    if (observer) observer(it, f.signatures, f.abundances);

    if (cost == 0.0 || (prev - cost) / prev < cfg.tol) break;
  }
  return f;
}

NmfResult nmf_unmix(const SpectralCube& lowres, const NmfConfig& cfg) {
  lowres.validate();
  auto f = nmf(lowres.to_matrix(), cfg);
  NmfResult result;
  result.model.signatures = std::move(f.signatures);
  result.model.abundances = f.abundances.transpose();
  result.model.samples = lowres.samples;
  result.model.lines = lowres.lines;
  result.model.wavelengths_nm = lowres.wavelengths_nm;
  result.cost_trace = std::move(f.cost_trace);
  result.iterations = f.iterations;
  if (lowres.bands < cfg.endmembers) {
    result.warnings.push_back("fewer bands (" + std::to_string(lowres.bands) +
                              ") than endmembers (" + std::to_string(cfg.endmembers) + ")");
  }
  return result;
}

EndmemberModel rescale_to_unit_sum(const EndmemberModel& model) {
  model.validate();
  const auto p = model.abundances.rows();
  // Pixels whose abundance column is entirely zero carry no mixture to fit.
  std::vector<Eigen::Index> used;
  for (Eigen::Index n = 0; n < model.abundances.cols(); ++n) {
    if (model.abundances.col(n).sum() > 0.0) used.push_back(n);
  }
  EndmemberModel out = model;
  if (used.empty()) return out;

  Eigen::MatrixXd a(p, static_cast<Eigen::Index>(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = model.abundances.col(used[i]);
  const Eigen::MatrixXd gram = a * a.transpose();
  const Eigen::VectorXd rhs = a.rowwise().sum();

  // Projected Gauss-Seidel for min ||A^T w - 1||^2 subject to w >= 0.
  Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  for (int sweep = 0; sweep < 10000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (gram(k, k) <= 0.0) continue;
      const double residual = rhs(k) - gram.row(k).dot(w) + gram(k, k) * w(k);
      const double next = std::max(0.0, residual / gram(k, k));
      change = std::max(change, std::abs(next - w(k)));
      w(k) = next;
    }
    if (change <= 1e-15 * std::max(1.0, w.cwiseAbs().maxCoeff())) break;
  }
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(w(k) > 0.0) || !std::isfinite(w(k))) continue;
    out.signatures.col(k) /= w(k);
    out.abundances.row(k) *= w(k);
  }
  return out;
}

EndmemberModel normalize_abundances(const EndmemberModel& model, double epsilon_guard) {
  EndmemberModel out = model;
  const auto p = out.abundances.rows();
  for (Eigen::Index n = 0; n < out.abundances.cols(); ++n) {
    const double sum = out.abundances.col(n).sum();
    if (sum < epsilon_guard) {
      out.abundances.col(n).setConstant(1.0 / static_cast<double>(p));
    } else {
      out.abundances.col(n) /= sum;
    }
  }
  return out;
}

std::vector<std::size_t> active_endmembers(std::span<const double> a, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("active_endmembers: threshold must lie in (0, 1), got " +
                      std::to_string(threshold));
  }
  if (a.empty()) throw DomainError("active_endmembers: empty abundance vector");
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i] > a[j]; });
  std::vector<std::size_t> active;
  for (auto i : order) {
    if (a[i] >= threshold) active.push_back(i);
  }
  if (active.empty()) active.push_back(order.front());
  return active;
}

void write_model(const EndmemberModel& model, const std::filesystem::path& signatures_csv,
                 const std::filesystem::path& abundance_cube) {
  model.validate();
  const auto p = model.endmember_count();
  io::SpectralTable table;
  table.wavelengths_nm = model.wavelengths_nm;
  std::vector<double> ids;
  for (std::size_t k = 0; k < p; ++k) {
    table.names.push_back("e" + std::to_string(k + 1));
    const auto col = model.signatures.col(static_cast<Eigen::Index>(k));
    table.columns.emplace_back(col.data(), col.data() + col.size());
    ids.push_back(static_cast<double>(k + 1));
  }
  io::write_spectral_table(table, signatures_csv);
  io::write_cube(SpectralCube::from_matrix(model.abundances, model.samples, model.lines, ids),
                 abundance_cube);
}

EndmemberModel read_model(const std::filesystem::path& signatures_csv,
                          const std::filesystem::path& abundance_cube) {
  const auto table = io::read_spectral_table(signatures_csv);
  const auto cube = io::read_cube(abundance_cube);
  if (cube.bands != table.names.size()) {
    throw FormatError(abundance_cube.string() + ": abundance band count " +
                      std::to_string(cube.bands) + " does not match " +
                      std::to_string(table.names.size()) + " signatures in " +
                      signatures_csv.string());
  }
  EndmemberModel model;
  model.wavelengths_nm = table.wavelengths_nm;
  model.signatures.resize(static_cast<Eigen::Index>(table.wavelengths_nm.size()),
                          static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    for (std::size_t b = 0; b < table.wavelengths_nm.size(); ++b) {
      model.signatures(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) =
          table.columns[k][b];
    }
  }
  model.abundances = cube.to_matrix();
  model.samples = cube.samples;
  model.lines = cube.lines;
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw FormatError(signatures_csv.string() + ": " + e.what());
  }
  return model;
}

}  // namespace hyperfuse::unmix
