#include <doctest.h>

#include <cmath>

#include "hyperfuse/error.hpp"
#include "hyperfuse/metrics.hpp"
#include "support/oracles.hpp"

using namespace hyperfuse;
using doctest::Approx;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

SpectralCube cube_from(std::size_t samples, std::size_t lines, std::size_t bands,
                       std::vector<float> values) {
  std::vector<double> wl(bands);
  for (std::size_t b = 0; b < bands; ++b) wl[b] = 400.0 + 10.0 * double(b);
  SpectralCube c(samples, lines, wl);
  c.values = std::move(values);
  return c;
}

// Unit vector in the plane of e0 and e1 at `deg` degrees from e0.
std::vector<float> at_angle(double deg) {
  const double r = deg * 3.14159265358979323846 / 180.0;
  return {static_cast<float>(std::cos(r)), static_cast<float>(std::sin(r))};
}

}  // namespace

TEST_CASE("sad examples") {
  CHECK(metrics::sad(vec({1, 0}), vec({1, 0})) == Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(metrics::sad(vec({1, 0}), vec({0, 1})) - 90.0) <= 1e-9);
  CHECK(std::abs(metrics::sad(vec({1, 1}), vec({1, 0})) - 45.0) <= 1e-9);
}

TEST_CASE("sad errors") {
  CHECK_THROWS_AS(metrics::sad(vec({0, 0}), vec({1, 0})), DomainError);
  CHECK_THROWS_AS(metrics::sad(vec({1, 0}), vec({1, 0, 0})), DomainError);
}

TEST_CASE("sad is symmetric and scale invariant") {
  const auto a = vec({0.3, 0.7, 0.11, 0.02});
  const auto b = vec({0.25, 0.5, 0.4, 0.01});
  CHECK(metrics::sad(a, b) == metrics::sad(b, a));
  for (double k : {1e-6, 0.5, 3.0, 1e6}) {
    auto scaled = a;
    for (auto& v : scaled) v *= k;
    CHECK(metrics::sad(a, scaled) <= 1e-6);
  }
  CHECK(metrics::sad(a, b) == Approx(testing::reference_sad(a, b)).epsilon(1e-12));
}

TEST_CASE("sae of identical cubes is zero") {
  const auto c = cube_from(2, 1, 2, {0.1f, 0.2f, 0.3f, 0.4f});
  CHECK(metrics::sae(c, c) == 0.0);
}

TEST_CASE("sae is the rms of per-pixel angles") {
  // Pixel 0 at 0 deg, pixel 1 at 2 deg from the reference.
  const auto ref = cube_from(2, 1, 2, {1.0f, 1.0f, 0.0f, 0.0f});
  const auto p1 = at_angle(2.0);
  const auto est = cube_from(2, 1, 2, {1.0f, p1[0], 0.0f, p1[1]});
  // Expected from the float-rounded spectra, which sit within ~1e-5 deg of 2.
  const double d1 = testing::reference_sad({1.0, 0.0}, {p1[0], p1[1]});
  CHECK(metrics::sae(ref, est) == Approx(std::sqrt((0.0 + d1 * d1) / 2.0)).epsilon(1e-12));
  CHECK(metrics::sae(ref, est) == Approx(std::sqrt(2.0)).epsilon(1e-5));

  const auto both = cube_from(2, 1, 2, {p1[0], p1[0], p1[1], p1[1]});
  CHECK(metrics::sae(ref, both) == Approx(d1).epsilon(1e-12));
  CHECK(metrics::sae(ref, both) == Approx(2.0).epsilon(1e-5));
}

TEST_CASE("sae geometry and empty errors") {
  const auto a = cube_from(2, 1, 1, {1.0f, 1.0f});
  const auto b = cube_from(1, 2, 1, {1.0f, 1.0f});
  CHECK_THROWS_AS(metrics::sae(a, b), DomainError);
  LabelMap none(2, 1, 0);
  CHECK_THROWS_AS(metrics::sae(a, a, &none), DomainError);
}

TEST_CASE("masked padding leaves sae unchanged") {
  const auto p1 = at_angle(3.0);
  const auto ref = cube_from(2, 1, 2, {1.0f, 0.6f, 0.0f, 0.8f});
  const auto est = cube_from(2, 1, 2, {p1[0], 0.6f, p1[1], 0.8f});
  const double base = metrics::sae(ref, est);

  // Same two pixels in a 4x1 scene padded with background whose estimate is junk.
  const auto ref_pad = cube_from(4, 1, 2, {1.0f, 0.6f, 0.0f, 0.0f, 0.0f, 0.8f, 0.0f, 0.0f});
  const auto est_pad = cube_from(4, 1, 2, {p1[0], 0.6f, 0.5f, 0.1f, p1[1], 0.8f, 0.2f, 0.9f});
  LabelMap mask(4, 1);
  mask.labels = {1, 1, 0, 0};
  const auto summary = metrics::sae_summary(ref_pad, est_pad, &mask);
  CHECK(summary.degrees == base);
  CHECK(summary.pixels == 2);
  CHECK(summary.masked == 2);
}

TEST_CASE("zero spectra are skipped and counted") {
  const auto ref = cube_from(2, 1, 1, {1.0f, 0.0f});
  const auto est = cube_from(2, 1, 1, {2.0f, 1.0f});
  const auto s = metrics::sae_summary(ref, est);
  CHECK(s.degrees == 0.0);
  CHECK(s.zero_spectrum == 1);
}

TEST_CASE("mse_band examples") {
  const std::vector<float> a(9, 0.5f);
  CHECK(metrics::mse_band(a, a) == 0.0);
  std::vector<float> off(9);
  for (std::size_t i = 0; i < 9; ++i) off[i] = a[i] + 0.1f;
  CHECK(metrics::mse_band(a, off) == Approx(0.01).epsilon(1e-6));
  auto one = a;
  one[4] += 0.3f;
  CHECK(metrics::mse_band(a, one) == Approx(0.01).epsilon(1e-6));
  const std::vector<float> short_band(8, 0.5f);
  CHECK_THROWS_AS(metrics::mse_band(a, short_band), DomainError);
}

TEST_CASE("psnr examples") {
  CHECK(std::abs(*metrics::psnr(1.0, 0.01) - 20.0) <= 1e-9);
  CHECK(std::abs(*metrics::psnr(0.5, 0.0025) - 20.0) <= 1e-9);
  CHECK_FALSE(metrics::psnr(1.0, 0.0).has_value());
  const std::vector<float> band{0.2f, 0.4f, 0.5f};
  CHECK_FALSE(metrics::psnr_band(band, band).has_value());
  const std::vector<float> zero(3, 0.0f);
  CHECK_THROWS_AS(metrics::psnr_band(zero, band), DomainError);
}

TEST_CASE("psnr_band takes MAX from the reference") {
  const std::vector<float> ref{0.25f, 0.5f};
  const std::vector<float> est{0.25f, 0.0f};
  // MSE = 0.125, MAX = 0.5 -> 10 log10(0.25 / 0.125)
  CHECK(*metrics::psnr_band(ref, est) == Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("psnr falls as noise amplitude grows") {
  std::vector<float> ref(50);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = 0.2f + 0.01f * float(i);
  double last = std::numeric_limits<double>::infinity();
  for (float amp : {0.001f, 0.005f, 0.01f, 0.05f, 0.1f}) {
    auto est = ref;
    for (std::size_t i = 0; i < est.size(); ++i) est[i] += (i % 2 ? amp : -amp);
    const double p = *metrics::psnr_band(ref, est);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("evaluate of identical cubes") {
  const auto c = cube_from(2, 1, 2, {0.1f, 0.2f, 0.3f, 0.4f});
  const auto r = metrics::evaluate(c, c);
  CHECK(r.sae_degrees == 0.0);
  CHECK(r.mse_per_band == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(r.psnr_per_band_db[0].has_value());
  CHECK_FALSE(r.psnr_per_band_db[1].has_value());
  CHECK_FALSE(r.psnr_mean_db.has_value());
}

TEST_CASE("evaluate of one band matches psnr_band") {
  const auto ref = cube_from(3, 1, 1, {0.2f, 0.8f, 0.5f});
  const auto est = cube_from(3, 1, 1, {0.25f, 0.7f, 0.5f});
  const auto r = metrics::evaluate(ref, est);
  CHECK(*r.psnr_per_band_db[0] == *metrics::psnr_band(ref.band(0), est.band(0)));
  CHECK(*r.psnr_mean_db == *r.psnr_per_band_db[0]);
}

TEST_CASE("evaluate on a hand-built 2-band 2x1 scene") {
  // Reference pixels (1, 2) and (3, 4); estimate pixels (1, 1) and (3, 5).
  const auto ref = cube_from(2, 1, 2, {1.0f, 3.0f, 2.0f, 4.0f});
  const auto est = cube_from(2, 1, 2, {1.0f, 3.0f, 1.0f, 5.0f});
  const auto r = metrics::evaluate(ref, est);

  // By hand: SAD pixel 0 = acos(3 / (sqrt5 sqrt2)), pixel 1 = acos(29 / (5 sqrt34)).
  const double rad = 180.0 / 3.14159265358979323846;
  const double s0 = std::acos(3.0 / (std::sqrt(5.0) * std::sqrt(2.0))) * rad;
  const double s1 = std::acos(29.0 / (5.0 * std::sqrt(34.0))) * rad;
  CHECK(r.sae_degrees == Approx(std::sqrt((s0 * s0 + s1 * s1) / 2.0)).epsilon(1e-12));
  // Band 0 identical; band 1 errors (1, 1) -> MSE 1, MAX 4 -> 10 log10 16.
  CHECK(r.mse_per_band[0] == 0.0);
  CHECK(r.mse_per_band[1] == 1.0);
  CHECK_FALSE(r.psnr_per_band_db[0].has_value());
  CHECK(*r.psnr_per_band_db[1] == Approx(10.0 * std::log10(16.0)).epsilon(1e-12));
  CHECK(*r.psnr_mean_db == *r.psnr_per_band_db[1]);
  CHECK(r.parameters.at("psnr_infinite_bands") == 1);
}

TEST_CASE("evaluate rejects mismatched band counts") {
  const auto a = cube_from(1, 1, 2, {0.1f, 0.2f});
  const auto b = cube_from(1, 1, 1, {0.1f});
  CHECK_THROWS_AS(metrics::evaluate(a, b), DomainError);
}
