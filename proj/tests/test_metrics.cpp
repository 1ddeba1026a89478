#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dmimo/error.hpp"
#include "dmimo/metrics.hpp"
#include "dmimo/precoding.hpp"
#include "test_util.hpp"

using namespace dmimo;
using dmimo::test::random_matrix;

namespace {

// Straight transcription of the SINR ratio with explicit loops.
double sinr_loop(const ComplexMatrix& h, const ComplexMatrix& w, double noise, Index k) {
  auto inner = [&](Index user, Index beam) {
    cdouble s = 0.0;
    for (Index m = 0; m < h.rows(); ++m) s += std::conj(h(m, user)) * w(m, beam);
    return std::norm(s);
  };
  double interference = 0.0;
  for (Index l = 0; l < w.cols(); ++l) {
    if (l != k) interference += inner(k, l);
  }
  return inner(k, k) / (interference + noise);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Domain;
}

}  // namespace

TEST_CASE("sinr examples") {
  std::mt19937_64 rng(21);
  SUBCASE("single user reduces to SNR") {
    const ComplexMatrix h = random_matrix(8, 1, rng);
    const ComplexMatrix w = normalize_columns(h);
    const Sinr s = sinr(h, w, 0.05, 0);
    CHECK(s.linear == doctest::Approx(h.squaredNorm() / 0.05).epsilon(1e-13));
    CHECK(s.db == doctest::Approx(10 * std::log10(s.linear)).epsilon(1e-14));
  }
  SUBCASE("unnormalized ZF has no interference") {
    const ComplexMatrix h = random_matrix(8, 3, rng);
    const ComplexMatrix w = zf_unnormalized(h);
    const ComplexMatrix g = h.adjoint() * w;
    for (Index k = 0; k < 3; ++k) {
      CHECK(sinr(h, w, 0.1, k).linear == doctest::Approx(std::norm(g(k, k)) / 0.1).epsilon(1e-8));
    }
  }
  SUBCASE("bad inputs") {
    const ComplexMatrix h = random_matrix(4, 2, rng);
    CHECK(code_of([&] { sinr(h, h, 0.0, 0); }) == ErrorCode::Domain);
    CHECK(code_of([&] { sinr(h, h, 1.0, 2); }) == ErrorCode::Domain);
    CHECK(code_of([&] { sinr(h, random_matrix(4, 3, rng), 1.0, 0); }) == ErrorCode::Domain);
  }
}

TEST_CASE("sinr matches the scalar-loop oracle") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> noise(0.01, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const ComplexMatrix h = random_matrix(4, 2, rng);
    const ComplexMatrix w = random_matrix(4, 2, rng);
    const double n = noise(rng);
    for (Index k = 0; k < 2; ++k) {
      const double ref = sinr_loop(h, w, n, k);
      CHECK(std::abs(sinr(h, w, n, k).linear - ref) <= 1e-12 * ref);
    }
  }
}

TEST_CASE("property: sinr invariances") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int t = 0; t < 300; ++t) {
    const ComplexMatrix h = random_matrix(6, 4, rng);
    const ComplexMatrix w = normalize_columns(random_matrix(6, 4, rng));
    for (Index k = 0; k < 4; ++k) {
      const double base = sinr(h, w, 0.3, k).linear;
      ComplexMatrix rotated = w;
      for (Index l = 0; l < 4; ++l) rotated.col(l) *= std::polar(1.0, ph(rng));
      CHECK(std::abs(sinr(h, rotated, 0.3, k).linear - base) <= 1e-12 * base);

      // Dropping an interferer never lowers the SINR.
      const Index drop = (k + 1) % 4;
      ComplexMatrix hs(6, 3), ws(6, 3);
      Index kk = 0;
      for (Index l = 0, j = 0; l < 4; ++l) {
        if (l == drop) continue;
        if (l == k) kk = j;
        hs.col(j) = h.col(l);
        ws.col(j++) = w.col(l);
      }
      CHECK(sinr(hs, ws, 0.3, kk).linear >= base * (1 - 1e-12));
    }
  }
}

TEST_CASE("noise variance from the floor") {
  CHECK(noise_variance_from_floor(-20.0, 3.0) == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(from_db(to_db(7.5)) == doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("inject_channel_error") {
  std::mt19937_64 rng(24);
  const ComplexMatrix h = random_matrix(64, 10, rng);
  SUBCASE("zero variance leaves H alone") {
    const ChannelEstimate e = inject_channel_error(h, {0.0, 1});
    CHECK((e.estimate - h).norm() == 0.0);
    CHECK(e.nmse == 0.0);
  }
  SUBCASE("law of large numbers for 64 x 10") {
    const double var = 0.2;
    const double expected = var * 640.0 / h.squaredNorm();
    const ChannelEstimate e = inject_channel_error(h, {var, 77});
    CHECK(e.nmse == doctest::Approx(expected).epsilon(0.05));
    CHECK(e.nmse == doctest::Approx((e.estimate - h).squaredNorm() / h.squaredNorm()).epsilon(1e-13));
  }
  SUBCASE("deterministic per seed") {
    const ChannelEstimate a = inject_channel_error(h, {0.1, 5});
    const ChannelEstimate b = inject_channel_error(h, {0.1, 5});
    const ChannelEstimate c = inject_channel_error(h, {0.1, 6});
    CHECK((a.estimate - b.estimate).norm() == 0.0);
    CHECK((a.estimate - c.estimate).norm() > 0.0);
  }
  SUBCASE("negative variance") {
    CHECK(code_of([&] { inject_channel_error(h, {-1.0, 0}); }) == ErrorCode::Domain);
  }
}

TEST_CASE("guaranteed SINR and quantiles") {
  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i;
  CHECK(guaranteed_sinr(ramp, 0.9) == doctest::Approx(9.9).epsilon(1e-14));
  CHECK(guaranteed_sinr(ramp, 0.5) == doctest::Approx(49.5).epsilon(1e-14));
  const std::vector<double> flat(17, 3.25);
  CHECK(guaranteed_sinr(flat, 0.9) == 3.25);
  CHECK(quantile(ramp, 0.0) == 0.0);
  CHECK(quantile(ramp, 1.0) == 99.0);
  const std::vector<double> none;
  CHECK(code_of([&] { guaranteed_sinr(none, 0.9); }) == ErrorCode::NoData);
  CHECK(code_of([&] { guaranteed_sinr(ramp, 1.0); }) == ErrorCode::Domain);
  CHECK(code_of([&] { guaranteed_sinr(ramp, 0.0); }) == ErrorCode::Domain);
}

TEST_CASE("empirical CDF") {
  const std::vector<double> one{4.0};
  const auto c1 = empirical_cdf(one);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].value == 4.0);
  CHECK(c1[0].probability == 1.0);

  const std::vector<double> dup{2.0, 1.0, 2.0, 3.0};
  const auto c = empirical_cdf(dup);
  REQUIRE(c.size() == 4);
  CHECK(c[1].value == 2.0);
  CHECK(c[2].value == 2.0);
  CHECK(c[1].probability == 0.5);
  CHECK(c[2].probability == 0.75);
  CHECK(cdf_at(c, 2.0) == 0.75);
  CHECK(cdf_at(c, 0.5) == 0.0);
  CHECK(cdf_at(c, 10.0) == 1.0);

  const std::vector<double> none;
  CHECK(code_of([&] { empirical_cdf(none); }) == ErrorCode::NoData);
}

TEST_CASE("quantile / CDF duality") {
  std::mt19937_64 rng(25);
  std::normal_distribution<double> g(10.0, 4.0);
  std::vector<double> s(5000);
  for (auto& x : s) x = g(rng);
  const auto cdf = empirical_cdf(s);
  CHECK(cdf_at(cdf, guaranteed_sinr(s, 0.9)) == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("thin_cdf keeps both ends") {
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
  const auto cdf = empirical_cdf(s);
  const auto thin = thin_cdf(cdf, 200);
  REQUIRE(thin.size() == 200);
  CHECK(thin.front().value == 0.0);
  CHECK(thin.back().probability == 1.0);
  for (std::size_t i = 1; i < thin.size(); ++i) CHECK(thin[i].value > thin[i - 1].value);
  CHECK(thin_cdf(cdf, 5000).size() == 1000);
}
