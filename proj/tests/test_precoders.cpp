#include <doctest.h>

#include <cmath>
#include <random>

#include "dmimo/error.hpp"
#include "dmimo/geometry.hpp"
#include "dmimo/precoders.hpp"
#include "test_util.hpp"

using namespace dmimo;
using dmimo::test::phase_aligned_error;
using dmimo::test::random_matrix;
using dmimo::test::random_vector;

namespace {

ArrayGeometry line_array(int n, double spacing, double wavelength) {
  ArrayGeometry g;
  g.wavelength = wavelength;
  IndexSet ap;
  for (int i = 0; i < n; ++i) {
    g.antenna_positions.emplace_back(i * spacing, 0.0, 0.0);
    ap.push_back(i);
  }
  g.ap_partition.push_back(ap);
  return g;
}

IndexSet range(Index n) {
  IndexSet out;
  for (Index i = 0; i < n; ++i) out.push_back(i);
  return out;
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

ComplexMatrix without_column(const ComplexMatrix& h, Index k) {
  ComplexMatrix v(h.rows(), h.cols() - 1);
  for (Index c = 0, j = 0; c < h.cols(); ++c) {
    if (c != k) v.col(j++) = h.col(c);
  }
  return v;
}

}  // namespace

TEST_CASE("far-field weights") {
  const double lambda = 0.1;
  SUBCASE("broadside is uniform") {
    const ComplexVector w = far_field_weights(line_array(8, lambda / 2, lambda), 0.0, 0);
    for (Index i = 0; i < 8; ++i) CHECK(std::abs(w(i) - w(0)) < 1e-15);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("endfire limit on a half-wavelength pair flips the phase") {
    const ComplexVector w = far_field_weights(line_array(2, lambda / 2, lambda), kPi / 2 - 1e-9, 0);
    CHECK(std::abs(w(1) / w(0) - cdouble(-1, 0)) < 1e-8);
    CHECK(code_of([&] { far_field_weights(line_array(2, lambda / 2, lambda), kPi / 2, 0); }) ==
          ErrorCode::Domain);
  }
  SUBCASE("phase ramp of -pi sin(theta) per element") {
    const ComplexVector w = far_field_weights(line_array(8, lambda / 2, lambda), kPi / 6, 0);
    // Closed-form ramp: successive ratio exp(-j pi sin(pi/6)) = exp(-j pi/2) = -j.
    for (Index i = 1; i < 8; ++i) CHECK(std::abs(w(i) / w(i - 1) - cdouble(0, -1)) < 1e-12);
  }
}

TEST_CASE("broadside angle reproduces the LoS phase ramp in the far field") {
  const double lambda = 0.1;
  const ArrayGeometry g = line_array(8, lambda / 2, lambda);
  const Point3 ue(400.0 * std::sin(0.4) * 1.0, 400.0 * std::cos(0.4), 0.0);
  const double theta = broadside_angle(g, range(8), ue);
  const ComplexVector w = far_field_weights(g, theta, 0);
  const ComplexVector h = mrt(los_channel(g, ue, {lambda, AmplitudeModel::UnitMagnitude, 1.0}));
  CHECK(std::abs(h.dot(w)) > 0.999);
}

TEST_CASE("near-field weights") {
  const ArrayGeometry g = default_perimeter_geometry();
  SUBCASE("equal distances give a uniform-phase vector") {
    ArrayGeometry ring;
    ring.wavelength = 0.115;
    for (int i = 0; i < 6; ++i) {
      ring.antenna_positions.emplace_back(std::cos(i * 1.0), std::sin(i * 1.0), 0.0);
    }
    ring.ap_partition = {range(6)};
    const ComplexVector w = near_field_weights(ring, Point3::Zero(), range(6));
    for (Index i = 0; i < 6; ++i) CHECK(std::abs(w(i) - w(0)) < 1e-14);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("single antenna") {
    const ComplexVector w = near_field_weights(g, Point3(3, 3, 0), {17});
    REQUIRE(w.size() == 1);
    CHECK(std::abs(w(0)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("matched to the unit-magnitude LoS channel") {
    const Point3 ue(2.1, 3.3, 0.0);
    const ComplexVector w = near_field_weights(g, ue, range(64));
    const ComplexVector h = los_channel(g, ue, {g.wavelength, AmplitudeModel::UnitMagnitude, 1.0});
    CHECK(std::abs(h.dot(w)) == doctest::Approx(std::sqrt(64.0)).epsilon(1e-12));
  }
  SUBCASE("singular at an antenna") {
    CHECK(code_of([&] { near_field_weights(g, g.antenna_positions[3], range(64)); }) ==
          ErrorCode::Singularity);
  }
}

TEST_CASE("MRT") {
  std::mt19937_64 rng(1);
  ComplexVector e1 = ComplexVector::Zero(5);
  e1(0) = 1.0;
  CHECK((mrt(e1) - e1).norm() == 0.0);
  const ComplexVector h = random_vector(16, rng);
  CHECK((mrt(h * 3.7) - mrt(h)).norm() < 1e-15);
  for (int t = 0; t < 100; ++t) {
    const ComplexVector x = random_vector(32, rng);
    // Cauchy-Schwarz equality.
    CHECK(std::abs(std::abs(x.dot(mrt(x))) - x.norm()) < 1e-12);
  }
  CHECK(code_of([&] { mrt(ComplexVector::Zero(4).eval()); }) == ErrorCode::DegenerateChannel);
}

TEST_CASE("zero-forcing") {
  std::mt19937_64 rng(2);
  SUBCASE("single user reduces to MRT") {
    const ComplexMatrix h = random_matrix(8, 1, rng);
    CHECK(phase_aligned_error(zf(h).col(0), mrt(h.col(0))) < 1e-12);
  }
  SUBCASE("orthogonal channels reduce to MRT per column") {
    ComplexMatrix h = ComplexMatrix::Zero(6, 3);
    h(0, 0) = cdouble(2, 1);
    h(1, 0) = cdouble(0, 1);
    h(2, 1) = cdouble(-1, 0);
    h(3, 2) = cdouble(0.5, 0.5);
    h(5, 2) = cdouble(1, -2);
    const ComplexMatrix w = zf(h);
    for (Index k = 0; k < 3; ++k) CHECK(phase_aligned_error(w.col(k), mrt(h.col(k))) < 1e-12);
  }
  SUBCASE("interference vanishes on random 8x3 channels") {
    for (int t = 0; t < 50; ++t) {
      const ComplexMatrix h = random_matrix(8, 3, rng);
      const ComplexMatrix g = h.adjoint() * zf_unnormalized(h);
      CHECK((g - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
      double off = 0.0;
      for (Index k = 0; k < 3; ++k) {
        for (Index l = 0; l < 3; ++l) {
          if (k != l) off = std::max(off, std::abs(g(k, l)));
        }
      }
      CHECK(off < 1e-10);
      const ComplexMatrix w = zf(h);
      for (Index k = 0; k < 3; ++k) CHECK(w.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("rank deficiency is reported") {
    ComplexMatrix h = random_matrix(8, 3, rng);
    h.col(2) = h.col(0) * cdouble(0.3, -2.0);
    CHECK(code_of([&] { zf(h); }) == ErrorCode::RankDeficiency);
    CHECK(code_of([&] { zf(random_matrix(8, 10, rng)); }) == ErrorCode::RankDeficiency);
  }
}

TEST_CASE("regularized zero-forcing") {
  std::mt19937_64 rng(3);
  const ComplexMatrix h = random_matrix(8, 4, rng);
  SUBCASE("alpha -> 0 matches ZF") {
    const ComplexMatrix a = rzf(h, 1e-10);
    const ComplexMatrix b = zf(h);
    for (Index k = 0; k < 4; ++k) CHECK(phase_aligned_error(a.col(k), b.col(k)) < 1e-6);
  }
  SUBCASE("alpha -> infinity approaches MRT") {
    const ComplexMatrix a = rzf(h, 1e10);
    for (Index k = 0; k < 4; ++k) CHECK(phase_aligned_error(a.col(k), mrt(h.col(k))) < 1e-6);
  }
  SUBCASE("more users than antennas with alpha > 0") {
    const ComplexMatrix big = random_matrix(8, 10, rng);
    const ComplexMatrix w = rzf(big, 0.01);
    CHECK(w.allFinite());
    for (Index k = 0; k < 10; ++k) CHECK(w.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(code_of([&] { rzf(big, 0.0); }) == ErrorCode::RankDeficiency);
    CHECK(code_of([&] { rzf(big, -1.0); }) == ErrorCode::Domain);
  }
}

TEST_CASE("property: RZF trades interference for signal as alpha grows") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    const ComplexMatrix h = random_matrix(8, 4, rng);
    const double noise = 0.01 * h.colwise().squaredNorm().mean();
    double prev_signal[4];
    double prev_interference[4];
    bool first = true;
    for (double alpha : {0.0, noise, 10 * noise}) {
      const ComplexMatrix w = rzf(h, alpha);
      const ComplexMatrix g = h.adjoint() * w;
      for (Index k = 0; k < 4; ++k) {
        const double signal = std::norm(g(k, k));
        double interference = 0.0;
        for (Index l = 0; l < 4; ++l) {
          if (l != k) interference += std::norm(g(k, l));
        }
        if (!first) {
          CHECK(signal >= prev_signal[k] - 1e-9);
          CHECK(interference >= prev_interference[k] - 1e-9);
        }
        prev_signal[k] = signal;
        prev_interference[k] = interference;
      }
      first = false;
    }
  }
}

TEST_CASE("orthogonalize") {
  std::mt19937_64 rng(5);
  const ComplexVector w = random_vector(8, rng);
  SUBCASE("empty subspace leaves w unchanged") {
    CHECK((orthogonalize(w, ComplexMatrix(8, 0)) - w).norm() == 0.0);
  }
  SUBCASE("projecting w against itself suppresses everything") {
    ComplexMatrix v(8, 1);
    v.col(0) = w;
    CHECK(code_of([&] { orthogonalize(w, v); }) == ErrorCode::FullySuppressed);
  }
  SUBCASE("rank-deficient subspace") {
    ComplexMatrix v = random_matrix(8, 3, rng);
    v.col(1) = v.col(0) * 2.0;
    CHECK(code_of([&] { orthogonalize(w, v); }) == ErrorCode::RankDeficiency);
    CHECK(code_of([&] { orthogonalize(w, random_matrix(8, 9, rng)); }) == ErrorCode::RankDeficiency);
  }
  SUBCASE("MRT orthogonalized against the other channels equals the ZF column") {
    for (int t = 0; t < 100; ++t) {
      const ComplexMatrix h = random_matrix(16, 5, rng);
      const ComplexMatrix wzf = zf(h);
      for (Index k = 0; k < 5; ++k) {
        const ComplexVector o = mrt(orthogonalize(mrt(h.col(k)), without_column(h, k)));
        CHECK(phase_aligned_error(o, wzf.col(k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("property: orthogonalized vector is orthogonal to the subspace") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 500; ++t) {
    const Index m = 4 + static_cast<Index>(rng() % 60);
    const Index c = static_cast<Index>(rng() % static_cast<std::uint64_t>(m));
    const ComplexMatrix v = random_matrix(m, c, rng);
    const ComplexVector w = random_vector(m, rng);
    const ComplexVector out = orthogonalize(w, v);
    if (c > 0) CHECK((v.adjoint() * out).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("property: orthogonalize depends only on span(V)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(0.01, 100.0);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int t = 0; t < 200; ++t) {
    const ComplexMatrix v = random_matrix(12, 4, rng);
    const ComplexVector w = random_vector(12, rng);
    ComplexMatrix scaled = v;
    for (Index c = 0; c < 4; ++c) scaled.col(c) *= std::polar(mag(rng), ph(rng));
    CHECK((orthogonalize(w, v) - orthogonalize(w, scaled)).norm() < 1e-10);
  }
}

TEST_CASE("regularized orthogonalization") {
  std::mt19937_64 rng(8);
  const ComplexVector w = random_vector(8, rng);
  const ComplexMatrix v = random_matrix(8, 3, rng);
  SUBCASE("alpha -> infinity returns w") {
    CHECK((orthogonalize_regularized(w, v, 1e12) - w).norm() < 1e-9);
  }
  SUBCASE("alpha -> 0 matches the exact projection") {
    CHECK((orthogonalize_regularized(w, v, 1e-10) - orthogonalize(w, v)).norm() < 1e-6);
  }
  SUBCASE("duplicated column") {
    ComplexVector x(3);
    x << cdouble(1, 0), cdouble(0, 0.5), cdouble(-0.25, 0);
    ComplexMatrix d(3, 2);
    d << cdouble(1, 0), cdouble(1, 0), cdouble(0, 1), cdouble(0, 1), cdouble(0, 0), cdouble(0, 0);
    const ComplexVector out = orthogonalize_regularized(x, d, 0.01);
    // Oracle: columns u = [1, j, 0]/sqrt(2) twice, Gram [[1.01, 1], [1, 1.01]];
    // w - u * 2 (u^H w) / 2.01 evaluated by hand.
    ComplexVector expected(3);
    expected << cdouble(1.0 - 1.5 / 2.01, 0), cdouble(0, 0.5 - 1.5 / 2.01), cdouble(-0.25, 0);
    CHECK((out - expected).norm() < 1e-14);
  }
  SUBCASE("alpha must be positive") {
    CHECK(code_of([&] { orthogonalize_regularized(w, v, 0.0); }) == ErrorCode::Domain);
  }
  SUBCASE("rank-deficient subspaces are fine") {
    const ComplexVector out = orthogonalize_regularized(w, random_matrix(8, 12, rng), 0.01);
    CHECK(out.allFinite());
  }
}

TEST_CASE("precoder names") {
  const PrecoderSpec zf_spec = parse_precoder("ZF");
  CHECK(zf_spec.base == BaseVector::Mrt);
  CHECK(zf_spec.suppression == Suppression::Csi);
  CHECK_FALSE(zf_spec.regularization.enabled);
  CHECK(zf_spec.scope == Scope::Centralized);

  const PrecoderSpec d = parse_precoder("DIS_RMRT_nf");
  CHECK(d.scope == Scope::DistributedPerAp);
  CHECK(d.regularization.enabled);
  CHECK(d.base == BaseVector::Mrt);
  CHECK(d.suppression == Suppression::NearField);

  CHECK(parse_precoder("RZF_nf").suppression == Suppression::Hybrid);
  CHECK(parse_precoder("RZF_nf").regularization.enabled);
  CHECK(parse_precoder("nf_nf").base == BaseVector::NearField);
  CHECK(parse_precoder("NF").suppression == Suppression::None);
  CHECK(parse_precoder("FF").base == BaseVector::FarField);
  CHECK(code_of([] { parse_precoder("RMRT"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_precoder("XYZ_nf"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_precoder("MRT_"); }) == ErrorCode::Config);
}

TEST_CASE("information requirements table") {
  auto req = [](const char* n) { return requirements(parse_precoder(n)); };
  CHECK(req("NF") == InformationRequirements{true, false, false, false});
  CHECK(req("MRT") == InformationRequirements{false, true, false, false});
  CHECK(req("ZF") == InformationRequirements{false, true, false, true});
  CHECK(req("DIS_RZF") == InformationRequirements{false, true, false, true});
  CHECK(req("nf_nf") == InformationRequirements{true, false, true, false});
  CHECK(req("DIS_RMRT_nf") == InformationRequirements{false, true, true, false});
  CHECK(req("RZF_nf") == InformationRequirements{false, true, true, true});
}

namespace {

struct Fixture {
  ArrayGeometry geometry = default_perimeter_geometry();
  std::vector<Point3> positions;
  ChannelMatrix h;

  explicit Fixture(int k, std::uint64_t seed = 1) {
    positions = place_ues(default_roi(), k, 0.1, seed).positions;
    h = los_channel_matrix(geometry, positions, {geometry.wavelength, AmplitudeModel::FreeSpace, 1.0});
  }

  InformationAccess access(const PrecoderSpec& spec, Index k, std::vector<bool> shared = {}) const {
    if (shared.empty()) shared.assign(positions.size(), true);
    return InformationAccess(h, positions, requirements(spec), k, std::move(shared));
  }
};

}  // namespace

TEST_CASE("build_precoder: MRT for a single user") {
  const Fixture f(1);
  const PrecoderSpec spec = parse_precoder("MRT");
  const ComplexVector w = build_precoder(spec, f.access(spec, 0), f.geometry, {});
  CHECK((w - mrt(f.h.col(0))).norm() < 1e-14);
}

TEST_CASE("build_precoder: ZF spec equals the normalized ZF matrix column") {
  const Fixture f(5, 3);
  const PrecoderSpec spec = parse_precoder("ZF");
  const ComplexMatrix wzf = zf(f.h);
  for (Index k = 0; k < 5; ++k) {
    const ComplexVector w = build_precoder(spec, f.access(spec, k), f.geometry, {});
    CHECK(phase_aligned_error(w, wzf.col(k)) < 1e-10);
  }
}

TEST_CASE("build_precoder: nf_nf uses locations only") {
  Fixture f(5, 4);
  const PrecoderSpec spec = parse_precoder("nf_nf");
  const ComplexVector w = build_precoder(spec, f.access(spec, 2), f.geometry, {});
  // Reading CSI would throw; corrupting it must not change anything.
  f.h.setZero();
  const ComplexVector again = build_precoder(spec, f.access(spec, 2), f.geometry, {});
  CHECK((w - again).norm() == 0.0);

  ComplexMatrix v(64, 4);
  for (Index l = 0, j = 0; l < 5; ++l) {
    if (l != 2) v.col(j++) = near_field_weights(f.geometry, f.positions[static_cast<std::size_t>(l)], range(64));
  }
  const ComplexVector expected = mrt(orthogonalize(near_field_weights(f.geometry, f.positions[2], range(64)), v));
  CHECK((w - expected).norm() < 1e-12);
  CHECK((v.adjoint() * w).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("build_precoder: ZF_nf mixes cluster CSI and out-of-cluster near-field vectors") {
  const Fixture f(4, 5);
  const PrecoderSpec spec = parse_precoder("ZF_nf");
  BuildOptions opts;
  opts.serving_antennas = f.geometry.ap_partition[0];
  opts.serving_antennas.insert(opts.serving_antennas.end(), f.geometry.ap_partition[1].begin(),
                               f.geometry.ap_partition[1].end());
  const std::vector<bool> shared{true, true, false, false};
  const ComplexVector w = build_precoder(spec, f.access(spec, 0, shared), f.geometry, opts);

  const IndexSet& rows = opts.serving_antennas;
  auto sub = [&](Index k) {
    ComplexVector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = f.h(rows[i], k);
    return out;
  };
  ComplexMatrix v(static_cast<Index>(rows.size()), 3);
  v.col(0) = mrt(sub(1));
  v.col(1) = near_field_weights(f.geometry, f.positions[2], rows);
  v.col(2) = near_field_weights(f.geometry, f.positions[3], rows);
  const ComplexVector local = mrt(orthogonalize(mrt(sub(0)), v));
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(std::abs(w(rows[i]) - local(static_cast<Index>(i))) < 1e-12);
  // Antennas outside the serving pair stay silent.
  double outside = 0.0;
  for (Index i = 16; i < 64; ++i) outside += std::norm(w(i));
  CHECK(outside == 0.0);
}

TEST_CASE("build_precoder: CSI of out-of-cluster users is never read") {
  const Fixture f(3, 6);
  const PrecoderSpec rzf_spec = parse_precoder("RZF");
  const std::vector<bool> shared{true, false, true};
  BuildOptions opts;
  opts.rzf_alpha = 1e-6;
  const ComplexVector w = build_precoder(rzf_spec, f.access(rzf_spec, 0, shared), f.geometry, opts);
  ComplexMatrix h2(64, 2);
  h2.col(0) = f.h.col(0);
  h2.col(1) = f.h.col(2);
  CHECK(phase_aligned_error(w, rzf(h2, 1e-6).col(0)) < 1e-10);

  // Direct access to the hidden user's CSI is refused.
  const InformationAccess info = f.access(rzf_spec, 0, shared);
  try {
    info.csi(1, range(64));
    FAIL("expected an access violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Access);
  }
}

TEST_CASE("build_precoder: a grant without unintended locations blocks MRT_nf") {
  const Fixture f(3);
  const PrecoderSpec spec = parse_precoder("MRT_nf");
  const InformationAccess info(f.h, f.positions, requirements(parse_precoder("MRT")), 0, {true, true, true});
  CHECK(code_of([&] { build_precoder(spec, info, f.geometry, {}); }) == ErrorCode::Access);
}

TEST_CASE("build_precoder: distributed scope works per AP and normalizes jointly") {
  const Fixture f(5, 7);
  const PrecoderSpec spec = parse_precoder("DIS_ZF");
  const ComplexVector w = build_precoder(spec, f.access(spec, 1), f.geometry, {});
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Each AP nulls the other users over its own rows.
  for (const auto& ap : f.geometry.ap_partition) {
    for (Index l = 0; l < 5; ++l) {
      if (l == 1) continue;
      cdouble s = 0.0;
      for (Index i : ap) s += std::conj(f.h(i, l)) * w(i);
      CHECK(std::abs(s) < 1e-10 * f.h.col(l).norm());
    }
  }
  // AP 3's block is its own orthogonalized MRT vector, up to the joint scale.
  const IndexSet& ap = f.geometry.ap_partition[3];
  ComplexMatrix hap(8, 5);
  for (std::size_t i = 0; i < 8; ++i) hap.row(static_cast<Index>(i)) = f.h.row(ap[i]);
  const ComplexVector local = orthogonalize(mrt(hap.col(1).eval()), without_column(hap, 1));
  ComplexVector got(8);
  for (std::size_t i = 0; i < 8; ++i) got(static_cast<Index>(i)) = w(ap[i]);
  CHECK(phase_aligned_error(mrt(got), mrt(local)) < 1e-10);
}

TEST_CASE("build_precoder: distributed rank deficiency carries AP context") {
  const Fixture f(10, 8);
  const PrecoderSpec spec = parse_precoder("DIS_MRT_nf");
  try {
    build_precoder(spec, f.access(spec, 0), f.geometry, {});
    FAIL("expected rank deficiency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficiency);
    CHECK(std::string(e.what()).find("AP 0") != std::string::npos);
  }
  BuildOptions opts;
  opts.orthogonalization_alpha = 0.01;
  const PrecoderSpec reg = parse_precoder("DIS_RMRT_nf");
  const ComplexVector w = build_precoder(reg, f.access(reg, 0), f.geometry, opts);
  CHECK(w.allFinite());
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: every built precoder has unit norm") {
  const char* names[] = {"NF", "FF", "MRT", "ZF", "RZF", "nf_nf", "Rnf_nf", "MRT_nf", "RMRT_nf",
                         "ZF_nf", "RZF_nf", "FF_nf", "DIS_ZF", "DIS_RZF", "DIS_MRT_nf",
                         "DIS_RMRT_nf", "DIS_nf_nf"};
  BuildOptions opts;
  opts.rzf_alpha = 1e-6;
  opts.orthogonalization_alpha = 0.01;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Fixture f(5, seed);
    for (const char* n : names) {
      const PrecoderSpec spec = parse_precoder(n);
      for (Index k = 0; k < 5; ++k) {
        const ComplexVector w = build_precoder(spec, f.access(spec, k), f.geometry, opts);
        CHECK(std::abs(w.norm() - 1.0) < 1e-10);
      }
    }
  }
}
