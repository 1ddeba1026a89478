#include "dmimo/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

namespace {

const Point3& antenna(const ArrayGeometry& g, Index i) {
  if (i < 0 || i >= g.antenna_count()) {
    fail(ErrorCode::Domain, "antenna index " + std::to_string(i) + " out of range");
  }
  return g.antenna_positions[static_cast<std::size_t>(i)];
}

IndexSet all_antennas(const ArrayGeometry& g) {
  IndexSet out(static_cast<std::size_t>(g.antenna_count()));
  for (Index i = 0; i < g.antenna_count(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

ComplexVector far_field_weights(const ArrayGeometry& geometry, double theta, Index reference,
                                const IndexSet& subset) {
  if (!(std::abs(theta) < kPi / 2)) fail(ErrorCode::Domain, "steering angle must satisfy |theta| < pi/2");
  if (!(geometry.wavelength > 0)) fail(ErrorCode::Domain, "wavelength must be positive");
  const Point3& ref = antenna(geometry, reference);
  const double s = std::sin(theta);
  ComplexVector w(static_cast<Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const double d = (antenna(geometry, subset[i]) - ref).norm();
    w(static_cast<Index>(i)) = std::polar(1.0, -kTwoPi * d * s / geometry.wavelength);
  }
  return mrt(w);
}

ComplexVector far_field_weights(const ArrayGeometry& geometry, double theta, Index reference) {
  return far_field_weights(geometry, theta, reference, all_antennas(geometry));
}

ComplexVector near_field_weights(const ArrayGeometry& geometry, const Point3& ue_position,
                                 const IndexSet& subset) {
  if (!(geometry.wavelength > 0)) fail(ErrorCode::Domain, "wavelength must be positive");
  ComplexVector w(static_cast<Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const double d = (antenna(geometry, subset[i]) - ue_position).norm();
    if (!(d > 0)) {
      fail(ErrorCode::Singularity, "UE coincides with antenna " + std::to_string(subset[i]));
    }
    w(static_cast<Index>(i)) = std::polar(1.0, -kTwoPi * d / geometry.wavelength);
  }
  return mrt(w);
}

double broadside_angle(const ArrayGeometry& geometry, const IndexSet& subset,
                       const Point3& ue_position) {
  if (subset.size() < 2) return 0.0;
  const Point3& first = antenna(geometry, subset.front());
  const Point3 axis = (antenna(geometry, subset.back()) - first).normalized();
  const Point3 to_ue = ue_position - first;
  if (!(to_ue.norm() > 0)) fail(ErrorCode::Singularity, "UE coincides with reference antenna");
  // Path length to antenna i shrinks by s_i * cos(angle to axis); the weight
  // convention exp(-j 2 pi s_i sin(theta) / lambda) absorbs it with a minus sign.
  constexpr double kEdge = 1.0 - 1e-12;
  const double s = std::clamp(-to_ue.normalized().dot(axis), -kEdge, kEdge);
  return std::asin(s);
}

// ---------------------------------------------------------------------------
// Spec parsing and information requirements.

PrecoderSpec parse_precoder(std::string_view name) {
  PrecoderSpec spec;
  spec.name = std::string(name);
  std::string_view rest = name;
  auto bad = [&](const std::string& why) -> PrecoderSpec {
    fail(ErrorCode::Config, "unknown precoder '" + std::string(name) + "': " + why);
  };

  if (rest.starts_with("DIS_")) {
    spec.scope = Scope::DistributedPerAp;
    rest.remove_prefix(4);
  }
  std::string_view base = rest;
  std::string_view supp;
  if (const auto us = rest.find('_'); us != std::string_view::npos) {
    base = rest.substr(0, us);
    supp = rest.substr(us + 1);
    if (supp.empty()) return bad("empty suppression type");
  }
  // ZF / RZF are MRT orthogonalized against CSI.
  if (base == "ZF" || base == "RZF") {
    spec.regularization.enabled = base == "RZF";
    spec.base = BaseVector::Mrt;
    if (supp.empty() || supp == "csi") {
      spec.suppression = Suppression::Csi;
    } else if (supp == "nf") {
      spec.suppression = Suppression::Hybrid;
    } else {
      return bad("ZF variants combine only with _nf");
    }
    return spec;
  }
  if (base.size() > 1 && base.front() == 'R' && !supp.empty()) {
    spec.regularization.enabled = true;
    base.remove_prefix(1);
  }
  if (base == "MRT") {
    spec.base = BaseVector::Mrt;
  } else if (base == "nf" || base == "NF") {
    spec.base = BaseVector::NearField;
  } else if (base == "FF" || base == "ff") {
    spec.base = BaseVector::FarField;
  } else {
    return bad("unknown base vector '" + std::string(base) + "'");
  }
  if (supp.empty()) {
    spec.suppression = Suppression::None;
  } else if (supp == "nf") {
    spec.suppression = Suppression::NearField;
  } else if (supp == "csi") {
    spec.suppression = Suppression::Csi;
  } else {
    return bad("unknown suppression type '" + std::string(supp) + "'");
  }
  return spec;
}

bool InformationRequirements::satisfied_by(const InformationRequirements& g) const {
  return (!intended_location || g.intended_location) && (!intended_csi || g.intended_csi) &&
         (!unintended_location || g.unintended_location) &&
         (!unintended_csi || g.unintended_csi);
}

InformationRequirements requirements(const PrecoderSpec& spec) {
  InformationRequirements r;
  r.intended_csi = spec.base == BaseVector::Mrt;
  r.intended_location = !r.intended_csi;
  r.unintended_csi = spec.suppression == Suppression::Csi || spec.suppression == Suppression::Hybrid;
  r.unintended_location =
      spec.suppression == Suppression::NearField || spec.suppression == Suppression::Hybrid;
  return r;
}

// ---------------------------------------------------------------------------

InformationAccess::InformationAccess(const ChannelMatrix& csi, const std::vector<Point3>& locations,
                                     InformationRequirements granted, Index intended_user,
                                     std::vector<bool> csi_shared)
    : csi_(&csi),
      locations_(&locations),
      granted_(granted),
      intended_(intended_user),
      csi_shared_(std::move(csi_shared)) {
  if (intended_ < 0 || intended_ >= user_count()) fail(ErrorCode::Domain, "intended user out of range");
  if (static_cast<Index>(csi_shared_.size()) != user_count()) {
    fail(ErrorCode::Domain, "csi_shared must have one entry per user");
  }
}

bool InformationAccess::csi_shared(Index user) const {
  return csi_shared_.at(static_cast<std::size_t>(user));
}

ComplexVector InformationAccess::csi(Index user, const IndexSet& rows) const {
  const bool granted = user == intended_ ? granted_.intended_csi : granted_.unintended_csi;
  if (!granted || !csi_shared(user)) {
    fail(ErrorCode::Access, "CSI of user " + std::to_string(user) + " not available to precoder for user " +
                                std::to_string(intended_));
  }
  ComplexVector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = (*csi_)(rows[i], user);
  return out;
}

const Point3& InformationAccess::location(Index user) const {
  const bool granted = user == intended_ ? granted_.intended_location : granted_.unintended_location;
  if (!granted) {
    fail(ErrorCode::Access, "location of user " + std::to_string(user) +
                                " not available to precoder for user " + std::to_string(intended_));
  }
  return locations_->at(static_cast<std::size_t>(user));
}

// ---------------------------------------------------------------------------

namespace {

// Far-field steering over a row set spanning one or more APs: each AP is a
// linear array steered on its own, blocks concatenated and normalized.
ComplexVector far_field_base(const ArrayGeometry& g, const IndexSet& rows, const Point3& ue) {
  ComplexVector w = ComplexVector::Zero(static_cast<Index>(rows.size()));
  for (const auto& ap : g.ap_partition) {
    IndexSet members;
    std::vector<Index> slots;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::find(ap.begin(), ap.end(), rows[i]) != ap.end()) {
        members.push_back(rows[i]);
        slots.push_back(static_cast<Index>(i));
      }
    }
    if (members.empty()) continue;
    const double theta = broadside_angle(g, members, ue);
    const ComplexVector block = far_field_weights(g, theta, members.front(), members);
    for (std::size_t i = 0; i < slots.size(); ++i) w(slots[i]) = block(static_cast<Index>(i));
  }
  return mrt(w);
}

ComplexVector base_vector(const PrecoderSpec& spec, const InformationAccess& info,
                          const ArrayGeometry& g, const IndexSet& rows) {
  const Index k = info.intended_user();
  switch (spec.base) {
    case BaseVector::Mrt:
      return mrt(info.csi(k, rows));
    case BaseVector::NearField:
      return near_field_weights(g, info.location(k), rows);
    case BaseVector::FarField:
      return far_field_base(g, rows, info.location(k));
  }
  return {};
}

// Columns spanning the interference subspace for the intended user.
ComplexMatrix suppression_subspace(const PrecoderSpec& spec, const InformationAccess& info,
                                   const ArrayGeometry& g, const IndexSet& rows) {
  const Index k = info.intended_user();
  std::vector<ComplexVector> cols;
  for (Index l = 0; l < info.user_count(); ++l) {
    if (l == k) continue;
    switch (spec.suppression) {
      case Suppression::None:
        break;
      case Suppression::Csi:
        if (info.csi_shared(l)) cols.push_back(info.csi(l, rows));
        break;
      case Suppression::NearField:
        cols.push_back(near_field_weights(g, info.location(l), rows));
        break;
      case Suppression::Hybrid:
        if (info.csi_shared(l)) {
          cols.push_back(mrt(info.csi(l, rows)));
        } else {
          cols.push_back(near_field_weights(g, info.location(l), rows));
        }
        break;
    }
  }
  ComplexMatrix v(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) v.col(static_cast<Index>(c)) = cols[c];
  return v;
}

// Regularized zero-forcing through the matrix inverse. The direction is the
// intended user's RZF column; its length is the fraction of the MRT gain it
// keeps, which for alpha = 0 equals the norm of the orthogonalized MRT vector.
ComplexVector rzf_block(const InformationAccess& info, const IndexSet& rows, double alpha) {
  const Index k = info.intended_user();
  std::vector<Index> users{k};
  for (Index l = 0; l < info.user_count(); ++l) {
    if (l != k && info.csi_shared(l)) users.push_back(l);
  }
  ComplexMatrix h(static_cast<Index>(rows.size()), static_cast<Index>(users.size()));
  for (std::size_t c = 0; c < users.size(); ++c) h.col(static_cast<Index>(c)) = info.csi(users[c], rows);
  const ComplexVector u = mrt(rzf_unnormalized(h, alpha).col(0));
  const ComplexVector& hk = h.col(0);
  return u * (std::abs(hk.dot(u)) / hk.norm());
}

ComplexVector build_block(const PrecoderSpec& spec, const InformationAccess& info,
                          const ArrayGeometry& g, const IndexSet& rows,
                          const BuildOptions& options) {
  const bool regularized = spec.regularization.enabled;
  if (spec.suppression == Suppression::Csi && regularized) {
    return rzf_block(info, rows, spec.regularization.alpha.value_or(options.rzf_alpha));
  }
  const ComplexVector w = base_vector(spec, info, g, rows);
  if (spec.suppression == Suppression::None) return w;
  const ComplexMatrix v = suppression_subspace(spec, info, g, rows);
  if (regularized) {
    return orthogonalize_regularized(
        w, v, spec.regularization.alpha.value_or(options.orthogonalization_alpha));
  }
  return orthogonalize(w, v);
}

}  // namespace

ComplexVector build_precoder(const PrecoderSpec& spec, const InformationAccess& info,
                             const ArrayGeometry& geometry, const BuildOptions& options) {
  const IndexSet serving =
      options.serving_antennas.empty() ? all_antennas(geometry) : options.serving_antennas;

  std::vector<std::pair<Index, IndexSet>> blocks;  // (AP index or -1, rows)
  if (spec.scope == Scope::Centralized) {
    blocks.emplace_back(-1, serving);
  } else {
    for (Index a = 0; a < geometry.ap_count(); ++a) {
      IndexSet rows;
      for (Index i : geometry.ap_partition[static_cast<std::size_t>(a)]) {
        if (std::find(serving.begin(), serving.end(), i) != serving.end()) rows.push_back(i);
      }
      if (!rows.empty()) blocks.emplace_back(a, std::move(rows));
    }
  }

  ComplexVector w = ComplexVector::Zero(geometry.antenna_count());
  for (const auto& [ap, rows] : blocks) {
    ComplexVector part;
    try {
      part = build_block(spec, info, geometry, rows, options);
    } catch (const Error& e) {
      std::string where = spec.name + " for user " + std::to_string(info.intended_user());
      if (ap >= 0) where += " at AP " + std::to_string(ap);
      throw Error(e.code(), where + ": " + e.what());
    }
    for (std::size_t i = 0; i < rows.size(); ++i) w(rows[i]) = part(static_cast<Index>(i));
  }
  const double n = w.norm();
  if (!(n > 0)) {
    fail(ErrorCode::FullySuppressed,
         spec.name + " for user " + std::to_string(info.intended_user()) + ": zero precoding vector");
  }
  return w / n;
}

}  // namespace dmimo
