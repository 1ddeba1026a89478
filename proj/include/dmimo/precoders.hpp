#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmimo/geometry.hpp"
#include "dmimo/precoding.hpp"
#include "dmimo/types.hpp"

namespace dmimo {

/// Far-field (delay-and-sum) weights exp(-j 2 pi d_i sin(theta) / lambda) over
/// `subset`, with d_i the distance from antenna i to `reference`. Unit norm.
ComplexVector far_field_weights(const ArrayGeometry& geometry, double theta, Index reference,
                                const IndexSet& subset);
ComplexVector far_field_weights(const ArrayGeometry& geometry, double theta, Index reference);

/// Near-field (beamfocusing) weights exp(-j 2 pi d_i / lambda) over `subset`,
/// with d_i the distance from antenna i to the UE. Unit norm.
ComplexVector near_field_weights(const ArrayGeometry& geometry, const Point3& ue_position,
                                 const IndexSet& subset);

/// Steering angle of `ue_position` relative to the broadside of the linear
/// array formed by `subset`, in the sign convention of far_field_weights with
/// the first antenna of the subset as reference.
double broadside_angle(const ArrayGeometry& geometry, const IndexSet& subset,
                       const Point3& ue_position);

enum class BaseVector { FarField, NearField, Mrt };

/// Source of the vectors that span the suppression subspace. Hybrid uses CSI
/// for users whose CSI is shared with the serving processor and near-field
/// vectors for everyone else.
enum class Suppression { None, Csi, NearField, Hybrid };

enum class Scope { Centralized, DistributedPerAp };

struct Regularization {
  bool enabled = false;
  /// Explicit alpha. When unset the scenario supplies a default.
  std::optional<double> alpha;
};

/// Declarative description of one precoding algorithm. Names follow the
/// a_b convention (base a orthogonalized against vectors of type b) with
/// optional "DIS_" and "R" prefixes, e.g. "DIS_RMRT_nf", "ZF_nf", "nf_nf".
struct PrecoderSpec {
  std::string name;
  BaseVector base = BaseVector::Mrt;
  Suppression suppression = Suppression::None;
  Regularization regularization;
  Scope scope = Scope::Centralized;
};

PrecoderSpec parse_precoder(std::string_view name);

/// Information a precoder consumes (the columns of the requirements table).
struct InformationRequirements {
  bool intended_location = false;
  bool intended_csi = false;
  bool unintended_location = false;
  bool unintended_csi = false;

  bool satisfied_by(const InformationRequirements& granted) const;
  bool operator==(const InformationRequirements&) const = default;
};

InformationRequirements requirements(const PrecoderSpec& spec);

/// The view of CSI and UE locations handed to a precoder for one intended
/// user. Every read is checked against the grant, so a precoder cannot use
/// information it was not given.
class InformationAccess {
 public:
  /// `csi_shared[l]` tells whether the serving processor holds CSI of user l
  /// (all users under full coordination, co-cluster users under clustering).
  InformationAccess(const ChannelMatrix& csi, const std::vector<Point3>& locations,
                    InformationRequirements granted, Index intended_user,
                    std::vector<bool> csi_shared);

  Index user_count() const { return static_cast<Index>(locations_->size()); }
  Index intended_user() const { return intended_; }
  bool csi_shared(Index user) const;

  /// Rows `rows` of the channel estimate towards `user`.
  ComplexVector csi(Index user, const IndexSet& rows) const;
  const Point3& location(Index user) const;

 private:
  const ChannelMatrix* csi_;
  const std::vector<Point3>* locations_;
  InformationRequirements granted_;
  Index intended_;
  std::vector<bool> csi_shared_;
};

struct BuildOptions {
  /// Antennas that may transmit to the intended user; empty means all.
  IndexSet serving_antennas;
  /// Default alpha for the regularized zero-forcing matrix inverse.
  double rzf_alpha = 0.0;
  /// Default alpha for regularized orthogonalization (unit-norm columns).
  double orthogonalization_alpha = 0.0;
};

/// Assembles the unit-norm precoding vector (length M) for the intended user
/// of `info`. Antennas outside the serving set get zero weight. Under
/// DistributedPerAp each AP works on its own rows only; the per-AP vectors
/// are concatenated and normalized jointly.
ComplexVector build_precoder(const PrecoderSpec& spec, const InformationAccess& info,
                             const ArrayGeometry& geometry, const BuildOptions& options);

}  // namespace dmimo
