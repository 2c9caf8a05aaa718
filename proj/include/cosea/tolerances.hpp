#pragma once

#include <string>
#include <string_view>

#include "cosea/errors.hpp"

namespace cosea {

/// Numerical thresholds shared by every operation.
///
/// `eq` bounds effect equality (max-abs for classical payloads, Frobenius for
/// matrices), `psd` is the eigenvalue floor used by the order, `cluster` is the
/// gap that separates distinct eigenvalues and `rank` is the singular-value
/// cutoff for kernels.
struct Tolerances {
  double eq = 1e-9;
  double psd = 1e-9;
  double cluster = 1e-7;
  double rank = 1e-10;

  void validate() const {
    if (!(eq > 0) || !(psd > 0) || !(cluster > 0) || !(rank > 0)) {
      fail(ErrorCode::invalid_tolerance, "all tolerances must be strictly positive");
    }
    if (!(cluster > eq)) {
      fail(ErrorCode::invalid_tolerance, "cluster gap must exceed the equality tolerance");
    }
  }

  /// Sets a tolerance by its short name (eq, psd, cluster, rank).
  void set(std::string_view name, double value) {
    if (name == "eq") {
      eq = value;
    } else if (name == "psd") {
      psd = value;
    } else if (name == "cluster") {
      cluster = value;
    } else if (name == "rank") {
      rank = value;
    } else {
      fail(ErrorCode::invalid_tolerance, "unknown tolerance '" + std::string(name) + "'");
    }
  }

  bool operator==(const Tolerances&) const = default;
};

}  // namespace cosea
