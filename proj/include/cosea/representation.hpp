#pragma once

// Context state spaces, the diagonal operators L_b, comparability unitaries
// between contexts and the induced representation b -> J(b).

#include <cmath>
#include <optional>
#include <vector>

#include "cosea/spectral.hpp"

namespace cosea {

/// The coordinate space of a context: basis vector k stands for the hat
/// state of member k, with the standard inner product.
struct ContextSpace {
  Context context;
  std::size_t dim() const { return context.size(); }
  static Complex inner(const CVector& x, const CVector& y) { return x.dot(y); }
};

inline ContextSpace context_space(const Algebra& E, const Context& A) {
  if (A.size() != E.total_dim()) fail(ErrorCode::invalid_context, "context does not belong to this algebra");
  return {A};
}

/// hat(a_j)(b) for every member a_j of A.
inline RealVector hat_values(const Algebra& E, const Context& A, const Effect& b) {
  check_shape(E, b);
  if (A.size() != E.total_dim()) fail(ErrorCode::invalid_context, "context does not belong to this algebra");
  RealVector v(detail::idx(A.size()));
  for (std::size_t k = 0; k < A.size(); ++k) v(detail::idx(k)) = evaluate(E, pure_state(E, A.rays()[k]), b);
  return v;
}

/// L_b = sum_j hat(a_j)(b) P(hat a_j): diagonal in the context basis.
inline Matrix L_operator(const Algebra& E, const Effect& b, const Context& A) {
  return hat_values(E, A, b).cast<Complex>().asDiagonal();
}

namespace detail {

/// Ray vector placed inside C^{total_dim} at its summand's offset.
inline CVector embedded_vector(const Algebra& E, const Ray& r) {
  CVector v = CVector::Zero(idx(E.total_dim()));
  v.segment(idx(E.offset(r.block)), r.vector.size()) = r.vector;
  return v;
}

inline Matrix frame(const Algebra& E, const Context& A) {
  Matrix v(idx(E.total_dim()), idx(A.size()));
  for (std::size_t k = 0; k < A.size(); ++k) v.col(idx(k)) = embedded_vector(E, A.rays()[k]);
  return v;
}

}  // namespace detail

struct ComparabilityReport {
  double transition = 0.0;  // | |<U_AB a_i, b_j>|^2 - hat(a_i)(b_j) |
  double cocycle = 0.0;     // || U_BC U_AB - U_AC ||
  double identity = 0.0;    // || U_AA - I ||
  double adjoint = 0.0;     // || U_AB - U_BA^* ||
  double overlap = 0.0;     // | |<U_AB a, U_CB c>|^2 - hat(a)(c) |

  double max() const { return std::max({transition, cocycle, identity, adjoint, overlap}); }
};

/// A finite family of contexts with unitaries U[A][B] : H(A) -> H(B).
struct ComparabilityData {
  std::vector<Context> contexts;
  std::vector<std::vector<Matrix>> unitaries;
  std::optional<ComparabilityReport> report;  // filled by validate_comparability
};

/// U_AB with entries <b_j, a_i> of the stored representative vectors.
inline ComparabilityData canonical_unitaries(const Algebra& E, const std::vector<Context>& contexts) {
  ComparabilityData data;
  std::vector<Matrix> frames;
  for (const Context& A : contexts) {
    if (A.size() != E.total_dim()) fail(ErrorCode::invalid_context, "context does not belong to this algebra");
    frames.push_back(detail::frame(E, A));
  }
  data.contexts = contexts;
  data.unitaries.assign(contexts.size(), std::vector<Matrix>(contexts.size()));
  for (std::size_t a = 0; a < contexts.size(); ++a) {
    for (std::size_t b = 0; b < contexts.size(); ++b) data.unitaries[a][b] = frames[b].adjoint() * frames[a];
  }
  return data;
}

/// Computes every comparability residual. Throws IncompleteData if a pair is missing.
inline ComparabilityReport validate_comparability(ComparabilityData& data, const Algebra& E) {
  const std::size_t m = data.contexts.size();
  const auto n = detail::idx(E.total_dim());
  if (data.unitaries.size() != m) fail(ErrorCode::incomplete_data, "missing unitaries for some contexts");
  for (const auto& row : data.unitaries) {
    if (row.size() != m) fail(ErrorCode::incomplete_data, "missing unitaries for some context pairs");
    for (const Matrix& u : row) {
      if (u.rows() != n || u.cols() != n) fail(ErrorCode::incomplete_data, "unitary has the wrong shape");
    }
  }
  // trans[a][b](j, i) = hat(a_i)(b_j)
  std::vector<std::vector<RealMatrix>> trans(m, std::vector<RealMatrix>(m));
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<State> hats;
    for (const Ray& r : data.contexts[a].rays()) hats.push_back(pure_state(E, r));
    for (std::size_t b = 0; b < m; ++b) {
      RealMatrix t(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          t(j, i) = evaluate(E, hats[static_cast<std::size_t>(i)], data.contexts[b].members()[static_cast<std::size_t>(j)]);
        }
      }
      trans[a][b] = std::move(t);
    }
  }
  ComparabilityReport r;
  const auto& U = data.unitaries;
  for (std::size_t a = 0; a < m; ++a) {
    r.identity = std::max(r.identity, (U[a][a] - Matrix::Identity(n, n)).norm());
    for (std::size_t b = 0; b < m; ++b) {
      r.transition = std::max(r.transition, (U[a][b].cwiseAbs2() - trans[a][b]).cwiseAbs().maxCoeff());
      r.adjoint = std::max(r.adjoint, (U[a][b] - U[b][a].adjoint()).norm());
      for (std::size_t c = 0; c < m; ++c) {
        r.cocycle = std::max(r.cocycle, (U[b][c] * U[a][b] - U[a][c]).norm());
        // <U_AB a_i, U_CB c_k> = (U_CB^* U_AB)(k, i)
        const Matrix g = U[c][b].adjoint() * U[a][b];
        r.overlap = std::max(r.overlap, (g.cwiseAbs2() - trans[a][c]).cwiseAbs().maxCoeff());
      }
    }
  }
  data.report = r;
  return r;
}

/// Coefficients hat(b_i)(b) when b is diagonal in B (residual within eq).
inline std::optional<RealVector> representation_in(const Algebra& E, const Effect& b, const Context& B) {
  const RealVector coeffs = hat_values(E, B, b);
  Effect rebuilt = zero(E);
  for (std::size_t k = 0; k < B.size(); ++k) {
    rebuilt = raw::lincomb(E, 1.0, rebuilt, coeffs(detail::idx(k)), B.members()[k]);
  }
  if (distance(E, b, rebuilt) > E.tol().eq) return std::nullopt;
  return coeffs;
}

/// b~ = sum_i lambda_i P(hat b_i) on H(B). Throws NotRepresentable.
inline Matrix tilde(const Algebra& E, const Effect& b, const Context& B) {
  const std::optional<RealVector> c = representation_in(E, b, B);
  if (!c) fail(ErrorCode::not_representable, "effect is not diagonal in this context");
  return c->cast<Complex>().asDiagonal();
}

/// Family with extra contexts appended and canonical unitaries rebuilt.
inline ComparabilityData with_contexts(const Algebra& E, const ComparabilityData& data,
                                       const std::vector<Context>& extra) {
  std::vector<Context> all = data.contexts;
  all.insert(all.end(), extra.begin(), extra.end());
  return canonical_unitaries(E, all);
}

namespace detail {

inline void require_valid(const Algebra& E, ComparabilityData& data) {
  const ComparabilityReport r = data.report ? *data.report : validate_comparability(data, E);
  if (r.max() > E.tol().eq) {
    fail(ErrorCode::comparability_violated, "comparability residual " + std::to_string(r.max()));
  }
}

}  // namespace detail

/// U_BA b~ U_BA^* for every family context B in which b is diagonal.
inline std::vector<Matrix> J_candidates(const Algebra& E, ComparabilityData& data, std::size_t anchor,
                                        const Effect& b) {
  detail::require_valid(E, data);
  if (anchor >= data.contexts.size()) fail(ErrorCode::unknown_name, "anchor context is not in the family");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < data.contexts.size(); ++k) {
    const std::optional<RealVector> c = representation_in(E, b, data.contexts[k]);
    if (!c) continue;
    const Matrix& u = data.unitaries[k][anchor];
    out.push_back(linalg::hermitize(u * c->cast<Complex>().asDiagonal() * u.adjoint()));
  }
  return out;
}

/// J(b) on H(anchor), via the first family context in which b is diagonal.
/// Throws NotRepresentable or ComparabilityViolated.
inline Matrix represent_J(const Algebra& E, ComparabilityData& data, std::size_t anchor, const Effect& b) {
  detail::require_valid(E, data);
  if (anchor >= data.contexts.size()) fail(ErrorCode::unknown_name, "anchor context is not in the family");
  for (std::size_t k = 0; k < data.contexts.size(); ++k) {
    const std::optional<RealVector> c = representation_in(E, b, data.contexts[k]);
    if (!c) continue;
    const Matrix& u = data.unitaries[k][anchor];
    return linalg::hermitize(u * c->cast<Complex>().asDiagonal() * u.adjoint());
  }
  fail(ErrorCode::not_representable, "effect is not diagonal in any context of the family");
}

struct TransportedProduct {
  Matrix transported;  // J(a o b)
  Matrix standard;     // J(a)^{1/2} J(b) J(a)^{1/2}
  double residual = 0.0;
};

inline TransportedProduct transported_product(const Algebra& E, ComparabilityData& data, std::size_t anchor,
                                              const Effect& a, const Effect& b) {
  TransportedProduct t;
  t.transported = represent_J(E, data, anchor, seq(E, a, b));
  const Matrix ja = represent_J(E, data, anchor, a);
  const Matrix jb = represent_J(E, data, anchor, b);
  const Matrix r = linalg::psd_sqrt(ja);
  t.standard = linalg::hermitize(r * jb * r);
  t.residual = (t.transported - t.standard).norm();
  return t;
}

}  // namespace cosea
