#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cosea/errors.hpp"
#include "cosea/linalg.hpp"
#include "cosea/tolerances.hpp"

namespace cosea {

enum class Backend { classical, hilbertian };

inline const char* to_string(Backend b) { return b == Backend::classical ? "classical" : "hilbertian"; }

/// One irreducible piece of an algebra: fuzzy events on n outcomes, or the
/// effects of C^d (optionally restricted to the algebra spanned by
/// `generators`).
struct Summand {
  Backend backend = Backend::hilbertian;
  std::size_t dim = 1;
  std::vector<Matrix> generators;

  bool full() const { return backend == Backend::classical || generators.empty(); }

  bool operator==(const Summand& o) const {
    if (backend != o.backend || dim != o.dim || generators.size() != o.generators.size()) return false;
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (generators[i] != o.generators[i]) return false;
    }
    return true;
  }
};

/// A finite-dimensional convex sequential effect algebra: a direct sum of
/// one or more summands. Nested direct sums are flattened on construction.
class Algebra {
 public:
  static Algebra classical(std::size_t n, Tolerances tol = {}) {
    if (n < 1) fail(ErrorCode::validation_error, "classical algebra needs n >= 1");
    return Algebra({Summand{Backend::classical, n, {}}}, tol);
  }

  static Algebra hilbertian(std::size_t d, std::vector<Matrix> generators = {}, Tolerances tol = {}) {
    if (d < 1) fail(ErrorCode::validation_error, "hilbertian algebra needs d >= 1");
    tol.validate();
    for (std::size_t i = 0; i < generators.size(); ++i) {
      Matrix& g = generators[i];
      const auto n = static_cast<Eigen::Index>(d);
      if (g.rows() != n || g.cols() != n) {
        fail(ErrorCode::validation_error, "generator " + std::to_string(i) + " has the wrong shape");
      }
      if ((g - g.adjoint()).norm() > tol.eq) {
        fail(ErrorCode::not_hermitian, "generator " + std::to_string(i) + " is not Hermitian");
      }
      g = linalg::hermitize(g);
      const RealVector ev = linalg::eigenvalues(g);
      if (ev.minCoeff() < -tol.psd || ev.maxCoeff() > 1.0 + tol.psd) {
        fail(ErrorCode::out_of_interval, "generator " + std::to_string(i) + " is not an effect");
      }
    }
    return Algebra({Summand{Backend::hilbertian, d, std::move(generators)}}, tol);
  }

  /// Direct sum of at least two parts; tolerances are taken from the first part.
  static Algebra direct_sum(const std::vector<Algebra>& parts) {
    if (parts.size() < 2) fail(ErrorCode::arity_mismatch, "a direct sum needs at least two parts");
    std::vector<Summand> flat;
    for (const Algebra& p : parts) flat.insert(flat.end(), p.summands_.begin(), p.summands_.end());
    return Algebra(std::move(flat), parts.front().tol_);
  }

  /// Builds an algebra straight from summands (one summand is not a sum).
  static Algebra from_summands(std::vector<Summand> s, Tolerances tol = {}) {
    if (s.empty()) fail(ErrorCode::arity_mismatch, "an algebra needs at least one summand");
    return Algebra(std::move(s), tol);
  }

  std::span<const Summand> summands() const { return summands_; }
  const Summand& summand(std::size_t i) const { return summands_.at(i); }
  std::size_t arity() const { return summands_.size(); }
  bool is_direct_sum() const { return summands_.size() > 1; }

  /// Cardinality of every context (sum of summand dimensions).
  std::size_t total_dim() const {
    std::size_t n = 0;
    for (const Summand& s : summands_) n += s.dim;
    return n;
  }

  /// Position of summand `i` in the block-diagonal embedding.
  std::size_t offset(std::size_t i) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < i; ++k) n += summands_[k].dim;
    return n;
  }

  bool is_classical() const { return !is_direct_sum() && summands_[0].backend == Backend::classical; }
  bool is_hilbertian() const { return !is_direct_sum() && summands_[0].backend == Backend::hilbertian; }

  const Tolerances& tol() const { return tol_; }

  Algebra with_tolerances(Tolerances tol) const {
    tol.validate();
    Algebra a = *this;
    a.tol_ = tol;
    return a;
  }

  /// Short label such as "C3", "H2" or "H2+C1+H3".
  std::string describe() const {
    std::string out;
    for (std::size_t i = 0; i < summands_.size(); ++i) {
      if (i) out += "+";
      const Summand& s = summands_[i];
      out += (s.backend == Backend::classical ? "C" : "H") + std::to_string(s.dim);
      if (!s.full()) out += "[" + std::to_string(s.generators.size()) + " gen]";
    }
    return out;
  }

  /// Structural equality; tolerances are not part of the identity.
  bool operator==(const Algebra& o) const { return summands_ == o.summands_; }

 private:
  Algebra(std::vector<Summand> s, Tolerances tol) : summands_(std::move(s)), tol_(tol) { tol_.validate(); }

  std::vector<Summand> summands_;
  Tolerances tol_;
};

/// Payload of one summand: a real vector (classical) or a Hermitian matrix.
using Component = std::variant<RealVector, Matrix>;

/// An element of an algebra: one payload per summand. Values produced by the
/// validated constructors and operations lie in the unit interval; raw
/// arithmetic (namespace `raw`) may leave it.
class Effect {
 public:
  Effect() = default;
  explicit Effect(std::vector<Component> components, double clamped = 0.0)
      : components_(std::move(components)), clamped_(clamped) {}

  const std::vector<Component>& components() const { return components_; }
  const Component& operator[](std::size_t i) const { return components_.at(i); }
  Component& operator[](std::size_t i) { return components_.at(i); }
  std::size_t arity() const { return components_.size(); }

  const RealVector& vec(std::size_t i = 0) const { return std::get<RealVector>(components_.at(i)); }
  const Matrix& mat(std::size_t i = 0) const { return std::get<Matrix>(components_.at(i)); }

  /// Largest eigenvalue (or entry) displacement applied when this value was
  /// clamped into the unit interval.
  double clamped() const { return clamped_; }
  void record_clamp(double amount) { clamped_ = std::max(clamped_, amount); }

 private:
  std::vector<Component> components_;
  double clamped_ = 0.0;
};

/// A unit vector inside one summand; classical rays are basis vectors.
struct Ray {
  std::size_t block = 0;
  CVector vector;
};

}  // namespace cosea
