#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/types.hpp"

namespace gsr {

/// Partition of the coordinates {0..p-1} into m nonempty disjoint groups.
/// Index sets need not be contiguous. Immutable after construction.
class GroupStructure {
 public:
  GroupStructure() = default;
  /// Throws std::invalid_argument unless `groups` partitions {0..p-1}.
  GroupStructure(Index p, std::vector<IndexList> groups);

  /// Consecutive blocks of size d = ceil(p/m); the last block may be shorter.
  static GroupStructure contiguous(Index p, Index m);
  static GroupStructure from_sizes(const std::vector<Index>& sizes);

  Index num_groups() const { return static_cast<Index>(groups_.size()); }
  Index dim() const { return p_; }
  const IndexList& group(Index i) const { return groups_[i]; }
  const std::vector<IndexList>& groups() const { return groups_; }
  Index group_of(Index coord) const { return owner_[coord]; }
  Index group_size(Index i) const { return static_cast<Index>(groups_[i].size()); }

  Vec gather(const Vec& x, Index i) const;
  void scatter(Vec& x, Index i, const Vec& values) const;
  /// Concatenated coordinates of the listed groups, in list order.
  IndexList columns_of(const IndexList& group_ids) const;

  /// {"p": int, "groups": [[int,...],...]} with 1-based coordinates.
  nlohmann::json to_json() const;
  static GroupStructure from_json(const nlohmann::json& j);

  friend bool operator==(const GroupStructure& a, const GroupStructure& b) {
    return a.p_ == b.p_ && a.groups_ == b.groups_;
  }

 private:
  Index p_ = 0;
  std::vector<IndexList> groups_;
  IndexList owner_;
};

/// The l_inf ball {x : ||x||_inf <= R}.
struct BoxConstraint {
  double radius = 1.0;

  BoxConstraint() = default;
  /// Throws std::invalid_argument for negative or non-finite radius.
  explicit BoxConstraint(double r);
};

/// G(x): Euclidean norm of every group.
Vec group_norms(const Vec& x, const GroupStructure& g);

/// sum_i w_i ||x_{J_i}||, unit weights when omitted.
double l21_norm(const Vec& x, const GroupStructure& g);
double l21_norm(const Vec& x, const GroupStructure& g, const Vec& weights);

inline constexpr double kApproxZeroTol = 1e-6;

/// Number of groups whose norm strictly exceeds tol.
std::size_t approx_group_zero_norm(const Vec& x, const GroupStructure& g,
                                   double tol = kApproxZeroTol);
/// Number of groups with a nonzero entry.
std::size_t group_zero_norm(const Vec& x, const GroupStructure& g);

/// <e - w, G(x)> for w in [0,1]^m.
double equilibrium_residual(const Vec& x, const Vec& w, const GroupStructure& g);

Vec project_box(const Vec& x, const BoxConstraint& box);

}  // namespace gsr
