#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ssglm/types.hpp"

namespace ssglm {

// Disjoint cover of coordinates 0..p-1 into non-empty groups.
class GroupPartition {
 public:
  static GroupPartition from_groups(std::vector<std::vector<int>> groups, int p);
  // consecutive groups of the given sizes
  static GroupPartition contiguous(const std::vector<int>& sizes);

  int p() const { return p_; }
  int group_count() const { return static_cast<int>(offsets_.size()) - 1; }
  std::span<const int> group(int g) const {
    return {members_.data() + offsets_[g], static_cast<std::size_t>(offsets_[g + 1] - offsets_[g])};
  }
  int group_size(int g) const { return offsets_[g + 1] - offsets_[g]; }
  int group_of(int coord) const { return group_of_[coord]; }
  // sqrt(|G_g|), the group weight
  double weight(int g) const { return weights_[g]; }

 private:
  int p_ = 0;
  std::vector<int> members_;   // group members, groups back to back
  std::vector<int> offsets_;   // group g occupies members_[offsets_[g]..offsets_[g+1])
  std::vector<int> group_of_;  // coordinate -> group index
  std::vector<double> weights_;
};

// Which weakly decomposable norm a penalty uses: plain l1 or the weighted
// group lasso sum_g sqrt(|G_g|) ||beta_G||_2. `weak_kind` selects the norm
// used in nodewise contexts; it may never be stronger than `kind`.
class NormSpec {
 public:
  enum class Kind { L1, WeightedGroupLasso };

  static NormSpec l1(int p);
  static NormSpec weighted_group_lasso(GroupPartition partition);

  NormSpec with_weak_kind(Kind weak) const;

  Kind kind() const { return kind_; }
  Kind weak_kind() const { return weak_kind_; }
  int p() const { return p_; }
  const GroupPartition& partition() const;

 private:
  Kind kind_ = Kind::L1;
  Kind weak_kind_ = Kind::L1;
  int p_ = 0;
  std::optional<GroupPartition> partition_;
};

// Subset of coordinates for which the norm decomposes. For the group lasso
// every member group must be fully inside or fully outside.
struct AllowedSet {
  std::vector<int> indices;  // 0-based, strictly increasing
};

double norm_value(const NormSpec& spec, std::span<const double> beta);
double dual_norm_value(const NormSpec& spec, std::span<const double> omega);

// argmin_u 0.5||u-v||^2 + t*Omega(u)
Vector prox(const NormSpec& spec, std::span<const double> v, double t);
void prox_inplace(const NormSpec& spec, std::span<double> v, double t);

// Omega(beta) - [Omega(beta_S) + Omega^{Sc}(beta_{Sc})]; zero for the
// decomposable norms implemented here whenever S is allowed.
double decomposition_gap(const NormSpec& spec, std::span<const double> beta, const AllowedSet& s);

// The weak norm (and its dual) selected by spec.weak_kind().
double weak_norm_value(const NormSpec& spec, std::span<const double> beta);
double weak_dual_norm_value(const NormSpec& spec, std::span<const double> omega);

}  // namespace ssglm
