#include "ssglm/norms.hpp"

#include <algorithm>
#include <cmath>

namespace ssglm {

namespace {

void check_len(const NormSpec& spec, std::size_t len, const char* who) {
  if (len != static_cast<std::size_t>(spec.p()))
    throw InputError(std::string(who) + ": vector length does not match norm dimension");
}

double group_l2(const GroupPartition& part, int g, std::span<const double> v) {
  double ss = 0.0;
  for (int idx : part.group(g)) ss += v[idx] * v[idx];
  return std::sqrt(ss);
}

}  // namespace

GroupPartition GroupPartition::from_groups(std::vector<std::vector<int>> groups, int p) {
  if (p <= 0) throw InputError("GroupPartition: p must be positive");
  GroupPartition part;
  part.p_ = p;
  part.group_of_.assign(p, -1);
  part.offsets_.push_back(0);
  int g = 0;
  for (auto& grp : groups) {
    if (grp.empty()) throw InputError("GroupPartition: empty group");
    for (int idx : grp) {
      if (idx < 0 || idx >= p) throw InputError("GroupPartition: coordinate out of range");
      if (part.group_of_[idx] != -1) throw InputError("GroupPartition: groups overlap");
      part.group_of_[idx] = g;
      part.members_.push_back(idx);
    }
    part.offsets_.push_back(static_cast<int>(part.members_.size()));
    part.weights_.push_back(std::sqrt(static_cast<double>(grp.size())));
    ++g;
  }
  if (static_cast<int>(part.members_.size()) != p)
    throw InputError("GroupPartition: groups do not cover all coordinates");
  return part;
}

GroupPartition GroupPartition::contiguous(const std::vector<int>& sizes) {
  std::vector<std::vector<int>> groups;
  int at = 0;
  for (int sz : sizes) {
    std::vector<int> grp(sz);
    for (int k = 0; k < sz; ++k) grp[k] = at + k;
    at += sz;
    groups.push_back(std::move(grp));
  }
  return from_groups(std::move(groups), at);
}

NormSpec NormSpec::l1(int p) {
  if (p <= 0) throw InputError("NormSpec::l1: p must be positive");
  NormSpec spec;
  spec.kind_ = Kind::L1;
  spec.weak_kind_ = Kind::L1;
  spec.p_ = p;
  return spec;
}

NormSpec NormSpec::weighted_group_lasso(GroupPartition partition) {
  NormSpec spec;
  spec.kind_ = Kind::WeightedGroupLasso;
  spec.weak_kind_ = Kind::L1;
  spec.p_ = partition.p();
  spec.partition_ = std::move(partition);
  return spec;
}

NormSpec NormSpec::with_weak_kind(Kind weak) const {
  // l1 <= weak <= main: the only non-default choice is the group norm itself
  if (weak == Kind::WeightedGroupLasso && kind_ != Kind::WeightedGroupLasso)
    throw InputError("NormSpec: weak norm may not be stronger than the penalty norm");
  NormSpec spec = *this;
  spec.weak_kind_ = weak;
  return spec;
}

const GroupPartition& NormSpec::partition() const {
  if (!partition_) throw InputError("NormSpec: no group partition (l1 norm)");
  return *partition_;
}

double norm_value(const NormSpec& spec, std::span<const double> beta) {
  check_len(spec, beta.size(), "norm_value");
  if (spec.kind() == NormSpec::Kind::L1) {
    double acc = 0.0;
    for (double x : beta) acc += std::fabs(x);
    return acc;
  }
  const GroupPartition& part = spec.partition();
  double acc = 0.0;
  for (int g = 0; g < part.group_count(); ++g) acc += part.weight(g) * group_l2(part, g, beta);
  return acc;
}

double dual_norm_value(const NormSpec& spec, std::span<const double> omega) {
  check_len(spec, omega.size(), "dual_norm_value");
  if (spec.kind() == NormSpec::Kind::L1) {
    double m = 0.0;
    for (double x : omega) m = std::max(m, std::fabs(x));
    return m;
  }
  const GroupPartition& part = spec.partition();
  double m = 0.0;
  for (int g = 0; g < part.group_count(); ++g)
    m = std::max(m, group_l2(part, g, omega) / part.weight(g));
  return m;
}

void prox_inplace(const NormSpec& spec, std::span<double> v, double t) {
  check_len(spec, v.size(), "prox");
  if (t < 0.0) throw InputError("prox: t must be nonnegative");
  if (t == 0.0) return;
  if (spec.kind() == NormSpec::Kind::L1) {
    for (double& x : v) {
      if (x > t)
        x -= t;
      else if (x < -t)
        x += t;
      else
        x = 0.0;
    }
    return;
  }
  const GroupPartition& part = spec.partition();
  for (int g = 0; g < part.group_count(); ++g) {
    const double nrm = group_l2(part, g, v);
    const double thr = t * part.weight(g);
    // shrink factor 0 when the block norm vanishes (avoids 0/0)
    const double factor = nrm > thr ? 1.0 - thr / nrm : 0.0;
    for (int idx : part.group(g)) v[idx] *= factor;
  }
}

Vector prox(const NormSpec& spec, std::span<const double> v, double t) {
  Vector out(v.begin(), v.end());
  prox_inplace(spec, out, t);
  return out;
}

double decomposition_gap(const NormSpec& spec, std::span<const double> beta, const AllowedSet& s) {
  check_len(spec, beta.size(), "decomposition_gap");
  std::vector<char> in_s(spec.p(), 0);
  for (int idx : s.indices) {
    if (idx < 0 || idx >= spec.p()) throw InputError("decomposition_gap: set index out of range");
    in_s[idx] = 1;
  }
  if (spec.kind() == NormSpec::Kind::WeightedGroupLasso) {
    const GroupPartition& part = spec.partition();
    for (int g = 0; g < part.group_count(); ++g) {
      auto grp = part.group(g);
      const int inside = static_cast<int>(std::count_if(grp.begin(), grp.end(),
                                                        [&](int idx) { return in_s[idx]; }));
      if (inside != 0 && inside != static_cast<int>(grp.size()))
        throw InputError("decomposition_gap: set splits a group, not an allowed set");
    }
  }
  Vector beta_s(spec.p(), 0.0), beta_sc(spec.p(), 0.0);
  for (int j = 0; j < spec.p(); ++j) (in_s[j] ? beta_s[j] : beta_sc[j]) = beta[j];
  // Omega^{Sc} is the restriction of Omega to Sc for these decomposable norms;
  // evaluating the zero-padded complement gives the same value.
  return norm_value(spec, beta) - (norm_value(spec, beta_s) + norm_value(spec, beta_sc));
}

namespace {

NormSpec weak_view(const NormSpec& spec) {
  if (spec.weak_kind() == NormSpec::Kind::L1) return NormSpec::l1(spec.p());
  return spec;  // weak == main group norm
}

}  // namespace

double weak_norm_value(const NormSpec& spec, std::span<const double> beta) {
  return norm_value(weak_view(spec), beta);
}

double weak_dual_norm_value(const NormSpec& spec, std::span<const double> omega) {
  return dual_norm_value(weak_view(spec), omega);
}

}  // namespace ssglm
