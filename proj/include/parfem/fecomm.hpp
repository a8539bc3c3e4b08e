#pragma once

#include <memory>

#include "parfem/femapper.hpp"

namespace parfem {

/// Advisory tag describing how replicated entries currently relate.
/// Consistent: every replica equals the owner's value. Additive: replicas
/// hold partial sums awaiting accumulation. MasterOnly: masters/owners are
/// final but slave/halo copies are stale.
enum class ConsistencyState { Consistent, Additive, MasterOnly };

/// Rank-local value array in the mapper's consecutive dof indexing.
struct DistributedVector {
  std::vector<double> values;
  ConsistencyState state = ConsistencyState::Consistent;

  DistributedVector() = default;
  explicit DistributedVector(std::size_t n, double fill = 0.0) : values(n, fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

enum class UpdateMode { Scatter, AccumulateThenScatter };

/// Consistency updates over the mapper's channels. Every operation touches
/// exactly the channel's dof entries and nothing else, and is collective:
/// all ranks of the transport must call it together.
class ParFECommunicator {
 public:
  ParFECommunicator(std::shared_ptr<const ParFEMapper> mapper, Transport& tp);

  const ParFEMapper& mapper() const { return *mapper_; }
  Transport& transport() const { return *tp_; }

  /// Scatter: master values overwrite slave copies. AccumulateThenScatter:
  /// master entries are first replaced by their own value plus all slave
  /// contributions (summed in ascending sender-rank order), then scattered.
  void update_master_slave(DistributedVector& v, UpdateMode mode) const;

  /// Owner values overwrite Halo1 (resp. Halo2) copies.
  void update_halo1(DistributedVector& v) const;
  void update_halo2(DistributedVector& v) const;

 private:
  void check(const DistributedVector& v) const;
  void scatter(ChannelKind kind, DistributedVector& v) const;

  std::shared_ptr<const ParFEMapper> mapper_;
  Transport* tp_;
};

}  // namespace parfem
