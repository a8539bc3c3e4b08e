#include "parfem/fecomm.hpp"

#include <stdexcept>
#include <string>

namespace parfem {

namespace {
constexpr int kTagScatterBase = 200;     // + ChannelKind
constexpr int kTagAccumulateBase = 210;  // + ChannelKind
}  // namespace

ParFECommunicator::ParFECommunicator(std::shared_ptr<const ParFEMapper> mapper, Transport& tp)
    : mapper_(std::move(mapper)), tp_(&tp) {
  if (!mapper_) throw std::invalid_argument("ParFECommunicator: null mapper");
}

void ParFECommunicator::check(const DistributedVector& v) const {
  if (v.size() != static_cast<std::size_t>(mapper_->n_dofs))
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match mapper dof count " +
                                std::to_string(mapper_->n_dofs));
}

void ParFECommunicator::scatter(ChannelKind kind, DistributedVector& v) const {
  const auto& peers = mapper_->channels[static_cast<std::size_t>(static_cast<int>(kind))];
  const int tag = kTagScatterBase + static_cast<int>(kind);
  for (const auto& [peer, ch] : peers) {
    if (ch.send_dofs.empty()) continue;
    ByteWriter w;
    for (int dof : ch.send_dofs) w.put_f64(v[static_cast<std::size_t>(dof)]);
    tp_->send(peer, tag, w.take());
  }
  for (const auto& [peer, ch] : peers) {
    if (ch.recv_dofs.empty()) continue;
    ByteReader rd(tp_->recv(peer, tag));
    for (int dof : ch.recv_dofs) v[static_cast<std::size_t>(dof)] = rd.get_f64();
  }
}

void ParFECommunicator::update_master_slave(DistributedVector& v, UpdateMode mode) const {
  check(v);
  if (mode == UpdateMode::AccumulateThenScatter) {
    const auto& peers = mapper_->channels[static_cast<std::size_t>(
        static_cast<int>(ChannelKind::MasterSlave))];
    const int tag = kTagAccumulateBase + static_cast<int>(ChannelKind::MasterSlave);
    for (const auto& [peer, ch] : peers) {
      if (ch.recv_dofs.empty()) continue;  // slave side pushes its partial sums
      ByteWriter w;
      for (int dof : ch.recv_dofs) w.put_f64(v[static_cast<std::size_t>(dof)]);
      tp_->send(peer, tag, w.take());
    }
    // Ascending peer order keeps the accumulation bit-reproducible.
    for (const auto& [peer, ch] : peers) {
      if (ch.send_dofs.empty()) continue;
      ByteReader rd(tp_->recv(peer, tag));
      for (int dof : ch.send_dofs) v[static_cast<std::size_t>(dof)] += rd.get_f64();
    }
  }
  scatter(ChannelKind::MasterSlave, v);
  v.state = ConsistencyState::Consistent;
}

void ParFECommunicator::update_halo1(DistributedVector& v) const {
  check(v);
  scatter(ChannelKind::Halo1Exchange, v);
}

void ParFECommunicator::update_halo2(DistributedVector& v) const {
  check(v);
  scatter(ChannelKind::Halo2Exchange, v);
}

}  // namespace parfem
