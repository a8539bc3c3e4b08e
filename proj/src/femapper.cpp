#include "parfem/femapper.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace parfem {

const char* to_string(DofClass c) {
  switch (c) {
    case DofClass::Master: return "Master";
    case DofClass::Independent: return "Independent";
    case DofClass::Dependent1: return "Dependent1";
    case DofClass::Dependent2: return "Dependent2";
    case DofClass::Slave: return "Slave";
    case DofClass::Halo1: return "Halo1";
    case DofClass::Halo2: return "Halo2";
    case DofClass::Dirichlet: return "Dirichlet";
  }
  return "?";
}

namespace {

constexpr int kTagMapRequest = 100;
constexpr int kTagMapReply = 101;
constexpr int kTagGlobalBase = 110;  // + ChannelKind
constexpr int kTagDiriRequest = 120;
constexpr int kTagDiriReply = 121;

struct DofTopo {
  std::vector<int> cells;   // ascending local ids == ascending gcn
  std::vector<int> owners;  // sorted unique owners of containing cells
  bool on_own = false;
  bool on_halo = false;
};

std::vector<DofTopo> build_topology(const SubdomainMesh& sub,
                                    const std::vector<std::vector<int>>& cell_dofs,
                                    int n_dofs) {
  std::vector<DofTopo> topo(static_cast<std::size_t>(n_dofs));
  for (std::size_t c = 0; c < cell_dofs.size(); ++c) {
    const bool own = sub.is_own(static_cast<int>(c));
    for (int dof : cell_dofs[c]) {
      DofTopo& t = topo[static_cast<std::size_t>(dof)];
      t.cells.push_back(static_cast<int>(c));
      t.owners.push_back(sub.cell_owner[c]);
      (own ? t.on_own : t.on_halo) = true;
    }
  }
  for (DofTopo& t : topo) {
    std::sort(t.owners.begin(), t.owners.end());
    t.owners.erase(std::unique(t.owners.begin(), t.owners.end()), t.owners.end());
  }
  return topo;
}

int slot_of(const std::vector<int>& cell_dofs, int dof) {
  for (std::size_t s = 0; s < cell_dofs.size(); ++s)
    if (cell_dofs[s] == dof) return static_cast<int>(s);
  throw UnmatchedDofError("dof not found in its own cell's slot list");
}

}  // namespace

DofClassification classify_dofs(const FESpace& space, Transport& tp) {
  const SubdomainMesh& sub = *space.sub;
  const int n = space.n_dofs;
  const std::vector<DofTopo> topo = build_topology(sub, space.cell_dofs, n);

  // Every rank announces its interface carriers (boundary-located ones too:
  // they take part in master bookkeeping and the master-slave channel even
  // though the Dirichlet class wins below).
  ByteWriter w;
  std::int64_t n_records = 0;
  for (int i = 0; i < n; ++i)
    if (topo[static_cast<std::size_t>(i)].on_own && topo[static_cast<std::size_t>(i)].on_halo)
      ++n_records;
  w.put_i64(n_records);
  for (int i = 0; i < n; ++i) {
    const DofTopo& t = topo[static_cast<std::size_t>(i)];
    if (!(t.on_own && t.on_halo)) continue;
    const LatticeCoord key = space.dofs[static_cast<std::size_t>(i)].key;
    for (int a = 0; a < 3; ++a) w.put_i64(key[static_cast<std::size_t>(a)]);
    w.put_i64(static_cast<std::int64_t>(t.owners.size()));
    for (int r : t.owners) w.put_i64(r);
  }
  const std::vector<Bytes> gathered = allgather(tp, w.take());

  std::map<LatticeCoord, std::vector<int>> interface_owners;
  for (int r = 0; r < tp.size(); ++r) {
    ByteReader rd(gathered[static_cast<std::size_t>(r)]);
    const std::int64_t count = rd.get_i64();
    for (std::int64_t k = 0; k < count; ++k) {
      LatticeCoord key;
      for (int a = 0; a < 3; ++a) key[static_cast<std::size_t>(a)] = rd.get_i64();
      std::vector<int> owners(static_cast<std::size_t>(rd.get_i64()));
      for (int& o : owners) o = static_cast<int>(rd.get_i64());
      auto [it, inserted] = interface_owners.emplace(key, owners);
      if (!inserted && it->second != owners)
        throw UnmatchedDofError("ranks disagree about the owner set of an interface carrier");
    }
  }

  // Greedy balance in key order: fewest masters so far, ties to lowest rank.
  std::map<LatticeCoord, int> master_of;
  std::vector<std::int64_t> masters_assigned(static_cast<std::size_t>(tp.size()), 0);
  for (const auto& [key, owners] : interface_owners) {
    int best = owners.front();
    for (int r : owners)
      if (masters_assigned[static_cast<std::size_t>(r)] <
          masters_assigned[static_cast<std::size_t>(best)])
        best = r;
    master_of.emplace(key, best);
    ++masters_assigned[static_cast<std::size_t>(best)];
  }

  DofClassification out;
  out.class_of.assign(static_cast<std::size_t>(n), DofClass::Independent);
  out.master_rank_of.assign(static_cast<std::size_t>(n), -1);
  out.diri_authority.assign(static_cast<std::size_t>(n), -1);

  for (int i = 0; i < n; ++i) {
    const DofTopo& t = topo[static_cast<std::size_t>(i)];
    const DofInfo& info = space.dofs[static_cast<std::size_t>(i)];
    auto mit = master_of.find(info.key);
    if (mit != master_of.end()) out.master_rank_of[static_cast<std::size_t>(i)] = mit->second;

    if (info.on_boundary) {
      out.class_of[static_cast<std::size_t>(i)] = DofClass::Dirichlet;
      out.diri_authority[static_cast<std::size_t>(i)] =
          mit != master_of.end() ? mit->second : t.owners.front();
    } else if (t.on_own && t.on_halo) {
      out.class_of[static_cast<std::size_t>(i)] =
          mit->second == tp.rank() ? DofClass::Master : DofClass::Slave;
    } else if (t.on_halo) {
      out.class_of[static_cast<std::size_t>(i)] = DofClass::Halo2;
    } else {
      bool on_dependent_cell = false;
      for (int c : t.cells)
        if (sub.cell_class[static_cast<std::size_t>(c)] == CellClass::Dependent)
          on_dependent_cell = true;
      out.class_of[static_cast<std::size_t>(i)] =
          on_dependent_cell ? DofClass::Dependent1 : DofClass::Independent;
    }
  }

  // Halo1 and Dependent2 are the halo/dependent dofs coupled (same cell)
  // with a Master dof of this rank.
  std::vector<char> cell_has_master(sub.cells.size(), 0);
  for (int i = 0; i < n; ++i)
    if (out.class_of[static_cast<std::size_t>(i)] == DofClass::Master)
      for (int c : topo[static_cast<std::size_t>(i)].cells)
        cell_has_master[static_cast<std::size_t>(c)] = 1;
  for (int i = 0; i < n; ++i) {
    DofClass& cls = out.class_of[static_cast<std::size_t>(i)];
    if (cls != DofClass::Halo2 && cls != DofClass::Dependent1) continue;
    bool coupled = false;
    for (int c : topo[static_cast<std::size_t>(i)].cells)
      if (cell_has_master[static_cast<std::size_t>(c)]) coupled = true;
    if (!coupled) continue;
    cls = cls == DofClass::Halo2 ? DofClass::Halo1 : DofClass::Dependent2;
  }
  return out;
}

std::vector<int> reorder_dofs(const std::vector<DofClass>& class_of) {
  const int n = static_cast<int>(class_of.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return static_cast<int>(class_of[static_cast<std::size_t>(a)]) <
           static_cast<int>(class_of[static_cast<std::size_t>(b)]);
  });
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) perm[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
  return perm;
}

ParFEMapper make_mapper_with_classes(std::shared_ptr<const FESpace> space, Transport& tp) {
  if (!space) throw std::invalid_argument("make_mapper_with_classes: null space");
  const DofClassification cls = classify_dofs(*space, tp);

  ParFEMapper m;
  m.space = space;
  m.rank = tp.rank();
  m.n_ranks = tp.size();
  m.n_dofs = space->n_dofs;
  m.reorder = reorder_dofs(cls.class_of);

  const std::size_t n = static_cast<std::size_t>(m.n_dofs);
  m.class_of.resize(n);
  m.dofs.resize(n);
  m.master_rank_of.resize(n);
  m.diri_authority.resize(n);
  for (std::size_t old = 0; old < n; ++old) {
    const std::size_t now = static_cast<std::size_t>(m.reorder[old]);
    m.class_of[now] = cls.class_of[old];
    m.dofs[now] = space->dofs[old];
    m.master_rank_of[now] = cls.master_rank_of[old];
    m.diri_authority[now] = cls.diri_authority[old];
  }
  m.cell_dofs.resize(space->cell_dofs.size());
  for (std::size_t c = 0; c < space->cell_dofs.size(); ++c) {
    m.cell_dofs[c].reserve(space->cell_dofs[c].size());
    for (int dof : space->cell_dofs[c])
      m.cell_dofs[c].push_back(m.reorder[static_cast<std::size_t>(dof)]);
  }

  for (DofClass c : m.class_of) ++m.n_class[static_cast<std::size_t>(static_cast<int>(c))];
  m.n_own_dofs = m.count(DofClass::Master) + m.count(DofClass::Independent) +
                 m.count(DofClass::Dependent1) + m.count(DofClass::Dependent2);

  m.owns_row.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    m.owns_row[i] = is_own_class(m.class_of[i]) ||
                    (m.class_of[i] == DofClass::Dirichlet && m.diri_authority[i] == m.rank);
  m.global_of.assign(n, -1);
  return m;
}

void build_dof_maps(ParFEMapper& mapper, Transport& tp) {
  if (!mapper.space) throw std::invalid_argument("build_dof_maps: mapper has no space");
  const SubdomainMesh& sub = *mapper.space->sub;
  const std::vector<DofTopo> topo = build_topology(sub, mapper.cell_dofs, mapper.n_dofs);

  std::map<std::int64_t, int> cell_by_gcn;
  for (std::size_t c = 0; c < sub.cells.size(); ++c) cell_by_gcn.emplace(sub.cells[c].gcn, static_cast<int>(c));

  struct Request {
    LatticeCoord key;
    int dof;
    std::int64_t gcn;
    int slot;
  };
  // requests[kind][target] in entity-key order
  std::array<std::map<int, std::vector<Request>>, kNumChannelKinds> requests;

  for (int j = 0; j < mapper.n_dofs; ++j) {
    const DofTopo& t = topo[static_cast<std::size_t>(j)];
    const DofClass cls = mapper.class_of[static_cast<std::size_t>(j)];
    const bool interface = t.on_own && t.on_halo;

    int kind = -1, target = -1, cell = -1;
    if (interface && mapper.master_rank_of[static_cast<std::size_t>(j)] != mapper.rank) {
      // Slave side (or boundary-located interface carrier): ask the master,
      // naming one of my own cells, which the master holds as halo.
      kind = static_cast<int>(ChannelKind::MasterSlave);
      target = mapper.master_rank_of[static_cast<std::size_t>(j)];
      for (int c : t.cells)
        if (sub.is_own(c)) {
          cell = c;
          break;
        }
    } else if (cls == DofClass::Halo1 || cls == DofClass::Halo2) {
      kind = cls == DofClass::Halo1 ? static_cast<int>(ChannelKind::Halo1Exchange)
                                    : static_cast<int>(ChannelKind::Halo2Exchange);
      target = t.owners.front();  // lowest owner rank answers
      for (int c : t.cells)
        if (sub.cell_owner[static_cast<std::size_t>(c)] == target) {
          cell = c;
          break;
        }
    } else {
      continue;
    }
    requests[static_cast<std::size_t>(kind)][target].push_back(
        {mapper.dofs[static_cast<std::size_t>(j)].key, j, sub.cells[static_cast<std::size_t>(cell)].gcn,
         slot_of(mapper.cell_dofs[static_cast<std::size_t>(cell)], j)});
  }
  for (auto& per_kind : requests)
    for (auto& [target, list] : per_kind)
      std::sort(list.begin(), list.end(),
                [](const Request& a, const Request& b) { return a.key < b.key; });

  // One combined request wave: everyone messages everyone, empty sections
  // allowed, so no prior knowledge of neighbors is needed.
  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    ByteWriter w;
    for (int k = 0; k < kNumChannelKinds; ++k) {
      const auto& per_kind = requests[static_cast<std::size_t>(k)];
      auto it = per_kind.find(r);
      const std::vector<Request>* list = it == per_kind.end() ? nullptr : &it->second;
      w.put_i64(list ? static_cast<std::int64_t>(list->size()) : 0);
      if (!list) continue;
      for (const Request& q : *list) {
        w.put_i64(q.gcn);
        w.put_i64(q.slot);
        w.put_i64(q.dof);  // requester's local index, for diagnostics
      }
    }
    tp.send(r, kTagMapRequest, w.take());
  }

  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    const Bytes payload = tp.recv(r, kTagMapRequest);
    ByteReader rd(payload);
    std::array<std::int64_t, kNumChannelKinds> counts{};
    for (int k = 0; k < kNumChannelKinds; ++k) {
      counts[static_cast<std::size_t>(k)] = rd.get_i64();
      for (std::int64_t q = 0; q < counts[static_cast<std::size_t>(k)]; ++q) {
        const std::int64_t gcn = rd.get_i64();
        const std::int64_t slot = rd.get_i64();
        rd.get_i64();  // peer's local index, not needed to resolve
        auto cit = cell_by_gcn.find(gcn);
        if (cit == cell_by_gcn.end())
          throw UnmatchedDofError("rank " + std::to_string(tp.rank()) + ": no local cell with gcn " +
                                  std::to_string(gcn) + " requested by rank " + std::to_string(r));
        const std::vector<int>& cd = mapper.cell_dofs[static_cast<std::size_t>(cit->second)];
        if (slot < 0 || slot >= static_cast<std::int64_t>(cd.size()))
          throw UnmatchedDofError("dof slot out of range in request from rank " + std::to_string(r));
        const int dof = cd[static_cast<std::size_t>(slot)];
        const DofClass cls = mapper.class_of[static_cast<std::size_t>(dof)];
        if (k == static_cast<int>(ChannelKind::MasterSlave)) {
          if (mapper.master_rank_of[static_cast<std::size_t>(dof)] != mapper.rank ||
              (cls != DofClass::Master && cls != DofClass::Dirichlet))
            throw UnmatchedDofError("master-slave request resolved to a non-master dof");
        } else {
          if (cls == DofClass::Dirichlet || !topo[static_cast<std::size_t>(dof)].on_own)
            throw UnmatchedDofError("halo request resolved to a non-own or boundary dof");
        }
        mapper.channels[static_cast<std::size_t>(k)][r].send_dofs.push_back(dof);
      }
    }
    ByteWriter echo;
    for (std::int64_t c : counts) echo.put_i64(c);
    tp.send(r, kTagMapReply, echo.take());
  }

  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    const Bytes payload = tp.recv(r, kTagMapReply);
    ByteReader rd(payload);
    for (int k = 0; k < kNumChannelKinds; ++k) {
      const auto& per_kind = requests[static_cast<std::size_t>(k)];
      auto it = per_kind.find(r);
      const std::int64_t expected = it == per_kind.end() ? 0 : static_cast<std::int64_t>(it->second.size());
      if (rd.get_i64() != expected)
        throw UnmatchedDofError("request/acknowledgement count mismatch with rank " + std::to_string(r));
    }
  }

  for (int k = 0; k < kNumChannelKinds; ++k)
    for (const auto& [target, list] : requests[static_cast<std::size_t>(k)]) {
      Channel& ch = mapper.channels[static_cast<std::size_t>(k)][target];
      ch.recv_dofs.reserve(list.size());
      for (const Request& q : list) ch.recv_dofs.push_back(q.dof);
    }
}

void assign_global_numbers(ParFEMapper& mapper, Transport& tp) {
  const std::size_t n = static_cast<std::size_t>(mapper.n_dofs);

  const std::vector<std::int64_t> own_counts = allgather_counts(tp, mapper.n_own_dofs);
  std::int64_t own_base = 0, total_own = 0;
  for (int r = 0; r < tp.size(); ++r) {
    if (r < tp.rank()) own_base += own_counts[static_cast<std::size_t>(r)];
    total_own += own_counts[static_cast<std::size_t>(r)];
  }
  for (int j = 0; j < mapper.n_own_dofs; ++j)
    mapper.global_of[static_cast<std::size_t>(j)] = own_base + j;

  std::int64_t my_diri = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (mapper.owns_row[i] && mapper.class_of[i] == DofClass::Dirichlet) ++my_diri;
  const std::vector<std::int64_t> diri_counts = allgather_counts(tp, my_diri);
  std::int64_t diri_base = total_own, total_diri = 0;
  for (int r = 0; r < tp.size(); ++r) {
    if (r < tp.rank()) diri_base += diri_counts[static_cast<std::size_t>(r)];
    total_diri += diri_counts[static_cast<std::size_t>(r)];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (mapper.owns_row[i] && mapper.class_of[i] == DofClass::Dirichlet)
      mapper.global_of[i] = diri_base++;
  mapper.n_global_own = total_own;
  mapper.n_global = total_own + total_diri;

  // Channel scatters, master/owner side first. MasterSlave must complete
  // before the halo channels: a halo request may be answered by a rank that
  // itself holds the dof as Slave and only now learned its global id.
  for (int k = 0; k < kNumChannelKinds; ++k) {
    const int tag = kTagGlobalBase + k;
    for (const auto& [peer, ch] : mapper.channels[static_cast<std::size_t>(k)]) {
      if (ch.send_dofs.empty()) continue;
      ByteWriter w;
      for (int dof : ch.send_dofs) {
        if (mapper.global_of[static_cast<std::size_t>(dof)] < 0)
          throw Error("global id not yet known on the sending side of a channel");
        w.put_i64(mapper.global_of[static_cast<std::size_t>(dof)]);
      }
      tp.send(peer, tag, w.take());
    }
    for (const auto& [peer, ch] : mapper.channels[static_cast<std::size_t>(k)]) {
      if (ch.recv_dofs.empty()) continue;
      ByteReader rd(tp.recv(peer, tag));
      for (int dof : ch.recv_dofs) mapper.global_of[static_cast<std::size_t>(dof)] = rd.get_i64();
    }
  }

  // Dirichlet dofs seen only through halo cells sit on no channel; ask their
  // authority directly, naming a shared cell.
  const SubdomainMesh& sub = *mapper.space->sub;
  std::map<std::int64_t, int> cell_by_gcn;
  for (std::size_t c = 0; c < sub.cells.size(); ++c) cell_by_gcn.emplace(sub.cells[c].gcn, static_cast<int>(c));
  const std::vector<DofTopo> topo = build_topology(sub, mapper.cell_dofs, mapper.n_dofs);

  std::map<int, std::vector<std::pair<std::int64_t, std::int64_t>>> asks;  // target -> (gcn, slot)
  std::map<int, std::vector<int>> ask_dofs;
  for (std::size_t i = 0; i < n; ++i) {
    if (mapper.global_of[i] >= 0) continue;
    if (mapper.class_of[i] != DofClass::Dirichlet)
      throw Error("non-Dirichlet dof missed all global-number channels");
    const int target = mapper.diri_authority[i];
    // Any local cell containing the dof is also in the authority's halo
    // closure (both hold the dof's carrying entity), so name the min-gcn one.
    int cell = -1;
    for (int c : topo[i].cells) {
      if (cell < 0 || sub.cells[static_cast<std::size_t>(c)].gcn < sub.cells[static_cast<std::size_t>(cell)].gcn)
        cell = c;
    }
    if (cell < 0) throw Error("boundary dof contained in no local cell");
    asks[target].push_back({sub.cells[static_cast<std::size_t>(cell)].gcn,
                            slot_of(mapper.cell_dofs[static_cast<std::size_t>(cell)], static_cast<int>(i))});
    ask_dofs[target].push_back(static_cast<int>(i));
  }
  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    ByteWriter w;
    auto it = asks.find(r);
    w.put_i64(it == asks.end() ? 0 : static_cast<std::int64_t>(it->second.size()));
    if (it != asks.end())
      for (const auto& [gcn, slot] : it->second) {
        w.put_i64(gcn);
        w.put_i64(slot);
      }
    tp.send(r, kTagDiriRequest, w.take());
  }
  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    ByteReader rd(tp.recv(r, kTagDiriRequest));
    const std::int64_t count = rd.get_i64();
    ByteWriter reply;
    for (std::int64_t q = 0; q < count; ++q) {
      const std::int64_t gcn = rd.get_i64();
      const std::int64_t slot = rd.get_i64();
      auto cit = cell_by_gcn.find(gcn);
      if (cit == cell_by_gcn.end())
        throw UnmatchedDofError("boundary-value id request names an unknown cell");
      const std::vector<int>& cd = mapper.cell_dofs[static_cast<std::size_t>(cit->second)];
      if (slot < 0 || slot >= static_cast<std::int64_t>(cd.size()))
        throw UnmatchedDofError("boundary-value id request slot out of range");
      const int dof = cd[static_cast<std::size_t>(slot)];
      if (mapper.class_of[static_cast<std::size_t>(dof)] != DofClass::Dirichlet ||
          mapper.global_of[static_cast<std::size_t>(dof)] < 0)
        throw UnmatchedDofError("boundary-value id request resolved to a non-Dirichlet dof");
      reply.put_i64(mapper.global_of[static_cast<std::size_t>(dof)]);
    }
    tp.send(r, kTagDiriReply, reply.take());
  }
  for (int r = 0; r < tp.size(); ++r) {
    if (r == tp.rank()) continue;
    ByteReader rd(tp.recv(r, kTagDiriReply));
    auto it = ask_dofs.find(r);
    if (it == ask_dofs.end()) continue;
    for (int dof : it->second) mapper.global_of[static_cast<std::size_t>(dof)] = rd.get_i64();
  }

  for (std::size_t i = 0; i < n; ++i)
    if (mapper.global_of[i] < 0) throw Error("dof left without a global id");
}

ParFEMapper build_parfemapper(std::shared_ptr<const FESpace> space, Transport& tp) {
  ParFEMapper m = make_mapper_with_classes(std::move(space), tp);
  build_dof_maps(m, tp);
  assign_global_numbers(m, tp);
  return m;
}

}  // namespace parfem
