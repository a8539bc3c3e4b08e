#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "parfem/fespace.hpp"
#include "parfem/transport.hpp"

namespace parfem {

/// Numeric values equal the reordering rank: sorting dofs by class value
/// yields the required consecutive layout, own dofs first, Dirichlet last.
enum class DofClass : int {
  Master = 0,
  Independent = 1,
  Dependent1 = 2,
  Dependent2 = 3,
  Slave = 4,
  Halo1 = 5,
  Halo2 = 6,
  Dirichlet = 7,
};
constexpr int kNumDofClasses = 8;
const char* to_string(DofClass c);

inline bool is_own_class(DofClass c) { return static_cast<int>(c) <= static_cast<int>(DofClass::Dependent2); }

enum class ChannelKind : int { MasterSlave = 0, Halo1Exchange = 1, Halo2Exchange = 2 };
constexpr int kNumChannelKinds = 3;

/// One direction pair of an exchange with a peer. send_dofs are the entries
/// this rank is source for (master side on MasterSlave, owner side on halo
/// channels); recv_dofs are the entries it requested. The i-th entry of a
/// send list and of the matching peer's recv list name the same carrier.
struct Channel {
  std::vector<int> send_dofs;
  std::vector<int> recv_dofs;
};

/// Parallel dof map of one FESpace: classes, the class-sorted renumbering,
/// per-peer exchange lists, and the global numbering. Immutable once built.
struct ParFEMapper {
  std::shared_ptr<const FESpace> space;  // may be null for hand-built mappers in tests
  int rank = 0;
  int n_ranks = 1;
  int n_dofs = 0;
  int n_own_dofs = 0;  // Master + Independent + Dependent1 + Dependent2

  // All per-dof arrays below use the consecutive (reordered) indexing.
  std::vector<DofClass> class_of;
  std::vector<int> reorder;                 // fespace index -> consecutive index
  std::vector<std::vector<int>> cell_dofs;  // per cell, slots in reference order
  std::vector<DofInfo> dofs;
  std::vector<int> master_rank_of;   // master rank of the carrier, -1 if not shared
  std::vector<int> diri_authority;   // numbering rank for Dirichlet dofs, -1 otherwise
  std::vector<char> owns_row;        // 1 where this rank is the numbering authority

  std::array<std::map<int, Channel>, kNumChannelKinds> channels;  // peer -> lists

  std::vector<std::int64_t> global_of;
  std::int64_t n_global_own = 0;  // sum of n_own_dofs over ranks
  std::int64_t n_global = 0;      // n_global_own + globally distinct Dirichlet dofs
  std::array<int, kNumDofClasses> n_class{};

  int count(DofClass c) const { return n_class[static_cast<std::size_t>(static_cast<int>(c))]; }
  bool is_own(int dof) const { return dof < n_own_dofs; }
};

/// Classification result in the original FESpace indexing.
struct DofClassification {
  std::vector<DofClass> class_of;
  std::vector<int> master_rank_of;
  std::vector<int> diri_authority;
};

/// Assign every local dof its class. Interface carriers (shared between own
/// and halo cells) get exactly one master rank globally, chosen by a greedy
/// balance rule over a rank-independent key order; Dirichlet overrides all.
DofClassification classify_dofs(const FESpace& space, Transport& tp);

/// Stable permutation (old index -> new index) sorting dofs by class value.
std::vector<int> reorder_dofs(const std::vector<DofClass>& class_of);

/// classify_dofs + reorder_dofs applied; channels and globals still empty.
ParFEMapper make_mapper_with_classes(std::shared_ptr<const FESpace> space, Transport& tp);

/// Cross-rank handshake that fills the exchange channels. Every requester
/// sends (gcn of a shared local cell, dof slot within that cell, its local
/// dof index); the addressee resolves the pair against its own cells.
/// Raises UnmatchedDofError if a pair has no local counterpart.
void build_dof_maps(ParFEMapper& mapper, Transport& tp);

/// Fill global_of: own dofs get prefix-sum offsets of own counts, Dirichlet
/// dofs are numbered after all own dofs by their authority rank, and every
/// non-authoritative holder receives ids over the channels (plus one direct
/// round for Dirichlet dofs seen only through halo cells).
void assign_global_numbers(ParFEMapper& mapper, Transport& tp);

/// The full pipeline: classify, reorder, handshake, global numbering.
ParFEMapper build_parfemapper(std::shared_ptr<const FESpace> space, Transport& tp);

}  // namespace parfem
