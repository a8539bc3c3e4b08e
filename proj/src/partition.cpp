#include "parfem/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace parfem {

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Dependent: return "Dependent";
    case CellClass::Independent: return "Independent";
    case CellClass::Halo: return "Halo";
  }
  return "?";
}

double SubdomainMesh::cell_volume() const {
  const double h = 1.0 / static_cast<double>(lattice_denominator());
  return dimension == 2 ? h * h : h * h * h;
}

namespace {

std::vector<std::int64_t> rank_targets(std::int64_t total, int k) {
  std::vector<std::int64_t> t(static_cast<std::size_t>(k), total / k);
  for (int i = 0; i < static_cast<int>(total % k); ++i) ++t[static_cast<std::size_t>(i)];
  return t;
}

// Recursive coordinate bisection over cell min-corner lattice positions.
void bisect(const MeshLevel& mesh, std::vector<int>& cell_ids,
            const std::vector<std::int64_t>& targets, int r0, int r1,
            std::vector<int>& owner) {
  if (r1 - r0 == 1) {
    for (int c : cell_ids) owner[static_cast<std::size_t>(c)] = r0;
    return;
  }
  const int mid = r0 + (r1 - r0) / 2;
  std::int64_t left_count = 0;
  for (int r = r0; r < mid; ++r) left_count += targets[static_cast<std::size_t>(r)];

  auto corner = [&](int c, int a) {
    const Cell& cell = mesh.cells[static_cast<std::size_t>(c)];
    return mesh.vertices[static_cast<std::size_t>(cell.vertex_ids[0])]
        .lattice[static_cast<std::size_t>(a)];
  };
  int axis = 0;
  std::int64_t best_extent = -1;
  for (int a = 0; a < mesh.dimension; ++a) {
    std::int64_t lo = corner(cell_ids.front(), a), hi = lo;
    for (int c : cell_ids) {
      lo = std::min(lo, corner(c, a));
      hi = std::max(hi, corner(c, a));
    }
    if (hi - lo > best_extent) {
      best_extent = hi - lo;
      axis = a;
    }
  }
  std::stable_sort(cell_ids.begin(), cell_ids.end(), [&](int a, int b) {
    const std::int64_t ca = corner(a, axis), cb = corner(b, axis);
    if (ca != cb) return ca < cb;
    return mesh.cells[static_cast<std::size_t>(a)].gcn < mesh.cells[static_cast<std::size_t>(b)].gcn;
  });

  std::vector<int> left(cell_ids.begin(), cell_ids.begin() + left_count);
  std::vector<int> right(cell_ids.begin() + left_count, cell_ids.end());
  bisect(mesh, left, targets, r0, mid, owner);
  bisect(mesh, right, targets, mid, r1, owner);
}

// Dof-carrying entity keys of one cell: vertex lattice coords for Q1, facet
// corner sums for rotated Q1, nothing for Q0 (no inter-cell coupling).
template <typename VertexLookup>
std::vector<LatticeCoord> carrier_keys(int dimension, FEFamily family, const Cell& cell,
                                       const VertexLookup& lattice_of) {
  std::vector<LatticeCoord> keys;
  switch (family) {
    case FEFamily::ContinuousQ1:
      for (int vid : cell.vertex_ids) keys.push_back(lattice_of(vid));
      break;
    case FEFamily::NonconformingRotatedQ1:
      for (int f = 0; f < facets_per_cell(dimension); ++f) {
        LatticeCoord sum{0, 0, 0};
        for (int v : facet_corner_vertices(dimension, f)) {
          const LatticeCoord lat = lattice_of(cell.vertex_ids[static_cast<std::size_t>(v)]);
          for (int a = 0; a < 3; ++a) sum[static_cast<std::size_t>(a)] += lat[static_cast<std::size_t>(a)];
        }
        keys.push_back(sum);
      }
      break;
    case FEFamily::DiscontinuousQ0:
      break;
  }
  return keys;
}

}  // namespace

PartitionMap partition_cells(const MeshLevel& mesh, int k, PartitionStrategy strategy) {
  const std::int64_t total = static_cast<std::int64_t>(mesh.cells.size());
  if (k < 1) throw std::invalid_argument("partition needs k >= 1");
  if (k > total)
    throw std::invalid_argument("partition needs at least one cell per rank: k=" +
                                std::to_string(k) + ", cells=" + std::to_string(total));

  PartitionMap map;
  map.n_ranks = k;
  map.owner.assign(static_cast<std::size_t>(total), -1);
  const std::vector<std::int64_t> targets = rank_targets(total, k);

  if (strategy == PartitionStrategy::Greedy) {
    // Contiguous gcn blocks of target size.
    std::vector<int> by_gcn(static_cast<std::size_t>(total));
    std::iota(by_gcn.begin(), by_gcn.end(), 0);
    std::sort(by_gcn.begin(), by_gcn.end(), [&](int a, int b) {
      return mesh.cells[static_cast<std::size_t>(a)].gcn < mesh.cells[static_cast<std::size_t>(b)].gcn;
    });
    int rank = 0;
    std::int64_t filled = 0;
    for (int c : by_gcn) {
      while (filled >= targets[static_cast<std::size_t>(rank)]) {
        ++rank;
        filled = 0;
      }
      map.owner[static_cast<std::size_t>(mesh.cells[static_cast<std::size_t>(c)].gcn)] = rank;
      ++filled;
    }
  } else {
    std::vector<int> ids(static_cast<std::size_t>(total));
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<int> owner_by_local(static_cast<std::size_t>(total), -1);
    bisect(mesh, ids, targets, 0, k, owner_by_local);
    for (std::size_t c = 0; c < owner_by_local.size(); ++c)
      map.owner[static_cast<std::size_t>(mesh.cells[c].gcn)] = owner_by_local[c];
  }
  return map;
}

PartitionMap derive_descendant_partition(const PartitionMap& coarse_map, int nc, int generations) {
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  std::int64_t factor = 1;
  for (int g = 0; g < generations; ++g) factor *= nc;
  PartitionMap fine;
  fine.n_ranks = coarse_map.n_ranks;
  fine.owner.resize(coarse_map.owner.size() * static_cast<std::size_t>(factor));
  for (std::size_t g = 0; g < fine.owner.size(); ++g)
    fine.owner[g] = coarse_map.owner[g / static_cast<std::size_t>(factor)];
  return fine;
}

SubdomainMesh build_subdomain(const MeshLevel& mesh, const PartitionMap& map, int rank,
                              FEFamily family) {
  if (rank < 0 || rank >= map.n_ranks) throw std::invalid_argument("rank out of range");
  if (map.owner.size() != mesh.cells.size())
    throw std::invalid_argument("partition map does not match mesh level");

  auto owner_of = [&](const Cell& c) { return map.owner[static_cast<std::size_t>(c.gcn)]; };
  auto lattice_of = [&](int vid) { return mesh.vertices[static_cast<std::size_t>(vid)].lattice; };

  std::set<int> halo, dependent;
  if (family != FEFamily::DiscontinuousQ0) {
    std::map<LatticeCoord, std::vector<int>> entity_cells;
    for (const Cell& c : mesh.cells)
      for (const LatticeCoord& key : carrier_keys(mesh.dimension, family, c, lattice_of))
        entity_cells[key].push_back(c.local_id);
    for (const auto& [key, cells] : entity_cells) {
      bool has_own = false, has_foreign = false;
      for (int c : cells)
        (owner_of(mesh.cells[static_cast<std::size_t>(c)]) == rank ? has_own : has_foreign) = true;
      if (!has_own || !has_foreign) continue;
      for (int c : cells)
        (owner_of(mesh.cells[static_cast<std::size_t>(c)]) == rank ? dependent : halo).insert(c);
    }
  }

  std::vector<int> picked;
  for (const Cell& c : mesh.cells)
    if (owner_of(c) == rank || halo.count(c.local_id)) picked.push_back(c.local_id);
  std::sort(picked.begin(), picked.end(), [&](int a, int b) {
    return mesh.cells[static_cast<std::size_t>(a)].gcn < mesh.cells[static_cast<std::size_t>(b)].gcn;
  });

  SubdomainMesh sub;
  sub.rank = rank;
  sub.n_ranks = map.n_ranks;
  sub.dimension = mesh.dimension;
  sub.level = mesh.level;
  sub.n_coarse = mesh.n_coarse;
  sub.family = family;

  std::map<LatticeCoord, int> vertex_index;
  std::set<int> neighbors;
  for (int id : picked) {
    const Cell& src = mesh.cells[static_cast<std::size_t>(id)];
    Cell c;
    c.local_id = static_cast<int>(sub.cells.size());
    c.gcn = src.gcn;
    c.level = src.level;
    c.parent = -1;
    for (int vid : src.vertex_ids) {
      const Vertex& v = mesh.vertices[static_cast<std::size_t>(vid)];
      auto it = vertex_index.find(v.lattice);
      int local_vid;
      if (it == vertex_index.end()) {
        local_vid = static_cast<int>(sub.vertices.size());
        Vertex copy = v;
        copy.id = local_vid;
        sub.vertices.push_back(copy);
        vertex_index.emplace(v.lattice, local_vid);
      } else {
        local_vid = it->second;
      }
      c.vertex_ids.push_back(local_vid);
    }
    const int owner = owner_of(src);
    sub.cell_owner.push_back(owner);
    if (owner == rank) {
      sub.cell_class.push_back(dependent.count(id) ? CellClass::Dependent
                                                   : CellClass::Independent);
    } else {
      sub.cell_class.push_back(CellClass::Halo);
      neighbors.insert(owner);
    }
    sub.cells.push_back(std::move(c));
  }

  sub.neighbor_ranks.assign(neighbors.begin(), neighbors.end());
  for (CellClass cc : sub.cell_class) {
    if (cc == CellClass::Halo) ++sub.n_halo;
    if (cc == CellClass::Dependent) ++sub.n_dependent;
    if (cc == CellClass::Independent) ++sub.n_independent;
  }
  sub.n_own = sub.n_dependent + sub.n_independent;
  return sub;
}

SubdomainMesh refine_subdomain(const SubdomainMesh& sub) {
  const int d = sub.dimension;
  const int nc = 1 << d;

  struct Candidate {
    std::int64_t gcn;
    LatticeCoord corner;  // min corner, fine lattice units
    int parent;
    int owner;
    bool own;
  };
  std::vector<Candidate> cand;
  cand.reserve(sub.cells.size() * static_cast<std::size_t>(nc));
  for (std::size_t i = 0; i < sub.cells.size(); ++i) {
    const Cell& p = sub.cells[i];
    const LatticeCoord p0 = sub.vertices[static_cast<std::size_t>(p.vertex_ids[0])].lattice;
    for (int ci = 0; ci < nc; ++ci) {
      const LatticeCoord co = child_offset(d, ci);
      cand.push_back({child_gcn(p.gcn, nc, ci),
                      {2 * p0[0] + co[0], 2 * p0[1] + co[1], 2 * p0[2] + co[2]},
                      p.local_id,
                      sub.cell_owner[i],
                      sub.is_own(static_cast<int>(i))});
    }
  }

  // Carrier-entity adjacency between own children and halo children decides
  // which halo children survive and which own children are Dependent.
  auto keys_of = [&](const Candidate& c) {
    Cell tmp;
    tmp.vertex_ids.resize(static_cast<std::size_t>(nc));
    for (int v = 0; v < nc; ++v) tmp.vertex_ids[static_cast<std::size_t>(v)] = v;
    auto lattice_of = [&](int v) {
      const LatticeCoord off = reference_vertex_offset(d, v);
      return LatticeCoord{c.corner[0] + off[0], c.corner[1] + off[1], c.corner[2] + off[2]};
    };
    return carrier_keys(d, sub.family, tmp, lattice_of);
  };

  std::vector<bool> keep(cand.size(), false);
  std::vector<bool> is_dependent(cand.size(), false);
  if (sub.family != FEFamily::DiscontinuousQ0) {
    std::map<LatticeCoord, std::pair<std::vector<int>, std::vector<int>>> entity;  // own, halo
    for (std::size_t i = 0; i < cand.size(); ++i)
      for (const LatticeCoord& key : keys_of(cand[i]))
        (cand[i].own ? entity[key].first : entity[key].second).push_back(static_cast<int>(i));
    for (const auto& [key, lists] : entity) {
      if (lists.first.empty() || lists.second.empty()) continue;
      for (int i : lists.first) is_dependent[static_cast<std::size_t>(i)] = true;
      for (int i : lists.second) keep[static_cast<std::size_t>(i)] = true;
    }
  }

  std::vector<int> picked;
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (cand[i].own || keep[i]) picked.push_back(static_cast<int>(i));
  std::sort(picked.begin(), picked.end(),
            [&](int a, int b) { return cand[static_cast<std::size_t>(a)].gcn < cand[static_cast<std::size_t>(b)].gcn; });

  SubdomainMesh fine;
  fine.rank = sub.rank;
  fine.n_ranks = sub.n_ranks;
  fine.dimension = d;
  fine.level = sub.level + 1;
  fine.n_coarse = sub.n_coarse;
  fine.family = sub.family;
  const std::int64_t denom = fine.lattice_denominator();

  std::map<LatticeCoord, int> vertex_index;
  std::set<int> neighbors;
  for (int id : picked) {
    const Candidate& src = cand[static_cast<std::size_t>(id)];
    Cell c;
    c.local_id = static_cast<int>(fine.cells.size());
    c.gcn = src.gcn;
    c.level = fine.level;
    c.parent = src.parent;
    for (int v = 0; v < nc; ++v) {
      const LatticeCoord off = reference_vertex_offset(d, v);
      const LatticeCoord lat = {src.corner[0] + off[0], src.corner[1] + off[1],
                                src.corner[2] + off[2]};
      auto it = vertex_index.find(lat);
      int local_vid;
      if (it == vertex_index.end()) {
        local_vid = static_cast<int>(fine.vertices.size());
        Vertex vert;
        vert.id = local_vid;
        vert.lattice = lat;
        for (int a = 0; a < 3; ++a)
          vert.coords[static_cast<std::size_t>(a)] =
              static_cast<double>(lat[static_cast<std::size_t>(a)]) / static_cast<double>(denom);
        vert.on_boundary = false;
        for (int a = 0; a < d; ++a) {
          const std::int64_t x = lat[static_cast<std::size_t>(a)];
          if (x == 0 || x == denom) vert.on_boundary = true;
        }
        vertex_index.emplace(lat, local_vid);
        fine.vertices.push_back(vert);
      } else {
        local_vid = it->second;
      }
      c.vertex_ids.push_back(local_vid);
    }
    fine.cell_owner.push_back(src.owner);
    if (src.own) {
      fine.cell_class.push_back(is_dependent[static_cast<std::size_t>(id)]
                                    ? CellClass::Dependent
                                    : CellClass::Independent);
    } else {
      fine.cell_class.push_back(CellClass::Halo);
      neighbors.insert(src.owner);
    }
    fine.cells.push_back(std::move(c));
  }

  fine.neighbor_ranks.assign(neighbors.begin(), neighbors.end());
  for (CellClass cc : fine.cell_class) {
    if (cc == CellClass::Halo) ++fine.n_halo;
    if (cc == CellClass::Dependent) ++fine.n_dependent;
    if (cc == CellClass::Independent) ++fine.n_independent;
  }
  fine.n_own = fine.n_dependent + fine.n_independent;
  return fine;
}

}  // namespace parfem
