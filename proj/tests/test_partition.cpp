#include <algorithm>
#include <map>
#include <vector>

#include "doctest.h"
#include "support.hpp"

using namespace parfem;

TEST_SUITE_BEGIN("partition");

TEST_CASE("two-way split of the 2x2 mesh") {
  const MeshLevel mesh = generate_unit_mesh(2, 2);
  for (PartitionStrategy s : {PartitionStrategy::CoordinateBisection, PartitionStrategy::Greedy}) {
    const PartitionMap pmap = partition_cells(mesh, 2, s);
    CHECK(pmap.n_ranks == 2);
    CHECK(pmap.owner == std::vector<int>{0, 0, 1, 1});
  }
}

TEST_CASE("64 cells over 8 ranks balance exactly") {
  for (const MeshLevel& mesh : {generate_unit_mesh(2, 8), generate_unit_mesh(3, 4)}) {
    for (PartitionStrategy s : {PartitionStrategy::CoordinateBisection, PartitionStrategy::Greedy}) {
      const PartitionMap pmap = partition_cells(mesh, 8, s);
      std::map<int, int> counts;
      for (int owner : pmap.owner) counts[owner]++;
      REQUIRE(counts.size() == 8);
      for (const auto& [rank, n] : counts) CHECK(n == 8);
    }
  }
}

TEST_CASE("odd split balances to within one cell") {
  const MeshLevel mesh = generate_unit_mesh(2, 3);
  for (PartitionStrategy s : {PartitionStrategy::CoordinateBisection, PartitionStrategy::Greedy}) {
    const PartitionMap pmap = partition_cells(mesh, 2, s);
    std::map<int, int> counts;
    for (int owner : pmap.owner) counts[owner]++;
    std::vector<int> sizes;
    for (const auto& [rank, n] : counts) sizes.push_back(n);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{4, 5});
  }
}

TEST_CASE("descendant partition inherits along parent chains") {
  const MeshLevel mesh = generate_unit_mesh(2, 2);
  const PartitionMap coarse = partition_cells(mesh, 2, PartitionStrategy::CoordinateBisection);
  const PartitionMap fine = derive_descendant_partition(coarse, 4, 1);
  REQUIRE(fine.owner.size() == 16);
  for (std::int64_t p = 0; p < 4; ++p)
    for (int c = 0; c < 4; ++c)
      CHECK(fine.owner[static_cast<std::size_t>(child_gcn(p, 4, c))] ==
            coarse.owner[static_cast<std::size_t>(p)]);
}

TEST_CASE("subdomain of the split 2x2 mesh, by family") {
  const MeshLevel mesh = generate_unit_mesh(2, 2);
  const PartitionMap pmap = partition_cells(mesh, 2, PartitionStrategy::CoordinateBisection);

  const SubdomainMesh q1 = build_subdomain(mesh, pmap, 0, FEFamily::ContinuousQ1);
  CHECK(q1.n_own == 2);
  CHECK(q1.n_dependent == 2);
  CHECK(q1.n_independent == 0);
  CHECK(q1.n_halo == 2);
  CHECK(q1.neighbor_ranks == std::vector<int>{1});

  const SubdomainMesh q0 = build_subdomain(mesh, pmap, 0, FEFamily::DiscontinuousQ0);
  CHECK(q0.n_halo == 0);
  CHECK(q0.n_dependent == 0);
  CHECK(q0.n_independent == 2);
}

TEST_CASE("single-rank subdomain keeps everything and no halo") {
  const MeshLevel fine = refine_uniform(generate_unit_mesh(2, 2));
  const PartitionMap pmap = partition_cells(fine, 1, PartitionStrategy::Greedy);
  const SubdomainMesh sub = build_subdomain(fine, pmap, 0, FEFamily::ContinuousQ1);
  CHECK(sub.n_own == 16);
  CHECK(sub.n_halo == 0);

  const MeshLevel coarse = generate_unit_mesh(2, 2);
  const PartitionMap cmap = partition_cells(coarse, 1, PartitionStrategy::Greedy);
  const SubdomainMesh refined =
      refine_subdomain(build_subdomain(coarse, cmap, 0, FEFamily::ContinuousQ1));
  CHECK(refined.n_own == 16);
  CHECK(refined.n_halo == 0);
}

TEST_CASE("refined two-rank subdomain grows the halo band") {
  const MeshLevel mesh = generate_unit_mesh(2, 2);
  const PartitionMap pmap = partition_cells(mesh, 2, PartitionStrategy::CoordinateBisection);
  const SubdomainMesh sub =
      refine_subdomain(build_subdomain(mesh, pmap, 0, FEFamily::ContinuousQ1));
  CHECK(sub.n_halo == 4);
  CHECK(sub.level == 1);
}

TEST_CASE("local refinement equals rebuilding from the refined global mesh") {
  for (int dim : {2, 3}) {
    const std::int64_t n_coarse = dim == 2 ? 4 : 2;
    MeshLevel mesh = generate_unit_mesh(dim, n_coarse);
    for (int k : {2, 3, 4}) {
      const PartitionMap pmap = partition_cells(mesh, k, PartitionStrategy::CoordinateBisection);
      for (FEFamily family : {FEFamily::ContinuousQ1, FEFamily::NonconformingRotatedQ1,
                              FEFamily::DiscontinuousQ0}) {
        MeshLevel global = mesh;
        PartitionMap gmap = pmap;
        std::vector<SubdomainMesh> subs;
        for (int r = 0; r < k; ++r) subs.push_back(build_subdomain(mesh, pmap, r, family));
        for (int refinement = 1; refinement <= 2; ++refinement) {
          global = refine_uniform(global);
          gmap = derive_descendant_partition(pmap, mesh.n_children(), refinement);
          for (int r = 0; r < k; ++r) {
            subs[static_cast<std::size_t>(r)] = refine_subdomain(subs[static_cast<std::size_t>(r)]);
            const SubdomainMesh rebuilt = build_subdomain(global, gmap, r, family);
            CHECK(testsup::subdomain_signature(subs[static_cast<std::size_t>(r)]) ==
                  testsup::subdomain_signature(rebuilt));
          }
        }
      }
    }
  }
}

TEST_SUITE_END();
