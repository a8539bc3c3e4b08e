#include "parfem/multigrid.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "parfem/errors.hpp"

namespace parfem {

namespace {

double wall_now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

CsrSparseMatrix combine_system(const CsrSparseMatrix& mass, const CsrSparseMatrix& stiffness,
                               SystemKind kind, double dt) {
  CsrSparseMatrix out = stiffness;
  if (kind == SystemKind::HeatCrankNicolson) {
    // Same sparsity pattern by construction, so the values combine in place.
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] = mass.values[i] + 0.5 * dt * stiffness.values[i];
    }
  }
  return out;
}

/// Interpolation weights of the parent cell's corner dofs at each fine dof.
/// The carrier barycenter is exact in fine lattice coordinates, and the
/// parent spans 2 fine lattice units per axis, so the reference point is an
/// exact multiple of 1/2 and corner weights off the carrier's minimal face
/// vanish exactly.
std::vector<std::vector<std::pair<int, double>>> build_prolong_map(const MultigridLevel& fine,
                                                                   const MultigridLevel& coarse) {
  const SubdomainMesh& fsub = *fine.sub;
  const ParFEMapper& fmap = *fine.mapper;
  const ParFEMapper& cmap = *coarse.mapper;
  const int dim = fsub.dimension;
  const int nv = 1 << dim;

  // Carrier cell of each fine dof: lowest-gcn local cell touching it.
  std::vector<int> home_cell(fmap.n_dofs, -1);
  for (std::size_t c = 0; c < fmap.cell_dofs.size(); ++c) {
    for (int dof : fmap.cell_dofs[c]) {
      if (home_cell[dof] < 0) home_cell[dof] = static_cast<int>(c);
    }
  }

  std::vector<std::vector<std::pair<int, double>>> map(fmap.n_dofs);
  for (int dof = 0; dof < fmap.n_dofs; ++dof) {
    const int cell = home_cell[dof];
    if (cell < 0) throw Error("fine dof without a containing cell");
    const int parent = fsub.cells[cell].parent;
    if (parent < 0) throw Error("fine cell without a parent cell");
    const Cell& pc = coarse.sub->cells[parent];
    const LatticeCoord corner = coarse.sub->vertices[pc.vertex_ids[0]].lattice;

    std::array<double, 3> ref{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      ref[a] = (static_cast<double>(fmap.dofs[dof].key[a]) - 2.0 * static_cast<double>(corner[a])) / 2.0;
    }

    auto& entries = map[dof];
    for (int v = 0; v < nv; ++v) {
      const double w = local_basis_eval(FEFamily::ContinuousQ1, dim, v, ref).value;
      if (std::abs(w) > 1e-12) entries.emplace_back(cmap.cell_dofs[parent][v], w);
    }
  }
  return map;
}

}  // namespace

MultigridHierarchy build_hierarchy(const MeshLevel& coarse, const PartitionMap& pmap,
                                   const HierarchyOptions& options, Transport& tp) {
  if (options.n_levels < 1) throw Error("hierarchy needs at least one level");
  if (options.kind != SystemKind::None && options.family != FEFamily::ContinuousQ1) {
    throw Error("assembled hierarchies support the continuous bilinear family only");
  }

  MultigridHierarchy h;
  h.tp = &tp;
  h.options = options;
  h.levels.resize(options.n_levels);

  for (int l = 0; l < options.n_levels; ++l) {
    MultigridLevel& L = h.levels[l];
    if (l == 0) {
      L.sub = std::make_shared<SubdomainMesh>(build_subdomain(coarse, pmap, tp.rank(), options.family));
    } else {
      L.sub = std::make_shared<SubdomainMesh>(refine_subdomain(*h.levels[l - 1].sub));
    }
    L.space = std::make_shared<FESpace>(build_fespace(L.sub, options.family));
    L.mapper = std::make_shared<const ParFEMapper>(build_parfemapper(L.space, tp));
    L.comm = std::make_unique<ParFECommunicator>(L.mapper, tp);

    if (options.kind != SystemKind::None) {
      const double t0 = wall_now();
      AssembledSystem sys = assemble_system(*L.mapper, *L.comm, options.source, options.time0);
      L.mass = std::move(sys.mass);
      L.stiffness = std::move(sys.stiffness);
      L.load = std::move(sys.load);
      L.system = combine_system(L.mass, L.stiffness, options.kind, options.dt);
      apply_dirichlet_rows(L.system, *L.mapper);
      h.assembly_seconds += wall_now() - t0;
    }

    if (l > 0 && options.family == FEFamily::ContinuousQ1) {
      L.prolong_map = build_prolong_map(L, h.levels[l - 1]);
    }

    L.x.values.assign(static_cast<std::size_t>(L.mapper->n_dofs), 0.0);
    L.b.values.assign(static_cast<std::size_t>(L.mapper->n_dofs), 0.0);
    L.r.values.assign(static_cast<std::size_t>(L.mapper->n_dofs), 0.0);
  }
  return h;
}

std::vector<double> prolongate(const MultigridLevel& fine, const std::vector<double>& coarse_values) {
  std::vector<double> out(fine.prolong_map.size(), 0.0);
  for (std::size_t dof = 0; dof < fine.prolong_map.size(); ++dof) {
    double acc = 0;
    for (const auto& [cd, w] : fine.prolong_map[dof]) acc += w * coarse_values[static_cast<std::size_t>(cd)];
    out[dof] = acc;
  }
  return out;
}

std::vector<double> restrict_residual(const MultigridLevel& fine, const MultigridLevel& coarse,
                                      const std::vector<double>& fine_residual) {
  const ParFEMapper& fmap = *fine.mapper;
  DistributedVector rc;
  rc.values.assign(static_cast<std::size_t>(coarse.mapper->n_dofs), 0.0);
  rc.state = ConsistencyState::Additive;
  for (int dof = 0; dof < fmap.n_dofs; ++dof) {
    if (!fmap.owns_row[static_cast<std::size_t>(dof)]) continue;
    const double r = fine_residual[static_cast<std::size_t>(dof)];
    for (const auto& [cd, w] : fine.prolong_map[static_cast<std::size_t>(dof)]) {
      rc.values[static_cast<std::size_t>(cd)] += w * r;
    }
  }
  coarse.comm->update_master_slave(rc, UpdateMode::AccumulateThenScatter);
  return std::move(rc.values);
}

namespace {

void cycle(MultigridHierarchy& h, int level, DistributedVector& x, const DistributedVector& b,
           const MultigridConfig& cfg, SolveStats& coarse_stats) {
  MultigridLevel& L = h.levels[static_cast<std::size_t>(level)];
  if (level == 0) {
    coarse_stats =
        coarse_solve(L.system, x, b, cfg.coarse_tol, cfg.coarse_max_iter, *L.mapper, *L.comm);
    L.comm->update_halo2(x);
    return;
  }

  SmootherConfig pre = cfg.smoother;
  pre.sweeps = cfg.pre_smooth;
  smooth(L.system, x, b, pre, *L.mapper, *L.comm);
  L.comm->update_halo2(x);

  // Residual on every local row; only authoritative rows feed restriction.
  spmv(L.system, x.values, L.r.values);
  for (std::size_t i = 0; i < L.r.values.size(); ++i) L.r.values[i] = b.values[i] - L.r.values[i];

  MultigridLevel& C = h.levels[static_cast<std::size_t>(level - 1)];
  C.b.values = restrict_residual(L, C, L.r.values);
  // The correction problem keeps homogeneous boundary values.
  for (int dof = C.mapper->n_own_dofs; dof < C.mapper->n_dofs; ++dof) {
    if (C.mapper->class_of[static_cast<std::size_t>(dof)] == DofClass::Dirichlet) {
      C.b.values[static_cast<std::size_t>(dof)] = 0.0;
    }
  }
  C.b.state = ConsistencyState::Consistent;
  C.x.values.assign(C.x.values.size(), 0.0);
  C.x.state = ConsistencyState::Consistent;

  cycle(h, level - 1, C.x, C.b, cfg, coarse_stats);

  const std::vector<double> corr = prolongate(L, C.x.values);
  for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] += corr[i];

  SmootherConfig post = cfg.smoother;
  post.sweeps = cfg.post_smooth;
  smooth(L.system, x, b, post, *L.mapper, *L.comm);
  L.comm->update_halo2(x);
}

}  // namespace

SolveStats v_cycle(MultigridHierarchy& h, DistributedVector& x, const DistributedVector& b,
                   const MultigridConfig& cfg) {
  if (h.levels.empty()) throw Error("empty hierarchy");
  MultigridLevel& top = h.finest();
  if (x.size() != static_cast<std::size_t>(top.mapper->n_dofs)) throw Error("v_cycle size mismatch");

  SolveStats coarse_stats;
  const double t0 = wall_now();
  const double c0 = h.tp->comm_seconds();
  top.comm->update_halo2(x);
  cycle(h, static_cast<int>(h.levels.size()) - 1, x, b, cfg, coarse_stats);
  coarse_stats.solve_seconds = wall_now() - t0;
  coarse_stats.comm_seconds = h.tp->comm_seconds() - c0;
  return coarse_stats;
}

SolveStats solve_outer(MultigridHierarchy& h, DistributedVector& x, const DistributedVector& b,
                       const MultigridConfig& cfg) {
  MultigridLevel& top = h.finest();
  SolveStats stats;
  const double t0 = wall_now();
  const double c0 = h.tp->comm_seconds();

  const double r0 = residual_norm(top.system, x, b, *top.mapper, *h.tp);
  stats.initial_residual = r0;
  stats.final_residual = r0;
  if (r0 == 0.0) {
    stats.converged = true;
    stats.solve_seconds = wall_now() - t0;
    stats.comm_seconds = h.tp->comm_seconds() - c0;
    return stats;
  }

  stats.converged = false;
  for (int outer = 1; outer <= cfg.outer_max_cycles; ++outer) {
    for (int j = 0; j < cfg.cycles; ++j) v_cycle(h, x, b, cfg);
    const double r = residual_norm(top.system, x, b, *top.mapper, *h.tp);
    stats.iterations = outer;
    stats.residuals.push_back(r);
    stats.final_residual = r;
    if (r <= cfg.outer_tol * r0) {
      stats.converged = true;
      break;
    }
  }
  stats.solve_seconds = wall_now() - t0;
  stats.comm_seconds = h.tp->comm_seconds() - c0;
  if (!stats.converged) {
    throw NoConvergenceError("multigrid stalled at relative residual " +
                             std::to_string(stats.final_residual / r0));
  }
  return stats;
}

}  // namespace parfem
