#include "parfem/app.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "parfem/matrix_market.hpp"

namespace parfem {

namespace {

double wall_now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

MultigridConfig make_mg_config(const AppConfig& cfg) {
  MultigridConfig mg;
  mg.cycles = 1;
  mg.smoother = cfg.smoother_config();
  mg.pre_smooth = cfg.pre_smooth;
  mg.post_smooth = cfg.post_smooth;
  mg.outer_tol = cfg.outer_tol;
  mg.outer_max_cycles = cfg.outer_max_cycles;
  return mg;
}

HierarchyOptions make_options(const AppConfig& cfg, SystemKind kind, const ScalarField& source,
                              const ScalarField& dirichlet) {
  HierarchyOptions opts;
  opts.n_levels = cfg.levels;
  opts.family = cfg.fe_family();
  opts.kind = kind;
  opts.dt = cfg.dt;
  opts.time0 = 0.0;
  opts.source = source;
  opts.dirichlet = dirichlet;
  return opts;
}

/// Max over ranks per phase, matching how a run's critical path is read.
void aggregate_phases(Transport& tp, PhaseTimes& ph) {
  ph.initialization = allreduce_max(tp, ph.initialization);
  ph.assembling = allreduce_max(tp, ph.assembling);
  ph.solving = allreduce_max(tp, ph.solving);
  ph.communication = allreduce_max(tp, ph.communication);
  ph.total = allreduce_max(tp, ph.total);
}

struct GatheredSolution {
  KeyedField keyed;
  std::vector<double> global;
};

/// Every authoritative dof appears exactly once across ranks, so the merged
/// field covers each carrier once and the dense vector every global index.
GatheredSolution gather_solution(Transport& tp, const ParFEMapper& mapper,
                                 const std::vector<double>& values) {
  ByteWriter w;
  for (int i = 0; i < mapper.n_dofs; ++i) {
    if (!mapper.owns_row[static_cast<std::size_t>(i)]) continue;
    const DofInfo& d = mapper.dofs[static_cast<std::size_t>(i)];
    w.put_i64(static_cast<std::int64_t>(d.kind));
    w.put_i64(d.key[0]);
    w.put_i64(d.key[1]);
    w.put_i64(d.key[2]);
    w.put_i64(mapper.global_of[static_cast<std::size_t>(i)]);
    w.put_f64(values[static_cast<std::size_t>(i)]);
  }
  const std::vector<Bytes> parts = allgather(tp, w.take());

  GatheredSolution out;
  out.global.assign(static_cast<std::size_t>(mapper.n_global), 0.0);
  for (const Bytes& part : parts) {
    ByteReader rd(part);
    while (!rd.done()) {
      std::array<std::int64_t, 4> key{};
      for (auto& k : key) k = rd.get_i64();
      const std::int64_t g = rd.get_i64();
      const double v = rd.get_f64();
      out.keyed[key] = v;
      out.global[static_cast<std::size_t>(g)] = v;
    }
  }
  return out;
}

struct ErrorNorms {
  double l2 = 0;
  double linf = 0;
};

/// L2 by 2-point Gauss quadrature over own cells (each global cell is owned
/// exactly once); infinity norm over authoritative dofs.
ErrorNorms measure_errors(Transport& tp, const MultigridLevel& top, const std::vector<double>& u,
                          const ScalarField& exact, double t) {
  const SubdomainMesh& sub = *top.sub;
  const ParFEMapper& mapper = *top.mapper;
  const int dim = sub.dimension;
  const double h = 1.0 / static_cast<double>(sub.lattice_denominator());
  const double vol = sub.cell_volume();
  const QuadratureRule rule = gauss_tensor_rule(dim, 2);
  const int nv = 1 << dim;

  double l2_sq = 0;
  for (std::size_t c = 0; c < sub.cells.size(); ++c) {
    if (!sub.is_own(static_cast<int>(c))) continue;
    const std::array<double, 3> lo = sub.vertices[static_cast<std::size_t>(sub.cells[c].vertex_ids[0])].coords;
    const std::vector<int>& dofs = mapper.cell_dofs[c];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double uh = 0;
      for (int v = 0; v < nv; ++v) {
        uh += u[static_cast<std::size_t>(dofs[static_cast<std::size_t>(v)])] *
              local_basis_eval(FEFamily::ContinuousQ1, dim, v, rule.points[q]).value;
      }
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) x[a] = lo[a] + h * rule.points[q][a];
      const double diff = uh - exact(t, x);
      l2_sq += rule.weights[q] * vol * diff * diff;
    }
  }

  double linf = 0;
  for (int i = 0; i < mapper.n_dofs; ++i) {
    if (!mapper.owns_row[static_cast<std::size_t>(i)]) continue;
    const double diff = std::abs(u[static_cast<std::size_t>(i)] - exact(t, mapper.dofs[static_cast<std::size_t>(i)].coords));
    if (diff > linf) linf = diff;
  }

  ErrorNorms out;
  out.l2 = std::sqrt(allreduce_sum(tp, l2_sq));
  out.linf = allreduce_max(tp, linf);
  return out;
}

struct RankReport {
  double l2 = 0;
  double linf = 0;
  PhaseTimes phases;
  std::vector<double> residuals;
  GatheredSolution solution;
  std::int64_t n_global = 0;
};

RankReport heat_rank_body(Transport& tp, const AppConfig& cfg) {
  tp.reset_counters();
  const double t_begin = wall_now();

  HeatProblem prob{cfg.dimension};
  const ScalarField f = prob.source();
  const ScalarField g = prob.dirichlet();
  const ScalarField uex = prob.exact();

  const MeshLevel coarse = generate_unit_mesh(cfg.dimension, cfg.n_coarse);
  const PartitionMap pmap = partition_cells(coarse, tp.size(), cfg.partition_strategy());
  MultigridHierarchy h =
      build_hierarchy(coarse, pmap, make_options(cfg, SystemKind::HeatCrankNicolson, f, g), tp);

  PhaseTimes ph;
  ph.assembling = h.assembly_seconds;
  ph.initialization = (wall_now() - t_begin) - h.assembly_seconds;

  MultigridLevel& top = h.finest();
  const ParFEMapper& mapper = *top.mapper;
  const MultigridConfig mg = make_mg_config(cfg);

  // Right-hand side operator M - dt/2 K; the level system is M + dt/2 K.
  CsrSparseMatrix rhs_op = top.stiffness;
  for (std::size_t i = 0; i < rhs_op.values.size(); ++i) {
    rhs_op.values[i] = top.mass.values[i] - 0.5 * cfg.dt * top.stiffness.values[i];
  }

  DistributedVector u(static_cast<std::size_t>(mapper.n_dofs), 0.0);
  for (int i = 0; i < mapper.n_dofs; ++i) {
    u[static_cast<std::size_t>(i)] = uex(0.0, mapper.dofs[static_cast<std::size_t>(i)].coords);
  }

  DistributedVector load_now = top.load;  // assembled at time 0
  DistributedVector b(static_cast<std::size_t>(mapper.n_dofs), 0.0);
  std::vector<double> residuals;

  const int steps = cfg.time_steps();
  for (int step = 0; step < steps; ++step) {
    const double t_next = static_cast<double>(step + 1) * cfg.dt;

    double t_mark = wall_now();
    DistributedVector load_next = assemble_load(mapper, *top.comm, f, t_next);
    ph.assembling += wall_now() - t_mark;

    spmv(rhs_op, u.values, b.values);
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      b[i] += 0.5 * cfg.dt * (load_now[i] + load_next[i]);
    }
    apply_dirichlet_rhs(b, g, t_next, mapper);
    for (int i = 0; i < mapper.n_dofs; ++i) {
      if (mapper.class_of[static_cast<std::size_t>(i)] == DofClass::Dirichlet) {
        u[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
      }
    }

    t_mark = wall_now();
    try {
      const SolveStats stats = solve_outer(h, u, b, mg);
      residuals = stats.residuals;
    } catch (const NoConvergenceError& e) {
      throw NoConvergenceError("time step " + std::to_string(step + 1) + ": " + e.what());
    }
    ph.solving += wall_now() - t_mark;

    load_now = std::move(load_next);
  }

  ph.total = wall_now() - t_begin;
  ph.communication = tp.comm_seconds();
  aggregate_phases(tp, ph);

  const double t_final = static_cast<double>(steps) * cfg.dt;
  const ErrorNorms err = measure_errors(tp, top, u.values, uex, t_final);
  GatheredSolution sol = gather_solution(tp, mapper, u.values);

  RankReport out;
  out.l2 = err.l2;
  out.linf = err.linf;
  out.phases = ph;
  out.residuals = std::move(residuals);
  out.n_global = mapper.n_global;
  if (tp.rank() == 0) out.solution = std::move(sol);
  return out;
}

RankReport poisson_rank_body(Transport& tp, const AppConfig& cfg) {
  tp.reset_counters();
  const double t_begin = wall_now();

  PoissonProblem prob{cfg.dimension};
  const ScalarField f = prob.source();
  const ScalarField g = prob.dirichlet();
  const ScalarField uex = prob.exact();

  const MeshLevel coarse = generate_unit_mesh(cfg.dimension, cfg.n_coarse);
  const PartitionMap pmap = partition_cells(coarse, tp.size(), cfg.partition_strategy());
  MultigridHierarchy h =
      build_hierarchy(coarse, pmap, make_options(cfg, SystemKind::PoissonStiffness, f, g), tp);

  PhaseTimes ph;
  ph.assembling = h.assembly_seconds;
  ph.initialization = (wall_now() - t_begin) - h.assembly_seconds;

  MultigridLevel& top = h.finest();
  const ParFEMapper& mapper = *top.mapper;

  DistributedVector b = top.load;
  apply_dirichlet_rhs(b, g, 0.0, mapper);
  DistributedVector u(static_cast<std::size_t>(mapper.n_dofs), 0.0);
  for (int i = 0; i < mapper.n_dofs; ++i) {
    if (mapper.class_of[static_cast<std::size_t>(i)] == DofClass::Dirichlet) {
      u[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
    }
  }

  const double t_mark = wall_now();
  const SolveStats stats = solve_outer(h, u, b, make_mg_config(cfg));
  ph.solving = wall_now() - t_mark;

  ph.total = wall_now() - t_begin;
  ph.communication = tp.comm_seconds();
  aggregate_phases(tp, ph);

  const ErrorNorms err = measure_errors(tp, top, u.values, uex, 0.0);
  GatheredSolution sol = gather_solution(tp, mapper, u.values);

  RankReport out;
  out.l2 = err.l2;
  out.linf = err.linf;
  out.phases = ph;
  out.residuals = stats.residuals;
  out.n_global = mapper.n_global;
  if (tp.rank() == 0) out.solution = std::move(sol);
  return out;
}

SolveReport to_report(std::vector<RankReport> ranks, const AppConfig& cfg) {
  RankReport& r0 = ranks.front();
  SolveReport rep;
  rep.l2_error = r0.l2;
  rep.linf_error = r0.linf;
  rep.metrics.phases = r0.phases;
  rep.metrics.ranks = cfg.ranks;
  rep.cycle_residuals = std::move(r0.residuals);
  rep.global_solution = std::move(r0.solution.global);
  rep.solution_by_key = std::move(r0.solution.keyed);
  rep.n_global_dofs = r0.n_global;
  return rep;
}

}  // namespace

SolveReport run_heat(const AppConfig& cfg) {
  cfg.validate();
  std::function<RankReport(Transport&)> body = [&cfg](Transport& tp) {
    return heat_rank_body(tp, cfg);
  };
  return to_report(run_on_ranks_collect<RankReport>(cfg.ranks, body), cfg);
}

SolveReport run_poisson(const AppConfig& cfg) {
  cfg.validate();
  std::function<RankReport(Transport&)> body = [&cfg](Transport& tp) {
    return poisson_rank_body(tp, cfg);
  };
  return to_report(run_on_ranks_collect<RankReport>(cfg.ranks, body), cfg);
}

SolveReport run_bench(const AppConfig& cfg, const std::string& reference_path) {
  const RunMetrics reference = metrics_from_csv(read_text_file(reference_path));
  SolveReport rep = run_heat(cfg);
  apply_reference(rep.metrics, reference);
  return rep;
}

std::int64_t ClassifyReport::total(int level, DofClass c) const {
  std::int64_t sum = 0;
  for (const auto& per_rank : counts[static_cast<std::size_t>(level)]) {
    sum += per_rank[static_cast<std::size_t>(static_cast<int>(c))];
  }
  return sum;
}

ClassifyReport run_classify(const AppConfig& cfg) {
  cfg.validate();

  using LevelCounts = std::vector<std::array<std::int64_t, kNumDofClasses>>;
  std::function<std::vector<LevelCounts>(Transport&)> body =
      [&cfg](Transport& tp) -> std::vector<LevelCounts> {
    const MeshLevel coarse = generate_unit_mesh(cfg.dimension, cfg.n_coarse);
    const PartitionMap pmap = partition_cells(coarse, tp.size(), cfg.partition_strategy());
    HierarchyOptions opts = make_options(cfg, SystemKind::None, {}, {});
    const MultigridHierarchy h = build_hierarchy(coarse, pmap, opts, tp);

    std::vector<LevelCounts> levels;
    for (const MultigridLevel& L : h.levels) {
      ByteWriter w;
      for (int c = 0; c < kNumDofClasses; ++c) w.put_i64(L.mapper->n_class[static_cast<std::size_t>(c)]);
      const std::vector<Bytes> parts = allgather(tp, w.take());
      LevelCounts per_rank(parts.size());
      for (std::size_t r = 0; r < parts.size(); ++r) {
        ByteReader rd(parts[r]);
        for (int c = 0; c < kNumDofClasses; ++c) per_rank[r][static_cast<std::size_t>(c)] = rd.get_i64();
      }
      levels.push_back(std::move(per_rank));
    }
    return levels;
  };

  auto per_rank_views = run_on_ranks_collect<std::vector<LevelCounts>>(cfg.ranks, body);

  ClassifyReport rep;
  rep.counts = std::move(per_rank_views.front());

  std::ostringstream csv;
  csv << "level,rank,class,count\n";
  for (std::size_t level = 0; level < rep.counts.size(); ++level) {
    for (std::size_t r = 0; r < rep.counts[level].size(); ++r) {
      for (int c = 0; c < kNumDofClasses; ++c) {
        csv << level << "," << r << "," << to_string(static_cast<DofClass>(c)) << ","
            << rep.counts[level][r][static_cast<std::size_t>(c)] << "\n";
      }
    }
    for (int c = 0; c < kNumDofClasses; ++c) {
      csv << level << ",total," << to_string(static_cast<DofClass>(c)) << ","
          << rep.total(static_cast<int>(level), static_cast<DofClass>(c)) << "\n";
    }
  }
  rep.csv = csv.str();
  return rep;
}

void export_system(const AppConfig& cfg, const std::string& prefix) {
  cfg.validate();
  std::function<int(Transport&)> body = [&cfg, &prefix](Transport& tp) {
    PoissonProblem prob{cfg.dimension};
    const MeshLevel coarse = generate_unit_mesh(cfg.dimension, cfg.n_coarse);
    const PartitionMap pmap = partition_cells(coarse, tp.size(), cfg.partition_strategy());
    MultigridHierarchy h = build_hierarchy(
        coarse, pmap, make_options(cfg, SystemKind::PoissonStiffness, prob.source(), prob.dirichlet()),
        tp);
    MultigridLevel& top = h.finest();
    DistributedVector b = top.load;
    apply_dirichlet_rhs(b, prob.dirichlet(), 0.0, *top.mapper);
    export_matrixmarket(top.system, b.values, *top.mapper, tp, prefix + ".mtx",
                        prefix + "_rhs.mtx");
    return 0;
  };
  run_on_ranks_collect<int>(cfg.ranks, body);
}

}  // namespace parfem
