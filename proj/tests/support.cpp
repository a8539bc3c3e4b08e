#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>

namespace testsup {

using namespace parfem;

Key4 dof_key(const DofInfo& d) {
  return {static_cast<std::int64_t>(d.kind), d.key[0], d.key[1], d.key[2]};
}

double key_noise(const Key4& k, std::uint64_t salt) {
  std::uint64_t h = salt * 0x9e3779b97f4a7c15ULL;
  for (std::int64_t part : k) {
    h ^= static_cast<std::uint64_t>(part) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return static_cast<double>(h >> 11) / static_cast<double>(1ULL << 52) - 1.0;
}

std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("lu_solve shape mismatch");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      a[r * n + col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * b[c];
    b[i] = acc / a[i * n + i];
  }
  return b;
}

namespace {

std::array<int, 3> ring_offset(int dimension, int v) {
  static const int ring[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::array<int, 3> o{0, 0, 0};
  o[0] = ring[v & 3][0];
  o[1] = ring[v & 3][1];
  if (dimension == 3) o[2] = v >> 2;
  return o;
}

}  // namespace

ElementOracle q1_element_oracle(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                int dimension) {
  // 1d exact integrals over [0,1]: mass of the two hat traces, and their
  // derivative products.
  const double m1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
  const double k1[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
  ElementOracle out;
  out.n = 1 << dimension;
  out.mass.assign(static_cast<std::size_t>(out.n * out.n), 0.0);
  out.stiffness.assign(static_cast<std::size_t>(out.n * out.n), 0.0);
  std::array<double, 3> h{1.0, 1.0, 1.0};
  for (int a = 0; a < dimension; ++a) h[static_cast<std::size_t>(a)] =
      hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)];
  for (int v = 0; v < out.n; ++v) {
    for (int w = 0; w < out.n; ++w) {
      const std::array<int, 3> ov = ring_offset(dimension, v), ow = ring_offset(dimension, w);
      double mass = 1.0;
      for (int a = 0; a < dimension; ++a)
        mass *= h[static_cast<std::size_t>(a)] * m1[ov[static_cast<std::size_t>(a)]][ow[static_cast<std::size_t>(a)]];
      double stiff = 0.0;
      for (int a = 0; a < dimension; ++a) {
        double term = k1[ov[static_cast<std::size_t>(a)]][ow[static_cast<std::size_t>(a)]] /
                      h[static_cast<std::size_t>(a)];
        for (int b = 0; b < dimension; ++b)
          if (b != a)
            term *= h[static_cast<std::size_t>(b)] * m1[ov[static_cast<std::size_t>(b)]][ow[static_cast<std::size_t>(b)]];
        stiff += term;
      }
      out.mass[static_cast<std::size_t>(v * out.n + w)] = mass;
      out.stiffness[static_cast<std::size_t>(v * out.n + w)] = stiff;
    }
  }
  return out;
}

std::vector<double> q1_load_oracle(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                   int dimension, const ScalarField& f, double t) {
  const double g = std::sqrt(3.0 / 5.0);
  const double pts[3] = {0.5 * (1.0 - g), 0.5, 0.5 * (1.0 + g)};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const int n = 1 << dimension;
  std::vector<double> load(static_cast<std::size_t>(n), 0.0);
  double vol = 1.0;
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (int a = 0; a < dimension; ++a) {
    h[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)];
    vol *= h[static_cast<std::size_t>(a)];
  }
  const int n_q = (dimension == 3) ? 27 : 9;
  for (int q = 0; q < n_q; ++q) {
    std::array<int, 3> qi{q % 3, (q / 3) % 3, (q / 9) % 3};
    std::array<double, 3> ref{pts[qi[0]], pts[qi[1]], dimension == 3 ? pts[qi[2]] : 0.0};
    double w = wts[qi[0]] * wts[qi[1]] * (dimension == 3 ? wts[qi[2]] : 1.0);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dimension; ++a)
      x[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] +
                                       h[static_cast<std::size_t>(a)] * ref[static_cast<std::size_t>(a)];
    const double fv = f(t, x);
    for (int v = 0; v < n; ++v) {
      const std::array<int, 3> ov = ring_offset(dimension, v);
      double basis = 1.0;
      for (int a = 0; a < dimension; ++a) {
        const double xi = ref[static_cast<std::size_t>(a)];
        basis *= ov[static_cast<std::size_t>(a)] ? xi : 1.0 - xi;
      }
      load[static_cast<std::size_t>(v)] += w * vol * fv * basis;
    }
  }
  return load;
}

namespace {

void put_key(ByteWriter& w, const Key4& k) {
  for (std::int64_t part : k) w.put_i64(part);
}

Key4 get_key(ByteReader& r) {
  Key4 k;
  for (std::int64_t& part : k) part = r.get_i64();
  return k;
}

}  // namespace

KeyMatrix gather_matrix(const CsrSparseMatrix& a, const ParFEMapper& m, Transport& tp) {
  ByteWriter w;
  for (int i = 0; i < m.n_dofs; ++i) {
    if (!m.owns_row[static_cast<std::size_t>(i)]) continue;
    put_key(w, dof_key(m.dofs[static_cast<std::size_t>(i)]));
    w.put_i64(a.row_offsets[static_cast<std::size_t>(i) + 1] - a.row_offsets[static_cast<std::size_t>(i)]);
    for (int k = a.row_offsets[static_cast<std::size_t>(i)];
         k < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      put_key(w, dof_key(m.dofs[static_cast<std::size_t>(a.col_indices[static_cast<std::size_t>(k)])]));
      w.put_f64(a.values[static_cast<std::size_t>(k)]);
    }
  }
  KeyMatrix out;
  std::set<Key4> rows_seen;
  for (Bytes& payload : allgather(tp, w.take())) {
    ByteReader r(std::move(payload));
    while (!r.done()) {
      const Key4 row = get_key(r);
      if (!rows_seen.insert(row).second) throw std::logic_error("matrix row owned twice");
      const std::int64_t count = r.get_i64();
      for (std::int64_t e = 0; e < count; ++e) {
        const Key4 col = get_key(r);
        out[{row, col}] = r.get_f64();
      }
    }
  }
  return out;
}

std::map<Key4, double> gather_vector(const std::vector<double>& v, const ParFEMapper& m,
                                     Transport& tp) {
  ByteWriter w;
  for (int i = 0; i < m.n_dofs; ++i) {
    if (!m.owns_row[static_cast<std::size_t>(i)]) continue;
    put_key(w, dof_key(m.dofs[static_cast<std::size_t>(i)]));
    w.put_f64(v[static_cast<std::size_t>(i)]);
  }
  std::map<Key4, double> out;
  for (Bytes& payload : allgather(tp, w.take())) {
    ByteReader r(std::move(payload));
    while (!r.done()) {
      const Key4 key = get_key(r);
      if (!out.emplace(key, 0.0).second) throw std::logic_error("vector entry owned twice");
      out[key] = r.get_f64();
    }
  }
  return out;
}

double global_dot(const std::vector<double>& x, const std::vector<double>& y,
                  const ParFEMapper& m, Transport& tp) {
  double local = 0.0;
  for (int i = 0; i < m.n_dofs; ++i)
    if (m.owns_row[static_cast<std::size_t>(i)])
      local += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  return allreduce_sum(tp, local);
}

SubdomainSignature subdomain_signature(const SubdomainMesh& sub) {
  SubdomainSignature sig;
  for (std::size_t c = 0; c < sub.cells.size(); ++c)
    sig.cells.push_back({sub.cells[c].gcn, static_cast<std::int64_t>(sub.cell_owner[c]),
                         static_cast<std::int64_t>(sub.cell_class[c])});
  std::sort(sig.cells.begin(), sig.cells.end());
  for (const Vertex& v : sub.vertices) sig.vertex_lattice.push_back(v.lattice);
  std::sort(sig.vertex_lattice.begin(), sig.vertex_lattice.end());
  sig.counts = {sub.n_own, sub.n_dependent, sub.n_independent, sub.n_halo};
  return sig;
}

namespace {

struct DofRecord {
  int rank = 0;
  int class_of = 0;
  int master_rank_of = -1;
  int diri_authority = -1;
  int owns_row = 0;
  std::int64_t global_of = -1;
};

std::string key_text(const Key4& k) {
  return "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," + std::to_string(k[2]) +
         "," + std::to_string(k[3]) + ")";
}

// Valid class patterns of one carrier's replicas across ranks.
void check_replicas(const Key4& key, const std::vector<DofRecord>& reps,
                    std::vector<std::string>& viol) {
  auto note = [&](const std::string& msg) { viol.push_back("carrier " + key_text(key) + ": " + msg); };

  int owners = 0;
  std::int64_t gid = reps.front().global_of;
  for (const DofRecord& r : reps) {
    owners += r.owns_row;
    if (r.global_of != gid) note("replicas disagree on the global id");
    if (r.global_of < 0) note("unnumbered replica");
  }
  if (owners != 1) note("expected exactly one numbering authority, found " + std::to_string(owners));

  std::array<int, kNumDofClasses> tally{};
  for (const DofRecord& r : reps) tally[static_cast<std::size_t>(r.class_of)]++;
  const int m = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Master))];
  const int ind = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Independent))];
  const int d1 = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Dependent1))];
  const int d2 = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Dependent2))];
  const int sl = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Slave))];
  const int h1 = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Halo1))];
  const int h2 = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Halo2))];
  const int di = tally[static_cast<std::size_t>(static_cast<int>(DofClass::Dirichlet))];

  if (di > 0) {
    if (di != static_cast<int>(reps.size())) note("boundary carrier with non-Dirichlet replicas");
    int auth = -1;
    for (const DofRecord& r : reps)
      if (r.diri_authority >= 0) {
        if (auth >= 0 && auth != r.diri_authority) note("replicas disagree on the Dirichlet authority");
        auth = r.diri_authority;
      }
    if (auth < 0) note("Dirichlet carrier without an authority");
    for (const DofRecord& r : reps)
      if (r.owns_row && r.rank != auth) note("Dirichlet numbering done off the authority rank");
    return;
  }

  const int own_classes = m + ind + d1 + d2;
  if (own_classes != 1) note("expected exactly one computing replica, found " + std::to_string(own_classes));
  if (m == 1) {
    if (sl < 1) note("master without a slave");
    if (ind + d1 + d2 > 0) note("master mixed with non-interface own classes");
    int master_rank = -1;
    for (const DofRecord& r : reps)
      if (r.class_of == static_cast<int>(DofClass::Master)) master_rank = r.rank;
    for (const DofRecord& r : reps)
      if (r.master_rank_of >= 0 && r.master_rank_of != master_rank)
        note("replica names the wrong master rank");
  } else if (ind == 1) {
    if (reps.size() != 1) note("independent dof replicated");
  } else if (d1 + d2 == 1) {
    // Dependent-1/2 and Halo-1/2 are decided against each rank's own master
    // set, so a dependent dof may mirror as any mix of the two halo classes.
    if (sl > 0) note("dependent dof with slave replicas");
    if (h1 + h2 < 1) note("dependent dof with no halo mirror");
  }
}

}  // namespace

std::vector<std::string> check_mapper_invariants(int dimension, std::int64_t n_coarse, int k,
                                                 FEFamily family, int levels,
                                                 PartitionStrategy strategy) {
  auto per_rank = run_on_ranks_collect<std::vector<std::string>>(k, [&](Transport& tp) {
    std::vector<std::string> viol;
    MeshLevel mesh = generate_unit_mesh(dimension, n_coarse);
    PartitionMap pmap = partition_cells(mesh, k, strategy);
    SubdomainMesh sub = build_subdomain(mesh, pmap, tp.rank(), family);
    for (int l = 1; l < levels; ++l) sub = refine_subdomain(sub);
    auto subp = std::make_shared<const SubdomainMesh>(std::move(sub));
    auto space = std::make_shared<const FESpace>(build_fespace(subp, family));
    const ParFEMapper m = build_parfemapper(space, tp);

    // Local layout: classes sorted, class ranges consecutive, counts add up.
    int own_count = 0;
    for (int i = 0; i < m.n_dofs; ++i) {
      if (i > 0 && m.class_of[static_cast<std::size_t>(i)] < m.class_of[static_cast<std::size_t>(i) - 1])
        viol.push_back("dof classes not sorted after reorder");
      if (is_own_class(m.class_of[static_cast<std::size_t>(i)])) ++own_count;
      const bool should_own =
          is_own_class(m.class_of[static_cast<std::size_t>(i)]) ||
          (m.class_of[static_cast<std::size_t>(i)] == DofClass::Dirichlet &&
           m.diri_authority[static_cast<std::size_t>(i)] == m.rank);
      if (static_cast<bool>(m.owns_row[static_cast<std::size_t>(i)]) != should_own)
        viol.push_back("owns_row disagrees with class and authority");
    }
    if (own_count != m.n_own_dofs) viol.push_back("n_own_dofs does not match the class layout");
    int class_sum = 0;
    for (int c = 0; c < kNumDofClasses; ++c) class_sum += m.n_class[static_cast<std::size_t>(c)];
    if (class_sum != m.n_dofs) viol.push_back("class counts do not sum to n_dofs");
    if (m.count(DofClass::Master) + m.count(DofClass::Independent) +
            m.count(DofClass::Dependent1) + m.count(DofClass::Dependent2) != m.n_own_dofs)
      viol.push_back("own classes do not sum to n_own_dofs");
    for (int j = 0; j < m.n_own_dofs; ++j)
      if (m.global_of[static_cast<std::size_t>(j)] - j != m.global_of[0])
        viol.push_back("own global ids are not one consecutive block");

    // Replica table: per dof key, class and numbering metadata.
    ByteWriter w;
    w.put_i64(m.n_own_dofs);
    w.put_i64(m.n_global_own);
    w.put_i64(m.n_global);
    w.put_i64(m.n_dofs);
    for (int i = 0; i < m.n_dofs; ++i) {
      put_key(w, dof_key(m.dofs[static_cast<std::size_t>(i)]));
      w.put_i64(static_cast<std::int64_t>(m.class_of[static_cast<std::size_t>(i)]));
      w.put_i64(m.master_rank_of[static_cast<std::size_t>(i)]);
      w.put_i64(m.diri_authority[static_cast<std::size_t>(i)]);
      w.put_i64(m.owns_row[static_cast<std::size_t>(i)] ? 1 : 0);
      w.put_i64(m.global_of[static_cast<std::size_t>(i)]);
    }
    // Channel table: per kind and peer, the send and recv carrier keys.
    for (int kind = 0; kind < kNumChannelKinds; ++kind) {
      for (const auto& [peer, ch] : m.channels[static_cast<std::size_t>(kind)]) {
        w.put_i64(kind);
        w.put_i64(peer);
        w.put_i64(static_cast<std::int64_t>(ch.send_dofs.size()));
        w.put_i64(static_cast<std::int64_t>(ch.recv_dofs.size()));
        for (int dof : ch.send_dofs) put_key(w, dof_key(m.dofs[static_cast<std::size_t>(dof)]));
        for (int dof : ch.recv_dofs) put_key(w, dof_key(m.dofs[static_cast<std::size_t>(dof)]));
      }
    }
    std::vector<Bytes> tables = allgather(tp, w.take());
    if (tp.rank() != 0) return viol;

    // Rank 0 replays every table and checks the cross-rank invariants.
    std::map<Key4, std::vector<DofRecord>> replicas;
    std::vector<std::map<Key4, int>> class_by_rank(static_cast<std::size_t>(k));
    // (kind, from, to) -> ordered key lists
    std::map<std::array<int, 3>, std::vector<Key4>> sends, recvs;
    std::vector<std::int64_t> own_counts(static_cast<std::size_t>(k));
    std::int64_t n_global_own = -1, n_global = -1;
    for (int r = 0; r < k; ++r) {
      ByteReader rd(std::move(tables[static_cast<std::size_t>(r)]));
      own_counts[static_cast<std::size_t>(r)] = rd.get_i64();
      const std::int64_t go = rd.get_i64(), g = rd.get_i64(), nd = rd.get_i64();
      if (n_global_own < 0) {
        n_global_own = go;
        n_global = g;
      } else if (go != n_global_own || g != n_global) {
        viol.push_back("ranks disagree on the global dof totals");
      }
      for (std::int64_t i = 0; i < nd; ++i) {
        const Key4 key = get_key(rd);
        DofRecord rec;
        rec.rank = r;
        rec.class_of = static_cast<int>(rd.get_i64());
        rec.master_rank_of = static_cast<int>(rd.get_i64());
        rec.diri_authority = static_cast<int>(rd.get_i64());
        rec.owns_row = static_cast<int>(rd.get_i64());
        rec.global_of = rd.get_i64();
        replicas[key].push_back(rec);
        class_by_rank[static_cast<std::size_t>(r)][key] = rec.class_of;
      }
      while (!rd.done()) {
        const int kind = static_cast<int>(rd.get_i64());
        const int peer = static_cast<int>(rd.get_i64());
        const std::int64_t n_send = rd.get_i64(), n_recv = rd.get_i64();
        auto& s = sends[{kind, r, peer}];
        auto& v = recvs[{kind, peer, r}];
        for (std::int64_t i = 0; i < n_send; ++i) s.push_back(get_key(rd));
        for (std::int64_t i = 0; i < n_recv; ++i) v.push_back(get_key(rd));
      }
    }

    std::int64_t own_total = 0;
    for (std::int64_t c : own_counts) own_total += c;
    if (own_total != n_global_own) viol.push_back("sum of rank own counts misses n_global_own");

    for (const auto& [key, reps] : replicas) check_replicas(key, reps, viol);

    // Global numbering bijection over authoritative rows.
    std::vector<std::int64_t> ids;
    for (const auto& [key, reps] : replicas)
      for (const DofRecord& rec : reps)
        if (rec.owns_row) ids.push_back(rec.global_of);
    std::sort(ids.begin(), ids.end());
    if (static_cast<std::int64_t>(ids.size()) != n_global)
      viol.push_back("authoritative row count misses n_global");
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] != static_cast<std::int64_t>(i)) {
        viol.push_back("global ids are not a bijection onto [0, n_global)");
        break;
      }

    // Channel symmetry: a send list pairs with the peer's recv list for the
    // same carriers in the same order; recv classes match the channel kind.
    for (const auto& [route, sent] : sends) {
      auto it = recvs.find(route);
      if (it == recvs.end() || it->second != sent) {
        viol.push_back("channel lists of kind " + std::to_string(route[0]) + " between ranks " +
                       std::to_string(route[1]) + " and " + std::to_string(route[2]) +
                       " do not pair up");
        continue;
      }
      for (const Key4& key : sent) {
        const int send_class = class_by_rank[static_cast<std::size_t>(route[1])].at(key);
        const int recv_class = class_by_rank[static_cast<std::size_t>(route[2])].at(key);
        const int kind = route[0];
        if (kind == static_cast<int>(ChannelKind::MasterSlave)) {
          if (send_class != static_cast<int>(DofClass::Master) &&
              send_class != static_cast<int>(DofClass::Dirichlet))
            viol.push_back("carrier " + key_text(key) + ": non-master on the master-slave send side");
          if (recv_class != static_cast<int>(DofClass::Slave) &&
              recv_class != static_cast<int>(DofClass::Dirichlet))
            viol.push_back("carrier " + key_text(key) + ": non-slave on the master-slave recv side");
        } else if (kind == static_cast<int>(ChannelKind::Halo1Exchange)) {
          if (recv_class != static_cast<int>(DofClass::Halo1))
            viol.push_back("carrier " + key_text(key) + ": halo-1 channel delivers to a non-halo-1 dof");
        } else {
          if (recv_class != static_cast<int>(DofClass::Halo2))
            viol.push_back("carrier " + key_text(key) + ": halo-2 channel delivers to a non-halo-2 dof");
        }
      }
    }
    for (const auto& [route, got] : recvs)
      if (sends.find(route) == sends.end())
        viol.push_back("recv list of kind " + std::to_string(route[0]) + " from rank " +
                       std::to_string(route[1]) + " has no matching send list");
    return viol;
  });

  std::vector<std::string> all;
  for (std::size_t r = 0; r < per_rank.size(); ++r)
    for (const std::string& v : per_rank[r])
      all.push_back("rank " + std::to_string(r) + ": " + v);
  return all;
}

std::shared_ptr<const ParFEMapper> serial_mapper(int n) {
  ParFEMapper m;
  m.rank = 0;
  m.n_ranks = 1;
  m.n_dofs = n;
  m.n_own_dofs = n;
  m.class_of.assign(static_cast<std::size_t>(n), DofClass::Independent);
  m.reorder.resize(static_cast<std::size_t>(n));
  m.dofs.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    m.reorder[static_cast<std::size_t>(i)] = i;
    m.dofs[static_cast<std::size_t>(i)].key = {i, 0, 0};
    m.dofs[static_cast<std::size_t>(i)].coords = {static_cast<double>(i), 0.0, 0.0};
  }
  m.master_rank_of.assign(static_cast<std::size_t>(n), -1);
  m.diri_authority.assign(static_cast<std::size_t>(n), -1);
  m.owns_row.assign(static_cast<std::size_t>(n), 1);
  m.global_of.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m.global_of[static_cast<std::size_t>(i)] = i;
  m.n_global_own = n;
  m.n_global = n;
  m.n_class[static_cast<std::size_t>(static_cast<int>(DofClass::Independent))] = n;
  return std::make_shared<const ParFEMapper>(std::move(m));
}

}  // namespace testsup
