#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parfem/app.hpp"
#include "parfem/mesh.hpp"

namespace py = pybind11;

namespace {

parfem::AppConfig config_from_kwargs(const py::kwargs& kwargs) {
  parfem::AppConfig cfg;
  for (auto item : kwargs) {
    const std::string key = py::str(item.first);
    const std::string value = py::str(item.second);
    parfem::apply_config_entry(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

py::dict report_to_dict(const parfem::SolveReport& rep) {
  py::dict out;
  out["l2_error"] = rep.l2_error;
  out["linf_error"] = rep.linf_error;
  out["global_dofs"] = rep.n_global_dofs;
  out["solution"] = rep.global_solution;
  out["cycle_residuals"] = rep.cycle_residuals;
  out["solving_seconds"] = rep.metrics.phases.solving;
  out["communication_seconds"] = rep.metrics.phases.communication;
  return out;
}

}  // namespace

PYBIND11_MODULE(_parfem, m) {
  m.doc() = "distributed finite element multigrid core";

  m.def(
      "child_cell_number",
      [](std::int64_t parent, int children_per_cell, int child_index) {
        return parfem::child_gcn(parent, children_per_cell, child_index);
      },
      py::arg("parent"), py::arg("children_per_cell"), py::arg("child_index"),
      "Global cell number of a refinement child.");

  m.def(
      "mesh_counts",
      [](int dimension, std::int64_t n_per_axis, int refinements) {
        parfem::MeshLevel mesh = parfem::generate_unit_mesh(dimension, n_per_axis);
        for (int r = 0; r < refinements; ++r) mesh = parfem::refine_uniform(mesh);
        return py::make_tuple(mesh.cells.size(), mesh.vertices.size());
      },
      py::arg("dimension"), py::arg("n_per_axis"), py::arg("refinements") = 0,
      "(cell count, vertex count) after the given number of refinements.");

  m.def(
      "solve_heat",
      [](const py::kwargs& kwargs) { return report_to_dict(parfem::run_heat(config_from_kwargs(kwargs))); },
      "Crank-Nicolson heat solve; config keys as keyword arguments.");

  m.def(
      "solve_poisson",
      [](const py::kwargs& kwargs) {
        return report_to_dict(parfem::run_poisson(config_from_kwargs(kwargs)));
      },
      "Steady diffusion solve; config keys as keyword arguments.");

  m.def(
      "classify_csv",
      [](const py::kwargs& kwargs) { return parfem::run_classify(config_from_kwargs(kwargs)).csv; },
      "Per-level, per-rank dof class counts as CSV text.");

  m.def(
      "export_system",
      [](const std::string& prefix, const py::kwargs& kwargs) {
        parfem::export_system(config_from_kwargs(kwargs), prefix);
      },
      py::arg("prefix"), "Write <prefix>.mtx and <prefix>_rhs.mtx in MatrixMarket form.");
}
