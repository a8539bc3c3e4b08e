"""Smoke checks for the python bindings; run with PYTHONPATH at the build
tree's python/ directory."""

import os
import tempfile

import parfem


def main():
    assert parfem.child_cell_number(5, 8, 3) == 43
    assert parfem.child_cell_number(0, 4, 0) == 0
    assert parfem.mesh_counts(2, 2) == (4, 9)
    assert parfem.mesh_counts(3, 4) == (64, 125)
    assert parfem.mesh_counts(2, 2, refinements=1) == (16, 25)

    report = parfem.solve_heat(
        dimension=2, n_coarse=2, ranks=2, levels=2, dt=0.01, end_time=0.02
    )
    assert report["global_dofs"] == 25
    assert len(report["solution"]) == 25
    assert 0.0 < report["l2_error"] < 0.05
    assert report["cycle_residuals"] == sorted(report["cycle_residuals"], reverse=True)
    assert report["solving_seconds"] >= 0.0

    steady = parfem.solve_poisson(dimension=2, n_coarse=2, ranks=2, levels=2)
    assert steady["l2_error"] < 0.05

    csv = parfem.classify_csv(dimension=2, n_coarse=2, ranks=2, levels=2)
    assert csv.startswith("level,rank,class,count\n")
    assert ",total,Master," in csv

    with tempfile.TemporaryDirectory() as tmp:
        prefix = os.path.join(tmp, "system")
        parfem.export_system(prefix, dimension=2, n_coarse=2, ranks=2, levels=1)
        with open(prefix + ".mtx", encoding="ascii") as f:
            assert f.readline().startswith("%%MatrixMarket matrix coordinate real general")
        with open(prefix + "_rhs.mtx", encoding="ascii") as f:
            assert f.readline().startswith("%%MatrixMarket matrix array real general")

    try:
        parfem.solve_heat(dimension=7)
    except Exception:
        pass
    else:
        raise AssertionError("invalid dimension was accepted")

    print("python smoke checks passed")


if __name__ == "__main__":
    main()
