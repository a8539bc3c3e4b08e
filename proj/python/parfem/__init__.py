"""Distributed finite element multigrid core.

The heavy lifting lives in the compiled ``_parfem`` extension; run
configuration is passed as keyword arguments mirroring the CLI config keys
(``dimension``, ``n_coarse``, ``ranks``, ``levels``, ``dt``, ``end_time``,
``outer_tol``, ...).
"""

from ._parfem import (
    child_cell_number,
    classify_csv,
    export_system,
    mesh_counts,
    solve_heat,
    solve_poisson,
)

__all__ = [
    "child_cell_number",
    "classify_csv",
    "export_system",
    "mesh_counts",
    "solve_heat",
    "solve_poisson",
]
