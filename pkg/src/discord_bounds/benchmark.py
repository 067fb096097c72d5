"""Compare the compiled and pure-Python kernel backends.

Times the three hot entry points on a sample of seeded random states and
reports the value agreement between backends, which should sit many orders of
magnitude inside every tolerance the test suite asserts.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .correlation import r_matrix
from .oracle import _povm_starts
from .qstate import random_state


def _sample_r_matrices(n_states: int, seed: int):
    return [
        np.ascontiguousarray(r_matrix(random_state(2, 4, seed ^ i)))
        for i in range(n_states)
    ]


def _time_backend(backend, rs, starts, steps):
    t0 = time.perf_counter()
    grid = None
    tg, pg = np.meshgrid(
        (np.arange(60) + 0.5) * (np.pi / 2) / 60,
        (np.arange(120) + 0.5) * (2 * np.pi) / 120,
        indexing="ij",
    )
    st = np.sin(tg.ravel())
    dirs = np.ascontiguousarray(
        np.stack([st * np.cos(pg.ravel()), st * np.sin(pg.ravel()),
                  np.cos(tg.ravel())], axis=1)
    )
    for r in rs:
        grid = backend.cond_entropy_proj_2q(r, dirs)
    t_grid = time.perf_counter() - t0

    t0 = time.perf_counter()
    proj_vals = [backend.min_proj_2q(r, 60, 120, 8, 1e-6, 600)[0] for r in rs]
    t_proj = time.perf_counter() - t0

    t0 = time.perf_counter()
    povm_vals = [
        backend.min_povm_2q(r, 4, 0, starts, steps, 1e-6, 1e-9, 4000)[0] for r in rs
    ]
    t_povm = time.perf_counter() - t0
    return {
        "grid_s": t_grid,
        "proj_s": t_proj,
        "povm_s": t_povm,
        "proj_vals": np.array(proj_vals),
        "povm_vals": np.array(povm_vals),
        "grid_vals": grid,
    }


def run_benchmark(n_states: int = 25, seed: int = 2024) -> dict:
    """Benchmark both backends; returns timings and value deviations."""
    rs = _sample_r_matrices(n_states, seed)
    starts = _povm_starts(4, 8, seed, (0.7, 0.3), tag=9)
    steps = np.tile([0.15, 0.4, 0.4], 3)
    out = {"n_states": n_states, "backends": {}}
    py = kernels.get_backend("python")
    out["backends"]["python"] = _time_backend(py, rs, starts, steps)
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        out["compiled_available"] = False
        return out
    out["compiled_available"] = True
    out["backends"]["cython"] = _time_backend(cy, rs, starts, steps)
    a, b = out["backends"]["python"], out["backends"]["cython"]
    out["max_dev_grid"] = float(np.abs(a["grid_vals"] - b["grid_vals"]).max())
    out["max_dev_proj"] = float(np.abs(a["proj_vals"] - b["proj_vals"]).max())
    out["max_dev_povm"] = float(np.abs(a["povm_vals"] - b["povm_vals"]).max())
    return out


def format_benchmark(result: dict) -> str:
    lines = [f"kernel benchmark on {result['n_states']} random rank-4 states "
             f"(active backend: {kernels.backend_name})"]
    for name, r in result["backends"].items():
        lines.append(
            f"  {name:>7}: grid scan {r['grid_s']:.3f}s   projective min "
            f"{r['proj_s']:.3f}s   povm min {r['povm_s']:.3f}s"
        )
    if not result.get("compiled_available", False):
        lines.append("  compiled backend not available; built without the extension?")
        return "\n".join(lines)
    py, cy = result["backends"]["python"], result["backends"]["cython"]
    for key, label in (("grid_s", "grid"), ("proj_s", "projective"), ("povm_s", "povm")):
        if cy[key] > 0:
            lines.append(f"  speedup ({label}): {py[key] / cy[key]:.1f}x")
    lines.append(
        f"  value agreement: grid {result['max_dev_grid']:.2e}, projective "
        f"{result['max_dev_proj']:.2e}, povm {result['max_dev_povm']:.2e}"
    )
    return "\n".join(lines)
