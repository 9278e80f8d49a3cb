"""Render diskmin output files to figures.

The only coupling to the producing tool is the documented file schemas:
pressure_gradient.csv (theta,R,s,t), probe_samples.csv, deformation.csv,
convergence.csv, and the pressure.json closed-form parameters.  Rendering is
deterministic for identical inputs: fixed figure geometry, no timestamps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = (
    "pressure_profile",
    "gradient_heatmap",
    "deformation",
    "gap_histogram",
    "convergence",
)

_FIGSIZE = (7.0, 4.2)
_DPI = 130


class SchemaError(ValueError):
    """An input file does not match the documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: Path

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input file is required")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


def _read_table(path: Path, required: tuple) -> dict:
    """Load CSV columns, failing loudly on missing columns."""
    if not path.exists():
        raise SchemaError(f"input file {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [c for c in required if c not in names]
        if missing:
            raise SchemaError(f"{path.name}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path.name}: no data rows")
    out = {}
    for col in names:
        values = [r[col] for r in rows]
        try:
            out[col] = np.array([float(v) for v in values])
        except ValueError:
            out[col] = np.array(values)
    return out


def _save(fig, spec: FigureSpec) -> None:
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=_DPI)
    plt.close(fig)


def _closed_form_parameters(spec: FigureSpec):
    """Optional pressure.json among the inputs supplies (c, k)."""
    for path in spec.inputs[1:]:
        if path.suffix == ".json":
            payload = json.loads(Path(path).read_text())
            if "c" not in payload or "k" not in payload:
                raise SchemaError(f"{path.name}: missing column(s) c, k")
            return float(payload["c"]), float(payload["k"])
    return None


def _render_pressure_profile(spec: FigureSpec):
    data = _read_table(spec.inputs[0], ("theta", "R", "s", "t"))
    params = _closed_form_parameters(spec)
    if params is None:
        c, k = 0.0, float(np.mean(data["s"]))
    else:
        c, k = params
    r_lo = max(np.min(data["R"]), 1e-3)
    radii = np.geomspace(r_lo, 1.0, 256)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(radii, c + k * np.log(radii), color="tab:blue", lw=2.0,
            label=f"lambda(R) = {c:g} + {k:.4g} ln R")
    ax.plot([1.0], [c], marker="o", color="tab:red", ms=6, label=f"lambda(1) = {c:g}")
    ax.set_xlabel("R")
    ax.set_ylabel("pressure")
    ax.set_title("pressure profile")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    _save(fig, spec)


def _polar_panels(theta, R, fields, titles, suptitle):
    t_vals = np.unique(theta)
    r_vals = np.unique(R)
    fig, axes = plt.subplots(
        1, len(fields), figsize=(4.0 * len(fields), 3.8),
        subplot_kw={"projection": "polar"},
    )
    axes = np.atleast_1d(axes)
    for ax, values, title in zip(axes, fields, titles):
        grid = np.full((r_vals.size, t_vals.size), np.nan)
        ri = np.searchsorted(r_vals, R)
        ti = np.searchsorted(t_vals, theta)
        grid[ri, ti] = values
        # close the angular seam for pcolormesh
        t_edges = np.concatenate([t_vals, [t_vals[0] + 2.0 * np.pi]])
        g = np.concatenate([grid, grid[:, :1]], axis=1)
        mesh = ax.pcolormesh(t_edges, r_vals, g, shading="auto", cmap="viridis")
        fig.colorbar(mesh, ax=ax, shrink=0.8)
        ax.set_title(title)
        ax.set_yticklabels([])
    fig.suptitle(suptitle)
    return fig


def _render_gradient_heatmap(spec: FigureSpec):
    data = _read_table(spec.inputs[0], ("theta", "R", "s", "t"))
    fig = _polar_panels(
        data["theta"], data["R"], (data["s"], data["t"]),
        ("s = lambda,_R R", "t = lambda,_theta"),
        "pressure gradient components",
    )
    _save(fig, spec)


def _render_deformation(spec: FigureSpec):
    data = _read_table(spec.inputs[0], ("kind", "R", "theta", "x1", "x2"))
    kinds = []
    for k in data["kind"]:
        if k not in kinds:
            kinds.append(k)
    fig, axes = plt.subplots(1, len(kinds), figsize=(4.2 * len(kinds), 4.2))
    axes = np.atleast_1d(axes)
    for ax, kind in zip(axes, kinds):
        sel = data["kind"] == kind
        R, T = data["R"][sel], data["theta"][sel]
        x, y = data["x1"][sel], data["x2"][sel]
        r_vals, t_vals = np.unique(R), np.unique(T)
        xg = np.full((r_vals.size, t_vals.size), np.nan)
        yg = np.full_like(xg, np.nan)
        xg[np.searchsorted(r_vals, R), np.searchsorted(t_vals, T)] = x
        yg[np.searchsorted(r_vals, R), np.searchsorted(t_vals, T)] = y
        ring_step = max(1, r_vals.size // 8)
        ray_step = max(1, t_vals.size // 16)
        for i in range(0, r_vals.size, ring_step):
            ax.plot(np.append(xg[i], xg[i, 0]), np.append(yg[i], yg[i, 0]),
                    color="tab:blue", lw=0.7)
        for j in range(0, t_vals.size, ray_step):
            ax.plot(xg[:, j], yg[:, j], color="tab:orange", lw=0.7)
        ax.set_aspect("equal")
        ax.set_title(f"{kind} image of the polar mesh")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    _save(fig, spec)


def _render_gap_histogram(spec: FigureSpec):
    data = _read_table(
        spec.inputs[0], ("probe_id", "amplitude", "gap", "predicted_gap", "residual", "det_err")
    )
    gaps = data["gap"]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    lo = min(0.0, float(gaps.min()))
    hi = float(gaps.max()) if gaps.max() > 0 else 1.0
    ax.hist(gaps, bins=32, range=(lo, hi), color="tab:blue", alpha=0.85, edgecolor="black")
    ax.axvline(0.0, color="tab:red", lw=1.5, label="zero gap")
    ax.set_xlabel("energy gap E(v) - E(u)")
    ax.set_ylabel("competitors")
    ax.set_title(f"gaps over {gaps.size} incompressible competitors (min {gaps.min():.3g})")
    ax.legend(loc="upper right")
    _save(fig, spec)


def _render_convergence(spec: FigureSpec):
    data = _read_table(spec.inputs[0], ("grid_nr", "grid_nth", "max_residual"))
    n = data["grid_nr"]
    res = data["max_residual"]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.loglog(n, res, marker="o", color="tab:blue", label="max residual")
    positive = res > 0
    if np.count_nonzero(positive) >= 2:
        slope = np.polyfit(np.log(n[positive]), np.log(res[positive]), 1)[0]
        ax.loglog(
            n, res[positive][0] * (n / n[positive][0]) ** slope,
            ls="--", color="tab:gray", label=f"fit slope {slope:.2f}",
        )
    ax.set_xlabel("radial nodes")
    ax.set_ylabel("max weak-form residual")
    ax.set_title("grid convergence")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="upper right")
    _save(fig, spec)


_RENDERERS = {
    "pressure_profile": _render_pressure_profile,
    "gradient_heatmap": _render_gradient_heatmap,
    "deformation": _render_deformation,
    "gap_histogram": _render_gap_histogram,
    "convergence": _render_convergence,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; raises SchemaError on malformed inputs."""
    _RENDERERS[spec.kind](spec)
    return spec.output
