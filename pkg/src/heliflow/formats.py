"""Plain-text output formats: polygon meshes, profile tables and check reports.

Every number is written with 9 significant digits, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import surface as sc
from .translators import TranslatorSurface
from .verify import GridSpec, VerificationReport

PROFILE_HEADER = ("U", "R", "Lambda", "Theta", "abs_n3", "K")
ATTR_HEADER = ("vertex", "U", "t", "n3", "K")


def fmt(x) -> str:
    return f"{float(x):.9g}"


@dataclass(frozen=True)
class MeshOutput:
    vertices: np.ndarray  # (N, 3)
    faces: np.ndarray  # (M, 4), zero-based
    attributes: dict
    label: str = ""

    def __post_init__(self):
        n = len(self.vertices)
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= n):
            raise ValueError("face index out of range")
        for key, arr in self.attributes.items():
            if len(arr) != n:
                raise ValueError(f"attribute {key!r} has {len(arr)} entries for {n} vertices")


def tessellate(obj, grid: GridSpec) -> MeshOutput:
    """Quad mesh over the grid with per-vertex (U, t, n3, K).

    Curvature attributes are NaN where a finite-difference stencil would
    leave the domain.
    """
    patch = obj.patch if isinstance(obj, TranslatorSurface) else obj
    u, v = grid.axes(patch.domain)
    U, V = np.meshgrid(u, v, indexing="ij")
    verts = sc.evaluate(patch, U, V).reshape(-1, 3)
    n3 = np.full(U.shape, np.nan)
    K = np.full(U.shape, np.nan)
    if patch.analytic_jet is not None:
        ok = np.ones(U.shape, dtype=bool)
    else:
        ok = patch.contains(U, V, 2 * sc.second_step(U), 2 * sc.second_step(V))
    if ok.any():
        forms = sc.fundamental_forms(patch, U[ok], V[ok])
        n3[ok] = forms.n3
        K[ok] = forms.K
    nu, nv = U.shape
    idx = np.arange(nu * nv).reshape(nu, nv)
    faces = np.stack(
        [idx[:-1, :-1].ravel(), idx[1:, :-1].ravel(), idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()], axis=1
    )
    attrs = {"U": U.ravel(), "t": V.ravel(), "n3": n3.ravel(), "K": K.ravel()}
    return MeshOutput(verts, faces, attrs, patch.label)


def attributes_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".attrs.csv")


def write_mesh(mesh: MeshOutput, path) -> tuple[Path, Path]:
    """Write ``v``/``f`` lines (1-based) and the sidecar attribute table."""
    path = Path(path)
    lines = [f"# heliflow mesh {mesh.label}"]
    lines += [f"v {fmt(x)} {fmt(y)} {fmt(z)}" for x, y, z in mesh.vertices]
    lines += ["f " + " ".join(str(int(i) + 1) for i in face) for face in mesh.faces]
    path.write_text("\n".join(lines) + "\n")
    side = attributes_path(path)
    rows = [",".join(ATTR_HEADER)]
    a = mesh.attributes
    for i in range(len(mesh.vertices)):
        rows.append(",".join([str(i + 1)] + [fmt(a[k][i]) for k in ATTR_HEADER[1:]]))
    side.write_text("\n".join(rows) + "\n")
    return path, side


def export_mesh(obj, grid: GridSpec, path) -> tuple[Path, Path]:
    return write_mesh(tessellate(obj, grid), path)


def read_mesh(path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(p) - 1 for p in parts[1:]])
    return np.array(verts), np.array(faces, dtype=int)


def profile_rows(surface: TranslatorSurface, U_values) -> np.ndarray:
    """Rows (U, R, Lambda, Theta, |n3|, K) sampled along t = 0."""
    U = np.asarray(U_values, dtype=float)
    forms = sc.fundamental_forms(surface.patch, U, np.zeros_like(U))
    return np.column_stack(
        [U, surface.R(U), surface.Lambda(U), surface.Theta(U), np.abs(forms.n3), forms.K]
    )


def write_profile(rows: np.ndarray, path=None) -> str:
    text = ",".join(PROFILE_HEADER) + "\n" + "".join(",".join(fmt(x) for x in r) + "\n" for r in rows)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_profile(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != PROFILE_HEADER:
            raise ValueError(f"unexpected profile header {header}")
        return np.array([[float(x) for x in row] for row in reader if row])


def profile_residuals(rows: np.ndarray, c: float) -> dict:
    """Translator and angle residuals recomputed from a profile table."""
    U, abs_n3, K = rows[:, 0], rows[:, 4], rows[:, 5]
    return {
        "translator": float(np.max(np.abs(K - abs_n3**4))),
        "angle": float(np.max(np.abs(abs_n3 * np.sqrt(U**2 + c) - 1))),
    }


def write_reports(reports: Iterable[VerificationReport], path=None) -> str:
    text = "".join(r.to_line() + "\n" for r in reports)
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_report_line(line: str) -> dict:
    out = {}
    for token in line.split():
        key, _, val = token.partition("=")
        out[key] = val
    out["max_residual"] = float(out["max_residual"]) if out.get("max_residual") != "nan" else math.nan
    out["tol"] = float(out["tol"])
    out["passed"] = out["passed"] == "true"
    return out


def read_reports(path) -> list[dict]:
    return [parse_report_line(l) for l in Path(path).read_text().splitlines() if l.strip()]
