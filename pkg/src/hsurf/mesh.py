"""Grid sampling of surfaces and text export (OBJ-style meshes, profile CSV)."""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import IO, Sequence, Union

import numpy as np

from .errors import ExportError, GridError
from .field import Field, HoloData
from .geometry import frame_at
from .holo import eval_jet, lenient
from .rotational import ProfileSample, RadialField, RotH1Params, RotH2Params


class Target(str, Enum):
    X = "x"
    ETA = "eta"
    N = "n"
    SPHERE = "sphere"


@dataclass(frozen=True)
class GridSpec:
    u_min: float = -2.0
    u_max: float = 2.0
    v_min: float = -math.pi
    v_max: float = math.pi
    nu: int = 129
    nv: int = 129
    target: Target = Target.X

    def __post_init__(self):
        if int(self.nu) < 2 or int(self.nv) < 2:
            raise GridError(f"grid too small: nu={self.nu}, nv={self.nv} (need >= 2 each)")
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise GridError("grid bounds must satisfy u_min < u_max and v_min < v_max")
        if not isinstance(self.target, Target):
            object.__setattr__(self, "target", Target(str(self.target).lower()))

    def points(self) -> np.ndarray:
        """Row-major (u slow, v fast) grid of complex points, shape (nu*nv,)."""
        u = np.linspace(self.u_min, self.u_max, int(self.nu))
        v = np.linspace(self.v_min, self.v_max, int(self.nv))
        return (u[:, None] + 1j * v[None, :]).ravel()


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray  # (n, 3)
    normals: np.ndarray | None  # (n, 3) or None
    quads: np.ndarray  # (m, 4) vertex indices, 0-based
    singular_mask: np.ndarray  # (n,) bool

    def __post_init__(self):
        n = len(self.vertices)
        if self.quads.size and (self.quads.min() < 0 or self.quads.max() >= n):
            raise ValueError("quad index out of range")


Source = Union[Field, HoloData, RotH1Params, RotH2Params]


def _resolve(source: Source, c: float | None) -> tuple[Field, float]:
    if isinstance(source, HoloData):
        return source.field(), source.c if c is None else float(c)
    if isinstance(source, (RotH1Params, RotH2Params)):
        return RadialField(source), source.c if c is None else float(c)
    return source, 1.0 if c is None else float(c)


def _grid_quads(nu: int, nv: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(nu - 1), np.arange(nv - 1), indexing="ij")
    a = (i * nv + j).ravel()
    return np.stack([a, a + nv, a + nv + 1, a + 1], axis=1)


def sample_surface(source: Source, grid: GridSpec, *, c: float | None = None) -> SurfaceMesh:
    """Evaluate the chosen target surface on the grid and mask singular vertices."""
    field, c = _resolve(source, c)
    z = grid.points()
    fr = frame_at(z, field, c, strict=False)
    target = grid.target
    if target is Target.X:
        verts, normals, mask = fr.X, fr.N, fr.singular_X
    elif target is Target.ETA:
        verts, normals, mask = fr.eta, fr.Y, fr.singular_eta
    elif target is Target.N:
        verts, normals, mask = fr.N, fr.N, fr.degenerate
    else:
        with lenient():
            gprime = eval_jet(field.g, z).df
        verts, normals, mask = fr.Y, fr.Y, ~(np.abs(gprime) > 0)
    mask = np.asarray(mask) | ~np.all(np.isfinite(verts), axis=-1) | ~np.all(np.isfinite(normals), axis=-1)
    if np.all(mask):
        raise GridError("every vertex is singular on this grid")
    return SurfaceMesh(np.asarray(verts, dtype=float), np.asarray(normals, dtype=float),
                       _grid_quads(int(grid.nu), int(grid.nv)), mask)


# --------------------------------------------------------------------------
# export


def _num(x: float) -> str:
    return "%.9g" % (float(x) + 0.0)  # + 0.0 folds -0.0 into 0


def _write(text: str, sink) -> int:
    data = text.encode("ascii")
    try:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, "wb") as fh:
                fh.write(data)
        elif isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(data)
    except OSError as exc:
        raise ExportError(f"write failed: {exc}") from exc
    return len(data)


def obj_text(mesh: SurfaceMesh) -> str:
    """Compacted OBJ text: masked vertices dropped, quads touching them omitted."""
    keep = ~np.asarray(mesh.singular_mask, dtype=bool)
    if not np.any(keep):
        raise ExportError("mesh is empty after masking")
    new_index = np.cumsum(keep) - 1
    quads = mesh.quads[np.all(keep[mesh.quads], axis=1)] if mesh.quads.size else mesh.quads
    out = []
    for v in mesh.vertices[keep]:
        out.append(f"v {_num(v[0])} {_num(v[1])} {_num(v[2])}\n")
    with_normals = mesh.normals is not None
    if with_normals:
        for n in mesh.normals[keep]:
            out.append(f"vn {_num(n[0])} {_num(n[1])} {_num(n[2])}\n")
    for q in quads:
        idx = new_index[q] + 1
        if with_normals:
            out.append("f " + " ".join(f"{k}//{k}" for k in idx) + "\n")
        else:
            out.append("f " + " ".join(str(k) for k in idx) + "\n")
    return "".join(out)


def export_obj(mesh: SurfaceMesh, sink: str | os.PathLike | IO) -> int:
    """Write the mesh; returns the number of bytes written."""
    return _write(obj_text(mesh), sink)


PROFILE_HEADER = "u,M,N,M1,N1,P,detV,singular_X,singular_eta"


def profile_csv_text(samples: Sequence[ProfileSample]) -> str:
    if not samples:
        raise ExportError("no profile samples to export")
    rows = [PROFILE_HEADER + "\n"]
    for s in samples:
        nums = ",".join(_num(x) for x in (s.u, s.M, s.N, s.M1, s.N1, s.P, s.detV))
        rows.append(f"{nums},{int(s.singular_X)},{int(s.singular_eta)}\n")
    return "".join(rows)


def export_profile_csv(samples: Sequence[ProfileSample], sink: str | os.PathLike | IO) -> int:
    return _write(profile_csv_text(samples), sink)
