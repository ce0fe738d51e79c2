"""Reference-point scalarization over finite objective clouds.

A finite cloud F of objective vectors is scalarized by the value of the
translation functional built on a shifted negated order cone: for a
reference point a, the score of y is the smallest t such that y lies in
a + t*k - C. Minimizing that score over F picks out (weakly) efficient
points; sweeping the reference over a grid or over F itself traces the
front. A brute-force pairwise domination filter serves as the
independent oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .evaluator import (
    DEFAULT_T_MAX,
    DEFAULT_TOL,
    KIND_FINITE,
    KIND_MINUS_INF,
    MINUS_INF,
    NU,
    ExtReal,
    make_handle,
    evaluate_batch,
)
from .geometry import HalfSpace, Polyhedron, Shift, contains, _as_vector

#: Strict margin for interior-of-cone (weak domination) tests.
INT_CONE_MARGIN = 1e-9

#: Minimizers within this of the minimum are all returned.
ARGMIN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite list of objective vectors, optionally labeled."""

    points: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidInput("point cloud must be a nonempty (n, m) array")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != pts.shape[0]:
                raise InvalidInput("one label per point required")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class OrderCone:
    """Polyhedral ordering cone {x : a_i·x <= 0} with optional generators.

    Generators are needed wherever the cone must be sampled (a + C
    sweeps); they are filled in automatically for the nonnegative
    orthant and must be user-supplied otherwise. Pointedness is probed
    only on the generators and their pairwise sums; a failed probe
    warns, it does not raise.
    """

    rep: Polyhedron
    generators: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        for h in self.rep.halfspaces:
            if abs(h.b) > 1e-12:
                raise InvalidInput("order cone rows must pass through the origin")
        if self.generators is not None:
            gens = tuple(_as_vector(g, self.rep.dim, "generator") for g in self.generators)
            object.__setattr__(self, "generators", gens)
            if not self.maybe_pointed():
                warnings.warn("order cone generators indicate a non-pointed cone",
                              stacklevel=2)

    @property
    def dim(self) -> int:
        return self.rep.dim

    @classmethod
    def nonneg(cls, m: int) -> "OrderCone":
        """The nonnegative orthant of R^m, with the standard basis as generators."""
        eye = np.eye(m)
        rows = tuple(HalfSpace(-eye[i], 0.0) for i in range(m))
        return cls(Polyhedron(rows), generators=tuple(eye[i] for i in range(m)))

    def negated(self) -> Polyhedron:
        """Halfspace form of -C (normals flip sign)."""
        return Polyhedron(tuple(HalfSpace(-h.a, 0.0) for h in self.rep.halfspaces))

    def maybe_pointed(self) -> bool:
        """Advisory: False when some probe vector sits in C together with its negation."""
        if not self.generators:
            return True
        probes = list(self.generators)
        for i in range(len(self.generators)):
            for j in range(i + 1, len(self.generators)):
                probes.append(self.generators[i] + self.generators[j])
        for g in probes:
            if float(np.linalg.norm(g)) <= 1e-12:
                continue
            if contains(self.rep, g) and contains(self.rep, -g):
                return False
        return True

    def interior_contains_many(self, Y) -> np.ndarray:
        """Strict membership a_i·y < -margin on every row, vectorized."""
        pts = np.asarray(Y, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        return (self.rep.normals @ pts.T < -INT_CONE_MARGIN).all(axis=0)


def _cloud(points) -> PointCloud:
    if isinstance(points, PointCloud):
        return points
    return PointCloud(np.asarray(points, dtype=float))


def scalarize(F, C: OrderCone, k, a, t_max: float = DEFAULT_T_MAX,
              tol: float = DEFAULT_TOL) -> tuple[list[int], ExtReal]:
    """Minimize the reference-point score over the cloud.

    Returns (indices of all minimizers within 1e-9 of the minimum over
    finite scores, minimal value). Points scoring nu are excluded; if
    every point scores nu the argmin is empty and the value is nu. A
    -inf score short-circuits the minimum.
    """
    F = _cloud(F)
    a = _as_vector(a, C.dim, "reference point")
    if F.dim != C.dim:
        raise InvalidInput(f"cloud has dimension {F.dim}, cone has {C.dim}")
    h = make_handle(Shift(C.negated(), a), k, t_max=t_max, tol=tol)
    vals, kinds = evaluate_batch(h, F.points)
    neg = np.where(kinds == KIND_MINUS_INF)[0]
    if neg.size:
        return list(map(int, neg)), MINUS_INF
    fin = np.where(kinds == KIND_FINITE)[0]
    if not fin.size:
        return [], NU
    vmin = float(vals[fin].min())
    arg = fin[vals[fin] <= vmin + ARGMIN_TOL]
    return list(map(int, arg)), ExtReal.finite(vmin)


def weakly_efficient(F, C: OrderCone) -> list[int]:
    """Brute-force domination filter.

    A point is weakly efficient when no other point beats it by a
    vector strictly inside the cone (margin 1e-9 on every row).
    """
    F = _cloud(F)
    if F.dim != C.dim:
        raise InvalidInput(f"cloud has dimension {F.dim}, cone has {C.dim}")
    pts = F.points
    out = []
    for i in range(len(pts)):
        dominated = C.interior_contains_many(pts[i] - pts).any()
        if not dominated:
            out.append(i)
    return out


def trace_front(F, C: OrderCone, k, refs) -> dict[int, tuple[int, ...]]:
    """Scalarize once per reference point; maps ref index to its argmin indices."""
    F = _cloud(F)
    ref_pts = refs.points if isinstance(refs, PointCloud) else np.asarray(refs, dtype=float)
    if ref_pts.size == 0:
        return {}
    if ref_pts.ndim == 1:
        ref_pts = ref_pts[None, :]
    if ref_pts.shape[1] != C.dim:
        raise InvalidInput(f"reference points have dimension {ref_pts.shape[1]}, cone has {C.dim}")
    out: dict[int, tuple[int, ...]] = {}
    for r, a in enumerate(ref_pts):
        arg, _ = scalarize(F, C, k, a)
        out[r] = tuple(arg)
    return out


# ---------------------------------------------------------------------------
# CSV interchange


def load_points_csv(path) -> PointCloud:
    """Read one point per row, comma-separated, optional trailing label."""
    rows: list[list[float]] = []
    labels: list[str] = []
    any_label = False
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = [t.strip() for t in line.split(",")]
        label = ""
        try:
            float(tokens[-1])
        except ValueError:
            label = tokens[-1]
            tokens = tokens[:-1]
            any_label = True
        try:
            rows.append([float(t) for t in tokens])
        except ValueError as exc:
            raise InvalidInput(f"line {lineno}: non-numeric coordinate ({exc})") from exc
        labels.append(label)
    if not rows:
        raise InvalidInput(f"no points found in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidInput(f"rows disagree on dimension: {sorted(widths)}")
    return PointCloud(np.array(rows), tuple(labels) if any_label else None)
