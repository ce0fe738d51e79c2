"""Sampled property checks, set separation and regularity diagnostics.

Every check draws from a seeded generator over a user box (default
[-10, 10]^n), rejects points outside the functional's domain (value nu)
and reports a reproducible verdict: rerunning with the same handle,
seed and sample count yields the identical report, witness included.
Samples valued nu never enter a numeric defect; they are excluded and
the number of samples that actually contributed is reported in
``applicable``. A check with nothing applicable reports Inapplicable,
never Holds.

All verdicts are sampled evidence: Holds means no violation was found,
not a proof.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, PreconditionFailed, UlsetError
from .evaluator import (
    KIND_FINITE,
    KIND_MINUS_INF,
    KIND_NU,
    MINUS_INF,
    NU,
    ExtReal,
    FunctionalHandle,
    Strategy,
    evaluate_batch,
    evaluate_dual_many,
    make_handle,
    _dual_handle,
)
from .geometry import Polyhedron, SetExpr, Shift, contains_many, _as_vector

HOLDS = "Holds"
VIOLATED = "Violated"
INAPPLICABLE = "Inapplicable"

DEFAULT_BBOX = (-10.0, 10.0)

#: Strict-monotonicity margin is relative: phi(y1) < phi(y2) - margin*(1+|phi(y2)|).
STRICT_MARGIN = 1e-9


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one sampled check.

    ``witness`` holds the inputs and values of the worst violation when
    the verdict is Violated, else None. ``samples`` is the requested
    sample count; ``applicable`` is how many samples actually entered
    the defect computation after nu-rejection and band exclusions.
    """

    name: str
    verdict: str
    witness: dict | None
    max_defect: float
    samples: int
    seed: int
    applicable: int

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "verdict": self.verdict,
                "witness": self.witness,
                "max_defect": self.max_defect,
                "samples": self.samples,
                "seed": self.seed,
                "applicable": self.applicable,
            },
            sort_keys=True,
        )


@dataclass(frozen=True, eq=False)
class MonotoneCone:
    """Conic hull of finitely many generators; no generators means the zero cone."""

    generators: tuple[np.ndarray, ...]

    def __post_init__(self):
        gens = tuple(_as_vector(g, name="generator") for g in self.generators)
        for g in gens:
            if float(np.linalg.norm(g)) <= 1e-12:
                raise InvalidInput("cone generators must be nonzero")
        object.__setattr__(self, "generators", gens)

    def matrix(self, dim: int) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, dim))
        return np.stack(self.generators)


@dataclass(frozen=True, eq=False)
class SeparationVerdict:
    disjoint: bool
    mode: str
    offending_indices: tuple[int, ...]
    offending_points: tuple[np.ndarray, ...]
    offending_values: tuple[ExtReal, ...]


@dataclass(frozen=True, eq=False)
class LipschitzEstimate:
    l_emp: float
    l_bound: ExtReal
    interior: bool


def _ext_json(val: float, kind: int):
    if kind == KIND_FINITE:
        return float(val)
    return "-inf" if kind == KIND_MINUS_INF else "nu"


class _Tally:
    """Accumulates the max defect and the worst above-tolerance witness."""

    def __init__(self, tol: float):
        self.tol = tol
        self.max_defect = 0.0
        self.witness = None
        self._witness_defect = 0.0

    def note(self, defect: float, witness: dict):
        defect = float(defect)
        if defect > self.max_defect:
            self.max_defect = defect
        if defect > self.tol and defect > self._witness_defect:
            self._witness_defect = defect
            self.witness = witness


def _report(name, seed, samples, applicable, tally: _Tally) -> PropertyReport:
    if applicable == 0:
        return PropertyReport(name, INAPPLICABLE, None, 0.0, samples, seed, 0)
    verdict = VIOLATED if tally.witness is not None else HOLDS
    return PropertyReport(name, verdict, tally.witness, tally.max_defect,
                          samples, seed, applicable)


def _draw_domain(h: FunctionalHandle, n: int, rng, bbox, extra_cols: int = 0):
    """Rejection-sample up to n domain points (value not nu) from the box.

    Extra uniform columns in [-10, 10] are drawn alongside each
    candidate so that rejection does not disturb the pairing.
    Oversampling is capped at 10x.
    """
    lo, hi = bbox
    dim = h.set.dim
    kept_p, kept_v, kept_k, kept_e = [], [], [], []
    total = 0
    kept = 0
    while total < 10 * n and kept < n:
        m = min(n, 10 * n - total)
        total += m
        cand = rng.uniform(lo, hi, size=(m, dim))
        extras = rng.uniform(-10.0, 10.0, size=(m, extra_cols)) if extra_cols else np.zeros((m, 0))
        vals, kinds = evaluate_batch(h, cand)
        keep = kinds != KIND_NU
        kept += int(keep.sum())
        kept_p.append(cand[keep])
        kept_v.append(vals[keep])
        kept_k.append(kinds[keep])
        kept_e.append(extras[keep])
    P = np.concatenate(kept_p)[:n]
    V = np.concatenate(kept_v)[:n]
    K = np.concatenate(kept_k)[:n]
    E = np.concatenate(kept_e)[:n]
    return P, V, K, E


# ---------------------------------------------------------------------------
# identity and inequality suites


def check_sublevel_identity(h: FunctionalHandle, n_samples: int = 1000, seed: int = 42,
                            bbox=DEFAULT_BBOX) -> PropertyReport:
    """Sampled equivalence phi(y) <= t  <=>  y - t*k in set.

    Pairs with |phi(y) - t| <= 1e-6 are excluded: inside that band the
    two sides may legitimately disagree numerically.
    """
    rng = np.random.default_rng(seed)
    P, V, K, E = _draw_domain(h, n_samples, rng, bbox, extra_cols=1)
    T = E[:, 0]
    tally = _Tally(0.0)
    applicable = 0
    if len(P):
        member = contains_many(h.set, P - T[:, None] * h.direction.k, 1e-6)
        for y, v, kd, t, rhs in zip(P, V, K, T, member):
            if kd == KIND_FINITE and abs(v - t) <= 1e-6:
                continue
            applicable += 1
            lhs = True if kd == KIND_MINUS_INF else bool(v <= t)
            if lhs != bool(rhs):
                defect = 1.0 + (abs(v - t) if kd == KIND_FINITE else 0.0)
                tally.note(defect, {
                    "inputs": {"y": y.tolist(), "t": float(t)},
                    "values": {"phi": _ext_json(v, kd), "member": bool(rhs)},
                })
    return _report("sublevel_identity", seed, n_samples, applicable, tally)


def check_translation_invariance(h: FunctionalHandle, n_samples: int = 1000, seed: int = 42,
                                 bbox=DEFAULT_BBOX) -> PropertyReport:
    """Sampled identity phi(y + t*k) = phi(y) + t; -inf is preserved."""
    rng = np.random.default_rng(seed)
    P, V, K, E = _draw_domain(h, n_samples, rng, bbox, extra_cols=1)
    T = E[:, 0]
    pass_tol = 1e-7
    if h.strategy == Strategy.BISECTION and len(P):
        finite = K == KIND_FINITE
        spread = float(np.abs(V[finite]).max(initial=0.0) + np.abs(T).max(initial=0.0))
        pass_tol = max(pass_tol, 2.0 * h.tol * (1.0 + spread))
    tally = _Tally(pass_tol)
    applicable = 0
    if len(P):
        V2, K2 = evaluate_batch(h, P + T[:, None] * h.direction.k)
        for y, t, v, kd, v2, kd2 in zip(P, T, V, K, V2, K2):
            applicable += 1
            if kd == KIND_MINUS_INF:
                defect = 0.0 if kd2 == KIND_MINUS_INF else 1.0
            elif kd2 != KIND_FINITE:
                defect = 1.0
            else:
                defect = abs(v2 - (v + t))
            tally.note(defect, {
                "inputs": {"y": y.tolist(), "t": float(t)},
                "values": {"phi_y": _ext_json(v, kd), "phi_shifted": _ext_json(v2, kd2)},
            })
    return _report("translation_invariance", seed, n_samples, applicable, tally)


def check_monotone(h: FunctionalHandle, cone: MonotoneCone, strict: bool = False,
                   n_samples: int = 1000, seed: int = 42, bbox=DEFAULT_BBOX) -> PropertyReport:
    """Monotonicity along a cone: y2 - y1 in cone(B) implies phi(y1) <= phi(y2).

    Also probes the set-level equivalent on projected boundary points
    (boundary point minus cone element must stay in the set) and folds
    both defects into one verdict, so a clean functional sweep with a
    failing set-level probe still reports Violated. Strict mode
    additionally requires a relative gap at finite pairs whose step is
    numerically nonzero.
    """
    rng = np.random.default_rng(seed)
    G = cone.matrix(h.set.dim)
    P, V, K, E = _draw_domain(h, n_samples, rng, bbox, extra_cols=max(G.shape[0], 1))
    tally = _Tally(0.0)
    applicable = 0
    if len(P):
        if G.shape[0]:
            B = (np.abs(E[:, : G.shape[0]]) * 0.3) @ G
        else:
            B = np.zeros_like(P)
        V1, K1 = evaluate_batch(h, P - B)
        bnorm = np.linalg.norm(B, axis=1)
        for y2, v2, kd2, b, nb, v1, kd1 in zip(P, V, K, B, bnorm, V1, K1):
            if kd1 == KIND_NU:
                continue
            applicable += 1
            if kd2 == KIND_MINUS_INF and kd1 != KIND_MINUS_INF:
                defect = 1.0
            elif kd1 == KIND_FINITE and kd2 == KIND_FINITE:
                defect = max(0.0, v1 - v2 - 1e-7)
                if strict and nb > 1e-6:
                    gap = STRICT_MARGIN * (1.0 + abs(v2))
                    defect = max(defect, max(0.0, v1 - (v2 - gap)))
            else:
                defect = 0.0
            tally.note(defect, {
                "inputs": {"y2": y2.tolist(), "step": b.tolist()},
                "values": {"phi_y1": _ext_json(v1, kd1), "phi_y2": _ext_json(v2, kd2)},
            })
        finite2 = K == KIND_FINITE
        if finite2.any():
            bd = P[finite2] - V[finite2, None] * h.direction.k - B[finite2]
            inside = contains_many(h.set, bd, 1e-6)
            for p, b, ok in zip(bd, B[finite2], inside):
                if not ok:
                    tally.note(1.0, {
                        "inputs": {"boundary_minus_step": p.tolist(), "step": b.tolist()},
                        "values": {"set_level": "boundary point minus step escaped the set"},
                    })
    name = "strictly_monotone" if strict else "monotone"
    return _report(name, seed, n_samples, applicable, tally)


def classify_convexity(h: FunctionalHandle, n_samples: int = 1000, seed: int = 42,
                       bbox=DEFAULT_BBOX) -> dict[str, PropertyReport]:
    """Midpoint-sampled classification into four flags.

    Returns reports keyed "convex", "positively_homogeneous",
    "subadditive" and "sublinear" (derived from the first two). A
    midpoint or sum that leaves the domain counts against the flag.
    """
    rng = np.random.default_rng(seed)
    P, V, K, E = _draw_domain(h, 2 * n_samples, rng, bbox, extra_cols=2)
    half = len(P) // 2
    Y1, V1, K1 = P[:half], V[:half], K[:half]
    Y2, V2, K2 = P[half: 2 * half], V[half: 2 * half], K[half: 2 * half]
    lam_mix = 0.05 + 0.9 * (np.abs(E[:half, 0]) / 10.0)
    lam_pos = 0.05 + 0.4 * np.abs(E[:, 1])

    reports: dict[str, PropertyReport] = {}

    tally = _Tally(1e-7)
    applicable = 0
    if half:
        Vm, Km = evaluate_batch(h, lam_mix[:, None] * Y1 + (1 - lam_mix)[:, None] * Y2)
        for y1, v1, k1, y2, v2, k2, lam, vm, km in zip(Y1, V1, K1, Y2, V2, K2, lam_mix, Vm, Km):
            applicable += 1
            if k1 == KIND_MINUS_INF or k2 == KIND_MINUS_INF:
                defect = 0.0 if km == KIND_MINUS_INF else 1.0
            elif km == KIND_NU:
                defect = 1.0
            elif km == KIND_MINUS_INF:
                defect = 0.0
            else:
                defect = max(0.0, vm - (lam * v1 + (1 - lam) * v2))
            tally.note(defect, {
                "inputs": {"y1": y1.tolist(), "y2": y2.tolist(), "lambda": float(lam)},
                "values": {"phi_mid": _ext_json(vm, km),
                           "phi_y1": _ext_json(v1, k1), "phi_y2": _ext_json(v2, k2)},
            })
    reports["convex"] = _report("convex", seed, n_samples, applicable, tally)

    tally = _Tally(1e-7)
    applicable = 0
    n_pos = min(len(P), n_samples)
    if n_pos:
        Vs, Ks = evaluate_batch(h, lam_pos[:n_pos, None] * P[:n_pos])
        for y, v, kd, lam, vs, ks in zip(P[:n_pos], V[:n_pos], K[:n_pos],
                                         lam_pos[:n_pos], Vs, Ks):
            applicable += 1
            if kd == KIND_MINUS_INF:
                defect = 0.0 if ks == KIND_MINUS_INF else 1.0
            elif ks != KIND_FINITE:
                defect = 1.0
            else:
                defect = abs(vs - lam * v)
            tally.note(defect, {
                "inputs": {"y": y.tolist(), "lambda": float(lam)},
                "values": {"phi_y": _ext_json(v, kd), "phi_scaled": _ext_json(vs, ks)},
            })
    reports["positively_homogeneous"] = _report(
        "positively_homogeneous", seed, n_samples, applicable, tally)

    tally = _Tally(1e-7)
    applicable = 0
    if half:
        Vs, Ks = evaluate_batch(h, Y1 + Y2)
        for y1, v1, k1, y2, v2, k2, vs, ks in zip(Y1, V1, K1, Y2, V2, K2, Vs, Ks):
            applicable += 1
            if k1 == KIND_MINUS_INF or k2 == KIND_MINUS_INF:
                defect = 0.0 if ks == KIND_MINUS_INF else 1.0
            elif ks == KIND_NU:
                defect = 1.0
            elif ks == KIND_MINUS_INF:
                defect = 0.0
            else:
                defect = max(0.0, vs - (v1 + v2))
            tally.note(defect, {
                "inputs": {"y1": y1.tolist(), "y2": y2.tolist()},
                "values": {"phi_sum": _ext_json(vs, ks),
                           "phi_y1": _ext_json(v1, k1), "phi_y2": _ext_json(v2, k2)},
            })
    reports["subadditive"] = _report("subadditive", seed, n_samples, applicable, tally)

    cv, ph = reports["convex"], reports["positively_homogeneous"]
    if cv.verdict == INAPPLICABLE or ph.verdict == INAPPLICABLE:
        reports["sublinear"] = PropertyReport("sublinear", INAPPLICABLE, None, 0.0,
                                              n_samples, seed, 0)
    else:
        bad = cv if cv.verdict == VIOLATED else (ph if ph.verdict == VIOLATED else None)
        reports["sublinear"] = PropertyReport(
            "sublinear",
            VIOLATED if bad is not None else HOLDS,
            None if bad is None else bad.witness,
            max(cv.max_defect, ph.max_defect),
            n_samples, seed,
            min(cv.applicable, ph.applicable),
        )
    return reports


def check_recession_inequality(h_set: FunctionalHandle, h_rec: FunctionalHandle,
                               n_samples: int = 1000, seed: int = 42,
                               bbox=DEFAULT_BBOX) -> PropertyReport:
    """Sampled bound phi(y0 + y1) <= phi(y0) + phi_cone(y1)."""
    rng = np.random.default_rng(seed)
    P0, V0, K0, _ = _draw_domain(h_set, n_samples, rng, bbox)
    P1, V1, K1, _ = _draw_domain(h_rec, n_samples, rng, bbox)
    m = min(len(P0), len(P1))
    tally = _Tally(1e-7)
    applicable = 0
    if m:
        Vs, Ks = evaluate_batch(h_set, P0[:m] + P1[:m])
        for y0, v0, k0, y1, v1, k1, vs, ks in zip(
                P0[:m], V0[:m], K0[:m], P1[:m], V1[:m], K1[:m], Vs, Ks):
            applicable += 1
            if k0 == KIND_MINUS_INF or k1 == KIND_MINUS_INF:
                defect = 0.0 if ks == KIND_MINUS_INF else 1.0
            elif ks == KIND_NU:
                defect = 1.0
            elif ks == KIND_MINUS_INF:
                defect = 0.0
            else:
                defect = max(0.0, vs - (v0 + v1))
            tally.note(defect, {
                "inputs": {"y0": y0.tolist(), "y1": y1.tolist()},
                "values": {"phi_sum": _ext_json(vs, ks),
                           "phi_y0": _ext_json(v0, k0), "phi_cone_y1": _ext_json(v1, k1)},
            })
    return _report("recession_inequality", seed, n_samples, applicable, tally)


def check_dual_relation(h: FunctionalHandle, n_samples: int = 1000, seed: int = 42,
                        bbox=DEFAULT_BBOX) -> PropertyReport:
    """Agreement of the direct value with the negated complement route."""
    try:
        _dual_handle(h)
    except PreconditionFailed:
        return PropertyReport("dual_relation", INAPPLICABLE, None, 0.0, n_samples, seed, 0)
    rng = np.random.default_rng(seed)
    P, V, K, _ = _draw_domain(h, n_samples, rng, bbox)
    finite = K == KIND_FINITE
    P, V = P[finite], V[finite]
    tally = _Tally(1e-6)
    applicable = len(P)
    if applicable:
        duals = evaluate_dual_many(h, P)
        for y, v, d in zip(P, V, duals):
            defect = abs(d.value - v) if d.is_finite else 1.0 + abs(v)
            tally.note(defect, {
                "inputs": {"y": y.tolist()},
                "values": {"phi": float(v), "dual": str(d)},
            })
    return _report("dual_relation", seed, n_samples, applicable, tally)


# ---------------------------------------------------------------------------
# separation


def separate(h: FunctionalHandle, points, mode: str = "closed") -> SeparationVerdict:
    """Disjointness of a finite cloud from the set (closed) or its interior.

    Closed mode flags points with phi <= 0, interior mode flags
    phi < 0; nu values never flag in either mode.
    """
    if mode not in ("closed", "interior"):
        raise InvalidInput(f"mode must be 'closed' or 'interior', got {mode!r}")
    pts = np.asarray(getattr(points, "points", points), dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    vals, kinds = evaluate_batch(h, pts)
    idx, pv, vv = [], [], []
    for i, (v, kd) in enumerate(zip(vals, kinds)):
        if kd == KIND_NU:
            continue
        hit = (kd == KIND_MINUS_INF) or (v <= 0.0 if mode == "closed" else v < 0.0)
        if hit:
            idx.append(i)
            pv.append(pts[i].copy())
            vv.append(ExtReal.finite(v) if kd == KIND_FINITE else MINUS_INF)
    return SeparationVerdict(
        disjoint=not idx, mode=mode,
        offending_indices=tuple(idx),
        offending_points=tuple(pv),
        offending_values=tuple(vv),
    )


# ---------------------------------------------------------------------------
# regularity diagnostics


def estimate_lipschitz(h: FunctionalHandle, n_pairs: int = 1000, seed: int = 42,
                       bbox=DEFAULT_BBOX) -> LipschitzEstimate:
    """Empirical slope versus the certified row bound.

    The certified bound max ||a||_2 / (a·k) over recession-cone rows
    applies only when the direction is interior-certified; otherwise it
    is nu. The sampled slope must not exceed the bound; if it does, the
    evaluation machinery is inconsistent and this raises.
    """
    rows = h.direction.cert.halfspaces
    if not rows:
        raise PreconditionFailed("a certified recession cone is required")
    k = h.direction.k
    if h.direction.interior:
        l_bound = ExtReal.finite(
            max(float(np.linalg.norm(r.a)) / float(r.a @ k) for r in rows))
    else:
        l_bound = NU
    rng = np.random.default_rng(seed)
    lo, hi = bbox
    A = rng.uniform(lo, hi, size=(n_pairs, h.set.dim))
    B = rng.uniform(lo, hi, size=(n_pairs, h.set.dim))
    va, ka = evaluate_batch(h, A)
    vb, kb = evaluate_batch(h, B)
    dist = np.linalg.norm(A - B, axis=1)
    good = (ka == KIND_FINITE) & (kb == KIND_FINITE) & (dist > 1e-12)
    l_emp = float((np.abs(va - vb)[good] / dist[good]).max(initial=0.0))
    if h.direction.interior and l_emp > l_bound.value + 1e-6:
        raise UlsetError(
            f"sampled slope {l_emp} exceeds the certified bound {l_bound.value}; "
            "evaluation is inconsistent"
        )
    return LipschitzEstimate(l_emp, l_bound, h.direction.interior)


def _unwrap_polyhedron(s: SetExpr):
    offset = np.zeros(s.dim)
    while isinstance(s, Shift):
        offset = offset + s.offset
        s = s.base
    if isinstance(s, Polyhedron):
        return s, offset
    return None


def check_subgradient_bound(h: FunctionalHandle, ybar, n_samples: int = 1000,
                            seed: int = 42, bbox=DEFAULT_BBOX) -> PropertyReport:
    """Linearization bound y*·(y - ybar) <= phi_cone(y - ybar).

    y* is a_j / (a_j·k) for the lowest-index row attaining the
    closed-form max at ybar. Needs a plain (possibly shifted)
    polyhedron, an interior-certified direction and a finite value at
    ybar; anything else reports Inapplicable.
    """
    name = "subgradient_bound"
    unwrapped = _unwrap_polyhedron(h.set)
    if unwrapped is None or not h.direction.interior:
        return PropertyReport(name, INAPPLICABLE, None, 0.0, n_samples, seed, 0)
    poly, offset = unwrapped
    ybar = _as_vector(ybar, h.set.dim, "ybar")
    _, kbar = evaluate_batch(h, ybar[None, :])
    if kbar[0] != KIND_FINITE:
        return PropertyReport(name, INAPPLICABLE, None, 0.0, n_samples, seed, 0)
    k = h.direction.k
    ak = poly.normals @ k
    pos = ak > 1e-9
    ratios = (poly.normals @ (ybar - offset) - poly.offsets)[pos] / ak[pos]
    j = int(np.argmax(ratios))
    row = poly.normals[pos][j]
    ystar = row / float(row @ k)

    rec = make_handle(h.direction.cert.to_polyhedron(), k, t_max=h.t_max, tol=h.tol)
    rng = np.random.default_rng(seed)
    lo, hi = bbox
    Y = rng.uniform(lo, hi, size=(n_samples, h.set.dim))
    rhs, rkinds = evaluate_batch(rec, Y - ybar)
    lhs = (Y - ybar) @ ystar
    tally = _Tally(1e-7)
    applicable = 0
    for y, lv, rv, rk in zip(Y, lhs, rhs, rkinds):
        if rk == KIND_NU:
            continue
        applicable += 1
        defect = 0.0 if rk == KIND_MINUS_INF else max(0.0, lv - rv)
        tally.note(defect, {
            "inputs": {"y": y.tolist(), "ybar": ybar.tolist()},
            "values": {"linear": float(lv), "cone_bound": _ext_json(rv, rk),
                       "subgradient": ystar.tolist()},
        })
    return _report(name, seed, n_samples, applicable, tally)
