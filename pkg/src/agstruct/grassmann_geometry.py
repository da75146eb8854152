"""The flat model and test-structure generators.

Plücker embedding and Segre cone utilities on one side; on the other,
generators of sampled coframe fields whose analysis outcome is known:

* ``flat_coframe`` -- the integrable model on a matrix-space chart.  Any
  pointwise invertible left/right factor pair (plus a scalar) applied to
  the coordinate differentials is an adapted coframe of the same flat
  structure, so the computed torsion must converge to zero at second
  order in the grid spacing.
* ``perturbed_coframe`` -- the flat field plus a generic non-factored
  perturbation; genuinely nonzero torsion at a controlled scale.
* ``web_coframe`` -- coframes adapted to a three-web (and to webs of
  p+1 codimension-q foliations for larger p); generically nonzero
  torsion whose symmetric-latin part vanishes, the structural signature
  of web-induced geometry at p = 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .tensor_core import Signature
from .coframe_field import CoframeField, FieldError, GridSpec, build_field
from .coframe_field import torsion_field


# ---------------------------------------------------------------------------
# Plücker / Segre

@dataclass(frozen=True)
class SegrePoint:
    """Tangent vector in the adapted frame, as a p x q coordinate matrix."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 2:
            raise ValueError("a Segre point is a p x q matrix")
        if not np.all(np.isfinite(z)):
            raise ValueError("Segre point entries must be finite")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class PlueckerPoint:
    """Grassmann coordinates of a p-plane spanned by the rows of a basis."""

    coordinates: np.ndarray
    reference_basis: np.ndarray


def pluecker_embed(basis: np.ndarray) -> PlueckerPoint:
    """All maximal minors of a full-rank p x (p+q) basis, lexicographic
    in column subsets."""
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] >= basis.shape[1]:
        raise ValueError("basis must be p x (p+q) with p < p+q")
    p, m = basis.shape
    s = np.linalg.svd(basis, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise ValueError("basis is rank deficient")
    coords = np.array(
        [np.linalg.det(basis[:, cols]) for cols in itertools.combinations(range(m), p)]
    )
    return PlueckerPoint(coords, basis.copy())


def segre_membership(z, tol: float = 1e-10) -> bool:
    """Whether the matrix lies on the rank-one cone (vertex included).

    Relative rank test: second singular value at most ``tol`` times the
    largest.
    """
    z = z.z if isinstance(z, SegrePoint) else np.asarray(z, dtype=float)
    s = np.linalg.svd(z, compute_uv=False)
    if s[0] == 0.0:
        return True
    return bool(s[1] <= tol * s[0])


def segre_param(t: np.ndarray, s: np.ndarray) -> SegrePoint:
    """Cone point from parameters: the outer product of ``t`` and ``s``."""
    return SegrePoint(np.outer(np.asarray(t, float), np.asarray(s, float)))


def second_fundamental_forms(dz: np.ndarray) -> np.ndarray:
    """All 2 x 2 minors of a p x q displacement matrix.

    Returns W with ``W[a, b, i, j] = dz[a, i] dz[b, j] - dz[a, j] dz[b, i]``;
    the independent values sit at a < b, i < j.  They all vanish exactly
    on the rank-one cone.
    """
    dz = np.asarray(dz, dtype=float)
    return np.einsum("ai,bj->abij", dz, dz) - np.einsum("aj,bi->abij", dz, dz)


# ---------------------------------------------------------------------------
# flat model

def _active_mixture(x: np.ndarray, active: Sequence[int], weights: Sequence[float]) -> float:
    return float(sum(w * x[a] for w, a in zip(weights, active)))


def _default_factors(signature: Signature, active: Sequence[int], amplitude: float):
    """Deterministic smooth chart factors varying along the active axes."""
    p, q = signature.p, signature.q
    w1 = [1.0 / (k + 1.0) for k in range(len(active))]
    w2 = [1.0 / (k + 1.5) for k in range(len(active))]
    w3 = [1.0 / (k + 2.0) for k in range(len(active))]

    def f_greek(x):
        t = _active_mixture(x, active, w1)
        a = np.fromfunction(
            lambda r, c: np.sin(t * (1.0 + 0.3 * r + 0.7 * c) + r - c), (p, p)
        )
        return np.eye(p) + amplitude * a

    def f_latin(x):
        t = _active_mixture(x, active, w2)
        a = np.fromfunction(
            lambda r, c: np.cos(t * (1.0 + 0.5 * r + 0.2 * c) + 2 * r + c), (q, q)
        )
        return np.eye(q) + amplitude * a

    def f_scale(x):
        return 1.0 + amplitude * math.sin(_active_mixture(x, active, w3) + 0.25)

    return f_greek, f_latin, f_scale


def flat_coframe(
    signature: Signature,
    chart: GridSpec,
    factors: str | tuple = "default",
    amplitude: float = 0.05,
) -> CoframeField:
    """Adapted coframe of the integrable model on a box chart.

    The frame at x maps dX to ``scale(x) * F(x) dX G(x)`` for invertible
    factor fields F (p x p) and G (q x q).  With identity factors the
    coframe is the coordinate one and the computed torsion vanishes
    exactly; any other smooth factors leave the structure flat, so the
    torsion field is pure discretization error of second order.
    """
    n = signature.n
    if chart.dim != n:
        raise FieldError("chart dimension must equal p*q")
    if factors == "identity":
        eye = np.eye(n)
        return build_field(signature, chart, lambda x: eye)
    if factors == "default":
        active = chart.active_axes
        if not active:
            raise FieldError("default factors need at least one varying axis")
        fg, fl, fs = _default_factors(signature, active, amplitude)
    else:
        fg, fl, fs = factors

    def frame(x):
        return fs(x) * np.kron(fg(x), fl(x).T)

    return build_field(signature, chart, frame)


def perturbed_coframe(
    signature: Signature,
    chart: GridSpec,
    amplitude: float = 0.05,
    epsilon: float = 0.02,
) -> CoframeField:
    """Flat-model coframe plus a generic non-factored perturbation.

    The perturbation does not split into left/right factors, so the
    structure is no longer flat and the torsion is genuinely nonzero, of
    order ``epsilon``.
    """
    n = signature.n
    active = chart.active_axes
    if not active:
        raise FieldError("perturbed coframe needs at least one varying axis")
    fg, fl, fs = _default_factors(signature, active, amplitude)
    w = [1.0 / (k + 1.25) for k in range(len(active))]

    def frame(x):
        base = fs(x) * np.kron(fg(x), fl(x).T)
        t = _active_mixture(x, active, w)
        bump = np.fromfunction(
            lambda r, c: np.sin(t * (1.0 + 0.21 * r) + 0.5 * r * c + 0.3 * c), (n, n)
        )
        return base + epsilon * bump

    return build_field(signature, chart, frame)


def truncated_box(
    signature: Signature,
    center: Sequence[float] | float = 0.3,
    width: float = 0.4,
    nodes: int = 9,
    active_axes: Optional[Sequence[int]] = None,
) -> GridSpec:
    """Axis-truncated grid: the listed axes span a box around the center,
    every other axis is frozen at its center value (one node)."""
    n = signature.n
    if active_axes is None:
        active_axes = tuple(range(min(3, n)))
    center = [float(center)] * n if np.isscalar(center) else [float(v) for v in center]
    lo, hi, counts = [], [], []
    for a in range(n):
        if a in active_axes:
            lo.append(center[a] - width / 2.0)
            hi.append(center[a] + width / 2.0)
            counts.append(int(nodes))
        else:
            lo.append(center[a])
            hi.append(center[a])
            counts.append(1)
    return GridSpec(tuple(lo), tuple(hi), tuple(counts))


def flat_convergence_study(
    signature: Signature,
    levels: int = 4,
    nodes: int = 9,
    width: float = 0.4,
    center: float = 0.3,
    active_axes: Optional[Sequence[int]] = None,
    amplitude: float = 0.05,
    kind: str = "flat",
    epsilon: float = 0.02,
) -> list:
    """Torsion sup-norms of the flat (or perturbed) model on a dyadic
    ladder of shrinking boxes; the grid spacing halves at each level."""
    sups = []
    for lev in range(levels):
        chart = truncated_box(
            signature, center=center, width=width / 2 ** lev,
            nodes=nodes, active_axes=active_axes,
        )
        if kind == "flat":
            f = flat_coframe(signature, chart, amplitude=amplitude)
        elif kind == "perturbed":
            f = perturbed_coframe(signature, chart, amplitude=amplitude, epsilon=epsilon)
        else:
            raise ValueError(f"unknown study kind {kind!r}")
        sups.append(torsion_field(f).norms["a_sup"])
    return sups


def observed_orders(sups: Sequence[float]) -> list:
    """Convergence orders from consecutive dyadic levels."""
    out = []
    for a, b in zip(sups, sups[1:]):
        if b == 0.0:
            out.append(float("inf"))
        else:
            out.append(math.log2(a / b))
    return out


# ---------------------------------------------------------------------------
# webs

@dataclass(frozen=True)
class ThreeWeb:
    """Three-web data on R^(2q): the middle foliation is the level set of
    a function whose partial Jacobians both stay invertible.

    ``jac_x`` and ``jac_y`` map (x, y) -> q x q Jacobian blocks.  The
    first two foliations are the coordinate ones; the adapted coframe is
    (jac_x dx, jac_y dy).
    """

    q: int
    jac_x: Callable
    jac_y: Callable
    name: str = "three-web"
    varies_along: tuple = ()   # coordinate axes the Jacobians depend on


@dataclass(frozen=True)
class MultiWeb:
    """p+1 codimension-q foliations in general position on R^(p*q).

    Foliations 1..p are the coordinate-block ones; the last one is the
    graph family of the supplied maps, one per block 2..p, each given by
    its Jacobian at the first block coordinates.
    """

    p: int
    q: int
    jacobians: tuple   # p-1 callables, z (q-vector) -> q x q
    name: str = "multi-web"


@dataclass(frozen=True)
class PolynomialFoliation:
    """Quadratic foliation map z -> L z + 1/2 (z^T Q z) with Jacobian
    L + Q.z; the serializable foliation format the CLI accepts."""

    linear: np.ndarray
    quadratic: Optional[np.ndarray] = None

    def __post_init__(self):
        L = np.asarray(self.linear, dtype=float)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise ValueError("linear part must be square")
        object.__setattr__(self, "linear", L)
        if self.quadratic is not None:
            Q = np.asarray(self.quadratic, dtype=float)
            if Q.shape != (L.shape[0],) * 3:
                raise ValueError("quadratic part must be q x q x q")
            object.__setattr__(self, "quadratic", 0.5 * (Q + Q.transpose(0, 2, 1)))

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        J = self.linear.copy()
        if self.quadratic is not None:
            J = J + np.einsum("ijk,k->ij", self.quadratic, np.asarray(z, float))
        return J


def multiweb_from_dict(p: int, q: int, d: dict) -> MultiWeb:
    """Build a MultiWeb from the JSON foliation format:
    {"foliations": [{"linear": qxq, "quadratic": qxqxq?}, ...]} with
    p-1 entries."""
    entries = d.get("foliations")
    if not isinstance(entries, list) or len(entries) != p - 1:
        raise ValueError(f"foliation file must list exactly {p - 1} foliations")
    fols = [PolynomialFoliation(e["linear"], e.get("quadratic")) for e in entries]
    return MultiWeb(p, q, tuple(f.jacobian for f in fols), "file-web")


# The middle foliation must couple different coordinate directions with
# an asymmetric mixed Hessian (terms like x0*y1 without the x1*y0 twin),
# otherwise the induced torsion cancels in the skew part and the web
# looks flat to the pipeline.

def _web_fixture_q2() -> dict:
    c = 0.35

    # f = x + y + c*(x0*y1, x0^2*y1)
    def jx_poly(x, y):
        return np.array([[1.0 + c * y[1], 0.0], [2.0 * c * x[0] * y[1], 1.0]])

    def jy_poly(x, y):
        return np.array([[1.0, c * x[0]], [0.0, 1.0 + c * x[0] ** 2]])

    # f = x + y + c*(sin(x0)*y1, x0*sin(y1))
    def jx_trans(x, y):
        return np.array([[1.0 + c * math.cos(x[0]) * y[1], 0.0],
                         [c * math.sin(y[1]), 1.0]])

    def jy_trans(x, y):
        return np.array([[1.0, c * math.sin(x[0])],
                         [0.0, 1.0 + c * x[0] * math.cos(y[1])]])

    return {
        "polynomial": ThreeWeb(2, jx_poly, jy_poly, "poly-web-q2", (0, 3)),
        "transcendental": ThreeWeb(2, jx_trans, jy_trans, "trans-web-q2", (0, 3)),
    }


def _web_fixture_q3() -> dict:
    c = 0.35

    # f = x + y + c*(x0*y1, x0^2*y1, x0*y1^2)
    def jx_poly(x, y):
        g = np.zeros((3, 3))
        g[0, 0] = y[1]
        g[1, 0] = 2.0 * x[0] * y[1]
        g[2, 0] = y[1] ** 2
        return np.eye(3) + c * g

    def jy_poly(x, y):
        g = np.zeros((3, 3))
        g[0, 1] = x[0]
        g[1, 1] = x[0] ** 2
        g[2, 1] = 2.0 * x[0] * y[1]
        return np.eye(3) + c * g

    # f = x + y + c*(sin(x0)*y1, exp(0.4*x0)*y1, x0*sin(y1))
    def jx_trans(x, y):
        g = np.zeros((3, 3))
        g[0, 0] = math.cos(x[0]) * y[1]
        g[1, 0] = 0.4 * math.exp(0.4 * x[0]) * y[1]
        g[2, 0] = math.sin(y[1])
        return np.eye(3) + c * g

    def jy_trans(x, y):
        g = np.zeros((3, 3))
        g[0, 1] = math.sin(x[0])
        g[1, 1] = math.exp(0.4 * x[0])
        g[2, 1] = x[0] * math.cos(y[1])
        return np.eye(3) + c * g

    return {
        "polynomial": ThreeWeb(3, jx_poly, jy_poly, "poly-web-q3", (0, 4)),
        "transcendental": ThreeWeb(3, jx_trans, jy_trans, "trans-web-q3", (0, 4)),
    }


#: Built-in regression fixtures: one polynomial and one transcendental
#: three-web per latin range in {2, 3}.
WEB_FIXTURES = {2: _web_fixture_q2(), 3: _web_fixture_q3()}


def parallel_three_web(q: int) -> ThreeWeb:
    """Linear web (all leaves parallel): the induced structure is flat."""
    eye = np.eye(q)
    return ThreeWeb(q, lambda x, y: eye, lambda x, y: eye, "parallel-web", ())


def web_coframe(
    signature: Signature,
    web: Optional[object] = None,
    chart: Optional[GridSpec] = None,
    det_floor: float = 1e-6,
) -> CoframeField:
    """Coframe adapted to a web of foliations.

    For p = 2 the web is a :class:`ThreeWeb` (default: the built-in
    polynomial fixture for the signature's latin range).  For p > 2 a
    :class:`MultiWeb` must be supplied.  Raises when the foliation
    Jacobians degenerate on the grid (general-position failure).
    """
    p, q = signature.p, signature.q
    if p == 2:
        if web is None:
            if q not in WEB_FIXTURES:
                raise FieldError(f"no built-in web fixture for q={q}; supply one")
            web = WEB_FIXTURES[q]["polynomial"]
        if not isinstance(web, ThreeWeb):
            raise FieldError("p=2 expects a ThreeWeb")
        if web.q != q:
            raise FieldError("web block size does not match the signature")
        if chart is None:
            active = web.varies_along or (0, q)
            chart = truncated_box(signature, center=0.3, width=0.5, nodes=9,
                                  active_axes=active)

        def frame(xy):
            x, y = xy[:q], xy[q:]
            P, Q = web.jac_x(x, y), web.jac_y(x, y)
            if abs(np.linalg.det(P)) < det_floor or abs(np.linalg.det(Q)) < det_floor:
                raise FieldError("foliations not in general position (singular Jacobian)")
            E = np.zeros((2 * q, 2 * q))
            E[:q, :q] = P
            E[q:, q:] = Q
            return E

        return build_field(signature, chart, frame)

    if not isinstance(web, MultiWeb):
        raise FieldError("p>2 requires explicit MultiWeb foliation data")
    if web.p != p or web.q != q:
        raise FieldError("web dimensions do not match the signature")
    if chart is None:
        chart = truncated_box(signature, center=0.3, width=0.5, nodes=9,
                              active_axes=tuple(range(q)))

    def frame(xv):
        z = xv[:q]
        E = np.zeros((p * q, p * q))
        E[:q, :q] = np.eye(q)
        for u, jac in enumerate(web.jacobians, start=1):
            J = np.asarray(jac(z), dtype=float)
            if abs(np.linalg.det(J)) < det_floor:
                raise FieldError("foliations not in general position (singular Jacobian)")
            E[u * q:(u + 1) * q, u * q:(u + 1) * q] = np.linalg.inv(J)
        return E

    return build_field(signature, chart, frame)
