"""Sampled coframe fields and the discrete analysis pipeline.

A coframe field stores, on a rectangular grid in R^n (n = p*q), the
invertible matrix E expressing the adapted coframe in coordinates:
omega^(alpha,i) = sum_mu E[(alpha,i), mu] dx^mu, with the composite row
index (alpha, i) laid out row-major as alpha*q + i.

Derivatives are uniform-grid central differences, O(h^2) on smooth
fields.  Axes may carry a single node: the field is then constant along
that axis and its derivative is exactly zero ("axis-truncated" grids,
the practical way to run high-dimensional signatures at desk scale).

Connection forms are never estimated (zero-connection gauge): all of
the coframe derivative lands in the raw coefficients, and the torsion
projection removes exactly the part a connection choice would have
absorbed.  Derivative blocks computed this way omit connection
corrections; downstream curvature recoveries from such jets are labeled
gauge-approximate in the diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .tensor_core import IndexedTensor, Signature
from .structure_tensor import (
    RawCoefficients,
    TorsionTensor,
    U_SLOTS,
    torsion_from_raw,
    VARIANT_TRACELESS,
)
from .curvature import AP_SLOTS, TorsionJet

MAX_CONDITION = 1e8
MIN_NODES = 5


class FieldError(ValueError):
    """Invalid grid or frame data."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular grid on a box.

    Each axis carries either at least :data:`MIN_NODES` nodes or exactly
    one node; a one-node axis marks a direction the field does not vary
    along (derivative identically zero).
    """

    lo: tuple
    hi: tuple
    nodes: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        nodes = tuple(int(v) for v in self.nodes)
        if not (len(lo) == len(hi) == len(nodes)):
            raise FieldError("grid axis lists must have equal length")
        for a, (l, h, m) in enumerate(zip(lo, hi, nodes)):
            if m < 1:
                raise FieldError(f"axis {a}: node count must be positive")
            if m == 1 and l != h:
                raise FieldError(f"axis {a}: a one-node axis must have lo == hi")
            if m > 1 and not h > l:
                raise FieldError(f"axis {a}: empty extent")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "nodes", nodes)

    @property
    def dim(self) -> int:
        return len(self.nodes)

    @property
    def active_axes(self) -> tuple:
        return tuple(a for a, m in enumerate(self.nodes) if m > 1)

    def spacing(self, axis: int) -> float:
        if self.nodes[axis] == 1:
            return 0.0
        return (self.hi[axis] - self.lo[axis]) / (self.nodes[axis] - 1)

    def axis_coords(self, axis: int) -> np.ndarray:
        return np.linspace(self.lo[axis], self.hi[axis], self.nodes[axis])

    def points(self) -> np.ndarray:
        """Coordinates of every node, shape (*nodes, dim)."""
        grids = np.meshgrid(*(self.axis_coords(a) for a in range(self.dim)), indexing="ij")
        return np.stack(grids, axis=-1)

    def interior(self, layers: int = 1) -> tuple:
        """Slices selecting nodes with ``layers`` stencil layers available."""
        out = []
        for a, m in enumerate(self.nodes):
            if m == 1:
                out.append(slice(None))
            else:
                if m - 2 * layers < 1:
                    raise FieldError(f"axis {a}: not enough nodes for {layers} interior layers")
                out.append(slice(layers, m - layers))
        return tuple(out)

    def shrink(self, layers: int = 1) -> "GridSpec":
        """Grid of the interior nodes."""
        lo, hi, nodes = [], [], []
        for a, m in enumerate(self.nodes):
            if m == 1:
                lo.append(self.lo[a]); hi.append(self.hi[a]); nodes.append(1)
            else:
                h = self.spacing(a)
                lo.append(self.lo[a] + layers * h)
                hi.append(self.hi[a] - layers * h)
                nodes.append(m - 2 * layers)
        return GridSpec(tuple(lo), tuple(hi), tuple(nodes))

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "nodes": list(self.nodes)}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(tuple(d["lo"]), tuple(d["hi"]), tuple(d["nodes"]))


@dataclass(frozen=True)
class CoframeField:
    """Invertible coframe matrices sampled on a grid."""

    signature: Signature
    grid: GridSpec
    frames: np.ndarray

    def __post_init__(self):
        n = self.signature.n
        if self.grid.dim != n:
            raise FieldError(f"grid dimension {self.grid.dim} != p*q = {n}")
        for a, m in enumerate(self.grid.nodes):
            if m != 1 and m < MIN_NODES:
                raise FieldError(
                    f"axis {a}: coframe grids need >= {MIN_NODES} nodes per varying "
                    f"axis (got {m}); central differences need interior stencils"
                )
        frames = np.asarray(self.frames, dtype=float)
        if frames.shape != (*self.grid.nodes, n, n):
            raise FieldError(
                f"frames shape {frames.shape} != {(*self.grid.nodes, n, n)}"
            )
        if not np.all(np.isfinite(frames)):
            raise FieldError("frames must be finite")
        conds = np.linalg.cond(frames.reshape(-1, n, n))
        worst = float(np.max(conds))
        if not np.isfinite(worst) or worst > MAX_CONDITION:
            raise FieldError(f"frame condition number {worst:.2e} exceeds {MAX_CONDITION:.0e}")
        frames = frames.copy()
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    def save(self, path) -> None:
        save_field(self, path)


def build_field(signature: Signature, grid: GridSpec, frame_fn: Callable) -> CoframeField:
    """Sample ``frame_fn(x) -> (n, n) array`` on every grid node."""
    pts = grid.points().reshape(-1, grid.dim)
    n = signature.n
    frames = np.empty((pts.shape[0], n, n))
    for idx, x in enumerate(pts):
        frames[idx] = np.asarray(frame_fn(x), dtype=float)
    return CoframeField(signature, grid, frames.reshape(*grid.nodes, n, n))


def _field_gradient(arr: np.ndarray, grid: GridSpec) -> list:
    """Central-difference derivative of a nodewise array along every axis.

    Returns one array per coordinate axis; one-node axes contribute
    exact zeros.  Boundary values use one-sided differences and must be
    discarded by the caller.
    """
    out = []
    for a in range(grid.dim):
        if grid.nodes[a] == 1:
            out.append(np.zeros_like(arr))
        else:
            out.append(np.gradient(arr, grid.spacing(a), axis=a))
    return out


def exterior_derivative(f: CoframeField) -> np.ndarray:
    """Coordinate coefficients of d(omega) at interior nodes.

    Returns C with shape (*interior, n, n, n) where
    ``C[..., r, mu, nu] = d_mu E[r, nu] - d_nu E[r, mu]`` and
    ``d(omega^r) = 1/2 C[r, mu, nu] dx^mu wedge dx^nu``.
    """
    grads = _field_gradient(f.frames, f.grid)
    sel = f.grid.interior()
    G = np.stack([g[sel] for g in grads], axis=-3)  # (*interior, mu, r, nu)
    G = np.moveaxis(G, -3, -2)                      # (*interior, r, mu, nu)
    return G - np.swapaxes(G, -1, -2)


@dataclass(frozen=True)
class RawCoefficientField:
    """Raw structure coefficients at every interior node."""

    signature: Signature
    grid: GridSpec          # interior grid
    u: np.ndarray           # (*interior, q, p, p, p, q, q)

    def at(self, idx: tuple) -> RawCoefficients:
        return RawCoefficients(
            self.signature, IndexedTensor(self.signature, U_SLOTS, self.u[idx])
        )

    def node_indices(self):
        return np.ndindex(*self.grid.nodes)


def raw_structure_coeffs(f: CoframeField) -> RawCoefficientField:
    """Express d(omega) in the coframe basis, zero-connection gauge.

    The connection contributions are deliberately not split off; the
    torsion projection downstream removes exactly that ambiguity.
    Vertical-pair antisymmetry is enforced on the result.
    """
    sig = f.signature
    p, q, n = sig.p, sig.q, sig.n
    C = exterior_derivative(f)
    sel = f.grid.interior()
    Einv = np.linalg.inv(f.frames[sel])
    W = 0.5 * np.einsum("...rmv,...mb,...vc->...rbc", C, Einv, Einv)
    W6 = W.reshape(*W.shape[:-3], p, q, p, q, p, q)
    # (alpha, i, beta, j, gamma, k) -> (i, beta, gamma, alpha, j, k)
    u = np.moveaxis(W6, [-6, -5, -4, -3, -2, -1], [-3, -6, -5, -2, -4, -1])
    swapped = np.moveaxis(u, [-5, -4, -2, -1], [-4, -5, -1, -2])
    u = 0.5 * (u - swapped)
    return RawCoefficientField(sig, f.grid.shrink(), u)


@dataclass(frozen=True)
class TorsionField:
    """Torsion tensor at every interior node, with summary norms."""

    signature: Signature
    grid: GridSpec
    a: np.ndarray
    a_alpha: np.ndarray
    a_beta: np.ndarray
    norms: dict = field(default_factory=dict)

    def at(self, idx: tuple) -> TorsionTensor:
        sig = self.signature
        return TorsionTensor(
            sig,
            IndexedTensor(sig, U_SLOTS, self.a[idx]),
            IndexedTensor(sig, U_SLOTS, self.a_alpha[idx]),
            IndexedTensor(sig, U_SLOTS, self.a_beta[idx]),
        )

    def center_index(self) -> tuple:
        return tuple(m // 2 for m in self.grid.nodes)


def torsion_field(f: CoframeField, variant: str = VARIANT_TRACELESS) -> TorsionField:
    """Torsion tensor of the sampled structure at every interior node.

    Nodewise application of the same projection used for single raw
    coefficient tensors, so field results and single-tensor results are
    identical by construction.
    """
    rcf = raw_structure_coeffs(f)
    sig = f.signature
    shape = rcf.u.shape
    a = np.empty(shape)
    a_al = np.empty(shape)
    a_be = np.empty(shape)
    batch = shape[: -6]
    for idx in np.ndindex(*batch):
        tt = torsion_from_raw(rcf.at(idx), variant=variant)
        a[idx] = tt.a.components
        a_al[idx] = tt.a_alpha.components
        a_be[idx] = tt.a_beta.components
    flat = lambda arr: arr.reshape(-1, *shape[-6:])
    per_node = lambda arr: np.max(np.abs(flat(arr)), axis=tuple(range(1, 7)))
    norms = {
        "a_sup": float(np.max(per_node(a))),
        "a_alpha_sup": float(np.max(per_node(a_al))),
        "a_beta_sup": float(np.max(per_node(a_be))),
    }
    return TorsionField(sig, rcf.grid, a, a_al, a_be, norms)


@dataclass(frozen=True)
class JetField:
    """Torsion jets on the second interior layer."""

    signature: Signature
    grid: GridSpec
    a: np.ndarray
    a_prime: np.ndarray

    def at(self, idx: tuple) -> TorsionJet:
        sig = self.signature
        return TorsionJet(
            sig,
            IndexedTensor(sig, U_SLOTS, self.a[idx]),
            IndexedTensor(sig, AP_SLOTS, self.a_prime[idx]),
        )

    def center_index(self) -> tuple:
        return tuple(m // 2 for m in self.grid.nodes)

    def center_jet(self) -> TorsionJet:
        return self.at(self.center_index())


def pfaffian_field(tf: TorsionField, f: CoframeField) -> JetField:
    """Frame-direction derivatives of the torsion field.

    Coordinate derivatives by central differences, then contraction with
    the inverse frame.  Connection corrections are omitted under the
    zero-connection gauge; the induced error scales with the product of
    the torsion and the frame derivatives.
    """
    sig = f.signature
    p, q = sig.p, sig.q
    grads = _field_gradient(tf.a, tf.grid)
    sel = tf.grid.interior()
    D = np.stack([g[sel] for g in grads], axis=-1)       # (*interior2, 6 tensor axes, mu)
    Einv = np.linalg.inv(f.frames[f.grid.interior()][sel])
    Einv = Einv.reshape(*Einv.shape[:-1], p, q)          # (*interior2, mu, delta, l)
    ap = np.einsum("...abcdefm,...mgh->...abcdefgh", D, Einv)
    return JetField(sig, tf.grid.shrink(), tf.a[sel], ap)


def gauge_transform(
    f: CoframeField,
    a_greek: np.ndarray,
    a_latin: np.ndarray,
    lam,
    det_tol: float = 1e-10,
) -> CoframeField:
    """Structure-group action on the coframe.

    ``a_greek`` (p x p) and ``a_latin`` (q x q) must be unimodular,
    pointwise or constant; ``lam`` is a nonzero scalar (field).  The
    coframe rows mix through the product action and scale by ``lam``;
    constant-parameter transforms preserve every verdict, and a constant
    ``lam`` divides the recomputed torsion by ``lam``.
    """
    sig = f.signature
    p, q, n = sig.p, sig.q, sig.n
    nodes = f.grid.nodes

    def per_node(arr, shape, name):
        arr = np.asarray(arr, dtype=float)
        if arr.shape == shape:
            return np.broadcast_to(arr, (*nodes, *shape))
        if arr.shape == (*nodes, *shape):
            return arr
        raise FieldError(f"{name} must have shape {shape} or {(*nodes, *shape)}")

    ag = per_node(a_greek, (p, p), "a_greek")
    al = per_node(a_latin, (q, q), "a_latin")
    lam_arr = np.asarray(lam, dtype=float)
    if lam_arr.shape == ():
        lam_arr = np.broadcast_to(lam_arr, nodes)
    elif lam_arr.shape != nodes:
        raise FieldError("lam must be a scalar or a per-node scalar field")
    if np.any(lam_arr == 0.0):
        raise FieldError("lam must be nonzero")
    if np.max(np.abs(np.linalg.det(ag) - 1.0)) > det_tol:
        raise FieldError("a_greek must be unimodular")
    if np.max(np.abs(np.linalg.det(al) - 1.0)) > det_tol:
        raise FieldError("a_latin must be unimodular")

    mix = np.einsum("...ab,...ij->...aibj", ag, al).reshape(*nodes, n, n)
    frames = lam_arr[..., None, None] * np.einsum("...rs,...sm->...rm", mix, f.frames)
    return CoframeField(sig, f.grid, frames)


# ---------------------------------------------------------------------------
# file format: JSON header line + little-endian float64 frames, or pure JSON

_FORMAT = "agstruct-coframe-v1"


def save_field(f: CoframeField, path) -> None:
    path = str(path)
    header = {
        "format": _FORMAT,
        "p": f.signature.p,
        "q": f.signature.q,
        "grid": f.grid.to_dict(),
    }
    if path.endswith(".json"):
        header["encoding"] = "json"
        header["frames"] = f.frames.ravel(order="C").tolist()
        with open(path, "w") as fh:
            json.dump(header, fh)
    else:
        header["encoding"] = "binary-le-f64"
        with open(path, "wb") as fh:
            fh.write((json.dumps(header) + "\n").encode("utf-8"))
            fh.write(f.frames.astype("<f8").tobytes(order="C"))


def load_field(path) -> CoframeField:
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            header = json.load(fh)
        if header.get("format") != _FORMAT:
            raise FieldError("not a coframe field file")
        frames = np.asarray(header["frames"], dtype=float)
    else:
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode("utf-8"))
            if header.get("format") != _FORMAT:
                raise FieldError("not a coframe field file")
            frames = np.frombuffer(fh.read(), dtype="<f8").astype(float)
    sig = Signature(int(header["p"]), int(header["q"]))
    grid = GridSpec.from_dict(header["grid"])
    n = sig.n
    frames = frames.reshape(*grid.nodes, n, n)
    return CoframeField(sig, grid, frames)
