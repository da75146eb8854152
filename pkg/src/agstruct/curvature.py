"""Curvature objects of the structure and the verdict logic.

From the torsion tensor and its first derivatives (a torsion jet) the
two curvature blocks ``b1`` (latin type) and ``b2`` (greek type) are
recovered by solving a linear system whose left side pairs deltas with
the unknowns and alternates over three vertical pairs.  A second system
of the same shape recovers the third-order object ``c``.  Uniqueness of
both recoveries is governed by small integer determinants:

* ``b`` is uniquely determined when p > 2 and q > 2,
* ``c`` via the greek route when p > 2, via the latin route when q > 2.

When a determinant vanishes the solver still returns the least-squares
minimum-norm representative but flags the nonzero kernel.  All solves
run over the subspace cut out by the curvature constraints (vertical
pair antisymmetry, vanishing traces, and the joint trace normalization
linking ``b1`` and ``b2``), so solver outputs satisfy those constraints
to rounding.

Slot layouts::

    b1: (i up-latin, gamma, delta up-greek, j, k, l down-latin)
    b2: (beta, gamma, delta up-greek, alpha down-greek, k, l down-latin)
    c:  (alpha, beta, gamma up-greek, i, j, k down-latin)
    A:  (i, beta, gamma, delta, alpha, j, k, l)           pairs (1,5)(2,6)(3,7)
    B-greek: (beta, gamma, delta, eps, alpha, k, l, m)    pairs (1,5)(2,6)(3,7)
    B-latin: (i, gamma, delta, eps, j, k, l, m)           pairs (1,5)(2,6)(3,7)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .tensor_core import (
    DG,
    DL,
    GREEK,
    LATIN,
    UG,
    UL,
    IndexedTensor,
    Signature,
    alternate_slots,
    alternate_vertical_pairs,
    combine,
    contract,
    contracted_product,
    delta,
    permute_slots,
    symmetrize_slots,
    tensor_product,
    tensor_to_dict,
    zeros,
)
from .structure_tensor import (
    TorsionTensor,
    U_PAIRS,
    U_SLOTS,
    pair_antisymmetry_residual,
    trace_residuals,
)

B1_SLOTS = (UL, UG, UG, DL, DL, DL)
B2_SLOTS = (UG, UG, UG, DG, DL, DL)
C_SLOTS = (UG, UG, UG, DL, DL, DL)
A_SLOTS = (UL, UG, UG, UG, DG, DL, DL, DL)
BG_SLOTS = (UG, UG, UG, UG, DG, DL, DL, DL)
BL_SLOTS = (UL, UG, UG, UG, DL, DL, DL, DL)
AP_SLOTS = U_SLOTS + (UG, DL)
B1P_SLOTS = B1_SLOTS + (UG, DL)
B2P_SLOTS = B2_SLOTS + (UG, DL)

TRIPLE_PAIRS = ((1, 5), (2, 6), (3, 7))
BPAIRS = ((1, 4), (2, 5))

JET_TOL = 1e-10
SUITE_TOL = 1e-10
RCOND = 1e-8


class InsufficientDataError(ValueError):
    """The requested verdict needs data the caller did not supply."""


# ---------------------------------------------------------------------------
# determinant guards

def determinant_guards(signature: Signature) -> dict:
    """Closed-form determinants governing solver uniqueness.

    ``dSymQ``/``dAltQ`` control the symmetric and alternated blocks of
    the greek curvature recovery, ``dSymP``/``dAltP`` the latin one, and
    ``dPairPQ`` the frame normalization step.  A zero entry means the
    corresponding recovery has a kernel.
    """
    p, q = signature.p, signature.q
    return {
        "dSymQ": (q - 1) ** 2 * (q + 2),
        "dAltQ": (q + 1) ** 2 * (q - 2),
        "dSymP": (p - 1) ** 2 * (p + 2),
        "dAltP": (p + 1) ** 2 * (p - 2),
        "dPairPQ": (p + q) ** 2 - 4,
    }


def trace_block_matrices(r: int):
    """The two 3x3 blocks of the contracted homogeneous systems.

    The symmetric block has determinant (r-1)^2 (r+2), the alternated
    block -(r+1)^2 (r-2); the alternated one is singular exactly at r=2.
    """
    sym = np.full((3, 3), 1.0) + (r - 1) * np.eye(3)
    alt = np.full((3, 3), 1.0) - (r + 1) * np.eye(3)
    return sym, alt


# ---------------------------------------------------------------------------
# jet

@dataclass(frozen=True)
class TorsionJet:
    """Torsion tensor together with its frame-direction derivatives.

    ``a_prime`` carries one extra vertical pair (slots 6, 7) indexing the
    derivative direction; in its first six slots it satisfies the same
    constraints as ``a``.  Optional ``b1_prime`` / ``b2_prime`` blocks
    supply curvature derivatives for the third-order recovery; when they
    are absent that recovery runs under a truncated jet.
    """

    signature: Signature
    a: IndexedTensor
    a_prime: IndexedTensor
    b1_prime: Optional[IndexedTensor] = None
    b2_prime: Optional[IndexedTensor] = None

    def __post_init__(self):
        if self.a.slots != U_SLOTS or self.a_prime.slots != AP_SLOTS:
            raise ValueError("jet tensors must use the canonical slot layouts")
        res = dict(trace_residuals(self.a))
        res["pair"] = pair_antisymmetry_residual(self.a)
        res["d_greek_trace"] = contract(self.a_prime, 1, 3).sup_norm()
        res["d_latin_trace"] = contract(self.a_prime, 0, 4).sup_norm()
        res["d_pair"] = pair_antisymmetry_residual(self.a_prime, U_PAIRS)
        worst = max(res.values())
        if worst > JET_TOL:
            raise ValueError(
                f"torsion jet violates constraints (worst residual {worst:.3e})"
            )
        for b, s in ((self.b1_prime, B1P_SLOTS), (self.b2_prime, B2P_SLOTS)):
            if b is not None and b.slots != s:
                raise ValueError("curvature derivative block has wrong slots")

    @property
    def truncated(self) -> bool:
        return self.b1_prime is None and self.b2_prime is None


# ---------------------------------------------------------------------------
# right-hand sides

def assemble_A(jet: TorsionJet) -> IndexedTensor:
    """Right-hand side of the curvature recovery system.

    Minus the alternated derivative block minus twice the alternated
    quadratic torsion square; antisymmetric under permutations of its
    three vertical pairs by construction.
    """
    da = permute_slots(jet.a_prime, [0, 1, 2, 6, 3, 4, 5, 7])
    alt_da = alternate_vertical_pairs(da, TRIPLE_PAIRS)
    quad = contracted_product(jet.a, jet.a, [(2, 3), (5, 0)])
    quad = permute_slots(quad, [0, 1, 4, 5, 2, 3, 6, 7])
    alt_q = alternate_vertical_pairs(quad, TRIPLE_PAIRS)
    return combine([-1.0, -2.0], [alt_da, alt_q])


def assemble_B(jet: TorsionJet, b1: IndexedTensor, b2: IndexedTensor):
    """Right-hand sides of the third-order recovery, both routes.

    Built from the curvature blocks, their derivative blocks (zero when
    the jet is truncated), and curvature-torsion cross terms; each output
    is antisymmetric in its last three vertical pairs.
    """
    sig = jet.signature
    cpq = (sig.p + sig.q) / (sig.p * sig.q)
    db2 = jet.b2_prime if jet.b2_prime is not None else zeros(sig, B2P_SLOTS)
    db1 = jet.b1_prime if jet.b1_prime is not None else zeros(sig, B1P_SLOTS)

    alt_db2 = alternate_vertical_pairs(
        permute_slots(db2, [0, 1, 2, 6, 3, 4, 5, 7]), TRIPLE_PAIRS)
    qg = contracted_product(b2, jet.a, [(2, 3), (5, 0)])
    qg = permute_slots(qg, [0, 1, 4, 5, 2, 3, 6, 7])
    alt_qg = alternate_vertical_pairs(qg, TRIPLE_PAIRS)
    b_greek = combine([cpq, -2.0 * cpq], [alt_db2, alt_qg])

    alt_db1 = alternate_vertical_pairs(
        permute_slots(db1, [0, 1, 2, 6, 3, 4, 5, 7]), TRIPLE_PAIRS)
    ql = contracted_product(b1, jet.a, [(1, 3), (4, 0)])
    ql = permute_slots(ql, [0, 4, 5, 1, 2, 6, 7, 3])
    alt_ql = alternate_vertical_pairs(ql, TRIPLE_PAIRS)
    b_latin = combine([-cpq, -2.0 * cpq], [alt_db1, alt_ql])
    return b_greek, b_latin


# ---------------------------------------------------------------------------
# linear operators

def lhs_b(signature: Signature, b1: IndexedTensor, b2: IndexedTensor) -> IndexedTensor:
    """Left side of the curvature recovery system applied to (b1, b2)."""
    dl, dg = delta(signature, LATIN), delta(signature, GREEK)
    e2 = permute_slots(tensor_product(dl, b2), [0, 2, 3, 4, 5, 1, 6, 7])
    e1 = permute_slots(tensor_product(dg, b1), [2, 0, 3, 4, 1, 5, 6, 7])
    return (alternate_vertical_pairs(e2, TRIPLE_PAIRS)
            - alternate_vertical_pairs(e1, TRIPLE_PAIRS))


def lhs_c_greek(signature: Signature, c: IndexedTensor) -> IndexedTensor:
    """Greek-route left side of the third-order recovery applied to c."""
    dg = delta(signature, GREEK)
    e = permute_slots(tensor_product(dg, c), [2, 3, 4, 0, 1, 6, 7, 5])
    return alternate_vertical_pairs(e, TRIPLE_PAIRS)


def lhs_c_latin(signature: Signature, c: IndexedTensor) -> IndexedTensor:
    """Latin-route left side of the third-order recovery applied to c."""
    dl = delta(signature, LATIN)
    e = permute_slots(tensor_product(dl, c), [0, 3, 4, 2, 5, 6, 7, 1])
    return alternate_vertical_pairs(e, TRIPLE_PAIRS)


def normalization_residual(b1: IndexedTensor, b2: IndexedTensor) -> float:
    """Residual of the joint trace normalization linking b1 and b2."""
    t2a = contract(b2, 1, 3)
    t1a = contract(b1, 0, 4)
    d = (t2a - t1a).components
    return float(np.max(np.abs(d + d.transpose(1, 0, 3, 2))))


def b_constraint_residuals(b1: IndexedTensor, b2: IndexedTensor) -> dict:
    return {
        "b1_pair": pair_antisymmetry_residual(b1, BPAIRS),
        "b2_pair": pair_antisymmetry_residual(b2, BPAIRS),
        "b1_trace": contract(b1, 0, 3).sup_norm(),
        "b2_trace": contract(b2, 0, 3).sup_norm(),
        "normalization": normalization_residual(b1, b2),
    }


def c_constraint_residuals(c: IndexedTensor) -> dict:
    return {
        "c_pair": pair_antisymmetry_residual(c, BPAIRS),
        "c_cyclic": alternate_vertical_pairs(c, ((0, 3), (1, 4), (2, 5))).sup_norm(),
    }


def _nullspace(C: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    _, s, vt = np.linalg.svd(C, full_matrices=True)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    return vt[rank:].T


class _SolveCore:
    """SVD-backed least-squares solve over a constraint null space."""

    def __init__(self, Z: np.ndarray, M: np.ndarray, rcond: float = RCOND):
        self.Z = Z
        self.M = M
        self.U, self.S, self.Vt = np.linalg.svd(M, full_matrices=False)
        self.rcond = rcond

    @property
    def kernel_dim(self) -> int:
        if self.S.size == 0:
            return self.Z.shape[1]
        return int(np.sum(self.S <= self.rcond * self.S[0]))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        coeff = self.U.T @ rhs
        keep = self.S > (self.rcond * self.S[0] if self.S.size else 0.0)
        inv = np.zeros_like(self.S)
        inv[keep] = 1.0 / self.S[keep]
        y = self.Vt.T @ (inv * coeff)
        return self.Z @ y

    def residual(self, sol_y_space: np.ndarray, rhs: np.ndarray) -> float:
        return float(np.linalg.norm(self.M @ sol_y_space - rhs))

    def diagnostics(self) -> dict:
        return {
            "sigma_max": float(self.S[0]) if self.S.size else 0.0,
            "sigma_min": float(self.S[-1]) if self.S.size else 0.0,
            "kernel_dim": self.kernel_dim,
        }


def _basis_tensors(signature, slots):
    shape = tuple(signature.range_of(s.alphabet) for s in slots)
    n = int(np.prod(shape))
    for idx in range(n):
        v = np.zeros(n)
        v[idx] = 1.0
        yield IndexedTensor(signature, slots, v)


_B_CACHE: dict = {}
_C_CACHE: dict = {}


def _b_system(signature: Signature) -> dict:
    key = (signature.p, signature.q)
    if key in _B_CACHE:
        return _B_CACHE[key]
    p, q = signature.p, signature.q
    n1 = p * p * q ** 4
    n2 = p ** 4 * q * q
    z1, z2 = zeros(signature, B1_SLOTS), zeros(signature, B2_SLOTS)

    def constraint_vec(b1, b2):
        r = [
            (b1 - alternate_vertical_pairs(b1, BPAIRS)).components.ravel(),
            (b2 - alternate_vertical_pairs(b2, BPAIRS)).components.ravel(),
            contract(b1, 0, 3).components.ravel(),
            contract(b2, 0, 3).components.ravel(),
        ]
        d = (contract(b2, 1, 3) - contract(b1, 0, 4)).components
        r.append((d + d.transpose(1, 0, 3, 2)).ravel())
        return np.concatenate(r)

    cols_c, cols_l = [], []
    for e1 in _basis_tensors(signature, B1_SLOTS):
        cols_c.append(constraint_vec(e1, z2))
        cols_l.append(lhs_b(signature, e1, z2).components.ravel())
    for e2 in _basis_tensors(signature, B2_SLOTS):
        cols_c.append(constraint_vec(z1, e2))
        cols_l.append(lhs_b(signature, z1, e2).components.ravel())
    C = np.array(cols_c).T
    L = np.array(cols_l).T
    Z = _nullspace(C)
    core = _SolveCore(Z, L @ Z)
    sys = {"n1": n1, "n2": n2, "core": core}
    _B_CACHE[key] = sys
    return sys


def _c_system(signature: Signature) -> dict:
    key = (signature.p, signature.q)
    if key in _C_CACHE:
        return _C_CACHE[key]
    rows_c, cols_g, cols_l = [], [], []
    for e in _basis_tensors(signature, C_SLOTS):
        r1 = (e - alternate_vertical_pairs(e, BPAIRS)).components.ravel()
        r2 = alternate_vertical_pairs(e, ((0, 3), (1, 4), (2, 5))).components.ravel()
        rows_c.append(np.concatenate([r1, r2]))
        cols_g.append(lhs_c_greek(signature, e).components.ravel())
        cols_l.append(lhs_c_latin(signature, e).components.ravel())
    Z = _nullspace(np.array(rows_c).T)
    sys = {
        "Z": Z,
        "Mg": np.array(cols_g).T @ Z,
        "Ml": np.array(cols_l).T @ Z,
        "cores": {},
    }
    _C_CACHE[key] = sys
    return sys


@dataclass(frozen=True)
class SolveDiagnostics:
    unique: bool
    kernel_dim: int
    residual: float
    sigma_min: float
    sigma_max: float
    routes: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "unique": self.unique,
            "kernel_dim": self.kernel_dim,
            "residual": self.residual,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "routes": dict(self.routes),
            "notes": list(self.notes),
        }


def solve_b(A: IndexedTensor, signature: Signature):
    """Recover the curvature blocks from the right-hand side ``A``.

    Least-squares over the constrained subspace.  For p > 2 and q > 2
    the solution is unique; otherwise the nonzero kernel is reported in
    the diagnostics and the minimum-norm representative is returned.
    """
    if A.slots != A_SLOTS:
        raise ValueError("right-hand side must use the canonical eight-slot layout")
    sys = _b_system(signature)
    core: _SolveCore = sys["core"]
    rhs = A.components.ravel()
    bvec = core.solve(rhs)
    b1 = IndexedTensor(signature, B1_SLOTS, bvec[: sys["n1"]])
    b2 = IndexedTensor(signature, B2_SLOTS, bvec[sys["n1"]:])
    lhs_val = lhs_b(signature, b1, b2).components.ravel()
    d = core.diagnostics()
    kernel_free = d["kernel_dim"] == 0
    notes = () if kernel_free else ("nonzero kernel: minimum-norm representative",)
    diag = SolveDiagnostics(
        unique=bool(signature.p > 2 and signature.q > 2 and kernel_free),
        kernel_dim=d["kernel_dim"],
        residual=float(np.linalg.norm(lhs_val - rhs)),
        sigma_min=d["sigma_min"],
        sigma_max=d["sigma_max"],
        notes=notes,
    )
    return b1, b2, diag


def solve_c(
    b_greek: Optional[IndexedTensor],
    b_latin: Optional[IndexedTensor],
    signature: Signature,
):
    """Recover the third-order object from one or both route right-hand sides.

    The greek route is uniquely solvable when p > 2, the latin route
    when q > 2.  Disabled routes are used only when no enabled route has
    data, and the result is then flagged as non-unique.
    """
    if b_greek is None and b_latin is None:
        raise ValueError("at least one route right-hand side is required")
    if b_greek is not None and b_greek.slots != BG_SLOTS:
        raise ValueError("greek right-hand side has wrong slots")
    if b_latin is not None and b_latin.slots != BL_SLOTS:
        raise ValueError("latin right-hand side has wrong slots")
    sys = _c_system(signature)
    enabled = {"greek": signature.p > 2, "latin": signature.q > 2}
    supplied = {"greek": b_greek, "latin": b_latin}
    routes = {}
    use = []
    for name in ("greek", "latin"):
        if supplied[name] is None:
            routes[name] = "absent"
        elif enabled[name]:
            routes[name] = "included"
            use.append(name)
    if not use:
        for name in ("greek", "latin"):
            if supplied[name] is not None:
                routes[name] = "disabled-used"
                use.append(name)
    for name in ("greek", "latin"):
        if supplied[name] is not None and routes.get(name) == "absent":
            pass
        elif supplied[name] is not None and name not in use:
            routes[name] = "disabled-skipped"

    key = tuple(use)
    if key not in sys["cores"]:
        M = np.vstack([sys["Mg" if n == "greek" else "Ml"] for n in use])
        sys["cores"][key] = _SolveCore(np.eye(sys["Z"].shape[1]), M)
    core: _SolveCore = sys["cores"][key]
    rhs = np.concatenate([supplied[n].components.ravel() for n in use])
    y = core.solve(rhs)
    cvec = sys["Z"] @ y
    c = IndexedTensor(signature, C_SLOTS, cvec)
    lhs_parts = [
        (lhs_c_greek if n == "greek" else lhs_c_latin)(signature, c).components.ravel()
        for n in use
    ]
    d = core.diagnostics()
    kernel_free = d["kernel_dim"] == 0
    all_enabled = all(enabled[n] for n in use)
    notes = () if kernel_free else ("nonzero kernel: minimum-norm representative",)
    diag = SolveDiagnostics(
        unique=bool(all_enabled and kernel_free),
        kernel_dim=d["kernel_dim"],
        residual=float(np.linalg.norm(np.concatenate(lhs_parts) - rhs)),
        sigma_min=d["sigma_min"],
        sigma_max=d["sigma_max"],
        routes=routes,
        notes=notes,
    )
    return c, diag


# ---------------------------------------------------------------------------
# suite and verdicts

@dataclass(frozen=True)
class CurvatureSuite:
    """Curvature blocks with solve diagnostics and constraint residuals."""

    signature: Signature
    b1: IndexedTensor
    b2: IndexedTensor
    c: Optional[IndexedTensor] = None
    diagnostics: dict = field(default_factory=dict)
    truncated_jet: bool = False

    def __post_init__(self):
        res = b_constraint_residuals(self.b1, self.b2)
        if self.c is not None:
            res.update(c_constraint_residuals(self.c))
        worst = max(res.values())
        if worst > SUITE_TOL:
            raise ValueError(
                f"curvature suite violates constraints (worst residual {worst:.3e})"
            )
        object.__setattr__(self, "diagnostics", {**self.diagnostics, "residuals": res})

    def projected_norms(self) -> dict:
        """Sup-norms of the four semiintegrability blocks (and c parts)."""
        out = {
            "b_alpha1": symmetrize_slots(self.b1, [3, 4, 5]).sup_norm(),
            "b_alpha2": alternate_slots(self.b2, [0, 1, 2]).sup_norm(),
            "b_beta1": alternate_slots(self.b1, [3, 4, 5]).sup_norm(),
            "b_beta2": symmetrize_slots(self.b2, [0, 1, 2]).sup_norm(),
        }
        if self.c is not None:
            out["c"] = self.c.sup_norm()
        return out

    def to_dict(self) -> dict:
        d = {
            "b1": tensor_to_dict(self.b1),
            "b2": tensor_to_dict(self.b2),
            "c": None if self.c is None else tensor_to_dict(self.c),
            "diagnostics": _plain(self.diagnostics),
            "truncated_jet": self.truncated_jet,
        }
        return d


def suite_from_jet(jet: TorsionJet) -> CurvatureSuite:
    """Run both recoveries on a jet and package the results."""
    A = assemble_A(jet)
    b1, b2, diag_b = solve_b(A, jet.signature)
    bg, bl = assemble_B(jet, b1, b2)
    c, diag_c = solve_c(bg, bl, jet.signature)
    notes = []
    if jet.truncated:
        notes.append("computed under truncated jet")
    return CurvatureSuite(
        jet.signature,
        b1,
        b2,
        c,
        diagnostics={"b": diag_b.to_dict(), "c": diag_c.to_dict(), "notes": notes},
        truncated_jet=jet.truncated,
    )


THEOREM_TAGS = ("Thm4.4", "Thm5.3i", "Thm5.3ii", "Thm5.4i", "Thm5.4ii", "Thm5.4iii")


@dataclass(frozen=True)
class Verdict:
    flat: Optional[bool]
    alpha_semiintegrable: Optional[bool]
    beta_semiintegrable: Optional[bool]
    applicable_theorem: str
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.applicable_theorem not in THEOREM_TAGS:
            raise ValueError(f"unknown theorem tag {self.applicable_theorem!r}")
        if self.flat and not (self.alpha_semiintegrable and self.beta_semiintegrable):
            raise ValueError("a flat verdict forces both semiintegrability flags")

    def to_dict(self) -> dict:
        return {
            "flat": self.flat,
            "alpha_semiintegrable": self.alpha_semiintegrable,
            "beta_semiintegrable": self.beta_semiintegrable,
            "applicable_theorem": self.applicable_theorem,
            "residuals": _plain(self.residuals),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def flatness_verdict(
    jet: TorsionJet,
    suite: Optional[CurvatureSuite],
    signature: Signature,
    tol: float = 1e-10,
) -> Verdict:
    """Local flatness decision.

    For p > 2 and q > 2 vanishing torsion is equivalent to local
    flatness, so the jet suffices.  Otherwise the torsion carries no
    information (it vanishes identically on the degenerate side) and the
    curvature blocks are required: flatness means the whole object
    vanishes.
    """
    p, q = signature.p, signature.q
    a_norm = jet.a.sup_norm()
    residuals = {"a": a_norm, "tolerance": tol}
    if p > 2 and q > 2:
        flat = bool(a_norm <= tol)
    else:
        if suite is None:
            raise InsufficientDataError(
                "flatness at p = 2 or q = 2 requires the curvature suite"
            )
        b1n, b2n = suite.b1.sup_norm(), suite.b2.sup_norm()
        residuals.update({"b1": b1n, "b2": b2n})
        flat = bool(a_norm <= tol and b1n <= tol and b2n <= tol)
    if suite is not None:
        residuals.update(suite.projected_norms())

    if flat:
        alpha, beta = True, True
    elif suite is not None:
        sub = semiintegrability(suite, TorsionTensor.from_a(jet.a), signature, tol)
        alpha, beta = sub.alpha_semiintegrable, sub.beta_semiintegrable
    else:
        alpha, beta = None, None
    return Verdict(flat, alpha, beta, "Thm4.4", residuals)


def semiintegrability(
    suite: CurvatureSuite,
    torsion: TorsionTensor,
    signature: Signature,
    tol: float = 1e-10,
) -> Verdict:
    """Semiintegrability of the two generator bundles.

    The alpha flag tests the alpha-subobjects (torsion part plus the two
    projected curvature blocks for p > 2; only the symmetric latin block
    at p = 2), and symmetrically for beta.
    """
    p, q = signature.p, signature.q
    norms = suite.projected_norms()
    res = {
        "a_alpha": torsion.a_alpha.sup_norm(),
        "a_beta": torsion.a_beta.sup_norm(),
        "tolerance": tol,
        **norms,
    }
    if p > 2:
        alpha = bool(max(res["a_alpha"], norms["b_alpha1"], norms["b_alpha2"]) <= tol)
    else:
        alpha = bool(norms["b_alpha1"] <= tol)
    if q > 2:
        beta = bool(max(res["a_beta"], norms["b_beta1"], norms["b_beta2"]) <= tol)
    else:
        beta = bool(norms["b_beta2"] <= tol)
    if p == 2 and q == 2:
        tag = "Thm5.4iii"
    elif p == 2:
        tag = "Thm5.4i"
    elif q == 2:
        tag = "Thm5.4ii"
    else:
        tag = "Thm5.3i"
    return Verdict(None, alpha, beta, tag, res)
