"""Probe 3: kernels and round-trips of the b- and c-systems."""
import numpy as np
from agstruct import *

rng = np.random.default_rng(2)

B1_SLOTS = (UL, UG, UG, DL, DL, DL)   # b^{i c d}_{j k l}
B2_SLOTS = (UG, UG, UG, DG, DL, DL)   # b^{b c d}_{a k l}
A_SLOTS = (UL, UG, UG, UG, DG, DL, DL, DL)
A_PAIRS = ((1, 5), (2, 6), (3, 7))
BP = ((1, 4), (2, 5))
C_SLOTS = (UG, UG, UG, DL, DL, DL)


def lhs_b(sig, b1, b2):
    dl, dg = delta(sig, LATIN), delta(sig, GREEK)
    e2 = permute_slots(tensor_product(dl, b2), [0, 2, 3, 4, 5, 1, 6, 7])
    e1 = permute_slots(tensor_product(dg, b1), [2, 0, 3, 4, 1, 5, 6, 7])
    return alternate_vertical_pairs(e2, A_PAIRS) - alternate_vertical_pairs(e1, A_PAIRS)


def b_constraint_rows(sig):
    p, q = sig.p, sig.q
    n1, n2 = p * p * q ** 4, p ** 4 * q * q
    rows = []
    def apply_all(f):
        out = []
        for idx in range(n1 + n2):
            v = np.zeros(n1 + n2); v[idx] = 1.0
            b1 = IndexedTensor(sig, B1_SLOTS, v[:n1])
            b2 = IndexedTensor(sig, B2_SLOTS, v[n1:])
            out.append(f(b1, b2))
        return np.array(out).T
    def cons(b1, b2):
        r1 = (b1 - alternate_vertical_pairs(b1, BP)).components.ravel()
        r2 = (b2 - alternate_vertical_pairs(b2, BP)).components.ravel()
        t1 = contract(b1, 0, 3).components.ravel()
        t2 = contract(b2, 0, 3).components.ravel()
        t2a = contract(b2, 1, 3)
        t1a = contract(b1, 0, 4)
        nrm = (t2a - t1a).components
        nrm = nrm + nrm.transpose(1, 0, 3, 2)
        return np.concatenate([r1, r2, t1, t2, nrm.ravel()])
    return apply_all(cons)


def l_matrix_b(sig):
    p, q = sig.p, sig.q
    n1, n2 = p * p * q ** 4, p ** 4 * q * q
    cols = []
    z1, z2 = zeros(sig, B1_SLOTS), zeros(sig, B2_SLOTS)
    for idx in range(n1):
        v = np.zeros(n1); v[idx] = 1.0
        cols.append(lhs_b(sig, IndexedTensor(sig, B1_SLOTS, v), z2).components.ravel())
    for idx in range(n2):
        v = np.zeros(n2); v[idx] = 1.0
        cols.append(lhs_b(sig, z1, IndexedTensor(sig, B2_SLOTS, v)).components.ravel())
    return np.array(cols).T


def nullspace(C, rtol=1e-10):
    u, s, vt = np.linalg.svd(C, full_matrices=True)
    r = int(np.sum(s > rtol * (s[0] if s.size else 1.0)))
    return vt[r:].T


for (p, q) in [(3, 3), (3, 2), (2, 3), (2, 2)]:
    sig = Signature(p, q)
    C = b_constraint_rows(sig)
    Z = nullspace(C)
    L = l_matrix_b(sig)
    M = L @ Z
    s = np.linalg.svd(M, compute_uv=False)
    ker = int(np.sum(s <= 1e-8 * s[0]))
    print(f"b-system p={p} q={q}: vars {L.shape[1]} constrained-dim {Z.shape[1]} "
          f"rank-def(kernel) {ker} smin/smax {s[-1]/s[0]:.2e}")
    # round trip
    y = rng.standard_normal(Z.shape[1])
    bstar = Z @ y
    A = M @ y
    sol, *_ = np.linalg.lstsq(M, A, rcond=None)
    rec = Z @ sol
    if ker == 0:
        print(f"   round-trip rel err {np.linalg.norm(rec - bstar)/np.linalg.norm(bstar):.2e}")


def lhs_c_greek(sig, c):
    dg = delta(sig, GREEK)
    e = permute_slots(tensor_product(dg, c), [2, 3, 4, 0, 1, 6, 7, 5])
    return alternate_vertical_pairs(e, ((3, 7), (1, 5), (2, 6)))


def lhs_c_latin(sig, c):
    dl = delta(sig, LATIN)
    e = permute_slots(tensor_product(dl, c), [0, 3, 4, 2, 5, 6, 7, 1])
    return alternate_vertical_pairs(e, ((1, 5), (2, 6), (3, 7)))


def c_constraints(sig):
    nc = (sig.p * sig.q) ** 3
    rows = []
    for idx in range(nc):
        v = np.zeros(nc); v[idx] = 1.0
        c = IndexedTensor(sig, C_SLOTS, v)
        r1 = (c - alternate_vertical_pairs(c, ((1, 4), (2, 5)))).components.ravel()
        r2 = alternate_vertical_pairs(c, ((0, 3), (1, 4), (2, 5))).components.ravel()
        rows.append(np.concatenate([r1, r2]))
    return np.array(rows).T


for (p, q) in [(3, 3), (2, 3), (3, 2), (2, 2)]:
    sig = Signature(p, q)
    Zc = nullspace(c_constraints(sig))
    nc = (sig.p * sig.q) ** 3
    for route, f, avail in [("greek", lhs_c_greek, p > 2), ("latin", lhs_c_latin, q > 2)]:
        cols = []
        for idx in range(nc):
            v = np.zeros(nc); v[idx] = 1.0
            cols.append(f(sig, IndexedTensor(sig, C_SLOTS, v)).components.ravel())
        Lc = np.array(cols).T
        M = Lc @ Zc
        s = np.linalg.svd(M, compute_uv=False)
        ker = int(np.sum(s <= 1e-8 * s[0]))
        print(f"c-system p={p} q={q} route {route} (theory unique: {avail}): "
              f"cdim {Zc.shape[1]} kernel {ker} smin/smax {s[-1]/s[0]:.2e}")
