"""Probe 4: solve_b/solve_c round trips through the real module API."""
import numpy as np
from agstruct import *
from agstruct.structure_tensor import RawCoefficients, torsion_from_raw, U_SLOTS, U_PAIRS
from agstruct import curvature as cv

rng = np.random.default_rng(3)
sig = Signature(3, 3)
p, q = sig.p, sig.q

# valid torsion + derivative block
u = RawCoefficients.from_array(sig, rng.standard_normal((q, p, p, p, q, q)))
a = torsion_from_raw(u).a
ap_cols = []
for d in range(p):
    for l in range(q):
        rc = RawCoefficients.from_array(sig, rng.standard_normal((q, p, p, p, q, q)))
        ap_cols.append(torsion_from_raw(rc).a.components)
ap = np.stack(ap_cols, axis=-1).reshape(q, p, p, p, q, q, p, q)
jet = cv.TorsionJet(sig, a, IndexedTensor(sig, cv.AP_SLOTS, ap))

A = cv.assemble_A(jet)
print("A pair-antisym residual:",
      (A - alternate_vertical_pairs(A, cv.TRIPLE_PAIRS)).sup_norm())

b1, b2, diag = cv.solve_b(A, sig)
print("solve_b on random valid jet: residual", diag.residual, "unique", diag.unique,
      "kernel", diag.kernel_dim, "|A|", A.sup_norm())

# planted round trip
sysb = cv._b_system(sig)
Z = sysb["core"].Z
y = rng.standard_normal(Z.shape[1])
bvec = Z @ y
b1s = IndexedTensor(sig, cv.B1_SLOTS, bvec[:sysb["n1"]])
b2s = IndexedTensor(sig, cv.B2_SLOTS, bvec[sysb["n1"]:])
Astar = cv.lhs_b(sig, b1s, b2s)
r1, r2, d2 = cv.solve_b(Astar, sig)
err = max((r1 - b1s).sup_norm(), (r2 - b2s).sup_norm())
rel = err / max(b1s.sup_norm(), b2s.sup_norm())
print("planted b round-trip rel err:", rel, "residual", d2.residual)

# c round trip
sysc = cv._c_system(sig)
Zc = sysc["Z"]
yc = rng.standard_normal(Zc.shape[1])
cstar = IndexedTensor(sig, cv.C_SLOTS, Zc @ yc)
bg = cv.lhs_c_greek(sig, cstar)
bl = cv.lhs_c_latin(sig, cstar)
crec, diagc = cv.solve_c(bg, bl, sig)
print("planted c round-trip rel err:", (crec - cstar).sup_norm() / cstar.sup_norm(),
      "unique", diagc.unique, "routes", diagc.routes)
cg, diag_g = cv.solve_c(bg, None, sig)
print("greek-only recovery err:", (cg - cstar).sup_norm() / cstar.sup_norm(), diag_g.routes)

# q = 2 kernel
sig2 = Signature(3, 2)
A0 = zeros(sig2, cv.A_SLOTS)
_, _, dk = cv.solve_b(A0, sig2)
print("q=2 kernel:", dk.kernel_dim, "unique:", dk.unique)

# p=2 route disabling for c
sigp2 = Signature(2, 3)
yy = rng.standard_normal(cv._c_system(sigp2)["Z"].shape[1])
cstar2 = IndexedTensor(sigp2, cv.C_SLOTS, cv._c_system(sigp2)["Z"] @ yy)
bg2 = cv.lhs_c_greek(sigp2, cstar2)
bl2 = cv.lhs_c_latin(sigp2, cstar2)
c2, dc2 = cv.solve_c(bg2, bl2, sigp2)
print("p=2 solve_c routes:", dc2.routes, "unique", dc2.unique,
      "err", (c2 - cstar2).sup_norm() / cstar2.sup_norm())
cg2, dg2 = cv.solve_c(bg2, None, sigp2)
print("p=2 greek-only routes:", dg2.routes, "unique", dg2.unique, "kernel", dg2.kernel_dim)
