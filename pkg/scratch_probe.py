"""Scratch probe: alternation direction, coefficient variant selection,
gauge-shift kernel membership, p=2/q=2 vanishing."""
import itertools
import numpy as np
from agstruct import *

rng = np.random.default_rng(0)

# --- 1. alternation direction check vs explicit loop (2 pairs) ---
sig = Signature(2, 3)
U_SLOTS = (UL, UG, UG, DG, DL, DL)   # u^{i b c}_{a j k}
u = IndexedTensor(sig, U_SLOTS, rng.standard_normal((3, 2, 2, 2, 3, 3)))
alt = alternate_vertical_pairs(u, [(1, 4), (2, 5)])
# loop oracle: out[i,b,c,a,j,k] = 1/2 (u[i,b,c,a,j,k] - u[i,c,b,a,k,j])
lo = np.zeros(u.shape)
for i, b, c, a, j, k in itertools.product(range(3), range(2), range(2), range(2), range(3), range(3)):
    lo[i, b, c, a, j, k] = 0.5 * (u.components[i, b, c, a, j, k] - u.components[i, c, b, a, k, j])
print("pairalt2 loop-oracle max err:", np.max(np.abs(alt.components - lo)))

# --- 2. the projection, both coefficient variants ---
def raw_traces(u):
    gt = contract(u, 0, 4)          # (b,c,a,k): latin-contraction
    lt = contract(u, 1, 3)          # (i,c,j,k): greek-contraction
    vec = contract(gt, 0, 2)        # (c,k)
    vtil = contract(lt, 0, 3)       # (c,j)
    return gt, lt, vec, vtil

def project(u, cx, cy, cz):
    sig = u.signature
    p, q = sig.p, sig.q
    gt, lt, vec, vtil = raw_traces(u)
    dl, dg = delta(sig, LATIN), delta(sig, GREEK)
    pairs = [(1, 4), (2, 5)]
    # x term: dl (i,j) x gt (b,c,a,k) -> (i,j,b,c,a,k) -> (i,b,c,a,j,k)
    gt_sw = permute_slots(gt, [1, 0, 2, 3])      # (c,b,a,k)
    gx = combine([cx, 1.0], [gt, gt_sw])
    x = permute_slots(tensor_product(dl, gx), [0, 2, 3, 4, 1, 5])
    x = (-2.0 / (q * q - 1.0)) * alternate_vertical_pairs(x, pairs).components
    # y term: dg (b,a) x lt (i,c,j,k) -> (b,a,i,c,j,k) -> (i,b,c,a,j,k)
    lt_sw = permute_slots(lt, [0, 1, 3, 2])      # u^{ic}_{kj}
    ly = combine([cy, 1.0], [lt, lt_sw])
    y = permute_slots(tensor_product(dg, ly), [2, 0, 3, 1, 4, 5])
    y = (-2.0 / (p * p - 1.0)) * alternate_vertical_pairs(y, pairs).components
    # z term: dl x dg x w with w at (c,k) or (c,j)
    w1 = combine([(p * q - 1.0), cz], [vec, vtil])   # pairs with d^i_j
    w2 = combine([(p * q - 1.0), cz], [vtil, vec])   # pairs with d^i_k
    m1 = permute_slots(tensor_product(tensor_product(dl, dg), w1), [0, 2, 4, 3, 1, 5])
    # dl(i,j) dg(b,a) w2(c,j') with i paired to k: build as (i,k',b,a,c,j)->(i,b,c,a,j,k)
    m2 = permute_slots(tensor_product(tensor_product(dl, dg), w2), [0, 2, 4, 3, 5, 1])
    z = tensor_product(dl, dg)  # placeholder spec for combine below
    zz = alternate_vertical_pairs(
        IndexedTensor(sig, u.slots, m1.components + m2.components), pairs
    ).components * (2.0 / ((p * p - 1.0) * (q * q - 1.0)))
    a = u.components + x + y + zz
    return IndexedTensor(sig, u.slots, a)

def trace_residuals(a):
    # a^{i a c}_{a j k} = 0 (greek trace) and a^{i b c}_{a i k} = 0 (latin trace)
    r1 = contract(a, 1, 3).sup_norm()
    r2 = contract(a, 0, 4).sup_norm()
    return r1, r2

for (p, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 3), (3, 4)]:
    sig = Signature(p, q)
    shape = (q, p, p, p, q, q)
    raw = IndexedTensor(sig, U_SLOTS, rng.standard_normal(shape))
    u = alternate_vertical_pairs(raw, [(1, 4), (2, 5)])
    results = {}
    for name, (cx, cy, cz) in {
        "A(q,p,q-p)": (q, p, q - p),
        "B(p,q,p-q)": (p, q, p - q),
        "C(q,p,p-q)": (q, p, p - q),
        "D(p,q,q-p)": (p, q, q - p),
    }.items():
        a = project(u, cx, cy, cz)
        g, l = trace_residuals(a)
        pa = (a - alternate_vertical_pairs(a, [(1, 4), (2, 5)])).sup_norm()
        results[name] = (g, l, pa)
    print(f"p={p} q={q}:")
    for k, v in results.items():
        print(f"   {k}: greek-trace {v[0]:.2e}  latin-trace {v[1]:.2e}  pair-antisym {v[2]:.2e}")
