"""Probe 2: idempotence, gauge kernel, subtensor vanishing at p=2/q=2."""
import numpy as np
from agstruct import *
from scratch_probe import project, U_SLOTS, raw_traces

rng = np.random.default_rng(1)
PAIRS = [(1, 4), (2, 5)]


def proj(u):
    return project(u, u.signature.q, u.signature.p, u.signature.q - u.signature.p)


for (p, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 4), (2, 4)]:
    sig = Signature(p, q)
    shape = (q, p, p, p, q, q)
    u = alternate_vertical_pairs(
        IndexedTensor(sig, U_SLOTS, rng.standard_normal(shape)), PAIRS)
    a = proj(u)
    a2 = proj(a)
    idem = (a2 - a).sup_norm()

    # gauge shifts: S-type (with and without trace), T-type, double-delta v-type
    dl, dg = delta(sig, LATIN), delta(sig, GREEK)
    S = IndexedTensor(sig, (UG, UG, DG, DL), rng.standard_normal((p, p, p, q)))
    T = IndexedTensor(sig, (UL, UG, DL, DL), rng.standard_normal((q, p, q, q)))
    v = IndexedTensor(sig, (UG, DL), rng.standard_normal((p, q)))
    shift_S = alternate_vertical_pairs(
        permute_slots(tensor_product(dl, S), [0, 2, 3, 4, 1, 5]), PAIRS)
    shift_T = alternate_vertical_pairs(
        permute_slots(tensor_product(dg, T), [2, 0, 3, 1, 4, 5]), PAIRS)
    shift_v = alternate_vertical_pairs(
        permute_slots(tensor_product(tensor_product(dl, dg), v), [0, 2, 4, 3, 1, 5]), PAIRS)
    # trace-projected S (first upper greek against lower greek)
    Str = contract(S, 0, 2)  # (c, k)
    S0 = S - (1.0 / p) * permute_slots(tensor_product(dg, Str), [0, 2, 1, 3])
    shift_S0 = alternate_vertical_pairs(
        permute_slots(tensor_product(dl, S0), [0, 2, 3, 4, 1, 5]), PAIRS)
    Ttr = contract(T, 0, 2)
    T0 = T - (1.0 / q) * permute_slots(tensor_product(dl, Ttr), [0, 2, 1, 3])
    shift_T0 = alternate_vertical_pairs(
        permute_slots(tensor_product(dg, T0), [2, 0, 3, 1, 4, 5]), PAIRS)

    kills = {
        "S-any": proj(u + shift_S) - a,
        "S-tracefree": proj(u + shift_S0) - a,
        "T-any": proj(u + shift_T) - a,
        "T-tracefree": proj(u + shift_T0) - a,
        "v-dd": proj(u + shift_v) - a,
    }
    # decomposition
    a_al = symmetrize_slots(a, [4, 5])
    a_be = symmetrize_slots(a, [1, 2])
    dec = (a_al + a_be - a).sup_norm()
    alt_form = (a_al - alternate_slots(a, [1, 2])).sup_norm()
    print(f"p={p} q={q}: idem {idem:.1e} dec {dec:.1e} altform {alt_form:.1e} "
          f"|a| {a.sup_norm():.2e} |a_al| {a_al.sup_norm():.2e} |a_be| {a_be.sup_norm():.2e}")
    for k, d in kills.items():
        print(f"    shift {k:12s} -> residual {d.sup_norm():.2e}")
