"""Dense indexed tensors over a two-alphabet index system.

Every object handled by this package is a dense real tensor whose slots
are typed by variance (up/down) and alphabet (greek, ranging over p, or
latin, ranging over q).  Components live in a numpy array with one axis
per slot, first slot slowest-varying.

The operation that makes this more than a thin ndarray wrapper is
alternation over *vertical pairs*: a greek slot and a latin slot that are
transported together when index pairs are permuted.  All symmetry
projections used by the structure-tensor pipeline reduce to this, plain
slot (anti)symmetrization, and contraction.

Tensors are immutable after construction; every operation is a pure
function returning a new tensor, so values can be shared freely across
threads.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

GREEK = "greek"
LATIN = "latin"
UP = "up"
DOWN = "down"

#: Largest slot count a persistent tensor may carry.  The biggest object
#: the pipeline stores is a rank-10 derivative block.
MAX_SLOTS = 10


class SlotError(ValueError):
    """A slot reference or slot combination is malformed."""


@dataclass(frozen=True)
class Signature:
    """Index ranges of the structure: greek indices run over ``p``,
    latin indices over ``q``.  Both ranges must be at least 2; the
    underlying manifold dimension is ``n = p * q``."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 2 or self.q < 2:
            raise ValueError(f"signature requires p >= 2 and q >= 2, got ({self.p}, {self.q})")

    @property
    def n(self) -> int:
        return self.p * self.q

    def range_of(self, alphabet: str) -> int:
        if alphabet == GREEK:
            return self.p
        if alphabet == LATIN:
            return self.q
        raise SlotError(f"unknown alphabet {alphabet!r}")


@dataclass(frozen=True)
class Slot:
    variance: str
    alphabet: str

    def __post_init__(self):
        if self.variance not in (UP, DOWN):
            raise SlotError(f"variance must be 'up' or 'down', got {self.variance!r}")
        if self.alphabet not in (GREEK, LATIN):
            raise SlotError(f"alphabet must be 'greek' or 'latin', got {self.alphabet!r}")


UG = Slot(UP, GREEK)
DG = Slot(DOWN, GREEK)
UL = Slot(UP, LATIN)
DL = Slot(DOWN, LATIN)

SlotSpec = tuple  # ordered tuple of Slot


class IndexedTensor:
    """Dense real tensor with a typed slot list.

    Parameters
    ----------
    signature : Signature
    slots : sequence of Slot
    components : array_like
        Either shaped per slot ranges or flat in row-major slot order.
    """

    __slots__ = ("signature", "slots", "components")

    def __init__(self, signature: Signature, slots: Sequence[Slot], components):
        slots = tuple(slots)
        if len(slots) > MAX_SLOTS:
            raise SlotError(f"slot count {len(slots)} exceeds the cap of {MAX_SLOTS}")
        shape = tuple(signature.range_of(s.alphabet) for s in slots)
        comps = np.asarray(components, dtype=float)
        if comps.shape != shape:
            expected = int(np.prod(shape)) if shape else 1
            if comps.size != expected:
                raise SlotError(
                    f"component count {comps.size} does not match slot shape {shape}"
                )
            comps = comps.reshape(shape)
        else:
            comps = comps.copy()
        if not np.all(np.isfinite(comps)):
            raise ValueError("tensor components must be finite")
        comps.setflags(write=False)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("IndexedTensor is immutable")

    @property
    def rank(self) -> int:
        return len(self.slots)

    @property
    def shape(self) -> tuple:
        return self.components.shape

    def sup_norm(self) -> float:
        if self.components.size == 0:
            return 0.0
        return float(np.max(np.abs(self.components)))

    def same_spec(self, other: "IndexedTensor") -> bool:
        return self.signature == other.signature and self.slots == other.slots

    def __add__(self, other):
        return combine([1.0, 1.0], [self, other])

    def __sub__(self, other):
        return combine([1.0, -1.0], [self, other])

    def __mul__(self, scalar):
        return IndexedTensor(self.signature, self.slots, float(scalar) * self.components)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        tags = ",".join(
            ("^" if s.variance == UP else "_") + ("g" if s.alphabet == GREEK else "l")
            for s in self.slots
        )
        return f"IndexedTensor(p={self.signature.p}, q={self.signature.q}, slots=[{tags}])"


def zeros(signature: Signature, slots: Sequence[Slot]) -> IndexedTensor:
    shape = tuple(signature.range_of(s.alphabet) for s in slots)
    return IndexedTensor(signature, slots, np.zeros(shape))


def delta(signature: Signature, alphabet: str) -> IndexedTensor:
    """Identity tensor of the given alphabet: one upper and one lower slot."""
    r = signature.range_of(alphabet)
    return IndexedTensor(signature, (Slot(UP, alphabet), Slot(DOWN, alphabet)), np.eye(r))


def _check_slot(t: IndexedTensor, idx: int) -> int:
    if not isinstance(idx, (int, np.integer)) or not 0 <= idx < t.rank:
        raise SlotError(f"slot index {idx!r} out of range for rank {t.rank}")
    return int(idx)


def _perm_sign(perm) -> int:
    inversions = sum(
        1 for a, b in itertools.combinations(range(len(perm)), 2) if perm[a] > perm[b]
    )
    return -1 if inversions % 2 else 1


def alternate_vertical_pairs(t: IndexedTensor, pairs: Iterable) -> IndexedTensor:
    """Signed average over all permutations of the listed vertical pairs.

    Each pair names one greek slot and one latin slot that move as a
    unit.  The output is antisymmetric under any transposition of two
    listed pairs, and the map is an idempotent projector.
    """
    pairs = [(_check_slot(t, g), _check_slot(t, l)) for g, l in pairs]
    flat = [s for pr in pairs for s in pr]
    if len(set(flat)) != len(flat):
        raise SlotError("a vertical pair references a slot twice")
    for g, l in pairs:
        if t.slots[g].alphabet != GREEK or t.slots[l].alphabet != LATIN:
            raise SlotError("each vertical pair must name one greek and one latin slot")
    k = len(pairs)
    if k == 0:
        return t
    acc = np.zeros(t.shape)
    base = list(range(t.rank))
    for perm in itertools.permutations(range(k)):
        axes = base.copy()
        for i, j in enumerate(perm):
            axes[pairs[i][0]] = pairs[j][0]
            axes[pairs[i][1]] = pairs[j][1]
        acc += _perm_sign(perm) * np.transpose(t.components, axes)
    return IndexedTensor(t.signature, t.slots, acc / math.factorial(k))


def _permute_named_slots(t: IndexedTensor, slots: Sequence[int], antisymmetric: bool) -> IndexedTensor:
    slots = [_check_slot(t, s) for s in slots]
    if len(set(slots)) != len(slots):
        raise SlotError("slot listed twice")
    kinds = {t.slots[s] for s in slots}
    if len(kinds) > 1:
        raise SlotError("slots to (anti)symmetrize must share alphabet and variance")
    k = len(slots)
    acc = np.zeros(t.shape)
    base = list(range(t.rank))
    for perm in itertools.permutations(range(k)):
        axes = base.copy()
        for i, j in enumerate(perm):
            axes[slots[i]] = slots[j]
        sign = _perm_sign(perm) if antisymmetric else 1
        acc += sign * np.transpose(t.components, axes)
    return IndexedTensor(t.signature, t.slots, acc / math.factorial(k))


def symmetrize_slots(t: IndexedTensor, slots: Sequence[int]) -> IndexedTensor:
    """Unweighted mean over permutations of the named slots."""
    return _permute_named_slots(t, slots, antisymmetric=False)


def alternate_slots(t: IndexedTensor, slots: Sequence[int]) -> IndexedTensor:
    """Signed unweighted mean over permutations of the named slots."""
    return _permute_named_slots(t, slots, antisymmetric=True)


def contract(t: IndexedTensor, upper: int, lower: int) -> IndexedTensor:
    """Sum over the shared range of one upper and one lower slot."""
    upper = _check_slot(t, upper)
    lower = _check_slot(t, lower)
    if upper == lower:
        raise SlotError("cannot contract a slot with itself")
    su, sl = t.slots[upper], t.slots[lower]
    if su.alphabet != sl.alphabet:
        raise SlotError("contraction requires matching alphabets")
    if su.variance != UP or sl.variance != DOWN:
        raise SlotError("contraction pairs one upper with one lower slot")
    comps = np.trace(t.components, axis1=upper, axis2=lower)
    slots = tuple(s for i, s in enumerate(t.slots) if i not in (upper, lower))
    return IndexedTensor(t.signature, slots, comps)


def tensor_product(t1: IndexedTensor, t2: IndexedTensor) -> IndexedTensor:
    if t1.signature != t2.signature:
        raise SlotError("tensor product requires a common signature")
    if t1.rank + t2.rank > MAX_SLOTS:
        raise SlotError("tensor product exceeds the slot cap")
    comps = np.multiply.outer(t1.components, t2.components)
    return IndexedTensor(t1.signature, t1.slots + t2.slots, comps)


def contracted_product(
    t1: IndexedTensor, t2: IndexedTensor, contractions: Sequence
) -> IndexedTensor:
    """Product of two tensors with slot pairs summed during assembly.

    ``contractions`` lists ``(slot_in_t1, slot_in_t2)`` pairs of matching
    alphabet and opposite variance.  Equivalent to a tensor product
    followed by contractions, without materializing the full product
    (which may exceed the slot cap).
    """
    if t1.signature != t2.signature:
        raise SlotError("product requires a common signature")
    ax1, ax2 = [], []
    for s1, s2 in contractions:
        s1, s2 = _check_slot(t1, s1), _check_slot(t2, s2)
        a, b = t1.slots[s1], t2.slots[s2]
        if a.alphabet != b.alphabet or a.variance == b.variance:
            raise SlotError("contracted slots need matching alphabet and opposite variance")
        ax1.append(s1)
        ax2.append(s2)
    if len(set(ax1)) != len(ax1) or len(set(ax2)) != len(ax2):
        raise SlotError("a slot is contracted twice")
    keep1 = tuple(s for i, s in enumerate(t1.slots) if i not in ax1)
    keep2 = tuple(s for i, s in enumerate(t2.slots) if i not in ax2)
    if len(keep1) + len(keep2) > MAX_SLOTS:
        raise SlotError("contracted product exceeds the slot cap")
    comps = np.tensordot(t1.components, t2.components, axes=(ax1, ax2))
    return IndexedTensor(t1.signature, keep1 + keep2, comps)


def combine(coeffs: Sequence[float], tensors: Sequence[IndexedTensor]) -> IndexedTensor:
    """Exact linear combination of tensors with identical specs."""
    if len(coeffs) != len(tensors) or not tensors:
        raise SlotError("combine needs one coefficient per tensor")
    head = tensors[0]
    acc = np.zeros(head.shape)
    for c, t in zip(coeffs, tensors):
        if not head.same_spec(t):
            raise SlotError("combine requires identical signatures and slot lists")
        acc += float(c) * t.components
    return IndexedTensor(head.signature, head.slots, acc)


def permute_slots(t: IndexedTensor, order: Sequence[int]) -> IndexedTensor:
    """Reorder slots; ``order[i]`` is the old position of new slot ``i``."""
    order = [_check_slot(t, i) for i in order]
    if sorted(order) != list(range(t.rank)):
        raise SlotError("slot order must be a permutation")
    slots = tuple(t.slots[i] for i in order)
    return IndexedTensor(t.signature, slots, np.transpose(t.components, order))


# ---------------------------------------------------------------------------
# Serialization: {"p", "q", "slots": [{"variance", "alphabet"}...],
#                 "components": flat row-major list}

def tensor_to_dict(t: IndexedTensor) -> dict:
    return {
        "p": t.signature.p,
        "q": t.signature.q,
        "slots": [{"variance": s.variance, "alphabet": s.alphabet} for s in t.slots],
        "components": t.components.ravel(order="C").tolist(),
    }


def tensor_from_dict(d: dict) -> IndexedTensor:
    sig = Signature(int(d["p"]), int(d["q"]))
    slots = tuple(Slot(s["variance"], s["alphabet"]) for s in d["slots"])
    return IndexedTensor(sig, slots, np.asarray(d["components"], dtype=float))


def save_tensor(t: IndexedTensor, path) -> None:
    with open(path, "w") as fh:
        json.dump(tensor_to_dict(t), fh)


def load_tensor(path) -> IndexedTensor:
    with open(path) as fh:
        return tensor_from_dict(json.load(fh))
