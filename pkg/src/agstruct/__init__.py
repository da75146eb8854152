"""Structure-tensor analysis of almost Grassmann structures.

Computes the invariant torsion tensor of an almost Grassmann structure
from raw structure coefficients or sampled coframe fields, recovers the
higher curvature objects by solving the associated linear systems, and
renders flatness / semiintegrability verdicts.
"""

from .tensor_core import (
    GREEK,
    LATIN,
    UP,
    DOWN,
    UG,
    DG,
    UL,
    DL,
    IndexedTensor,
    Signature,
    Slot,
    SlotError,
    alternate_slots,
    alternate_vertical_pairs,
    combine,
    contract,
    contracted_product,
    delta,
    permute_slots,
    symmetrize_slots,
    tensor_from_dict,
    tensor_product,
    tensor_to_dict,
    zeros,
)

__version__ = "0.1.0"
