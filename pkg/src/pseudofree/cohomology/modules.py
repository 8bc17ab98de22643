"""Coefficient modules Z, Z[G] and Z[G/H], all permutation modules.

Each is realised as Z[G/H] with G acting on left cosets by translation:
Z is the case H = G and Z[G] the case H = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCoefficients
from ..group.permgroup import PermGroup, indices_from_mask

TRIVIAL = "TrivialZ"
GROUP_RING = "GroupRing"
PERMUTATION = "PermutationModule"


@dataclass(frozen=True)
class CoefficientModule:
    """A coefficient module descriptor.

    ``subgroup_mask`` is a bitmask over the elements of the group the module
    is used with; formula-only callers may give just ``subgroup_order``.
    """

    kind: str
    subgroup_mask: int | None = None
    subgroup_order: int | None = None
    subgroup_label: str | None = None

    def __post_init__(self):
        if self.kind not in (TRIVIAL, GROUP_RING, PERMUTATION):
            raise InvalidCoefficients(f"unknown coefficient kind {self.kind!r}")
        if self.kind == PERMUTATION and self.subgroup_mask is None and self.subgroup_order is None:
            raise InvalidCoefficients("a permutation module needs a subgroup")

    @classmethod
    def trivial(cls) -> CoefficientModule:
        return cls(TRIVIAL)

    @classmethod
    def group_ring(cls) -> CoefficientModule:
        return cls(GROUP_RING)

    @classmethod
    def permutation(cls, G: PermGroup, mask: int) -> CoefficientModule:
        from ..group.lattice import all_subgroups

        lat = all_subgroups(G)
        if mask not in lat.index_of:
            raise InvalidCoefficients("Z[G/H] needs H to be a subgroup of G")
        i = lat.index_of[mask]
        return cls(PERMUTATION, mask, lat.order(i), lat.label(i))

    @classmethod
    def abstract_permutation(cls, subgroup_order: int, label: str | None = None) -> CoefficientModule:
        return cls(PERMUTATION, None, subgroup_order, label)

    def subgroup_mask_in(self, G: PermGroup) -> int:
        if self.kind == TRIVIAL:
            return G.full_mask
        if self.kind == GROUP_RING:
            return 1
        if self.subgroup_mask is None:
            raise InvalidCoefficients("this permutation module has no concrete subgroup")
        from ..group.lattice import all_subgroups

        if self.subgroup_mask not in all_subgroups(G).index_of:
            raise InvalidCoefficients("subgroup mask is not a subgroup of this group")
        return self.subgroup_mask

    def descriptor(self) -> str:
        if self.kind == TRIVIAL:
            return "Z"
        if self.kind == GROUP_RING:
            return "Z[G]"
        name = self.subgroup_label or f"order {self.subgroup_order}"
        return f"Z[G/{name}]"

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == PERMUTATION:
            d["subgroup_order"] = self.subgroup_order
            d["subgroup_label"] = self.subgroup_label
            if self.subgroup_mask is not None:
                d["subgroup_mask"] = hex(self.subgroup_mask)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CoefficientModule:
        mask = d.get("subgroup_mask")
        return cls(
            d["kind"],
            int(mask, 16) if isinstance(mask, str) else mask,
            d.get("subgroup_order"),
            d.get("subgroup_label"),
        )


def coset_action(G: PermGroup, mask: int) -> np.ndarray:
    """``act[g, c]``: the coset g * (coset c) for left cosets of H = mask.

    Cosets are numbered by their smallest element index, so coset 0 is H.
    """
    members = np.array(indices_from_mask(mask), dtype=np.int64)
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if coset_of[g] < 0:
            coset_of[G.mul[g, members]] = len(reps)
            reps.append(g)
    reps = np.array(reps, dtype=np.int64)
    return coset_of[G.mul[:, reps]]


def module_action(G: PermGroup, coeff: CoefficientModule) -> np.ndarray:
    return coset_action(G, coeff.subgroup_mask_in(G))
