"""Finite groups as permutation groups."""

from .permutation import Permutation
from .permgroup import DEFAULT_ORDER_CAP, PermGroup, group_from_generators, trivial_group

__all__ = ["DEFAULT_ORDER_CAP", "PermGroup", "Permutation", "group_from_generators", "trivial_group"]
