"""Exact interpolation of unknown values in [0, 1] under order and exact-value constraints.

Exact results come back as :class:`fractions.Fraction`; sampled estimates as floats.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from . import _ordpoly
from ._ordpoly import (
    BudgetError,
    ConstraintSet,
    InconsistentError,
    InputError,
    OrdpolyError,
    PreconditionError,
    UnsupportedShapeError,
)

__all__ = [
    "BudgetError",
    "ConstraintSet",
    "InconsistentError",
    "InputError",
    "OrdpolyError",
    "PreconditionError",
    "UnsupportedShapeError",
    "check",
    "constraints",
    "decompose",
    "dimension",
    "interpolate",
    "interpolate_stable",
    "marginal",
    "topk",
    "volume",
]

Number = Union[Fraction, float]


def _value(v):
    return Fraction(v) if isinstance(v, str) else v


def constraints(
    variables: Iterable[str],
    order: Iterable[tuple[str, str]] = (),
    exact: Optional[Mapping[str, Union[str, int, Fraction]]] = None,
) -> ConstraintSet:
    """Builds a constraint set; exact values may be strings such as "0.45" or "3/7", ints or Fractions."""
    doc = {
        "variables": list(variables),
        "order": [list(pair) for pair in order],
        "exact": {name: str(value) for name, value in (exact or {}).items()},
    }
    return ConstraintSet.from_json(json.dumps(doc))


def check(cs: ConstraintSet) -> tuple[bool, list[str], str]:
    return _ordpoly.check(cs)


def dimension(cs: ConstraintSet) -> int:
    return _ordpoly.dimension(cs)


def decompose(cs: ConstraintSet) -> list[tuple[list[str], str]]:
    return list(_ordpoly.decompose(cs))


def interpolate(cs: ConstraintSet, **options) -> dict[str, Number]:
    return {name: _value(v) for name, v in _ordpoly.interpolate(cs, **options).items()}


def interpolate_stable(cs: ConstraintSet) -> dict[str, Fraction]:
    return {name: Fraction(v) for name, v in _ordpoly.interpolate_stable(cs).items()}


def volume(cs: ConstraintSet, **options) -> Fraction:
    return Fraction(_ordpoly.volume(cs, **options))


def marginal(cs: ConstraintSet, variable: str, **options) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Density as (breakpoints, pieces); piece i holds ascending coefficients valid between breakpoints i and i+1."""
    breakpoints, pieces = _ordpoly.marginal(cs, variable, **options)
    return [Fraction(b) for b in breakpoints], [[Fraction(c) for c in piece] for piece in pieces]


def topk(
    cs: ConstraintSet,
    k: int,
    semantics: str = "local",
    selection: Optional[Iterable[str]] = None,
    **options,
) -> tuple[list[tuple[str, Number]], Optional[Fraction]]:
    """Returns the answer entries and, for the u semantics, the probability of the answer sequence."""
    sel = None if selection is None else list(selection)
    entries, probability = _ordpoly.topk(cs, k, semantics, sel, **options)
    return [(name, _value(v)) for name, v in entries], (None if probability is None else Fraction(probability))
