"""Exact-rational parameter handling.

Classification verdicts must not depend on float rounding, so similarity
parameters are carried as `fractions.Fraction` wherever the caller supplies
something rational.
"""

from fractions import Fraction
from typing import Union

Num = Union[int, float, Fraction]


def as_fraction(value: Union[Num, str]) -> Fraction:
    """Convert a user-supplied number to an exact Fraction.

    Floats are read through their shortest decimal repr, so ``0.1`` means
    1/10 (decimal intent), not the binary float it rounds to.  Strings accept
    anything ``Fraction`` does ("0.1", "1/3", "2").
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def to_float(value: Num) -> float:
    return float(value)
