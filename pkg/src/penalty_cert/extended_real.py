"""
extended_real.py — Arithmetic over R ∪ {-inf, +inf}

Provides:
- ExtReal: extended real value (NegInf / Finite / PosInf), totally ordered
- xmul: product with the convention (±inf)·0 = 0·(±inf) = 0
- xdot: nonnegative-weight pairing built on xmul
- ExtRealStr: pydantic field type that serializes to "-inf" / "+inf" / decimal

NaN never enters: constructing a Finite from NaN or from an infinite float
raises DomainError. +inf + -inf raises IndeterminateSum instead of saturating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import total_ordering
from typing import Annotated, Sequence

from pydantic import PlainSerializer

from penalty_cert.errors import DomainError, IndeterminateSum


class Tag(IntEnum):
    # Integer values give the order NegInf < Finite < PosInf.
    NEG_INF = 0
    FINITE = 1
    POS_INF = 2


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    tag: Tag
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.tag is Tag.FINITE:
            if not math.isfinite(self.value):
                raise DomainError(f"Finite ExtReal payload must be a finite real, got {self.value!r}")
            # normalise -0.0 so equal values print identically
            object.__setattr__(self, "value", float(self.value) + 0.0)
        elif self.value != 0.0:
            object.__setattr__(self, "value", 0.0)

    # ── constructors ──

    @classmethod
    def finite(cls, value: float) -> ExtReal:
        return cls(Tag.FINITE, float(value))

    @classmethod
    def from_float(cls, value: float) -> ExtReal:
        """Map a float (possibly ±inf) into ExtReal; NaN is a DomainError."""
        value = float(value)
        if math.isnan(value):
            raise DomainError("NaN cannot be represented as an extended real")
        if value == math.inf:
            return POS_INF
        if value == -math.inf:
            return NEG_INF
        return cls(Tag.FINITE, value)

    @classmethod
    def parse(cls, text: str) -> ExtReal:
        text = text.strip()
        if text in ("+inf", "inf"):
            return POS_INF
        if text == "-inf":
            return NEG_INF
        return cls.from_float(float(text))

    # ── predicates ──

    @property
    def is_finite(self) -> bool:
        return self.tag is Tag.FINITE

    @property
    def is_pos_inf(self) -> bool:
        return self.tag is Tag.POS_INF

    @property
    def is_neg_inf(self) -> bool:
        return self.tag is Tag.NEG_INF

    def to_float(self) -> float:
        if self.tag is Tag.POS_INF:
            return math.inf
        if self.tag is Tag.NEG_INF:
            return -math.inf
        return self.value

    # ── order ──

    def _key(self) -> tuple[int, float]:
        return (int(self.tag), self.value)

    def __lt__(self, other: object) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._key() < other._key()

    def __eq__(self, other: object) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    # ── arithmetic ──

    def __neg__(self) -> ExtReal:
        if self.tag is Tag.POS_INF:
            return NEG_INF
        if self.tag is Tag.NEG_INF:
            return POS_INF
        return ExtReal.finite(-self.value)

    def __add__(self, other: object) -> ExtReal:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        infinities = {self.tag, other.tag} - {Tag.FINITE}
        if infinities == {Tag.POS_INF, Tag.NEG_INF}:
            raise IndeterminateSum("+inf + -inf is undefined")
        if Tag.POS_INF in infinities:
            return POS_INF
        if Tag.NEG_INF in infinities:
            return NEG_INF
        return ExtReal.from_float(self.value + other.value)

    __radd__ = __add__

    def __mul__(self, other: object) -> ExtReal:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return xmul(self, other)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.tag is Tag.POS_INF:
            return "+inf"
        if self.tag is Tag.NEG_INF:
            return "-inf"
        return repr(self.value)

    def __repr__(self) -> str:
        return f"ExtReal({self})"


POS_INF = ExtReal(Tag.POS_INF)
NEG_INF = ExtReal(Tag.NEG_INF)
ZERO = ExtReal(Tag.FINITE, 0.0)


def _coerce(value: object) -> ExtReal | None:
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return ExtReal.from_float(value)
    return None


def _sign(a: ExtReal) -> int:
    if a.tag is Tag.POS_INF:
        return 1
    if a.tag is Tag.NEG_INF:
        return -1
    return (a.value > 0) - (a.value < 0)


def xmul(a: ExtReal, b: ExtReal) -> ExtReal:
    """Extended-real product; an infinity times exact zero is Finite(0)."""
    if a.is_finite and b.is_finite:
        return ExtReal.from_float(a.value * b.value)
    sign = _sign(a) * _sign(b)
    if sign == 0:
        return ZERO
    return POS_INF if sign > 0 else NEG_INF


def xdot(lam: Sequence[float], alpha: Sequence[ExtReal]) -> ExtReal:
    """
    Sum of xmul(lam_i, alpha_i).

    Args:
        lam: nonnegative finite weights
        alpha: extended-real components, same length as lam

    Raises:
        ValueError: on length mismatch or a negative / non-finite weight
        IndeterminateSum: when a +inf and a -inf term both survive
    """
    if len(lam) != len(alpha):
        raise ValueError(f"xdot length mismatch: {len(lam)} weights vs {len(alpha)} components")
    total = ZERO
    saw_pos = saw_neg = False
    for weight, component in zip(lam, alpha):
        if not math.isfinite(weight) or weight < 0:
            raise ValueError(f"xdot weights must be finite and nonnegative, got {weight!r}")
        term = xmul(ExtReal.finite(weight), component)
        saw_pos |= term.is_pos_inf
        saw_neg |= term.is_neg_inf
        if saw_pos and saw_neg:
            raise IndeterminateSum("pairing has both +inf and -inf terms with positive weight")
        total = total + term
    return total


ExtRealStr = Annotated[ExtReal, PlainSerializer(str, return_type=str)]
