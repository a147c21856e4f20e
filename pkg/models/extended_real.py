# models/extended_real.py
import math
from functools import total_ordering
from typing import Union

Number = Union[int, float]


@total_ordering
class ExtendedReal:
    """
    Número real estendido com marcação explícita de +∞ e −∞.

    O infinito nunca é codificado como um float grande: o valor carrega
    uma tag ("finite", "+inf", "-inf") e a aritmética segue as convenções
    da análise convexa (r + ∞ = ∞, t·∞ = ∞ para t > 0, 0·∞ = 0).
    """

    FINITE = "finite"
    PLUS = "+inf"
    MINUS = "-inf"

    __slots__ = ("_tag", "_value")

    def __init__(self, value: Number = 0.0, tag: str = FINITE):
        if tag not in (self.FINITE, self.PLUS, self.MINUS):
            raise ValueError(f"Tag inválida para ExtendedReal: {tag}")
        if tag == self.FINITE:
            value = float(value)
            if math.isnan(value):
                raise ValueError("ExtendedReal não aceita NaN.")
            if math.isinf(value):
                tag = self.PLUS if value > 0 else self.MINUS
                value = 0.0
        else:
            value = 0.0
        self._tag = tag
        self._value = value

    @classmethod
    def finite(cls, value: Number) -> "ExtendedReal":
        return cls(value)

    @classmethod
    def plus_infinity(cls) -> "ExtendedReal":
        return cls(0.0, cls.PLUS)

    @classmethod
    def minus_infinity(cls) -> "ExtendedReal":
        return cls(0.0, cls.MINUS)

    @classmethod
    def from_float(cls, value: Number) -> "ExtendedReal":
        """Converte um float IEEE (possivelmente ±inf) em ExtendedReal."""
        return cls(value)

    @classmethod
    def coerce(cls, other) -> "ExtendedReal":
        if isinstance(other, ExtendedReal):
            return other
        return cls.from_float(other)

    @property
    def tag(self) -> str:
        return self._tag

    @property
    def value(self) -> float:
        """Valor finito; levanta ValueError para infinitos."""
        if self._tag != self.FINITE:
            raise ValueError("Valor infinito não possui representação finita.")
        return self._value

    def is_finite(self) -> bool:
        return self._tag == self.FINITE

    def is_plus_infinity(self) -> bool:
        return self._tag == self.PLUS

    def is_minus_infinity(self) -> bool:
        return self._tag == self.MINUS

    def __float__(self) -> float:
        if self._tag == self.PLUS:
            return math.inf
        if self._tag == self.MINUS:
            return -math.inf
        return self._value

    def __neg__(self) -> "ExtendedReal":
        if self._tag == self.PLUS:
            return ExtendedReal.minus_infinity()
        if self._tag == self.MINUS:
            return ExtendedReal.plus_infinity()
        return ExtendedReal(-self._value)

    def __add__(self, other) -> "ExtendedReal":
        other = ExtendedReal.coerce(other)
        if self.is_finite() and other.is_finite():
            return ExtendedReal(self._value + other._value)
        tags = {self._tag, other._tag}
        if {self.PLUS, self.MINUS} <= tags:
            raise ValueError("Forma indeterminada: +∞ + (−∞).")
        return ExtendedReal.plus_infinity() if self.PLUS in tags else ExtendedReal.minus_infinity()

    __radd__ = __add__

    def __sub__(self, other) -> "ExtendedReal":
        return self + (-ExtendedReal.coerce(other))

    def __rsub__(self, other) -> "ExtendedReal":
        return ExtendedReal.coerce(other) + (-self)

    def __mul__(self, scalar: Number) -> "ExtendedReal":
        if isinstance(scalar, ExtendedReal):
            if not scalar.is_finite():
                raise TypeError("Produto entre infinitos não suportado.")
            scalar = scalar.value
        scalar = float(scalar)
        if self.is_finite():
            return ExtendedReal(self._value * scalar)
        if scalar == 0.0:
            return ExtendedReal(0.0)
        return self if scalar > 0 else -self

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            other = ExtendedReal.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._tag == other._tag and self._value == other._value

    def __lt__(self, other) -> bool:
        other = ExtendedReal.coerce(other)
        return self._rank() < other._rank()

    def _rank(self):
        if self._tag == self.MINUS:
            return (-1, 0.0)
        if self._tag == self.PLUS:
            return (1, 0.0)
        return (0, self._value)

    def __hash__(self) -> int:
        return hash((self._tag, self._value))

    def close_to(self, other, tol: float) -> bool:
        """Igualdade com tolerância absoluta; infinitos só igualam o mesmo infinito."""
        other = ExtendedReal.coerce(other)
        if self.is_finite() and other.is_finite():
            return abs(self._value - other._value) <= tol
        return self._tag == other._tag

    def to_json(self):
        """Serializa infinitos como as strings "inf" / "-inf"."""
        if self._tag == self.PLUS:
            return "inf"
        if self._tag == self.MINUS:
            return "-inf"
        return self._value

    def __str__(self) -> str:
        if self._tag == self.PLUS:
            return "inf"
        if self._tag == self.MINUS:
            return "-inf"
        return format(self._value, ".17g")

    def __repr__(self) -> str:
        return f"ExtendedReal({self})"
