"""Exact fixed-point energy arithmetic.

Energies and all derived costs are integer counts of ``1/scale`` units, so
ordering, addition and subtraction never round.  The decompositions branch on
exact equalities (zero renormalized cost, flat plateaus), which is why floats
are banned everywhere outside the Monte Carlo sampler.

A single distinguished ``INFINITY`` value absorbs addition and dominates every
finite value; it stands for the cost between disconnected sets and for minima
over empty sets.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import MalformedInput, ScaleOverflow

DEFAULT_SCALE = 1_000_000


def parse_exact(text: str) -> Fraction:
    """Parse a decimal string (``"2"``, ``"-0.125"``) or a fraction string
    (``"1/3"``) to an exact rational."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"not an exact number: {text!r}") from exc


def format_exact(value: Fraction) -> str:
    """Render a rational canonically: a finite decimal when one exists
    (no trailing zeros), otherwise ``"num/den"``."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    two = five = 0
    rest = den
    while rest % 2 == 0:
        rest //= 2
        two += 1
    while rest % 5 == 0:
        rest //= 5
        five += 1
    if rest != 1:
        return f"{num}/{den}"
    # minimal number of decimal places: max of the 2- and 5-adic valuations
    places = max(two, five)
    scaled = num * 10**places // den
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


class Energy:
    """An exact energy value: ``units / scale``, or the +infinity sentinel."""

    __slots__ = ("units", "scale")

    def __init__(self, units: int, scale: int = DEFAULT_SCALE):
        if scale <= 0:
            raise ValueError("scale must be a positive integer")
        self.units = units
        self.scale = scale

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, value: int, scale: int = DEFAULT_SCALE) -> "Energy":
        return cls(value * scale, scale)

    @classmethod
    def parse(cls, text: str, scale: int = DEFAULT_SCALE) -> "Energy":
        if text.strip() == "inf":
            return INFINITY
        frac = parse_exact(text) * scale
        if frac.denominator != 1:
            raise ScaleOverflow(f"{text!r} is not representable at scale {scale}")
        return cls(int(frac), scale)

    @property
    def is_infinite(self) -> bool:
        return self is INFINITY

    def as_fraction(self) -> Fraction:
        if self.is_infinite:
            raise ValueError("infinite energy has no rational value")
        return Fraction(self.units, self.scale)

    def to_float(self) -> float:
        if self.is_infinite:
            return float("inf")
        return self.units / self.scale

    # -- arithmetic --------------------------------------------------------

    def _match(self, other: "Energy") -> None:
        if self.scale != other.scale:
            raise ValueError(f"mixed scales: {self.scale} vs {other.scale}")

    def __add__(self, other: "Energy") -> "Energy":
        if self.is_infinite or other.is_infinite:
            return INFINITY
        self._match(other)
        return Energy(self.units + other.units, self.scale)

    def __sub__(self, other: "Energy") -> "Energy":
        if other.is_infinite:
            raise ValueError("cannot subtract infinity")
        if self.is_infinite:
            return INFINITY
        self._match(other)
        return Energy(self.units - other.units, self.scale)

    def clamp_nonneg(self) -> "Energy":
        """The positive part: max(self, 0)."""
        if self.is_infinite or self.units >= 0:
            return self
        return Energy(0, self.scale)

    # -- ordering ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Energy):
            return NotImplemented
        if self.is_infinite or other.is_infinite:
            return self is other
        return self.scale == other.scale and self.units == other.units

    def __hash__(self) -> int:
        if self.is_infinite:
            return hash("energy-inf")
        return hash((self.units, self.scale))

    def __lt__(self, other: "Energy") -> bool:
        if self.is_infinite:
            return False
        if other.is_infinite:
            return True
        self._match(other)
        return self.units < other.units

    def __le__(self, other: "Energy") -> bool:
        return self == other or self < other

    def __gt__(self, other: "Energy") -> bool:
        return not self <= other

    def __ge__(self, other: "Energy") -> bool:
        return not self < other

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        return format_exact(self.as_fraction())

    def __repr__(self) -> str:
        if self.is_infinite:
            return "Energy.INFINITY"
        return f"Energy({self.units}, scale={self.scale})"


INFINITY = Energy.__new__(Energy)
INFINITY.units = None  # type: ignore[assignment]
INFINITY.scale = 0
