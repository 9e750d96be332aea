"""Finitely supported rational vectors and truncated mixed Tsirelson spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .families import Family, check_regular_on_ground, parse_family
from .ordinal import Ordinal, leading_exponent


def as_fraction(value) -> Fraction:
    """Exact conversion; floats are refused to keep the engine exact."""
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a Fraction, int or 'p/q' string")
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    return Fraction(value)


@dataclass(frozen=True)
class Vector:
    """Element of c00: sorted ``(index, value)`` pairs with nonzero values."""

    coords: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        merged: Dict[int, Fraction] = {}
        for k, v in self.coords:
            k = int(k)
            if k < 1:
                raise ValueError(f"vector index must be >= 1, got {k}")
            merged[k] = merged.get(k, Fraction(0)) + as_fraction(v)
        object.__setattr__(
            self, "coords", tuple((k, v) for k, v in sorted(merged.items()) if v)
        )

    @classmethod
    def from_dict(cls, data: Mapping[int, object]) -> "Vector":
        return cls(tuple(data.items()))

    @classmethod
    def unit(cls, k: int, value=1) -> "Vector":
        return cls(((k, value),))

    @classmethod
    def ones(cls, indices: Iterable[int], value=1) -> "Vector":
        return cls(tuple((k, value) for k in indices))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.coords)

    def __len__(self):
        return len(self.coords)

    def __bool__(self):
        return bool(self.coords)

    def __getitem__(self, k: int) -> Fraction:
        for i, v in self.coords:
            if i == k:
                return v
        return Fraction(0)

    def l1(self) -> Fraction:
        return sum((abs(v) for _, v in self.coords), Fraction(0))

    def c0(self) -> Fraction:
        return max((abs(v) for _, v in self.coords), default=Fraction(0))

    def restrict(self, E: Iterable[int]) -> "Vector":
        E = set(E)
        return Vector(tuple((k, v) for k, v in self.coords if k in E))

    def scaled(self, c) -> "Vector":
        c = as_fraction(c)
        return Vector(tuple((k, c * v) for k, v in self.coords))

    def __add__(self, other: "Vector") -> "Vector":
        return Vector(self.coords + other.coords)

    def __neg__(self) -> "Vector":
        return self.scaled(-1)

    def __sub__(self, other: "Vector") -> "Vector":
        return self + (-other)

    def abs(self) -> "Vector":
        return Vector(tuple((k, abs(v)) for k, v in self.coords))

    def to_json(self) -> dict:
        return {"coords": [[k, v.numerator, v.denominator] for k, v in self.coords]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Vector":
        coords = []
        for entry in data["coords"]:
            if len(entry) == 3:
                k, num, den = entry
                coords.append((int(k), Fraction(int(num), int(den))))
            elif len(entry) == 2:
                k, v = entry
                coords.append((int(k), as_fraction(v) if not isinstance(v, str) else Fraction(v)))
            else:
                raise ValueError(f"bad coordinate entry {entry!r}")
        return cls(tuple(coords))

    def __str__(self):
        return " + ".join(f"{v}*e{k}" for k, v in self.coords) or "0"


@dataclass(frozen=True)
class SpaceSpec:
    """Truncated data ``(theta_n, F_n)`` for ``n = 1..nmax``.

    ``xi`` optionally records the exponent with ``sup_n iota(F_n) = w^(w^xi)``.
    """

    thetas: Tuple[Fraction, ...]
    families: Tuple[Family, ...]
    xi: Optional[Ordinal] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        thetas = tuple(as_fraction(t) for t in self.thetas)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "families", tuple(self.families))
        if len(thetas) != len(self.families):
            raise ValueError("thetas and families must have the same length")
        if not thetas:
            raise ValueError("a space needs at least one (theta, family) pair")
        for n, t in enumerate(thetas, 1):
            if not 0 < t < 1:
                raise ValueError(f"theta_{n} = {t} is not in (0, 1)")
        for n in range(1, len(thetas)):
            if thetas[n] > thetas[n - 1]:
                raise ValueError(
                    f"thetas must be nonincreasing: theta_{n + 1} = {thetas[n]} > theta_{n} = {thetas[n - 1]}"
                )

    @property
    def nmax(self) -> int:
        return len(self.thetas)

    def theta(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(1)
        return self.thetas[n - 1]

    def family(self, n: int) -> Family:
        return self.families[n - 1]

    @cached_property
    def alphas(self) -> Tuple[Ordinal, ...]:
        return tuple(f.index()[0] for f in self.families)

    def alpha(self, n: int) -> Ordinal:
        return self.alphas[n - 1]

    def lexp(self, n: int) -> Ordinal:
        """Leading exponent of ``iota(F_n)``."""
        return leading_exponent(self.alpha(n))

    def history_tag(self, history: Sequence[int]) -> Fraction:
        out = Fraction(1)
        for n in history[1:]:
            out *= self.theta(n)
        return out

    def check_regular(self, ground: Iterable[int]):
        return {n: check_regular_on_ground(self.family(n), ground) for n in range(1, self.nmax + 1)}

    # ------------------------------------------------------------------
    @classmethod
    def uniform(cls, thetas: Sequence, families: Sequence[Family], **kw) -> "SpaceSpec":
        return cls(tuple(thetas), tuple(families), **kw)

    def to_json(self) -> dict:
        out = {
            "thetas": [[t.numerator, t.denominator] for t in self.thetas],
            "families": [f.dsl() for f in self.families],
            "nmax": self.nmax,
        }
        if self.xi is not None:
            from .ordinal import format_ordinal

            out["xi"] = format_ordinal(self.xi)
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "SpaceSpec":
        from .ordinal import parse_ordinal

        thetas = [as_fraction(t) if not isinstance(t, str) else Fraction(t) for t in data["thetas"]]
        fams = data["families"]
        nmax = int(data.get("nmax", len(thetas)))
        if len(fams) == 1 and len(thetas) > 1:
            fams = fams * len(thetas)
        if nmax > len(thetas) or nmax > len(fams):
            raise ValueError(f"nmax = {nmax} exceeds the supplied thetas/families")
        xi = parse_ordinal(data["xi"]) if data.get("xi") is not None else None
        return cls(
            tuple(thetas[:nmax]),
            tuple(parse_family(f) for f in fams[:nmax]),
            xi=xi,
            name=data.get("name", ""),
        )
