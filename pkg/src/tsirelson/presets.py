"""Named spaces and the small schedules used by the tests and the CLI."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict

from .families import parse_family, schreier
from .lab import ParamSchedule, reduced_schedule
from .space import SpaceSpec


def tsirelson_space() -> SpaceSpec:
    """``T[(1/2, S_1)]``."""
    return SpaceSpec((Fraction(1, 2),), (schreier(1),), name="tsirelson")


def geometric_space(nmax: int = 3) -> SpaceSpec:
    """``theta_n = 2^-n`` with ``F_n = S_n``."""
    return SpaceSpec(
        tuple(Fraction(1, 2 ** n) for n in range(1, nmax + 1)),
        tuple(schreier(n) for n in range(1, nmax + 1)),
        name=f"geometric{nmax}",
    )


def harmonic_space(nmax: int = 3) -> SpaceSpec:
    """``theta_n = 1/(n+1)`` with ``F_n = S_n``."""
    return SpaceSpec(
        tuple(Fraction(1, n + 1) for n in range(1, nmax + 1)),
        tuple(schreier(n) for n in range(1, nmax + 1)),
        name=f"harmonic{nmax}",
    )


def desk_space() -> SpaceSpec:
    """Seven-index space sized so that Z-vectors of depth 3 fit the norm engine.

    Indices 1, 3, 5 play ``p_1, p_2, p_3`` and 2, 4, 6 play ``q_1, q_2, q_3``;
    index 7 only closes off the history classes.
    """
    thetas = [Fraction(1, 2), Fraction(1, 5), Fraction(1, 5), Fraction(1, 12),
              Fraction(1, 12), Fraction(1, 30), Fraction(1, 1000)]
    fams = ["rep(S(1),4)", "S0", "S(2)", "S0", "S(2)", "S0", "S0"]
    return SpaceSpec(tuple(thetas), tuple(parse_family(f) for f in fams), xi=1, name="desk")


DESK_GROUND_CAP = 24


def desk_schedule(smallness: bool = True) -> ParamSchedule:
    """Reduced three-level schedule on :func:`desk_space` with ``eps = 1/2``.

    With ``smallness`` the first level gets budget 1 (mass 2), so ``Z(p_1)``
    vectors are genuine averages; otherwise every budget equals the level
    mass and each ``Z(p_n)`` vector is a single scaled unit vector.
    """
    M1 = list(range(2, 24))
    M2 = list(range(3, 24))
    levels = [
        {"p": 1, "q": 2, "ground": M1, "budget": Fraction(1) if smallness else Fraction(2)},
        {"p": 3, "q": 4, "ground": M2, "budget": Fraction(5)},
        {"p": 5, "q": 6, "ground": M2, "budget": Fraction(12)},
    ]
    return reduced_schedule(desk_space(), Fraction(1, 2), levels, ground_cap=DESK_GROUND_CAP)


SPACES: Dict[str, Callable[..., SpaceSpec]] = {
    "tsirelson": tsirelson_space,
    "geometric": geometric_space,
    "harmonic": harmonic_space,
    "desk": desk_space,
}


def named_space(text: str) -> SpaceSpec:
    """``name`` or ``name:nmax`` for the spaces in :data:`SPACES`."""
    name, _, arg = text.partition(":")
    if name not in SPACES:
        raise ValueError(f"unknown preset space {name!r}; known: {', '.join(sorted(SPACES))}")
    if arg:
        if name in ("tsirelson", "desk"):
            raise ValueError(f"preset {name!r} takes no size")
        return SPACES[name](int(arg))
    return SPACES[name]()
