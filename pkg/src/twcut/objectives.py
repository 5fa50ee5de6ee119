"""Objective/validator pairs for the supported cut problems.

An objective maps a tuple ``(count, weight)`` (number of selected vertices,
weight of the arcs leaving the selection) to an extended rational that the
solver maximises, restricted to counts accepted by ``valid``. Minimisation
problems are modelled by negating the weight and undoing the sign in
``report``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Union

from .graph import to_rational

__all__ = [
    "Infinity",
    "INF",
    "NEG_INF",
    "ExtendedRational",
    "Infeasible",
    "INFEASIBLE",
    "Bottom",
    "BOTTOM",
    "CutValue",
    "Direction",
    "Objective",
    "PROBLEMS",
    "make_objective",
    "evaluate_f",
    "report_value",
    "format_value",
    "BottomValueError",
]


@functools.total_ordering
class Infinity:
    """Signed infinity that compares against Fractions and ints."""

    __slots__ = ("sign",)

    def __new__(cls, sign: int):
        if sign > 0 and "INF" in globals():
            return INF
        if sign < 0 and "NEG_INF" in globals():
            return NEG_INF
        self = super().__new__(cls)
        self.sign = 1 if sign > 0 else -1
        return self

    def __reduce__(self):
        return (Infinity, (self.sign,))

    def __neg__(self):
        return Infinity(-self.sign)

    def __eq__(self, other):
        return isinstance(other, Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, Infinity):
            return self.sign < other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign < 0
        return NotImplemented

    def __hash__(self):
        return hash(("inf", self.sign))

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"

    __repr__ = __str__


INF = Infinity(1)
NEG_INF = Infinity(-1)

ExtendedRational = Union[Fraction, Infinity]


class _Sentinel:
    __slots__ = ()
    _name = "?"

    def __new__(cls):
        inst = cls.__dict__.get("_instance")
        if inst is None:
            inst = super().__new__(cls)
            cls._instance = inst
        return inst

    def __reduce__(self):
        return (type(self), ())

    def __repr__(self):
        return self._name


class Infeasible(_Sentinel):
    """Reported optimum when no cardinality passes the validator."""

    _name = "infeasible"


class Bottom(_Sentinel):
    """The least element of the cut-value order: no feasible cut."""

    _name = "⊥"


INFEASIBLE = Infeasible()
BOTTOM = Bottom()


class CutValue(NamedTuple):
    count: int
    weight: Fraction


class BottomValueError(ValueError):
    pass


class Direction(str, enum.Enum):
    MONOTONE = "monotone"
    ANTITONE = "antitone"


def _identity(x):
    return x


def _negate(x):
    return -x


def _weight(nu, s):
    return s


def _neg_weight(nu, s):
    return -s


def _expansion(nu, s):
    if nu == 0:
        return NEG_INF
    return Fraction(-s, nu)


def _sparsity(n, sign, nu, s):
    if nu == 0 or nu == n:
        return NEG_INF
    return Fraction(sign * s, nu * (n - nu))


def _always(x):
    return True


def _bisection(n, x):
    return abs(2 * x - n) <= 1


def _balanced(n, beta, x):
    return beta * n <= x <= (1 - beta) * n


def _small_side(n, x):
    return x <= n - x


PROBLEMS = (
    "max-cut",
    "max-bisection",
    "min-bisection",
    "balanced-min-cut",
    "min-edge-expansion",
    "sparsest-cut",
    "densest-cut",
)


@dataclass(frozen=True)
class Objective:
    """``f``/``valid`` pair with the direction of ``s -> f(nu, s)``.

    All members are module-level functions or partials of them, so
    objectives pickle and can be shipped to worker processes.
    """

    name: str
    n: int
    f: Callable[[int, Fraction], ExtendedRational]
    valid: Callable[[int], bool]
    direction: Direction
    report: Callable[[ExtendedRational], ExtendedRational] = _identity
    params: dict = field(default_factory=dict)

    @property
    def maximises_weight(self) -> bool:
        return self.direction is Direction.MONOTONE


def make_objective(problem: str, n: int, beta=None) -> Objective:
    """Build the objective for ``problem`` on an ``n``-vertex instance."""
    if n < 1:
        raise ValueError("objectives need at least one vertex")
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")
    if problem == "balanced-min-cut":
        if beta is None:
            raise ValueError("balanced-min-cut needs beta")
        beta = to_rational(beta)
        if not 0 < beta <= Fraction(1, 2):
            raise ValueError(f"beta must lie in (0, 1/2], got {beta}")
    elif beta is not None:
        raise ValueError(f"beta only applies to balanced-min-cut, not {problem}")

    P = functools.partial
    M, A = Direction.MONOTONE, Direction.ANTITONE
    if problem == "max-cut":
        return Objective(problem, n, _weight, _always, M)
    if problem == "max-bisection":
        return Objective(problem, n, _weight, P(_bisection, n), M)
    if problem == "min-bisection":
        return Objective(problem, n, _neg_weight, P(_bisection, n), A, _negate)
    if problem == "balanced-min-cut":
        return Objective(problem, n, _neg_weight, P(_balanced, n, beta), A, _negate, {"beta": beta})
    if problem == "min-edge-expansion":
        return Objective(problem, n, _expansion, P(_small_side, n), A, _negate)
    if problem == "sparsest-cut":
        return Objective(problem, n, P(_sparsity, n, -1), _always, A, _negate)
    return Objective(problem, n, P(_sparsity, n, 1), _always, M)


def evaluate_f(obj: Objective, cv) -> ExtendedRational:
    if cv is BOTTOM:
        raise BottomValueError("f is undefined on ⊥")
    return obj.f(cv[0], cv[1])


def report_value(obj: Objective, phi) -> ExtendedRational | Infeasible:
    """The optimum in the problem's natural sign, or INFEASIBLE for ⊥."""
    if phi is BOTTOM:
        return INFEASIBLE
    return obj.report(evaluate_f(obj, phi))


def format_value(value) -> str:
    """Lossless text form: ``p/q``, an integer, ``inf``, ``-inf`` or ``infeasible``."""
    return str(value) if not isinstance(value, Infeasible) else "infeasible"
