"""Evaluation of formulas on subspace assignments."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import subspace as sp
from .formula import And, Bot, Formula, Not, Or, Top, Var, VariableOverlapError, variables
from .subspace import DEFAULT_TOL, Subspace, Tolerance

__all__ = [
    "Environment",
    "UnboundVariableError",
    "RebindError",
    "evaluate",
    "evaluate_checked",
    "RestrictionReport",
    "check_restriction_lemma",
    "LEMMA_ATOL",
]

LEMMA_ATOL = 1e-8


class UnboundVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound variable {self.name!r}"


class RebindError(ValueError):
    pass


class Environment:
    """Ordered, immutable binding of variable names to subspaces of one C^n."""

    __slots__ = ("ambient", "_bindings")

    def __init__(self, ambient: int, bindings: Mapping[str, Subspace] | Iterable = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        table: dict[str, Subspace] = {}
        for name, s in items:
            if name in table:
                raise RebindError(f"variable {name!r} bound twice")
            if s.ambient != ambient:
                raise sp.AmbientMismatchError(f"{name!r} lives in C^{s.ambient}, environment is C^{ambient}")
            table[name] = s
        self.ambient = ambient
        self._bindings = MappingProxyType(table)

    @property
    def bindings(self) -> Mapping[str, Subspace]:
        return self._bindings

    def __getitem__(self, name: str) -> Subspace:
        try:
            return self._bindings[name]
        except KeyError:
            raise UnboundVariableError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self):
        return len(self._bindings)

    def __repr__(self):
        dims = ", ".join(f"{k}:{v.dim}" for k, v in self._bindings.items())
        return f"Environment(C^{self.ambient}; {dims})"

    def items(self):
        return self._bindings.items()

    def bind(self, name: str, s: Subspace) -> Environment:
        if name in self._bindings:
            raise RebindError(f"variable {name!r} already bound")
        return Environment(self.ambient, [*self._bindings.items(), (name, s)])

    def merged(self, other: Environment) -> Environment:
        if other.ambient != self.ambient:
            raise sp.AmbientMismatchError(f"C^{self.ambient} vs C^{other.ambient}")
        return Environment(self.ambient, [*self._bindings.items(), *other._bindings.items()])

    def renamed(self, suffix: str) -> Environment:
        return Environment(self.ambient, [(k + suffix, v) for k, v in self._bindings.items()])

    def restricted_to(self, names: Iterable[str]) -> Environment:
        return Environment(self.ambient, [(k, self[k]) for k in names])

    def transformed(self, u: np.ndarray) -> Environment:
        return Environment(self.ambient, [(k, sp.apply_unitary(u, v)) for k, v in self._bindings.items()])

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "bindings": {k: sp.subspace_to_json(v) for k, v in self._bindings.items()},
        }

    @classmethod
    def from_json(cls, data: dict, tol: Tolerance = DEFAULT_TOL) -> Environment:
        n = int(data["ambient"])
        return cls(n, [(k, sp.subspace_from_json(v, tol)) for k, v in data.get("bindings", {}).items()])


def evaluate_checked(f: Formula, env: Environment, tol: Tolerance = DEFAULT_TOL) -> tuple[Subspace, bool]:
    """Evaluate and also report whether any rank decision fell in the guard band."""
    n = env.ambient
    memo: dict[int, Subspace] = {}
    ambiguous = False

    def go(g):
        nonlocal ambiguous
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            out = env[g.name]
        elif isinstance(g, Top):
            out = sp.top(n)
        elif isinstance(g, Bot):
            out = sp.bottom(n)
        elif isinstance(g, Not):
            out = sp.complement(go(g.child))
        elif isinstance(g, And):
            out, amb = sp.meet_checked(go(g.left), go(g.right), tol)
            ambiguous |= amb
        elif isinstance(g, Or):
            out, amb = sp.join_checked(go(g.left), go(g.right), tol)
            ambiguous |= amb
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return go(f), ambiguous


def evaluate(f: Formula, env: Environment, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """The subspace obtained by substituting ``env`` into ``f``."""
    return evaluate_checked(f, env, tol)[0]


@dataclass(frozen=True, eq=False)
class RestrictionReport:
    lhs: Subspace
    rhs: Subspace
    distance: float
    lhs_dim: int
    rhs_dim: int
    relative_dim: int

    @property
    def holds(self) -> bool:
        return self.lhs_dim == self.rhs_dim and self.distance < LEMMA_ATOL


def check_restriction_lemma(
    alpha: Formula, beta: Formula, env: Environment, tol: Tolerance = DEFAULT_TOL
) -> RestrictionReport:
    """Compare ``restrict(alpha, beta)`` in C^n with ``alpha`` evaluated inside ``Xi(beta)``.

    The right side pulls each ``S_u & W`` (``W = Xi(beta)``) back to C^dim(W),
    evaluates ``alpha`` there and pushes the result forward again.
    """
    from .formula import restrict

    avars, bvars = variables(alpha), variables(beta)
    overlap = set(avars) & set(bvars)
    if overlap:
        raise VariableOverlapError(f"shared variables: {sorted(overlap)}")
    lhs = evaluate(restrict(alpha, beta), env, tol)

    w = evaluate(beta, env, tol)
    iso = sp.isometry_onto(w)
    inner = Environment(w.dim, [(u, sp.pullback(iso, sp.meet(env[u], w, tol), tol)) for u in avars])
    rhs = sp.pushforward(iso, evaluate(alpha, inner, tol))
    return RestrictionReport(
        lhs=lhs,
        rhs=rhs,
        distance=sp.projector_distance(lhs, rhs),
        lhs_dim=lhs.dim,
        rhs_dim=rhs.dim,
        relative_dim=w.dim,
    )
