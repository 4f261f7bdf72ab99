"""Integer bookkeeping for maximal valuation dimensions.

A profile is a map ``k -> dbar(k)`` for some formula.  Restricting one
formula to another composes their profiles, so the profile of a staged
construction is a :class:`Composition` of the stage profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

__all__ = [
    "FloorHalfPower",
    "PointTable",
    "Composition",
    "DimProfile",
    "profile_eval",
    "ProfileLookupError",
    "CertificateError",
    "ALPHA_PROFILE",
    "alpha_chain_profile",
    "gamma_profile",
    "beta_profile",
    "Stage",
    "Certificate",
]


class ProfileLookupError(KeyError):
    pass


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class FloorHalfPower:
    """``k -> k // 2**t``."""

    t: int

    def __call__(self, k: int) -> int:
        return k >> self.t

    def to_json(self):
        return {"kind": "floor-half-power", "t": self.t}


@dataclass(frozen=True)
class PointTable:
    """Values known only at finitely many dimensions."""

    table: Mapping[int, int]

    def __call__(self, k: int) -> int:
        try:
            return self.table[k]
        except KeyError:
            raise ProfileLookupError(f"profile not known at {k}; table covers {sorted(self.table)}") from None

    def to_json(self):
        return {"kind": "point-table", "table": {str(k): v for k, v in sorted(self.table.items())}}


@dataclass(frozen=True)
class Composition:
    """``parts[0] o parts[1] o ... o parts[-1]`` (rightmost applied first)."""

    parts: tuple

    def __call__(self, k: int) -> int:
        for p in reversed(self.parts):
            k = p(k)
        return k

    def to_json(self):
        return {"kind": "composition", "parts": [p.to_json() for p in self.parts]}


DimProfile = Union[FloorHalfPower, PointTable, Composition]


def profile_eval(p: DimProfile, k: int) -> int:
    if k < 0:
        raise ValueError(f"dimension must be nonnegative, got {k}")
    return p(k)


ALPHA_PROFILE = FloorHalfPower(1)


def alpha_chain_profile(k: int) -> FloorHalfPower:
    return FloorHalfPower(k)


def gamma_profile(l: int) -> FloorHalfPower:
    from .formula import gamma_depth

    return FloorHalfPower(gamma_depth(l) + 1)


def beta_profile(l: int) -> PointTable:
    return PointTable({2 * l: l, 2 * l + 1: l + 1})


@dataclass(frozen=True)
class Stage:
    kind: str  # "alpha" or "beta"
    l: int | None
    pair: tuple[int, int]

    @property
    def name(self) -> str:
        return "alpha" if self.kind == "alpha" else f"beta({self.l})"

    def profile(self) -> DimProfile:
        return ALPHA_PROFILE if self.kind == "alpha" else beta_profile(self.l)

    def to_json(self):
        return {"stage": self.name, "pair": list(self.pair)}


@dataclass(frozen=True)
class Certificate:
    """Claimed ``(dbar(m), dbar(n))`` after every stage of a separating formula."""

    m: int
    n: int
    stages: tuple[Stage, ...]
    formula_digest: str = field(default="")

    @property
    def final_pair(self) -> tuple[int, int]:
        return self.stages[-1].pair if self.stages else (self.m, self.n)

    def profile(self) -> Composition:
        return Composition(tuple(s.profile() for s in reversed(self.stages)))

    def predict(self, k: int) -> int:
        if k == self.m:
            return self.final_pair[0]
        if k == self.n:
            return self.final_pair[1]
        return self.profile()(k)

    def verify(self) -> None:
        """Re-derive every stage pair from the stage profiles; raise on any inconsistency."""
        if not self.m < self.n:
            raise CertificateError(f"need m < n, got {self.m}, {self.n}")
        if not self.stages:
            raise CertificateError("empty stage list")
        prev = (self.m, self.n)
        for i, st in enumerate(self.stages, 1):
            a, b = prev
            if st.kind == "beta" and not (a == 2 * st.l and b == 2 * st.l + 1):
                raise CertificateError(f"stage {i}: beta({st.l}) applied to pair {prev}")
            if st.kind == "alpha" and a % 2 == 0 and b == a + 1:
                raise CertificateError(f"stage {i}: alpha applied to a pair needing beta")
            p = st.profile()
            expect = (p(a), p(b))
            if tuple(st.pair) != expect:
                raise CertificateError(f"stage {i}: claimed {st.pair}, profile gives {expect}")
            if not expect[0] < expect[1]:
                raise CertificateError(f"stage {i}: pair {expect} not strictly increasing")
            if not expect[1] < b:
                raise CertificateError(f"stage {i}: n-side value did not decrease")
            prev = expect
        if prev[0] != 0 or prev[1] < 1:
            raise CertificateError(f"final pair {prev} does not separate")
        composed = self.profile()
        if (composed(self.m), composed(self.n)) != prev:
            raise CertificateError("composed profile disagrees with stage chain")

    def to_json(self):
        a, b = self.final_pair
        return {
            "m": self.m,
            "n": self.n,
            "stages": [s.to_json() for s in self.stages],
            "formula_sha256": self.formula_digest,
            "claims": {"dbar_m": a, "dbar_n": b},
        }
