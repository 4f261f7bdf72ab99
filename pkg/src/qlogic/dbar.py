"""Maximal valuation dimension: witnesses, randomized search, verdicts.

Lower bounds come from explicit witnesses (assignments whose valuation has
the claimed dimension).  Upper bounds come from profiles (see
:mod:`qlogic.profile`); random search can only confirm them statistically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import subspace as sp
from .formula import (
    Formula,
    Top,
    freshen,
    gamma_depth,
    mk_alpha,
    mk_beta,
    mk_separator,
    restrict,
    stage_formula,
    structurally_equal,
    to_text,
    variables,
)
from .profile import Certificate, CertificateError, DimProfile, ProfileLookupError
from .subspace import DEFAULT_TOL, Subspace, Tolerance
from .valuation import Environment, evaluate, evaluate_checked

__all__ = [
    "WitnessRecord",
    "WitnessError",
    "SeparationError",
    "alpha_conditions",
    "witness_alpha",
    "witness_alpha_odd",
    "alpha_witness",
    "witness_restrict",
    "witness_alpha_chain",
    "witness_gamma",
    "witness_beta",
    "witness_separator",
    "Estimate",
    "estimate_dbar",
    "Verdict",
    "check_tautology",
    "SeparationReport",
    "separate",
    "DEFAULT_ESTIMATE_TRIALS",
    "DEFAULT_ZERO_TEST_TRIALS",
]

DEFAULT_ESTIMATE_TRIALS = 2000
DEFAULT_ZERO_TEST_TRIALS = 10000
MAX_REDRAWS = 50


class WitnessError(RuntimeError):
    pass


class SeparationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class WitnessRecord:
    formula: Formula
    ambient: int
    env: Environment
    achieved: int
    trace: dict = field(default_factory=dict)

    def value(self, tol: Tolerance = DEFAULT_TOL) -> Subspace:
        return evaluate(self.formula, self.env, tol)

    def verify(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.value(tol).dim == self.achieved

    def freshened(self, suffix: str) -> WitnessRecord:
        trace = dict(self.trace, suffix=self.trace.get("suffix", "") + suffix)
        return WitnessRecord(freshen(self.formula, suffix), self.ambient, self.env.renamed(suffix), self.achieved, trace)

    def to_json(self) -> dict:
        return {
            "formula": to_text(self.formula),
            "ambient": self.ambient,
            "achieved_dim": self.achieved,
            "trace": self.trace,
            "environment": self.env.to_json(),
        }


def _record(formula, env, trace, tol=DEFAULT_TOL) -> WitnessRecord:
    return WitnessRecord(formula, env.ambient, env, evaluate(formula, env, tol).dim, trace)


def _e(n: int, i: int) -> np.ndarray:
    return sp.standard_basis(n, i)


# --------------------------------------------------------------------------
# alpha

def alpha_conditions(s: Subspace, t: Subspace, tol: Tolerance = DEFAULT_TOL) -> dict[str, bool]:
    """The four conditions characterizing pairs where alpha reaches ``n/2``."""
    n = s.ambient
    return {
        "even": n % 2 == 0,
        "balanced": 2 * s.dim == n and 2 * t.dim == n,
        "meet_zero": sp.meet(s, t, tol).dim == 0,
        "meet_complement_zero": sp.meet(s, sp.complement(t), tol).dim == 0,
    }


def witness_alpha(n: int, a: str = "a", b: str = "b") -> WitnessRecord:
    """``S = span(e_1..e_h)``, ``T = span(e_i + e_{h+i})`` with ``h = n/2``."""
    if n < 2 or n % 2:
        raise ValueError(f"witness_alpha needs an even n >= 2, got {n}")
    h = n // 2
    s = sp.from_spanning([_e(n, i) for i in range(h)], n)
    t = sp.from_spanning([_e(n, i) + _e(n, h + i) for i in range(h)], n)
    conds = alpha_conditions(s, t)
    if not all(conds.values()):
        raise WitnessError(f"constructed alpha witness violates {conds}")
    rec = _record(mk_alpha(a, b), Environment(n, {a: s, b: t}), {"method": "structured", "construction": "alpha"})
    if rec.achieved != h:
        raise WitnessError(f"alpha witness reached {rec.achieved}, expected {h}")
    return rec


def _random_search_alpha(n, a, b, budget, seed, tol):
    h = n // 2
    f = mk_alpha(a, b)
    for i in range(budget):
        rng = np.random.default_rng([seed, i])
        dims = (h, h + int(rng.integers(0, 2)))
        env = Environment(n, {a: sp.random_subspace(n, dims[0], rng), b: sp.random_subspace(n, dims[1], rng)})
        val, amb = evaluate_checked(f, env, tol)
        if not amb and val.dim == h:
            return WitnessRecord(f, n, env, h, {"method": "random", "construction": "alpha", "seed": seed, "trial": i})
    raise WitnessError(f"no alpha witness in C^{n} after {budget} trials")


def witness_alpha_odd(n: int, a: str = "a", b: str = "b", budget: int = 1000, seed: int = 0,
                      tol: Tolerance = DEFAULT_TOL) -> WitnessRecord:
    """Even witness for ``n - 1`` embedded in the first ``n - 1`` coordinates.

    Falls back to seeded random search if the embedding does not reach ``n // 2``.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"witness_alpha_odd needs an odd n >= 3, got {n}")
    inner = witness_alpha(n - 1, a, b)
    pad = lambda s: sp.Subspace(n, np.hstack([s.basis, np.zeros((s.dim, 1))]))
    env = Environment(n, [(k, pad(v)) for k, v in inner.env.items()])
    rec = _record(inner.formula, env, {"method": "structured", "construction": "alpha-embedded"}, tol)
    if rec.achieved == n // 2:
        return rec
    return _random_search_alpha(n, a, b, budget, seed, tol)


def alpha_witness(n: int, a: str = "a", b: str = "b") -> WitnessRecord:
    """Witness for alpha reaching ``n // 2`` in C^n, any ``n >= 0``."""
    if n >= 2 and n % 2 == 0:
        return witness_alpha(n, a, b)
    if n >= 3:
        return witness_alpha_odd(n, a, b)
    env = Environment(n, {a: sp.bottom(n), b: sp.bottom(n)})
    return _record(mk_alpha(a, b), env, {"method": "structured", "construction": "alpha-trivial"})


# --------------------------------------------------------------------------
# restriction

def witness_restrict(alpha: Formula, alpha_witness: WitnessRecord, beta: Formula, beta_witness: WitnessRecord,
                     restricted: Formula | None = None, tol: Tolerance = DEFAULT_TOL) -> WitnessRecord:
    """Lift a witness for ``alpha`` in C^d to one for ``restrict(alpha, beta)`` in C^n.

    ``d`` must equal the dimension of ``beta`` under ``beta_witness``; the
    alpha assignment is pushed into that subspace.
    """
    w = evaluate(beta, beta_witness.env, tol)
    if w.dim != alpha_witness.ambient:
        raise WitnessError(f"beta value has dim {w.dim}, alpha witness lives in C^{alpha_witness.ambient}")
    iso = sp.isometry_onto(w)
    avars = set(variables(alpha))
    lifted = Environment(beta_witness.ambient,
                         [(u, sp.pushforward(iso, s)) for u, s in alpha_witness.env.items() if u in avars])
    formula = restrict(alpha, beta) if restricted is None else restricted
    if isinstance(beta, Top):
        env = lifted
    else:
        env = beta_witness.env.restricted_to(variables(beta)).merged(lifted)
    trace = {"method": "recursive", "outer": alpha_witness.trace, "inner": beta_witness.trace}
    rec = _record(formula, env, trace, tol)
    if rec.achieved != alpha_witness.achieved:
        raise WitnessError(f"restricted witness reached {rec.achieved}, expected {alpha_witness.achieved}")
    return rec


def witness_alpha_chain(k: int, n: int, a: str = "a", b: str = "b", tol: Tolerance = DEFAULT_TOL) -> WitnessRecord:
    """Witness for :func:`mk_alpha_chain` reaching ``n // 2**k``."""
    rec = alpha_witness(n, a, b).freshened("_s1")
    for j in range(2, k + 1):
        stage = alpha_witness(rec.achieved, a, b).freshened(f"_s{j}")
        rec = witness_restrict(stage.formula, stage, rec.formula, rec, tol=tol)
    return rec


def witness_gamma(l: int, n: int) -> WitnessRecord:
    return witness_alpha_chain(gamma_depth(l) + 1, n, "c", "d")


def _unitary_to_last(v: np.ndarray) -> np.ndarray:
    """A unitary mapping the line through ``v`` onto the line through the last basis vector."""
    n = v.shape[0]
    q, _ = np.linalg.qr(v.reshape(n, 1), mode="complete")
    perm = np.roll(np.eye(n), -1, axis=0)  # perm @ e_0 = e_{n-1}
    return perm @ q.conj().T


def witness_beta(l: int, n: int, seed: int = 0, budget: int = 500, tol: Tolerance = DEFAULT_TOL) -> WitnessRecord:
    """Witness for ``mk_beta(l)`` reaching ``l`` at ``n = 2l`` and ``l + 1`` at ``n = 2l + 1``."""
    if n not in (2 * l, 2 * l + 1):
        raise ValueError(f"witness_beta(l={l}) needs n in {{{2 * l}, {2 * l + 1}}}, got {n}")
    f = mk_beta(l)
    pair = alpha_witness(2 * l)
    gamma = witness_gamma(l, n)
    if n == 2 * l:
        env = pair.env.merged(gamma.env)
        rec = _record(f, env, {"method": "structured", "construction": "beta-even", "l": l}, tol)
        if rec.achieved != l:
            raise WitnessError(f"beta({l}) witness in C^{n} reached {rec.achieved}, expected {l}")
        return rec

    pad = lambda s: sp.Subspace(n, np.hstack([s.basis, np.zeros((s.dim, 1))]))
    ab = Environment(n, [(k, pad(v)) for k, v in pair.env.items()])
    # rotate the gamma assignment so its value is the line orthogonal to S | T
    line = gamma.value(tol)
    u = _unitary_to_last(line.basis[0])
    rec = _record(f, ab.merged(gamma.env.transformed(u)), {"method": "structured", "construction": "beta-odd", "l": l}, tol)
    if rec.achieved == l + 1:
        return rec

    gvars = variables(gamma.formula)
    for i in range(budget):
        rng = np.random.default_rng([seed, i])
        genv = Environment(n, [(v, sp.random_subspace(n, int(rng.integers(1, n + 1)), rng)) for v in gvars])
        val, amb = evaluate_checked(gamma.formula, genv, tol)
        if amb or val.dim == 0:
            continue
        u = _unitary_to_last(val.basis[0])
        env = ab.merged(genv.transformed(u))
        trace = {"method": "random", "construction": "beta-odd", "l": l, "seed": seed, "trial": i}
        rec = _record(f, env, trace, tol)
        if rec.achieved == l + 1:
            return rec
    raise WitnessError(f"no beta({l}) witness in C^{n} after {budget} refinement trials")


def witness_separator(m: int, n: int, cert: Certificate | None = None, tol: Tolerance = DEFAULT_TOL) -> WitnessRecord:
    """Witness in C^n for the separating formula, built stage by stage."""
    phi, built = mk_separator(m, n)
    cert = cert or built
    rec = None
    d = n
    for s, st in enumerate(cert.stages, 1):
        if st.kind == "alpha":
            stage = alpha_witness(d, "a", "b").freshened(f"_s{s}")
        else:
            stage = witness_beta(st.l, d, tol=tol).freshened(f"_s{s}")
        if not structurally_equal(stage.formula, stage_formula(st.kind, st.l, s)):
            raise WitnessError(f"stage {s} witness formula does not match the construction")
        if rec is None:
            rec = stage
        else:
            rec = witness_restrict(stage.formula, stage, rec.formula, rec, tol=tol)
        if rec.achieved != st.pair[1]:
            raise WitnessError(f"stage {s}: witness reached {rec.achieved}, certificate claims {st.pair[1]}")
        d = rec.achieved
    if not structurally_equal(rec.formula, phi):
        raise WitnessError("witness formula differs from the separator")
    return rec


# --------------------------------------------------------------------------
# randomized estimation

@dataclass(frozen=True, eq=False)
class Estimate:
    formula: Formula
    ambient: int
    max_dim: int
    witness: WitnessRecord
    trials: int
    seed: int
    strategy: str
    rejected: int
    skipped: int
    histogram: dict

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "max_dim": self.max_dim,
            "trials": self.trials,
            "seed": self.seed,
            "strategy": self.strategy,
            "rejected": self.rejected,
            "skipped": self.skipped,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def _dims_sampler(strategy: str, k: int, n: int):
    if strategy == "auto":
        strategy = "exhaustive" if k <= 3 and n <= 6 else "uniform"
    if strategy == "exhaustive":
        tuples = list(itertools.product(range(n + 1), repeat=k))
        return strategy, lambda i, rng: tuples[i % len(tuples)]
    if strategy == "uniform":
        return strategy, lambda i, rng: tuple(int(x) for x in rng.integers(0, n + 1, size=k))
    raise ValueError(f"unknown dims strategy {strategy!r}")


def estimate_dbar(f: Formula, n: int, trials: int = DEFAULT_ESTIMATE_TRIALS, dims_strategy: str = "auto",
                  seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> Estimate:
    """Random lower bound for the maximal dimension of ``f`` in C^n.

    Trial ``i`` draws from ``default_rng([seed, i, redraw])``, so results
    depend only on ``(f, n, trials, dims_strategy, seed, tol)``.  Draws
    with a rank decision inside the guard band are redrawn (up to
    ``MAX_REDRAWS`` times, then the trial is skipped).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    names = variables(f)
    strategy, dims_for = _dims_sampler(dims_strategy, len(names), n)
    best_dim, best = -1, None
    rejected = skipped = 0
    hist: dict[int, int] = {}
    if not names:
        val = evaluate(f, Environment(n), tol)
        rec = WitnessRecord(f, n, Environment(n), val.dim, {"method": "constant"})
        return Estimate(f, n, val.dim, rec, trials, seed, strategy, 0, 0, {val.dim: trials})
    for i in range(trials):
        for redraw in range(MAX_REDRAWS):
            rng = np.random.default_rng([seed, i, redraw])
            dims = dims_for(i, rng)
            env = Environment(n, [(v, sp.random_subspace(n, d, rng)) for v, d in zip(names, dims)])
            val, amb = evaluate_checked(f, env, tol)
            if not amb:
                break
            rejected += 1
        else:
            skipped += 1
            continue
        hist[val.dim] = hist.get(val.dim, 0) + 1
        if val.dim > best_dim:
            best_dim = val.dim
            trace = {"method": "random", "seed": seed, "trial": i, "redraw": redraw, "dims": list(dims)}
            best = WitnessRecord(f, n, env, val.dim, trace)
    if best is None:
        raise WitnessError(f"every trial fell in the guard band ({trials} trials)")
    return Estimate(f, n, best_dim, best, trials, seed, strategy, rejected, skipped, hist)


# --------------------------------------------------------------------------
# verdicts

CERTIFIED_TAUTOLOGY = "certified-tautology"
CERTIFIED_NON_TAUTOLOGY = "certified-non-tautology"
STATISTICAL_TAUTOLOGY = "statistical-tautology"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: str
    ambient: int
    predicted: int | None
    observed_max: int | None
    witness: WitnessRecord | None = None
    estimate: Estimate | None = None
    note: str = ""

    @property
    def is_tautology(self) -> bool | None:
        if self.kind in (CERTIFIED_TAUTOLOGY, STATISTICAL_TAUTOLOGY):
            return True
        if self.kind == CERTIFIED_NON_TAUTOLOGY:
            return False
        return None

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "verdict": self.kind,
            "ambient": self.ambient,
            "predicted": self.predicted,
            "observed_max": self.observed_max,
        }
        if self.note:
            out["note"] = self.note
        if self.estimate is not None:
            out["estimate"] = self.estimate.to_json()
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _predict(cert, n):
    if cert is None:
        return None
    try:
        return cert.predict(n) if isinstance(cert, Certificate) else cert(n)
    except ProfileLookupError:
        return None


def check_tautology(f: Formula, n: int, cert: Certificate | DimProfile | None = None,
                    trials: int = DEFAULT_ZERO_TEST_TRIALS, seed: int = 0,
                    witness: WitnessRecord | None = None, tol: Tolerance = DEFAULT_TOL) -> Verdict:
    """Decide whether ``f`` is a tautology in C^n as far as the evidence allows.

    A verified witness of positive dimension settles non-tautology.  A zero
    prediction from ``cert`` plus a clean random search settles tautology.
    Disagreement between prediction and observation yields ``inconclusive``.
    """
    predicted = _predict(cert, n)
    if witness is not None:
        if witness.ambient != n or not structurally_equal(witness.formula, f) or not witness.verify(tol):
            raise WitnessError("supplied witness does not reproduce its claim for this formula and n")
        if witness.achieved >= 1:
            if predicted == 0:
                return Verdict(INCONCLUSIVE, n, predicted, witness.achieved, witness,
                               note="certificate predicts 0 but the witness is nonzero")
            return Verdict(CERTIFIED_NON_TAUTOLOGY, n, predicted, witness.achieved, witness)
    est = estimate_dbar(f, n, trials, seed=seed, tol=tol)
    if est.max_dim >= 1:
        if predicted == 0:
            return Verdict(INCONCLUSIVE, n, predicted, est.max_dim, est.witness, est,
                           note="certificate predicts 0 but sampling found a nonzero valuation")
        return Verdict(CERTIFIED_NON_TAUTOLOGY, n, predicted, est.max_dim, est.witness, est)
    if predicted == 0:
        return Verdict(CERTIFIED_TAUTOLOGY, n, predicted, 0, None, est)
    if predicted is None:
        return Verdict(STATISTICAL_TAUTOLOGY, n, None, 0, None, est)
    return Verdict(INCONCLUSIVE, n, predicted, 0, None, est,
                   note="certificate predicts a nonzero value but no witness was found")


# --------------------------------------------------------------------------
# separation

@dataclass(frozen=True, eq=False)
class SeparationReport:
    m: int
    n: int
    formula: Formula
    certificate: Certificate
    witness: WitnessRecord
    zero_test: Estimate

    def check(self, tol: Tolerance = DEFAULT_TOL) -> None:
        if self.witness.achieved < 1 or not self.witness.verify(tol):
            raise SeparationError("witness in C^n does not reproduce a positive dimension")
        if self.zero_test.max_dim != 0:
            raise SeparationError(f"zero-test in C^{self.m} saw dimension {self.zero_test.max_dim}")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "formula": to_text(self.formula),
            "certificate": self.certificate.to_json(),
            "witness": self.witness.to_json(),
            "zero_test": self.zero_test.to_json(),
        }


def separate(m: int, n: int, trials: int = DEFAULT_ZERO_TEST_TRIALS, seed: int = 0,
             tol: Tolerance = DEFAULT_TOL) -> SeparationReport:
    """Formula in QL(C^m) but not QL(C^n), with certificate, witness and zero-test."""
    phi, cert = mk_separator(m, n)
    try:
        cert.verify()
    except CertificateError as exc:
        raise SeparationError(f"certificate check failed: {exc}") from exc
    witness = witness_separator(m, n, cert, tol)
    if witness.achieved != cert.final_pair[1]:
        raise SeparationError(f"witness reached {witness.achieved}, certificate claims {cert.final_pair[1]}")
    zero = estimate_dbar(phi, m, trials, seed=seed, tol=tol)
    report = SeparationReport(m, n, phi, cert, witness, zero)
    report.check(tol)
    return report
