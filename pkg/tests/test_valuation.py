import json
import random

import numpy as np
import pytest

from conftest import e, span
from qlogic import subspace as sp
from qlogic.formula import (
    TOP, Var, VariableOverlapError, mk_alpha, mk_P, parse, random_formula, to_text, variables,
)
from qlogic.valuation import (
    Environment, RebindError, UnboundVariableError, check_restriction_lemma, evaluate, evaluate_checked,
)


def rand_env(names, n, rng):
    return Environment(n, [(v, sp.random_subspace(n, int(rng.integers(0, n + 1)), rng)) for v in names])


class TestEnvironment:
    def test_ordered(self, rng):
        env = rand_env(["z", "a", "m"], 3, rng)
        assert list(env) == ["z", "a", "m"]

    def test_rebind_rejected(self):
        env = Environment(2, {"a": sp.top(2)})
        with pytest.raises(RebindError):
            env.bind("a", sp.bottom(2))
        with pytest.raises(RebindError):
            env.merged(Environment(2, {"a": sp.top(2)}))

    def test_ambient_checked(self):
        with pytest.raises(sp.AmbientMismatchError):
            Environment(2, {"a": sp.top(3)})

    def test_json_round_trip(self, rng):
        env = rand_env("abc", 4, rng)
        back = Environment.from_json(json.loads(json.dumps(env.to_json())))
        assert list(back) == list(env)
        assert all(sp.equal(env[k], back[k]) for k in env)

    def test_renamed(self):
        env = Environment(2, {"a": sp.top(2)}).renamed("_s1")
        assert list(env) == ["a_s1"]


class TestEvaluate:
    def test_contradiction(self, rng):
        for _ in range(20):
            env = rand_env("a", 4, rng)
            assert evaluate(parse("a & !a"), env).dim == 0

    def test_alpha_on_equal_pair(self, rng):
        s = sp.random_subspace(4, 2, rng)
        assert evaluate(mk_alpha("a", "b"), Environment(4, {"a": s, "b": s})).dim == 0

    def test_alpha_line_pair(self):
        s, t = span(2, e(2, 0)), span(2, e(2, 0, 1))
        # oracle: dim P(T,S) - dim(S & T) with both computed from raw matrix ranks
        ps, pt = sp.projector(s), sp.projector(t)
        p_ts = np.linalg.matrix_rank(ps @ pt, tol=1e-10)
        meet = 1 + 1 - np.linalg.matrix_rank(np.vstack([s.basis, t.basis]))
        assert p_ts - meet == 1
        assert evaluate(mk_alpha("a", "b"), Environment(2, {"a": s, "b": t})).dim == 1

    def test_P_line_pair(self):
        s, t = span(2, e(2, 0)), span(2, e(2, 0, 1))
        val = evaluate(mk_P("a", "b"), Environment(2, {"a": s, "b": t}))
        image = sp.from_spanning((sp.projector(t) @ sp.projector(s)).T, 2)
        assert val.dim == 1 == image.dim
        assert sp.equal(val, image)

    def test_P_same_argument(self, rng):
        for _ in range(20):
            s = sp.random_subspace(4, int(rng.integers(0, 5)), rng)
            assert sp.equal(evaluate(mk_P("a", "a"), Environment(4, {"a": s})), s)

    def test_P_dimension_symmetry(self, rng):
        for _ in range(100):
            env = rand_env("ab", 5, rng)
            d1 = evaluate(mk_P("a", "b"), env).dim
            d2 = evaluate(mk_P("b", "a"), env).dim
            assert d1 == d2 <= min(env["a"].dim, env["b"].dim)

    def test_constants(self):
        env = Environment(3)
        assert evaluate(TOP, env).dim == 3
        assert evaluate(parse("bot | !top"), env).dim == 0

    def test_unbound(self):
        with pytest.raises(UnboundVariableError) as exc:
            evaluate(parse("a & b"), Environment(2, {"a": sp.top(2)}))
        assert exc.value.name == "b"

    def test_checked_reports_clean(self, rng):
        env = rand_env("ab", 4, rng)
        _, amb = evaluate_checked(mk_alpha("a", "b"), env)
        assert amb is False


class TestProperties:
    def test_printed_formula_evaluates_the_same(self, rng):
        pyrng = random.Random(3)
        for _ in range(50):
            f = random_formula(pyrng, 12)
            env = rand_env("abcd", 4, rng)
            assert sp.equal(evaluate(f, env), evaluate(parse(to_text(f)), env))

    def test_unitary_equivariance(self, rng):
        pyrng = random.Random(4)
        for _ in range(50):
            f = random_formula(pyrng, 12)
            env = rand_env("abcd", 4, rng)
            u = sp.random_unitary(4, rng)
            lhs = evaluate(f, env.transformed(u))
            rhs = sp.apply_unitary(u, evaluate(f, env))
            assert sp.equal(lhs, rhs)

    def test_monotone_on_negation_free(self, rng):
        pyrng = random.Random(5)
        checked = 0
        while checked < 50:
            f = random_formula(pyrng, 10, ("a", "b", "c"))
            if "!" in to_text(f):
                continue
            small = rand_env("abc", 4, rng)
            big = Environment(4, [(k, sp.join(v, sp.random_subspace(4, int(rng.integers(0, 3)), rng)))
                                  for k, v in small.items()])
            assert sp.contains(evaluate(f, big), evaluate(f, small))
            checked += 1


class TestRestrictionLemma:
    def test_beta_top(self, rng):
        alpha = mk_alpha("a", "b")
        env = rand_env("ab", 4, rng)
        rep = check_restriction_lemma(alpha, TOP, env)
        assert rep.holds
        assert sp.equal(rep.lhs, evaluate(alpha, env))
        assert rep.distance < 1e-12

    def test_single_variable(self, rng):
        env = rand_env(["u", "v", "w"], 5, rng)
        beta = mk_alpha("v", "w")
        rep = check_restriction_lemma(Var("u"), beta, env)
        expected = sp.meet(env["u"], evaluate(beta, env))
        assert rep.holds and sp.equal(rep.lhs, expected) and sp.equal(rep.rhs, expected)

    def test_random_instances(self, rng):
        pyrng = random.Random(11)
        beta = mk_alpha("v", "w")
        for _ in range(100):
            alpha = random_formula(pyrng, 10, ("a", "b", "c"))
            env = rand_env(variables(alpha) + ["v", "w"], 6, rng)
            rep = check_restriction_lemma(alpha, beta, env)
            assert rep.lhs_dim == rep.rhs_dim
            assert rep.distance < 1e-8

    def test_nontrivial_relative_space(self):
        # beta = alpha(v, w) evaluates to a 3-dim subspace of C^6
        from qlogic.dbar import witness_alpha

        w = witness_alpha(6, "v", "w")
        rng = np.random.default_rng(0)
        env = w.env.merged(Environment(6, {"a": sp.random_subspace(6, 5, rng), "b": sp.random_subspace(6, 5, rng)}))
        rep = check_restriction_lemma(mk_alpha("a", "b"), mk_alpha("v", "w"), env)
        assert rep.relative_dim == 3
        assert rep.lhs_dim == 1 and rep.holds

    def test_overlap(self, rng):
        with pytest.raises(VariableOverlapError):
            check_restriction_lemma(Var("a"), Var("a"), rand_env("a", 2, rng))
