import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dashift.errors import PredictorUndefinedAtom
from dashift.measure import Environment, Predictor, Representation, identity_representation
from dashift.risk import (
    CE,
    ZERO_ONE,
    Loss,
    argmax,
    batch_risks,
    bayes_predictor,
    check_bayes_optimality_property,
    cross_entropy,
    entropy,
    kl,
    risk,
    simplex_grid,
)
from dashift.scenarios import gen, random_instance


def test_entropy_kl_closed_forms():
    assert entropy((0.5, 0.5)) == pytest.approx(math.log(2))
    assert entropy((1.0, 0.0)) == 0.0
    assert kl((0.5, 0.5), (1.0, 0.0)) == math.inf
    assert kl((1.0, 0.0), (0.5, 0.5)) == pytest.approx(math.log(2))
    assert cross_entropy((0.0, 1.0), (1.0, 0.0)) == math.inf


def test_argmax_ties_smallest_index():
    assert argmax((0.5, 0.5)) == 0
    assert argmax((0.2, 0.4, 0.4)) == 1


def test_loss_parse():
    assert Loss.parse("0-1") is ZERO_ONE
    assert Loss.parse("CE") is CE
    with pytest.raises(ValueError):
        Loss.parse("hinge")


def test_bayes_predictor_risk_is_entropy():
    e = Environment.from_atoms("e", [("a", 0, 0.3), ("a", 1, 0.1), ("b", 1, 0.6)], 2)
    rep = identity_representation(["a", "b"])
    f = bayes_predictor(e, rep, CE)
    want = 0.4 * entropy((0.75, 0.25))
    assert risk(e, f, rep, CE) == pytest.approx(want, abs=1e-15)
    assert risk(e, bayes_predictor(e, rep, ZERO_ONE), rep, ZERO_ONE) == pytest.approx(0.1)


def test_risk_missing_atom():
    e = Environment.from_atoms("e", [("a", 0, 1.0)], 2)
    with pytest.raises(PredictorUndefinedAtom):
        risk(e, Predictor("p", 2, {}), identity_representation(["a"]), CE)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([CE, ZERO_ONE]))
def test_batch_risks_match_scalar_risk(seed, loss):
    spec = random_instance(seed, n_predictors=4)
    preds = spec.predictor_class("random").predictors
    env, rep = spec.env("t"), spec.rep("phi")
    got = batch_risks(env, rep, preds, loss)
    want = np.array([risk(env, p, rep, loss) for p in preds])
    finite = np.isfinite(want)
    assert np.array_equal(np.isinf(got), np.isinf(want))
    np.testing.assert_allclose(got[finite], want[finite], rtol=0, atol=1e-12)


def test_simplex_grid_sums_to_one():
    grid = simplex_grid(3, 4)
    assert len(grid) == 15
    assert all(abs(sum(v) - 1.0) < 1e-12 for v in grid)


def test_bayes_optimality_property():
    spec = random_instance(7)
    assert check_bayes_optimality_property(CE, spec.env("e1"), spec.rep("phi")).holds
    c = gen("cmnist_latent")
    v = check_bayes_optimality_property(ZERO_ONE, c.env("e1"), c.rep("phi_xz"))
    assert not v.holds
    assert v.witness is not None and v.witness_atom is not None
