import math

import pytest

from dashift.divergence import (
    Composite,
    FinitePredictorSet,
    connect_bound,
    dann_terms,
    hdh_divergence,
    multisource_div_bound,
    single_source_div_bound,
)
from dashift.errors import ClassTooLarge, ValidationError
from dashift.measure import Predictor, Representation
from dashift.risk import CE, ZERO_ONE
from dashift.scenarios import gen, random_instance


def test_empty_and_huge_sets():
    with pytest.raises(ValidationError):
        FinitePredictorSet([])
    rep = Representation("r", {"a": "g"})
    h = Composite(Predictor.from_labels("p", 2, {"g": 0}), rep)
    with pytest.raises(ClassTooLarge):
        FinitePredictorSet([h] * 1001)


def test_divergence_zero_between_identical():
    spec = random_instance(8, n_predictors=4)
    hset = spec.predictor_set("random")
    e = spec.env("t")
    assert hdh_divergence(e, e, hset, ZERO_ONE).value == 0.0


def test_quadrant_divergence_detects_flip():
    q = gen("quadrants_v1")
    hset = q.predictor_set("thresholds")
    d = hdh_divergence(q.env("s"), q.env("t"), hset, ZERO_ONE).value
    assert d == pytest.approx(2.0)
    for h in hset.hypotheses:
        assert single_source_div_bound(q.env("s"), q.env("t"), h, hset, ZERO_ONE).holds


def test_multisource_divergence_bound_cmnist():
    c = gen("cmnist_latent")
    hset = c.predictor_set("label_maps")
    for h in hset.hypotheses:
        assert multisource_div_bound(c.source_set(), h, hset, ZERO_ONE).holds


def test_connect_bound_at_least_exact():
    for seed in range(40):
        spec = random_instance(seed)
        r = connect_bound(spec.env("e1"), spec.env("t"), spec.rep("phi"))
        assert r.holds
        if math.isfinite(r.exact_rhs):
            assert r.rhs >= r.exact_rhs - 1e-9


def test_dann_terms_axis():
    a = gen("axis_target")
    d = dann_terms(a.env("s"), a.env("t"), a.predictor_set("dann"), ZERO_ONE)
    by_rep = {r["representation"]: r for r in d.rows}
    assert by_rep["phi1"]["d_tv"] == pytest.approx(1.0)
    assert by_rep["phi2"]["d_tv"] == pytest.approx(0.0)
    assert d.lambda_star == 0.0
