import math

import pytest

from dashift.errors import NotECI, ValidationError
from dashift.multisource import (
    SourceSet,
    class_gap,
    covariate_shift,
    eci_bound_report,
    predictor_gap_pair,
    theorem2_report,
)
from dashift.risk import CE, ZERO_ONE
from dashift.scenarios import gen, random_instance


def test_source_set_validation():
    spec = random_instance(0, n_envs=3)
    e = spec.env("e1")
    with pytest.raises(ValidationError):
        SourceSet((e, e), spec.env("t"))
    with pytest.raises(ValidationError):
        SourceSet((), spec.env("t"))


def test_gap_of_environment_with_itself_is_zero():
    spec = random_instance(4, n_envs=3)
    e = spec.env("e1")
    g = predictor_gap_pair(e, e, spec.source_envs(), spec.rep("phi"), CE)
    assert g.value == 0.0 or g.value == -math.inf or g.skipped


def test_theorem2_on_cmnist():
    c = gen("cmnist_latent")
    for rep in c.representations.values():
        r = theorem2_report(c.source_set(), rep)
        assert r.holds


def test_eci_bound_requires_invariance():
    c = gen("cmnist_latent")
    h = [p for p in c.predictor_class("conditionals").predictors if p.name.startswith("phi_xz")][0]
    with pytest.raises(NotECI):
        eci_bound_report(c.source_set(), [c.rep("phi_xz")], (h, c.rep("phi_xz")))


def test_eci_bound_on_memorize_line():
    line = gen("memorize_line")
    phi = line.rep("phi_abs")
    h = [p for p in line.predictor_class("thresholds").predictors if p.name == "phi_abs:1[v<=1]"][0]
    r = eci_bound_report(line.source_set(), [phi], (h, phi), loss=ZERO_ONE)
    assert r.holds
    assert r.lhs == pytest.approx(0.45, abs=1e-12)


def test_class_gap_is_max_over_reps():
    c = gen("cmnist_latent")
    reps = list(c.representations.values())
    full = class_gap(c.source_set(), reps, ZERO_ONE).value
    parts = [class_gap(c.source_set(), [r], ZERO_ONE).value for r in reps]
    assert full == max(parts)


def test_covariate_shift_vanishes_for_same_marginal():
    c = gen("cmnist_latent")
    assert covariate_shift(c.env("e1"), c.env("e2"), c.rep("phi_x")) == pytest.approx(0.0, abs=1e-15)
