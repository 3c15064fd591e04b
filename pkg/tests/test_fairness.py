import math

import pytest

from dashift.errors import SupportViolation, ValidationError
from dashift.fairness import GroupPartition, fairness_bounds, group_quantities, source_fairness
from dashift.scenarios import gen, random_instance


def test_partition_overlap_rejected():
    with pytest.raises(ValidationError):
        GroupPartition.of([["a", "b"], ["b"]])


def test_partition_must_cover():
    spec = random_instance(2, singular_fraction=0.0)
    with pytest.raises(ValidationError):
        fairness_bounds(spec.env("e1"), spec.env("t"), spec.rep("phi"), GroupPartition.of([["nope"]]))


def test_class_skew_bounds():
    for shift in ("mild", "strong"):
        c = gen("class_skew", shift=shift)
        f = fairness_bounds(c.env("s"), c.env("t"), c.rep("phi_class"))
        # deterministic labels: zero entropy everywhere, zero shift
        assert f.rho == 0.0 and f.mu == 0.0
        assert f.d_tv > 0.0
        assert f.certified


def test_singletons_match_point_quantities():
    spec = random_instance(5, singular_fraction=0.0)
    s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
    f = fairness_bounds(s, t, rep)
    assert f.mu_group == pytest.approx(f.mu, abs=1e-12)
    assert f.d_group == pytest.approx(f.d_tv, abs=1e-12)


def test_certify_refuses_singular_mass():
    a = gen("axis_target")
    s, t, rep = a.env("s"), a.env("t"), a.rep("phi1")
    part = GroupPartition.of([["x1:neg", "x1:pos", "x1:zero"]])
    with pytest.raises(SupportViolation):
        group_quantities(s, t, rep, part, certify=True)


def test_source_fairness_bounded_by_log_k():
    for seed in range(30):
        spec = random_instance(seed)
        assert source_fairness(spec.env("e1"), spec.rep("phi")) <= math.log(spec.K) + 1e-12
