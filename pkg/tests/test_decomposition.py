import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dashift.decomposition import build_mixture, decompose, lebesgue_split, verify_theorem1
from dashift.errors import LossUnsupported
from dashift.measure import Environment, Representation, SingularExtension, log_base
from dashift.risk import ZERO_ONE
from dashift.scenarios import gen, random_instance
from dashift.verify import direct_target_risk


def test_lebesgue_split():
    sp = lebesgue_split({"a": 0.5, "b": 0.5}, {"a": 0.25, "c": 0.75})
    assert sp.mu_t0 == {"a": 0.25}
    assert sp.mu_t1 == {"c": 0.75}
    assert sp.omega == {"a": 0.5, "b": 0.0}
    assert sp.singular_mass == 0.75


def test_mixture_is_normalized():
    spec = random_instance(11)
    mix = build_mixture(spec.env("e1"), spec.env("t"), spec.rep("phi"))
    assert math.fsum(m for *_, m in mix.atoms) == pytest.approx(1.0, abs=1e-12)


def test_identical_environments_give_zero_shift():
    spec = random_instance(3)
    s = spec.env("e1")
    r = decompose(s, s, spec.rep("phi"))
    assert r.kl_term == pytest.approx(0.0, abs=1e-15)
    assert r.bayes_div_term == pytest.approx(0.0, abs=1e-15)
    assert r.cov_shift_term == pytest.approx(0.0, abs=1e-15)
    assert r.target_risk == pytest.approx(r.source_risk, abs=1e-15)


def test_axis_target_singular_risk():
    a = gen("axis_target")
    r = decompose(a.env("s"), a.env("t"), a.rep("phi1"))
    assert r.sing_term == pytest.approx(math.log(2), abs=1e-12)
    assert r.singular_extension_used
    with log_base(2):
        assert decompose(a.env("s"), a.env("t"), a.rep("phi1")).sing_term == pytest.approx(1.0, abs=1e-12)


def test_custom_extension_changes_singular_term():
    a = gen("axis_target")
    ext = SingularExtension("custom", {"x1:zero": (0.25, 0.75)})
    r = decompose(a.env("s"), a.env("t"), a.rep("phi1"), ext)
    h = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    assert r.sing_term == pytest.approx(h, abs=1e-12)
    # the target is balanced on x1:zero, so it pays the cross-entropy against (1/4, 3/4)
    want = -(0.5 * math.log(0.25) + 0.5 * math.log(0.75))
    assert r.target_risk == pytest.approx(want, abs=1e-12)
    assert verify_theorem1(r).passed


def test_zero_one_rejected():
    q = gen("quadrants_v1")
    with pytest.raises(LossUnsupported):
        decompose(q.env("s"), q.env("t"), q.rep("phi1"), loss=ZERO_ONE)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(["uniform", "source-marginal"]))
def test_decomposition_against_direct_oracle(seed, mode):
    spec = random_instance(seed)
    s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
    ext = SingularExtension(mode)
    r = decompose(s, t, rep, ext)
    oracle = direct_target_risk(s, t, rep, ext)
    if math.isinf(oracle):
        assert r.rhs() == math.inf
    else:
        assert abs(r.rhs() - oracle) <= 1e-9
    assert abs(r.cov_shift_term - r.abs_cont_term - r.sing_term) <= 1e-12


def test_handmade_two_atom_example():
    s = Environment.from_atoms("s", [("a", 0, 0.5), ("b", 1, 0.25), ("b", 0, 0.25)], 2)
    t = Environment.from_atoms("t", [("a", 0, 0.25), ("b", 1, 0.75)], 2)
    rep = Representation("id", {"a": "a", "b": "b"})
    r = decompose(s, t, rep)
    # source Bayes predictor: a -> (1, 0), b -> (1/2, 1/2); target pays log 2 on b only
    assert r.target_risk == pytest.approx(0.75 * math.log(2), abs=1e-15)
    assert r.source_risk == pytest.approx(0.5 * math.log(2), abs=1e-15)
    assert verify_theorem1(r).passed
