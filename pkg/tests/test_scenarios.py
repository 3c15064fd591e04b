import math
import time

import pytest

from dashift.errors import ParamOutOfRange, UnknownScenario
from dashift.invariance import check_eci
from dashift.measure import conditional_label
from dashift.scenarios import GENERATORS, gen, random_instance
from dashift.serialize import dumps_scenario, scenario_from_dict, scenario_to_dict
from dashift.errors import SchemaError


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generators_roundtrip(name):
    spec = gen(name)
    text = dumps_scenario(spec)
    assert dumps_scenario(scenario_from_dict(scenario_to_dict(spec))) == text
    assert spec.manifest


def test_unknown_and_bad_params():
    with pytest.raises(UnknownScenario):
        gen("nope")
    with pytest.raises(ParamOutOfRange):
        gen("memorize_line", eps=0.6)
    with pytest.raises(ParamOutOfRange):
        gen("memorize_line", bogus=1)


def test_schema_rejects_unknown_fields():
    d = scenario_to_dict(gen("quadrants_v1"))
    d["extra"] = 1
    with pytest.raises(SchemaError):
        scenario_from_dict(d)
    d = scenario_to_dict(gen("quadrants_v1"))
    d["schema_version"] = 2
    with pytest.raises(SchemaError):
        scenario_from_dict(d)


def test_cmnist_cell():
    c = gen("cmnist_latent")
    got = conditional_label(c.env("e1"), c.rep("phi_xz"), "xz:11")
    assert got[0] == pytest.approx(1 / 28, abs=1e-12)
    assert got[1] == pytest.approx(27 / 28, abs=1e-12)


def test_cmnist_misaligned_collapses_at_p_one():
    lat = gen("cmnist_latent")
    mis = gen("cmnist_misaligned", p=1.0)
    # the misaligned e1/e2 flip rates are the latent e2/e1 ones
    assert mis.env("e1").atoms == lat.env("e2").atoms
    assert mis.env("e2").atoms == lat.env("e1").atoms


def test_memorize_line_eci_for_all_eps():
    for eps in (1e-3, 0.05, 0.15, 0.25, 0.333):
        spec = gen("memorize_line", eps=eps)
        assert check_eci(spec.source_envs(), spec.rep("phi_abs")).holds


def test_class_skew_weights():
    mild = gen("class_skew", shift="mild", seed=3)
    w = mild.manifest["weights"]
    assert w[0] == 0.25 and w[9] == 0.9
    assert all(0.25 <= v <= 0.75 for v in w[1:9])
    strong = gen("class_skew", shift="strong", seed=3)
    assert strong.manifest["max_relative_weight_ratio"] > mild.manifest["max_relative_weight_ratio"]
    assert gen("class_skew", shift="mild", seed=3, w9=9.0).manifest["weights"][9] == 9.0


def test_random_instance_deterministic():
    assert dumps_scenario(random_instance(42, n_envs=4, n_predictors=3)) == \
        dumps_scenario(random_instance(42, n_envs=4, n_predictors=3))
    assert dumps_scenario(random_instance(1)) != dumps_scenario(random_instance(2))


def test_random_instance_exercises_infinity_paths():
    singular = zero_labels = 0
    for seed in range(200):
        spec = random_instance(seed)
        s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
        from dashift.measure import pushforward

        mu_s = pushforward(s, rep)
        singular += any(mu_s.get(g, 0.0) == 0.0 for g in pushforward(t, rep))
        zero_labels += any(0.0 in conditional_label(s, rep, g) for g in mu_s)
    assert singular >= 40
    assert zero_labels >= 40


def test_random_instance_size_guard():
    with pytest.raises(ParamOutOfRange):
        random_instance(0, n_atoms=13)


def test_random_instance_speed():
    t0 = time.perf_counter()
    for seed in range(50):
        random_instance(seed, n_atoms=12, K=4, n_rep_atoms=6, n_envs=4)
    assert (time.perf_counter() - t0) / 50 < 0.01
