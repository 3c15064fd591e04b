import math

import pytest

from dashift.errors import (
    DuplicateAtom,
    InvalidDistribution,
    MassSumOutOfTolerance,
    NegativeMass,
    UnmappedAtom,
)
from dashift.measure import (
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    conditional_label,
    ext_add,
    ext_sub,
    get_log_base,
    log,
    log_base,
    pushforward,
    tv_distance,
    weighted,
)
from dashift.errors import IndeterminateInfinity


def env(atoms, K=2, name="e"):
    return Environment.from_atoms(name, atoms, K)


def test_validation_errors():
    with pytest.raises(NegativeMass):
        env([("a", 0, -0.1), ("b", 0, 1.1)])
    with pytest.raises(MassSumOutOfTolerance, match="'bad'"):
        env([("a", 0, 0.6), ("b", 1, 0.6)], name="bad")
    with pytest.raises(DuplicateAtom):
        env([("a", 0, 0.5), ("a", 0, 0.5)])
    with pytest.raises(InvalidDistribution):
        env([("a", 2, 1.0)])
    with pytest.raises(InvalidDistribution):
        env([("a", 0, 1.0)], K=1)


def test_small_mass_error_is_renormalized():
    e = env([("a", 0, 0.5), ("b", 1, 0.5 + 5e-7)])
    assert math.isclose(sum(m for *_, m in e.atoms), 1.0, abs_tol=1e-15)


def test_validation_is_idempotent():
    e = env([("a", 0, 0.1), ("b", 1, 0.2), ("c", 0, 0.7)])
    assert Environment.from_atoms(e.name, e.atoms, e.K).atoms == e.atoms


def test_pushforward_and_conditional():
    e = env([("a", 0, 0.25), ("a", 1, 0.25), ("b", 1, 0.5)])
    rep = Representation("r", {"a": "g", "b": "g"})
    assert pushforward(e, rep) == {"g": 1.0}
    assert conditional_label(e, rep, "g") == (0.25, 0.75)


def test_unmapped_atom():
    rep = Representation("r", {"a": "g"})
    with pytest.raises(UnmappedAtom):
        rep("b")


def test_extension_modes_off_support():
    e = env([("a", 0, 0.25), ("b", 1, 0.75)])
    rep = Representation("r", {"a": "g", "b": "h", "c": "k"})
    assert conditional_label(e, rep, "k") == (0.5, 0.5)
    assert conditional_label(e, rep, "k", SingularExtension("source-marginal")) == (0.25, 0.75)
    custom = SingularExtension("custom", {"k": (0.1, 0.9)})
    assert conditional_label(e, rep, "k", custom) == (0.1, 0.9)
    with pytest.raises(UnmappedAtom):
        conditional_label(e, rep, "zz", custom)


def test_predictor_rejects_bad_vectors():
    with pytest.raises(InvalidDistribution):
        Predictor("p", 2, {"g": (0.5, 0.6)})
    with pytest.raises(InvalidDistribution):
        Predictor("p", 2, {"g": (1.0,)})


def test_extended_arithmetic():
    assert ext_add(1.0, math.inf) == math.inf
    assert ext_sub(math.inf, 1.0) == math.inf
    with pytest.raises(IndeterminateInfinity):
        ext_sub(math.inf, math.inf)
    assert weighted(0.0, math.inf) == 0.0


def test_log_base_context():
    assert get_log_base() == math.e
    with log_base(2):
        assert log(8) == pytest.approx(3.0)
    assert log(math.e) == pytest.approx(1.0)


def test_tv_distance():
    assert tv_distance({"a": 1.0}, {"b": 1.0}) == 1.0
    assert tv_distance({"a": 0.5, "b": 0.5}, {"a": 0.5, "b": 0.5}) == 0.0
