"""Finite probability spaces over (input atom, label) pairs.

Everything here is exact on atoms: environments are finite joint
distributions, representations are deterministic maps between atom ids,
and representation measures are plain ``dict`` objects mapping a
representation atom to its mass.  Infinite values (cross-entropy against a
zero-probability label) are ordinary ``math.inf`` floats; see
:func:`ext_add` and :func:`ext_sub` for the arithmetic rules.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DuplicateAtom,
    IndeterminateInfinity,
    InvalidDistribution,
    MassSumOutOfTolerance,
    NegativeMass,
    UnmappedAtom,
)

MASS_TOL = 1e-6
DIST_TOL = 1e-9

ReprDistribution = dict  # rep-atom id -> probability

_LOG_BASE: contextvars.ContextVar[float] = contextvars.ContextVar("log_base", default=math.e)


def get_log_base() -> float:
    return _LOG_BASE.get()


def set_log_base(base: float) -> None:
    """Select the logarithm base used by every entropy-type quantity."""
    if base not in (math.e, 2, 2.0):
        raise ValueError(f"log base must be e or 2, got {base!r}")
    _LOG_BASE.set(float(base))


@contextlib.contextmanager
def log_base(base: float) -> Iterator[None]:
    token = _LOG_BASE.set(float(base))
    try:
        yield
    finally:
        _LOG_BASE.reset(token)


def log(x: float) -> float:
    base = _LOG_BASE.get()
    if base == math.e:
        return math.log(x)
    return math.log(x) / math.log(base)


# -- extended reals ---------------------------------------------------------

def ext_add(*values: float) -> float:
    """Sum of values in [0, inf] or finite reals; inf absorbs finite terms."""
    if any(v == math.inf for v in values):
        if any(v == -math.inf for v in values):
            raise IndeterminateInfinity("inf + (-inf)")
        return math.inf
    return math.fsum(values)


def ext_sub(a: float, b: float) -> float:
    if a == math.inf and b == math.inf:
        raise IndeterminateInfinity("inf - inf")
    if a == math.inf:
        return math.inf
    if b == math.inf:
        return -math.inf
    return a - b


def weighted(mass: float, value: float) -> float:
    """``mass * value`` with the integral convention 0 * inf = 0."""
    if mass == 0.0:
        return 0.0
    return mass * value


# -- core types -------------------------------------------------------------

@dataclass(frozen=True)
class Environment:
    """Finite joint distribution over (input atom, label).

    ``atoms`` holds ``(input_atom, label, mass)`` triples.  Instances built
    directly are unchecked; pass them through :func:`validate_environment`.
    """

    name: str
    K: int
    atoms: tuple[tuple[str, int, float], ...]

    @classmethod
    def from_atoms(cls, name: str, atoms: Iterable[Sequence], K: int) -> "Environment":
        raw = tuple((str(x), int(y), float(m)) for x, y, m in atoms)
        return validate_environment(cls(name, int(K), raw))

    def input_atoms(self) -> list[str]:
        return sorted({x for x, _, _ in self.atoms})

    def input_marginal(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for x, _, m in self.atoms:
            out[x] = out.get(x, 0.0) + m
        return dict(sorted(out.items()))

    def support(self) -> list[str]:
        return [x for x, m in self.input_marginal().items() if m > 0.0]

    def label_marginal(self) -> tuple[float, ...]:
        acc = [[] for _ in range(self.K)]
        for _, y, m in self.atoms:
            acc[y].append(m)
        return tuple(math.fsum(a) for a in acc)

    def renamed(self, name: str) -> "Environment":
        return Environment(name, self.K, self.atoms)


def validate_environment(env: Environment) -> Environment:
    """Check masses and labels, reject duplicates, renormalize to total 1."""
    if env.K < 2:
        raise InvalidDistribution(f"environment {env.name!r}: K must be >= 2, got {env.K}")
    seen = set()
    for x, y, m in env.atoms:
        if not 0 <= y < env.K:
            raise InvalidDistribution(f"environment {env.name!r}: label {y} outside [0, {env.K})")
        if m < 0 or math.isnan(m):
            raise NegativeMass(f"environment {env.name!r}: atom ({x!r}, {y}) has mass {m}")
        if (x, y) in seen:
            raise DuplicateAtom(f"environment {env.name!r}: duplicate atom ({x!r}, {y})")
        seen.add((x, y))
    total = math.fsum(m for _, _, m in env.atoms)
    if abs(total - 1.0) > MASS_TOL:
        raise MassSumOutOfTolerance(
            f"environment {env.name!r}: total mass {total!r} is more than {MASS_TOL} from 1"
        )
    # leave already-normalized masses untouched so reloading a saved file is lossless
    scale = total if abs(total - 1.0) > 8 * sys.float_info.epsilon else 1.0
    atoms = tuple(sorted((x, y, m / scale) for x, y, m in env.atoms))
    return Environment(env.name, env.K, atoms)


@dataclass(frozen=True, eq=False)
class Representation:
    """Deterministic map from input atom id to representation atom id."""

    name: str
    mapping: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "mapping", MappingProxyType(dict(self.mapping)))

    def __call__(self, x: str) -> str:
        try:
            return self.mapping[x]
        except KeyError:
            raise UnmappedAtom(f"representation {self.name!r} has no image for input atom {x!r}") from None

    def image(self) -> list[str]:
        return sorted(set(self.mapping.values()))

    def relabeled(self, bijection: Mapping[str, str], name: str | None = None) -> "Representation":
        return Representation(name or self.name, {x: bijection[r] for x, r in self.mapping.items()})


def identity_representation(atoms: Iterable[str], name: str = "identity") -> Representation:
    return Representation(name, {a: a for a in atoms})


def _check_vector(vec: Sequence[float], K: int, what: str) -> tuple[float, ...]:
    vec = tuple(float(v) for v in vec)
    if len(vec) != K:
        raise InvalidDistribution(f"{what}: expected {K} probabilities, got {len(vec)}")
    if any(v < 0 or math.isnan(v) for v in vec):
        raise InvalidDistribution(f"{what}: negative entry in {vec}")
    if abs(math.fsum(vec) - 1.0) > DIST_TOL:
        raise InvalidDistribution(f"{what}: entries sum to {math.fsum(vec)!r}")
    return vec


@dataclass(frozen=True, eq=False)
class Predictor:
    """Map from representation atom to a probability vector over labels."""

    name: str
    K: int
    outputs: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        checked = {
            str(r): _check_vector(v, self.K, f"predictor {self.name!r} at {r!r}")
            for r, v in self.outputs.items()
        }
        object.__setattr__(self, "outputs", MappingProxyType(dict(sorted(checked.items()))))

    def __call__(self, r: str) -> tuple[float, ...]:
        return self.outputs[r]

    def covers(self, atoms: Iterable[str]) -> bool:
        return all(a in self.outputs for a in atoms)

    def is_deterministic(self) -> bool:
        return all(max(v) == 1.0 for v in self.outputs.values())

    @classmethod
    def from_labels(cls, name: str, K: int, labels: Mapping[str, int]) -> "Predictor":
        return cls(name, K, {r: point_mass(y, K) for r, y in labels.items()})


def point_mass(y: int, K: int) -> tuple[float, ...]:
    return tuple(1.0 if i == y else 0.0 for i in range(K))


def uniform(K: int) -> tuple[float, ...]:
    return tuple(1.0 / K for _ in range(K))


@dataclass(frozen=True, eq=False)
class SingularExtension:
    """Label distribution assigned to representation atoms an environment never produces.

    ``mode`` is ``"uniform"``, ``"source-marginal"`` (the environment's own
    label marginal) or ``"custom"`` (explicit vectors per atom).
    """

    mode: str = "uniform"
    custom: Mapping[str, tuple[float, ...]] | None = field(default=None)

    MODES = ("uniform", "source-marginal", "custom")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ValueError(f"unknown extension mode {self.mode!r}")
        if self.mode == "custom":
            if self.custom is None:
                raise ValueError("custom extension needs a vector table")
            object.__setattr__(
                self, "custom",
                MappingProxyType({str(r): tuple(float(p) for p in v) for r, v in sorted(self.custom.items())}),
            )

    def vector(self, env: Environment, gamma: str) -> tuple[float, ...]:
        if self.mode == "uniform":
            return uniform(env.K)
        if self.mode == "source-marginal":
            return env.label_marginal()
        try:
            vec = self.custom[gamma]
        except KeyError:
            raise UnmappedAtom(f"custom extension has no vector for representation atom {gamma!r}") from None
        return _check_vector(vec, env.K, f"custom extension at {gamma!r}")

    def describe(self) -> str:
        return self.mode


UNIFORM = SingularExtension("uniform")


# -- measures on representation atoms ---------------------------------------

@lru_cache(maxsize=8192)
def _rep_joint(env: Environment, rep: Representation) -> Mapping[str, tuple[float, ...]]:
    acc: dict[str, list[list[float]]] = {}
    for x, y, m in env.atoms:
        cells = acc.setdefault(rep(x), [[] for _ in range(env.K)])
        cells[y].append(m)
    return MappingProxyType({g: tuple(math.fsum(c) for c in cells) for g, cells in sorted(acc.items())})


def rep_joint(env: Environment, rep: Representation) -> Mapping[str, tuple[float, ...]]:
    """Joint masses ``gamma -> (P(gamma, y=0), ..., P(gamma, y=K-1))``."""
    return _rep_joint(env, rep)


def pushforward(env: Environment, rep: Representation) -> ReprDistribution:
    """Distribution of the representation atom under ``env``."""
    return {g: math.fsum(row) for g, row in rep_joint(env, rep).items()}


def support(mu: Mapping[str, float]) -> list[str]:
    return [g for g, m in mu.items() if m > 0.0]


def conditional_label(
    env: Environment, rep: Representation, gamma: str, ext: SingularExtension = UNIFORM
) -> tuple[float, ...]:
    """Label distribution given ``rep(X) == gamma``; extension off the support."""
    row = rep_joint(env, rep).get(gamma)
    if row is not None:
        total = math.fsum(row)
        if total > 0.0:
            return tuple(v / total for v in row)
    return ext.vector(env, gamma)


def tv_distance(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = sorted(set(p) | set(q))
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
