"""Entropies, divergences, population risks and Bayes-optimal predictors."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import PredictorUndefinedAtom
from .measure import (
    UNIFORM,
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    conditional_label,
    get_log_base,
    log,
    point_mass,
    rep_joint,
    weighted,
)


class Loss(enum.Enum):
    CROSS_ENTROPY = "ce"
    ZERO_ONE = "zero-one"

    @classmethod
    def parse(cls, value: "str | Loss") -> "Loss":
        if isinstance(value, Loss):
            return value
        aliases = {"ce": cls.CROSS_ENTROPY, "cross-entropy": cls.CROSS_ENTROPY,
                   "zero-one": cls.ZERO_ONE, "0-1": cls.ZERO_ONE, "zero_one": cls.ZERO_ONE}
        try:
            return aliases[value.lower()]
        except KeyError:
            raise ValueError(f"unknown loss {value!r}") from None

    def __call__(self, p: Sequence[float], y: int) -> float:
        if self is Loss.CROSS_ENTROPY:
            return math.inf if p[y] <= 0.0 else -log(p[y])
        return 0.0 if argmax(p) == y else 1.0

    @property
    def kernel_kind(self) -> int:
        return kernels.CROSS_ENTROPY if self is Loss.CROSS_ENTROPY else kernels.ZERO_ONE


CE = Loss.CROSS_ENTROPY
ZERO_ONE = Loss.ZERO_ONE


def argmax(p: Sequence[float]) -> int:
    """Index of the largest entry; ties go to the smallest index."""
    best = 0
    for i in range(1, len(p)):
        if p[i] > p[best]:
            best = i
    return best


def entropy(p: Sequence[float]) -> float:
    return math.fsum(-pi * log(pi) for pi in p if pi > 0.0)


def cross_entropy(p: Sequence[float], q: Sequence[float]) -> float:
    """Expected code length ``sum_i q_i log(1/p_i)`` of ``q`` under model ``p``."""
    terms = []
    for pi, qi in zip(p, q):
        if qi == 0.0:
            continue
        if pi == 0.0:
            return math.inf
        terms.append(-qi * log(pi))
    return math.fsum(terms)


def kl(q: Sequence[float], p: Sequence[float]) -> float:
    """``KL(q || p)``; infinite when ``q`` charges a label ``p`` excludes."""
    terms = []
    for qi, pi in zip(q, p):
        if qi == 0.0:
            continue
        if pi == 0.0:
            return math.inf
        terms.append(qi * (log(qi) - log(pi)))
    return max(0.0, math.fsum(terms))


def bayes_risk_of(p: Sequence[float], loss: Loss) -> float:
    """Minimal expected loss at an atom whose label law is ``p``."""
    if loss is CE:
        return entropy(p)
    return 1.0 - max(p)


def risk(
    env: Environment,
    pred: Predictor,
    rep: Representation,
    loss: Loss = CE,
) -> float:
    """Population risk ``E[loss(pred(rep(X)), Y)]`` over ``env``."""
    loss = Loss.parse(loss)
    terms = []
    for gamma, row in rep_joint(env, rep).items():
        if math.fsum(row) == 0.0:
            continue
        try:
            p = pred(gamma)
        except KeyError:
            raise PredictorUndefinedAtom(
                f"predictor {pred.name!r} has no output at representation atom {gamma!r} "
                f"(environment {env.name!r}, representation {rep.name!r})"
            ) from None
        for y, m in enumerate(row):
            terms.append(weighted(m, loss(p, y)))
    if math.inf in terms:
        return math.inf
    return math.fsum(terms)


def bayes_predictor(
    env: Environment,
    rep: Representation,
    loss: Loss = CE,
    ext: SingularExtension = UNIFORM,
) -> Predictor:
    """Risk-minimizing predictor on ``rep``, defined on the whole image of ``rep``.

    Cross-entropy gets the conditional label law; 0-1 loss a point mass at its
    argmax.  Atoms outside the support of ``env`` use ``ext``.
    """
    loss = Loss.parse(loss)
    atoms = sorted(set(rep.image()) | set(rep_joint(env, rep)))
    outputs = {}
    for gamma in atoms:
        cond = conditional_label(env, rep, gamma, ext)
        outputs[gamma] = cond if loss is CE else point_mass(argmax(cond), env.K)
    return Predictor(f"bayes[{env.name},{rep.name},{loss.value}]", env.K, outputs)


def weight_matrix(env: Environment, rep: Representation, atoms: Sequence[str]) -> np.ndarray:
    joint = rep_joint(env, rep)
    zero = (0.0,) * env.K
    return np.array([joint.get(a, zero) for a in atoms], dtype=np.float64).reshape(len(atoms), env.K)


def batch_risks(
    env: Environment,
    rep: Representation,
    preds: Sequence[Predictor],
    loss: Loss = CE,
) -> np.ndarray:
    """Risks of many predictors on one (environment, representation) pair.

    Every predictor must cover the support of ``rep`` under ``env``.
    """
    loss = Loss.parse(loss)
    atoms = [g for g, row in rep_joint(env, rep).items() if math.fsum(row) > 0.0]
    weights = weight_matrix(env, rep, atoms)
    stack = np.empty((len(preds), len(atoms), env.K), dtype=np.float64)
    for i, pred in enumerate(preds):
        for j, gamma in enumerate(atoms):
            try:
                stack[i, j] = pred(gamma)
            except KeyError:
                raise PredictorUndefinedAtom(
                    f"predictor {pred.name!r} has no output at representation atom {gamma!r}"
                ) from None
    out = kernels.expected_losses(weights, stack, loss.kernel_kind)
    if loss is CE and get_log_base() != math.e:
        out = out / math.log(get_log_base())
    return np.asarray(out)


def simplex_grid(K: int, resolution: int) -> list[tuple[float, ...]]:
    """All probability vectors with entries in multiples of ``1/resolution``."""
    out = []
    for cuts in itertools.combinations(range(resolution + K - 1), K - 1):
        parts = []
        prev = -1
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(resolution + K - 2 - prev)
        out.append(tuple(n / resolution for n in parts))
    return out


@dataclass
class OptimalityVerdict:
    holds: bool
    loss: Loss
    resolution: int
    witness: Predictor | None = None
    witness_atom: str | None = None
    witness_risk: float | None = None
    bayes_risk: float | None = None
    conditional: tuple[float, ...] | None = None


def check_bayes_optimality_property(
    loss: Loss,
    env: Environment,
    rep: Representation,
    resolution: int = 16,
    margin: float = 1e-9,
) -> OptimalityVerdict:
    """Search point-mass and grid predictors for a minimizer that is not the conditional.

    Risk is additive over representation atoms, so the search over grid
    predictors (a product of per-atom choices) is exact when done atom by atom.
    """
    loss = Loss.parse(loss)
    K = env.K
    points = [point_mass(y, K) for y in range(K)]
    grid = simplex_grid(K, resolution)
    candidates = points + [g for g in grid if g not in points]
    is_point = [True] * len(points) + [False] * (len(candidates) - len(points))
    stack = np.array(candidates, dtype=np.float64).reshape(len(candidates), 1, K)
    bayes = bayes_predictor(env, rep, loss)
    scale = math.log(get_log_base())
    for gamma, row in rep_joint(env, rep).items():
        if math.fsum(row) == 0.0:
            continue
        weights = np.array([row], dtype=np.float64)
        cand = kernels.expected_losses(weights, stack, loss.kernel_kind)
        if loss is CE:
            cand = cand / scale
        own = kernels.expected_losses(weights, np.array([[bayes(gamma)]]), loss.kernel_kind)[0]
        if loss is CE:
            own /= scale
        cond = conditional_label(env, rep, gamma)
        best = float(np.min(cand))
        idx = int(np.argmin(cand))
        witness = None
        if best < own - margin:
            witness = idx
        else:
            floor = min(best, own)
            for i, value in enumerate(cand):
                if is_point[i] and value <= floor + margin and not _close(candidates[i], cond):
                    witness = i
                    break
        if witness is not None:
            outputs = dict(bayes.outputs)
            outputs[gamma] = candidates[witness]
            return OptimalityVerdict(
                holds=False, loss=loss, resolution=resolution,
                witness=Predictor(f"witness[{gamma}]", K, outputs),
                witness_atom=gamma, witness_risk=float(cand[witness]),
                bayes_risk=float(own), conditional=cond,
            )
    return OptimalityVerdict(holds=True, loss=loss, resolution=resolution)


def _close(a: Sequence[float], b: Sequence[float], tol: float = 1e-9) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(a, b))
