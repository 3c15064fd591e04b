"""Hypothesis-class divergence bounds and their link to the exact decomposition.

Hypotheses are composites ``predictor . representation``.  Risks of every
hypothesis are computed once per environment and the pairwise divergence
sup runs in :mod:`dashift.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .decomposition import decompose
from .errors import ClassTooLarge, IndeterminateInfinity, LossUnsupported, ValidationError
from .measure import (
    UNIFORM,
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    ext_add,
    get_log_base,
    pushforward,
    tv_distance,
)
from .multisource import SLACK_TOL, FlaggedValue, SourceSet, _slack
from .risk import CE, Loss, bayes_predictor, risk

MAX_PAIRS = 10**6


@dataclass(frozen=True)
class Composite:
    predictor: Predictor
    representation: Representation

    @property
    def name(self) -> str:
        return f"{self.predictor.name}@{self.representation.name}"

    def risk(self, env: Environment, loss: Loss = CE) -> float:
        return risk(env, self.predictor, self.representation, loss)


@dataclass
class FinitePredictorSet:
    hypotheses: list
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.hypotheses:
            raise ValidationError("a predictor set needs at least one hypothesis")
        n = len(self.hypotheses)
        if n * n > MAX_PAIRS:
            raise ClassTooLarge(f"{n}^2 ordered pairs exceeds {MAX_PAIRS}")

    def __len__(self):
        return len(self.hypotheses)

    def risks(self, env: Environment, loss: Loss = CE) -> np.ndarray:
        loss = Loss.parse(loss)
        key = (env, loss, get_log_base())
        cached = self._cache.get(key)
        if cached is None:
            cached = np.array([h.risk(env, loss) for h in self.hypotheses], dtype=np.float64)
            cached.setflags(write=False)
            self._cache[key] = cached
        return cached


def risk_diff(env: Environment, h: Composite, h2: Composite, loss: Loss = CE) -> float:
    a, b = h.risk(env, loss), h2.risk(env, loss)
    if a == math.inf and b == math.inf:
        if h is h2:
            return 0.0
        raise IndeterminateInfinity(f"both {h.name} and {h2.name} have infinite risk on {env.name}")
    return abs(a - b)


def hdh_divergence(
    e: Environment, e2: Environment, hset: FinitePredictorSet, loss: Loss = CE
) -> FlaggedValue:
    """Twice the largest change in a pairwise risk gap between ``e`` and ``e2``."""
    loss = Loss.parse(loss)
    value, skipped = kernels.hdh_sup(hset.risks(e, loss), hset.risks(e2, loss))
    return FlaggedValue(2.0 * float(value), ("pair",) * int(skipped))


def _min_sum(a: np.ndarray, b: np.ndarray) -> float:
    with np.errstate(invalid="ignore"):
        return float(np.min(a + b))


@dataclass
class DivergenceBoundReport:
    hypothesis: str
    loss: str
    ideal_joint: float
    hypothesis_risk: float
    hdh: float
    rhs: float
    lhs: float
    slack: float
    flags: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def single_source_div_bound(
    s: Environment, t: Environment, h: Composite, hset: FinitePredictorSet, loss: Loss = CE
) -> DivergenceBoundReport:
    loss = Loss.parse(loss)
    rs, rt = hset.risks(s, loss), hset.risks(t, loss)
    ideal = _min_sum(rs, rt)
    hdh = hdh_divergence(s, t, hset, loss)
    lhs = h.risk(t, loss)
    hr = h.risk(s, loss)
    rhs = ext_add(ideal, hr, hdh.value)
    report = DivergenceBoundReport(h.name, loss.value, ideal, hr, hdh.value, rhs, lhs, _slack(rhs, lhs))
    if hdh.skipped:
        report.flags.append(f"{len(hdh.skipped)} hypothesis pairs skipped as inf - inf")
    return report


def h_misalignment(sset: SourceSet, hset: FinitePredictorSet, loss: Loss = CE) -> FlaggedValue:
    best, skipped = math.inf, []
    for e in sset.environments:
        d = hdh_divergence(sset.target, e, hset, loss)
        best = min(best, 0.5 * d.value)
        skipped.extend(f"{e.name}:{s}" for s in d.skipped)
    return FlaggedValue(best, tuple(skipped))


@dataclass
class MultiDivergenceReport:
    hypothesis: str
    loss: str
    ideal_joint: float
    source_sup: float
    misalignment: float
    rhs: float
    lhs: float
    slack: float
    flags: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def multisource_div_bound(
    sset: SourceSet, h: Composite, hset: FinitePredictorSet, loss: Loss = CE
) -> MultiDivergenceReport:
    loss = Loss.parse(loss)
    rt = hset.risks(sset.target, loss)
    worst = np.max(np.vstack([hset.risks(e, loss) for e in sset.environments]), axis=0)
    ideal = _min_sum(rt, worst)
    source_sup = max(h.risk(e, loss) for e in sset.environments)
    mis = h_misalignment(sset, hset, loss)
    lhs = h.risk(sset.target, loss)
    rhs = ext_add(ideal, source_sup, mis.value)
    report = MultiDivergenceReport(h.name, loss.value, ideal, source_sup, mis.value, rhs, lhs, _slack(rhs, lhs))
    if mis.skipped:
        report.flags.append(f"{len(mis.skipped)} hypothesis pairs skipped as inf - inf")
    return report


@dataclass
class ConnectReport:
    representation: str
    extension: str
    lhs: float
    source_risk: float
    kl_st: float
    kl_ts: float
    bayes_div: float
    cov_shift: float
    rhs: float
    slack: float
    exact_rhs: float
    looseness: float

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def connect_bound(
    s: Environment, t: Environment, rep: Representation, ext: SingularExtension = UNIFORM, loss: Loss = CE
) -> ConnectReport:
    """Divergence-style bound on ``R_t(f_s . phi)`` through both KL directions."""
    if Loss.parse(loss) is not CE:
        raise LossUnsupported("the bridge bound is stated for cross-entropy")
    fwd = decompose(s, t, rep, ext)
    back = decompose(t, s, rep, ext)
    lhs = risk(t, bayes_predictor(s, rep, CE, ext), rep, CE)
    rhs = ext_add(3.0 * fwd.source_risk, max(fwd.kl_term, back.kl_term), fwd.bayes_div_term, fwd.cov_shift_term)
    exact = fwd.rhs()
    looseness = math.inf if rhs == math.inf and exact < math.inf else (
        0.0 if rhs == math.inf else rhs - exact)
    return ConnectReport(
        representation=rep.name, extension=ext.describe(), lhs=lhs, source_risk=fwd.source_risk,
        kl_st=fwd.kl_term, kl_ts=back.kl_term, bayes_div=fwd.bayes_div_term, cov_shift=fwd.cov_shift_term,
        rhs=rhs, slack=_slack(rhs, lhs), exact_rhs=exact, looseness=looseness,
    )


@dataclass
class DannTerms:
    rows: list  # dicts: hypothesis, representation, source_risk, target_risk, d_tv
    lambda_star: float
    distance: str = "total variation of representation pushforwards"


def dann_terms(s: Environment, t: Environment, hset: FinitePredictorSet, loss: Loss = CE) -> DannTerms:
    """Source risk, representation distance and ideal joint risk per hypothesis."""
    loss = Loss.parse(loss)
    rows = []
    for h in hset.hypotheses:
        rows.append({
            "hypothesis": h.name,
            "representation": h.representation.name,
            "source_risk": h.risk(s, loss),
            "target_risk": h.risk(t, loss),
            "d_tv": tv_distance(pushforward(s, h.representation), pushforward(t, h.representation)),
        })
    lam = min(ext_add(r["source_risk"], r["target_risk"]) for r in rows)
    return DannTerms(rows, lam)


def composites_from(predictors: Sequence[Predictor], reps: Sequence[Representation],
                    envs: Sequence[Environment]) -> FinitePredictorSet:
    """Every (predictor, representation) pair where the predictor covers the image."""
    from .invariance import HypothesisClass

    hclass = HypothesisClass(list(predictors), list(reps))
    return FinitePredictorSet([Composite(h, r) for h, r in hclass.admissible_pairs(envs)])
