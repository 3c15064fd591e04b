"""Predictor adaptation gaps and the multi-source risk bound."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .decomposition import decompose
from .errors import IndeterminateInfinity, LossUnsupported, NotECI, ValidationError
from .measure import (
    UNIFORM,
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    conditional_label,
    ext_add,
    pushforward,
)
from .risk import CE, Loss, bayes_predictor, bayes_risk_of, risk

SLACK_TOL = 1e-9


class FlaggedValue(NamedTuple):
    """A sup/inf whose ``inf - inf`` terms were skipped (names in ``skipped``)."""

    value: float
    skipped: tuple = ()

    @property
    def indeterminate(self) -> bool:
        return bool(self.skipped)


@dataclass(frozen=True)
class SourceSet:
    environments: tuple[Environment, ...]
    target: Environment

    def __post_init__(self):
        if not self.environments:
            raise ValidationError("a source set needs at least one source environment")
        names = [e.name for e in self.environments]
        if len(set(names)) != len(names):
            raise ValidationError(f"source names are not unique: {names}")
        ks = {e.K for e in self.environments} | {self.target.K}
        if len(ks) != 1:
            raise ValidationError(f"environments disagree on the label count: {sorted(ks)}")

    @property
    def K(self) -> int:
        return self.target.K


def _diff_sup(pairs) -> FlaggedValue:
    best = -math.inf
    skipped = []
    for name, a, b in pairs:
        if a == math.inf and b == math.inf:
            skipped.append(name)
            continue
        d = math.inf if a == math.inf else (-math.inf if b == math.inf else a - b)
        best = max(best, d)
    if best == -math.inf and skipped:
        raise IndeterminateInfinity(f"every term of the supremum is inf - inf ({skipped})")
    return FlaggedValue(best, tuple(skipped))


def predictor_gap_pair(
    e1: Environment,
    e2: Environment,
    sources: Sequence[Environment],
    rep: Representation,
    loss: Loss = CE,
    ext: SingularExtension = UNIFORM,
) -> FlaggedValue:
    """``sup_e [R_e1(f_e . phi) - R_e2(f_e . phi)]`` over the source Bayes predictors."""
    loss = Loss.parse(loss)
    terms = []
    for e in sources:
        f = bayes_predictor(e, rep, loss, ext)
        terms.append((e.name, risk(e1, f, rep, loss), risk(e2, f, rep, loss)))
    return _diff_sup(terms)


def predictor_gap_target(
    sset: SourceSet, rep: Representation, loss: Loss = CE, ext: SingularExtension = UNIFORM
) -> FlaggedValue:
    """Infimum over sources ``e'`` of the gap between the target and ``e'``."""
    best, skipped = math.inf, []
    for e_prime in sset.environments:
        g = predictor_gap_pair(sset.target, e_prime, sset.environments, rep, loss, ext)
        best = min(best, g.value)
        skipped.extend(f"{e_prime.name}:{s}" for s in g.skipped)
    return FlaggedValue(best, tuple(skipped))


def class_gap(
    sset: SourceSet, reps: Sequence[Representation], loss: Loss = CE, ext: SingularExtension = UNIFORM
) -> FlaggedValue:
    if not reps:
        raise ValidationError("class_gap needs at least one representation")
    best, skipped = -math.inf, []
    for rep in reps:
        g = predictor_gap_target(sset, rep, loss, ext)
        best = max(best, g.value)
        skipped.extend(f"{rep.name}:{s}" for s in g.skipped)
    return FlaggedValue(best, tuple(skipped))


def _slack(rhs: float, lhs: float) -> float:
    if rhs == math.inf:
        return math.inf
    if lhs == math.inf:
        return -math.inf
    return rhs - lhs


@dataclass
class MultiSourceReport:
    representation: str
    extension: str
    lhs: float
    source_sup: float
    pairwise_sup: float
    gap: float
    rhs: float
    slack: float
    pairwise: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def theorem2_report(
    sset: SourceSet, rep: Representation, ext: SingularExtension = UNIFORM, loss: Loss = CE
) -> MultiSourceReport:
    """Evaluate every term of the multi-source bound for ``rep`` (cross-entropy)."""
    if Loss.parse(loss) is not CE:
        raise LossUnsupported("the multi-source bound uses cross-entropy pairwise terms")
    preds = {e.name: bayes_predictor(e, rep, CE, ext) for e in sset.environments}
    lhs = max(risk(sset.target, preds[e.name], rep, CE) for e in sset.environments)
    source_sup = max(risk(e, preds[e.name], rep, CE) for e in sset.environments)
    pairwise = {}
    for e in sset.environments:
        for e2 in sset.environments:
            rep_ = decompose(e, e2, rep, ext)
            pairwise[(e.name, e2.name)] = {
                "bayes_div": rep_.bayes_div_term,
                "kl": rep_.kl_term,
                "cov_shift": rep_.cov_shift_term,
                "total": ext_add(rep_.bayes_div_term, rep_.kl_term, rep_.cov_shift_term),
            }
    pairwise_sup = max(v["total"] for v in pairwise.values())
    gap = predictor_gap_target(sset, rep, CE, ext)
    rhs = ext_add(source_sup, pairwise_sup, gap.value)
    report = MultiSourceReport(
        representation=rep.name, extension=ext.describe(), lhs=lhs, source_sup=source_sup,
        pairwise_sup=pairwise_sup, gap=gap.value, rhs=rhs, slack=_slack(rhs, lhs), pairwise=pairwise,
    )
    if gap.skipped:
        report.flags.append(f"indeterminate gap terms skipped: {list(gap.skipped)}")
    return report


def covariate_shift(
    e1: Environment, e2: Environment, rep: Representation, loss: Loss = CE, ext: SingularExtension = UNIFORM
) -> float:
    """Shift of ``e1``'s per-atom Bayes risk from ``e1``'s to ``e2``'s representation law.

    Under cross-entropy the per-atom Bayes risk is the conditional entropy and
    this is the usual covariate-shift term.
    """
    loss = Loss.parse(loss)
    mu1 = pushforward(e1, rep)
    mu2 = pushforward(e2, rep)
    atoms = sorted(set(mu1) | set(mu2))
    return math.fsum(
        bayes_risk_of(conditional_label(e1, rep, g, ext), loss) * (mu2.get(g, 0.0) - mu1.get(g, 0.0))
        for g in atoms
    )


@dataclass
class ECIBoundReport:
    predictor: str
    representation: str
    loss: str
    lhs: float
    source_sup: float
    shift_sup: float
    gap: float
    rhs: float
    slack: float
    flags: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


def eci_bound_report(
    sset: SourceSet,
    reps_I: Sequence[Representation],
    chosen: tuple[Predictor, Representation],
    ext: SingularExtension = UNIFORM,
    loss: Loss = CE,
    eci_tol: float = 1e-9,
) -> ECIBoundReport:
    """Bound the target risk of an invariant solution by source risk, source shift and class gap."""
    from .invariance import check_eci

    loss = Loss.parse(loss)
    for rep in reps_I:
        if len(sset.environments) > 1 and not check_eci(sset.environments, rep, eci_tol).holds:
            raise NotECI(f"representation {rep.name!r} is not conditionally invariant on the sources")
    h, phi = chosen
    lhs = risk(sset.target, h, phi, loss)
    source_sup = max(risk(e, h, phi, loss) for e in sset.environments)
    shift_sup = max(covariate_shift(e, e2, phi, loss, ext) for e in sset.environments for e2 in sset.environments)
    gap = class_gap(sset, reps_I, loss, ext)
    rhs = ext_add(source_sup, shift_sup, gap.value)
    report = ECIBoundReport(
        predictor=h.name, representation=phi.name, loss=loss.value, lhs=lhs, source_sup=source_sup,
        shift_sup=shift_sup, gap=gap.value, rhs=rhs, slack=_slack(rhs, lhs),
    )
    if gap.skipped:
        report.flags.append(f"indeterminate gap terms skipped: {list(gap.skipped)}")
    return report
