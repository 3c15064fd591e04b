"""Conditional invariance across environments and exhaustive IRM over finite classes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ClassTooLarge, LossUnsupported, NoECIRep, ValidationError
from .measure import (
    UNIFORM,
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    conditional_label,
    pushforward,
    support,
)
from .risk import CE, Loss, argmax, batch_risks, risk

ECI_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
MAX_PAIRS = 10**6


@dataclass
class ECIReport:
    representation: str
    tol: float
    holds: bool
    max_gap: float
    violations: list = field(default_factory=list)  # (env, env', atom, label, gap)


def check_eci(envs: Sequence[Environment], rep: Representation, tol: float = ECI_TOL) -> ECIReport:
    """Compare conditional label laws on every shared representation atom."""
    if len(envs) < 2:
        raise ValidationError("ECI needs at least two environments")
    supports = [set(support(pushforward(e, rep))) for e in envs]
    max_gap = 0.0
    violations = []
    for i, j in itertools.combinations(range(len(envs)), 2):
        for g in sorted(supports[i] & supports[j]):
            a = conditional_label(envs[i], rep, g)
            b = conditional_label(envs[j], rep, g)
            for y, (pa, pb) in enumerate(zip(a, b)):
                gap = abs(pa - pb)
                max_gap = max(max_gap, gap)
                if gap > tol:
                    violations.append((envs[i].name, envs[j].name, g, y, gap))
    return ECIReport(rep.name, tol, max_gap <= tol, max_gap, violations)


@dataclass
class HypothesisClass:
    predictors: list
    representations: list

    def __post_init__(self):
        if not self.predictors or not self.representations:
            raise ValidationError("hypothesis class needs predictors and representations")

    def admissible_pairs(self, envs: Sequence[Environment]):
        """``(predictor, representation)`` pairs where the predictor covers the image."""
        for rep in self.representations:
            atoms = set()
            for e in envs:
                atoms.update(support(pushforward(e, rep)))
            for h in self.predictors:
                if h.covers(atoms):
                    yield h, rep


@dataclass
class IRMOptimum:
    predictor: Predictor
    representation: Representation
    per_env: dict
    total: float


@dataclass
class IRMSolution:
    loss: str
    optima: list
    feasible_count: int
    admissible_count: int

    @property
    def feasible(self) -> bool:
        return bool(self.optima)


def irm_solve(envs: Sequence[Environment], hclass: HypothesisClass, loss: Loss = CE) -> IRMSolution:
    """Enumerate pairs that are simultaneously optimal in every environment and minimise total risk."""
    loss = Loss.parse(loss)
    if len(hclass.predictors) * len(hclass.representations) > MAX_PAIRS:
        raise ClassTooLarge(
            f"{len(hclass.predictors)} x {len(hclass.representations)} pairs exceeds {MAX_PAIRS}"
        )
    candidates = []
    admissible = 0
    for rep in hclass.representations:
        atoms = set()
        for e in envs:
            atoms.update(support(pushforward(e, rep)))
        preds = [h for h in hclass.predictors if h.covers(atoms)]
        if not preds:
            continue
        admissible += len(preds)
        table = np.vstack([batch_risks(e, rep, preds, loss) for e in envs])  # envs x preds
        best = table.min(axis=1)
        with np.errstate(invalid="ignore"):
            ok = np.all((table <= best[:, None] + FEASIBILITY_TOL) | (table == best[:, None]), axis=0)
        for k in np.flatnonzero(ok):
            per_env = {e.name: float(table[i, k]) for i, e in enumerate(envs)}
            total = math.inf if math.inf in per_env.values() else math.fsum(per_env.values())
            candidates.append(IRMOptimum(preds[k], rep, per_env, total))
    if not candidates:
        return IRMSolution(loss.value, [], 0, admissible)
    floor = min(c.total for c in candidates)
    optima = [c for c in candidates if c.total == floor or c.total <= floor + FEASIBILITY_TOL]
    return IRMSolution(loss.value, optima, len(candidates), admissible)


def composite(h: Predictor, rep: Representation, inputs: Sequence[str]) -> dict:
    return {x: h(rep(x)) for x in inputs}


def same_composite(a: dict, b: dict, loss: Loss, tol: float = 1e-9) -> bool:
    if a.keys() != b.keys():
        return False
    if loss is CE:
        return all(all(abs(p - q) <= tol for p, q in zip(a[x], b[x])) for x in a)
    return all(argmax(a[x]) == argmax(b[x]) for x in a)


def universal_predictor(
    envs: Sequence[Environment], rep: Representation, ext: SingularExtension = UNIFORM
) -> Predictor:
    """Conditional label law shared by conditionally invariant environments.

    Each atom takes its law from the first environment that charges it;
    atoms no environment charges use ``ext`` relative to the first environment.
    """
    outputs = {}
    for g in rep.image():
        for e in envs:
            if pushforward(e, rep).get(g, 0.0) > 0.0:
                outputs[g] = conditional_label(e, rep, g)
                break
        else:
            outputs[g] = ext.vector(envs[0], g)
    return Predictor(f"f[{rep.name}]", envs[0].K, outputs)


@dataclass
class ERMECISolution:
    representation: Representation
    predictor: Predictor
    total: float
    per_env: dict
    candidates: list  # (rep name, passes ECI, total or None)


def erm_eci_solve(
    envs: Sequence[Environment],
    reps: Sequence[Representation],
    ext: SingularExtension = UNIFORM,
    loss: Loss = CE,
    tol: float = ECI_TOL,
) -> ERMECISolution:
    """Minimise summed source risk of the universal Bayes predictor over ECI representations."""
    if Loss.parse(loss) is not CE:
        raise LossUnsupported("ERM-ECI is well defined only for a loss with the Bayesian optimality property")
    best = None
    log_rows = []
    for rep in reps:
        passes = len(envs) < 2 or check_eci(envs, rep, tol).holds
        if not passes:
            log_rows.append((rep.name, False, None))
            continue
        f = universal_predictor(envs, rep, ext)
        per_env = {e.name: risk(e, f, rep, CE) for e in envs}
        total = math.inf if math.inf in per_env.values() else math.fsum(per_env.values())
        log_rows.append((rep.name, True, total))
        if best is None or total < best.total - 1e-12:
            best = ERMECISolution(rep, f, total, per_env, [])
    if best is None:
        raise NoECIRep("no representation is conditionally invariant across the environments")
    best.candidates = log_rows
    return best


@dataclass
class EquivalenceReport:
    a2_satisfied: bool
    a2_missing: list
    ce_equivalent: bool | None
    ce_irm_optima: int
    erm_eci_representation: str | None
    zero_one_optima: int
    zero_one_eci_violations: list  # (rep name, max_gap) of 0-1 optima failing ECI
    inequivalence_witnessed: bool
    notes: list = field(default_factory=list)


def check_a2(
    envs: Sequence[Environment], hclass: HypothesisClass, tol: float = 1e-9
) -> list:
    """Missing ``(representation, environment)`` conditionals, empty when A2 holds."""
    missing = []
    for rep in hclass.representations:
        for e in envs:
            atoms = support(pushforward(e, rep))
            cond = {g: conditional_label(e, rep, g) for g in atoms}
            found = any(
                h.covers(atoms) and all(all(abs(p - q) <= tol for p, q in zip(h(g), cond[g])) for g in atoms)
                for h in hclass.predictors
            )
            if not found:
                missing.append((rep.name, e.name))
    return missing


def irm_eci_equivalence_report(
    envs: Sequence[Environment],
    hclass: HypothesisClass,
    ext: SingularExtension = UNIFORM,
    a2_envs: Sequence[Environment] | None = None,
    tol: float = ECI_TOL,
) -> EquivalenceReport:
    """Compare IRM with ERM-ECI under cross-entropy and look for an ECI-violating 0-1 optimum."""
    inputs = sorted({x for e in envs for x in e.support()})
    missing = check_a2(list(a2_envs) if a2_envs is not None else envs, hclass)
    notes = []

    ce_equivalent = None
    ce_sol = irm_solve(envs, hclass, CE)
    erm_rep = None
    if missing:
        notes.append(f"A2 unsatisfied for {missing}; cross-entropy equivalence not asserted")
    else:
        try:
            erm = erm_eci_solve(envs, hclass.representations, ext, CE, tol)
            erm_rep = erm.representation.name
            target = composite(erm.predictor, erm.representation, inputs)
            ce_equivalent = bool(ce_sol.optima) and all(
                same_composite(composite(o.predictor, o.representation, inputs), target, CE)
                for o in ce_sol.optima
            )
        except NoECIRep:
            ce_equivalent = not ce_sol.optima
            notes.append("no ECI representation; IRM is infeasible iff equivalence holds")

    zo = irm_solve(envs, hclass, Loss.ZERO_ONE)
    violations = []
    for o in zo.optima:
        r = check_eci(envs, o.representation, tol) if len(envs) > 1 else None
        if r is not None and not r.holds:
            violations.append((o.representation.name, r.max_gap))
    return EquivalenceReport(
        a2_satisfied=not missing, a2_missing=missing, ce_equivalent=ce_equivalent,
        ce_irm_optima=len(ce_sol.optima), erm_eci_representation=erm_rep,
        zero_one_optima=len(zo.optima), zero_one_eci_violations=violations,
        inequivalence_witnessed=bool(violations), notes=notes,
    )
