"""Upper bounds on representation covariate shift via source fairness.

Point fairness ``rho`` is the worst conditional-label entropy of the source
over the analysed representation atoms; group fairness ``rho_B`` does the
same for the label law conditioned on a whole group of atoms.  The atomwise
shift ``mu`` equals the group-level shift ``mu_B`` only when the source
conditionals are constant inside every group, so both are reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .decomposition import lebesgue_split
from .errors import SupportViolation, ValidationError
from .measure import (
    UNIFORM,
    Environment,
    Representation,
    SingularExtension,
    conditional_label,
    log,
    pushforward,
    rep_joint,
    support,
    tv_distance,
)
from .risk import entropy

BOUND_TOL = 1e-12
CONSTANT_TOL = 1e-9


@dataclass(frozen=True)
class GroupPartition:
    groups: tuple[frozenset, ...]

    @classmethod
    def of(cls, groups: Iterable[Iterable[str]]) -> "GroupPartition":
        parts = tuple(frozenset(str(a) for a in g) for g in groups)
        seen: set = set()
        for g in parts:
            if seen & g:
                raise ValidationError(f"groups overlap on {sorted(seen & g)}")
            seen |= g
        return cls(parts)

    @classmethod
    def singletons(cls, atoms: Iterable[str]) -> "GroupPartition":
        return cls.of([a] for a in sorted(atoms))

    def atoms(self) -> set:
        return set().union(*self.groups) if self.groups else set()

    def check_covers(self, atoms: Iterable[str]) -> None:
        missing = sorted(set(atoms) - self.atoms())
        if missing:
            raise ValidationError(f"partition does not cover representation atoms {missing}")


def source_fairness(
    source: Environment,
    rep: Representation,
    ext: SingularExtension = UNIFORM,
    domain: Iterable[str] | None = None,
) -> float:
    """Largest source conditional-label entropy over ``domain`` (default: the source support)."""
    atoms = sorted(domain) if domain is not None else support(pushforward(source, rep))
    return max((entropy(conditional_label(source, rep, g, ext)) for g in atoms), default=0.0)


def _group_label_law(joint, group: Sequence[str], K: int) -> tuple[float, ...] | None:
    cells = [math.fsum(joint[g][y] for g in group if g in joint) for y in range(K)]
    total = math.fsum(cells)
    if total <= 0.0:
        return None
    return tuple(c / total for c in cells)


def group_quantities(
    source: Environment,
    target: Environment,
    rep: Representation,
    partition: GroupPartition,
    ext: SingularExtension = UNIFORM,
    certify: bool = False,
) -> tuple[float, float, float]:
    """Return ``(rho_group, d_group, mu_group)`` for ``partition``."""
    mu_s = pushforward(source, rep)
    mu_t = pushforward(target, rep)
    partition.check_covers(support(mu_s) + support(mu_t))
    if certify:
        singular = lebesgue_split(mu_s, mu_t).singular_mass
        if singular > BOUND_TOL:
            raise SupportViolation(f"target puts mass {singular:.3g} outside the source support")
    joint = rep_joint(source, rep)
    rho_group = 0.0
    mu_terms, d_terms = [], []
    for group in partition.groups:
        members = sorted(group)
        ps = math.fsum(mu_s.get(g, 0.0) for g in members)
        pt = math.fsum(mu_t.get(g, 0.0) for g in members)
        d_terms.append(abs(pt - ps))
        law = _group_label_law(joint, members, source.K)
        if law is None:
            continue
        h = entropy(law)
        rho_group = max(rho_group, h)
        mu_terms.append((pt - ps) * h)
    return rho_group, 0.5 * math.fsum(d_terms), math.fsum(mu_terms)


@dataclass
class FairnessReport:
    rho: float
    rho_group: float
    d_tv: float
    d_group: float
    mu: float
    mu_group: float
    log_k: float
    within_group_constant: bool
    mu_equals_mu_group: bool
    bound_chain: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        """All links that are theorems for this instance hold."""
        required = {"mu <= rho * d_tv", "mu_group <= rho_group * d_group", "rho * d_tv <= log K * d_tv"}
        if self.within_group_constant:
            required.add("mu <= rho_group * d_group")
        return all(ok for name, _, ok in self.bound_chain if name in required)


def _within_group_constant(source, rep, partition, tol=CONSTANT_TOL) -> bool:
    mu_s = pushforward(source, rep)
    for group in partition.groups:
        laws = [conditional_label(source, rep, g) for g in sorted(group) if mu_s.get(g, 0.0) > 0.0]
        for law in laws[1:]:
            if any(abs(a - b) > tol for a, b in zip(law, laws[0])):
                return False
    return True


def fairness_bounds(
    source: Environment,
    target: Environment,
    rep: Representation,
    partition: GroupPartition | None = None,
    ext: SingularExtension = UNIFORM,
) -> FairnessReport:
    """Evaluate the point and group fairness bounds on covariate shift.

    The group-level chain needs the target supported on the source; with
    singular mass only the point bound is evaluated and the group rows are
    marked unsatisfied.
    """
    mu_s = pushforward(source, rep)
    mu_t = pushforward(target, rep)
    domain = sorted(set(support(mu_s)) | set(support(mu_t)))
    if partition is None:
        partition = GroupPartition.singletons(domain)
    h_s = {g: entropy(conditional_label(source, rep, g, ext)) for g in domain}
    rho = max(h_s.values(), default=0.0)
    d_tv = tv_distance(mu_s, mu_t)
    mu = math.fsum(h_s[g] * (mu_t.get(g, 0.0) - mu_s.get(g, 0.0)) for g in domain)
    rho_group, d_group, mu_group = group_quantities(source, target, rep, partition, ext)
    singular = lebesgue_split(mu_s, mu_t).singular_mass > BOUND_TOL
    constant = not singular and _within_group_constant(source, rep, partition)
    log_k = log(source.K)

    chain = [
        ("mu <= rho * d_tv", (mu, rho * d_tv), mu <= rho * d_tv + BOUND_TOL),
        ("mu_group <= rho_group * d_group", (mu_group, rho_group * d_group),
         not singular and mu_group <= rho_group * d_group + BOUND_TOL),
        ("rho_group * d_group <= rho * d_tv", (rho_group * d_group, rho * d_tv),
         not singular and rho_group * d_group <= rho * d_tv + BOUND_TOL),
        ("rho * d_tv <= log K * d_tv", (rho * d_tv, log_k * d_tv), rho * d_tv <= log_k * d_tv + BOUND_TOL),
        ("mu <= rho_group * d_group", (mu, rho_group * d_group),
         not singular and mu <= rho_group * d_group + BOUND_TOL),
    ]
    return FairnessReport(
        rho=rho, rho_group=rho_group, d_tv=d_tv, d_group=d_group, mu=mu, mu_group=mu_group,
        log_k=log_k, within_group_constant=constant,
        mu_equals_mu_group=abs(mu - mu_group) <= CONSTANT_TOL,
        bound_chain=chain,
    )
