"""Batch property and golden-value suites behind ``dashift verify``.

Each criterion is checked against an oracle that does not share the code
path under test: target risks are recomputed by brute-force sums over
input atoms, and golden values are closed-form fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .decomposition import DECOMP_TOL, SPLIT_TOL, decompose
from .divergence import connect_bound, multisource_div_bound, single_source_div_bound, dann_terms
from .errors import IndeterminateInfinity
from .fairness import GroupPartition, fairness_bounds
from .invariance import check_eci, erm_eci_solve, irm_eci_equivalence_report, irm_solve, composite
from .measure import (
    Environment,
    SingularExtension,
    UNIFORM,
    conditional_label,
    log,
    pushforward,
    support,
)
from .multisource import class_gap, covariate_shift, predictor_gap_target, theorem2_report
from .risk import CE, ZERO_ONE, check_bayes_optimality_property, risk
from .scenarios import gen, random_instance

SUITES = ("thm1", "thm2", "fairness", "hdiv", "irm")
MAX_FAILURES_LISTED = 10


@dataclass
class CriterionResult:
    criterion: int
    title: str
    checks: int = 0
    failures: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, what: str) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(what)
        return ok

    def worst(self, key: str, value: float) -> None:
        if not math.isfinite(value):
            return
        self.metrics[key] = max(self.metrics.get(key, 0.0), value)

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "title": self.title,
            "passed": self.passed,
            "checks": self.checks,
            "failed": len(self.failures),
            "failures": self.failures[:MAX_FAILURES_LISTED],
            "indeterminate": len(self.indeterminate),
            "metrics": dict(sorted(self.metrics.items())),
        }


def parse_seeds(text: str) -> list[int]:
    """``a..b`` (inclusive), ``a,b,c`` or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return [int(s) for s in text.split(",") if s.strip()]


# -- oracles ------------------------------------------------------------------

def direct_target_risk(source: Environment, target: Environment, rep, ext: SingularExtension) -> float:
    """Cross-entropy of the source conditional on the target, summed over input atoms."""
    total = 0.0
    for x, y, m in target.atoms:
        if m <= 0.0:
            continue
        g = rep(x)
        den = sum(mm for xx, _, mm in source.atoms if rep(xx) == g)
        if den > 0.0:
            p = sum(mm for xx, yy, mm in source.atoms if rep(xx) == g and yy == y) / den
        else:
            p = ext.vector(source, g)[y]
        if p <= 0.0:
            return math.inf
        total -= m * log(p)
    return total


def _custom_extension(seed: int, atoms: Iterable[str], K: int) -> SingularExtension:
    rng = np.random.default_rng(10_000 + seed)
    table = {}
    for g in atoms:
        v = rng.random(K) + 0.01
        table[g] = [float(t) for t in v / v.sum()]
    return SingularExtension("custom", table)


def _extensions(seed, spec):
    rep = spec.rep("phi")
    return {
        "uniform": UNIFORM,
        "source-marginal": SingularExtension("source-marginal"),
        "custom": _custom_extension(seed, rep.image(), spec.K),
    }


def _singular(source, target, rep) -> bool:
    mu_s, mu_t = pushforward(source, rep), pushforward(target, rep)
    return any(m > 0.0 and mu_s.get(g, 0.0) == 0.0 for g, m in mu_t.items())


# -- suites -------------------------------------------------------------------

def suite_thm1(seeds) -> list:
    c1 = CriterionResult(1, "decomposition equals target risk on random instances, all extension modes")
    c2 = CriterionResult(2, "covariate shift splits into absolutely continuous and singular parts")
    singular = 0
    for seed in seeds:
        spec = random_instance(seed)
        s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
        singular += _singular(s, t, rep)
        for mode, ext in _extensions(seed, spec).items():
            rep_ = decompose(s, t, rep, ext)
            oracle = direct_target_risk(s, t, rep, ext)
            rhs = rep_.rhs()
            if oracle == math.inf or rhs == math.inf:
                c1.check(oracle == rhs == rep_.target_risk, f"seed {seed} {mode}: oracle {oracle} vs sum {rhs}")
            else:
                err = max(abs(oracle - rhs), abs(oracle - rep_.target_risk))
                c1.worst("max_abs_residual", err)
                c1.check(err <= DECOMP_TOL, f"seed {seed} {mode}: residual {err:.3g}")
            lem = abs(rep_.cov_shift_term - (rep_.abs_cont_term + rep_.sing_term))
            c2.worst("max_abs_residual", lem)
            c2.check(lem <= SPLIT_TOL, f"seed {seed} {mode}: residual {lem:.3g}")
    n = len(seeds)
    c1.metrics["instances"] = n
    c1.metrics["singular_instances"] = singular
    if n >= 100:
        c1.check(singular >= 0.2 * n, f"only {singular}/{n} instances carry singular mass")
    return [c1, c2, _criterion_examples()]


def _criterion_examples() -> CriterionResult:
    c = CriterionResult(9, "quadrant and axis examples")
    q = gen("quadrants_v1")
    s, t = q.env("s"), q.env("t")
    r1 = decompose(s, t, q.rep("phi1"))
    c.check((r1.source_risk, r1.kl_term, r1.bayes_div_term, r1.cov_shift_term, r1.abs_cont_term, r1.sing_term)
            == (0.0, math.inf, 0.0, 0.0, 0.0, 0.0) and r1.target_risk == math.inf,
            f"quadrants_v1 phi1 terms {r1.kl_term}, target {r1.target_risk}")
    r2 = decompose(s, t, q.rep("phi2"))
    vals = (r2.source_risk, r2.kl_term, r2.bayes_div_term, r2.cov_shift_term, r2.abs_cont_term,
            r2.sing_term, r2.target_risk)
    c.check(all(abs(v) <= 1e-12 for v in vals), f"quadrants_v1 phi2 terms {vals}")
    rows = dann_terms(s, t, q.predictor_set("dann"), ZERO_ONE).rows
    c.check(len(rows) == 2 and all(r["source_risk"] == 0.0 and r["d_tv"] == 0.0 for r in rows),
            f"quadrants_v1 DANN rows {rows}")
    c.check(rows[0]["target_risk"] != rows[1]["target_risk"], "composites should differ on the target")

    a = gen("axis_target")
    s, t = a.env("s"), a.env("t")
    r = decompose(s, t, a.rep("phi1"))
    c.check(all(abs(v) <= 1e-12 for v in (r.source_risk, r.kl_term, r.bayes_div_term, r.abs_cont_term)),
            "axis_target phi1 leading terms not zero")
    c.check(abs(r.sing_term - math.log(2)) <= 1e-12 and abs(r.target_risk - math.log(2)) <= 1e-12,
            f"axis_target tau {r.sing_term}, target {r.target_risk}")
    d1 = fairness_bounds(s, t, a.rep("phi1")).d_tv
    d2 = fairness_bounds(s, t, a.rep("phi2")).d_tv
    c.check(abs(d1 - 1.0) <= 1e-12 and abs(d2) <= 1e-12, f"axis_target d_tv {d1}, {d2}")
    return c


def suite_thm2(seeds) -> list:
    c = CriterionResult(10, "multi-source bound slack and class-gap monotonicity")
    for seed in seeds:
        spec = random_instance(seed, n_envs=4)
        try:
            rep_ = theorem2_report(spec.source_set(), spec.rep("phi"))
        except IndeterminateInfinity as exc:
            c.indeterminate.append(f"seed {seed}: {exc}")
            continue
        if math.isfinite(rep_.slack):
            c.metrics["min_slack"] = min(c.metrics.get("min_slack", math.inf), rep_.slack)
        c.check(rep_.holds, f"seed {seed}: slack {rep_.slack:.3g}")
    trials = 0
    for seed in seeds[:200]:
        spec = random_instance(20_000 + seed, n_envs=4, n_reps=4)
        reps = list(spec.representations.values())
        rng = np.random.default_rng(seed)
        keep = [r for r in reps if rng.random() < 0.5] or [reps[0]]
        for loss in (CE, ZERO_ONE):
            try:
                big = class_gap(spec.source_set(), reps, loss)
                small = class_gap(spec.source_set(), keep, loss)
            except IndeterminateInfinity as exc:
                c.indeterminate.append(f"nested seed {seed}: {exc}")
                continue
            trials += 1
            ok = small.value <= big.value or small.value - big.value <= 1e-12
            c.check(ok, f"nested seed {seed} {loss.value}: {small.value} > {big.value}")
    c.metrics["nested_trials"] = trials
    return [c]


def _singular_free(seeds, count_needed):
    """Yield ``(seed, spec)`` for singular-free instances, scanning seeds upward."""
    out = []
    seed = seeds[0] if seeds else 0
    while len(out) < count_needed:
        spec = random_instance(seed, singular_fraction=0.0)
        if not _singular(spec.env("e1"), spec.env("t"), spec.rep("phi")):
            out.append((seed, spec))
        seed += 1
    return out


def _two_groups(atoms, rng):
    atoms = sorted(atoms)
    if len(atoms) < 2:
        return GroupPartition.of([atoms])
    cut = rng.permutation(len(atoms))
    k = int(rng.integers(1, len(atoms)))
    return GroupPartition.of([[atoms[i] for i in cut[:k]], [atoms[i] for i in cut[k:]]])


def suite_fairness(seeds) -> list:
    c = CriterionResult(11, "fairness bounds on covariate shift")
    for seed, spec in _singular_free(seeds, len(seeds)):
        s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
        domain = set(support(pushforward(s, rep))) | set(support(pushforward(t, rep)))
        part = _two_groups(domain, np.random.default_rng(seed))
        f = fairness_bounds(s, t, rep, part)
        c.check(f.mu <= f.rho * f.d_tv + 1e-12, f"seed {seed}: mu {f.mu} > rho*d {f.rho * f.d_tv}")
        c.check(f.rho <= f.log_k + 1e-12, f"seed {seed}: rho {f.rho} > log K")
        c.check(f.mu_group <= f.rho_group * f.d_group + 1e-12,
                f"seed {seed}: mu_group {f.mu_group} > {f.rho_group * f.d_group}")
    constructed = 0
    for seed, spec in _singular_free([50_000 + (seeds[0] if seeds else 0)], min(100, len(seeds))):
        s, t, rep = spec.env("e1"), spec.env("t"), spec.rep("phi")
        rng = np.random.default_rng(seed)
        domain = set(support(pushforward(s, rep))) | set(support(pushforward(t, rep)))
        part = _two_groups(domain, rng)
        laws = []
        for _ in part.groups:
            v = rng.random(spec.K)
            laws.append(v / v.sum())
        group_of = {g: i for i, grp in enumerate(part.groups) for g in grp}
        marg = s.input_marginal()
        atoms = [(x, y, m * float(laws[group_of[rep(x)]][y])) for x, m in marg.items() for y in range(spec.K)]
        s2 = Environment.from_atoms("e1", [a for a in atoms if a[2] > 0.0], spec.K)
        f = fairness_bounds(s2, t, rep, part)
        constructed += 1
        c.check(f.within_group_constant, f"constructed seed {seed}: conditionals not group-constant")
        c.worst("max_mu_vs_mu_group", abs(f.mu - f.mu_group))
        c.check(abs(f.mu - f.mu_group) <= 1e-9, f"constructed seed {seed}: mu {f.mu} vs mu_group {f.mu_group}")
    c.metrics["constructed_trials"] = constructed
    return [c]


def suite_hdiv(seeds) -> list:
    c = CriterionResult(12, "divergence bounds and the bridge bound")
    min_slack = math.inf
    for seed in seeds:
        spec = random_instance(seed, n_envs=4, n_reps=2, n_predictors=1 + seed % 10)
        hset = spec.predictor_set("random")
        loss = ZERO_ONE if seed % 2 == 0 else CE
        s, t = spec.env("e1"), spec.env("t")
        for h in hset.hypotheses:
            try:
                b5 = single_source_div_bound(s, t, h, hset, loss)
                b6 = multisource_div_bound(spec.source_set(), h, hset, loss)
            except IndeterminateInfinity as exc:
                c.indeterminate.append(f"seed {seed} {h.name}: {exc}")
                continue
            c.check(b5.holds, f"seed {seed} {h.name}: single-source slack {b5.slack:.3g}")
            c.check(b6.holds, f"seed {seed} {h.name}: multi-source slack {b6.slack:.3g}")
            min_slack = min(min_slack, b5.slack, b6.slack)
        cb = connect_bound(s, t, spec.rep("phi"))
        c.check(cb.holds, f"seed {seed}: bridge slack {cb.slack:.3g}")
        if math.isfinite(cb.exact_rhs):
            c.check(cb.rhs >= cb.exact_rhs - 1e-9, f"seed {seed}: bridge rhs {cb.rhs} < exact {cb.exact_rhs}")
    if math.isfinite(min_slack):
        c.metrics["min_slack"] = min_slack
    return [c]


def _cmnist_tables() -> CriterionResult:
    c = CriterionResult(3, "colored-MNIST conditional tables")
    spec = gen("cmnist_latent")
    rep = spec.rep("phi_xz")
    expected = {
        "e1": {"xz:00": 27 / 28, "xz:01": 1 / 4, "xz:10": 3 / 4, "xz:11": 1 / 28},
        "e2": {"xz:00": 12 / 13, "xz:01": 3 / 7, "xz:10": 4 / 7, "xz:11": 1 / 13},
    }
    for e, table in expected.items():
        for g, p0 in table.items():
            got = conditional_label(spec.env(e), rep, g)[0]
            c.worst("max_abs_error", abs(got - p0))
            c.check(abs(got - p0) <= 1e-12, f"{e} {g}: P(Y=0) {got} vs {p0}")
    return c


def _irm_counterexample() -> tuple:
    spec = gen("cmnist_latent")
    envs = spec.source_envs()
    target = spec.env(spec.target)
    inputs = sorted({x for e in envs for x in e.input_atoms()})
    z_pred = {x: (1.0, 0.0) if x.endswith("0") else (0.0, 1.0) for x in inputs}

    c4 = CriterionResult(4, "0-1 IRM selects the colour predictor")
    sol = irm_solve(envs, spec.hypothesis_class("label_maps"), ZERO_ONE)
    c4.check(bool(sol.optima), "IRM infeasible under 0-1 loss")
    c4.metrics["optima"] = len(sol.optima)
    for o in sol.optima:
        comp = composite(o.predictor, o.representation, inputs)
        c4.check(comp == z_pred, f"optimum {o.predictor.name} does not induce the Z predictor")
        tr = risk(target, o.predictor, o.representation, ZERO_ONE)
        c4.check(abs(tr - 0.9) <= 1e-12, f"optimum {o.predictor.name}: target risk {tr}")
        gap = check_eci(envs, o.representation).max_gap
        c4.check(gap >= 0.0412, f"optimum {o.predictor.name}: ECI gap {gap}")
        c4.metrics["min_eci_gap"] = min(c4.metrics.get("min_eci_gap", math.inf), gap)

    c5 = CriterionResult(5, "ERM-ECI selects the digit representation")
    erm = erm_eci_solve(envs, list(spec.representations.values()))
    c5.check(erm.representation.name == "phi_x", f"ERM-ECI chose {erm.representation.name}")
    tr = risk(target, erm.predictor, erm.representation, ZERO_ONE)
    c5.check(abs(tr - 0.25) <= 1e-12, f"ERM-ECI target 0-1 risk {tr}")
    h = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    for e, v in erm.per_env.items():
        c5.worst("max_ce_error", abs(v - h))
        c5.check(abs(v - h) <= 1e-9, f"{e}: CE risk {v} vs {h}")
    eq = irm_eci_equivalence_report(envs, spec.hypothesis_class("full"), a2_envs=envs)
    c5.check(eq.a2_satisfied, f"A2 missing {eq.a2_missing}")
    c5.check(eq.ce_equivalent is True, "CE IRM optimum differs from ERM-ECI")
    return c4, c5


def _memorization() -> list:
    c6 = CriterionResult(6, "memorizing representation on disjoint supports")
    m = gen("memorize_disjoint")
    preds = {p.name: p for p in m.predictor_class("linear").predictors}
    for e in m.sources:
        for rname, pname in (("phi_star", "f_star"), ("phi_mem", "f_mem")):
            r = risk(m.env(e), preds[pname], m.rep(rname), ZERO_ONE)
            c6.check(r == 0.0, f"{pname} on {e}: source risk {r}")
    tr = risk(m.env(m.target), preds["f_mem"], m.rep("phi_mem"), ZERO_ONE)
    c6.check(tr == 0.5, f"memorizing target risk {tr}")
    for rname in ("phi_mem", "phi_star"):
        c6.check(check_eci(m.source_envs(), m.rep(rname)).holds, f"{rname} fails ECI on sources")

    c7 = CriterionResult(7, "interval example: target risk, gap and source shift")
    eps = 0.05
    line = gen("memorize_line", eps=eps)
    phi = line.rep("phi_abs")
    sol = irm_solve(line.source_envs(), line.hypothesis_class("thresholds"), ZERO_ONE)
    c7.check(check_eci(line.source_envs(), phi).holds, "phi_abs fails ECI on sources")
    c7.check(bool(sol.optima), "no source-optimal solution")
    for o in sol.optima:
        tr = risk(line.env(line.target), o.predictor, o.representation, ZERO_ONE)
        c7.check(abs(tr - (1 - 2 * eps) / 2) <= 1e-12, f"{o.predictor.name}: target risk {tr}")
    gap = predictor_gap_target(line.source_set(), phi, ZERO_ONE).value
    c7.check(abs(gap - 0.425) <= 1e-12, f"gap {gap}")
    shift = covariate_shift(line.env("e1"), line.env("e2"), phi, ZERO_ONE)
    c7.check(abs(shift) <= 1e-12, f"source covariate shift {shift}")
    for e in (0.01, 0.1, 0.2, 0.3, 0.33):
        sp = gen("memorize_line", eps=e)
        c7.check(check_eci(sp.source_envs(), sp.rep("phi_abs")).holds, f"eps {e}: phi_abs fails ECI")

    c8 = CriterionResult(8, "quadrant-cell example: opposite target risks of two invariant solutions")
    q = gen("memorize_quadrants", eps=eps)
    preds = {p.name: p for p in q.predictor_class("thresholds").predictors}
    for rname, want in (("phi1", eps), ("phi2", 1 - eps)):
        h = preds[f"{rname}:1[v>0]"]
        tr = risk(q.env(q.target), h, q.rep(rname), ZERO_ONE)
        c8.check(abs(tr - want) <= 1e-12, f"{rname}: target risk {tr} vs {want}")
        c8.check(check_eci(q.source_envs(), q.rep(rname)).holds, f"{rname} fails ECI on sources")
        for e in q.sources:
            sr = risk(q.env(e), h, q.rep(rname), ZERO_ONE)
            c8.metrics[f"source_risk_{rname}_{e}"] = sr
            c8.check(sr == 0.0, f"{rname} on {e}: source risk {sr} (expected 0)")
    return [c6, c7, c8]


def _bayes_property(seeds) -> CriterionResult:
    c = CriterionResult(13, "Bayesian optimality property")
    for seed in seeds[:200]:
        spec = random_instance(seed)
        v = check_bayes_optimality_property(CE, spec.env("e1"), spec.rep("phi"), 16, 1e-9)
        c.check(v.holds, f"seed {seed}: CE witness at {v.witness_atom}")
    spec = gen("cmnist_latent")
    v = check_bayes_optimality_property(ZERO_ONE, spec.env("e1"), spec.rep("phi_xz"), 16, 1e-9)
    c.check(not v.holds and v.witness is not None, "0-1 loss should fail with a witness")
    if v.witness_atom is not None:
        c.metrics["zero_one_witness_atom"] = v.witness_atom
    return c


def suite_irm(seeds) -> list:
    c4, c5 = _irm_counterexample()
    return [_cmnist_tables(), c4, c5, *_memorization(), _bayes_property(seeds)]


SUITE_FUNCS: dict[str, Callable] = {
    "thm1": suite_thm1,
    "thm2": suite_thm2,
    "fairness": suite_fairness,
    "hdiv": suite_hdiv,
    "irm": suite_irm,
}


def run(suite: str = "all", seeds=range(500)) -> list:
    seeds = list(seeds)
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        results.extend(SUITE_FUNCS[name](seeds))
    return sorted(results, key=lambda r: r.criterion)
