"""Finite encodings of the constructive examples, and random instances.

Continuous constructions are represented by the coarsest atoms that keep
every measured quantity exact (quadrants, half-unit cells, unit intervals),
and each spec's ``manifest`` records the abstraction used.  Representation
atom ids carry a prefix naming their representation so a predictor written
for one representation never silently covers another.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParamOutOfRange, UnknownReference, UnknownScenario, ValidationError
from .measure import Environment, Predictor, Representation, point_mass
from .multisource import SourceSet

SCHEMA_VERSION = 1


@dataclass
class PredictorClass:
    representations: list  # names
    predictors: list  # Predictor


@dataclass
class ScenarioSpec:
    name: str
    K: int
    environments: dict
    representations: dict
    predictor_classes: dict
    sources: list
    target: str
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        for n in [*self.sources, self.target]:
            if n not in self.environments:
                raise ValidationError(f"role refers to unknown environment {n!r}")
        for e in self.environments.values():
            if e.K != self.K:
                raise ValidationError(f"environment {e.name!r} has K={e.K}, scenario has K={self.K}")
            for r in self.representations.values():
                for x in e.input_atoms():
                    r(x)
        for cname, pc in self.predictor_classes.items():
            for r in pc.representations:
                if r not in self.representations:
                    raise ValidationError(f"class {cname!r} refers to unknown representation {r!r}")

    def env(self, name: str) -> Environment:
        try:
            return self.environments[name]
        except KeyError:
            raise UnknownReference(f"scenario {self.name!r} has no environment {name!r}") from None

    def rep(self, name: str) -> Representation:
        try:
            return self.representations[name]
        except KeyError:
            raise UnknownReference(f"scenario {self.name!r} has no representation {name!r}") from None

    def source_envs(self) -> list:
        return [self.environments[n] for n in self.sources]

    def source_set(self) -> SourceSet:
        return SourceSet(tuple(self.source_envs()), self.environments[self.target])

    def predictor_class(self, name: str) -> PredictorClass:
        try:
            return self.predictor_classes[name]
        except KeyError:
            raise UnknownReference(f"scenario {self.name!r} has no predictor class {name!r}") from None

    def hypothesis_class(self, name: str):
        from .invariance import HypothesisClass

        pc = self.predictor_class(name)
        return HypothesisClass(list(pc.predictors), [self.rep(r) for r in pc.representations])

    def predictor_set(self, name: str):
        from .divergence import composites_from

        pc = self.predictor_class(name)
        return composites_from(pc.predictors, [self.rep(r) for r in pc.representations],
                               list(self.environments.values()))


# -- helpers ----------------------------------------------------------------

def threshold_predictors(rep_name: str, values: dict, cuts: Sequence[float], K: int = 2) -> list:
    """Threshold classifiers ``1[v > c]`` and ``1[v <= c]`` on numeric atom positions."""
    out = []
    for c in cuts:
        up = {a: int(v > c) for a, v in values.items()}
        down = {a: int(v <= c) for a, v in values.items()}
        out.append(Predictor.from_labels(f"{rep_name}:1[v>{c:g}]", K, up))
        out.append(Predictor.from_labels(f"{rep_name}:1[v<={c:g}]", K, down))
    return out


def label_maps(rep_name: str, atoms: Sequence[str], K: int) -> list:
    """Every deterministic predictor on ``atoms``."""
    out = []
    for code in range(K ** len(atoms)):
        labels, n = {}, code
        for a in atoms:
            labels[a] = n % K
            n //= K
        tag = "".join(str(labels[a]) for a in atoms)
        out.append(Predictor.from_labels(f"{rep_name}:map{tag}", K, labels))
    return out


def _env(name, atoms, K):
    return Environment.from_atoms(name, [a for a in atoms if a[2] > 0.0], K)


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ParamOutOfRange(msg)


# -- single-source examples ---------------------------------------------------

_QUADRANT_SIGNS = {"q1": (1, 1), "q2": (-1, 1), "q3": (-1, -1), "q4": (1, -1), "a+": (0, 1), "a-": (0, -1)}
_SIGN_NAME = {-1: "neg", 0: "zero", 1: "pos"}


def _quadrant_reps():
    phi1 = Representation("phi1", {x: f"x1:{_SIGN_NAME[s[0]]}" for x, s in _QUADRANT_SIGNS.items()})
    phi2 = Representation("phi2", {x: f"x2:{_SIGN_NAME[s[1]]}" for x, s in _QUADRANT_SIGNS.items()})
    return phi1, phi2


def _quadrant_classes(K=2):
    preds = []
    for rep_name, axis in (("phi1", "x1"), ("phi2", "x2")):
        values = {f"{axis}:{n}": v for v, n in _SIGN_NAME.items()}
        preds += threshold_predictors(rep_name, values, (-1.0, 0.0, 1.0), K)
    by_name = {p.name: p for p in preds}
    h1, h2 = by_name["phi1:1[v<=0]"], by_name["phi2:1[v>0]"]
    return {
        "thresholds": PredictorClass(["phi1", "phi2"], preds),
        "dann": PredictorClass(["phi1", "phi2"], [h1, h2]),
        "dann_phi1": PredictorClass(["phi1"], [h1]),
        "dann_phi2": PredictorClass(["phi2"], [h2]),
    }


def quadrants_v1() -> ScenarioSpec:
    K = 2
    s = _env("s", [("q2", 1, 0.5), ("q4", 0, 0.5)], K)
    t = _env("t", [("q1", 1, 0.5), ("q3", 0, 0.5)], K)
    phi1, phi2 = _quadrant_reps()
    return ScenarioSpec(
        "quadrants_v1", K, {"s": s, "t": t}, {"phi1": phi1, "phi2": phi2}, _quadrant_classes(),
        ["s"], "t",
        manifest={
            "construction": "source uniform on quadrants II (label 1) and IV (label 0); "
                            "target uniform on quadrants I (label 1) and III (label 0)",
            "abstraction": "one atom per quadrant; phi1/phi2 keep only the sign of x1/x2, "
                           "which is all any threshold predictor at 0 sees",
            "atoms": {k: list(v) for k, v in _QUADRANT_SIGNS.items()},
            "threshold_class": "1[v > c] and 1[v <= c] for c in {-1, 0, 1} on sign values",
            "named_composites": {"h_phi1": "phi1:1[v<=0]@phi1", "h_phi2": "phi2:1[v>0]@phi2"},
        },
    )


def axis_target() -> ScenarioSpec:
    spec = quadrants_v1()
    t = _env("t", [("a+", 1, 0.5), ("a-", 0, 0.5)], spec.K)
    spec = ScenarioSpec(
        "axis_target", spec.K, {"s": spec.environments["s"], "t": t}, spec.representations,
        spec.predictor_classes, ["s"], "t", dict(spec.manifest),
    )
    spec.manifest["construction"] = (
        "source as in quadrants_v1; target uniform on the x2 axis {0} x [-1, 1], "
        "label 1 above 0 and label 0 below")
    spec.manifest["abstraction"] = (
        "target atoms a+ = (0, +) and a- = (0, -); phi1 maps both to x1:zero, "
        "an atom of source measure zero")
    return spec


# -- multi-source examples ----------------------------------------------------

def memorize_disjoint() -> ScenarioSpec:
    K = 2  # label 0 stands for -1, label 1 for +1
    envs = {}
    for e in ("e1", "e2", "e0"):
        tag = {"e1": "s1", "e2": "s2", "e0": "t"}[e]
        envs[e] = _env(e, [(f"{tag}-", 0, 0.5), (f"{tag}+", 1, 0.5)], K)
    inputs = [x for e in envs.values() for x in e.input_atoms()]
    sign = {x: (1 if x.endswith("+") else -1) for x in inputs}
    domain_bit = {x: (1 if x.startswith("t") else 0) for x in inputs}
    phi_star = Representation("phi_star", {x: f"r:{sign[x]:+d}" for x in inputs})
    phi_mem = Representation("phi_mem", {x: f"m:{sign[x]:+d},{domain_bit[x]}" for x in inputs})

    def linear(name, rep_atoms, w, b=0.0):
        labels = {}
        for atom, vec in rep_atoms.items():
            score = b + sum(wi * vi for wi, vi in zip(w, vec))
            labels[atom] = 1 if score > 0 else 0
        return Predictor.from_labels(name, K, labels)

    star_atoms = {"r:-1": (-1,), "r:+1": (1,)}
    mem_atoms = {f"m:{s:+d},{v}": (s, v) for s in (-1, 1) for v in (0, 1)}
    preds = [
        linear("f_star", star_atoms, (1.0,)),
        linear("f_mem", mem_atoms, (1.0, 2.0)),
        linear("f_star_on_mem", mem_atoms, (1.0, 0.0)),
    ]
    return ScenarioSpec(
        "memorize_disjoint", K, envs, {"phi_star": phi_star, "phi_mem": phi_mem},
        {"linear": PredictorClass(["phi_star", "phi_mem"], preds)},
        ["e1", "e2"], "e0",
        manifest={
            "construction": "target support disjoint from both sources; each domain puts mass 1/2 "
                            "on each class; phi_mem appends the domain bit v(x) to phi_star",
            "labels": "label index 0 encodes -1, index 1 encodes +1; sign loss is 0-1 loss",
            "memorizing_predictor": "f_mem(r) = sign(r1 + 2 r2)",
        },
    )


_LINE_BINS = ["[-2,-1]", "[-1,0]", "[0,1]", "[1,2]", "[2,3]"]


def memorize_line(eps: float = 0.05) -> ScenarioSpec:
    _check(0.0 < eps < 0.5, f"eps must lie in (0, 1/2), got {eps}")
    K = 2
    label = {"[-2,-1]": 0, "[-1,0]": 1, "[0,1]": 1, "[1,2]": 0}

    def env(name, left, right, tail):
        mass = {"[-2,-1]": left / 2, "[-1,0]": left / 2, "[0,1]": right / 2, "[1,2]": right / 2}
        atoms = [(x, label[x], m) for x, m in mass.items()]
        atoms += [("[2,3]", 0, tail / 2), ("[2,3]", 1, tail / 2)]
        return _env(name, atoms, K)

    envs = {
        "e1": env("e1", 1 - 2 * eps, eps, eps),
        "e2": env("e2", eps, 1 - 2 * eps, eps),
        "e0": env("e0", eps, eps, 1 - 2 * eps),
    }
    abs_bin = {"[-2,-1]": "[1,2]", "[-1,0]": "[0,1]", "[0,1]": "[0,1]", "[1,2]": "[1,2]", "[2,3]": "[2,3]"}
    phi = Representation("phi_abs", {x: f"|x|:{b}" for x, b in abs_bin.items()})
    ident = Representation("phi_id", {x: f"x:{x}" for x in _LINE_BINS})
    abs_values = {"|x|:[0,1]": 0.5, "|x|:[1,2]": 1.5, "|x|:[2,3]": 2.5}
    id_values = {f"x:{x}": v for x, v in zip(_LINE_BINS, (-1.5, -0.5, 0.5, 1.5, 2.5))}
    preds_abs = threshold_predictors("phi_abs", abs_values, (0.0, 1.0, 2.0, 3.0))
    preds_id = threshold_predictors("phi_id", id_values, (-2.0, -1.0, 0.0, 1.0, 2.0, 3.0))
    return ScenarioSpec(
        "memorize_line", K, envs, {"phi_abs": phi, "phi_id": ident},
        {
            "thresholds": PredictorClass(["phi_abs"], preds_abs),
            "thresholds_all": PredictorClass(["phi_abs", "phi_id"], preds_abs + preds_id),
        },
        ["e1", "e2"], "e0",
        manifest={
            "eps": eps,
            "construction": "Y = 0 on [-2,-1] u [1,2], Y = 1 on [-1,1], Y uniform on [2,3]; "
                            "e0: (eps, eps, 1-2eps), e1: (1-2eps, eps, eps), e2: (eps, 1-2eps, eps) "
                            "on [-2,0], [0,2], [2,3]",
            "abstraction": "five unit intervals; mass on [-2,0] and [0,2] splits evenly between "
                           "their two unit halves; [2,3] carries both labels at half mass",
            "solution": "phi_abs with 1[|x| <= 1] (predictor 'phi_abs:1[v<=1]')",
            "expected": {"target_zero_one_risk": (1 - 2 * eps) / 2, "gap": (1 - 2 * eps) / 2 - eps / 2},
        },
    )


def memorize_quadrants(eps: float = 0.05) -> ScenarioSpec:
    _check(0.0 < eps < 0.5, f"eps must lie in (0, 1/2), got {eps}")
    K = 2
    cells = [(i, j) for i in range(4) for j in range(4)]

    def quadrant(i, j):
        right, up = i >= 2, j >= 2
        return {(True, True): 1, (False, True): 2, (False, False): 3, (True, False): 4}[(right, up)]

    diagonal = {(0, 0), (1, 1), (2, 2), (3, 3)}
    anti = {(0, 3), (1, 2), (2, 1), (3, 0)}

    def target_label(c):
        q = quadrant(*c)
        if q == 4:
            return 1
        if q == 2:
            return 0
        return int(c in diagonal)

    def source_label(c, flip):
        q = quadrant(*c)
        if q == 1:
            return 1
        if q == 3:
            return 0
        return int(c in anti) ^ flip

    def env(name, heavy, label_fn):
        atoms = []
        for c in cells:
            q_mass = (0.5 - eps) if quadrant(*c) in heavy else eps
            atoms.append((f"c{c[0]}{c[1]}", label_fn(c), q_mass / 4))
        return _env(name, atoms, K)

    envs = {
        "e1": env("e1", (1, 3), lambda c: source_label(c, 0)),
        "e2": env("e2", (1, 3), lambda c: source_label(c, 1)),
        "e0": env("e0", (2, 4), target_label),
    }
    centers = (-0.75, -0.25, 0.25, 0.75)
    phi1 = Representation("phi1", {f"c{i}{j}": f"x1:b{i}" for i, j in cells})
    phi2 = Representation("phi2", {f"c{i}{j}": f"x2:b{j}" for i, j in cells})
    cuts = (-1.0, -0.5, 0.0, 0.5, 1.0)
    preds = (threshold_predictors("phi1", {f"x1:b{i}": centers[i] for i in range(4)}, cuts)
             + threshold_predictors("phi2", {f"x2:b{j}": centers[j] for j in range(4)}, cuts))
    return ScenarioSpec(
        "memorize_quadrants", K, envs, {"phi1": phi1, "phi2": phi2},
        {"thresholds": PredictorClass(["phi1", "phi2"], preds)},
        ["e1", "e2"], "e0",
        manifest={
            "eps": eps,
            "construction": "sources: 1/2-eps on quadrants I and III (labels 1, 0), eps on II and IV "
                            "with checkerboard labels that e2 flips; target: 1/2-eps on II (label 0) "
                            "and IV (label 1), eps on I and III labelled 1 on the diagonal cells",
            "abstraction": "16 half-unit cells c{i}{j} (i indexes x1, j indexes x2, from -1 upward); "
                           "mass is uniform over the four cells of a quadrant",
            "solution": "threshold at 0 on either axis ('phi1:1[v>0]', 'phi2:1[v>0]')",
            "expected": {"target_zero_one_risk": {"phi1": eps, "phi2": 1 - eps},
                         "source_zero_one_risk": eps},
        },
    )


# -- colored MNIST at the latent level ---------------------------------------

_XZ = [(x, z) for x in (0, 1) for z in (0, 1)]


def _cmnist_env(name, p_x0, flip, q):
    atoms = []
    for x, z in _XZ:
        px = p_x0 if x == 0 else 1.0 - p_x0
        for y in (0, 1):
            py = 1.0 - flip if y == x else flip
            pz = 1.0 - q if z == y else q
            atoms.append((f"x{x}z{z}", y, px * py * pz))
    return _env(name, atoms, 2)


def _cmnist_reps():
    inputs = [f"x{x}z{z}" for x, z in _XZ]
    return {
        "phi_x": Representation("phi_x", {s: f"x:{s[1]}" for s in inputs}),
        "phi_z": Representation("phi_z", {s: f"z:{s[3]}" for s in inputs}),
        "phi_xz": Representation("phi_xz", {s: f"xz:{s[1]}{s[3]}" for s in inputs}),
    }


def _cmnist_classes(envs, reps):
    from .measure import conditional_label

    maps, conds = [], []
    for rname, rep in reps.items():
        atoms = rep.image()
        maps += label_maps(rname, atoms, 2)
        seen = []
        for e in envs.values():
            out = {g: conditional_label(e, rep, g) for g in atoms}
            if any(all(abs(a - b) <= 1e-15 for g in atoms for a, b in zip(out[g], o[g])) for o in seen):
                continue
            seen.append(out)
            conds.append(Predictor(f"{rname}:cond[{e.name}]", 2, out))
    names = list(reps)
    return {
        "label_maps": PredictorClass(names, maps),
        "conditionals": PredictorClass(names, conds),
        "full": PredictorClass(names, maps + conds),
    }


def cmnist_latent(q1: float = 0.1, q2: float = 0.2, q3: float = 0.9, flip: float = 0.25) -> ScenarioSpec:
    for q in (q1, q2, q3, flip):
        _check(0.0 <= q <= 1.0, f"flip probabilities must lie in [0, 1], got {q}")
    envs = {
        "e1": _cmnist_env("e1", 0.5, flip, q1),
        "e2": _cmnist_env("e2", 0.5, flip, q2),
        "e3": _cmnist_env("e3", 0.5, flip, q3),
    }
    reps = _cmnist_reps()
    return ScenarioSpec(
        "cmnist_latent", 2, envs, reps, _cmnist_classes(envs, reps), ["e1", "e2"], "e3",
        manifest={
            "latent_process": "X ~ Bernoulli(1/2); Y = X flipped w.p. flip; Z = Y flipped w.p. q^e",
            "params": {"q1": q1, "q2": q2, "q3": q3, "flip": flip},
            "abstraction": "pixels are replaced by the observable pair (X, Z), which the coloured "
                           "image determines; input atom 'x{X}z{Z}'",
            "predictor_classes": "label_maps: every deterministic map on each representation's atoms; "
                                 "conditionals: the conditional label law of every environment on "
                                 "every representation; full: both",
        },
    )


def cmnist_misaligned(p: float = 1.0, flip: float = 0.25, q1: float = 0.2, q2: float = 0.1,
                      q0: float = 0.9) -> ScenarioSpec:
    _check(0.0 < p <= 1.0, f"p must lie in (0, 1], got {p}")
    _check(0.0 <= flip <= 1.0, f"flip must lie in [0, 1], got {flip}")
    envs = {
        "e1": _cmnist_env("e1", p / (1 + p), flip, q1),
        "e2": _cmnist_env("e2", 1 / (1 + p), flip, q2),
        "e0": _cmnist_env("e0", 0.5, flip, q0),
    }
    reps = _cmnist_reps()
    return ScenarioSpec(
        "cmnist_misaligned", 2, envs, reps, _cmnist_classes(envs, reps), ["e1", "e2"], "e0",
        manifest={
            "latent_process": "digit group X: P(X=0) = p/(1+p) in e1, 1/(1+p) in e2, 1/2 in e0; "
                              "Y = X flipped w.p. flip; Z = Y flipped w.p. q^e",
            "params": {"p": p, "flip": flip, "q1": q1, "q2": q2, "q0": q0},
            "abstraction": "observable pair (X, Z); the within-group digit law is not needed at this level",
            "target_group_prior": "1/2 (the test environment's digit prior is not stated; "
                                  "balanced groups assumed)",
        },
    )


# -- covariate shift on class priors -----------------------------------------

def class_skew(shift: str = "mild", seed: int = 0, w9: float | None = None) -> ScenarioSpec:
    _check(shift in ("mild", "strong"), f"shift must be 'mild' or 'strong', got {shift!r}")
    lo, hi = (0.25, 0.75) if shift == "mild" else (0.0625, 0.9375)
    if w9 is None:
        w9 = 0.9 if shift == "mild" else 0.9375
    _check(w9 > 0.0, f"w9 must be positive, got {w9}")
    rng = np.random.default_rng(seed)
    w = [lo] + [float(v) for v in rng.uniform(lo, hi, size=8)] + [w9]
    K = 10
    total = math.fsum(w)
    s = _env("s", [(f"d{i}", i, 0.1) for i in range(K)], K)
    t = _env("t", [(f"d{i}", i, w[i] / total) for i in range(K)], K)
    rep = Representation("phi_class", {f"d{i}": f"cls:{i}" for i in range(K)})
    return ScenarioSpec(
        "class_skew", K, {"s": s, "t": t}, {"phi_class": rep}, {}, ["s"], "t",
        manifest={
            "shift": shift, "seed": seed, "weights": w,
            "construction": "source uniform over ten classes; target class prior proportional to w",
            "weight_rule": f"w[0] = {lo}, w[9] = {w9}, others uniform on [{lo}, {hi}] (seeded)",
            "interpretation": ("the mild case's literal 'w[9] = 9' is read as 0.9"
                               if shift == "mild" else "the strong case's '0.9375]' is read as 0.9375"),
            "max_relative_weight_ratio": max(w) / min(w),
        },
    )


GENERATORS: dict[str, Callable[..., ScenarioSpec]] = {
    "quadrants_v1": quadrants_v1,
    "axis_target": axis_target,
    "memorize_disjoint": memorize_disjoint,
    "memorize_line": memorize_line,
    "memorize_quadrants": memorize_quadrants,
    "cmnist_latent": cmnist_latent,
    "cmnist_misaligned": cmnist_misaligned,
    "class_skew": class_skew,
}


def gen(name: str, **params) -> ScenarioSpec:
    try:
        factory = GENERATORS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {sorted(GENERATORS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ParamOutOfRange(f"bad parameters for {name}: {exc}") from None


# -- random instances ---------------------------------------------------------

def random_instance(
    seed: int,
    n_atoms: int = 12,
    K: int = 4,
    n_rep_atoms: int = 6,
    n_envs: int = 2,
    n_reps: int = 1,
    singular_fraction: float = 0.3,
    zero_label_fraction: float = 0.3,
    n_predictors: int = 0,
) -> ScenarioSpec:
    """Seeded random instance; sizes are upper bounds except ``n_envs`` and ``n_reps``.

    The last environment is the target.  With probability
    ``singular_fraction`` the first source loses all mass on one
    representation atom the target charges (of the first representation).
    """
    if not (2 <= n_atoms <= 12 and 2 <= K <= 4 and 1 <= n_rep_atoms <= 6 and 2 <= n_envs <= 4):
        raise ParamOutOfRange("sizes outside n_atoms<=12, K<=4, n_rep_atoms<=6, 2<=n_envs<=4")
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_atoms + 1))
    k = int(rng.integers(2, K + 1))
    r = int(rng.integers(1, n_rep_atoms + 1))
    inputs = [f"a{i}" for i in range(n)]
    reps = {}
    for j in range(n_reps):
        name = "phi" if j == 0 else f"phi{j}"
        reps[name] = Representation(name, {x: f"r{int(rng.integers(0, r))}" for x in inputs})

    env_names = [f"e{i}" for i in range(1, n_envs)] + ["t"]
    marg = {}
    for name in env_names:
        m = rng.random(n) * (rng.random(n) > 0.2)
        if m.sum() == 0.0:
            m[int(rng.integers(0, n))] = 1.0
        marg[name] = m
    phi = reps["phi"]
    if rng.random() < singular_fraction:
        t_atoms = sorted({phi(inputs[i]) for i in range(n) if marg["t"][i] > 0})
        g = t_atoms[int(rng.integers(0, len(t_atoms)))]
        src = env_names[0]
        keep = [i for i in range(n) if phi(inputs[i]) != g]
        if keep:
            for i in range(n):
                if phi(inputs[i]) == g:
                    marg[src][i] = 0.0
            if marg[src].sum() == 0.0:
                marg[src][keep[int(rng.integers(0, len(keep)))]] = 1.0
    envs = {}
    for name in env_names:
        m = marg[name] / marg[name].sum()
        atoms = []
        for i, x in enumerate(inputs):
            if m[i] == 0.0:
                continue
            if rng.random() < zero_label_fraction:
                cond = np.zeros(k)
                cond[int(rng.integers(0, k))] = 1.0
            else:
                cond = rng.random(k) * (rng.random(k) > 0.25)
                if cond.sum() == 0.0:
                    cond[int(rng.integers(0, k))] = 1.0
                cond = cond / cond.sum()
            atoms += [(x, y, float(m[i] * cond[y])) for y in range(k) if cond[y] > 0.0]
        envs[name] = _env(name, atoms, k)

    classes = {}
    if n_predictors:
        preds = []
        for rname, rep in reps.items():
            atoms = rep.image()
            for p in range(n_predictors):
                outputs = {}
                for g in atoms:
                    if rng.random() < 0.3:
                        outputs[g] = point_mass(int(rng.integers(0, k)), k)
                    else:
                        v = rng.random(k) + 0.05
                        outputs[g] = tuple(float(t) for t in v / v.sum())
                preds.append(Predictor(f"{rname}:h{p}", k, outputs))
        classes["random"] = PredictorClass(list(reps), preds)
    return ScenarioSpec(
        f"random-{seed}", k, envs, reps, classes, env_names[:-1], "t",
        manifest={"seed": seed, "generator": "random_instance",
                  "sizes": {"n_atoms": n, "K": k, "n_rep_atoms": r, "n_envs": n_envs, "n_reps": n_reps}},
    )
