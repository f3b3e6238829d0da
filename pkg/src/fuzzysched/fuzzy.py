"""Mamdani fuzzy inference: linguistic variables, rules and centroid defuzzification.

The default configuration computes a task's *new priority* from its static
priority and execution time::

    >>> engine = default_engine()
    >>> round(engine.infer(5, 20), 2)
    2.45

Operators are fixed to the classic Mamdani choices: AND is ``min``,
implication clips the consequent, aggregation is pointwise ``max`` and the
crisp value is the centroid of the aggregate.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _core

GEOMETRY_ENV = "FUZZYSCHED_GEOMETRY"

PRIORITY = "priority"
EXEC_TIME = "exec_time"
NEW_PRIORITY = "new_priority"

LEVEL_TERMS = ("very_low", "low", "medium", "high", "very_high")
DURATION_TERMS = ("very_small", "small", "medium", "long", "very_long")


class FuzzyConfigError(ValueError):
    """Invalid variables, terms or rules."""


class NoRuleFiredError(ArithmeticError):
    """The aggregated output is zero everywhere, so it has no centroid."""


@dataclass(frozen=True)
class MembershipFunction:
    """Triangular ``(a, b, c)`` or trapezoidal ``(a, b, c, d)`` membership function.

    Equal neighbouring breakpoints give vertical edges, which is how shoulder
    terms at the edge of a universe are expressed, e.g. ``(0, 0, 0, 2.5)``.
    """

    shape: str
    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        expected = {"triangular": 3, "trapezoidal": 4}.get(self.shape)
        if expected is None:
            raise FuzzyConfigError(f"unknown membership shape {self.shape!r}")
        if len(pts) != expected:
            raise FuzzyConfigError(f"{self.shape} needs {expected} breakpoints, got {len(pts)}")
        if any(not math.isfinite(p) for p in pts):
            raise FuzzyConfigError(f"non-finite breakpoint in {pts}")
        if any(p > q for p, q in zip(pts, pts[1:])):
            raise FuzzyConfigError(f"breakpoints must be non-decreasing: {pts}")

    @classmethod
    def triangular(cls, a: float, b: float, c: float) -> MembershipFunction:
        return cls("triangular", (a, b, c))

    @classmethod
    def trapezoidal(cls, a: float, b: float, c: float, d: float) -> MembershipFunction:
        return cls("trapezoidal", (a, b, c, d))

    def as_trapezoid(self) -> tuple[float, float, float, float]:
        if self.shape == "triangular":
            a, b, c = self.points
            return a, b, b, c
        return self.points  # type: ignore[return-value]

    @property
    def support(self) -> tuple[float, float]:
        return self.points[0], self.points[-1]

    def __call__(self, x: float) -> float:
        return _core.degree(*self.as_trapezoid(), float(x))


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    lo: float
    hi: float
    terms: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((str(n), mf) for n, mf in self.terms))
        if not self.lo < self.hi:
            raise FuzzyConfigError(f"{self.name}: empty universe [{self.lo}, {self.hi}]")
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise FuzzyConfigError(f"{self.name}: duplicate term names in {names}")
        for n, mf in self.terms:
            a, z = mf.support
            if a < self.lo or z > self.hi:
                raise FuzzyConfigError(
                    f"{self.name}.{n}: support [{a}, {z}] leaves universe [{self.lo}, {self.hi}]"
                )

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.terms)

    def term(self, name: str) -> MembershipFunction:
        for n, mf in self.terms:
            if n == name:
                return mf
        raise FuzzyConfigError(f"variable {self.name!r} has no term {name!r}")

    def index(self, name: str) -> int:
        try:
            return self.term_names.index(name)
        except ValueError:
            raise FuzzyConfigError(f"variable {self.name!r} has no term {name!r}") from None

    def clamp(self, x: float) -> float:
        return min(max(float(x), self.lo), self.hi)


@dataclass(frozen=True)
class FuzzyRule:
    antecedents: tuple[tuple[str, str], ...]
    consequent: tuple[str, str]

    def __str__(self) -> str:
        cond = " AND ".join(f"{v} IS {t}" for v, t in self.antecedents)
        return f"IF {cond} THEN {self.consequent[0]} IS {self.consequent[1]}"


@dataclass(frozen=True)
class RuleBase:
    rules: tuple[FuzzyRule, ...]
    inputs: tuple[str, ...]
    output: str

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def lookup(self, *terms: str) -> str | None:
        """Consequent term of the rule whose antecedents are exactly ``terms``, in input order."""
        want = tuple(zip(self.inputs, terms))
        for r in self.rules:
            if tuple(sorted(r.antecedents)) == tuple(sorted(want)):
                return r.consequent[1]
        return None

    def validate(self, variables: Mapping[str, LinguisticVariable]) -> None:
        seen: dict[tuple, int] = {}
        for i, rule in enumerate(self.rules):
            for var, term in (*rule.antecedents, rule.consequent):
                if var not in variables:
                    raise FuzzyConfigError(f"rule {i + 1}: unknown variable {var!r}")
                variables[var].index(term)
            if rule.consequent[0] != self.output:
                raise FuzzyConfigError(
                    f"rule {i + 1}: consequent variable {rule.consequent[0]!r} is not {self.output!r}"
                )
            vars_used = [v for v, _ in rule.antecedents]
            if len(set(vars_used)) != len(vars_used):
                raise FuzzyConfigError(f"rule {i + 1}: variable repeated in antecedent")
            for v in vars_used:
                if v not in self.inputs:
                    raise FuzzyConfigError(f"rule {i + 1}: {v!r} is not an input variable")
            key = tuple(sorted(rule.antecedents))
            if key in seen:
                raise FuzzyConfigError(
                    f"rule {i + 1}: duplicate antecedent combination (first seen in rule {seen[key] + 1})"
                )
            seen[key] = i


@dataclass(frozen=True)
class AggregatedOutput:
    """``max`` over output terms of each term clipped at its firing level."""

    variable: LinguisticVariable
    levels: tuple[float, ...]

    def __call__(self, x: float) -> float:
        x = float(x)
        if x < self.variable.lo or x > self.variable.hi:
            return 0.0
        return max(
            (min(h, mf(x)) for h, (_, mf) in zip(self.levels, self.variable.terms) if h > 0.0),
            default=0.0,
        )

    @property
    def is_zero(self) -> bool:
        return not any(h > 0.0 for h in self.levels)


def fuzzify(value: float, variable: LinguisticVariable) -> dict[str, float]:
    """Degree of ``value`` in every term of ``variable``; out-of-universe values are clamped."""
    if not variable.terms:
        raise FuzzyConfigError(f"variable {variable.name!r} has no terms")
    x = variable.clamp(value)
    return {name: mf(x) for name, mf in variable.terms}


def evaluate_rule(rule: FuzzyRule, input_degrees: Mapping[str, Mapping[str, float]]) -> float:
    act = 1.0
    for var, term in rule.antecedents:
        if var not in input_degrees:
            raise FuzzyConfigError(f"no degrees supplied for variable {var!r}")
        degrees = input_degrees[var]
        if term not in degrees:
            raise FuzzyConfigError(f"variable {var!r} has no term {term!r}")
        act = min(act, degrees[term])
    return act


def aggregate(
    activations: Iterable[tuple[FuzzyRule, float]], output: LinguisticVariable
) -> AggregatedOutput:
    levels = [0.0] * len(output.terms)
    for rule, act in activations:
        var, term = rule.consequent
        if var != output.name:
            raise FuzzyConfigError(f"rule concludes on {var!r}, not {output.name!r}")
        i = output.index(term)
        if act > levels[i]:
            levels[i] = float(act)
    return AggregatedOutput(output, tuple(levels))


def _packed_terms(variable: LinguisticVariable) -> np.ndarray:
    return np.array([mf.as_trapezoid() for _, mf in variable.terms], dtype=np.float64).reshape(-1, 4)


def defuzzify_centroid(agg: AggregatedOutput, output: LinguisticVariable | None = None) -> float:
    output = agg.variable if output is None else output
    if agg.is_zero:
        raise NoRuleFiredError("no rule fired; aggregate is identically zero")
    area, moment = _core.clipped_centroid(_packed_terms(output), agg.levels, output.lo, output.hi)
    if area <= 0.0:
        raise NoRuleFiredError("aggregate has zero area inside the output universe")
    return moment / area


@dataclass(frozen=True)
class FuzzyEngine:
    """Immutable Mamdani engine over a set of input variables and one output."""

    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rulebase: RuleBase
    _model: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        names = [v.name for v in self.inputs]
        if tuple(names) != tuple(self.rulebase.inputs):
            raise FuzzyConfigError(f"rule base inputs {self.rulebase.inputs} != engine inputs {tuple(names)}")
        if self.rulebase.output != self.output.name:
            raise FuzzyConfigError(f"rule base output {self.rulebase.output!r} != {self.output.name!r}")
        if len(set(names + [self.output.name])) != len(names) + 1:
            raise FuzzyConfigError("variable names must be unique")
        self.rulebase.validate(self.variables)
        object.__setattr__(self, "_model", _core.Model(*self._pack_args()))

    @property
    def variables(self) -> dict[str, LinguisticVariable]:
        return {v.name: v for v in (*self.inputs, self.output)}

    def _pack_args(self) -> tuple:
        tmax = max(len(v.terms) for v in self.inputs)
        in_params = np.zeros((len(self.inputs), tmax, 4))
        for i, v in enumerate(self.inputs):
            in_params[i, : len(v.terms)] = _packed_terms(v)
        pos = {v.name: i for i, v in enumerate(self.inputs)}
        ante = np.full((len(self.rulebase.rules), len(self.inputs)), -1, dtype=np.intc)
        cons = np.zeros(len(self.rulebase.rules), dtype=np.intc)
        for r, rule in enumerate(self.rulebase.rules):
            for var, term in rule.antecedents:
                ante[r, pos[var]] = self.inputs[pos[var]].index(term)
            cons[r] = self.output.index(rule.consequent[1])
        return (
            in_params,
            np.array([len(v.terms) for v in self.inputs], dtype=np.intc),
            np.array([v.lo for v in self.inputs]),
            np.array([v.hi for v in self.inputs]),
            ante,
            cons,
            _packed_terms(self.output),
            self.output.lo,
            self.output.hi,
        )

    def fuzzify(self, *values: float) -> dict[str, dict[str, float]]:
        self._check_arity(values)
        return {v.name: fuzzify(x, v) for v, x in zip(self.inputs, values)}

    def aggregate(self, *values: float) -> AggregatedOutput:
        degrees = self.fuzzify(*values)
        return aggregate(((r, evaluate_rule(r, degrees)) for r in self.rulebase), self.output)

    def infer(self, *values: float) -> float:
        """Crisp output for one input vector, e.g. ``infer(priority, exec_time)``."""
        self._check_arity(values)
        out = self._model.infer([float(x) for x in values])
        if math.isnan(out):
            raise NoRuleFiredError(f"no rule fired for inputs {values}")
        return out

    def infer_many(self, values) -> np.ndarray:
        """Vectorised :meth:`infer` over an ``(N, n_inputs)`` array."""
        X = np.asarray(values, dtype=np.float64)
        if X.ndim == 1 and len(self.inputs) == 1:
            X = X[:, None]
        out = self._model.infer_batch(X)
        if np.isnan(out).any():
            bad = int(np.flatnonzero(np.isnan(out))[0])
            raise NoRuleFiredError(f"no rule fired for row {bad}: {X[bad].tolist()}")
        return out

    def _check_arity(self, values: Sequence[float]) -> None:
        if len(values) != len(self.inputs):
            raise TypeError(f"expected {len(self.inputs)} inputs, got {len(values)}")


def infer(pp: float, et: float, engine: FuzzyEngine | None = None) -> float:
    return (engine or default_engine()).infer(pp, et)


# default configuration

def even_partition(name: str, lo: float, hi: float, term_names: Sequence[str]) -> LinguisticVariable:
    """Terms with evenly spaced peaks; inner terms triangular, end terms shoulders."""
    n = len(term_names)
    if n < 2:
        raise FuzzyConfigError("an even partition needs at least two terms")
    step = (hi - lo) / (n - 1)
    peaks = [lo + i * step for i in range(n - 1)] + [hi]
    terms = []
    for i, t in enumerate(term_names):
        if i == 0:
            mf = MembershipFunction.trapezoidal(lo, lo, peaks[0], peaks[1])
        elif i == n - 1:
            mf = MembershipFunction.trapezoidal(peaks[-2], peaks[-1], hi, hi)
        else:
            mf = MembershipFunction.triangular(peaks[i - 1], peaks[i], peaks[i + 1])
        terms.append((t, mf))
    return LinguisticVariable(name, lo, hi, tuple(terms))


def default_variables() -> tuple[LinguisticVariable, LinguisticVariable, LinguisticVariable]:
    return (
        even_partition(PRIORITY, 0.0, 10.0, LEVEL_TERMS),
        even_partition(EXEC_TIME, 0.0, 25.0, DURATION_TERMS),
        even_partition(NEW_PRIORITY, 0.0, 10.0, LEVEL_TERMS),
    )


# (priority term, exec time term) -> new priority term
_DEFAULT_TABLE = {
    "very_small": ("very_high", "very_high", "very_high", "very_high", "very_high"),
    "small": ("medium", "medium", "high", "high", "very_high"),
    "medium": ("very_low", "low", "medium", "medium", "medium"),
    "long": ("very_low", "very_low", "low", "low", "low"),
    "very_long": ("very_low", "very_low", "very_low", "low", "low"),
}


def default_rulebase() -> RuleBase:
    rules = []
    for et_term in DURATION_TERMS:
        for pp_term, np_term in zip(LEVEL_TERMS, _DEFAULT_TABLE[et_term]):
            rules.append(
                FuzzyRule(((PRIORITY, pp_term), (EXEC_TIME, et_term)), (NEW_PRIORITY, np_term))
            )
    return RuleBase(tuple(rules), (PRIORITY, EXEC_TIME), NEW_PRIORITY)


_DEFAULT_ENGINE: FuzzyEngine | None = None


def default_engine() -> FuzzyEngine:
    """Engine with the built-in geometry and rule table (cached)."""
    global _DEFAULT_ENGINE
    if _DEFAULT_ENGINE is None:
        pp, et, npv = default_variables()
        _DEFAULT_ENGINE = FuzzyEngine((pp, et), npv, default_rulebase())
    return _DEFAULT_ENGINE


# geometry config files

def variable_from_dict(doc: Mapping) -> LinguisticVariable:
    try:
        name = doc["name"]
        lo, hi = (float(v) for v in doc["universe"])
        raw_terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FuzzyConfigError(f"malformed variable entry: {exc}") from None
    terms = []
    for t in raw_terms:
        if isinstance(t, Mapping):
            tname, pts = t.get("name"), t.get("points")
            shape = t.get("shape")
        else:
            tname, pts, shape = t[0], t[1], None
        if tname is None or pts is None:
            raise FuzzyConfigError(f"{name}: term entry needs 'name' and 'points'")
        shape = shape or ("triangular" if len(pts) == 3 else "trapezoidal")
        terms.append((tname, MembershipFunction(shape, tuple(pts))))
    return LinguisticVariable(name, lo, hi, tuple(terms))


def variable_to_dict(var: LinguisticVariable) -> dict:
    return {
        "name": var.name,
        "universe": [var.lo, var.hi],
        "terms": [{"name": n, "shape": mf.shape, "points": list(mf.points)} for n, mf in var.terms],
    }


def load_geometry(path: str | os.PathLike | None = None) -> tuple[tuple[LinguisticVariable, ...], LinguisticVariable]:
    """Read input and output variables from a JSON geometry file.

    ``None`` falls back to ``$FUZZYSCHED_GEOMETRY`` and then to the built-in
    defaults. The document holds ``{"inputs": [...], "output": {...}}``;
    each variable is ``{"name", "universe": [lo, hi], "terms": [{"name", "points"}]}``.
    """
    if path is None:
        path = os.environ.get(GEOMETRY_ENV) or None
    if path is None:
        pp, et, npv = default_variables()
        return (pp, et), npv
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FuzzyConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, Mapping) or "inputs" not in doc or "output" not in doc:
        raise FuzzyConfigError(f"{path}: expected an object with 'inputs' and 'output'")
    inputs = tuple(variable_from_dict(v) for v in doc["inputs"])
    return inputs, variable_from_dict(doc["output"])


def geometry_to_json(inputs: Sequence[LinguisticVariable], output: LinguisticVariable) -> str:
    doc = {"inputs": [variable_to_dict(v) for v in inputs], "output": variable_to_dict(output)}
    return json.dumps(doc, indent=2)


def build_engine(
    geometry: str | os.PathLike | None = None, rules: str | os.PathLike | None = None
) -> FuzzyEngine:
    """Engine from optional geometry and rule files; missing pieces use the defaults."""
    from .rules import parse_rulebase

    inputs, output = load_geometry(geometry)
    if rules is None:
        rb = default_rulebase()
    else:
        rb = parse_rulebase(Path(rules).read_text(encoding="utf-8"), inputs=inputs, output=output)
    if geometry is None and rules is None and not os.environ.get(GEOMETRY_ENV):
        return default_engine()
    return FuzzyEngine(inputs, output, rb)
