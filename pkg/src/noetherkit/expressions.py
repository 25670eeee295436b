"""Symbolic expression layer over a declared alphabet of mechanical variables.

Expressions are sympy trees restricted to the symbols of an :class:`Alphabet`:
time ``t``, coordinates ``q_i``, velocities ``q_i dot``, accelerations
``q_i ddot``, named parameters, and opaque function symbols (manipulated
symbolically, bound to concrete expressions only for numeric work).

Identity between expressions is decided by a randomized numeric oracle
(:func:`equal_numeric`), never by symbolic zero-testing: a FAIL comes with a
concrete witness point and is conclusive, a PASS is probabilistic evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

__all__ = [
    "Alphabet",
    "Exclusion",
    "SampleDomain",
    "IdentityReport",
    "UndeclaredSymbolError",
    "DomainViolation",
    "SamplingError",
    "STANDARD_FUNCTIONS",
    "bind_opaque",
    "diff",
    "total_dt",
    "substitute",
    "evaluate",
    "compile_fn",
    "draw_points",
    "equal_numeric",
    "tidy",
]

STANDARD_FUNCTIONS = {
    "sqrt": sp.sqrt,
    "sin": sp.sin,
    "cos": sp.cos,
    "exp": sp.exp,
    "log": sp.log,
}

_RESERVED = {"t"} | set(STANDARD_FUNCTIONS)


class UndeclaredSymbolError(ValueError):
    """An expression uses a symbol outside the declared alphabet."""


class DomainViolation(ValueError):
    """Numeric evaluation hit a singularity (division by zero, sqrt/log of
    a negative number)."""

    def __init__(self, expr, point):
        self.expr = expr
        self.point = dict(point)
        super().__init__(f"domain violation evaluating {expr} at {self.point}")


class SamplingError(RuntimeError):
    """The sample domain is empty after exclusions (rejection budget spent)."""


def _sym(name: str) -> sp.Symbol:
    return sp.Symbol(name, real=True)


@dataclass(frozen=True)
class Alphabet:
    """Declares the variables a system's expressions may mention.

    Coordinates ``c`` induce velocity symbols ``cdot`` and acceleration
    symbols ``cddot``.  When coordinates follow the ``q1..qn`` convention the
    aliases ``qdot<i>`` / ``qddot<i>`` are accepted by :meth:`lookup` too.
    """

    coords: tuple[str, ...]
    params: tuple[str, ...] = ()
    opaque: tuple[str, ...] = ()

    def __post_init__(self):
        names = list(self.coords) + list(self.params) + list(self.opaque)
        seen = set()
        for name in names:
            if name in _RESERVED:
                raise ValueError(f"symbol name {name!r} is reserved")
            if name in seen:
                raise ValueError(f"symbol name {name!r} declared twice")
            seen.add(name)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def t(self) -> sp.Symbol:
        return _sym("t")

    @property
    def coord_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(_sym(c) for c in self.coords)

    @property
    def velocity_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(_sym(c + "dot") for c in self.coords)

    @property
    def acceleration_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(_sym(c + "ddot") for c in self.coords)

    @property
    def param_symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(_sym(p) for p in self.params)

    @property
    def functions(self) -> dict[str, sp.core.function.UndefinedFunction]:
        return {name: sp.Function(name) for name in self.opaque}

    def variables(self, include_acc: bool = False) -> tuple[sp.Symbol, ...]:
        out = (self.t,) + self.coord_symbols + self.velocity_symbols
        if include_acc:
            out += self.acceleration_symbols
        return out

    def _name_table(self) -> dict[str, sp.Symbol]:
        table = {"t": self.t}
        for i, c in enumerate(self.coords, start=1):
            table[c] = _sym(c)
            table[c + "dot"] = _sym(c + "dot")
            table[c + "ddot"] = _sym(c + "ddot")
            if c == f"q{i}":
                table[f"qdot{i}"] = _sym(c + "dot")
                table[f"qddot{i}"] = _sym(c + "ddot")
        for p in self.params:
            table[p] = _sym(p)
        return table

    def lookup(self, name: str) -> sp.Symbol:
        table = self._name_table()
        if name not in table:
            raise UndeclaredSymbolError(f"undeclared symbol {name!r}")
        return table[name]

    def check_declared(self, e: sp.Expr) -> None:
        """Raise UndeclaredSymbolError if ``e`` mentions anything foreign."""
        known = set(self.variables(include_acc=True)) | set(self.param_symbols)
        for s in e.free_symbols:
            if s not in known:
                raise UndeclaredSymbolError(f"undeclared symbol {s!r} in {e}")
        for app in e.atoms(AppliedUndef):
            if app.func.__name__ not in self.opaque:
                raise UndeclaredSymbolError(
                    f"undeclared function {app.func.__name__!r} in {e}"
                )


def diff(e, var, alphabet: Alphabet) -> sp.Expr:
    """Exact partial derivative with respect to a declared variable.

    Opaque function applications differentiate to sympy ``Derivative`` nodes,
    so differentiation is closed over the expression type.
    """
    if isinstance(var, str):
        var = alphabet.lookup(var)
    return sp.diff(sp.sympify(e), var)


def total_dt(e, alphabet: Alphabet, lam: Sequence[sp.Expr] | None = None) -> sp.Expr:
    """Total time derivative of an expression in (t, q, qdot).

    Generic mode (``lam is None``) introduces acceleration symbols; on-flow
    mode replaces them with the supplied acceleration field ``lam`` so the
    result is free of accelerations.
    """
    e = sp.sympify(e)
    for a in alphabet.acceleration_symbols:
        if e.has(a):
            raise ValueError(f"total_dt input must be free of {a}")
    if lam is not None and len(lam) != alphabet.n:
        raise ValueError(
            f"acceleration field has length {len(lam)}, expected {alphabet.n}"
        )
    out = sp.diff(e, alphabet.t)
    accs = alphabet.acceleration_symbols if lam is None else tuple(lam)
    for q, qd, qdd in zip(
        alphabet.coord_symbols, alphabet.velocity_symbols, accs
    ):
        out = out + sp.diff(e, q) * qd + sp.diff(e, qd) * qdd
    return out


def substitute(e, bindings: Mapping, alphabet: Alphabet) -> sp.Expr:
    """Simultaneous capture-free substitution.

    Keys may be declared symbol names or opaque function names; values are
    expressions, or ``sympy.Lambda`` for function bindings.
    """
    e = sp.sympify(e)
    pairs = []
    fn_pairs = []
    for key, val in bindings.items():
        if isinstance(key, str):
            if key in alphabet.opaque:
                # function heads are opaque names, never captured by the
                # simultaneous symbol pass below
                fn_pairs.append((sp.Function(key), sp.sympify(val)))
                continue
            key = alphabet.lookup(key)
        if isinstance(key, sp.core.function.UndefinedFunction):
            fn_pairs.append((key, sp.sympify(val)))
        else:
            pairs.append((key, sp.sympify(val)))
    out = e.subs(pairs, simultaneous=True)
    for head, val in fn_pairs:
        out = out.subs(head, val)
    return out.doit()


def bind_opaque(e, bindings: Mapping[str, sp.Lambda] | None) -> sp.Expr:
    """Replace opaque function symbols by concrete bindings and resolve the
    pending derivatives."""
    e = sp.sympify(e)
    if bindings:
        for name, lam in bindings.items():
            e = e.subs(sp.Function(name), lam)
    if e.atoms(AppliedUndef):
        missing = sorted({a.func.__name__ for a in e.atoms(AppliedUndef)})
        raise ValueError(f"no numeric binding for opaque function(s) {missing}")
    return e.doit()


def compile_fn(
    exprs: Sequence,
    alphabet: Alphabet,
    bindings: Mapping[str, sp.Lambda] | None = None,
    include_acc: bool = False,
):
    """Compile expressions into a fast numeric function of a point dict."""
    syms = alphabet.variables(include_acc) + alphabet.param_symbols
    bound = [bind_opaque(e, bindings) for e in exprs]
    raw = sp.lambdify(syms, bound, modules=["numpy", {"math": math}])
    names = [s.name for s in syms]

    def fn(point: Mapping[str, float]):
        args = [point[name] for name in names]
        with np.errstate(all="ignore"):
            return raw(*args)

    fn.arg_names = names
    return fn


def evaluate(
    e,
    point: Mapping[str, float],
    alphabet: Alphabet,
    bindings: Mapping[str, sp.Lambda] | None = None,
) -> float:
    """IEEE double evaluation at a fully bound sample point."""
    fn = compile_fn([sp.sympify(e)], alphabet, bindings, include_acc=True)
    full = dict(point)
    for s in alphabet.variables(include_acc=True) + alphabet.param_symbols:
        full.setdefault(s.name, 0.0)
    try:
        val = float(fn(full)[0])
    except (ZeroDivisionError, ValueError, OverflowError) as err:
        raise DomainViolation(e, point) from err
    if not math.isfinite(val):
        raise DomainViolation(e, point)
    return val


@dataclass(frozen=True)
class Exclusion:
    """Singular-set declaration: points where |expr| < threshold are rejected."""

    expr: sp.Expr
    threshold: float = 1e-3


@dataclass(frozen=True)
class SampleDomain:
    """Sampling box for the randomized identity oracle.

    Every coordinate and velocity is drawn uniformly from ``default_range``
    unless overridden in ``var_ranges``; time from ``t_range``; accelerations
    (strong-mode checks) from ``acc_range``.
    """

    t_range: tuple[float, float] = (0.0, 2.0)
    default_range: tuple[float, float] = (-2.0, 2.0)
    acc_range: tuple[float, float] = (-2.0, 2.0)
    var_ranges: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    exclusions: tuple[Exclusion, ...] = ()

    def with_exclusions(self, extra: Iterable[Exclusion]) -> "SampleDomain":
        return SampleDomain(
            t_range=self.t_range,
            default_range=self.default_range,
            acc_range=self.acc_range,
            var_ranges=dict(self.var_ranges),
            exclusions=self.exclusions + tuple(extra),
        )


def _range_for(name: str, alphabet: Alphabet, domain: SampleDomain):
    if name in domain.var_ranges:
        return domain.var_ranges[name]
    if name == "t":
        return domain.t_range
    if any(name == c + "ddot" for c in alphabet.coords):
        return domain.acc_range
    return domain.default_range


def draw_points(
    alphabet: Alphabet,
    domain: SampleDomain,
    param_values: Mapping[str, float],
    bindings: Mapping[str, sp.Lambda] | None,
    k: int,
    seed: int,
    include_acc: bool = False,
    max_tries: int = 1000,
) -> list[dict[str, float]]:
    """Draw k points from the box, rejecting those near declared singular sets."""
    rng = np.random.default_rng(seed)
    var_names = [s.name for s in alphabet.variables(include_acc)]
    ranges = [_range_for(name, alphabet, domain) for name in var_names]
    excl = [
        (compile_fn([ex.expr], alphabet, bindings, include_acc), ex.threshold)
        for ex in domain.exclusions
    ]
    points = []
    for _ in range(k):
        for _ in range(max_tries):
            point = {
                name: float(rng.uniform(lo, hi))
                for name, (lo, hi) in zip(var_names, ranges)
            }
            point.update({name: float(v) for name, v in param_values.items()})
            ok = True
            for fn, threshold in excl:
                try:
                    val = float(fn(point)[0])
                except (ZeroDivisionError, ValueError, OverflowError):
                    ok = False
                    break
                if not math.isfinite(val) or abs(val) < threshold:
                    ok = False
                    break
            if ok:
                points.append(point)
                break
        else:
            raise SamplingError(
                f"could not draw a point outside exclusions in {max_tries} tries"
            )
    return points


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of a randomized identity check between two expressions."""

    passed: bool
    max_residual: float
    worst_point: dict[str, float]
    k: int
    tol: float
    seed: int
    label: str = ""

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "check": self.label,
            "k": self.k,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "worst_point": self.worst_point,
            "verdict": self.verdict,
            "seed": self.seed,
        }


def equal_numeric(
    a,
    b,
    alphabet: Alphabet,
    *,
    param_values: Mapping[str, float] | None = None,
    bindings: Mapping[str, sp.Lambda] | None = None,
    domain: SampleDomain = SampleDomain(),
    k: int = 100,
    tol: float = 1e-9,
    seed: int = 0,
    include_acc: bool = False,
    label: str = "",
) -> IdentityReport:
    """Randomized identity oracle: PASS iff |a-b| <= tol*(1+max(|a|,|b|)) at
    all k sample points.

    FAIL carries the worst point as a conclusive witness; PASS is strong
    probabilistic evidence only.  Deterministic for a fixed seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a = sp.sympify(a)
    b = sp.sympify(b)
    param_values = dict(param_values or {})
    fn = compile_fn([a, b], alphabet, bindings, include_acc)
    points = draw_points(
        alphabet, domain, param_values, bindings, k, seed, include_acc
    )
    worst = (-1.0, points[0])
    passed = True
    for point in points:
        try:
            va, vb = (float(v) for v in fn(point))
        except (ZeroDivisionError, ValueError, OverflowError) as err:
            raise DomainViolation(sp.Eq(a, b, evaluate=False), point) from err
        if not (math.isfinite(va) and math.isfinite(vb)):
            raise DomainViolation(sp.Eq(a, b, evaluate=False), point)
        resid = abs(va - vb) / (1.0 + max(abs(va), abs(vb)))
        if resid > worst[0]:
            worst = (resid, point)
        if resid > tol:
            passed = False
    return IdentityReport(
        passed=passed,
        max_residual=worst[0],
        worst_point=dict(worst[1]),
        k=k,
        tol=tol,
        seed=seed,
        label=label,
    )


def tidy(e) -> sp.Expr:
    """Bounded cleanup pass for emitted expressions.

    Readability only: correctness decisions always go through the numeric
    oracle, never through simplification.
    """
    e = sp.sympify(e)
    try:
        return sp.cancel(sp.together(e))
    except (sp.PolynomialError, NotImplementedError):
        return e
