"""Killing-type equation residuals, Noether integrals, and the reverse
Noether solvers.

A triple (tau, xi, f) claims to solve the Killing-type equation

    tau*d_t L + d_q L . xi + d_qdot L . (xi_dot - qdot*tau_dot) + L*tau_dot = f_dot

in one of four senses: ``strong`` (accelerations treated as free variables),
``onflow`` (accelerations replaced by the normal form), or the same two for
the alternative invariance convention, whose equation reads

    tau*d_t L + d_q L . (xi + tau*qdot) + d_qdot L . (xi_dot + tau*qddot) + L*tau_dot = f_dot

The associated first integral is
``N = f - L*tau - d_qdot L . (xi - qdot*tau)`` in the standard convention and
``N = f - L*tau - d_qdot L . xi`` in the alternative one.

Given L and a verified first integral N, the solvers construct triples whose
Noether integral is N; every emitted triple is re-verified numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .expressions import (
    Exclusion,
    IdentityReport,
    compile_fn,
    diff,
    draw_points,
    tidy,
    total_dt,
)
from .mechanics import LagrangianSystem, invert_g_apply

__all__ = [
    "Triple",
    "FirstIntegral",
    "VerificationReport",
    "NotConservedError",
    "FORMS",
    "killing_lhs",
    "verify_triple",
    "check_conserved",
    "noether_integral",
    "solve_onflow",
    "solve_onflow_simplest",
    "solve_onflow_with_R",
    "solve_strong",
    "solve_alt_strong_trivial_gauge",
    "multiplicity_transform",
    "trivialize",
    "velocity_independence_check",
    "convert_standard_alternative",
]

ONFLOW = "onflow"
STRONG = "strong"
ALT_ONFLOW = "alt_onflow"
ALT_STRONG = "alt_strong"
FORMS = (ONFLOW, STRONG, ALT_ONFLOW, ALT_STRONG)

# Sampling keeps |L+c| above this margin wherever a solver divides by L+c;
# wide enough that float64 cancellation stays below the 1e-9 check tolerance.
DENOM_MARGIN = 0.05


class NotConservedError(ValueError):
    """A claimed first integral failed its conservation check."""

    def __init__(self, report: IdentityReport):
        self.report = report
        super().__init__(
            "not a first integral: max residual "
            f"{report.max_residual:.3e} at {report.worst_point}"
        )


@dataclass(frozen=True)
class Triple:
    """Candidate solution (tau, xi, f) with the interpretation it claims.

    ``exclusions`` records denominators introduced by a solver (e.g. 1/L);
    verification sampling keeps away from their zero sets.
    """

    tau: sp.Expr
    xi: tuple[sp.Expr, ...]
    f: sp.Expr
    form: str
    exclusions: tuple[Exclusion, ...] = ()

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")

    def simplified(self) -> "Triple":
        return replace(
            self,
            tau=tidy(self.tau),
            xi=tuple(tidy(x) for x in self.xi),
            f=tidy(self.f),
        )


@dataclass(frozen=True)
class FirstIntegral:
    """Scalar function N(t, q, qdot) with its conservation-check status."""

    expr: sp.Expr
    name: str = ""
    conservation: IdentityReport | None = None

    @property
    def verified(self) -> bool:
        return self.conservation is not None and self.conservation.passed


@dataclass(frozen=True)
class VerificationReport:
    """Residual statistics of a Killing-type equation check."""

    check: str
    mode: str
    k: int
    tol: float
    max_residual: float
    worst_point: dict[str, float]
    passed: bool
    seed: int
    integral_check: IdentityReport | None = None

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "mode": self.mode,
            "k": self.k,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "worst_point": self.worst_point,
            "verdict": self.verdict,
            "seed": self.seed,
        }
        if self.integral_check is not None:
            out["integral_check"] = self.integral_check.to_dict()
        return out


def _as_expr(N) -> sp.Expr:
    if isinstance(N, FirstIntegral):
        return N.expr
    return sp.sympify(N)


def _check_triple_shape(sys: LagrangianSystem, tr: Triple) -> None:
    if len(tr.xi) != sys.n:
        raise ValueError(f"xi has length {len(tr.xi)}, expected {sys.n}")
    for e in (tr.tau, *tr.xi, tr.f):
        for a in sys.alphabet.acceleration_symbols:
            if sp.sympify(e).has(a):
                raise ValueError("triple components must be free of accelerations")


def killing_lhs(sys: LagrangianSystem, tr: Triple, form: str) -> sp.Expr:
    """Left-hand side of the Killing-type equation in the requested sense.

    Strong senses keep accelerations symbolic inside the total derivatives;
    on-flow senses substitute the system's normal form.
    """
    _check_triple_shape(sys, tr)
    ab = sys.alphabet
    lam = None if form in (STRONG, ALT_STRONG) else sys.lam
    tau_dot = total_dt(tr.tau, ab, lam)
    xi_dot = [total_dt(x, ab, lam) for x in tr.xi]
    L, t = sys.L, ab.t
    vs = ab.velocity_symbols
    qs = ab.coord_symbols
    if form in (ONFLOW, STRONG):
        lhs = tr.tau * sp.diff(L, t) + L * tau_dot
        for i in range(sys.n):
            lhs += sp.diff(L, qs[i]) * tr.xi[i]
            lhs += sp.diff(L, vs[i]) * (xi_dot[i] - vs[i] * tau_dot)
        return lhs
    accs = ab.acceleration_symbols if form == ALT_STRONG else sys.lam
    lhs = tr.tau * sp.diff(L, t) + L * tau_dot
    for i in range(sys.n):
        lhs += sp.diff(L, qs[i]) * (tr.xi[i] + tr.tau * vs[i])
        lhs += sp.diff(L, vs[i]) * (xi_dot[i] + tr.tau * accs[i])
    return lhs


def verify_triple(
    sys: LagrangianSystem,
    tr: Triple,
    integral=None,
    form: str | None = None,
    *,
    k: int = 100,
    tol: float = 1e-9,
    seed: int = 0,
    extra_exclusions: Sequence[Exclusion] = (),
    label: str = "",
) -> VerificationReport:
    """Check the triple against the Killing-type equation by random sampling.

    Strong senses sample the accelerations as free variables; if an integral
    is supplied, the Noether formula for the matching convention is checked
    at the same tolerance.
    """
    form = form or tr.form
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    lam = None if form in (STRONG, ALT_STRONG) else sys.lam
    lhs = killing_lhs(sys, tr, form)
    rhs = total_dt(tr.f, sys.alphabet, lam)
    include_acc = form in (STRONG, ALT_STRONG)
    extras = tuple(extra_exclusions) + tr.exclusions
    rep = sys.check(
        lhs, rhs,
        k=k, tol=tol, seed=seed, include_acc=include_acc,
        extra_exclusions=extras,
        label=label or f"killing:{form}",
    )
    integral_check = None
    if integral is not None:
        convention = "alternative" if form.startswith("alt") else "standard"
        candidate = _integral_expr(sys, tr, convention)
        integral_check = sys.check(
            candidate, _as_expr(integral),
            k=k, tol=tol, seed=seed + 1,
            extra_exclusions=extras,
            label=f"noether-integral:{convention}",
        )
    passed = rep.passed and (integral_check is None or integral_check.passed)
    return VerificationReport(
        check=rep.label,
        mode=form,
        k=k,
        tol=tol,
        max_residual=rep.max_residual,
        worst_point=rep.worst_point,
        passed=passed,
        seed=seed,
        integral_check=integral_check,
    )


def check_conserved(
    sys: LagrangianSystem, N, *, k: int = 100, tol: float = 1e-9, seed: int = 0,
    extra_exclusions: Sequence[Exclusion] = (), name: str = "",
) -> FirstIntegral:
    """Verify d/dt N = 0 along the flow; returns N with its status attached."""
    expr = _as_expr(N)
    rep = sys.check(
        total_dt(expr, sys.alphabet, sys.lam), 0,
        k=k, tol=tol, seed=seed,
        extra_exclusions=extra_exclusions,
        label=f"conserved:{name or expr}",
    )
    return FirstIntegral(expr=expr, name=name, conservation=rep)


def _require_conserved(sys, N, seed, extra_exclusions=()) -> sp.Expr:
    if isinstance(N, FirstIntegral) and N.verified:
        return N.expr
    fi = check_conserved(sys, N, seed=seed, extra_exclusions=extra_exclusions)
    if not fi.verified:
        raise NotConservedError(fi.conservation)
    return fi.expr


def _integral_expr(sys: LagrangianSystem, tr: Triple, convention: str) -> sp.Expr:
    vs = sys.alphabet.velocity_symbols
    N = tr.f - sys.L * tr.tau
    for i in range(sys.n):
        shift = tr.xi[i] - vs[i] * tr.tau if convention == "standard" else tr.xi[i]
        N -= sys.p[i] * shift
    return N


def noether_integral(
    sys: LagrangianSystem,
    tr: Triple,
    convention: str = "standard",
    *,
    k: int = 100,
    tol: float = 1e-9,
    seed: int = 0,
    simplify: bool = False,
) -> FirstIntegral:
    """First integral associated to a triple; conservation is checked and
    recorded (an unverified result carries its witness point)."""
    if convention not in ("standard", "alternative"):
        raise ValueError(f"unknown convention {convention!r}")
    _check_triple_shape(sys, tr)
    N = _integral_expr(sys, tr, convention)
    if simplify:
        N = tidy(N)
    return check_conserved(
        sys, N, k=k, tol=tol, seed=seed,
        extra_exclusions=tr.exclusions, name=f"noether:{convention}",
    )


def solve_onflow(sys: LagrangianSystem, N, tau, xi: Sequence, *, seed: int = 0) -> Triple:
    """Complete an arbitrary (tau, xi) to an on-flow triple for integral N."""
    Nexpr = _require_conserved(sys, N, seed)
    tau = sp.sympify(tau)
    xi = tuple(sp.sympify(x) for x in xi)
    vs = sys.alphabet.velocity_symbols
    f = tau * sys.L + Nexpr
    for i in range(sys.n):
        f += sys.p[i] * (xi[i] - tau * vs[i])
    return Triple(tau=tau, xi=xi, f=f, form=ONFLOW)


def solve_onflow_simplest(
    sys: LagrangianSystem, N, c: float = 0.0, *, seed: int = 0
) -> Triple:
    """On-flow triple with zero boundary term: tau = -N/(L+c), xi = tau*qdot.

    The shift constant c moves the working domain off the zero set of L.
    """
    denom_excl = Exclusion(sys.L + c, DENOM_MARGIN)
    Nexpr = _require_conserved(sys, N, seed, extra_exclusions=(denom_excl,))
    tau = -Nexpr / (sys.L + c)
    xi = tuple(tau * v for v in sys.alphabet.velocity_symbols)
    return Triple(tau=tau, xi=xi, f=sp.Integer(0), form=ONFLOW,
                  exclusions=(denom_excl,))


def solve_onflow_with_R(
    sys: LagrangianSystem, N, R: Sequence, *, c: float = 0.0, seed: int = 0
) -> Triple:
    """On-flow triple with zero boundary term and free vector shape R."""
    denom_excl = Exclusion(sys.L + c, DENOM_MARGIN)
    Nexpr = _require_conserved(sys, N, seed, extra_exclusions=(denom_excl,))
    R = [sp.sympify(r) for r in R]
    if len(R) != sys.n:
        raise ValueError(f"R has length {len(R)}, expected {sys.n}")
    top = Nexpr + sum(pi * ri for pi, ri in zip(sys.p, R))
    tau = -top / (sys.L + c)
    xi = tuple(
        r - v * top / (sys.L + c)
        for r, v in zip(R, sys.alphabet.velocity_symbols)
    )
    return Triple(tau=tau, xi=xi, f=sp.Integer(0), form=ONFLOW,
                  exclusions=(denom_excl,))


def solve_strong(sys: LagrangianSystem, N, tau=sp.Integer(0), *, seed: int = 0) -> Triple:
    """Strong-sense triple for integral N and free time change tau:
    xi = tau*qdot - g^{-1} d_qdot N, f = tau*L + N - d_qdot L . g^{-1} d_qdot N.
    """
    Nexpr = _require_conserved(sys, N, seed)
    tau = sp.sympify(tau)
    vs = sys.alphabet.velocity_symbols
    grad = [diff(Nexpr, v, sys.alphabet) for v in vs]
    w = invert_g_apply(sys, grad, seed=seed)
    xi = tuple(tau * v - wi for v, wi in zip(vs, w))
    f = tau * sys.L + Nexpr - sum(pi * wi for pi, wi in zip(sys.p, w))
    return Triple(tau=tau, xi=xi, f=f, form=STRONG)


def solve_alt_strong_trivial_gauge(
    sys: LagrangianSystem, N, *, c: float = 0.0, seed: int = 0
) -> Triple:
    """Alternative-convention strong triple with zero boundary term."""
    denom_excl = Exclusion(sys.L + c, DENOM_MARGIN)
    Nexpr = _require_conserved(sys, N, seed, extra_exclusions=(denom_excl,))
    vs = sys.alphabet.velocity_symbols
    grad = [diff(Nexpr, v, sys.alphabet) for v in vs]
    w = invert_g_apply(sys, grad, seed=seed)
    tau = -(Nexpr - sum(pi * wi for pi, wi in zip(sys.p, w))) / (sys.L + c)
    xi = tuple(-wi for wi in w)
    return Triple(tau=tau, xi=xi, f=sp.Integer(0), form=ALT_STRONG,
                  exclusions=(denom_excl,))


def multiplicity_transform(
    sys: LagrangianSystem, tr: Triple, h, *, c: float = 0.0
) -> Triple:
    """Trade the boundary term for h, preserving form and first integral:
    tau += (h-f)/L, xi += qdot*(h-f)/L, f = h."""
    h = sp.sympify(h)
    denom_excl = Exclusion(sys.L + c, DENOM_MARGIN)
    shift = (h - tr.f) / (sys.L + c)
    xi = tuple(x + v * shift for x, v in zip(tr.xi, sys.alphabet.velocity_symbols))
    return Triple(
        tau=tr.tau + shift, xi=xi, f=h, form=tr.form,
        exclusions=tr.exclusions + (denom_excl,),
    )


def trivialize(sys: LagrangianSystem, tr: Triple, which: str, *, c: float = 0.0) -> Triple:
    """Equivalent triple with zero time change (``which='time'``) or zero
    boundary term (``which='gauge'``); the first integral is unchanged."""
    vs = sys.alphabet.velocity_symbols
    if which == "time":
        return Triple(
            tau=sp.Integer(0),
            xi=tuple(x - v * tr.tau for x, v in zip(tr.xi, vs)),
            f=tr.f - sys.L * tr.tau,
            form=tr.form,
            exclusions=tr.exclusions,
        )
    if which == "gauge":
        return multiplicity_transform(sys, tr, 0, c=c)
    raise ValueError(f"unknown trivialization {which!r}")


def convert_standard_alternative(sys: LagrangianSystem, tr: Triple) -> Triple:
    """Map between the standard and alternative conventions.

    Standard -> alternative replaces xi by xi - tau*qdot; the reverse adds
    tau*qdot back.  Round trips are the identity.
    """
    vs = sys.alphabet.velocity_symbols
    if tr.form.startswith("alt"):
        xi = tuple(x + tr.tau * v for x, v in zip(tr.xi, vs))
        form = tr.form.removeprefix("alt_")
    else:
        xi = tuple(x - tr.tau * v for x, v in zip(tr.xi, vs))
        form = "alt_" + tr.form
    return Triple(tau=tr.tau, xi=xi, f=tr.f, form=form, exclusions=tr.exclusions)


@dataclass(frozen=True)
class VelocityIndependenceVerdict:
    """Whether N can come from a triple independent of the velocities.

    Admissible iff g^{-1} d_qdot N = a(t,q) + b(t,q)*qdot with scalar b; the
    witness point documents the failure otherwise.
    """

    admissible: bool
    a: tuple[sp.Expr, ...] | None = None
    b: sp.Expr | None = None
    witness: dict[str, float] | None = None
    reason: str = ""


def velocity_independence_check(
    sys: LagrangianSystem, N, *, k: int = 20, tol: float = 1e-8, seed: int = 0
) -> VelocityIndependenceVerdict:
    """Test affineness of w = g^{-1} d_qdot N in the velocities and that its
    velocity Jacobian is a scalar multiple of the identity; extract (a, b)
    on success."""
    Nexpr = _as_expr(N)
    vs = sys.alphabet.velocity_symbols
    grad = [diff(Nexpr, v, sys.alphabet) for v in vs]
    w = invert_g_apply(sys, grad, seed=seed)

    second = [
        sp.diff(w[i], vs[j], vs[l])
        for i in range(sys.n)
        for j in range(sys.n)
        for l in range(j, sys.n)
    ]
    for expr in second:
        rep = sys.check(expr, 0, k=k, tol=tol, seed=seed, label="affine-in-velocity")
        if not rep.passed:
            return VelocityIndependenceVerdict(
                admissible=False, witness=rep.worst_point,
                reason="second velocity derivative does not vanish",
            )
    jac = [[sp.diff(w[i], vs[j]) for j in range(sys.n)] for i in range(sys.n)]
    for i in range(sys.n):
        for j in range(sys.n):
            target = jac[0][0] if i == j else sp.Integer(0)
            rep = sys.check(jac[i][j], target, k=k, tol=tol, seed=seed,
                            label="jacobian-scalar-multiple")
            if not rep.passed:
                return VelocityIndependenceVerdict(
                    admissible=False, witness=rep.worst_point,
                    reason="velocity Jacobian is not a scalar multiple of the identity",
                )
    b = tidy(jac[0][0])
    zero_vel = {v: 0 for v in vs}
    a = tuple(tidy(sp.sympify(wi).subs(zero_vel)) for wi in w)
    # cross-check the extraction against w itself
    for i in range(sys.n):
        rep = sys.check(w[i], a[i] + b * vs[i], k=k, tol=tol, seed=seed,
                        label="affine-extraction")
        if not rep.passed:
            return VelocityIndependenceVerdict(
                admissible=False, witness=rep.worst_point,
                reason="extracted affine form does not reproduce g^{-1} d_qdot N",
            )
    return VelocityIndependenceVerdict(admissible=True, a=a, b=b)
