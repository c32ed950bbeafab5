"""Trajectories of E x' = A x: factorial series from chains, polynomial
solutions from singular polynomials, mild-solution and power-balance
residuals, and uniqueness demonstrations for dissipative pencils.

Series and polynomial trajectories are stored in closed monomial form, so
states, derivatives and time integrals are exact up to floating point; no
truncation spillover occurs because every chain term is finitely supported.
Quadrature (for integrator-produced trajectories) is composite Simpson with
dyadic refinement until the Richardson estimate drops below a tenth of the
requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .operators import Pencil
from .sections import SectionedPencil, section
from .sparsevec import (
    SparseVec,
    vec_add,
    vec_norm,
    vec_scale,
    vec_sub,
)

__all__ = [
    "ChainGenerator",
    "Trajectory",
    "QuadratureError",
    "series_solution",
    "polynomial_solution",
    "mild_residual",
    "power_balance_residual",
    "uniqueness_demo",
    "UniquenessReport",
]

LINK_TOL = 1e-12
RADIUS_MARGIN = 0.1


class QuadratureError(RuntimeError):
    """Raised when the quadrature error estimate exceeds the requested tolerance."""


# ---------------------------------------------------------------------------
# monomial closed forms


@dataclass(frozen=True)
class MonomialForm:
    """Finite sum of terms coeff * t^power with sparse vector coefficients."""

    terms: tuple[tuple[int, SparseVec], ...]

    def evaluate(self, t: float) -> SparseVec:
        return vec_add(*(vec_scale(t**p, c) for p, c in self.terms)) if self.terms else {}

    def derivative(self) -> "MonomialForm":
        return MonomialForm(
            tuple((p - 1, vec_scale(p, c)) for p, c in self.terms if p >= 1)
        )

    def integral(self) -> "MonomialForm":
        """Antiderivative vanishing at t = 0."""
        return MonomialForm(
            tuple((p + 1, vec_scale(1.0 / (p + 1), c)) for p, c in self.terms)
        )

    def mapped(self, op_apply: Callable[[SparseVec], SparseVec]) -> "MonomialForm":
        return MonomialForm(tuple((p, op_apply(c)) for p, c in self.terms))


# ---------------------------------------------------------------------------
# quadrature


def _simpson_pass(fn, a: float, b: float, m: int):
    """Composite Simpson with m subintervals (even)."""
    h = (b - a) / m
    total: SparseVec = {}
    for i in range(m + 1):
        w = 1 if i in (0, m) else (4 if i % 2 else 2)
        total = vec_add(total, vec_scale(w, fn(a + i * h)))
    return vec_scale(h / 3.0, total)


def adaptive_simpson_vec(fn, a: float, b: float, tol: float, m0: int = 8,
                         max_m: int = 4096) -> SparseVec:
    """Dyadically refined composite Simpson; Richardson estimate < 0.1 * tol."""
    if a == b:
        return {}
    m = m0
    prev = _simpson_pass(fn, a, b, m)
    while m <= max_m:
        m *= 2
        cur = _simpson_pass(fn, a, b, m)
        est = vec_norm(vec_sub(cur, prev)) / 15.0
        if est < 0.1 * tol:
            return cur
        prev = cur
    raise QuadratureError(f"quadrature estimate {est:.3e} above tolerance {tol:.3e}")


def adaptive_simpson_scalar(fn, a: float, b: float, tol: float) -> float:
    val = adaptive_simpson_vec(lambda t: {0: fn(t)}, a, b, tol)
    return float(val.get(0, 0.0).real) if val else 0.0


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Sampled solution candidate with optional closed forms and residual columns."""

    times: np.ndarray
    states: list[SparseVec]
    state_fn: Callable[[float], SparseVec] | None = None
    integral_fn: Callable[[float], SparseVec] | None = None
    truncation_order: int | None = None
    residual_classical: np.ndarray | None = None
    residual_mild: np.ndarray | None = None
    residual_pbe: np.ndarray | None = None
    hamiltonian: np.ndarray | None = None
    notes: tuple[str, ...] = ()

    def state(self, t: float) -> SparseVec:
        if self.state_fn is not None:
            return self.state_fn(t)
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-12:
            raise ValueError(f"time {t} not sampled and no closed form available")
        return self.states[idx]


@dataclass(frozen=True)
class ChainGenerator:
    """Sequence a_1, a_2, ... with E a_1 = 0, E a_{k+1} = A a_k and a growth bound.

    The certificate (c, N0) declares ||a_k||, ||A a_k||, ||E a_k|| <= (k/c)^k
    for k >= N0; it is validated on sampled k, and a violation is an error.
    The induced series solution is analytic for |t| < 1/(c e).
    """

    rule: Callable[[int], SparseVec]
    c: float
    n0: int = 1

    @property
    def radius(self) -> float:
        return 1.0 / (self.c * math.e)

    def validate(self, p: Pencil, k_max: int) -> None:
        a = {k: self.rule(k) for k in range(1, k_max + 2)}
        if all(not v for v in a.values()):
            raise ValueError("chain generator is identically zero up to the sampled order")
        e1 = vec_norm(p.E.apply(a[1]))
        if e1 > LINK_TOL:
            raise ValueError(f"E a_1 = 0 violated: ||E a_1|| = {e1:.3e}")
        for k in range(1, k_max + 1):
            defect = vec_norm(vec_sub(p.E.apply(a[k + 1]), p.A.apply(a[k])))
            scale = max(1.0, vec_norm(a[k]))
            if defect > LINK_TOL * scale:
                raise ValueError(f"chain link k={k} violated: defect {defect:.3e}")
        for k in range(max(self.n0, 1), k_max + 2):
            bound = (k / self.c) ** k
            for label, val in (
                ("||a_k||", vec_norm(a[k])),
                ("||A a_k||", vec_norm(p.A.apply(a[k]))),
                ("||E a_k||", vec_norm(p.E.apply(a[k]))),
            ):
                if val > bound * (1 + 1e-12):
                    raise ValueError(
                        f"growth certificate violated at k={k}: {label}={val:.3e} > (k/c)^k={bound:.3e}"
                    )


def series_solution(
    p: Pencil, gen: ChainGenerator, t_grid: Sequence[float], order: int
) -> Trajectory:
    """Truncated factorial series f_M(t) = sum_{j<=M} a_j t^j / j! with exact residuals.

    All grid times must lie inside the certified radius with a 10% margin;
    the classical residual uses the exact derivative of the truncation.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    limit = gen.radius * (1.0 - RADIUS_MARGIN)
    times = np.asarray(list(t_grid), dtype=float)
    if np.any(np.abs(times) > limit):
        raise ValueError(f"time grid leaves the certified radius (|t| <= {limit:.6g})")
    gen.validate(p, order)
    a = {j: gen.rule(j) for j in range(1, order + 1)}
    form = MonomialForm(
        tuple((j, vec_scale(1.0 / math.factorial(j), a[j])) for j in range(1, order + 1))
    )
    e_dot = form.derivative().mapped(p.E.apply)
    a_f = form.mapped(p.A.apply)
    residual = np.array(
        [vec_norm(vec_sub(e_dot.evaluate(t), a_f.evaluate(t))) for t in times]
    )
    integral = form.integral()
    return Trajectory(
        times=times,
        states=[form.evaluate(t) for t in times],
        state_fn=form.evaluate,
        integral_fn=integral.evaluate,
        truncation_order=order,
        residual_classical=residual,
    )


def polynomial_solution(
    p: Pencil,
    sp,
    t_grid: Sequence[float],
    verify_tol: float = 1e-8,
) -> Trajectory:
    """Trajectory f(t) = t * p(t) built from a verified right singular polynomial."""
    from .chains import verify_singular_polynomial

    res = verify_singular_polynomial(p, sp, side="right")
    if res > verify_tol:
        raise ValueError(
            f"polynomial fails singularity verification: residual {res:.3e} > {verify_tol:.1e}"
        )
    times = np.asarray(list(t_grid), dtype=float)
    form = MonomialForm(tuple((j + 1, dict(c)) for j, c in enumerate(sp.coeffs)))
    e_dot = form.derivative().mapped(p.E.apply)
    a_f = form.mapped(p.A.apply)
    residual = np.array(
        [vec_norm(vec_sub(e_dot.evaluate(t), a_f.evaluate(t))) for t in times]
    )
    return Trajectory(
        times=times,
        states=[form.evaluate(t) for t in times],
        state_fn=form.evaluate,
        integral_fn=form.integral().evaluate,
        truncation_order=len(sp.coeffs),
        residual_classical=residual,
    )


def mild_residual(p: Pencil, traj: Trajectory, tol: float = 1e-10) -> np.ndarray:
    """||E x(t) - A \\int_0^t x - E x(0)|| per sample.

    Uses the exact term-wise integral when the trajectory carries one
    (cross-checked by quadrature at the final time); otherwise integrates
    the closed-form state by adaptive Simpson.
    """
    x0 = traj.states[0] if traj.states else (traj.state(float(traj.times[0])))
    ex0 = p.E.apply(x0)
    out = []
    for t in traj.times:
        t = float(t)
        x = traj.state(t)
        if traj.integral_fn is not None:
            integral = traj.integral_fn(t)
        elif traj.state_fn is not None:
            integral = adaptive_simpson_vec(traj.state_fn, 0.0, t, tol)
        else:
            raise ValueError("trajectory has neither a closed form nor a state function")
        res = vec_sub(vec_sub(p.E.apply(x), p.A.apply(integral)), ex0)
        out.append(vec_norm(res))
    if traj.integral_fn is not None and traj.state_fn is not None and len(traj.times):
        t_end = float(traj.times[-1])
        if t_end != 0.0:
            quad = adaptive_simpson_vec(traj.state_fn, 0.0, t_end, tol)
            drift = vec_norm(vec_sub(quad, traj.integral_fn(t_end)))
            if drift > tol:
                raise QuadratureError(
                    f"quadrature cross-check drift {drift:.3e} above {tol:.1e}"
                )
    result = np.asarray(out)
    traj.residual_mild = result
    return result


def power_balance_residual(
    p: Pencil, traj: Trajectory, tol: float = 1e-8
) -> tuple[np.ndarray, np.ndarray]:
    """|energy change - accumulated dissipation| per time, plus the Hamiltonian trace.

    The balance compares <E f(t0), Q f(t0)> - <E f(0), Q f(0)> against
    2 Re int_0^{t0} <B Q f, Q f>; the Hamiltonian is H = 1/2 <E f, Q f>.
    """
    if p.dh is None:
        raise ValueError("pencil carries no dissipative-Hamiltonian metadata")
    if traj.state_fn is None:
        raise ValueError("power balance needs a closed-form or dense-output state")
    E, Q, B = p.E, p.dh.Q, p.dh.B

    def energy(t: float) -> float:
        f = traj.state_fn(t)
        from .sparsevec import vec_inner

        return float(vec_inner(E.apply(f), Q.apply(f)).real)

    def dissipation(t: float) -> float:
        f = traj.state_fn(t)
        from .sparsevec import vec_inner

        qf = Q.apply(f)
        return 2.0 * float(vec_inner(B.apply(qf), qf).real)

    times = traj.times
    e0 = energy(float(times[0]))
    residuals = []
    hams = []
    acc = 0.0
    prev_t = float(times[0])
    for t in times:
        t = float(t)
        if t != prev_t:
            acc += adaptive_simpson_scalar(dissipation, prev_t, t, tol)
            prev_t = t
        lhs = energy(t) - e0
        residuals.append(abs(lhs - acc))
        hams.append(0.5 * (energy(t)))
    res = np.asarray(residuals)
    ham = np.asarray(hams)
    traj.residual_pbe = res
    traj.hamiltonian = ham
    return res, ham


@dataclass
class UniquenessReport:
    kernel_dim: int
    margin: float
    witness: SparseVec | None
    trajectories: list[Trajectory] = field(default_factory=list)
    max_distance: float = 0.0
    mild_residuals: list[float] = field(default_factory=list)
    unique: bool = True
    notes: tuple[str, ...] = ()


def uniqueness_demo(
    p: Pencil,
    x0: SparseVec,
    t_grid: Sequence[float],
    n: int = 12,
    tol: float = 1e-10,
) -> UniquenessReport:
    """Exhibit two mild solutions (kernel drift) or a section-level uniqueness certificate.

    Requires dH metadata: for these pencils uniqueness of mild solutions is
    equivalent to triviality of ker E intersect ker(BQ).  Verdicts describe
    the chosen section window.
    """
    if p.dh is None:
        raise ValueError(
            "not a dissipative-Hamiltonian pencil; use series_solution to "
            "exhibit non-uniqueness for unstructured pencils"
        )
    from .dh import dh_common_kernel, dh_section_mats

    s = section(p, n)
    mats = dh_section_mats(s, p.dh)
    kdim, basis = dh_common_kernel(s, p.dh)
    stacked = np.vstack([mats.E, mats.BQ])
    svals = scipy.linalg.svdvals(stacked)
    times = np.asarray(list(t_grid), dtype=float)
    indices = s.window_in.indices
    if kdim == 0:
        return UniquenessReport(
            kernel_dim=0,
            margin=float(svals[-1]),
            witness=None,
            unique=True,
            notes=("no common kernel on this window; mild solutions from equal "
                   "initial values coincide",),
        )
    if any(vec_norm(x0) for _ in [0]) and vec_norm(x0) > 0:
        raise ValueError("non-uniqueness demo supports x0 = 0 only")
    v = {j: complex(c) for j, c in zip(indices, basis[:, 0]) if c != 0}
    zero_traj = Trajectory(
        times=times,
        states=[{} for _ in times],
        state_fn=lambda t: {},
        integral_fn=lambda t: {},
    )
    drift_form = MonomialForm(((1, v),))
    drift_traj = Trajectory(
        times=times,
        states=[drift_form.evaluate(float(t)) for t in times],
        state_fn=drift_form.evaluate,
        integral_fn=drift_form.integral().evaluate,
    )
    r0 = mild_residual(p, zero_traj, tol)
    r1 = mild_residual(p, drift_traj, tol)
    dist = max(
        vec_norm(vec_sub(a, b)) for a, b in zip(zero_traj.states, drift_traj.states)
    )
    return UniquenessReport(
        kernel_dim=kdim,
        margin=float(svals[-1]),
        witness=v,
        trajectories=[zero_traj, drift_traj],
        max_distance=float(dist),
        mild_residuals=[float(r0.max()), float(r1.max())],
        unique=False,
        notes=("two distinct mild solutions share the initial value 0",),
    )
