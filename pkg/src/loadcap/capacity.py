"""Generalized stress concentration factor, load capacity ratio and
limit-analysis quantities.

K is the operator norm of the boundary trace on the clamped kinematic
space: the supremum of boundary L1 norm over strain norm.  Its exact
computation maximizes a convex piecewise-linear functional over a
polytope, done here by exhaustive enumeration of boundary sign patterns
(hard cap 16 scalar components); beyond the cap an alternating heuristic
produces a certified lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kinematics import (DiscreteOperators, check_traction, strain_norm_l1,
                         strain_norm_plastic, trace, traction_sup_norm,
                         work_vector)
from . import lp
from .stress import (ELASTIC, PLASTIC, SolverFailure, _dual_builder,
                     check_mode, kinematic_supremum, optimal_stress,
                     optimal_stress_dual, require_plastic_viable)

EXACT = "exact_vertex_enumeration"
HEURISTIC = "alternating_heuristic"
SIGN_PATTERN_CAP = 16
HEURISTIC_MAX_ITER = 50
HEURISTIC_RESTARTS = 8


class CapacityError(ValueError):
    """Zero traction, size-cap violation, or non-viable plastic request."""


@dataclass(frozen=True)
class CapacityResult:
    K: float
    C: float
    worst_traction: np.ndarray = field(repr=False)
    method: str = EXACT
    certificate: np.ndarray = field(repr=False, default=None)
    lower_bound_only: bool = False
    converged: bool = True


@dataclass(frozen=True)
class LimitResult:
    Y0: float
    sigma_opt: float
    lambda_star: float
    t_collapse: np.ndarray = field(repr=False, default=None)


def _boundary_component_count(ops: DiscreteOperators) -> int:
    return len(ops.gammat_facets) * ops.dim


def concentration_factor_for(ops: DiscreteOperators, t, mode: str = ELASTIC) -> float:
    """Stress concentration factor for one traction: sigma_opt / |t|_inf."""
    t = check_traction(ops, t)
    denom = traction_sup_norm(ops, t)
    if denom == 0.0:
        raise CapacityError("concentration factor undefined for zero traction")
    return optimal_stress(ops, t, mode).sigma_opt / denom


def _pattern_objective(ops: DiscreteOperators, signs: np.ndarray) -> np.ndarray:
    """DOF functional sum_f area_f s_f . trace_f(w) for a sign pattern."""
    f = np.zeros(ops.n_dof)
    s = signs.reshape(len(ops.gammat_facets), ops.dim)
    for a, sv, T in zip(ops.areas, s, ops.trace_maps):
        f += a * (sv @ T)
    return f


def _strain_measure(ops: DiscreteOperators, w, mode: str) -> float:
    return strain_norm_plastic(ops, w) if mode == PLASTIC else strain_norm_l1(ops, w)


def generalized_K(ops: DiscreteOperators, mode: str = ELASTIC,
                  method: str = EXACT) -> CapacityResult:
    """Compute K = sup_w trace_norm / strain_norm (plastic: isochoric w)."""
    check_mode(mode)
    if mode == PLASTIC:
        require_plastic_viable(ops)
    m = _boundary_component_count(ops)
    if method == EXACT:
        if m > SIGN_PATTERN_CAP:
            raise CapacityError(
                f"exact enumeration capped at {SIGN_PATTERN_CAP} boundary "
                f"components; this mesh has {m} (use the heuristic)")
        best_val, best_signs, best_w = -1.0, None, None
        # signs and -signs give the same value; fix the first sign positive
        for code in range(2 ** max(m - 1, 0)):
            signs = np.ones(m)
            for bit in range(m - 1):
                if code >> bit & 1:
                    signs[bit + 1] = -1.0
            val, w = kinematic_supremum(ops, _pattern_objective(ops, signs), mode)
            if val > best_val + 1e-12:
                best_val, best_signs, best_w = val, signs, w
        K = max(best_val, 0.0)
        worst = best_signs.reshape(len(ops.gammat_facets), ops.dim)
        return CapacityResult(K=K, C=_safe_inverse(K), worst_traction=worst,
                              method=EXACT, certificate=best_w)
    if method == HEURISTIC:
        rng = np.random.default_rng(0)
        starts = [np.ones(m)]
        starts += [np.where(rng.random(m) < 0.5, -1.0, 1.0)
                   for _ in range(HEURISTIC_RESTARTS - 1)]
        best_val, best_w, best_signs = -1.0, None, starts[0]
        n_converged = 0
        for signs in starts:
            for _ in range(HEURISTIC_MAX_ITER):
                val, w = kinematic_supremum(ops, _pattern_objective(ops, signs),
                                            mode)
                if val > best_val + 1e-12:
                    best_val, best_signs, best_w = val, signs, w
                tr = trace(ops, w).reshape(-1)
                new_signs = np.where(tr >= 0.0, 1.0, -1.0)
                if np.array_equal(new_signs, signs):
                    n_converged += 1
                    break
                signs = new_signs
        K = max(best_val, 0.0)
        worst = best_signs.reshape(len(ops.gammat_facets), ops.dim)
        return CapacityResult(K=K, C=_safe_inverse(K), worst_traction=worst,
                              method=HEURISTIC, certificate=best_w,
                              lower_bound_only=True,
                              converged=n_converged == len(starts))
    raise CapacityError(f"unknown method {method!r}")


def _safe_inverse(K: float) -> float:
    return float("inf") if K == 0.0 else 1.0 / K


def generalized_K_dual_check(ops: DiscreteOperators, mode: str = ELASTIC) -> float:
    """K recomputed from the traction side: max of sigma_opt over the
    vertices (per-component sign vectors) of the unit traction ball."""
    check_mode(mode)
    if mode == PLASTIC:
        require_plastic_viable(ops)
    m = _boundary_component_count(ops)
    if m > SIGN_PATTERN_CAP:
        raise CapacityError(
            f"traction-vertex enumeration capped at {SIGN_PATTERN_CAP} "
            f"components; this mesh has {m}")
    best = 0.0
    for code in range(2 ** max(m - 1, 0)):
        signs = np.ones(m)
        for bit in range(m - 1):
            if code >> bit & 1:
                signs[bit + 1] = -1.0
        t = signs.reshape(len(ops.gammat_facets), ops.dim)
        val, _ = optimal_stress_dual(ops, t, mode)
        best = max(best, val)
    return best


def load_capacity(ops: DiscreteOperators, mode: str = ELASTIC,
                  method: str = EXACT) -> CapacityResult:
    """Load capacity ratio C = 1/K (inf when nothing is loadable)."""
    return generalized_K(ops, mode, method)


def limit_analysis(ops: DiscreteOperators, t, Y0: float) -> LimitResult:
    """Limit-analysis factor Y0/sigma_opt and the collapse-manifold
    projection of the traction, verified by recomputation."""
    t = check_traction(ops, t)
    if Y0 <= 0:
        raise CapacityError("yield stress Y0 must be positive")
    if traction_sup_norm(ops, t) == 0.0:
        raise CapacityError("limit analysis undefined for zero traction")
    result = optimal_stress(ops, t, PLASTIC)
    sigma_opt = result.sigma_opt
    if sigma_opt <= 0.0:
        raise CapacityError(
            "traction does no work against admissible fields; no collapse load")
    lambda_star = Y0 / sigma_opt
    t_collapse = t * (Y0 / sigma_opt)
    check = optimal_stress(ops, t_collapse, PLASTIC)
    if abs(check.sigma_opt - Y0) > 1e-6 * (1.0 + Y0):
        raise SolverFailure(
            f"collapse projection failed: sigma_opt(t_psi)={check.sigma_opt!r} "
            f"vs Y0={Y0!r}")
    return LimitResult(Y0=Y0, sigma_opt=sigma_opt, lambda_star=lambda_star,
                       t_collapse=t_collapse)


def kinematic_limit_check(ops: DiscreteOperators, t, Y0: float):
    """Static vs kinematic limit factor.

    The kinematic value minimizes the (plastic) strain budget over
    isochoric fields doing unit external work, scaled by Y0.
    Returns (lambda_static, lambda_kinematic, gap).
    """
    static = limit_analysis(ops, t, Y0)
    f = work_vector(ops, check_traction(ops, t))
    builder, w_vars, budget = _dual_builder(ops, PLASTIC)
    builder.add_eq({w_vars[k]: f[k] for k in range(ops.n_dof)}, 1.0)
    builder.set_objective(budget)
    prob, recover = builder.build()
    sol = lp.solve(prob)
    if sol.status == lp.INFEASIBLE:
        raise CapacityError(
            "no admissible field does work against this traction; "
            "kinematic normalization infeasible")
    if sol.status != lp.OPTIMAL:
        raise SolverFailure(f"kinematic limit LP ended with status {sol.status}")
    lambda_kin = Y0 * float(sol.objective)
    gap = abs(static.lambda_star - lambda_kin)
    return static.lambda_star, lambda_kin, gap
