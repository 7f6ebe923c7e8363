"""Dense two-phase simplex for the small LPs behind geometry and verification.

Determinism matters more than speed here: entering columns use Dantzig's rule
with a permanent switch to Bland's rule once the objective stalls, ratio-test
ties break on the smallest basis index, and identical inputs always produce
identical pivot sequences.  Free variables are handled by sign splitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-7    # constraint residual tolerance
COST_TOL = 1e-9    # reduced-cost (optimality) tolerance
PIVOT_TOL = 1e-10  # smallest acceptable pivot element

LE, EQ, GE = "<=", "=", ">="


class LPError(RuntimeError):
    """Iteration cap exceeded or an internal consistency check failed."""


class InfeasibleRegionError(ValueError):
    """An operation that requires a non-empty region got an empty one."""


@dataclass
class LinearProgram:
    objective: np.ndarray
    sense: str = "min"
    constraints: list[tuple[np.ndarray, str, float]] = field(default_factory=list)
    variable_bounds: list[tuple[float, float]] | None = None


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None = None
    point: np.ndarray | None = None


def _pivot(T: np.ndarray, basis: list[int], r: int, j: int):
    T[r] = T[r] / T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j


def _run_simplex(T: np.ndarray, basis: list[int], max_iter: int) -> str:
    """Minimize. Returns "optimal" or "unbounded"; pivots T in place."""
    m = T.shape[0] - 1
    bland = False
    stall = 0
    stall_limit = 2 * (T.shape[0] + T.shape[1])
    last_obj = T[-1, -1]
    for it in range(max_iter):
        zrow = T[-1, :-1]
        if bland:
            negs = np.where(zrow < -COST_TOL)[0]
            if negs.size == 0:
                return "optimal"
            j = int(negs[0])
        else:
            j = int(np.argmin(zrow))
            if zrow[j] >= -COST_TOL:
                return "optimal"
        col = T[:-1, j]
        rhs = T[:-1, -1]
        mask = col > PIVOT_TOL
        if not mask.any():
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[mask] = rhs[mask] / col[mask]
        rmin = ratios.min()
        cand = np.where(ratios <= rmin + 1e-12)[0]
        r = int(cand[int(np.argmin([basis[i] for i in cand]))])
        _pivot(T, basis, r, j)
        obj = T[-1, -1]
        if obj > last_obj + 1e-12:
            stall = 0
            last_obj = obj
        else:
            stall += 1
            if stall > stall_limit:
                bland = True
    raise LPError(f"simplex iteration cap {max_iter} exceeded; LP may be ill-conditioned")


def solve(lp: LinearProgram) -> LPResult:
    """Two-phase simplex. Statuses are data; only the iteration cap raises."""
    c = np.asarray(lp.objective, dtype=np.float64)
    n = c.shape[0]
    if lp.sense not in ("min", "max"):
        raise ValueError(f"unknown sense {lp.sense!r}")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite objective")

    rows = []
    for a, rel, b in lp.constraints:
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (n,):
            raise ValueError("constraint dimension mismatch")
        if not (np.all(np.isfinite(a)) and np.isfinite(b)):
            raise ValueError("non-finite constraint")
        rows.append((a, rel, float(b)))
    if lp.variable_bounds is not None:
        for i, (lo, hi) in enumerate(lp.variable_bounds):
            e = np.zeros(n)
            e[i] = 1.0
            if lo is not None and np.isfinite(lo):
                rows.append((-e, LE, -float(lo)))
            if hi is not None and np.isfinite(hi):
                rows.append((e.copy(), LE, float(hi)))

    m = len(rows)
    cap = max(1000, 10 * (n + m) ** 2)
    c_min = c if lp.sense == "min" else -c

    # split free variables: x = xp - xn, both >= 0
    A = np.empty((m, 2 * n))
    b_vec = np.empty(m)
    rels = []
    for i, (a, rel, b) in enumerate(rows):
        if b < 0:
            a, b = -a, -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        A[i, :n] = a
        A[i, n:] = -a
        b_vec[i] = b
        rels.append(rel)

    n_slack = sum(1 for r in rels if r == LE)
    n_surp = sum(1 for r in rels if r == GE)
    n_art = sum(1 for r in rels if r != LE)
    width = 2 * n + n_slack + n_surp + n_art
    slack0, surp0, art0 = 2 * n, 2 * n + n_slack, 2 * n + n_slack + n_surp

    T = np.zeros((m + 1, width + 1))
    basis = [0] * m
    si = ti = ai = 0
    for i in range(m):
        T[i, : 2 * n] = A[i]
        T[i, -1] = b_vec[i]
        if rels[i] == LE:
            T[i, slack0 + si] = 1.0
            basis[i] = slack0 + si
            si += 1
        else:
            if rels[i] == GE:
                T[i, surp0 + ti] = -1.0
                ti += 1
            T[i, art0 + ai] = 1.0
            basis[i] = art0 + ai
            ai += 1

    if n_art > 0:
        # phase 1: minimize the sum of artificials
        T[-1, art0 : art0 + n_art] = 1.0
        for i in range(m):
            if basis[i] >= art0:
                T[-1] -= T[i]
        status = _run_simplex(T, basis, cap)
        if status != "optimal":
            raise LPError("phase-1 simplex did not terminate at an optimum")
        if -T[-1, -1] > FEAS_TOL:
            return LPResult("infeasible")
        # drive remaining artificials out of the basis
        drop_rows = []
        for i in range(m):
            if basis[i] >= art0:
                pivots = np.where(np.abs(T[i, :art0]) > 1e-9)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    drop_rows.append(i)  # redundant row
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            T = np.vstack([T[keep], T[-1:]])
            basis = [basis[i] for i in keep]
            m = len(keep)
        T = np.hstack([T[:, :art0], T[:, -1:]])
        width = art0

    # phase 2 objective on the reduced tableau
    c_ext = np.zeros(width)
    c_ext[:n] = c_min
    c_ext[n : 2 * n] = -c_min
    T[-1, :-1] = c_ext
    T[-1, -1] = 0.0
    for i in range(m):
        cb = c_ext[basis[i]]
        if cb != 0.0:
            T[-1] -= cb * T[i]
    status = _run_simplex(T, basis, cap)
    if status == "unbounded":
        return LPResult("unbounded")

    x_ext = np.zeros(width)
    for i in range(m):
        x_ext[basis[i]] = T[i, -1]
    x = x_ext[:n] - x_ext[n : 2 * n]

    for a, rel, b in rows:
        resid = float(a @ x) - b
        ok = (rel == LE and resid <= FEAS_TOL) or (rel == GE and resid >= -FEAS_TOL) or (
            rel == EQ and abs(resid) <= FEAS_TOL
        )
        if not ok:
            raise LPError(f"solution violates a constraint by {abs(resid):.3e}")
    return LPResult("optimal", float(c @ x), x)


def _region(poly) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(poly, "A") and hasattr(poly, "b"):
        return np.asarray(poly.A, dtype=np.float64), np.asarray(poly.b, dtype=np.float64)
    A, b = poly
    return np.asarray(A, dtype=np.float64), np.asarray(b, dtype=np.float64)


def _optimize_via_dual(c: np.ndarray, A: np.ndarray, b: np.ndarray, sense: str):
    """Optimize c.x over {A x <= b} through the dual LP.

    The dual (min b.y s.t. A^T y = c, y >= 0) has only n rows for m
    constraints, so tall regions (hulls with thousands of facets) stay cheap.
    Returns None when the primal point cannot be recovered reliably, letting
    the caller fall back to the primal simplex.
    """
    m, n = A.shape
    c_max = c if sense == "max" else -c

    AT = A.T.copy()
    rhs = c_max.copy()
    flip = rhs < 0
    AT[flip] *= -1.0
    rhs = np.abs(rhs)

    width = m + n
    T = np.zeros((n + 1, width + 1))
    T[:n, :m] = AT
    T[:n, -1] = rhs
    basis = []
    for i in range(n):
        T[i, m + i] = 1.0
        basis.append(m + i)
    T[-1, m : m + n] = 1.0
    for i in range(n):
        T[-1] -= T[i]
    cap = max(1000, 10 * (m + n) ** 2)
    if _run_simplex(T, basis, cap) != "optimal":
        raise LPError("phase-1 simplex did not terminate at an optimum")
    if -T[-1, -1] > FEAS_TOL:
        # dual infeasible: the primal objective is unbounded over the region
        raise LPError("objective unbounded over region; region is not a bounded polytope")
    for i in range(n):
        if basis[i] >= m:
            pivots = np.where(np.abs(T[i, :m]) > 1e-9)[0]
            if pivots.size:
                _pivot(T, basis, i, int(pivots[0]))
    T = np.hstack([T[:, :m], T[:, -1:]])
    if any(bi >= m for bi in basis):
        return None  # redundant dual row kept an artificial basic; fall back
    T[-1, :-1] = b
    T[-1, -1] = 0.0
    for i in range(n):
        cb = b[basis[i]]
        if cb != 0.0:
            T[-1] -= cb * T[i]
    status = _run_simplex(T, basis, cap)
    if status == "unbounded":
        raise InfeasibleRegionError("region is empty")

    y_val = {basis[i]: T[i, -1] for i in range(n)}
    value_max = sum(b[j] * v for j, v in y_val.items())
    active = sorted(y_val.keys())
    sub_A = A[active]
    sub_b = b[active]
    if len(active) == n and abs(np.linalg.det(sub_A)) > 1e-12:
        x = np.linalg.solve(sub_A, sub_b)
    else:
        x, *_ = np.linalg.lstsq(sub_A, sub_b, rcond=None)
    scale = 1.0 + float(np.max(np.abs(b))) + float(np.max(np.abs(c)))
    if np.max(A @ x - b) > FEAS_TOL * scale or abs(float(c_max @ x) - value_max) > 1e-6 * scale:
        return None  # degenerate recovery; fall back to the primal path
    value = value_max if sense == "max" else -value_max
    return value, x


# use the dual path once a region is this much taller than wide
_DUAL_ROW_FACTOR = 8
_DUAL_MIN_ROWS = 80


def optimize_linear(c, poly, sense: str) -> tuple[float, np.ndarray]:
    """Exact min/max of c.z over an H-rep region (a Polytope or an (A, b) pair)."""
    A, b = _region(poly)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if m >= max(_DUAL_MIN_ROWS, _DUAL_ROW_FACTOR * n):
        result = _optimize_via_dual(c, A, b, sense)
        if result is not None:
            return result
    lp = LinearProgram(
        objective=c,
        sense=sense,
        constraints=[(A[i], LE, float(b[i])) for i in range(A.shape[0])],
    )
    res = solve(lp)
    if res.status == "infeasible":
        raise InfeasibleRegionError("region is empty")
    if res.status == "unbounded":
        raise LPError("objective unbounded over region; region is not a bounded polytope")
    return res.value, res.point


def feasible(halfspaces) -> tuple[bool, np.ndarray | None]:
    """Phase-1 feasibility of an H-rep; returns a witness point when non-empty."""
    A, b = _halfspace_arrays(halfspaces)
    m, n = A.shape
    if m >= max(_DUAL_MIN_ROWS, _DUAL_ROW_FACTOR * (n + 1)):
        # tall regions: decide by the largest inscribed ball (radius capped at 1)
        norms = np.linalg.norm(A, axis=1)
        A2 = np.vstack([np.hstack([A, norms[:, None]]), np.zeros((1, n + 1))])
        A2[-1, -1] = 1.0
        b2 = np.concatenate([b, [1.0]])
        obj = np.zeros(n + 1)
        obj[-1] = 1.0
        try:
            val, pt = optimize_linear(obj, (A2, b2), "max")
        except InfeasibleRegionError:
            return False, None
        if val >= -FEAS_TOL and np.all(A @ pt[:n] <= b + FEAS_TOL):
            return True, pt[:n]
        return False, None
    lp = LinearProgram(
        objective=np.zeros(n),
        sense="min",
        constraints=[(A[i], LE, float(b[i])) for i in range(m)],
    )
    res = solve(lp)
    if res.status == "optimal":
        return True, res.point
    return False, None


def _halfspace_arrays(halfspaces) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(halfspaces, "A") and hasattr(halfspaces, "b"):
        return _region(halfspaces)
    if isinstance(halfspaces, tuple) and len(halfspaces) == 2 and np.ndim(halfspaces[0]) == 2:
        return _region(halfspaces)
    first = halfspaces[0]
    if hasattr(first, "a"):
        A = np.array([h.a for h in halfspaces], dtype=np.float64)
        b = np.array([h.b for h in halfspaces], dtype=np.float64)
    else:
        A = np.array([a for a, _ in halfspaces], dtype=np.float64)
        b = np.array([v for _, v in halfspaces], dtype=np.float64)
    return A, b


def chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball of {z : A z <= b}."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    A2 = np.vstack([np.hstack([A, norms[:, None]]), np.zeros((1, d + 1))])
    A2[-1, -1] = -1.0  # radius stays nonnegative
    b2 = np.concatenate([b, [0.0]])
    obj = np.zeros(d + 1)
    obj[-1] = 1.0
    try:
        val, pt = optimize_linear(obj, (A2, b2), "max")
    except InfeasibleRegionError:
        raise InfeasibleRegionError("region is empty") from None
    return pt[:d], float(val)


def certify_optimum(lp: LinearProgram, result: LPResult) -> float:
    """Reconstruct dual multipliers for an all-<= LP and return the certificate gap.

    The gap is max(stationarity residual, complementarity mismatch); small
    values certify that result.value really bounds the LP.
    """
    from scipy.optimize import nnls

    if result.status != "optimal":
        raise ValueError("can only certify optimal results")
    c = np.asarray(lp.objective, dtype=np.float64)
    sign = 1.0 if lp.sense == "max" else -1.0
    A = np.array([a for a, rel, _ in lp.constraints], dtype=np.float64)
    b = np.array([v for _, _, v in lp.constraints], dtype=np.float64)
    if any(rel != LE for _, rel, _ in lp.constraints):
        raise ValueError("certification supports <=-only LPs")
    # complementary slackness: multipliers live on active constraints only
    active = A @ result.point >= b - 1e-6
    if not active.any():
        return float(np.max(np.abs(c)))
    mu_act, _ = nnls(A[active].T, sign * c)
    stat = float(np.max(np.abs(A[active].T @ mu_act - sign * c)))
    gap = abs(float(b[active] @ mu_act) - sign * result.value)
    return max(stat, gap)
