"""Three-block consensus ADMM for small semidefinite programs.

Solves

    minimize    trace(C X) + l1_weight * sum(|X_ij|)
    subject to  trace(A_i X)  = b_i
                trace(G_j X) >= h_j
                X symmetric positive semidefinite
                lo <= X_ij <= hi          (optional box)
                X_ij = 0 on a fixed mask  (optional)

by splitting the constraints into three prox-friendly pieces sharing a
consensus variable: an affine projection onto the equality system (with
slack variables turning inequalities into equalities), a projection onto
the semidefinite cone, and an elementwise clamp combining the l1 shrink,
the box and the zero mask.  The linear objective enters through the
consensus average.

The solver is deterministic: identical problems and configurations produce
identical iterates.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NotSymmetric

__all__ = [
    "SdpProblem",
    "SolverConfig",
    "SdpSolution",
    "sym_eigen",
    "psd_project",
    "soft_threshold",
    "solve",
]

_SYM_ATOL = 1e-10

# Residual-balancing schedule (scaled dual form): grow or shrink the
# penalty when one residual dominates the other by _ADAPT_RATIO, stop
# adapting after _ADAPT_CUTOFF iterations so the iteration map is fixed
# and convergence arguments apply.
_ADAPT_RATIO = 10.0
_ADAPT_SCALE = 2.0
_ADAPT_CUTOFF = 2000

_DIVERGE_FACTOR = 1e6


def _as_sym(mat, name: str):
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > _SYM_ATOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")
    out = 0.5 * (arr + arr.T)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SdpProblem:
    """Data of one semidefinite program over symmetric ``dim x dim`` matrices."""

    dim: int
    objective_linear: np.ndarray
    l1_weight: float = 0.0
    eq_constraints: tuple = ()
    ineq_constraints: tuple = ()
    box: tuple = None
    fixed_zero_mask: np.ndarray = None

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        obj = _as_sym(self.objective_linear, "objective_linear")
        if obj.shape[0] != self.dim:
            raise ValueError("objective_linear has wrong dimension")
        object.__setattr__(self, "objective_linear", obj)
        if self.l1_weight < 0:
            raise ValueError("l1_weight must be nonnegative")
        eqs = []
        for idx, (mat, rhs) in enumerate(self.eq_constraints):
            sym = _as_sym(mat, f"eq_constraints[{idx}]")
            if sym.shape[0] != self.dim:
                raise ValueError(f"eq_constraints[{idx}] has wrong dimension")
            eqs.append((sym, float(rhs)))
        object.__setattr__(self, "eq_constraints", tuple(eqs))
        ineqs = []
        for idx, (mat, rhs) in enumerate(self.ineq_constraints):
            sym = _as_sym(mat, f"ineq_constraints[{idx}]")
            if sym.shape[0] != self.dim:
                raise ValueError(f"ineq_constraints[{idx}] has wrong dimension")
            ineqs.append((sym, float(rhs)))
        object.__setattr__(self, "ineq_constraints", tuple(ineqs))
        if self.box is not None:
            lo, hi = float(self.box[0]), float(self.box[1])
            if lo > hi:
                raise ValueError("box lower bound exceeds upper bound")
            if self.l1_weight > 0 and not (lo <= 0.0 <= hi):
                raise ValueError(
                    "l1 shrinkage with a box requires 0 inside the box"
                )
            object.__setattr__(self, "box", (lo, hi))
        if self.fixed_zero_mask is not None:
            mask = np.asarray(self.fixed_zero_mask, dtype=bool)
            if mask.shape != (self.dim, self.dim):
                raise ValueError("fixed_zero_mask has wrong shape")
            if not np.array_equal(mask, mask.T):
                raise NotSymmetric("fixed_zero_mask is not symmetric")
            mask = mask.copy()
            mask.setflags(write=False)
            object.__setattr__(self, "fixed_zero_mask", mask)


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for :func:`solve`."""

    rho: float = 1.0
    max_iters: int = 20000
    eps_primal: float = 1e-6
    eps_dual: float = 1e-6
    over_relax: float = 1.6
    check_every: int = 25
    seed: int = 0
    trace_path: str = None

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if self.eps_primal <= 0 or self.eps_dual <= 0:
            raise ValueError("tolerances must be positive")
        if not (1.0 <= self.over_relax < 2.0):
            raise ValueError("over_relax must lie in [1, 2)")
        if self.check_every <= 0:
            raise ValueError("check_every must be positive")


@dataclass(frozen=True)
class SdpSolution:
    """Result of :func:`solve`; ``status`` is Converged, MaxIters or Diverged."""

    matrix: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    iters: int
    status: str


def sym_eigen(mat):
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending."""
    arr = np.asarray(mat, dtype=float)
    _as_sym(arr, "matrix")
    vals, vecs = np.linalg.eigh(0.5 * (arr + arr.T))
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def psd_project(mat):
    """Nearest (Frobenius) positive semidefinite matrix."""
    arr = 0.5 * (np.asarray(mat, dtype=float) + np.asarray(mat, dtype=float).T)
    vals, vecs = np.linalg.eigh(arr)
    clipped = np.maximum(vals, 0.0)
    return (vecs * clipped) @ vecs.T


def soft_threshold(x, t: float):
    """Elementwise shrink toward zero by ``t``."""
    arr = np.asarray(x, dtype=float)
    return np.sign(arr) * np.maximum(np.abs(arr) - t, 0.0)


def _alive_indices(problem: SdpProblem):
    """Indices whose row is not entirely forced to zero."""
    if problem.fixed_zero_mask is None:
        return None
    dead = problem.fixed_zero_mask.all(axis=1)
    if not dead.any():
        return None
    return np.flatnonzero(~dead)


def _restrict(problem: SdpProblem, alive) -> SdpProblem:
    """Restrict the program to the block of indices that can be nonzero.

    Masked-to-zero entries contribute nothing to any trace form, so every
    constraint keeps its meaning on the submatrix.
    """
    sub = np.ix_(alive, alive)
    return SdpProblem(
        dim=len(alive),
        objective_linear=problem.objective_linear[sub],
        l1_weight=problem.l1_weight,
        eq_constraints=tuple(
            (mat[sub], rhs) for mat, rhs in problem.eq_constraints
        ),
        ineq_constraints=tuple(
            (mat[sub], rhs) for mat, rhs in problem.ineq_constraints
        ),
        box=problem.box,
        fixed_zero_mask=problem.fixed_zero_mask[sub],
    )


def _stack_rows(problem: SdpProblem):
    """Equality system K y = c over the joint vector (vec(X), slacks).

    Inequalities ``trace(G X) >= h`` become ``trace(G X) - t = h`` with a
    nonnegative slack ``t``.  Rows are scaled to unit norm; vacuous rows
    (zero matrix, zero right side) are dropped and contradictory zero rows
    rejected.
    """
    m2 = problem.dim * problem.dim
    q = len(problem.ineq_constraints)
    rows, rhs = [], []
    for mat, b in problem.eq_constraints:
        rows.append(np.concatenate([mat.ravel(), np.zeros(q)]))
        rhs.append(b)
    for j, (mat, h) in enumerate(problem.ineq_constraints):
        row = np.concatenate([mat.ravel(), np.zeros(q)])
        row[m2 + j] = -1.0
        rows.append(row)
        rhs.append(h)
    if not rows:
        return None, None
    K = np.asarray(rows)
    c = np.asarray(rhs, dtype=float)
    norms = np.linalg.norm(K, axis=1)
    vacuous = norms < 1e-12
    if vacuous.any():
        if np.any(np.abs(c[vacuous]) > 1e-9):
            raise ValueError("constraint with zero matrix and nonzero bound")
        K, c, norms = K[~vacuous], c[~vacuous], norms[~vacuous]
        if K.shape[0] == 0:
            return None, None
    return K / norms[:, None], c / norms


def _gram_pinv(K):
    """Pseudo-inverse of K K^T via its eigen-decomposition.

    The constraint systems built here routinely contain duplicated rows
    (row sums versus column sums of a symmetric variable), so the Gram
    matrix is singular and a plain inverse would fail.
    """
    gram = K @ K.T
    vals, vecs = np.linalg.eigh(gram)
    cutoff = 1e-12 * max(1.0, float(vals.max(initial=0.0)))
    inv = np.where(vals > cutoff, 1.0 / np.maximum(vals, cutoff), 0.0)
    return vecs, inv


def _infeasibility(problem: SdpProblem, X) -> float:
    """Largest violation of any constraint class by the matrix ``X``."""
    worst = 0.0
    for mat, b in problem.eq_constraints:
        worst = max(worst, abs(float(np.sum(mat * X)) - b))
    for mat, h in problem.ineq_constraints:
        worst = max(worst, max(0.0, h - float(np.sum(mat * X))))
    evals = np.linalg.eigvalsh(0.5 * (X + X.T))
    worst = max(worst, max(0.0, -float(evals[0])))
    if problem.box is not None:
        lo, hi = problem.box
        worst = max(worst, float(np.max(np.maximum(lo - X, 0.0))))
        worst = max(worst, float(np.max(np.maximum(X - hi, 0.0))))
    if problem.fixed_zero_mask is not None and problem.fixed_zero_mask.any():
        worst = max(worst, float(np.max(np.abs(X[problem.fixed_zero_mask]))))
    worst = max(worst, float(np.max(np.abs(X - X.T))))
    return worst


def _objective(problem: SdpProblem, X) -> float:
    val = float(np.sum(problem.objective_linear * X))
    if problem.l1_weight > 0:
        val += problem.l1_weight * float(np.sum(np.abs(X)))
    return val


def _solve_core(problem: SdpProblem, cfg: SolverConfig) -> SdpSolution:
    m = problem.dim
    m2 = m * m
    q = len(problem.ineq_constraints)
    dim = m2 + q

    K, c = _stack_rows(problem)
    if K is not None:
        vecs_g, inv_g = _gram_pinv(K)

    c_obj = np.concatenate([problem.objective_linear.ravel(), np.zeros(q)])

    def prox_affine(y):
        if K is None:
            return y
        resid = K @ y - c
        return y - K.T @ (vecs_g @ (inv_g * (vecs_g.T @ resid)))

    def prox_psd(y):
        X = y[:m2].reshape(m, m)
        out = y.copy()
        out[:m2] = psd_project(X).ravel()
        return out

    lo, hi = problem.box if problem.box is not None else (None, None)
    mask_flat = (
        problem.fixed_zero_mask.ravel()
        if problem.fixed_zero_mask is not None
        else None
    )

    def prox_clamp(y, rho):
        out = y.copy()
        x = out[:m2]
        if problem.l1_weight > 0:
            x = soft_threshold(x, problem.l1_weight / rho)
        if lo is not None:
            x = np.clip(x, lo, hi)
        if mask_flat is not None:
            x = np.where(mask_flat, 0.0, x)
        out[:m2] = x
        if q:
            out[m2:] = np.maximum(out[m2:], 0.0)
        return out

    rho = cfg.rho
    alpha = cfg.over_relax
    z = np.zeros(dim)
    u = np.zeros((3, dim))
    trace_rows = []
    primal = dual = float("inf")
    baseline = None
    status = "MaxIters"
    iters = cfg.max_iters

    for it in range(1, cfg.max_iters + 1):
        y0 = prox_affine(z - u[0])
        y1 = prox_psd(z - u[1])
        y2 = prox_clamp(z - u[2], rho)
        y = np.stack([y0, y1, y2])
        y_rel = alpha * y + (1.0 - alpha) * z
        z_prev = z
        z = np.mean(y_rel + u, axis=0) - c_obj / (3.0 * rho)
        u += y_rel - z

        if it % cfg.check_every == 0 or it == cfg.max_iters:
            Z = z[:m2].reshape(m, m)
            Z = 0.5 * (Z + Z.T)
            primal = _infeasibility(problem, Z)
            if q:
                slack_viol = float(np.max(np.maximum(-z[m2:], 0.0)))
                primal = max(primal, slack_viol)
            dual = rho * float(np.max(np.abs(z - z_prev)))
            if cfg.trace_path is not None:
                trace_rows.append(
                    f"{it},{primal:.9e},{dual:.9e},"
                    f"{_objective(problem, Z):.9e}"
                )
            if not (np.isfinite(primal) and np.isfinite(dual)):
                status, iters = "Diverged", it
                break
            combined = primal + dual
            if baseline is None:
                baseline = max(combined, 1.0)
            elif combined > _DIVERGE_FACTOR * baseline:
                status, iters = "Diverged", it
                break
            if primal <= cfg.eps_primal and dual <= cfg.eps_dual:
                status, iters = "Converged", it
                break
            if it <= _ADAPT_CUTOFF:
                if primal > _ADAPT_RATIO * dual:
                    rho *= _ADAPT_SCALE
                    u /= _ADAPT_SCALE
                elif dual > _ADAPT_RATIO * primal:
                    rho /= _ADAPT_SCALE
                    u *= _ADAPT_SCALE

    Z = z[:m2].reshape(m, m)
    Z = 0.5 * (Z + Z.T)
    if mask_flat is not None:
        Z = np.where(problem.fixed_zero_mask, 0.0, Z)
    if cfg.trace_path is not None:
        with open(cfg.trace_path, "w") as fh:
            fh.write("iter,primal_residual,dual_residual,objective\n")
            fh.write("\n".join(trace_rows))
            if trace_rows:
                fh.write("\n")
    return SdpSolution(
        matrix=Z,
        objective=_objective(problem, Z),
        primal_residual=primal,
        dual_residual=dual,
        iters=iters,
        status=status,
    )


def solve(problem: SdpProblem, config: SolverConfig = None) -> SdpSolution:
    """Run the consensus iteration on ``problem``.

    Rows and columns that the zero mask forces to vanish entirely are
    removed before iterating and reinstated afterwards, which shrinks the
    sparse-support programs from matrix size ``dim`` down to the number of
    admissible positions.
    """
    cfg = config if config is not None else SolverConfig()
    alive = _alive_indices(problem)
    if alive is None:
        return _solve_core(problem, cfg)
    if len(alive) == 0:
        X = np.zeros((problem.dim, problem.dim))
        primal = _infeasibility(problem, X)
        status = "Converged" if primal <= cfg.eps_primal else "MaxIters"
        return SdpSolution(
            matrix=X,
            objective=_objective(problem, X),
            primal_residual=primal,
            dual_residual=0.0,
            iters=0,
            status=status,
        )
    sub = _solve_core(_restrict(problem, alive), cfg)
    X = np.zeros((problem.dim, problem.dim))
    X[np.ix_(alive, alive)] = sub.matrix
    return replace(sub, matrix=X)
