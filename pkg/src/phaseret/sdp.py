"""Semidefinite relaxation pipeline for sparse autocorrelation inversion.

Two programs are solved in sequence over matrices of side ``m = 2n`` (the
signal is zero padded to double length so linear and cyclic shift
structure agree).  The first relaxes the outer product of the support
indicator: lags where the autocorrelation vanishes pin matrix entries to
zero, lags where it does not force at least one unit of mass, and a random
linear objective steers the interior-point-free solver toward an indicator
vertex.  The second minimizes the entrywise l1 norm of a lifted signal
matrix whose Fourier diagonal must match the measured power spectrum, with
all rows outside the recovered support pinned to zero.  A rank-one
extraction and an optional least-squares polish produce the signal, which
is verified against the input autocorrelation before being returned.
"""

import math
from dataclasses import dataclass

import numpy as np

from .admm import SdpProblem, SolverConfig, solve, sym_eigen
from .errors import (
    AmbiguousSupport,
    InfeasibleSpec,
    NotRankOne,
    SolverFailed,
    SupportInconsistent,
    VerificationFailed,
)
from .signals import (
    Autocorrelation,
    Signal,
    autocorrelation,
    canonical_sign,
    default_zero_tol,
    power_spectrum,
)

__all__ = [
    "SupportSdpSpec",
    "SignalSdpSpec",
    "build_support_sdp",
    "extract_support",
    "build_signal_sdp",
    "extract_signal",
    "recover_signal",
]


@dataclass(frozen=True)
class SupportSdpSpec:
    """Support-indicator relaxation for a signal of length ``n``.

    Lag classes are cyclic distances of the zero-padded length ``m = 2n``,
    folded to ``min(l, m - l)``; ``zero_lags`` are the classes whose
    autocorrelation vanishes (entries pinned to zero) and ``active_lags``
    the classes that must carry at least ``epsilon`` of mass.
    """

    n: int
    k: int
    epsilon: float
    bias_seed: int
    zero_lags: tuple
    active_lags: tuple

    def __post_init__(self):
        if self.n <= 0 or not (0 < self.k <= self.n):
            raise ValueError("need 0 < k <= n")
        if not (0 < self.epsilon <= 1):
            raise ValueError("epsilon must lie in (0, 1]")
        if set(self.zero_lags) & set(self.active_lags):
            raise ValueError("zero and active lag classes overlap")

    @property
    def m(self) -> int:
        return 2 * self.n

    def to_problem(self) -> SdpProblem:
        m = self.m
        rng = np.random.default_rng(self.bias_seed)
        bias = rng.random((m, m))
        bias = 0.5 * (bias + bias.T)

        mask = np.zeros((m, m), dtype=bool)
        zero = set(self.zero_lags)
        for l in range(1, m):
            if min(l, m - l) in zero:
                idx = np.arange(m)
                mask[idx, (idx + l) % m] = True

        eqs = [(np.eye(m), float(self.k))]
        ones = np.ones(m)
        for j in range(m):
            coupler = np.zeros((m, m))
            coupler[j, :] += 0.5
            coupler[:, j] += 0.5
            coupler[j, j] -= float(self.k)
            # identical functionals for the row and the column sum of a
            # symmetric matrix; both are stated and the projection's
            # pseudo-inverse absorbs the duplication
            eqs.append((coupler, 0.0))
            eqs.append((coupler.copy(), 0.0))

        ineqs = []
        idx = np.arange(m)
        for l in sorted(self.active_lags):
            shifted = np.zeros((m, m))
            shifted[idx, (idx + l) % m] = 0.5
            shifted[(idx + l) % m, idx] += 0.5
            ineqs.append((shifted, float(self.epsilon)))

        return SdpProblem(
            dim=m,
            objective_linear=bias,
            eq_constraints=tuple(eqs),
            ineq_constraints=tuple(ineqs),
            box=(0.0, 1.0),
            fixed_zero_mask=mask,
        )


@dataclass(frozen=True)
class SignalSdpSpec:
    """Lifted-signal program matching a power spectrum on a fixed support.

    ``allowed`` lists the positions (within the zero-padded length ``m``)
    where the signal may be nonzero; ``spectrum`` is the length ``m`` power
    spectrum the lifted matrix must reproduce.
    """

    m: int
    allowed: tuple
    spectrum: tuple

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("m must be positive")
        pos = tuple(int(p) for p in self.allowed)
        if any(not (0 <= p < self.m) for p in pos):
            raise ValueError("allowed positions out of range")
        if len(set(pos)) != len(pos) or list(pos) != sorted(pos):
            raise ValueError("allowed positions must be sorted and distinct")
        object.__setattr__(self, "allowed", pos)
        spec = tuple(float(v) for v in self.spectrum)
        if len(spec) != self.m:
            raise ValueError("spectrum must have length m")
        object.__setattr__(self, "spectrum", spec)

    def to_problem(self) -> SdpProblem:
        m = self.m
        grid = np.arange(m)
        diff = grid[:, None] - grid[None, :]
        eqs = []
        for freq in range(m):
            mat = np.cos(2.0 * math.pi * freq * diff / m)
            eqs.append((mat, self.spectrum[freq]))
        keep = np.zeros(m, dtype=bool)
        keep[list(self.allowed)] = True
        mask = ~(keep[:, None] & keep[None, :])
        return SdpProblem(
            dim=m,
            objective_linear=np.zeros((m, m)),
            l1_weight=1.0,
            eq_constraints=tuple(eqs),
            fixed_zero_mask=mask,
        )


def build_support_sdp(
    a: Autocorrelation,
    k: int,
    bias_seed: int = 0,
    epsilon: float = 0.5,
    tol: float = None,
) -> SupportSdpSpec:
    """Classify lag classes of ``a`` and assemble the support relaxation.

    Raises
    ------
    InfeasibleSpec
        The autocorrelation carries no energy, or it realizes fewer
        distances than any ``k``-point support must produce.
    """
    ztol = default_zero_tol(a) if tol is None else float(tol)
    if ztol < 0:
        raise ValueError("tol must be nonnegative")
    if abs(float(a.lags[0])) <= ztol:
        raise InfeasibleSpec("autocorrelation has no energy at lag zero")
    if not (0 < k <= a.n):
        raise ValueError("need 0 < k <= n")
    active = [
        l for l in range(1, a.n) if abs(float(a.lags[l])) > ztol
    ]
    if k > len(active) + 1:
        raise InfeasibleSpec(
            f"{k} support points produce at least {k - 1} distances "
            f"but only {len(active)} lags are realized"
        )
    zero = [l for l in range(1, a.n) if abs(float(a.lags[l])) <= ztol]
    zero.append(a.n)
    return SupportSdpSpec(
        n=a.n,
        k=k,
        epsilon=epsilon,
        bias_seed=bias_seed,
        zero_lags=tuple(zero),
        active_lags=tuple(active),
    )


def extract_support(
    S: np.ndarray,
    k: int,
    threshold: float = 0.25,
    zero_lags=None,
) -> tuple:
    """Read a size ``k`` support off the diagonal of a relaxation solution.

    The ``k`` largest diagonal entries must all clear ``threshold`` and be
    separated from the rest by more than ``threshold``, otherwise the
    rounding is refused.  When ``zero_lags`` is given the selected
    positions are checked against the pinned lag classes.

    Returns cyclic positions in ``[0, m)``, sorted.

    Raises
    ------
    AmbiguousSupport
        Diagonal mass does not split into ``k`` clear entries.
    SupportInconsistent
        Two selected positions sit at a distance the autocorrelation rules
        out.
    """
    diag = np.asarray(S, dtype=float).diagonal().copy()
    m = diag.size
    if not (0 < k <= m):
        raise ValueError("need 0 < k <= matrix side")
    order = np.argsort(diag)[::-1]
    kth = float(diag[order[k - 1]])
    rest = float(diag[order[k]]) if k < m else 0.0
    if kth <= threshold:
        raise AmbiguousSupport(
            f"kth diagonal entry {kth:.3f} does not clear {threshold}"
        )
    if kth - rest <= threshold:
        raise AmbiguousSupport(
            f"diagonal gap {kth - rest:.3f} below {threshold}"
        )
    selected = tuple(sorted(int(i) for i in order[:k]))
    if zero_lags:
        zero = set(zero_lags)
        for ai in range(len(selected)):
            for bi in range(ai + 1, len(selected)):
                d = (selected[bi] - selected[ai]) % m
                if min(d, m - d) in zero:
                    raise SupportInconsistent(
                        f"positions {selected[ai]} and {selected[bi]} realize "
                        f"a lag class the autocorrelation excludes"
                    )
    return selected


def _check_active_classes(selected: tuple, m: int, active_lags) -> None:
    """Every realized lag class must occur among the selected positions.

    The true support realizes each class with nonzero autocorrelation, so
    a rounding that misses one cannot be a valid support and the signal
    stage would only discover that the hard way.
    """
    realized = set()
    for ai in range(len(selected)):
        for bi in range(ai + 1, len(selected)):
            d = (selected[bi] - selected[ai]) % m
            realized.add(min(d, m - d))
    missing = [l for l in active_lags if l not in realized]
    if missing:
        raise SupportInconsistent(
            f"selected positions realize no pair at lag class {missing[0]}"
        )


def _anchor_cyclic(selected: tuple, m: int, n: int) -> tuple:
    """Rotate a cyclic support so it starts at 0 and fits in ``[0, n)``.

    The rotation ambiguity of the doubled-length formulation is resolved
    by cutting the circle at its largest empty arc (first such arc on
    ties).
    """
    if len(selected) == 1:
        return (0,)
    pts = sorted(selected)
    best_gap, anchor = -1, pts[0]
    for i, cur in enumerate(pts):
        nxt = pts[(i + 1) % len(pts)]
        gap = (nxt - cur) % m
        if gap > best_gap:
            best_gap, anchor = gap, nxt
    shifted = tuple(sorted((p - anchor) % m for p in pts))
    if shifted[-1] > n - 1:
        raise SupportInconsistent(
            f"anchored support spans {shifted[-1]}, exceeding {n - 1}"
        )
    return shifted


def build_signal_sdp(Y: np.ndarray, allowed: np.ndarray) -> SignalSdpSpec:
    """Wrap a power spectrum and a position mask into the lifted program."""
    spectrum = np.asarray(Y, dtype=float)
    keep = np.asarray(allowed, dtype=bool)
    if spectrum.ndim != 1 or keep.shape != spectrum.shape:
        raise ValueError("spectrum and mask must be 1-d of equal length")
    return SignalSdpSpec(
        m=spectrum.size,
        allowed=tuple(int(i) for i in np.flatnonzero(keep)),
        spectrum=tuple(spectrum),
    )


def extract_signal(X: np.ndarray, tol: float = 1e-3) -> np.ndarray:
    """Factor a near rank-one PSD matrix into its dominant vector.

    Raises
    ------
    NotRankOne
        The top eigenvalue is not positive or the second carries more than
        ``tol`` of it in magnitude.
    """
    vals, vecs = sym_eigen(X)
    top = float(vals[0])
    if top <= 0:
        raise NotRankOne("leading eigenvalue is not positive")
    second = float(abs(vals[1])) if vals.size > 1 else 0.0
    if second / top > tol:
        raise NotRankOne(
            f"second eigenvalue ratio {second / top:.3e} exceeds {tol:.3e}"
        )
    vec = math.sqrt(top) * vecs[:, 0]
    return canonical_sign(vec)


def _refine(values: np.ndarray, support, a: Autocorrelation, iters: int = 12):
    """Gauss-Newton polish of the values on a fixed support.

    Minimizes the squared mismatch between the autocorrelation of the
    candidate and ``a``; each step solves the linearized least-squares
    system.  Returns the improved dense signal (never worse than the
    input: steps that fail to decrease the residual are rejected).
    """
    n = a.n
    pos = np.asarray(support, dtype=int)
    x = values.copy()

    def resid(vec):
        return autocorrelation(Signal(n, vec)).lags - a.lags

    r = resid(x)
    best = float(np.dot(r, r))
    for _ in range(iters):
        J = np.zeros((n, pos.size))
        for col, p in enumerate(pos):
            hi = p + np.arange(n)
            ok = hi < n
            J[ok, col] += x[hi[ok]]
            lo = p - np.arange(n)
            ok = lo >= 0
            J[ok, col] += x[lo[ok]]
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        trial = x.copy()
        trial[pos] += step
        r_trial = resid(trial)
        cost = float(np.dot(r_trial, r_trial))
        if not np.isfinite(cost) or cost >= best:
            break
        x, r, best = trial, r_trial, cost
        if math.sqrt(best) < 1e-14 * max(1.0, abs(float(a.lags[0]))):
            break
    return x


def _attempt_values(
    lifted: np.ndarray,
    anchored,
    a: Autocorrelation,
    allowed_err: float,
    polish: bool,
):
    """Polish the lifted vector on the anchored support and verify it.

    When the signal program stops on a flat optimal face its matrix is not
    rank one and the leading eigenvector can land on a symmetry axis where
    the least-squares polish stalls, so a couple of deterministically
    skewed starts are tried as well.  Returns the verified dense values or
    None.
    """
    n = a.n
    pos = np.asarray(anchored, dtype=int)
    base = np.zeros(n)
    base[pos] = lifted[pos]
    skew = np.linspace(-1.0, 1.0, num=pos.size) if pos.size > 1 else np.zeros(1)
    starts = [base]
    for amount in (0.05, -0.05, 0.5, -0.5, 0.9):
        tilted = base.copy()
        tilted[pos] = tilted[pos] * (1.0 + amount * skew)
        starts.append(tilted)
    off = np.ones(n, dtype=bool)
    off[pos] = False
    for start in starts:
        values = _refine(start, pos, a) if polish else start
        values = values.copy()
        values[off] = 0.0
        check = autocorrelation(Signal(n, values))
        if float(np.max(np.abs(check.lags - a.lags))) <= allowed_err:
            return values
        if not polish:
            break
    return None


def recover_signal(
    a: Autocorrelation,
    k: int,
    *,
    bias_seeds=(0, 1, 2, 3, 4, 5, 6, 7),
    epsilon: float = 0.5,
    tol: float = None,
    support_threshold: float = 0.25,
    rank_tol: float = 1e-3,
    config: SolverConfig = None,
    polish: bool = True,
) -> Signal:
    """Recover a ``k``-sparse signal from its autocorrelation via the SDPs.

    For each seed in ``bias_seeds`` the support relaxation is solved with
    a fresh bias matrix and rounded to ``k`` positions; the lifted-signal
    program then reconstructs the values on that support.  The first
    candidate whose autocorrelation matches ``a`` (within ``tol``, default
    ``1e-6 * max(1, a_0)``) is returned, anchored and sign normalized.
    When the lifted matrix fails the ``rank_tol`` rank-one test its
    leading eigenvector is still taken as a polish start, since the final
    verification, not the rank heuristic, decides acceptance.

    Raises the error from the last failed stage (:class:`InfeasibleSpec`,
    :class:`SolverFailed`, :class:`AmbiguousSupport`,
    :class:`SupportInconsistent`, :class:`NotRankOne`,
    :class:`VerificationFailed`) once every seed is exhausted; an
    unverified signal is never returned.
    """
    if k == 0:
        zero = Signal(a.n, np.zeros(a.n))
        check = autocorrelation(zero)
        if float(np.max(np.abs(check.lags - a.lags))) > default_zero_tol(a):
            raise VerificationFailed("autocorrelation is not identically zero")
        return zero
    if config is not None:
        support_cfg = signal_cfg = config
    else:
        # vertex solves of the support program settle within a few
        # thousand iterations; longer runs are orientation ties that a
        # fresh bias resolves faster than more iterations would
        support_cfg = SolverConfig(max_iters=8000, eps_primal=1e-5, eps_dual=1e-5)
        signal_cfg = SolverConfig(max_iters=20000, eps_primal=1e-5, eps_dual=1e-5)
    allowed_err = (
        1e-6 * max(1.0, abs(float(a.lags[0]))) if tol is None else float(tol)
    )
    seeds = tuple(bias_seeds) if np.iterable(bias_seeds) else (int(bias_seeds),)
    if not seeds:
        raise ValueError("bias_seeds must not be empty")
    last_error = None
    for seed in seeds:
        try:
            spec = build_support_sdp(
                a, k, bias_seed=seed, epsilon=epsilon, tol=tol
            )
            support_sol = solve(spec.to_problem(), support_cfg)
            if support_sol.status != "Converged":
                raise SolverFailed(
                    f"support relaxation ended with status {support_sol.status}"
                )
            selected = extract_support(
                support_sol.matrix, k, threshold=support_threshold,
                zero_lags=spec.zero_lags,
            )
            _check_active_classes(selected, spec.m, spec.active_lags)
            anchored = _anchor_cyclic(selected, spec.m, a.n)
        except (SolverFailed, AmbiguousSupport, SupportInconsistent) as exc:
            last_error = exc
            continue

        allowed = np.zeros(spec.m, dtype=bool)
        allowed[list(anchored)] = True
        sig_spec = build_signal_sdp(power_spectrum(a), allowed)
        signal_sol = solve(sig_spec.to_problem(), signal_cfg)
        if signal_sol.status != "Converged":
            last_error = SolverFailed(
                f"signal program ended with status {signal_sol.status}"
            )
            continue
        try:
            candidates = [extract_signal(signal_sol.matrix, tol=rank_tol)]
            rank_error = None
        except NotRankOne as exc:
            # the optimal face was flat: take rank-one points reachable
            # from the leading eigenvectors as polish starts instead
            vals, vecs = sym_eigen(signal_sol.matrix)
            top = float(vals[0])
            if top <= 0:
                last_error = exc
                continue
            head = math.sqrt(top) * vecs[:, 0]
            candidates = [head]
            for j in (1, 2):
                if j < vals.size and float(vals[j]) > 1e-8 * top:
                    tail = math.sqrt(float(vals[j])) * vecs[:, j]
                    candidates.append(head + tail)
                    candidates.append(head - tail)
            rank_error = exc
        values = None
        for lifted in candidates:
            values = _attempt_values(lifted, anchored, a, allowed_err, polish)
            if values is not None:
                break
        if values is not None:
            return Signal(a.n, canonical_sign(values))
        last_error = rank_error if rank_error is not None else (
            VerificationFailed(
                "no polished candidate reproduced the autocorrelation"
            )
        )
    raise last_error
