"""Exhaustive enumeration of signals sharing one autocorrelation.

The autocorrelation fixes the squared magnitude of the signal's
z-transform on the unit circle, so every signal with that autocorrelation
corresponds to a way of splitting the zeros of a palindromic polynomial
between a factor and its reversed reciprocal.  Zeros come in quadruples
``z, conj(z), 1/z, 1/conj(z)`` that degenerate on the real axis and the
unit circle; each non-degenerate group contributes an independent binary
choice per multiplicity.  Enumerating the choices lists the entire
equivalence class, which makes this module an independent cross-check for
the recovery routines: small cases can be verified against every signal
the autocorrelation admits.

The root finder is a plain simultaneous-iteration implementation so the
enumeration does not share code paths (or failure modes) with anything it
is used to check.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, RootPairingFailed
from .signals import (
    Autocorrelation,
    Signal,
    autocorrelation,
    canonical_sign,
    default_zero_tol,
    equivalent,
)

__all__ = [
    "ZeroQuadruple",
    "poly_roots",
    "classify_roots",
    "enumerate_factorizations",
    "construct_ambiguous_pair",
    "is_uniform_support",
]

_MAX_DEGREE = 64
_MAX_COMBINATIONS = 1 << 16


@dataclass(frozen=True)
class ZeroQuadruple:
    """One reciprocal-conjugate orbit of polynomial zeros.

    ``kind`` records the orbit's degeneracy: ``generic`` (four distinct
    zeros), ``real_pair`` (a real zero with its reciprocal),
    ``unit_conjugate`` (a conjugate pair on the unit circle) or
    ``real_unit`` (a single zero at 1 or -1).  Only ``generic`` and
    ``real_pair`` orbits admit a choice when splitting zeros between a
    factor and its reversal.
    """

    root: complex
    multiplicity: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("generic", "real_pair", "unit_conjugate", "real_unit"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.multiplicity <= 0:
            raise ValueError("multiplicity must be positive")


def _newton_polygon_radii(monic: np.ndarray):
    """Per-root starting radii from the coefficient Newton polygon.

    Autocorrelation polynomials routinely have roots spread over several
    decades, so a single starting circle stalls the simultaneous
    iteration; the upper convex hull of ``(j, log|c_j|)`` recovers one
    circle per magnitude cluster with the right number of points on each.
    """
    deg = monic.size - 1
    pts = [
        (j, math.log(abs(monic[j])))
        for j in range(deg + 1)
        if monic[j] != 0
    ]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    radii = np.empty(deg)
    segment = np.empty(deg, dtype=int)
    offset = np.empty(deg, dtype=int)
    width = np.empty(deg, dtype=int)
    filled = 0
    for seg, ((j1, l1), (j2, l2)) in enumerate(zip(hull, hull[1:])):
        count = j2 - j1
        radius = math.exp((l1 - l2) / count)
        radii[filled: filled + count] = radius
        segment[filled: filled + count] = seg
        offset[filled: filled + count] = np.arange(count)
        width[filled: filled + count] = count
        filled += count
    if filled < deg:
        radii[filled:] = radii[filled - 1] if filled else 1.0
        segment[filled:] = segment[filled - 1] if filled else 0
        offset[filled:] = 0
        width[filled:] = max(deg - filled, 1)
    return radii, segment, offset, width


def poly_roots(coeffs, max_iters: int = 800) -> np.ndarray:
    """All complex roots of a polynomial given by ascending coefficients.

    Simultaneous (Durand-Kerner) iteration started on Newton-polygon
    circles, followed by a Newton touch-up per root; a rotated restart is
    tried before giving up.

    Raises
    ------
    NoConvergence
        Some iterate fails the backward-error test after ``max_iters``
        sweeps of every attempt.
    ValueError
        Zero polynomial, or degree beyond the supported cap.
    """
    c = np.asarray(coeffs, dtype=complex)
    while c.size and abs(c[-1]) == 0.0:
        c = c[:-1]
    if c.size == 0:
        raise ValueError("zero polynomial has no defined roots")
    deg = c.size - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    if deg > _MAX_DEGREE:
        raise ValueError(f"degree {deg} exceeds cap {_MAX_DEGREE}")
    monic = c / c[-1]
    radii, segment, offset, width = _newton_polygon_radii(monic)
    spread = float(radii.max())

    def poly_val(z):
        return np.polyval(monic[::-1], z)

    deriv_coeffs = np.arange(1, deg + 1) * monic[1:]
    log_tol = math.log(1e-8 * max(float(np.linalg.norm(c)), 1.0))

    def log_resid(roots):
        # Backward error normalized by monomial growth: |p(r)| at a root
        # of magnitude R and degree d carries float noise of order
        # eps * R**d, so the raw residual is compared against the
        # coefficient norm only after dividing that growth back out
        # (equivalently, roots outside the unit disk are judged through
        # the reversed polynomial at 1/r).
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.log(np.abs(np.polyval(c[::-1], roots)))
        lg = deg * np.log(np.maximum(1.0, np.abs(roots)))
        out = lv - lg
        return np.where(np.isnan(out), np.inf, out)

    best_resid = math.inf
    for attempt, (phase, stretch) in enumerate(
        ((0.0, 1.0), (0.37, 1.0), (1.13, 1.7), (0.71, 0.6))
    ):
        angles = (
            2.0 * math.pi * (offset + 0.5) / width
            + 0.26
            + phase
            + 0.9 * segment
        )
        roots = (stretch * radii) * np.exp(1j * angles)
        for _ in range(max_iters):
            vals = poly_val(roots)
            diffs = roots[:, None] - roots[None, :]
            np.fill_diagonal(diffs, 1.0)
            denom = np.prod(diffs, axis=1)
            step = vals / denom
            cap = 0.5 * (1.0 + np.abs(roots))
            size = np.abs(step)
            over = size > cap
            step = np.where(over, step * (cap / np.where(over, size, 1.0)), step)
            roots = roots - step
            if float(np.max(np.abs(step))) < 1e-14 * (1.0 + spread):
                break
        for _ in range(12):
            if float(log_resid(roots).max()) <= log_tol:
                break
            dv = np.polyval(deriv_coeffs[::-1], roots)
            ok = np.abs(dv) > 1e-30
            roots = np.where(
                ok, roots - poly_val(roots) / np.where(ok, dv, 1.0), roots
            )
        worst = float(log_resid(roots).max())
        if worst <= log_tol:
            return roots
        best_resid = min(best_resid, worst)
    raise NoConvergence(
        f"root residual {np.exp(best_resid):.3e} exceeds tolerance"
    )


# A root of multiplicity mu is resolved only to about (residual)^(1/mu),
# so clusters are retried at growing radii until the reciprocal-conjugate
# pairing closes.
_CLUSTER_LADDER = (1e-4, 1e-3, 1e-2, 3e-2)


def _cluster_roots(roots: np.ndarray, radius: float):
    """Merge numerically split copies of multiple roots into centroids."""
    remaining = list(roots)
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        keep = []
        for z in remaining:
            if abs(z - seed) <= radius * (1.0 + abs(seed)):
                members.append(z)
            else:
                keep.append(z)
        remaining = keep
        centroid = sum(members) / len(members)
        clusters.append((centroid, len(members)))
    return clusters


def _group_roots(clustered, tol: float, radius: float = 0.0):
    """Partition root clusters into reciprocal-conjugate orbits.

    Returns a list of :class:`ZeroQuadruple`.  Raises
    :class:`RootPairingFailed` when the expected partners of a root cannot
    be located, which signals that the input was not a valid
    autocorrelation polynomial (or that roots were resolved too poorly to
    pair).  ``radius`` widens the matching tolerance to the cluster radius
    in use, since centroids of merged multiple roots are no more accurate
    than the scatter they absorb.
    """
    tol = max(tol, radius)
    pool = [(complex(z), int(mult)) for z, mult in clustered]
    quads = []

    def _take(target):
        for idx, (z, mult) in enumerate(pool):
            if abs(z - target) <= tol * (1.0 + abs(target)):
                if mult == 1:
                    pool.pop(idx)
                else:
                    pool[idx] = (z, mult - 1)
                return z
        raise RootPairingFailed(
            f"no partner near {target:.6g} among remaining roots"
        )

    while pool:
        z, mult = pool[0]
        if mult == 1:
            pool.pop(0)
        else:
            pool[0] = (z, mult - 1)
        on_axis = abs(z.imag) <= tol * (1.0 + abs(z))
        on_circle = abs(abs(z) - 1.0) <= tol
        if on_axis and on_circle:
            snapped = 1.0 if z.real >= 0 else -1.0
            quads.append(ZeroQuadruple(complex(snapped), 1, "real_unit"))
        elif on_axis:
            zr = complex(z.real)
            _take(1.0 / zr)
            quads.append(ZeroQuadruple(zr, 1, "real_pair"))
        elif on_circle:
            _take(np.conj(z))
            quads.append(ZeroQuadruple(z, 1, "unit_conjugate"))
        else:
            _take(np.conj(z))
            _take(1.0 / z)
            _take(1.0 / np.conj(z))
            quads.append(ZeroQuadruple(z, 1, "generic"))

    merged = {}
    for q in quads:
        key = None
        for existing in merged:
            ez = merged[existing][0]
            if q.kind == merged[existing][1] and abs(q.root - ez) <= tol * (1.0 + abs(ez)):
                key = existing
                break
        if key is None:
            merged[len(merged)] = [q.root, q.kind, 1]
        else:
            merged[key][2] += 1
    return [
        ZeroQuadruple(root=z, multiplicity=c, kind=kind)
        for z, kind, c in merged.values()
    ]


def classify_roots(a: Autocorrelation, tol: float = 1e-6):
    """Reciprocal-conjugate orbits of the lag polynomial of ``a``.

    The polynomial has ascending coefficients ``a[|j - L|]`` for
    ``j = 0..2L`` with ``L`` the largest realized lag; it is palindromic,
    so its zeros close under both conjugation and inversion.
    """
    ztol = default_zero_tol(a)
    realized = np.flatnonzero(np.abs(a.lags) > ztol)
    if realized.size == 0:
        return []
    L = int(realized.max())
    if L == 0:
        return []
    c = np.array([a.lags[abs(j - L)] for j in range(2 * L + 1)], dtype=float)
    roots = poly_roots(c)
    failure = None
    for radius in _CLUSTER_LADDER:
        clustered = _cluster_roots(roots, radius)
        try:
            return _group_roots(clustered, tol, radius)
        except RootPairingFailed as exc:
            failure = exc
    raise failure


def _real_coeffs(roots, scale_to: float) -> np.ndarray:
    """Monic polynomial from roots, scaled so its autocorrelation peak is
    ``scale_to``; returns ascending real coefficients."""
    coeffs = np.atleast_1d(np.poly(np.asarray(roots, dtype=complex)))
    real = coeffs.real[::-1]
    energy = float(np.dot(real, real))
    if energy <= 0:
        raise RootPairingFailed("degenerate factor with no energy")
    return real * math.sqrt(scale_to / energy)


def enumerate_factorizations(
    a: Autocorrelation, tol: float = 1e-6, max_nonzeros: int = None
):
    """Every signal class whose autocorrelation equals ``a``.

    Returns a list of :class:`~phaseret.signals.Signal`, one canonical
    representative per equivalence class (anchored at zero, sign and
    orientation normalized), sorted by their value tuples.  A purely zero
    autocorrelation yields the zero signal; a single spike yields one
    class.

    ``max_nonzeros`` restricts the census to candidates with at most that
    many nonzero entries.  Zero splits other than the sparse one almost
    always fill the whole span with nonzeros, so the restricted count is
    the right notion of ambiguity for sparse sources; unrestricted, the
    class count grows exponentially in the number of swappable zero
    orbits.

    Raises
    ------
    ValueError
        The number of binary choices exceeds the enumeration cap.
    NoConvergence, RootPairingFailed
        Root finding or orbit pairing failed, so the class list would be
        unreliable.
    """
    ztol = default_zero_tol(a)
    a0 = float(a.lags[0])
    if abs(a0) <= ztol:
        return [Signal(a.n, np.zeros(a.n))]
    realized = np.flatnonzero(np.abs(a.lags) > ztol)
    L = int(realized.max())
    if L == 0:
        values = np.zeros(a.n)
        values[0] = math.sqrt(a0)
        return [Signal(a.n, values)]
    quads = classify_roots(a, tol)
    choice_groups = []
    fixed = []
    for q in quads:
        if q.kind == "generic":
            pair_self = (q.root, np.conj(q.root))
            pair_recip = (1.0 / q.root, 1.0 / np.conj(q.root))
            choice_groups.append((pair_self, pair_recip, q.multiplicity))
        elif q.kind == "real_pair":
            choice_groups.append(((q.root,), (1.0 / q.root,), q.multiplicity))
        elif q.kind == "unit_conjugate":
            if q.multiplicity % 2 != 0:
                raise RootPairingFailed(
                    "unit-circle conjugate pair with odd multiplicity"
                )
            fixed.extend([q.root, np.conj(q.root)] * (q.multiplicity // 2))
        else:
            if q.multiplicity % 2 != 0:
                raise RootPairingFailed(
                    "zero at +-1 with odd multiplicity"
                )
            fixed.extend([q.root] * (q.multiplicity // 2))

    total = 1
    for _, _, mult in choice_groups:
        total *= mult + 1
        if total > _MAX_COMBINATIONS:
            raise ValueError(
                f"enumeration would exceed {_MAX_COMBINATIONS} combinations"
            )

    options = [range(mult + 1) for _, _, mult in choice_groups]
    seen = []
    verify_tol = tol * max(1.0, abs(a0))
    for pick in itertools.product(*options):
        roots = list(fixed)
        for (side_a, side_b, mult), take in zip(choice_groups, pick):
            roots.extend(list(side_a) * take)
            roots.extend(list(side_b) * (mult - take))
        coeffs = _real_coeffs(roots, a0)
        if coeffs.size > a.n:
            continue
        values = np.zeros(a.n)
        values[: coeffs.size] = coeffs
        candidate = Signal(a.n, canonical_sign(values))
        back = autocorrelation(candidate)
        if float(np.max(np.abs(back.lags - a.lags))) > verify_tol:
            continue
        if max_nonzeros is not None:
            cutoff = tol * max(1.0, math.sqrt(a0))
            if int(np.count_nonzero(np.abs(candidate.values) > cutoff)) > max_nonzeros:
                continue
        if not any(equivalent(candidate, s, tol=tol) for s in seen):
            seen.append(candidate)
    if not seen:
        raise RootPairingFailed(
            "no zero split reproduced the autocorrelation"
        )
    return sorted(seen, key=lambda s: tuple(s.values))


def construct_ambiguous_pair(g, h):
    """Two non-equivalent signals sharing an autocorrelation, by design.

    Convolving ``g`` with ``h`` and with reversed ``h`` yields signals
    whose z-transforms differ only by swapping a factor with its
    reversal, so their autocorrelations agree.  The caller should pick
    factors that make the two convolutions genuinely different (not
    mirror images of each other).
    """
    gv = np.asarray(g, dtype=float)
    hv = np.asarray(h, dtype=float)
    if gv.ndim != 1 or hv.ndim != 1 or gv.size == 0 or hv.size == 0:
        raise ValueError("factors must be nonempty 1-d arrays")
    n = gv.size + hv.size - 1
    first = Signal(n, canonical_sign(np.convolve(gv, hv)))
    second = Signal(n, canonical_sign(np.convolve(gv, hv[::-1])))
    return first, second


def is_uniform_support(support) -> bool:
    """Whether the support indices form an arithmetic progression.

    Supports of size at most two count as uniform (any two points are a
    trivial progression).  Uniform supports are the regime where distinct
    factorizations collapse onto the same autocorrelation, so recovery is
    ambiguous by construction.
    """
    idx = support.indices
    if len(idx) <= 2:
        return True
    step = idx[1] - idx[0]
    return all(idx[i + 1] - idx[i] == step for i in range(len(idx) - 1))
