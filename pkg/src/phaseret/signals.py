"""Core signal model: dense real vectors with (typically) sparse support.

Provides the value types shared by every recovery routine, the linear
autocorrelation, Fourier magnitudes, seeded sparse signal generation, the
equivalence test modulo sign/reversal/translation, and JSON serialization.

Conventions
-----------
The autocorrelation of a length-``n`` signal is *linear*: lag ``l`` sums
``x[j] * x[j + l]`` over all valid ``j``, which equals the length-``2n``
cyclic autocorrelation of the zero-padded signal at nonnegative lags.
Autocorrelation entries whose magnitude is at most ``1e-9`` times lag 0 are
treated as exact zeros wherever support information is derived from them.
"""

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VALUE_DISTRIBUTIONS",
    "ZERO_TOL_SCALE",
    "Signal",
    "Autocorrelation",
    "SupportSet",
    "SparseModelParams",
    "default_zero_tol",
    "autocorrelation",
    "fourier_magnitudes",
    "power_spectrum",
    "random_sparse_signal",
    "support_set",
    "equivalent",
    "canonical_sign",
    "signal_to_obj",
    "signal_from_obj",
    "autocorr_to_obj",
    "autocorr_from_obj",
    "save_signal",
    "load_signal",
    "save_autocorrelation",
    "load_autocorrelation",
]

VALUE_DISTRIBUTIONS = ("standard_normal", "uniform_pm1_magnitude")

#: fraction of lag 0 below which an autocorrelation entry counts as zero
ZERO_TOL_SCALE = 1e-9


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """A real-valued signal of fixed length ``n``.

    Attributes
    ----------
    n : int
        Length of the signal, at least 1.
    values : np.ndarray
        Dense vector of ``n`` finite floats.  Stored read-only.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        if int(self.n) <= 0:
            raise ValueError("signal length must be a positive integer")
        vals = _frozen_array(self.values)
        if vals.shape != (int(self.n),):
            raise ValueError(
                f"expected {int(self.n)} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True, eq=False)
class Autocorrelation:
    """Linear autocorrelation of a length-``n`` signal at lags ``0..n-1``."""

    n: int
    lags: np.ndarray

    def __post_init__(self):
        if int(self.n) <= 0:
            raise ValueError("autocorrelation length must be a positive integer")
        lags = _frozen_array(self.lags)
        if lags.shape != (int(self.n),):
            raise ValueError(
                f"expected {int(self.n)} lags, got shape {lags.shape}"
            )
        if not np.all(np.isfinite(lags)):
            raise ValueError("autocorrelation entries must be finite")
        a0 = float(lags[0])
        slack = 1e-9 * max(1.0, abs(a0))
        if a0 < -slack:
            raise ValueError("lag 0 of an autocorrelation cannot be negative")
        if lags.size > 1 and np.max(np.abs(lags[1:])) > a0 + slack:
            raise ValueError("lag 0 must dominate every other lag in magnitude")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lags", lags)


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing indices of the nonzero entries of a signal."""

    n: int
    indices: tuple

    def __post_init__(self):
        if int(self.n) <= 0:
            raise ValueError("ambient length must be a positive integer")
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 or i >= int(self.n) for i in idx):
            raise ValueError("support indices must lie in [0, n)")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("support indices must be strictly increasing")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SparseModelParams:
    """Parameters of the Bernoulli sparse signal model.

    Each index enters the support independently with probability ``s / n``,
    so ``s`` is the expected sparsity.  Values on the support are drawn from
    ``value_dist``.
    """

    n: int
    s: float
    seed: int
    value_dist: str = "standard_normal"

    def __post_init__(self):
        if int(self.n) <= 0:
            raise ValueError("n must be a positive integer")
        if not (0.0 < float(self.s) <= int(self.n)):
            raise ValueError("expected sparsity s must satisfy 0 < s <= n")
        if int(self.seed) < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.value_dist not in VALUE_DISTRIBUTIONS:
            raise ValueError(
                f"value_dist must be one of {VALUE_DISTRIBUTIONS}"
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "seed", int(self.seed))


def default_zero_tol(a: Autocorrelation) -> float:
    """Absolute threshold below which lags of ``a`` count as zero."""
    return ZERO_TOL_SCALE * abs(float(a.lags[0]))


def autocorrelation(x: Signal) -> Autocorrelation:
    """Linear autocorrelation of ``x`` at lags ``0..n-1``.

    Lag ``l`` equals ``sum_j x[j] * x[j + l]``.  Sparse inputs are
    accumulated pairwise over the support (exact up to float roundoff);
    dense inputs fall back to direct or FFT-based correlation.
    """
    v = x.values
    n = x.n
    nz = np.flatnonzero(v)
    if nz.size == 0:
        return Autocorrelation(n, np.zeros(n))
    if nz.size * nz.size <= 16 * n:
        lags = np.zeros(n)
        gaps = nz[None, :] - nz[:, None]
        prods = v[nz][:, None] * v[nz][None, :]
        keep = gaps >= 0
        np.add.at(lags, gaps[keep], prods[keep])
        return Autocorrelation(n, lags)
    if n <= 1024:
        return Autocorrelation(n, np.correlate(v, v, "full")[n - 1 :])
    spectrum = np.abs(np.fft.rfft(v, 2 * n)) ** 2
    return Autocorrelation(n, np.fft.irfft(spectrum, 2 * n)[:n])


def fourier_magnitudes(x: Signal) -> np.ndarray:
    """Squared magnitudes of the ``2n``-point DFT of the zero-padded signal."""
    return np.abs(np.fft.fft(x.values, 2 * x.n)) ** 2


def power_spectrum(a: Autocorrelation) -> np.ndarray:
    """``2n``-point power spectrum consistent with the autocorrelation ``a``.

    Returns the DFT of the symmetric extension ``(a_0, ..., a_{n-1}, 0,
    a_{n-1}, ..., a_1)``; for ``a = autocorrelation(x)`` this equals
    ``fourier_magnitudes(x)`` up to roundoff.
    """
    n = a.n
    sym = np.zeros(2 * n)
    sym[:n] = a.lags
    sym[n + 1 :] = a.lags[1:][::-1]
    return np.fft.fft(sym).real


def random_sparse_signal(params: SparseModelParams) -> Signal:
    """Draw a Bernoulli-support sparse signal, deterministic for a seed."""
    rng = np.random.default_rng(params.seed)
    mask = rng.random(params.n) < params.s / params.n
    k = int(mask.sum())
    values = np.zeros(params.n)
    if k:
        if params.value_dist == "standard_normal":
            values[mask] = rng.standard_normal(k)
        else:
            values[mask] = rng.integers(0, 2, k) * 2.0 - 1.0
    return Signal(params.n, values)


def support_set(x: Signal, tol: float = 0.0) -> SupportSet:
    """Indices of entries with magnitude strictly above ``tol``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    idx = np.flatnonzero(np.abs(x.values) > tol)
    return SupportSet(x.n, tuple(int(i) for i in idx))


def canonical_sign(values: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Flip the global sign so the first entry above ``tol`` is positive."""
    values = np.asarray(values, dtype=float)
    idx = np.flatnonzero(np.abs(values) > tol)
    if idx.size and values[idx[0]] < 0:
        return -values
    return values.copy()


def equivalent(x: Signal, y: Signal, tol: float = 1e-9) -> bool:
    """True when ``y`` matches ``x`` up to sign, reversal and translation.

    Entries must agree within ``tol`` relative to the largest magnitude
    present in either signal.  Translations may not push support outside
    ``[0, n)``.
    """
    if x.n != y.n:
        raise ValueError("signals must have the same length")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    xv, yv = x.values, y.values
    scale = max(float(np.max(np.abs(xv))), float(np.max(np.abs(yv))))
    if scale == 0.0:
        return True
    atol = tol * scale
    sy = np.flatnonzero(np.abs(yv) > atol)
    sx = np.flatnonzero(np.abs(xv) > atol)
    if sx.size == 0 or sy.size == 0:
        return sx.size == sy.size
    for base in (xv, xv[::-1]):
        sb = np.flatnonzero(np.abs(base) > atol)
        lo, hi = int(sb[0]), int(sb[-1])
        for shift in {int(sy[0]) - lo, int(sy[-1]) - hi}:
            if lo + shift < 0 or hi + shift >= x.n:
                continue
            shifted = np.zeros_like(base)
            shifted[lo + shift : hi + 1 + shift] = base[lo : hi + 1]
            for sign in (1.0, -1.0):
                if np.max(np.abs(sign * shifted - yv)) <= atol:
                    return True
    return False


def signal_to_obj(x: Signal) -> dict:
    """JSON-ready form listing only the nonzero entries of ``x``."""
    nz = np.flatnonzero(x.values)
    return {
        "n": x.n,
        "entries": [[int(i), float(x.values[i])] for i in nz],
    }


def signal_from_obj(obj) -> Signal:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise ValueError("signal object must have 'n' and 'entries' fields")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise ValueError("'n' must be a positive integer")
    entries = obj["entries"]
    if not isinstance(entries, list):
        raise ValueError("'entries' must be a list of [index, value] pairs")
    values = np.zeros(n)
    last = -1
    for item in entries:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ValueError("each entry must be an [index, value] pair")
        idx, val = item
        if not isinstance(idx, int) or isinstance(idx, bool):
            raise ValueError("entry indices must be integers")
        if idx <= last:
            raise ValueError("entry indices must be strictly increasing")
        if idx < 0 or idx >= n:
            raise ValueError("entry index out of range")
        values[idx] = float(val)
        last = idx
    return Signal(n, values)


def autocorr_to_obj(a: Autocorrelation) -> dict:
    """JSON-ready form with the dense list of lags."""
    return {"n": a.n, "lags": [float(v) for v in a.lags]}


def autocorr_from_obj(obj) -> Autocorrelation:
    if not isinstance(obj, dict) or "n" not in obj or "lags" not in obj:
        raise ValueError("autocorrelation object must have 'n' and 'lags' fields")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise ValueError("'n' must be a positive integer")
    lags = obj["lags"]
    if not isinstance(lags, list) or len(lags) != n:
        raise ValueError("'lags' must be a list of exactly n numbers")
    return Autocorrelation(n, np.array([float(v) for v in lags]))


def save_signal(x: Signal, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(signal_to_obj(x), fh)
        fh.write("\n")


def load_signal(path) -> Signal:
    with open(path, "r", encoding="utf-8") as fh:
        return signal_from_obj(json.load(fh))


def save_autocorrelation(a: Autocorrelation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(autocorr_to_obj(a), fh)
        fh.write("\n")


def load_autocorrelation(path) -> Autocorrelation:
    with open(path, "r", encoding="utf-8") as fh:
        return autocorr_from_obj(json.load(fh))
