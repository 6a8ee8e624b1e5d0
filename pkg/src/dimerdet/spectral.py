"""Foundational numerics for symbols on the unit circle.

Symbols are complex functions of the angle ``x`` (radians); matrix symbols
are small square arrays of them.  This module samples symbols, extracts
Fourier coefficients by FFT, assembles finite block Toeplitz/Hankel
sections, and provides log-determinants and geometric means with explicit
branch tracking.  Determinants are carried in log form throughout and only
exponentiated at reporting boundaries.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    NonzeroWinding,
    SampleFailure,
    SingularSymbol,
    TailNotResolved,
    TruncationTooShort,
)

_EPS = float(np.finfo(float).eps)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarSymbol:
    """A complex function of the angle x in [-pi, pi), evaluated vectorized."""

    fn: Evaluator
    smoothness_hint: str = "analytic_in_annulus"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.fn(x), dtype=complex)

    @staticmethod
    def constant(value) -> "ScalarSymbol":
        c = complex(value)
        return ScalarSymbol(lambda x: np.full(np.shape(x), c, dtype=complex))


@dataclass(frozen=True)
class MatrixSymbol:
    """An N x N array of scalar symbols sharing one period and grid."""

    entries: tuple  # tuple of tuples of ScalarSymbol
    block_size: int

    @staticmethod
    def from_entries(rows: Sequence[Sequence[ScalarSymbol]]) -> "MatrixSymbol":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("entries must be square")
        return MatrixSymbol(tuple(tuple(r) for r in rows), n)

    @staticmethod
    def from_scalar(sym: ScalarSymbol) -> "MatrixSymbol":
        return MatrixSymbol(((sym,),), 1)

    def sample(self, x) -> np.ndarray:
        """Evaluate on angles x, returning an array of shape (len(x), N, N)."""
        x = np.asarray(x, dtype=float)
        n = self.block_size
        out = np.empty((x.size, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[:, i, j] = self.entries[i][j](x)
        return out


def as_matrix_symbol(sym: ScalarSymbol | MatrixSymbol) -> MatrixSymbol:
    if isinstance(sym, MatrixSymbol):
        return sym
    return MatrixSymbol.from_scalar(sym)


#: default (grid_size, order) per smoothness hint; the slow-decay class gets
#: four times the resolution
_GRID_DEFAULTS = {
    "analytic_in_annulus": (4096, 512),
    "wiener_class": (16384, 2048),
}


def default_grid(sym: ScalarSymbol | MatrixSymbol) -> tuple[int, int]:
    """(grid_size, order) from the symbol's smoothness hints (worst entry wins)."""
    msym = as_matrix_symbol(sym)
    hints = {entry.smoothness_hint for row in msym.entries for entry in row}
    unknown = hints - set(_GRID_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown smoothness hint(s) {unknown}")
    if "wiener_class" in hints:
        return _GRID_DEFAULTS["wiener_class"]
    return _GRID_DEFAULTS["analytic_in_annulus"]


@dataclass(frozen=True)
class FourierTable:
    """Two-sided table of matrix Fourier coefficients, indices -K..K.

    ``coeffs[k + order]`` holds the N x N coefficient at index k.  Indices
    beyond the order read as zero blocks, which is legitimate once the tail
    invariant (last coefficients below ``tail_tol``) has been certified.
    """

    block_size: int
    order: int
    coeffs: np.ndarray  # shape (2*order+1, N, N)
    tail_tol: float = 1e-13

    def coeff(self, k: int) -> np.ndarray:
        if abs(k) > self.order:
            return np.zeros((self.block_size, self.block_size), dtype=complex)
        return self.coeffs[k + self.order]

    def scalar(self, k: int) -> complex:
        if self.block_size != 1:
            raise ValueError("scalar() requires a block size of 1")
        return complex(self.coeff(k)[0, 0])

    def tail_magnitude(self) -> float:
        """Largest entry magnitude among the two outermost coefficient pairs."""
        edge = [self.coeffs[0], self.coeffs[1], self.coeffs[-2], self.coeffs[-1]]
        return float(max(np.max(np.abs(c)) for c in edge))

    @staticmethod
    def from_coeff_map(coeffs: dict[int, complex], order: int) -> "FourierTable":
        """Build a scalar table from an explicit {index: value} map."""
        arr = np.zeros((2 * order + 1, 1, 1), dtype=complex)
        for k, v in coeffs.items():
            if abs(k) > order:
                raise ValueError(f"coefficient index {k} beyond order {order}")
            arr[k + order, 0, 0] = v
        return FourierTable(1, order, arr)


@dataclass(frozen=True)
class LogDet:
    """Determinant in polar log form: det = exp(log_modulus + i*phase)."""

    log_modulus: float
    phase: float
    is_singular: bool

    @property
    def value(self) -> complex:
        if self.is_singular:
            return 0.0j
        return cmath.exp(complex(self.log_modulus, self.phase))


def fourier_coefficients(sym: ScalarSymbol | MatrixSymbol, grid_size: int | None = None,
                         order: int | None = None, tail_tol: float = 1e-13) -> FourierTable:
    """Fourier coefficients of a symbol by FFT on a uniform grid.

    ``grid_size`` must be a power of two with ``grid_size >= 4*order + 4`` so
    aliasing of the retained band is controlled; omitted sizes default from
    the symbol's smoothness hint.  The two outermost coefficient pairs must
    fall below ``tail_tol`` or TailNotResolved is raised: an unresolved tail
    means the grid/order do not capture this symbol (e.g. t too close to 1
    for the default sizes).
    """
    if grid_size is None or order is None:
        auto_grid, auto_order = default_grid(sym)
        grid_size = auto_grid if grid_size is None else grid_size
        order = auto_order if order is None else order
    if grid_size < 4 * order + 4:
        raise ValueError(f"grid_size {grid_size} < 4*order+4 = {4 * order + 4}")
    if grid_size & (grid_size - 1):
        raise ValueError(f"grid_size {grid_size} is not a power of two")
    msym = as_matrix_symbol(sym)
    x = 2.0 * np.pi * np.arange(grid_size) / grid_size
    x = (x + np.pi) % (2.0 * np.pi) - np.pi  # evaluator domain is [-pi, pi)
    samples = msym.sample(x)
    if not np.all(np.isfinite(samples)):
        raise SampleFailure("symbol evaluator returned non-finite values")
    spec = np.fft.fft(samples, axis=0) / grid_size
    ks = np.arange(-order, order + 1)
    coeffs = spec[ks % grid_size]
    tab = FourierTable(msym.block_size, order, coeffs, tail_tol)
    tail = tab.tail_magnitude()
    if tail > tail_tol:
        raise TailNotResolved(
            f"tail magnitude {tail:.3e} exceeds {tail_tol:.1e} at order {order}")
    return tab


def series_symbol(tab: FourierTable) -> MatrixSymbol:
    """The truncated Fourier series of a table, as an evaluatable symbol."""
    ks = np.arange(-tab.order, tab.order + 1)
    n = tab.block_size

    def make(i, j):
        c = tab.coeffs[:, i, j].copy()
        return ScalarSymbol(lambda x: np.exp(1j * np.outer(x, ks)) @ c)

    return MatrixSymbol.from_entries([[make(i, j) for j in range(n)] for i in range(n)])


def _ensure_finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise SampleFailure(f"{what} contains non-finite entries")
    return a


def toeplitz_matrix(tab: FourierTable, n: int) -> np.ndarray:
    """The nN x nN section with block (j, k) equal to coefficient j - k."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n - 1 > tab.order:
        raise TruncationTooShort(
            f"Toeplitz section n={n} needs coefficients to {n - 1}, table has {tab.order}")
    return _assemble(tab, np.subtract.outer(np.arange(n), np.arange(n)))


def hankel_matrix(tab: FourierTable, m: int) -> np.ndarray:
    """The mN x mN section with block (j, k) equal to coefficient j + k + 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if 2 * m - 1 > tab.order:
        raise TruncationTooShort(
            f"Hankel section m={m} needs coefficients to {2 * m - 1}, table has {tab.order}")
    return _assemble(tab, np.add.outer(np.arange(m), np.arange(m)) + 1)


def toeplitz_section(tab: FourierTable, m: int, reflected: bool = False) -> np.ndarray:
    """Truncation of the semi-infinite T(phi) (or T(phitilde)), zero-padded.

    Unlike :func:`toeplitz_matrix` this reads indices beyond the table order
    as zero blocks; use it for operator truncations where the tail has been
    certified small.
    """
    idx = np.subtract.outer(np.arange(m), np.arange(m))
    if reflected:
        idx = -idx
    return _assemble(tab, idx, pad=True)


def hankel_section(tab: FourierTable, m: int, shift: int = 0,
                   reflected: bool = False) -> np.ndarray:
    """Truncation of H(z^{-shift} phi) (or with phitilde), zero-padded.

    Block (j, k) is coefficient ``j+k+1+shift`` of phi, or coefficient
    ``-(j+k+1+shift)`` when ``reflected`` (symbol replaced by its tilde).
    """
    idx = np.add.outer(np.arange(m), np.arange(m)) + 1 + shift
    if reflected:
        idx = -idx
    return _assemble(tab, idx, pad=True)


def _assemble(tab: FourierTable, idx: np.ndarray, pad: bool = False) -> np.ndarray:
    n = tab.block_size
    m = idx.shape[0]
    if pad:
        inside = np.abs(idx) <= tab.order
        blocks = np.zeros((m, m, n, n), dtype=complex)
        blocks[inside] = tab.coeffs[idx[inside] + tab.order]
    else:
        blocks = tab.coeffs[idx + tab.order]
    out = blocks.transpose(0, 2, 1, 3).reshape(m * n, m * n)
    return _ensure_finite(out, "matrix section")


def log_determinant(a: np.ndarray) -> LogDet:
    """Log-determinant via pivoted LU, with a backward-stable singularity flag.

    The determinant is the product of the U diagonal times the permutation
    sign; we accumulate log-modulus and phase instead of the raw product so
    sections with hundreds of pivots cannot overflow.  A pivot below
    ``n * eps * max_row_norm`` marks the matrix singular.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("log_determinant requires a square matrix")
    n = a.shape[0]
    if n == 0:
        return LogDet(0.0, 0.0, False)
    _ensure_finite(a, "matrix")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.diagonal(lu)
    row_norm = float(np.max(np.sum(np.abs(a), axis=1)))
    threshold = n * _EPS * row_norm
    if row_norm == 0.0 or np.any(np.abs(diag) <= threshold):
        return LogDet(-math.inf, 0.0, True)
    parity = int(np.sum(piv != np.arange(n))) % 2
    log_mod = float(np.sum(np.log(np.abs(diag))))
    phase = float(np.sum(np.angle(diag))) + parity * math.pi
    phase = math.remainder(phase, 2.0 * math.pi)
    if phase <= -math.pi:
        phase += 2.0 * math.pi
    return LogDet(log_mod, phase, False)


def pointwise_inverse(sym: ScalarSymbol | MatrixSymbol) -> MatrixSymbol:
    """The symbol x -> sym(x)^{-1}, via reciprocal (N=1) or 2x2 adjugate."""
    msym = as_matrix_symbol(sym)
    n = msym.block_size
    if n > 2:
        raise ValueError("pointwise_inverse supports block sizes 1 and 2 only")

    def det_of(x):
        v = msym.sample(x)
        d = v[:, 0, 0] if n == 1 else v[:, 0, 0] * v[:, 1, 1] - v[:, 0, 1] * v[:, 1, 0]
        if np.any(np.abs(d) < 1e-14):
            raise SingularSymbol("det of symbol below 1e-14 on evaluation points")
        return v, d

    if n == 1:
        def inv00(x):
            _, d = det_of(x)
            return 1.0 / d
        return MatrixSymbol.from_entries([[ScalarSymbol(inv00)]])

    def make(i, j):
        # adjugate/det: inv[i][j] = (-1)^{i+j} m[1-j][1-i] / det
        def entry(x):
            v, d = det_of(x)
            src = v[:, 1 - j, 1 - i]
            sign = 1.0 if i == j else -1.0
            return sign * src / d
        return ScalarSymbol(entry)

    return MatrixSymbol.from_entries([[make(i, j) for j in range(2)] for i in range(2)])


def _unwrapped_logdet_samples(sym: MatrixSymbol, grid_size: int):
    x = 2.0 * np.pi * np.arange(grid_size) / grid_size
    x = (x + np.pi) % (2.0 * np.pi) - np.pi
    v = sym.sample(x)
    if sym.block_size == 1:
        d = v[:, 0, 0]
    elif sym.block_size == 2:
        d = v[:, 0, 0] * v[:, 1, 1] - v[:, 0, 1] * v[:, 1, 0]
    else:
        d = np.linalg.det(v)
    if not np.all(np.isfinite(d)):
        raise SampleFailure("symbol evaluator returned non-finite values")
    if np.any(np.abs(d) < 1e-14):
        raise SingularSymbol("det of symbol below 1e-14 on the sampling grid")
    # branch-continuous argument along the grid, closed around the circle
    ang = np.unwrap(np.angle(np.concatenate([d, d[:1]])))
    winding_change = ang[-1] - ang[0]
    return d, ang, winding_change


def winding_check(sym: ScalarSymbol | MatrixSymbol, grid_size: int = 4096) -> None:
    """Raise NonzeroWinding unless arg det sym returns to itself."""
    _, _, change = _unwrapped_logdet_samples(as_matrix_symbol(sym), grid_size)
    if abs(change) >= math.pi:
        raise NonzeroWinding(f"accumulated argument change {change:.3f} rad")


def geometric_mean(sym: ScalarSymbol | MatrixSymbol, grid_size: int = 4096) -> complex:
    """G(sym): exp of the circle average of log det sym.

    The argument of det is unwrapped sequentially along the grid, which both
    verifies the zero-winding hypothesis and fixes the log branch; the
    average is the periodic trapezoid rule including the closing point.
    """
    msym = as_matrix_symbol(sym)
    d, ang, change = _unwrapped_logdet_samples(msym, grid_size)
    if abs(change) >= math.pi:
        raise NonzeroWinding(f"accumulated argument change {change:.3f} rad")
    vals = np.log(np.abs(d)) + 1j * ang[:-1]
    closing = np.log(abs(d[0])) + 1j * ang[-1]
    mean = (0.5 * vals[0] + np.sum(vals[1:]) + 0.5 * closing) / grid_size
    return complex(np.exp(mean))
