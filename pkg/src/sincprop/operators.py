"""Sectorial operators with shifted-resolvent solves.

Every operator A here is real, symmetric positive definite in effect, and exposes
solves of (w*I + A)x = v for complex shifts w.  The shift is the already-powered
quantity z^alpha supplied by the propagator quadrature, so this module stays ignorant
of the fractional order.  All implementations are immutable and reentrant; solves at
distinct shifts may run concurrently.
"""

import math
from abc import ABC, abstractmethod

import numpy as np

from .contour import SpectralParams

DEFAULT_PHI_S = math.pi / 60


class ResolventError(ArithmeticError):
    """Singular or near-singular shifted system; carries the offending location."""


class SectorialOperator(ABC):
    """Interface: dim, spectral, conjugate_symmetric, apply, resolvent_solve."""

    dim: int
    spectral: SpectralParams
    # True when R(conj w) v = conj(R(w) conj(v)); enables the half-contour reduction.
    conjugate_symmetric: bool = True

    @abstractmethod
    def apply(self, v):
        """Forward action A v."""

    @abstractmethod
    def resolvent_solve(self, w, v):
        """Solve (w I + A) x = v for one complex shift w."""

    def resolvent_solve_many(self, ws, v):
        """Solve (w I + A) x = v for a batch of shifts; returns (len(ws), dim).

        Default loops over resolvent_solve; concrete operators vectorize.
        """
        ws = np.asarray(ws)
        out = np.empty((ws.shape[0], self.dim), dtype=complex)
        for i, w in enumerate(ws):
            out[i] = self.resolvent_solve(w, v)
        return out

    def _check_dim(self, v):
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise ValueError(f"vector has shape {v.shape}, operator dim is {self.dim}")
        return v


class ScalarOperator(SectorialOperator):
    """A = lam > 0 acting on C^1; resolvent is v/(w + lam)."""

    def __init__(self, lam: float, phi_s: float = DEFAULT_PHI_S):
        if not lam > 0:
            raise ValueError("lam must be positive")
        self.lam = float(lam)
        self.dim = 1
        self.spectral = SpectralParams(rho_s=self.lam, phi_s=phi_s)
        self.conjugate_symmetric = True

    def apply(self, v):
        return self.lam * self._check_dim(v)

    def resolvent_solve(self, w, v):
        v = self._check_dim(v)
        den = w + self.lam
        if abs(den) < 1e-14:
            raise ResolventError(f"shift w = {w} within 1e-14 of -lam = {-self.lam}")
        return v / den

    def resolvent_solve_many(self, ws, v):
        v = self._check_dim(v)
        den = np.asarray(ws)[:, None] + self.lam
        bad = np.abs(den) < 1e-14
        if bad.any():
            raise ResolventError(f"shift index {int(np.argmax(bad))} within 1e-14 of -lam")
        return v[None, :] / den


class DiagonalOperator(SectorialOperator):
    """A = diag(eigenvalues), eigenvalues > 0; componentwise resolvent."""

    def __init__(self, eigenvalues, phi_s: float = DEFAULT_PHI_S):
        ev = np.asarray(eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0 or not np.all(ev > 0):
            raise ValueError("eigenvalues must be a nonempty 1-d array of positive reals")
        self.eigenvalues = ev
        self.dim = ev.size
        self.spectral = SpectralParams(rho_s=float(ev.min()), phi_s=phi_s)
        self.conjugate_symmetric = True

    def apply(self, v):
        return self.eigenvalues * self._check_dim(v)

    def resolvent_solve(self, w, v):
        v = self._check_dim(v)
        den = w + self.eigenvalues
        bad = np.abs(den) < 1e-14
        if bad.any():
            k = int(np.argmax(bad))
            raise ResolventError(f"shift w = {w} within 1e-14 of -eigenvalue[{k}]")
        return v / den

    def resolvent_solve_many(self, ws, v):
        v = self._check_dim(v)
        den = np.asarray(ws)[:, None] + self.eigenvalues[None, :]
        bad = np.abs(den) < 1e-14
        if bad.any():
            i, k = np.unravel_index(int(np.argmax(bad)), den.shape)
            raise ResolventError(f"shift index {i} within 1e-14 of -eigenvalue[{k}]")
        return v[None, :] / den


def tridiag_solve(diag, off, rhs):
    """Solve the symmetric tridiagonal system tridiag(off, diag_i, off) x = rhs.

    diag: complex vector of length n; off: complex scalar on both off-diagonals;
    rhs: complex vector.  Thomas elimination without pivoting, O(n); raises
    ResolventError on a zero or tiny pivot (relative to the row scale).
    """
    diag = np.asarray(diag, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    n = diag.size
    if rhs.shape != (n,):
        raise ValueError("rhs length must match diag length")
    off = complex(off)
    scale = max(np.abs(diag).max(), abs(off), 1e-300)
    c = np.empty(n, dtype=complex)   # superdiagonal multipliers
    d = np.empty(n, dtype=complex)
    piv = diag[0]
    if abs(piv) < 1e-14 * scale:
        raise ResolventError("zero pivot at row 0")
    c[0] = off / piv
    d[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - off * c[i - 1]
        if abs(piv) < 1e-14 * scale:
            raise ResolventError(f"zero pivot at row {i}")
        c[i] = off / piv
        d[i] = (rhs[i] - off * d[i - 1]) / piv
    x = np.empty(n, dtype=complex)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _tridiag_solve_batch(diag0, shifts, off, rhs):
    """Solve (shift_k + diag0_i) tridiagonal systems for all k at once.

    diag0: real base diagonal (length n); shifts: complex vector (one per system);
    off: scalar off-diagonal shared by all; rhs: (n,) shared right-hand side or
    (k, n) per-system right-hand sides.  Returns (k, n).  The space recursion is
    sequential; all k systems advance together as vector operations.
    """
    shifts = np.asarray(shifts, dtype=complex)
    nsys = shifts.size
    n = diag0.size
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.ndim == 1:
        rhs = np.broadcast_to(rhs, (nsys, n))
    c = np.empty((nsys, n), dtype=complex)
    d = np.empty((nsys, n), dtype=complex)
    piv = shifts + diag0[0]
    _check_pivots(piv, 0)
    c[:, 0] = off / piv
    d[:, 0] = rhs[:, 0] / piv
    for i in range(1, n):
        piv = (shifts + diag0[i]) - off * c[:, i - 1]
        _check_pivots(piv, i)
        c[:, i] = off / piv
        d[:, i] = (rhs[:, i] - off * d[:, i - 1]) / piv
    x = np.empty((nsys, n), dtype=complex)
    x[:, -1] = d[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = d[:, i] - c[:, i] * x[:, i + 1]
    return x


def _check_pivots(piv, row):
    bad = np.abs(piv) < 1e-300
    if bad.any():
        raise ResolventError(f"zero pivot at row {row}, system {int(np.argmax(bad))}")


class FdLaplacian1D(SectorialOperator):
    """Second-order finite-difference -a*d2/dx2 on (0,L) with Dirichlet boundaries.

    Grid x_i = L*(i-1)/(m-1), i = 1..m; the operator acts on the m-2 interior values.
    Matrix: a*(m-1)^2/L^2 * tridiag(-1, 2, -1).  Discrete eigenpairs are
    sin(pi*k*x_i/L) with eigenvalue 4a(m-1)^2/L^2 * sin^2(pi*k/(2(m-1))).
    """

    def __init__(self, m: int, a: float = 1.0, L: float = 1.0,
                 phi_s: float = DEFAULT_PHI_S):
        if m < 3:
            raise ValueError("m must be >= 3 (at least one interior node)")
        if a <= 0 or L <= 0:
            raise ValueError("a and L must be positive")
        self.m = int(m)
        self.a = float(a)
        self.L = float(L)
        self.dim = self.m - 2
        self.c = self.a * (self.m - 1) ** 2 / self.L ** 2
        lam_min = 4 * self.c * math.sin(math.pi / (2 * (self.m - 1))) ** 2
        self.spectral = SpectralParams(rho_s=lam_min, phi_s=phi_s)
        self.conjugate_symmetric = True
        self._diag0 = np.full(self.dim, 2.0 * self.c)
        self._off = -self.c

    @property
    def x_interior(self):
        """Interior grid nodes (length m-2)."""
        return self.L * np.arange(1, self.m - 1) / (self.m - 1)

    @property
    def x_full(self):
        """Full grid including boundaries (length m)."""
        return self.L * np.arange(self.m) / (self.m - 1)

    def apply(self, v):
        v = self._check_dim(v)
        out = 2.0 * v.astype(complex if np.iscomplexobj(v) else float, copy=True)
        out[:-1] -= v[1:]
        out[1:] -= v[:-1]
        return self.c * out

    def resolvent_solve(self, w, v):
        v = self._check_dim(v)
        return tridiag_solve(self._diag0 + w, self._off, v)

    def resolvent_solve_many(self, ws, v):
        v = self._check_dim(v)
        return _tridiag_solve_batch(self._diag0, np.asarray(ws), self._off, v)

    def resolvent_solve_block(self, ws, rhs_block):
        """Per-shift right-hand sides: rhs_block has shape (len(ws), dim)."""
        return _tridiag_solve_batch(self._diag0, np.asarray(ws), self._off, rhs_block)


def resolvent_solve(op: SectorialOperator, w, v):
    """Module-level form of op.resolvent_solve(w, v)."""
    return op.resolvent_solve(w, v)


def apply(op: SectorialOperator, v):
    """Module-level form of op.apply(v)."""
    return op.apply(v)


def resolvent_solve_block(op: SectorialOperator, ws, rhs_block):
    """Solve (w_k I + A) x_k = rhs_k for per-shift right-hand sides, shape (k, dim)."""
    if isinstance(op, FdLaplacian1D):
        return op.resolvent_solve_block(ws, rhs_block)
    ws = np.asarray(ws)
    rhs_block = np.asarray(rhs_block, dtype=complex)
    if isinstance(op, ScalarOperator):
        return rhs_block / (ws[:, None] + op.lam)
    if isinstance(op, DiagonalOperator):
        return rhs_block / (ws[:, None] + op.eigenvalues[None, :])
    out = np.empty_like(rhs_block)
    for i, w in enumerate(ws):
        out[i] = op.resolvent_solve(w, rhs_block[i])
    return out
