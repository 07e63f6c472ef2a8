"""Hot numeric kernels with twin implementations.

Two code paths compute identical quantities:

* a numba ``@njit`` path (default when numba imports cleanly), and
* a pure-numpy path, selected by setting the environment variable
  ``BECSCATTER_NO_NUMBA`` to a non-empty value before import.

``benchmarks/bench_kernels.py`` times one against the other.

The kernels:

* ``sigma_matrix`` - the coherent self-energy matrix over the Fourier grid
  for an order parameter given as windowed plane waves. Each entry is a pair
  of triangular slab integrals of separable exponentials, evaluated in
  closed form with series fallbacks so entries stay finite when the light
  line q lands on (or within 1e-12 of) a grid wavenumber.
* ``cubic_sqrt_eps`` - all three roots of the self-consistent permittivity
  cubic with Newton polishing, plus physical-branch selection.
"""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

ENV_NO_NUMBA = "BECSCATTER_NO_NUMBA"

_SERIES_CUT = 0.5  # |arg|*L below this switches closed forms to power series
_SERIES_TERMS = 16

try:
    if os.environ.get(ENV_NO_NUMBA):
        raise ImportError("numba disabled by environment flag")
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    from numba import njit, prange

    NUMBA_ACTIVE = True
except ImportError:  # pragma: no cover - exercised via env flag in tests
    NUMBA_ACTIVE = False
    prange = range

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def backend_name() -> str:
    return "numba" if NUMBA_ACTIVE else "numpy"


# ---------------------------------------------------------------------------
# scalar helpers (numba path)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _p_line(a, L):
    # integral of exp(i a x) over [0, L]; entire in a
    w = 0.5 * a * L
    if abs(w) < 1e-6:
        w2 = w * w
        s = 1.0 - w2 / 6.0 + w2 * w2 / 120.0
    else:
        s = math.sin(w) / w
    return L * cmath.exp(1j * w) * s


@njit(cache=True)
def _u_series(a, b, L):
    # double integral over 0 <= y <= x <= L of exp(i a x + i b y),
    # power series valid for small |a|L and |b|L
    al = 1j * a * L
    bl = 1j * b * L
    total = 0.0 + 0.0j
    tm = 1.0 + 0.0j
    for m in range(_SERIES_TERMS):
        tn = tm
        for n in range(_SERIES_TERMS):
            total += tn / ((n + 1.0) * (m + n + 2.0))
            tn = tn * bl / (n + 1.0)
        tm = tm * al / (m + 1.0)
    return L * L * total


@njit(cache=True)
def _u_triangle(a, b, L):
    # double integral over 0 <= y <= x <= L of exp(i a x + i b y)
    if abs(b) * L >= _SERIES_CUT:
        return (_p_line(a + b, L) - _p_line(a, L)) / (1j * b)
    if abs(a) * L >= _SERIES_CUT:
        # complement identity: the two triangles tile the square
        return _p_line(a, L) * _p_line(b, L) - (_p_line(a + b, L) - _p_line(b, L)) / (1j * a)
    return _u_series(a, b, L)


@njit(cache=True)
def _triangle(a, b, L):
    # same integral shifted to the slab (-L/2, L/2), z' <= z ordering
    return cmath.exp(-0.5j * (a + b) * L) * _u_triangle(a, b, L)


@njit(cache=True, parallel=True)
def _sigma_block_nb(krow, kcol, amps, kappas, q, L):
    n = krow.shape[0]
    m = kcol.shape[0]
    nc = amps.shape[0]
    cab = np.empty((nc, nc), dtype=np.complex128)
    for a in range(nc):
        for b in range(nc):
            cab[a, b] = amps[a] * np.conj(amps[b])
    out = np.empty((n, m), dtype=np.complex128)
    pref = -1.5j * math.pi * q / L
    for i in prange(n):
        for j in range(m):
            acc = 0.0 + 0.0j
            for a in range(nc):
                for b in range(nc):
                    a1 = kappas[a] + q - krow[i]
                    b1 = kcol[j] - kappas[b] - q
                    a2 = kappas[a] - q - krow[i]
                    b2 = kcol[j] - kappas[b] + q
                    acc += cab[a, b] * (_triangle(a1, b1, L) + _triangle(b2, a2, L))
            out[i, j] = pref * acc
    return out


@njit(cache=True)
def _sigma_diag_nb(ks, amps, kappas, q, L):
    n = ks.shape[0]
    nc = amps.shape[0]
    cab = np.empty((nc, nc), dtype=np.complex128)
    for a in range(nc):
        for b in range(nc):
            cab[a, b] = amps[a] * np.conj(amps[b])
    out = np.empty(n, dtype=np.complex128)
    pref = -1.5j * math.pi * q / L
    for i in range(n):
        acc = 0.0 + 0.0j
        for a in range(nc):
            for b in range(nc):
                a1 = kappas[a] + q - ks[i]
                b1 = ks[i] - kappas[b] - q
                a2 = kappas[a] - q - ks[i]
                b2 = ks[i] - kappas[b] + q
                acc += cab[a, b] * (_triangle(a1, b1, L) + _triangle(b2, a2, L))
        out[i] = pref * acc
    return out


# ---------------------------------------------------------------------------
# vectorized helpers (numpy path)
# ---------------------------------------------------------------------------


def _p_line_np(a, L):
    w = 0.5 * np.asarray(a) * L
    return L * np.exp(1j * w) * np.sinc(w / np.pi)


def _u_series_np(a, b, L):
    al = 1j * a * L
    bl = 1j * b * L
    total = np.zeros(np.broadcast(al, bl).shape, dtype=complex)
    tm = np.ones_like(total)
    for m in range(_SERIES_TERMS):
        tn = tm.copy()
        for n in range(_SERIES_TERMS):
            total += tn / ((n + 1.0) * (m + n + 2.0))
            tn *= bl / (n + 1.0)
        tm *= al / (m + 1.0)
    return L * L * total


def _u_triangle_np(a, b, L):
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=complex)
    big_b = np.abs(b) * L >= _SERIES_CUT
    big_a = ~big_b & (np.abs(a) * L >= _SERIES_CUT)
    small = ~big_b & ~big_a
    if np.any(big_b):
        aa, bb = a[big_b], b[big_b]
        out[big_b] = (_p_line_np(aa + bb, L) - _p_line_np(aa, L)) / (1j * bb)
    if np.any(big_a):
        aa, bb = a[big_a], b[big_a]
        out[big_a] = _p_line_np(aa, L) * _p_line_np(bb, L) - (
            _p_line_np(aa + bb, L) - _p_line_np(bb, L)
        ) / (1j * aa)
    if np.any(small):
        out[small] = _u_series_np(a[small], b[small], L)
    return out


def _triangle_np(a, b, L):
    return np.exp(-0.5j * (a + b) * L) * _u_triangle_np(a, b, L)


def _sigma_block_np(krow, kcol, amps, kappas, q, L):
    col = krow[:, None]
    row = kcol[None, :]
    acc = np.zeros((krow.size, kcol.size), dtype=complex)
    for a in range(amps.size):
        for b in range(amps.size):
            cab = amps[a] * np.conj(amps[b])
            j1 = _triangle_np(kappas[a] + q - col, row - kappas[b] - q, L)
            j2 = _triangle_np(row - kappas[b] + q, kappas[a] - q - col, L)
            acc += cab * (j1 + j2)
    return (-1.5j * np.pi * q / L) * acc


def sigma_block(krow: np.ndarray, kcol: np.ndarray, amps: np.ndarray,
                kappas: np.ndarray, q: float, L: float) -> np.ndarray:
    """Self-energy block Sigma[k_row, k_col] for the order parameter
    sum_a amps[a] exp(i kappas[a] z), at optical wavenumber q.

    Implements (1/L) * double slab integral of
    exp(-i k z + i k' z') * K(z, z') with the coherent-conversion kernel
    K = -(3 pi i / 2) * q * Xi(z) Xi*(z') exp(i q |z - z'|)
    (gamma = 1, k0 = 1 units; the 3/2 carries the dipole-linewidth relation).
    Row/column wavenumbers need not lie on any grid.
    """
    krow = np.array(krow, dtype=np.float64)
    kcol = np.array(kcol, dtype=np.float64)
    amps = np.array(amps, dtype=np.complex128)
    kappas = np.array(kappas, dtype=np.float64)
    if NUMBA_ACTIVE:
        return _sigma_block_nb(krow, kcol, amps, kappas, float(q), float(L))
    return _sigma_block_np(krow, kcol, amps, kappas, float(q), float(L))


def sigma_matrix(ks: np.ndarray, amps: np.ndarray, kappas: np.ndarray,
                 q: float, L: float) -> np.ndarray:
    """Square self-energy matrix on one mode set (see sigma_block)."""
    ks = np.array(ks, dtype=np.float64)
    return sigma_block(ks, ks, amps, kappas, q, L)


def sigma_diag(ks: np.ndarray, amps: np.ndarray, kappas: np.ndarray,
               q: float, L: float) -> np.ndarray:
    """Diagonal self-energy entries Sigma[k, k] for a wavenumber vector."""
    ks = np.array(ks, dtype=np.float64)
    amps = np.array(amps, dtype=np.complex128)
    kappas = np.array(kappas, dtype=np.float64)
    if NUMBA_ACTIVE:
        return _sigma_diag_nb(ks, amps, kappas, float(q), float(L))
    out = np.empty(ks.size, dtype=complex)
    for a in range(amps.size):
        for b in range(amps.size):
            cab = amps[a] * np.conj(amps[b])
            j1 = _triangle_np(kappas[a] + q - ks, ks - kappas[b] - q, L)
            j2 = _triangle_np(ks - kappas[b] + q, kappas[a] - q - ks, L)
            if a == 0 and b == 0:
                out = cab * (j1 + j2)
            else:
                out += cab * (j1 + j2)
    return (-1.5j * np.pi * q / L) * out


# ---------------------------------------------------------------------------
# permittivity cubic
# ---------------------------------------------------------------------------


_BRANCH_TOL = 1e-9
_ETA = 1e-7  # retarded regularization for branch selection


def _cubic_roots_np(delta, b, eta=0.0):
    """Roots of (i/2) x^3 + (delta + i eta + b) x^2 - (i/2) x
    - (delta + i eta - 2b) = 0, vectorized. Returns shape (..., 3)."""
    delta = np.asarray(delta, dtype=complex) + 1j * eta
    b = np.asarray(b, dtype=float)
    shape = np.broadcast(delta, b).shape
    c2 = np.broadcast_to(-2j * (delta + b), shape).astype(complex)
    c1 = np.full(shape, -1.0 + 0.0j)
    c0 = np.broadcast_to(2j * (delta - 2.0 * b), shape).astype(complex)

    p = c1 - c2 * c2 / 3.0
    qd = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = np.sqrt((qd / 2.0) ** 2 + (p / 3.0) ** 3)
    u3 = -qd / 2.0 + disc
    # avoid the u ~ 0 stagnation branch of Cardano
    alt = -qd / 2.0 - disc
    u3 = np.where(np.abs(u3) >= np.abs(alt), u3, alt)
    u = u3 ** (1.0 / 3.0)
    u = np.where(u == 0, 1e-150 + 0j, u)
    zeta = complex(-0.5, math.sqrt(3.0) / 2.0)
    roots = np.empty(shape + (3,), dtype=complex)
    for k in range(3):
        uk = u * zeta**k
        roots[..., k] = uk - p / (3.0 * uk) - c2 / 3.0
    # Newton polish on the monic cubic
    for _ in range(3):
        x = roots
        f = ((x + c2[..., None]) * x + c1[..., None]) * x + c0[..., None]
        fp = (3.0 * x + 2.0 * c2[..., None]) * x + c1[..., None]
        step = np.where(fp != 0, f / np.where(fp == 0, 1, fp), 0)
        roots = x - step
    return roots


def _select_root_np(roots, b):
    """Pick the physical sqrt(eps) among the three roots of the cubic at
    detuning + i eta (retarded prescription).

    Away from the polaritonic stop band the root set of the unshifted
    cubic is closed under x -> -conj(x), so exactly one root carries
    Im(eps) > 0: the damped branch continuously connected to x = 1 far
    from resonance. Inside the stop band (dense media) all three
    unshifted roots are purely imaginary (eps real and negative, an
    evanescent band with no absorption); the causal branch is the one
    that gains Im(eps) > 0 under the +i eta shift. At b = 0 every root
    is lossless and the one nearest vacuum x = 1 is physical.
    """
    im_x = roots.imag
    eps = roots * roots
    im_e = eps.imag
    valid = (im_x >= -1e-6) & (im_e >= -1e-6)
    if not np.all(np.any(valid, axis=-1)):
        raise ArithmeticError(
            "no cubic root satisfies the physical branch conditions "
            "(Im sqrt(eps) >= 0 and Im eps >= 0)"
        )
    score = np.where(valid, im_e, -np.inf)
    best = np.argmax(score, axis=-1)
    picked = np.take_along_axis(roots, best[..., None], axis=-1)[..., 0]
    absorbing = np.take_along_axis(score, best[..., None], axis=-1)[..., 0] \
        > 0.1 * _ETA
    # lossless points (b == 0): nearest to vacuum
    dist = np.where(valid, np.abs(roots - 1.0), np.inf)
    nearest = np.take_along_axis(
        roots, np.argmin(dist, axis=-1)[..., None], axis=-1
    )[..., 0]
    return np.where(absorbing, picked, nearest)


def _polish_np(x, delta, b, iterations=4):
    """Newton-polish candidate sqrt(eps) on the unshifted cubic."""
    delta = np.asarray(delta, dtype=float)
    b = np.asarray(b, dtype=float)
    c2 = -2j * (delta + b)
    c0 = 2j * (delta - 2.0 * b)
    for _ in range(iterations):
        f = ((x + c2) * x - 1.0) * x + c0
        fp = (3.0 * x + 2.0 * c2) * x - 1.0
        step = np.where(fp != 0, f / np.where(fp == 0, 1, fp), 0)
        x = x - step
    return x


@njit(cache=True)
def _cubic_sqrt_eps_nb(delta, b):
    n = delta.shape[0]
    out = np.empty(n, dtype=np.complex128)
    zeta = complex(-0.5, math.sqrt(3.0) / 2.0)
    for i in range(n):
        # selection pass on the retarded-shifted cubic (delta + i eta)
        ds = delta[i] + 1j * _ETA
        c2 = -2j * (ds + b[i])
        c1 = -1.0 + 0.0j
        c0 = 2j * (ds - 2.0 * b[i])
        p = c1 - c2 * c2 / 3.0
        qd = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
        disc = cmath.sqrt((qd / 2.0) ** 2 + (p / 3.0) ** 3)
        u3 = -qd / 2.0 + disc
        alt = -qd / 2.0 - disc
        if abs(alt) > abs(u3):
            u3 = alt
        if u3 == 0:
            u = 1e-150 + 0j
        else:
            u = u3 ** (1.0 / 3.0)
        best = complex(np.nan, np.nan)
        best_ime = -np.inf
        near = complex(np.nan, np.nan)
        near_dist = np.inf
        found = False
        for k in range(3):
            uk = u * zeta**k
            x = uk - p / (3.0 * uk) - c2 / 3.0
            for _ in range(3):
                f = ((x + c2) * x + c1) * x + c0
                fp = (3.0 * x + 2.0 * c2) * x + c1
                if fp != 0:
                    x = x - f / fp
            e = x * x
            if x.imag >= -1e-6 and e.imag >= -1e-6:
                found = True
                if e.imag > best_ime:
                    best_ime = e.imag
                    best = x
                d = abs(x - 1.0)
                if d < near_dist:
                    near_dist = d
                    near = x
        if not found:
            out[i] = complex(np.nan, np.nan)
            continue
        x = best if best_ime > 0.1 * _ETA else near
        # polish on the unshifted cubic
        c2u = -2j * (delta[i] + b[i])
        c0u = 2j * (delta[i] - 2.0 * b[i])
        for _ in range(4):
            f = ((x + c2u) * x - 1.0) * x + c0u
            fp = (3.0 * x + 2.0 * c2u) * x - 1.0
            if fp != 0:
                x = x - f / fp
        out[i] = x
    return out


def cubic_sqrt_eps(delta, b):
    """Physical sqrt(eps) solving the self-consistent permittivity cubic at
    effective detuning `delta` and local-field shift `b` (both in gamma).

    Broadcasts over array inputs; raises ArithmeticError when no root meets
    the physical branch conditions.
    """
    delta_a, b_a = np.broadcast_arrays(
        np.asarray(delta, dtype=float), np.asarray(b, dtype=float)
    )
    if NUMBA_ACTIVE:
        flat = _cubic_sqrt_eps_nb(
            np.array(delta_a.ravel(), dtype=np.float64),
            np.array(b_a.ravel(), dtype=np.float64),
        )
        if np.any(np.isnan(flat)):
            raise ArithmeticError(
                "no cubic root satisfies the physical branch conditions "
                "(Im sqrt(eps) >= 0 and Im eps >= 0)"
            )
        out = flat.reshape(delta_a.shape)
    else:
        roots = _cubic_roots_np(delta_a, b_a, eta=_ETA)
        out = _polish_np(_select_root_np(roots, b_a), delta_a, b_a)
    if np.ndim(delta) == 0 and np.ndim(b) == 0:
        return complex(out)
    return out
