"""Quasi-periodic sections over an elliptic curve and the lattice Fourier transform.

Fix tau = wx + i wy (wy > 0), the lattice Z + tau Z, and a degree p != 0.  The
degree-p sections in the unitary gauge are the smooth functions with

    f(z + 1) = f(z),      f(z + tau) = e^{-pi i p (wx + 2x)} f(z),

and every such section is a lattice-shifted Fourier series over p packet
fibers (the Weil-Brezin-Zak expansion):

    f(z) = sum_n e^{2 pi i n x} e^{pi i n^2 wx / p} f_[n](y + n wy / p),
    f_[n](y) = int_0^1 e^{-2 pi i n x} e^{pi i n^2 wx / p} f(z - (n/p) tau) dx,

with [n] = n mod p.  Covariant derivatives act fiberwise: the x-direction one
multiplies the fiber argument by 2 pi i p / wy, the y-direction one
differentiates.  The holomorphic gauge differs by exp(pi p y^2 / wy) and is
spanned, for p > 0, by the p theta-like series with Fourier support on a fixed
residue class; the prototype is the Jacobi theta function
theta(z; q) = sum q^{n^2} e^{2 pi i n z}, q = e^{pi i tau}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import AccuracyError, InvalidArgument
from .heis_modules import FiberVector, constraint_check
from .weyl_core import (GaussPacket, packet_derivative, packet_eval,
                        packet_mul_t, packet_scale)

_TWO_PI_I = 2j * math.pi

#: Default truncation radius of the section series.
DEFAULT_SERIES_N = 12


@dataclass(frozen=True)
class ModuliParams:
    """Deformation parameter, modular parameter and degree of a section space."""

    theta: float
    tau: complex
    p: int

    def __post_init__(self):
        if not (0.0 <= self.theta < 1.0):
            raise InvalidArgument(f"theta must lie in [0,1), got {self.theta!r}")
        if not complex(self.tau).imag > 0:
            raise InvalidArgument(f"Im(tau) must be positive, got {self.tau!r}")
        if int(self.p) != self.p or self.p == 0:
            raise InvalidArgument(f"p must be a nonzero integer, got {self.p!r}")

    @property
    def omega_x(self) -> float:
        return complex(self.tau).real

    @property
    def omega_y(self) -> float:
        return complex(self.tau).imag

    @property
    def constraint_satisfied(self) -> bool:
        return constraint_check(self.tau, self.theta, self.p)[0]

    @property
    def r(self) -> int | None:
        return constraint_check(self.tau, self.theta, self.p)[1]

    @property
    def s(self) -> int | None:
        return constraint_check(self.tau, self.theta, self.p)[2]


@dataclass(frozen=True)
class QuasiSection:
    """Packet fibers plus parameters; evaluated through the truncated series."""

    params: ModuliParams
    fibers: FiberVector
    series_N: int = DEFAULT_SERIES_N

    def __post_init__(self):
        if self.params.p < 1:
            raise InvalidArgument("sections with packet fibers need p >= 1")
        if self.fibers.p != self.params.p:
            raise InvalidArgument(
                f"fiber count {self.fibers.p} does not match p = {self.params.p}")
        if self.series_N < 1:
            raise InvalidArgument(f"series_N must be >= 1, got {self.series_N!r}")


def wbz_forward_eval(sec: QuasiSection, z):
    """Evaluate the truncated section series at z (scalar or numpy array)."""
    params = sec.params
    p, wx, wy = params.p, params.omega_x, params.omega_y
    zz = np.asarray(z, dtype=complex)
    x, y = zz.real, zz.imag
    total = np.zeros(zz.shape, dtype=complex)
    for n in range(-sec.series_N, sec.series_N + 1):
        phase = np.exp(_TWO_PI_I * n * x) * cmath.exp(1j * math.pi * n * n * wx / p)
        total = total + phase * packet_eval(sec.fibers.components[n % p], y + n * wy / p)
    if zz.ndim == 0:
        return complex(total)
    return total


def wbz_evaluator(sec: QuasiSection) -> Callable:
    return lambda z: wbz_forward_eval(sec, z)


def wbz_truncation_bound(sec: QuasiSection) -> float:
    """Conservative bound on the dropped series tail.

    Each omitted term has |n| > series_N, so its fiber is evaluated at
    arguments of magnitude >= T = series_N * wy / p (up to the fundamental
    domain offset); the bound sums, over fibers and terms, twice the supremum
    of |amp| |t|^deg e^{-pi (t-c)^2 / w} over |t| >= T, complemented with a
    geometric factor 2 for the remaining terms of the tail.
    """
    params = sec.params
    T = sec.series_N * params.omega_y / params.p
    bound = 0.0
    for packet in sec.fibers.components:
        for term in packet.terms:
            sup = max(_packet_term_sup(term, T), _packet_term_sup(term, -T))
            bound += 4.0 * abs(term.amp) * sup
    return bound


def _packet_term_sup(term, T: float) -> float:
    """sup of |t|^deg e^{-pi (t - c)^2 / w} over the ray past T (same sign)."""
    sign = 1.0 if T >= 0 else -1.0
    Tm = abs(T)
    c = term.center * sign
    # stationary point of |t|^d e^{-pi (t - c)^2 / w} on t > 0
    if term.deg > 0:
        disc = c * c + 2.0 * term.deg * term.width / math.pi
        t_star = 0.5 * (c + math.sqrt(disc))
    else:
        t_star = c
    t_eval = max(Tm, t_star)
    if t_star < Tm:
        t_eval = Tm
    return t_eval ** term.deg * math.exp(-math.pi * (t_eval - c) ** 2 / term.width)


def _call_eval(f_eval: Callable, z: np.ndarray) -> np.ndarray:
    out = f_eval(z)
    arr = np.asarray(out, dtype=complex)
    if arr.shape != z.shape:
        arr = np.array([complex(f_eval(w)) for w in z.ravel()]).reshape(z.shape)
    return arr


def wbz_inverse(f_eval: Callable, params: ModuliParams, n: int, y_grid,
                tol: float = 1e-10, max_nodes: int = 512) -> np.ndarray:
    """Recover samples of the n-th fiber from a section evaluator.

    f_[n](y) = int_0^1 e^{-2 pi i n x} e^{pi i n^2 wx / p} f(z - (n/p) tau) dx,
    computed with a doubling periodic trapezoid rule (spectrally accurate for
    smooth periodic integrands).  Raises AccuracyError when successive
    refinements still disagree beyond 1e-8 at the node cap.
    """
    p, wx, wy = params.p, params.omega_x, params.omega_y
    ys = np.asarray(y_grid, dtype=float)
    prefactor = cmath.exp(1j * math.pi * n * n * wx / p)

    def estimate(nodes: int) -> np.ndarray:
        xs = np.arange(nodes) / nodes
        z = (xs[None, :] - n * wx / p) + 1j * (ys[:, None] - n * wy / p)
        vals = _call_eval(f_eval, z)
        weights = np.exp(-_TWO_PI_I * n * xs)
        return prefactor * (vals * weights[None, :]).mean(axis=1)

    nodes = 16
    prev = estimate(nodes)
    while True:
        nodes *= 2
        cur = estimate(nodes)
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol:
            return cur
        if nodes >= max_nodes:
            if err > 1e-8:
                raise AccuracyError(f"fiber quadrature stalled at {err:.3e}")
            return cur
        prev = cur


# ---------------------------------------------------------------------------
# Factors of automorphy and quasi-periodicity defects
# ---------------------------------------------------------------------------

def automorphy_factor(kind: str, p: int, lam: tuple[int, int], z, tau: complex):
    """Degree-p factor of automorphy at lattice point lam = (m, n), m + n tau.

    kind "alpha": (q^{-n^2} e^{-2 pi i n z})^p with q = e^{pi i tau}
    (holomorphic gauge); kind "beta": (e^{-pi i wx n^2} e^{-2 pi i n x})^p,
    which has modulus one (unitary gauge).
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidArgument(f"Im(tau) must be positive, got {tau!r}")
    _, n = lam
    zz = np.asarray(z, dtype=complex)
    if kind == "alpha":
        out = np.exp(-1j * math.pi * tau * p * n * n - _TWO_PI_I * p * n * zz)
    elif kind == "beta":
        out = np.exp((-1j * math.pi * tau.real * p * n * n) - _TWO_PI_I * p * n * zz.real)
    else:
        raise InvalidArgument(f"unknown factor kind {kind!r}")
    if zz.ndim == 0:
        return complex(out)
    return out


def cocycle_defect_fn(factor: Callable, tau: complex, samples: int,
                      rng: np.random.Generator) -> float:
    """Max relative residual of factor(l+l', z) = factor(l, z+l') factor(l', z)."""
    tau = complex(tau)
    worst = 0.0
    for _ in range(samples):
        m1, n1, m2, n2 = (int(v) for v in rng.integers(-3, 4, size=4))
        x = float(rng.uniform(0.0, 1.0))
        y = float(rng.uniform(0.0, tau.imag))
        z = complex(x, y)
        lam1, lam2 = (m1, n1), (m2, n2)
        lhs = factor((m1 + m2, n1 + n2), z)
        rhs = factor(lam1, z + (m2 + n2 * tau)) * factor(lam2, z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def cocycle_defect(kind: str, p: int, tau: complex, samples: int,
                   seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    return cocycle_defect_fn(
        lambda lam, z: automorphy_factor(kind, p, lam, z, tau), tau, samples, rng)


def _tau_p_of(params) -> tuple[complex, int]:
    if isinstance(params, tuple):
        tau, p = params
        return complex(tau), int(p)
    return complex(params.tau), int(params.p)


def quasiperiodicity_defect(f_eval: Callable, params, grid: int) -> float:
    """Max residual of the two section relations over a grid of the fundamental
    parallelogram.  `params` is a ModuliParams or a plain (tau, p) pair."""
    if grid < 2:
        raise InvalidArgument(f"grid must be >= 2, got {grid!r}")
    tau, p = _tau_p_of(params)
    wx = tau.real
    ts = np.arange(grid) / grid
    a, b = np.meshgrid(ts, ts, indexing="ij")
    z = a + tau * b
    f0 = _call_eval(f_eval, z)
    f1 = _call_eval(f_eval, z + 1.0)
    ft = _call_eval(f_eval, z + tau)
    factor = np.exp(-1j * math.pi * p * (wx + 2.0 * z.real))
    return float(max(np.max(np.abs(f1 - f0)), np.max(np.abs(ft - factor * f0))))


def automorphy_defect(f_eval: Callable, kind: str, p: int, tau: complex,
                      grid: int) -> float:
    """Relative defect of f(z + lam) = factor(lam, z) f(z) for lam = 1 and tau.

    Residuals are normalized by the largest sampled |f|, clamped below at 1,
    since the holomorphic-gauge factor grows exponentially.
    """
    if grid < 2:
        raise InvalidArgument(f"grid must be >= 2, got {grid!r}")
    tau = complex(tau)
    ts = np.arange(grid) / grid
    a, b = np.meshgrid(ts, ts, indexing="ij")
    z = a + tau * b
    f0 = _call_eval(f_eval, z)
    f1 = _call_eval(f_eval, z + 1.0)
    ft = _call_eval(f_eval, z + tau)
    fac1 = automorphy_factor(kind, p, (1, 0), z, tau)
    fact = automorphy_factor(kind, p, (0, 1), z, tau)
    scale = max(1.0, float(np.max(np.abs(f0))), float(np.max(np.abs(f1))),
                float(np.max(np.abs(ft))))
    r1 = np.max(np.abs(f1 - fac1 * f0))
    r2 = np.max(np.abs(ft - fact * f0))
    return float(max(r1, r2)) / scale


# ---------------------------------------------------------------------------
# Covariant derivatives
# ---------------------------------------------------------------------------

def nabla_fiber(direction: int, sec: QuasiSection) -> QuasiSection:
    """Covariant derivative acting at the fiber level.

    Direction 1 ((d/dx + 2 pi i p y / wy) on sections) multiplies each fiber by
    (2 pi i p / wy) t; direction 2 (d/dy) differentiates each fiber.
    """
    params = sec.params
    if direction == 1:
        c = _TWO_PI_I * params.p / params.omega_y
        comps = [packet_scale(packet_mul_t(f), c) for f in sec.fibers.components]
    elif direction == 2:
        comps = [packet_derivative(f) for f in sec.fibers.components]
    else:
        raise InvalidArgument(f"direction must be 1 or 2, got {direction!r}")
    return QuasiSection(params=params, fibers=FiberVector(tuple(comps)),
                        series_N=sec.series_N)


# ---------------------------------------------------------------------------
# Theta functions and holomorphicity
# ---------------------------------------------------------------------------

def jacobi_theta(z, tau: complex, N: int):
    """Truncated theta series sum_{|n|<=N} q^{n^2} e^{2 pi i n z}, q = e^{pi i tau}."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidArgument(f"Im(tau) must be positive, got {tau!r}")
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N!r}")
    zz = np.asarray(z, dtype=complex)
    total = np.zeros(zz.shape, dtype=complex)
    for n in range(-N, N + 1):
        total = total + np.exp(1j * math.pi * tau * n * n + _TWO_PI_I * n * zz)
    if zz.ndim == 0:
        return complex(total)
    return total


def jacobi_theta_tail(y_max: float, tau: complex, N: int) -> float:
    """Geometric bound on the dropped tail for |Im z| <= y_max."""
    q_abs = abs(cmath.exp(1j * math.pi * complex(tau)))
    first = q_abs ** ((N + 1) ** 2) * math.exp(2 * math.pi * (N + 1) * y_max)
    ratio = q_abs ** (2 * N + 3) * math.exp(2 * math.pi * y_max)
    if ratio >= 1.0:
        return math.inf
    return 2.0 * first / (1.0 - ratio)


def holo_basis(p: int, tau: complex, n_class: int, N: int = DEFAULT_SERIES_N) -> Callable:
    """Evaluator of the holomorphic-gauge basis section supported on one residue
    class: f(z) = sum_{n = n_class mod p, |n| <= N} q^{n^2/p} e^{2 pi i n z}."""
    tau = complex(tau)
    if int(p) != p or p <= 0:
        raise InvalidArgument(f"the holomorphic space is trivial unless p > 0, got {p!r}")
    if not 0 <= n_class < p:
        raise InvalidArgument(f"n_class must lie in 0..{p - 1}, got {n_class!r}")
    if not tau.imag > 0:
        raise InvalidArgument(f"Im(tau) must be positive, got {tau!r}")
    ns = [n for n in range(-N, N + 1) if n % p == n_class]

    def f(z):
        zz = np.asarray(z, dtype=complex)
        total = np.zeros(zz.shape, dtype=complex)
        for n in ns:
            total = total + np.exp(1j * math.pi * tau * n * n / p + _TWO_PI_I * n * zz)
        if zz.ndim == 0:
            return complex(total)
        return total

    return f


def holo_dimension(p: int, tau: complex) -> int:
    """Dimension of the space of holomorphic sections of degree p.

    The fiber equation (2 pi p y / wy + d/dy) f = 0 has the Gaussian solution
    exp(-pi p y^2 / wy), normalizable exactly when its width wy / p is
    positive; each residue class then contributes one basis element.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidArgument(f"Im(tau) must be positive, got {tau!r}")
    width = tau.imag / p if p != 0 else -1.0
    return int(p) if width > 0 else 0


def dbar_defect(f_eval: Callable, grid: int, h: float) -> float:
    """Max of |(d/dx + i d/dy) f| / 2 over a grid, by fourth-order central
    differences, normalized by the largest sampled |f|."""
    if grid < 2:
        raise InvalidArgument(f"grid must be >= 2, got {grid!r}")
    if not h > 0:
        raise InvalidArgument(f"h must be positive, got {h!r}")
    ts = np.arange(grid) / grid
    a, b = np.meshgrid(ts, ts, indexing="ij")
    z = a + 1j * b

    def d4(step):
        return (-_call_eval(f_eval, z + 2 * step) + 8 * _call_eval(f_eval, z + step)
                - 8 * _call_eval(f_eval, z - step) + _call_eval(f_eval, z - 2 * step)) / (12 * step_len)

    step_len = h
    dx = d4(h)
    dy = d4(1j * h)
    dbar = 0.5 * (dx + 1j * dy)
    scale = max(float(np.max(np.abs(_call_eval(f_eval, z)))), 1e-300)
    return float(np.max(np.abs(dbar))) / scale


def holo_gram(p: int, tau: complex, N: int = DEFAULT_SERIES_N,
              grid: int = 64) -> np.ndarray:
    """Gram matrix of the p holomorphic basis sections.

    The pairing is L2 over the fundamental parallelogram with the gauge weight
    exp(-2 pi p y^2 / wy), which makes the integrand doubly periodic; the
    integral uses the periodic trapezoid rule on a grid x grid mesh.
    """
    tau = complex(tau)
    fs = [holo_basis(p, tau, j, N) for j in range(p)]
    ts = np.arange(grid) / grid
    a, b = np.meshgrid(ts, ts, indexing="ij")
    z = a + tau * b
    weight = np.exp(-2 * math.pi * p * z.imag ** 2 / tau.imag)
    vals = [f(z) for f in fs]
    cell = tau.imag / (grid * grid)
    G = np.zeros((p, p), dtype=complex)
    for j in range(p):
        for k in range(p):
            G[j, k] = np.sum(np.conj(vals[j]) * vals[k] * weight) * cell
    return G


# ---------------------------------------------------------------------------
# Grid export
# ---------------------------------------------------------------------------

def section_grid_samples(sec: QuasiSection, grid: int) -> Iterable[tuple[float, float, float, float]]:
    """Rows (x, y, re, im) over a regular grid of the fundamental parallelogram."""
    tau = complex(sec.params.tau)
    ts = np.arange(grid) / grid
    for bi in range(grid):
        zrow = ts + tau * ts[bi]
        vals = wbz_forward_eval(sec, zrow)
        for ai in range(grid):
            z = zrow[ai]
            yield (float(z.real), float(z.imag), float(vals[ai].real), float(vals[ai].imag))
