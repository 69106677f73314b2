"""Module actions on vectors of wave packets, and their Hermitian structures.

A fiber vector is a p-tuple of Gaussian packets, indexed by residue classes
0..p-1.  Three right-module structures act on it through Weyl operators
tensored with the p x p clock and shift unitaries C, S (C S = e^{2 pi i / p} S C):

  * heis_act      psi <| U = {W(s/p + theta, 0) (x) (S*)^s} psi,
                  psi <| V = {W(0, 1) (x) C} psi,
  * classical_act f <| u = {W(wy/p, -wx/wy) (x) S} f,
                  f <| v = {W(0, 1/wy) (x) C*} f,
  * deformed_act  f <| U = e^{pi i r/p} {W(s/p + theta, 0) (x) (C*)^r S} f,
                  f <| V = {W(0, 1) (x) (C*)^s} f,

where tau = wx + i wy and (r, s) come from the integrality constraint
tau - (p theta / 2) i in Z + iZ.  The deformed action exists exactly when that
constraint holds; its function-side counterpart is the translated/modulated
right action

    (f <| U)(x, y) = e^{2 pi i x} f(x, y - theta/2),
    (f <| V)(x, y) = e^{2 pi i y} f(x + theta/2, y).

Hermitian structures pair fibers pointwise, (psi|phi)_t = sum_r conj(psi_r) phi_r,
and integrate the pairing against monomials of the acting algebra.  The
section-level star product implements the closed series

    (conj(f) * g)(z) = sum_{m,k} u^k conj(f_[m])(y + m s/p - k theta/2)
                                  g_[m+k](y + (m+k) s/p + k theta/2)

(valid for r = 0; periodic in y only when s = 1), whose quantization matches
the deformed-action Hermitian sum coefficient by coefficient.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, InvalidArgument
from .nctorus import (ALGEBRA, FUNCTION, TorusElement, quantize_T, torus_element)
from .weyl_core import (GaussPacket, WeylTerm, apply_weylsum, packet_add,
                        packet_eval, packet_inner, packet_scale, weyl_sum)

_TWO_PI_I = 2j * math.pi


def constraint_check(tau: complex, theta: float, p: int,
                     tol: float = 1e-9) -> tuple[bool, int | None, int | None]:
    """Test tau - (p theta / 2) i in Z + iZ; returns (ok, r, s) with
    r = round(Re tau), s = round(Im tau - p theta / 2) when satisfied."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidArgument(f"Im(tau) must be positive, got {tau!r}")
    r = round(tau.real)
    s = round(tau.imag - p * theta / 2.0)
    ok = (abs(tau.real - r) <= tol) and (abs(tau.imag - p * theta / 2.0 - s) <= tol)
    if not ok:
        return False, None, None
    return True, int(r), int(s)


# ---------------------------------------------------------------------------
# Fibers and clock/shift matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberVector:
    """p-tuple of Gaussian packets indexed by residue classes 0..p-1."""

    components: tuple[GaussPacket, ...]

    @property
    def p(self) -> int:
        return len(self.components)


def fiber_vector(components: Sequence[GaussPacket]) -> FiberVector:
    comps = tuple(components)
    if not comps:
        raise InvalidArgument("a fiber vector needs at least one component")
    for c in comps:
        if not isinstance(c, GaussPacket):
            raise InvalidArgument(f"fiber components must be packets, got {type(c)!r}")
    return FiberVector(comps)


@dataclass(frozen=True)
class ClockShift:
    """Clock C = diag(e^{2 pi i k/p}) and cyclic shift S (S e_j = e_{j+1 mod p})."""

    p: int
    C: np.ndarray
    S: np.ndarray


def clock_shift(p: int) -> ClockShift:
    if int(p) != p or p < 1:
        raise InvalidArgument(f"p must be a positive integer, got {p!r}")
    p = int(p)
    C = np.diag(np.exp(2j * math.pi * np.arange(p) / p))
    S = np.zeros((p, p), dtype=complex)
    for j in range(p):
        S[(j + 1) % p, j] = 1.0
    return ClockShift(p, C, S)


def _weyl_each(fv: FiberVector, a: float, b: float, coeff: complex = 1.0) -> tuple:
    w = weyl_sum([WeylTerm(coeff, a, b)])
    return tuple(apply_weylsum(w, c) for c in fv.components)


def _assemble(components, shift: int, phases) -> FiberVector:
    """Component i of the result is phases[i] * components[(i - shift) mod p]."""
    p = len(components)
    return FiberVector(tuple(packet_scale(components[(i - shift) % p], phases[i])
                             for i in range(p)))


# ---------------------------------------------------------------------------
# Right-module actions
# ---------------------------------------------------------------------------

def heis_act(gen: str, psi: FiberVector, p: int, s: int, theta: float) -> FiberVector:
    """Heisenberg-module action of a generator U or V on a (p, s) fiber vector."""
    if p != psi.p:
        raise InvalidArgument(f"fiber has p={psi.p}, action built for p={p}")
    if gen == "U":
        comps = _weyl_each(psi, s / p + theta, 0.0)
        # (S*)^s shifts component index i -> i + s
        return _assemble(comps, -s, [1.0] * p)
    if gen == "V":
        comps = _weyl_each(psi, 0.0, 1.0)
        return _assemble(comps, 0, [cmath.exp(_TWO_PI_I * i / p) for i in range(p)])
    raise InvalidArgument(f"unknown generator {gen!r}")


def heis_act_power(psi: FiberVector, m: int, n: int, p: int, s: int,
                   theta: float) -> FiberVector:
    """psi <| (U^m V^n) for any integers m, n.

    Composing the unitary generator actions gives
    e^{pi i n m a} { W(m a, n) (x) C^n (S*)^{s m} } with a = s/p + theta.
    """
    if p != psi.p:
        raise InvalidArgument(f"fiber has p={psi.p}, action built for p={p}")
    a = s / p + theta
    pref = cmath.exp(1j * math.pi * n * m * a)
    comps = _weyl_each(psi, m * a, float(n), pref)
    phases = [cmath.exp(_TWO_PI_I * n * i / p) for i in range(p)]
    return _assemble(comps, -s * m, phases)


def classical_act(gen: str, psi: FiberVector, params) -> FiberVector:
    """Action of the unitaries generating the smooth functions on the curve."""
    wx, wy, p = params.omega_x, params.omega_y, psi.p
    if gen == "u":
        comps = _weyl_each(psi, wy / p, -wx / wy)
        return _assemble(comps, 1, [1.0] * p)
    if gen == "v":
        comps = _weyl_each(psi, 0.0, 1.0 / wy)
        return _assemble(comps, 0, [cmath.exp(-_TWO_PI_I * i / p) for i in range(p)])
    raise InvalidArgument(f"unknown generator {gen!r}")


def classical_act_power(psi: FiberVector, m: int, n: int, params) -> FiberVector:
    """psi <| (u^m v^n): e^{pi i n m / p} { W(m wy/p, (n - m wx)/wy) (x) (C*)^n S^m }."""
    wx, wy, p = params.omega_x, params.omega_y, psi.p
    pref = cmath.exp(1j * math.pi * n * m / p)
    comps = _weyl_each(psi, m * wy / p, (n - m * wx) / wy, pref)
    phases = [cmath.exp(-_TWO_PI_I * n * i / p) for i in range(p)]
    return _assemble(comps, m, phases)


def deformed_act(gen: str, psi: FiberVector, params) -> FiberVector:
    """Deformed right action; requires the tau-theta integrality constraint."""
    if not params.constraint_satisfied:
        raise InvalidArgument("tau - (p theta / 2) i must lie in Z + iZ")
    r, s, theta, p = params.r, params.s, params.theta, psi.p
    if gen == "U":
        pref = cmath.exp(1j * math.pi * r / p)
        comps = _weyl_each(psi, s / p + theta, 0.0, pref)
        phases = [cmath.exp(-_TWO_PI_I * r * i / p) for i in range(p)]
        return _assemble(comps, 1, phases)
    if gen == "V":
        comps = _weyl_each(psi, 0.0, 1.0)
        phases = [cmath.exp(-_TWO_PI_I * s * i / p) for i in range(p)]
        return _assemble(comps, 0, phases)
    raise InvalidArgument(f"unknown generator {gen!r}")


def deformed_act_power(psi: FiberVector, m: int, n: int, params) -> FiberVector:
    """psi <| (V^n U^m) for the deformed action, in the r = 0 gauge.

    The composed operator is e^{-pi i m n a} { W(m a, n) (x) S^m (C*)^{s n} }
    with a = s/p + theta; component i carries e^{-2 pi i (i - m) s n / p}.
    """
    if not params.constraint_satisfied:
        raise InvalidArgument("tau - (p theta / 2) i must lie in Z + iZ")
    if params.r != 0:
        raise InvalidArgument("power form of the deformed action requires r = 0")
    s, theta, p = params.s, params.theta, psi.p
    a = s / p + theta
    pref = cmath.exp(-1j * math.pi * m * n * a)
    comps = _weyl_each(psi, m * a, float(n), pref)
    phases = [cmath.exp(-_TWO_PI_I * ((i - m) % p) * s * n / p) for i in range(p)]
    return _assemble(comps, m, phases)


def iso_T(w: FiberVector, s: int) -> FiberVector:
    """Component permutation (T w)_n = w_{-s n mod p}.

    Bijective exactly when gcd(s, p) = 1; it carries the (p, s) Heisenberg
    action into the r = 0 deformed action: T(psi <| a) = (T psi) <|' a.
    """
    p = w.p
    if math.gcd(int(s) % p if p > 1 else 1, p) != 1:
        raise InvalidArgument(f"s = {s} is not invertible mod p = {p}")
    return FiberVector(tuple(w.components[(-s * n) % p] for n in range(p)))


# ---------------------------------------------------------------------------
# Hermitian structures
# ---------------------------------------------------------------------------

class FiberPairing:
    """Pointwise pairing (psi|phi)_t = sum_r conj(psi_r(t)) phi_r(t)."""

    def __init__(self, psi: FiberVector, phi: FiberVector):
        if psi.p != phi.p:
            raise InvalidArgument(f"fiber sizes differ: {psi.p} vs {phi.p}")
        self._psi = psi
        self._phi = phi

    def __call__(self, t):
        total = 0.0 + 0.0j
        for a, b in zip(self._psi.components, self._phi.components):
            total = total + np.conj(packet_eval(a, t)) * packet_eval(b, t)
        return total

    def integral(self) -> complex:
        return sum((packet_inner(a, b) for a, b in
                    zip(self._psi.components, self._phi.components)),
                   start=0.0 + 0.0j)


def herm_fiber(psi: FiberVector, phi: FiberVector) -> FiberPairing:
    return FiberPairing(psi, phi)


def herm_heis(psi: FiberVector, phi: FiberVector, p: int, s: int, theta: float,
              N: int) -> TorusElement:
    """Algebra-valued pairing  sum_{|m|,|n|<=N} U^m V^n int (psi <| U^m V^n | phi)_t dt."""
    if N < 1:
        raise InvalidArgument(f"truncation N must be >= 1, got {N!r}")
    coeffs: dict[tuple[int, int], complex] = {}
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            acted = heis_act_power(psi, m, n, p, s, theta)
            coeffs[(m, n)] = herm_fiber(acted, phi).integral()
    return torus_element(theta, coeffs, ALGEBRA)


def herm_classical(psi: FiberVector, phi: FiberVector, params, N: int) -> TorusElement:
    """Function-valued pairing (1/wy) sum u^m v^n int (psi | phi <| u^{-m} v^{-n})_t dt.

    The result is the coefficient array of conj(f) g as a function on the
    curve, in the basis of the generating unitaries.
    """
    if N < 1:
        raise InvalidArgument(f"truncation N must be >= 1, got {N!r}")
    wy = params.omega_y
    coeffs: dict[tuple[int, int], complex] = {}
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            acted = classical_act_power(phi, -m, -n, params)
            coeffs[(m, n)] = herm_fiber(psi, acted).integral() / wy
    return torus_element(0.0, coeffs, FUNCTION)


# ---------------------------------------------------------------------------
# Section-level star product and the deformed Hermitian identity
# ---------------------------------------------------------------------------

def _star_fiber_sum(f, g, k: int, t: np.ndarray, m_window: int) -> np.ndarray:
    """F_k(t) = sum_m conj(f_[m])(t + m s/p - k theta/2) g_[m+k](t + (m+k) s/p + k theta/2)."""
    params = f.params
    p, s, theta = params.p, params.s, params.theta
    total = np.zeros(t.shape, dtype=complex)
    for m in range(-m_window, m_window + 1):
        fa = packet_eval(f.fibers.components[m % p], t + m * s / p - k * theta / 2.0)
        ga = packet_eval(g.fibers.components[(m + k) % p], t + (m + k) * s / p + k * theta / 2.0)
        total += np.conj(fa) * ga
    return total


def star_section(f, g, N: int = 8, quad_tol: float = 1e-11,
                 max_nodes: int = 2048) -> TorusElement:
    """Coefficients of conj(f) * g (deformed product of two quasi-periodic sections).

    Both sections must share parameters with r = 0 and s = 1 (otherwise the
    product is not a function on the torus).  Coefficients over u^k v^n,
    |k|,|n| <= N, are extracted by doubling periodic-trapezoid quadrature in
    the y direction.
    """
    params = f.params
    if g.params != params:
        raise InvalidArgument("sections must share identical parameters")
    if not params.constraint_satisfied:
        raise InvalidArgument("tau - (p theta / 2) i must lie in Z + iZ")
    if params.s != 1:
        raise InvalidArgument(f"the section product needs s = 1, got s = {params.s}")
    if params.r != 0:
        raise InvalidArgument(f"the section product needs r = 0, got r = {params.r}")
    m_window = params.p * (max(f.series_N, g.series_N) + 4)
    ks = range(-N, N + 1)
    ns = np.arange(-N, N + 1)

    def fourier_rows(nodes: int) -> dict[int, np.ndarray]:
        t = np.arange(nodes) / nodes
        kernel = np.exp(-_TWO_PI_I * np.outer(ns, t))  # (2N+1, nodes)
        rows = {}
        for k in ks:
            fk = _star_fiber_sum(f, g, k, t, m_window)
            rows[k] = kernel @ fk / nodes
        return rows

    nodes = 64
    prev = fourier_rows(nodes)
    while True:
        nodes *= 2
        cur = fourier_rows(nodes)
        err = max(float(np.max(np.abs(cur[k] - prev[k]))) for k in ks)
        if err <= quad_tol:
            break
        if nodes >= max_nodes:
            if err > 1e-8:
                raise AccuracyError(f"fourier extraction stalled at {err:.3e}")
            break
        prev = cur
    coeffs = {(k, int(n)): complex(cur[k][i]) for k in ks for i, n in enumerate(ns)}
    return torus_element(params.theta, coeffs, FUNCTION)


def herm_deformed_pair(f, g, N: int = 8) -> tuple[TorusElement, TorusElement]:
    """Both sides of the deformed Hermitian identity, truncated at N.

    Left: quantization of the section star product conj(f) * g.  Right: the
    sum over V^n U^m of fiber pairings under the deformed action, rewritten in
    normal order (V^n U^m = e^{-2 pi i theta n m} U^m V^n).
    """
    params = f.params
    lhs = quantize_T(star_section(f, g, N=N))
    theta = params.theta
    rhs: dict[tuple[int, int], complex] = {}
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            acted = deformed_act_power(f.fibers, m, n, params)
            val = herm_fiber(acted, g.fibers).integral()
            rhs[(m, n)] = cmath.exp(-2j * math.pi * theta * n * m) * val
    return lhs, torus_element(theta, rhs, ALGEBRA)


def herm_deformed_identity_residual(f, g, N: int = 8) -> float:
    """Max coefficient gap between the two sides of the deformed Hermitian identity."""
    lhs, rhs = herm_deformed_pair(f, g, N=N)
    keys = set(lhs.coeffs) | set(rhs.coeffs)
    return max((abs(lhs.coeffs.get(k, 0.0) - rhs.coeffs.get(k, 0.0)) for k in keys),
               default=0.0)


# ---------------------------------------------------------------------------
# Function-side bimodule action and the commutant map
# ---------------------------------------------------------------------------

def bimod_act(side: str, gen: str, f_eval: Callable, theta: float) -> Callable:
    """Left/right generator action on a function of z = x + i y.

    Right: (f <| U)(x,y) = e^{2 pi i x} f(x, y - theta/2),
           (f <| V)(x,y) = e^{2 pi i y} f(x + theta/2, y);
    left actions shift the other way.
    """
    half = theta / 2.0
    if side == "right" and gen == "U":
        return lambda z: np.exp(_TWO_PI_I * np.real(z)) * f_eval(z - 1j * half)
    if side == "right" and gen == "V":
        return lambda z: np.exp(_TWO_PI_I * np.imag(z)) * f_eval(z + half)
    if side == "left" and gen == "U":
        return lambda z: np.exp(_TWO_PI_I * np.real(z)) * f_eval(z + 1j * half)
    if side == "left" and gen == "V":
        return lambda z: np.exp(_TWO_PI_I * np.imag(z)) * f_eval(z - half)
    raise InvalidArgument(f"unknown action {side!r} / {gen!r}")


def jmap(f_eval: Callable) -> Callable:
    """Antilinear involution (J f)(x, y) = conj(f(-x, -y)).

    Conjugation by J swaps the left and right generator actions.
    """
    return lambda z: np.conj(f_eval(-z))


def constraint_defect_witness(tau: complex, theta: float, p: int, grid: int = 12,
                              series_N: int = 16) -> float:
    """Quasi-periodicity defect of (f <| U) and (f <| V) for a concrete section.

    The witness section has one unit Gaussian per residue class (distinct small
    modulations keep it generic).  When the integrality constraint holds both
    acted functions satisfy the section relations to truncation accuracy;
    otherwise the defect is bounded below by the analytic phase gap times the
    section magnitude.
    """
    from . import sections as _sections

    params = _sections.ModuliParams(theta=theta, tau=tau, p=p)
    fibers = fiber_vector([
        _unit_witness_packet(cls, p) for cls in range(p)
    ])
    sec = _sections.QuasiSection(params=params, fibers=fibers, series_N=series_N)
    f_eval = _sections.wbz_evaluator(sec)
    defect = 0.0
    for gen in ("U", "V"):
        acted = bimod_act("right", gen, f_eval, theta)
        defect = max(defect, _sections.quasiperiodicity_defect(acted, params, grid))
    return defect


def _unit_witness_packet(cls: int, p: int) -> GaussPacket:
    from .weyl_core import unit_gaussian

    return unit_gaussian(center=0.0, width=1.0, freq=0.1 * cls / max(p, 1))
