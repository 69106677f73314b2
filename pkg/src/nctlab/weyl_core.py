"""Weyl operators on L2(R) and the Gaussian wave-packet family they act on.

A Weyl operator combines a translation with a modulation,

    {W(a,b) psi}(t) = exp(-pi i a b) exp(2 pi i b t) psi(t - a),

and two of them compose through a symplectic phase,

    W(a,b) W(c,d) = exp(-pi i (a d - b c)) W(a + c, b + d),

so finite linear combinations of Weyl symbols form a *-algebra that can be
manipulated exactly.  The operators act on wave packets of the form

    amp * t^deg * exp(2 pi i freq t) * exp(-pi (t - center)^2 / width),

a family closed under the Weyl action, d/dt and multiplication by t.  All L2
pairings of packets reduce to Gaussian moment integrals

    I_m = int t^m exp(-alpha t^2 + beta t + gamma) dt,

evaluated by the stable recursion I_m = ((m-1) I_{m-2} + beta I_{m-1}) / (2 alpha)
seeded with the closed forms for I_0, I_1 (exponents are combined before
exponentiation so widely separated packets underflow gracefully instead of
producing inf * 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CapacityError, InvalidArgument

#: Weyl symbols whose coordinates agree within this are merged.
MERGE_TOL = 1e-12
#: Merged coefficients below this magnitude are dropped.
DROP_TOL = 1e-15
#: Default cap on the polynomial degree of a packet term.
DEFAULT_DEGREE_CAP = 32

_TWO_PI = 2.0 * math.pi


def _require_finite(name: str, *values) -> None:
    for v in values:
        c = complex(v)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidArgument(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class WeylTerm:
    """One scalar multiple of a Weyl symbol W(a, b)."""

    coeff: complex
    a: float
    b: float

    def __post_init__(self):
        c = complex(self.coeff)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidArgument(f"coefficient must be finite, got {self.coeff!r}")
        _require_finite("Weyl coordinates", float(self.a), float(self.b))


@dataclass(frozen=True)
class WeylSum:
    """Canonical finite combination of Weyl symbols.

    Terms are sorted by (a, b); no two terms share a symbol key within
    MERGE_TOL, and coefficients below DROP_TOL are absent.
    """

    terms: tuple[WeylTerm, ...]

    def __iter__(self):
        return iter(self.terms)


def weyl_sum(terms: Iterable[WeylTerm]) -> WeylSum:
    """Canonicalize a collection of Weyl terms into a WeylSum."""
    ordered = sorted(terms, key=lambda t: (t.a, t.b))
    merged: list[list] = []
    for t in ordered:
        if merged and abs(t.a - merged[-1][1]) <= MERGE_TOL and abs(t.b - merged[-1][2]) <= MERGE_TOL:
            merged[-1][0] += complex(t.coeff)
        else:
            merged.append([complex(t.coeff), float(t.a), float(t.b)])
    kept = tuple(WeylTerm(c, a, b) for c, a, b in merged if abs(c) > DROP_TOL)
    return WeylSum(kept)


def weyl_identity() -> WeylSum:
    return weyl_sum([WeylTerm(1.0, 0.0, 0.0)])


def mul_weyl(a: float, b: float, c: float, d: float) -> tuple[complex, float, float]:
    """Composition law W(a,b) W(c,d) = phase * W(a', b').

    Returns (phase, a', b') with phase = exp(-pi i (a d - b c)), which has
    unit modulus by construction.
    """
    _require_finite("mul_weyl arguments", a, b, c, d)
    phase = cmath.exp(-1j * math.pi * (a * d - b * c))
    return phase, a + c, b + d


def weylsum_scale(x: WeylSum, c: complex) -> WeylSum:
    return weyl_sum(WeylTerm(c * t.coeff, t.a, t.b) for t in x.terms)


def weylsum_add(x: WeylSum, y: WeylSum) -> WeylSum:
    return weyl_sum(list(x.terms) + list(y.terms))


def weylsum_mul(x: WeylSum, y: WeylSum) -> WeylSum:
    """Bilinear extension of the Weyl composition law."""
    out = []
    for s in x.terms:
        for t in y.terms:
            phase, a, b = mul_weyl(s.a, s.b, t.a, t.b)
            out.append(WeylTerm(s.coeff * t.coeff * phase, a, b))
    return weyl_sum(out)


def weylsum_adjoint(x: WeylSum) -> WeylSum:
    """Adjoint; W(a,b)* = W(-a,-b) since W(a,b) W(-a,-b) = 1 with no phase."""
    return weyl_sum(WeylTerm(complex(t.coeff).conjugate(), -t.a, -t.b) for t in x.terms)


def weylsum_distance(x: WeylSum, y: WeylSum) -> float:
    """Canonical-form distance: max coefficient gap after merging x with -y."""
    diff = weylsum_add(x, weylsum_scale(y, -1.0))
    return max((abs(t.coeff) for t in diff.terms), default=0.0)


# ---------------------------------------------------------------------------
# Gaussian wave packets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussPacketTerm:
    """amp * t^deg * exp(2 pi i freq t) * exp(-pi (t - center)^2 / width)."""

    amp: complex
    deg: int
    freq: float
    center: float
    width: float

    def __post_init__(self):
        c = complex(self.amp)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidArgument(f"amplitude must be finite, got {self.amp!r}")
        if int(self.deg) != self.deg or self.deg < 0:
            raise InvalidArgument(f"degree must be a nonnegative integer, got {self.deg!r}")
        _require_finite("packet parameters", float(self.freq), float(self.center), float(self.width))
        if not self.width > 0:
            raise InvalidArgument(f"width must be positive, got {self.width!r}")


@dataclass(frozen=True)
class GaussPacket:
    """Finite sum of Gaussian packet terms."""

    terms: tuple[GaussPacketTerm, ...]

    @property
    def max_degree(self) -> int:
        return max((t.deg for t in self.terms), default=0)


def gauss_packet(terms: Iterable[GaussPacketTerm]) -> GaussPacket:
    return GaussPacket(tuple(t for t in terms if t.amp != 0))


def unit_gaussian(center: float = 0.0, width: float = 1.0, freq: float = 0.0,
                  amp: complex = 1.0, deg: int = 0) -> GaussPacket:
    return gauss_packet([GaussPacketTerm(amp, deg, freq, center, width)])


def zero_packet() -> GaussPacket:
    return GaussPacket(())


def packet_eval(psi: GaussPacket, t):
    """Evaluate a packet at a real point or numpy array of points."""
    arr = np.asarray(t, dtype=float)
    total = np.zeros(arr.shape, dtype=complex)
    for term in psi.terms:
        total = total + term.amp * arr ** term.deg * np.exp(
            2j * math.pi * term.freq * arr - math.pi * (arr - term.center) ** 2 / term.width
        )
    if arr.ndim == 0:
        return complex(total)
    return total


def packet_scale(psi: GaussPacket, c: complex) -> GaussPacket:
    return gauss_packet(GaussPacketTerm(c * t.amp, t.deg, t.freq, t.center, t.width)
                        for t in psi.terms)


def packet_add(*packets: GaussPacket) -> GaussPacket:
    terms: list[GaussPacketTerm] = []
    for p in packets:
        terms.extend(p.terms)
    return gauss_packet(terms)


def apply_weylsum(x: WeylSum, psi: GaussPacket) -> GaussPacket:
    """Apply a combination of Weyl operators to a packet.

    For a single symbol, {W(a,b) psi}(t) = e^{-pi i a b} e^{2 pi i b t} psi(t-a);
    the shifted monomial (t-a)^deg is re-expanded binomially so the result stays
    inside the packet family with the same maximal degree.
    """
    out: list[GaussPacketTerm] = []
    for w in x.terms:
        pref = w.coeff * cmath.exp(-1j * math.pi * w.a * w.b)
        for term in psi.terms:
            base = pref * term.amp * cmath.exp(-2j * math.pi * term.freq * w.a)
            for k in range(term.deg + 1):
                coeff = base * math.comb(term.deg, k) * (-w.a) ** (term.deg - k)
                out.append(GaussPacketTerm(coeff, k, term.freq + w.b,
                                           term.center + w.a, term.width))
    return gauss_packet(out)


def gauss_moment_integrals(max_m: int, alpha: complex, beta: complex,
                           gamma: complex = 0.0) -> list[complex]:
    """Integrals I_m = int t^m exp(-alpha t^2 + beta t + gamma) dt, m = 0..max_m.

    Requires Re(alpha) > 0.  The recursion
        I_m = ((m-1) I_{m-2} + beta I_{m-1}) / (2 alpha)
    is seeded with I_0 = sqrt(pi/alpha) exp(gamma + beta^2/(4 alpha)) and
    I_1 = beta/(2 alpha) I_0; gamma is folded into the seed exponent.
    """
    alpha = complex(alpha)
    if not alpha.real > 0:
        raise InvalidArgument(f"Re(alpha) must be positive, got {alpha!r}")
    i0 = cmath.sqrt(math.pi / alpha) * cmath.exp(gamma + beta * beta / (4 * alpha))
    vals = [i0]
    if max_m >= 1:
        vals.append(beta / (2 * alpha) * i0)
    for m in range(2, max_m + 1):
        vals.append(((m - 1) * vals[m - 2] + beta * vals[m - 1]) / (2 * alpha))
    return vals


def packet_inner(psi: GaussPacket, phi: GaussPacket) -> complex:
    """L2 inner product int conj(psi(t)) phi(t) dt, conjugate-linear on the left.

    Each term pair contributes a closed-form Gaussian moment integral.
    """
    total = 0.0 + 0.0j
    for s in psi.terms:
        for t in phi.terms:
            alpha = math.pi * (1.0 / s.width + 1.0 / t.width)
            beta = (2 * math.pi * (s.center / s.width + t.center / t.width)
                    + 2j * math.pi * (t.freq - s.freq))
            gamma = -math.pi * (s.center ** 2 / s.width + t.center ** 2 / t.width)
            m = s.deg + t.deg
            moments = gauss_moment_integrals(m, alpha, beta, gamma)
            total += complex(s.amp).conjugate() * t.amp * moments[m]
    return total


def packet_norm(psi: GaussPacket) -> float:
    return math.sqrt(max(packet_inner(psi, psi).real, 0.0))


def packet_derivative(psi: GaussPacket, degree_cap: int = DEFAULT_DEGREE_CAP) -> GaussPacket:
    """Term-wise analytic d/dt; raises CapacityError past the degree cap."""
    out: list[GaussPacketTerm] = []
    for t in psi.terms:
        if t.deg + 1 > degree_cap:
            raise CapacityError(f"derivative would exceed degree cap {degree_cap}")
        if t.deg >= 1:
            out.append(GaussPacketTerm(t.amp * t.deg, t.deg - 1, t.freq, t.center, t.width))
        out.append(GaussPacketTerm(
            t.amp * (2j * math.pi * t.freq + _TWO_PI * t.center / t.width),
            t.deg, t.freq, t.center, t.width))
        out.append(GaussPacketTerm(-t.amp * _TWO_PI / t.width,
                                   t.deg + 1, t.freq, t.center, t.width))
    return gauss_packet(out)


def packet_mul_t(psi: GaussPacket, degree_cap: int = DEFAULT_DEGREE_CAP) -> GaussPacket:
    """Multiplication by t; raises CapacityError past the degree cap."""
    out: list[GaussPacketTerm] = []
    for t in psi.terms:
        if t.deg + 1 > degree_cap:
            raise CapacityError(f"mul_t would exceed degree cap {degree_cap}")
        out.append(GaussPacketTerm(t.amp, t.deg + 1, t.freq, t.center, t.width))
    return gauss_packet(out)
