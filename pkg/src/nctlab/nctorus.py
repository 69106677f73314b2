"""Truncated Fourier model of the deformed 2-torus algebra and of smooth functions on T^2.

An element is a finitely supported coefficient array a_{m,n} together with a
deformation parameter theta in [0,1).  The same array can be read two ways:

  * as an algebra element  sum a_{m,n} U^m V^n  of the smooth deformed torus
    algebra, with U V = exp(2 pi i theta) V U and normal order fixed as U^m V^n
    (so V^k U^m = exp(-2 pi i theta k m) U^m V^k), or
  * as a trigonometric polynomial  sum a_{m,n} u^m v^n  on the ordinary torus,
    multiplied either pointwise or with the cocycle-twisted star product
    sigma((j,k),(m,n)) = exp(i pi theta (j n - k m)).

The interpretation flag is metadata; which product applies is decided by the
operation invoked, never by the flag.  The quantization map

    T_theta: sum a_{m,n} u^m v^n  |->  sum a_{m,n} exp(-pi i m n theta) U^m V^n

intertwines the star product with the operator product and the pointwise
conjugate with the operator adjoint.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import CapacityError, InvalidArgument
from .weyl_core import WeylSum, WeylTerm, weyl_sum, weylsum_distance, weylsum_mul

#: Default support radius used when generating elements.
DEFAULT_SUPPORT = 16
#: Operations refuse to produce support beyond this radius.
SUPPORT_HARD_CAP = 64

ALGEBRA = "algebra"
FUNCTION = "function"


@dataclass(frozen=True)
class TorusElement:
    """Finitely supported coefficient array with deformation parameter theta."""

    theta: float
    coeffs: dict = field(default_factory=dict)
    interpretation: str = ALGEBRA


def torus_element(theta: float, coeffs: Mapping[tuple[int, int], complex],
                  interpretation: str = ALGEBRA,
                  support_cap: int = SUPPORT_HARD_CAP) -> TorusElement:
    """Validate and build a TorusElement; exact zeros are dropped."""
    if not (0.0 <= theta < 1.0):
        raise InvalidArgument(f"theta must lie in [0,1), got {theta!r}")
    if interpretation not in (ALGEBRA, FUNCTION):
        raise InvalidArgument(f"unknown interpretation {interpretation!r}")
    clean: dict[tuple[int, int], complex] = {}
    for (m, n), c in coeffs.items():
        m, n = int(m), int(n)
        c = complex(c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidArgument(f"coefficient at {(m, n)} is not finite")
        if max(abs(m), abs(n)) > support_cap:
            raise CapacityError(f"support index {(m, n)} exceeds cap {support_cap}")
        if c != 0:
            clean[(m, n)] = c
    return TorusElement(float(theta), clean, interpretation)


def torus_delta(theta: float, m: int, n: int, coeff: complex = 1.0,
                interpretation: str = ALGEBRA) -> TorusElement:
    return torus_element(theta, {(m, n): coeff}, interpretation)


def torus_identity(theta: float, interpretation: str = ALGEBRA) -> TorusElement:
    return torus_delta(theta, 0, 0, 1.0, interpretation)


def _check_theta(x: TorusElement, y: TorusElement) -> None:
    if x.theta != y.theta:
        raise InvalidArgument(f"theta mismatch: {x.theta!r} vs {y.theta!r}")


def torus_distance(x: TorusElement, y: TorusElement) -> float:
    """Max coefficient gap over the union of supports."""
    keys = set(x.coeffs) | set(y.coeffs)
    return max((abs(x.coeffs.get(k, 0.0) - y.coeffs.get(k, 0.0)) for k in keys), default=0.0)


def torus_mul(x: TorusElement, y: TorusElement,
              support_cap: int = SUPPORT_HARD_CAP) -> TorusElement:
    """Product in normal order, using V^k U^m = e^{-2 pi i theta k m} U^m V^k."""
    _check_theta(x, y)
    theta = x.theta
    out: dict[tuple[int, int], complex] = {}
    for (m, n), a in x.coeffs.items():
        for (j, k), b in y.coeffs.items():
            phase = cmath.exp(-2j * math.pi * theta * n * j)
            key = (m + j, n + k)
            if max(abs(key[0]), abs(key[1])) > support_cap:
                raise CapacityError(f"product support {key} exceeds cap {support_cap}")
            out[key] = out.get(key, 0.0) + a * b * phase
    return torus_element(theta, out, x.interpretation)


def torus_adjoint(x: TorusElement) -> TorusElement:
    """Algebra adjoint: (a_{m,n} U^m V^n)* = conj(a) e^{-2 pi i theta m n} U^{-m} V^{-n}."""
    out = {(-m, -n): complex(c).conjugate() * cmath.exp(-2j * math.pi * x.theta * m * n)
           for (m, n), c in x.coeffs.items()}
    return torus_element(x.theta, out, x.interpretation)


def torus_conj(f: TorusElement) -> TorusElement:
    """Pointwise conjugate of a function on the torus (undeformed involution)."""
    out = {(-m, -n): complex(c).conjugate() for (m, n), c in f.coeffs.items()}
    return torus_element(f.theta, out, f.interpretation)


def torus_scale(x: TorusElement, c: complex) -> TorusElement:
    return torus_element(x.theta, {k: c * v for k, v in x.coeffs.items()}, x.interpretation)


def torus_add(x: TorusElement, y: TorusElement) -> TorusElement:
    _check_theta(x, y)
    out = dict(x.coeffs)
    for k, v in y.coeffs.items():
        out[k] = out.get(k, 0.0) + v
    return torus_element(x.theta, out, x.interpretation)


def seminorm_pk(x: TorusElement, k: int) -> float:
    """sup over the support of (1 + m^2 + n^2)^{k/2} |a_{m,n}| (square-root scale)."""
    if int(k) != k or k < 0:
        raise InvalidArgument(f"k must be a nonnegative integer, got {k!r}")
    return max(((1 + m * m + n * n) ** (k / 2.0) * abs(c)
                for (m, n), c in x.coeffs.items()), default=0.0)


def star_trig(f: TorusElement, g: TorusElement,
              support_cap: int = SUPPORT_HARD_CAP) -> TorusElement:
    """Cocycle-twisted convolution (u^j v^k) * (u^m v^n) = sigma * u^{j+m} v^{k+n}."""
    _check_theta(f, g)
    theta = f.theta
    out: dict[tuple[int, int], complex] = {}
    for (j, k), a in f.coeffs.items():
        for (m, n), b in g.coeffs.items():
            sigma = cmath.exp(1j * math.pi * theta * (j * n - k * m))
            key = (j + m, k + n)
            if max(abs(key[0]), abs(key[1])) > support_cap:
                raise CapacityError(f"star support {key} exceeds cap {support_cap}")
            out[key] = out.get(key, 0.0) + a * b * sigma
    return torus_element(theta, out, FUNCTION)


def quantize_T(f: TorusElement) -> TorusElement:
    """a_{m,n} -> a_{m,n} e^{-pi i m n theta}; output carries the algebra reading."""
    out = {(m, n): c * cmath.exp(-1j * math.pi * m * n * f.theta)
           for (m, n), c in f.coeffs.items()}
    return torus_element(f.theta, out, ALGEBRA)


def dequantize_T(x: TorusElement) -> TorusElement:
    """Exact inverse of quantize_T; output carries the function reading."""
    out = {(m, n): c * cmath.exp(1j * math.pi * m * n * x.theta)
           for (m, n), c in x.coeffs.items()}
    return torus_element(x.theta, out, FUNCTION)


def rep_pi(x: TorusElement) -> WeylSum:
    """Faithful representation by Weyl operators: U -> W(1,0), V -> W(0,-theta).

    U^m V^n maps to e^{pi i m n theta} W(m, -n theta).
    """
    theta = x.theta
    terms = [WeylTerm(c * cmath.exp(1j * math.pi * m * n * theta), float(m), -n * theta)
             for (m, n), c in x.coeffs.items()]
    return weyl_sum(terms)


def center_defect_rational(p: int, q: int, x_gen: WeylSum) -> float:
    """Commutation defect of the putative central symbols W(q,0), W(0,p) against x_gen.

    For theta = p/q these two symbols generate the center of the represented
    algebra; the returned value is the larger canonical-form distance between
    Z x_gen and x_gen Z over the two candidates Z.
    """
    if int(p) != p or int(q) != q:
        raise InvalidArgument("p and q must be integers")
    if q < 1:
        raise InvalidArgument(f"q must be >= 1, got {q!r}")
    if math.gcd(int(p), int(q)) != 1:
        raise InvalidArgument(f"p/q must be reduced, got {p}/{q}")
    defect = 0.0
    for z in (weyl_sum([WeylTerm(1.0, float(q), 0.0)]),
              weyl_sum([WeylTerm(1.0, 0.0, float(p))])):
        defect = max(defect, weylsum_distance(weylsum_mul(z, x_gen), weylsum_mul(x_gen, z)))
    return defect


def boundary_tail(x: TorusElement, radius: int | None = None) -> float:
    """Max |coefficient| on the boundary shell max(|m|,|n|) == radius.

    With radius None the support radius itself is used; an empty element has
    tail 0.
    """
    if not x.coeffs:
        return 0.0
    if radius is None:
        radius = max(max(abs(m), abs(n)) for (m, n) in x.coeffs)
    return max((abs(c) for (m, n), c in x.coeffs.items()
                if max(abs(m), abs(n)) == radius), default=0.0)


# ---------------------------------------------------------------------------
# Text serialization (used by the CLI for golden files)
# ---------------------------------------------------------------------------

def torus_to_text(x: TorusElement, tail: float | None = None) -> str:
    """Header `theta <decimal>`, lines `m n re im` sorted by (m, n), optional
    `tail <decimal>` trailer."""
    lines = [f"theta {x.theta!r}"]
    for (m, n) in sorted(x.coeffs):
        c = complex(x.coeffs[(m, n)])
        lines.append(f"{m} {n} {c.real!r} {c.imag!r}")
    if tail is not None:
        lines.append(f"tail {tail!r}")
    return "\n".join(lines) + "\n"


def torus_from_text(text: str, interpretation: str = ALGEBRA
                    ) -> tuple[TorusElement, float | None]:
    theta = None
    tail = None
    coeffs: dict[tuple[int, int], complex] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "theta":
            theta = float(parts[1])
        elif parts[0] == "tail":
            tail = float(parts[1])
        else:
            if len(parts) != 4:
                raise InvalidArgument(f"bad coefficient line: {raw!r}")
            m, n, re, im = int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])
            coeffs[(m, n)] = complex(re, im)
    if theta is None:
        raise InvalidArgument("missing `theta` header line")
    return torus_element(theta, coeffs, interpretation), tail
