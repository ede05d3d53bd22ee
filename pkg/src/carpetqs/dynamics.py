"""Rational map evaluation, critical points, and escape-time iteration.

The workhorse family is f(z) = z^d + lambda / z^d; a general rational map
given by coefficient lists is supported for evaluation and iteration only.
Integer powers are expanded as repeated multiplication so that scalar and
vectorized code paths produce bit-identical doubles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleHit, UnsupportedMap

POLE_TOL = 1e-12


@dataclass(frozen=True)
class MapSpec:
    """A rational map under study.

    family is 'mcmullen' (z^d + lam/z^d, d >= 2, lam != 0) or 'rational'
    (numerator/denominator coefficient lists, highest degree first).
    """

    family: str
    d: int = 0
    lam: complex = 0j
    numer: tuple = ()
    denom: tuple = ()
    pole_tol: float = POLE_TOL
    _poles: tuple = field(default=(), repr=False)

    @staticmethod
    def mcmullen(d: int, lam: complex) -> "MapSpec":
        if d < 2:
            raise ValueError(f"McMullen degree must be >= 2, got {d}")
        if lam == 0:
            raise ValueError("McMullen parameter lambda must be nonzero")
        return MapSpec(family="mcmullen", d=d, lam=complex(lam), _poles=(0j,))

    @staticmethod
    def rational(numer, denom, common_root_tol: float = 1e-9) -> "MapSpec":
        numer = tuple(complex(c) for c in numer)
        denom = tuple(complex(c) for c in denom)
        if not numer or not denom:
            raise ValueError("coefficient lists must be nonempty")
        if numer[0] == 0 or denom[0] == 0:
            raise ValueError("leading coefficients must be nonzero")
        poles = tuple(np.roots(denom)) if len(denom) > 1 else ()
        if len(numer) > 1 and poles:
            zeros = np.roots(numer)
            sep = min(abs(z - p) for z in zeros for p in poles)
            if sep < common_root_tol:
                raise ValueError(
                    f"numerator and denominator share a root to within {common_root_tol}"
                )
        return MapSpec(family="rational", numer=numer, denom=denom, _poles=poles)

    @property
    def poles(self) -> tuple:
        return self._poles

    def near_pole(self, z: complex) -> bool:
        return any(abs(z - p) <= self.pole_tol for p in self._poles)

    def default_escape_radius(self) -> float:
        """Radius outside which any orbit grows by at least 3/2 per step
        (McMullen only): max(2, 2|lam|^(1/d), 2^(1/(d-1)))."""
        if self.family != "mcmullen":
            raise UnsupportedMap("default escape radius is defined for McMullen maps")
        return max(2.0, 2.0 * abs(self.lam) ** (1.0 / self.d), 2.0 ** (1.0 / (self.d - 1)))


def _int_pow(z: complex, d: int) -> complex:
    """z**d by left-to-right repeated multiplication (matches array kernels)."""
    w = z
    for _ in range(d - 1):
        w = w * z
    return w


def evaluate(spec: MapSpec, z: complex) -> complex:
    """Evaluate the map at z in double precision.

    Raises PoleHit when z is within pole tolerance of a pole.
    """
    z = complex(z)
    if spec.near_pole(z):
        raise PoleHit(z)
    if spec.family == "mcmullen":
        zd = _int_pow(z, spec.d)
        return zd + spec.lam / zd
    num = 0j
    for c in spec.numer:
        num = num * z + c
    den = 0j
    for c in spec.denom:
        den = den * z + c
    return num / den


def critical_points(spec: MapSpec) -> list[complex]:
    """Free critical points of a McMullen map: the 2d solutions of c^(2d) = lam.

    The additional critical points 0 and infinity are not included.
    """
    if spec.family != "mcmullen":
        raise UnsupportedMap("critical points are only computed for McMullen maps")
    n = 2 * spec.d
    rho = abs(spec.lam) ** (1.0 / n)
    base = cmath.phase(spec.lam) / n
    return [rho * cmath.exp(1j * (base + 2.0 * math.pi * k / n)) for k in range(n)]


@dataclass(frozen=True)
class OrbitOutcome:
    """Result of a budgeted orbit: 'escaped' at index n (first |z_n| beyond
    the radius), 'bounded' after max_iter steps, or 'hit_pole' at index n."""

    tag: str
    n: int | None = None

    @property
    def escaped(self) -> bool:
        return self.tag == "escaped"

    @property
    def bounded(self) -> bool:
        return self.tag == "bounded"

    @property
    def hit_pole(self) -> bool:
        return self.tag == "hit_pole"

    def fold_pole(self) -> "OrbitOutcome":
        """Pole maps straight to infinity: HitPole(k) becomes Escaped(k+1)."""
        if self.hit_pole:
            return OrbitOutcome("escaped", self.n + 1)
        return self


def escape_time(spec: MapSpec, z0: complex, max_iter: int, escape_radius: float) -> OrbitOutcome:
    """Iterate from z0 checking indices 0..max_iter against the escape radius.

    Returns Escaped(n) at the first |z_n| > escape_radius, HitPole(n) if
    iterate n falls within pole tolerance of a pole, else Bounded.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    z = complex(z0)
    for n in range(max_iter + 1):
        if abs(z) > escape_radius:
            return OrbitOutcome("escaped", n)
        if spec.near_pole(z):
            return OrbitOutcome("hit_pole", n)
        if n == max_iter:
            break
        if spec.family == "mcmullen":
            zd = _int_pow(z, spec.d)
            z = zd + spec.lam / zd
        else:
            z = evaluate(spec, z)
    return OrbitOutcome("bounded")


def free_critical_escape(spec: MapSpec, max_iter: int, escape_radius: float | None = None) -> bool:
    """Whether the free critical orbit of a McMullen map escapes within budget.

    The 2d free critical orbits escape together by the family's rotational
    symmetry, so a single representative is iterated.
    """
    if spec.family != "mcmullen":
        raise UnsupportedMap("free critical orbits are defined for McMullen maps")
    if escape_radius is None:
        escape_radius = spec.default_escape_radius()
    c = critical_points(spec)[0]
    return escape_time(spec, c, max_iter, escape_radius).fold_pole().escaped
