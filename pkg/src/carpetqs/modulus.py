"""Conformal-modulus special functions and explicit distortion bounds.

Implements the complete elliptic integral K via the arithmetic-geometric
mean, the Grotzsch ring modulus function mu and its inverse, and the
closed-form bounds built from them: the separation lower bound C(m), the
Teichmuller ring upper bound, Koebe growth/derivative bounds, and the
conformal distortion constant ((1+r)/(1-r))^8.
"""

from __future__ import annotations

import math

from .errors import DomainError

_AGM_TOL = 4e-16
_MU_BISECT_TOL = 1e-13


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention.

    K(k) = integral_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), 0 <= k < 1,
    computed by the AGM iteration: K(k) = pi / (2 * agm(1, sqrt(1-k^2))).
    """
    if not 0.0 <= k < 1.0:
        raise DomainError(f"elliptic_K requires 0 <= k < 1, got {k}")
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(60):  # quadratic convergence; 60 is far more than enough
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def grotzsch_mu(r: float) -> float:
    """Modulus of the unit disk slit along [0, r]: mu(r) = (pi/2) K(k') / K(r).

    Strictly decreasing on (0, 1), with mu(r) ~ log(4/r) as r -> 0.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"grotzsch_mu requires 0 < r < 1, got {r}")
    if r < 3e-6:
        # mu(r) = log(4/r) + O(r^2); below 3e-6 the error is under 1e-11 and
        # the complementary modulus sqrt(1-r^2) is too close to 1 for the AGM
        return math.log(4.0 / r)
    k_comp = math.sqrt((1.0 - r) * (1.0 + r))
    return (math.pi / 2.0) * elliptic_K(k_comp) / elliptic_K(r)


def mu_inverse(m: float) -> float:
    """The unique r in (0, 1) with grotzsch_mu(r) = m, by bisection."""
    if m <= 0.0:
        raise DomainError(f"mu_inverse requires m > 0, got {m}")
    lo, hi = 1e-15, 1.0 - 1e-15
    # mu is decreasing: mu(lo) is huge, mu(hi) is tiny.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if grotzsch_mu(mid) > m:
            lo = mid
        else:
            hi = mid
        if hi - lo < _MU_BISECT_TOL:
            break
    return 0.5 * (lo + hi)


def separation_lower_bound(m: float) -> float:
    """Lower bound on the relative distance of the two boundary curves of
    any ring domain of modulus >= m: C(m) = (1/mu^{-1}(m/2)^2 - 1) / 2."""
    if m <= 0.0:
        raise DomainError(f"separation_lower_bound requires m > 0, got {m}")
    r = mu_inverse(0.5 * m)
    return 0.5 * (1.0 / (r * r) - 1.0)


def teichmuller_upper_bound(R: float) -> float:
    """Upper bound 2*mu(sqrt(1/(1+R))) on the modulus of any ring domain
    separating {0, -1} from {w, infinity} with |w| = R."""
    if R <= 0.0:
        raise DomainError(f"teichmuller_upper_bound requires R > 0, got {R}")
    return 2.0 * grotzsch_mu(math.sqrt(1.0 / (1.0 + R)))


def koebe_growth_bounds(z_abs: float, deriv_at_0: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Growth and derivative bounds for univalent maps of the unit disk.

    Returns ((growth_lo, growth_hi), (deriv_lo, deriv_hi)) where for a
    univalent f on the disk with |f'(0)| = deriv_at_0 and t = |z|:

        growth: d*t/(1+t)^2 <= |f(z)-f(0)| <= d*t/(1-t)^2
        deriv:  d*(1-t)/(1+t)^3 <= |f'(z)| <= d*(1+t)/(1-t)^3
    """
    t = z_abs
    if not 0.0 <= t < 1.0:
        raise DomainError(f"koebe_growth_bounds requires 0 <= |z| < 1, got {t}")
    if deriv_at_0 <= 0.0:
        raise DomainError("koebe_growth_bounds requires |f'(0)| > 0")
    d = deriv_at_0
    growth = (d * t / (1.0 + t) ** 2, d * t / (1.0 - t) ** 2)
    deriv = (d * (1.0 - t) / (1.0 + t) ** 3, d * (1.0 + t) / (1.0 - t) ** 3)
    return growth, deriv


def distortion_constant(m: float) -> float:
    """Ratio-distortion constant ((1+r)/(1-r))^8 with r = mu_inverse(m):
    bounds the cross-ratio distortion of a conformal map across an annulus
    of modulus >= m. Tends to 1 as m -> infinity."""
    if m <= 0.0:
        raise DomainError(f"distortion_constant requires m > 0, got {m}")
    r = mu_inverse(m)
    return ((1.0 + r) / (1.0 - r)) ** 8


def round_annulus_modulus(r_in: float, r_out: float) -> float:
    """Modulus of the round annulus {r_in < |z| < r_out}: log(r_out/r_in)/(2 pi)."""
    if not 0.0 < r_in < r_out:
        raise DomainError(
            f"round_annulus_modulus requires 0 < r_in < r_out, got ({r_in}, {r_out})"
        )
    return math.log(r_out / r_in) / (2.0 * math.pi)
