"""Exact rational arithmetic on the circle R/Z for external-angle combinatorics.

Everything here is exact: angles are `fractions.Fraction` values, binary
prefixes carry certified dyadic intervals, and every comparison in the
inequality-chain verifier is either exact rational arithmetic or a
certified interval separation.  No floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyBits

HALF = Fraction(1, 2)
ONE = Fraction(1)


def angle(numerator: int, denominator: int = 1) -> Fraction:
    """Exact angle p/q reduced mod 1 into [0, 1)."""
    return Fraction(numerator, denominator) % 1


def parse_angle(text: str) -> Fraction:
    """Parse 'p/q' or a plain integer as an exact angle mod 1."""
    return Fraction(text.strip()) % 1


def doubling(t: Fraction) -> Fraction:
    """Angle doubling on R/Z: t -> 2t mod 1."""
    return (2 * t) % 1


def tent(t: Fraction) -> Fraction:
    """Tent map on [0, 1]: t -> min(2t, 2 - 2t)."""
    if not 0 <= t <= 1:
        raise ValueError(f"tent is defined on [0, 1], got {t}")
    return min(2 * t, 2 - 2 * t)


def ell(t: Fraction) -> Fraction:
    """Length of the component of (R/Z) minus {t, 1-t} containing 0.

    Piecewise: 2t on [0, 1/2), 2 - 2t on [1/2, 1).
    """
    if not 0 <= t < 1:
        raise ValueError(f"ell is defined on [0, 1), got {t}")
    return 2 * t if t < HALF else 2 - 2 * t


@dataclass(frozen=True)
class OrbitClass:
    """Eventual cycle structure of a doubling orbit: preperiod k (0 for purely
    periodic) and period p >= 1."""

    preperiod: int
    period: int

    @property
    def periodic(self) -> bool:
        return self.preperiod == 0

    def __str__(self) -> str:
        if self.periodic:
            return f"Periodic({self.period})"
        return f"PrePeriodic({self.preperiod}, {self.period})"


def classify_orbit(t: Fraction) -> OrbitClass:
    """Exact cycle detection of the doubling orbit of a rational angle.

    Doubling never enlarges the reduced denominator, so the orbit is finite
    and the first repeat determines preperiod and period.
    """
    t = t % 1
    seen: dict[Fraction, int] = {}
    x = t
    i = 0
    while x not in seen:
        seen[x] = i
        x = doubling(x)
        i += 1
    first = seen[x]
    return OrbitClass(preperiod=first, period=i - first)


def in_R(t: Fraction) -> bool:
    """Membership in {t : T^n(l(t)) <= l(t) for all n >= 0}, decided exactly.

    The tent orbit of a rational stays on a fixed denominator lattice, so it
    cycles; enumerate it until the first repeat.
    """
    t = t % 1
    bound = ell(t)
    seen: set[Fraction] = set()
    x = bound
    while x not in seen:
        if x > bound:
            return False
        seen.add(x)
        x = tent(x)
    return True


def conjugacy_check(t: Fraction) -> bool:
    """Exact check of the semiconjugacy tent(ell(t)) == ell(doubling(t))."""
    return tent(ell(t)) == ell(doubling(t))


def theta_prime() -> Fraction:
    """The periodic binary angle 0.(0 1^99) repeated: (2^99 - 1)/(2^100 - 1)."""
    return Fraction(2**99 - 1, 2**100 - 1)


@dataclass(frozen=True)
class BinaryPrefix:
    """First n binary digits of a number in [0, 1), with its certified
    dyadic value interval [value, value + 2^-n)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise EmptyBits("binary prefix needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def lower(self) -> Fraction:
        n = len(self.bits)
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return Fraction(v, 2**n)

    @property
    def upper(self) -> Fraction:
        return self.lower + Fraction(1, 2 ** len(self.bits))

    def interval(self) -> tuple[Fraction, Fraction]:
        return self.lower, self.upper

    def shifted(self, n: int) -> "BinaryPrefix":
        """Prefix of the n-fold doubling image (drop n leading bits)."""
        if n >= len(self.bits):
            raise ValueError("prefix too short to shift")
        return BinaryPrefix(self.bits[n:])

    def run_lengths(self) -> list[int]:
        """Lengths of maximal constant runs, in order."""
        runs = [1]
        for prev, cur in zip(self.bits, self.bits[1:]):
            if cur == prev:
                runs[-1] += 1
            else:
                runs.append(1)
        return runs

    def __str__(self) -> str:
        return "0." + "".join(str(b) for b in self.bits)


def build_theta(alpha_bits, leading_run: int = 100) -> BinaryPrefix:
    """Encode a bit sequence into the run-length angle prefix.

    Layout: one 0, then `leading_run` ones, then alternating runs of zeros
    and ones (starting with zeros) whose lengths are a_i + 1 for the input
    bits a_i.  Every encoded run length is therefore 1 or 2.
    """
    alpha_bits = list(alpha_bits)
    if not alpha_bits:
        raise EmptyBits("build_theta needs at least one input bit")
    if any(b not in (0, 1) for b in alpha_bits):
        raise ValueError("input bits must be 0 or 1")
    bits = [0] + [1] * leading_run
    fill = 0
    for a in alpha_bits:
        bits.extend([fill] * (a + 1))
        fill ^= 1
    return BinaryPrefix(tuple(bits))


def _ell_interval(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Image interval of [lo, hi) under ell, conservatively closed."""
    if hi <= HALF:
        return 2 * lo, 2 * hi
    if lo >= HALF:
        return 2 - 2 * hi, 2 - 2 * lo
    # straddles 1/2: ell peaks at 1 approaching 1/2 from below
    return min(2 * lo, 2 - 2 * hi), ONE


@dataclass(frozen=True)
class ChainCertificate:
    """Outcome of the inequality-chain verification.

    status is 'CERTIFIED', 'INCONCLUSIVE' or 'FALSIFIED'; for the latter two
    first_n names the first n whose comparison failed or could not be
    separated at the available prefix precision.
    """

    status: str
    n_max: int
    comparisons: int
    first_n: int | None = None

    @property
    def certified(self) -> bool:
        return self.status == "CERTIFIED"


def verify_inequalities(theta_pfx: BinaryPrefix, n_max: int) -> ChainCertificate:
    """Certify 0 < l(q(t')) < l(q^n(t)), l(q^n(t')) < l(t') < l(t) for
    2 <= n <= n_max, where t' is the exact 100-periodic angle and t is known
    only through the given binary prefix.

    Comparisons involving t use interval arithmetic on the dyadic interval
    of the (shifted) prefix; a comparison whose intervals overlap yields an
    INCONCLUSIVE result naming the first such n.
    """
    tp = theta_prime()
    l_tp = ell(tp)                       # exact
    l_q_tp = ell(doubling(tp))           # exact
    if not 0 < l_q_tp < l_tp:
        return ChainCertificate("FALSIFIED", n_max, 0, first_n=0)

    comparisons = 1
    # l(t') < l(t): certified when the ell-interval of theta lies above l(t')
    theta_lo, theta_hi = theta_pfx.interval()
    lt_lo, _ = _ell_interval(theta_lo, theta_hi)
    if not l_tp < lt_lo:
        return ChainCertificate("INCONCLUSIVE", n_max, comparisons, first_n=1)
    comparisons += 1

    x = doubling(doubling(tp))           # q^2(t')
    for n in range(2, n_max + 1):
        # exact branch: l(q(t')) < l(q^n(t')) < l(t')
        l_qn_tp = ell(x)
        if not l_q_tp < l_qn_tp < l_tp:
            return ChainCertificate("FALSIFIED", n_max, comparisons, first_n=n)
        comparisons += 1

        # interval branch: l(q(t')) < l(q^n(t)) < l(t')
        try:
            shifted = theta_pfx.shifted(n)
        except ValueError:
            return ChainCertificate("INCONCLUSIVE", n_max, comparisons, first_n=n)
        lo, hi = _ell_interval(*shifted.interval())
        # treat [lo, hi] as closed: certification demands strict separation
        if hi < l_tp and l_q_tp < lo:
            comparisons += 1
        elif lo >= l_tp or hi <= l_q_tp:
            return ChainCertificate("FALSIFIED", n_max, comparisons, first_n=n)
        else:
            return ChainCertificate("INCONCLUSIVE", n_max, comparisons, first_n=n)

        x = doubling(x)

    return ChainCertificate("CERTIFIED", n_max, comparisons)
