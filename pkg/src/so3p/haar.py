r"""Haar measure on SO(2)_{p,d} and SO(3)_p in the angle coordinates.

The parameter line of SO(2)_{p,d} is Q_p plus one point at infinity; the
Haar measure there is ``d sigma / |1 + d sigma^2|_p`` with the additive
measure normalized so Z_p has mass 1.  The point at infinity has measure
zero and never enters an integral.  SO(3)_p in Cardano coordinates carries
the product of the three axis measures (d = -v, p, -p/v); its total mass
is 4(p+1)/p, and dividing by that constant gives the normalized Haar
probability measure.

Integration is exact.  Regions are finite unions of balls and shells plus
optional Z_p and full-tail flags; on each ball the density is certified
locally constant by an ultrametric bound or the ball is split into its p
children, and shells and tails are summed in closed geometric form.  Every
mass is an exact `Fraction`.

Sampling draws the piece (Z_p or a shell) with its exact probability, then
fills in uniform digits.  Left translation acts on the parameter line as a
Mobius map; `mobius_image` computes exact images of balls, which is the
measure-preservation statement at region level.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from typing import NamedTuple

from .errors import RegionError
from .linalg import Mat, so2_form
from .padic import Infinity, PrimeCtx, abs_p, valuation
from .quaternion import Quat
from .rotation import Angles, Rot3, cardano_matrix

__all__ = [
    "BallQp",
    "InvarianceReport",
    "JacobianReport",
    "MassRational",
    "RegionQp",
    "ShellQp",
    "axis_integral",
    "complement_region",
    "hquat_density",
    "integrate_so2",
    "integrate_so3",
    "invariance_report",
    "jacobian_matrix",
    "jacobian_weight",
    "mobius_image",
    "sample_so2_param",
    "sample_so3",
    "sample_so3_batch",
    "so2_density",
    "so3_density",
    "total_mass",
]

# Masses are plain Fractions; the alias marks intent in signatures.
MassRational = Fraction


def _canonical_center(center: Fraction, k: int, p: int) -> Fraction:
    """The representative of center mod p^k Z_p with digits only below k."""
    w = valuation(center, p)
    if w >= k:
        return Fraction(0)
    unit = center / Fraction(p) ** w
    mod = p ** (k - w)
    m = unit.numerator * pow(unit.denominator, -1, mod) % mod
    return m * Fraction(p) ** w


@dataclass(frozen=True)
class BallQp:
    """The ball center + p^k Z_p, of additive mass p**-k."""

    center: Fraction
    k: int

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        if self.k is True or self.k is False or not isinstance(self.k, int):
            raise RegionError("ball level must be an integer")


@dataclass(frozen=True)
class ShellQp:
    """The shell |sigma|_p = p^k, k >= 1; additive mass p^k (1 - 1/p)."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise RegionError("shell index must be an integer >= 1")


@dataclass(frozen=True)
class _Tail:
    """All shells of index >= k; internal carrier for disjointness checks."""

    k: int


def _min_valuation(ball: BallQp, p: int):
    w = valuation(ball.center, p)
    return ball.k if w >= ball.k else w


def _rank(piece) -> int:
    if isinstance(piece, BallQp):
        return 0
    if isinstance(piece, ShellQp):
        return 1
    return 2


def _intersects(p: int, x, y) -> bool:
    if _rank(x) > _rank(y):
        x, y = y, x
    if isinstance(x, BallQp):
        if isinstance(y, BallQp):
            return valuation(x.center - y.center, p) >= min(x.k, y.k)
        if isinstance(y, ShellQp):
            w = valuation(x.center, p)
            if w >= x.k:
                return -y.k >= x.k
            return w == -y.k
        return _min_valuation(x, p) <= -y.k
    if isinstance(x, ShellQp):
        if isinstance(y, ShellQp):
            return x.k == y.k
        return x.k >= y.k
    return True


@dataclass(frozen=True)
class RegionQp:
    """A finite disjoint union of balls and shells in Q_p.

    ``include_zp`` adds all of Z_p, ``tail_from = K`` adds every shell of
    index >= K in one stroke.  Disjointness of all pieces is verified on
    construction; ball centers are reduced to their canonical finite digit
    expansions, so equal regions built from different representatives
    compare equal.
    """

    p: int
    balls: tuple = ()
    shells: tuple = ()
    include_zp: bool = False
    tail_from: int | None = None

    def __post_init__(self):
        if self.p < 2:
            raise RegionError("p must be a prime")
        balls = tuple(self.balls)
        shells = tuple(self.shells)
        if not all(isinstance(b, BallQp) for b in balls):
            raise RegionError("balls must be BallQp instances")
        if not all(isinstance(s, ShellQp) for s in shells):
            raise RegionError("shells must be ShellQp instances")
        balls = tuple(BallQp(_canonical_center(b.center, b.k, self.p), b.k) for b in balls)
        object.__setattr__(self, "balls", balls)
        object.__setattr__(self, "shells", shells)
        if self.tail_from is not None and (
            not isinstance(self.tail_from, int) or self.tail_from < 1
        ):
            raise RegionError("tail must start at a shell index >= 1")
        pieces = self._pieces()
        for i, x in enumerate(pieces):
            for y in pieces[i + 1 :]:
                if _intersects(self.p, x, y):
                    raise RegionError(f"region pieces overlap: {x} and {y}")

    def _pieces(self) -> tuple:
        pieces = list(self.balls)
        if self.include_zp:
            pieces.append(BallQp(Fraction(0), 0))
        pieces.extend(self.shells)
        if self.tail_from is not None:
            pieces.append(_Tail(self.tail_from))
        return tuple(pieces)

    def contains(self, x) -> bool:
        """Membership of a finite rational point (infinity is in no region)."""
        if isinstance(x, Infinity):
            return False
        x = Fraction(x)
        w = valuation(x, self.p)
        if self.include_zp and w >= 0:
            return True
        if self.tail_from is not None and w <= -self.tail_from:
            return True
        if any(w == -s.k for s in self.shells):
            return True
        return any(valuation(x - b.center, self.p) >= b.k for b in self.balls)

    @classmethod
    def zp(cls, p: int) -> "RegionQp":
        return cls(p, include_zp=True)

    @classmethod
    def full(cls, p: int) -> "RegionQp":
        """All of Q_p: the integers plus every shell."""
        return cls(p, include_zp=True, tail_from=1)

    @classmethod
    def ball(cls, p: int, center, k: int) -> "RegionQp":
        return cls(p, balls=(BallQp(Fraction(center), k),))

    @classmethod
    def shell(cls, p: int, k: int) -> "RegionQp":
        return cls(p, shells=(ShellQp(k),))

    @classmethod
    def tail(cls, p: int, start: int) -> "RegionQp":
        return cls(p, tail_from=start)


def so2_density(ctx: PrimeCtx, d, sigma) -> Fraction:
    """Haar density 1/|1 + d sigma^2|_p at a finite parameter value.

    Always an exact power of p; the catalog d are positive, so the
    denominator never vanishes.  Infinity carries no density.
    """
    so2_form(ctx, d)
    if isinstance(sigma, Infinity):
        raise ValueError("density undefined at infinity, a measure-zero point")
    d, sigma = Fraction(d), Fraction(sigma)
    return Fraction(ctx.p) ** valuation(1 + d * sigma * sigma, ctx.p)


def so3_density(ctx: PrimeCtx, angles) -> Fraction:
    """Product of the three axis densities at a finite Cardano triple."""
    alpha, beta, gamma = angles
    return (
        so2_density(ctx, ctx.d_z, alpha)
        * so2_density(ctx, ctx.d_y, beta)
        * so2_density(ctx, ctx.d_x, gamma)
    )


def hquat_density(x: Quat) -> Fraction:
    """Haar density 1/|nrd(x)|_p^2 on the multiplicative quaternions."""
    if x.is_zero:
        raise ValueError("zero quaternion has no density")
    return abs_p(x.nrd(), x.ctx.p) ** (-2)


def _ball_mass_so2(ctx: PrimeCtx, d: Fraction, center: Fraction, k: int) -> Fraction:
    p = ctx.p
    t = 1 + d * center * center
    vt = valuation(t, p)
    # On the ball the density shifts by d(2c eps + eps^2) with eps in p^k Z_p;
    # when v(1 + d c^2) is strictly below both increment bounds the valuation
    # is constant across the ball.
    bound = min(valuation(2 * d * center, p) + k, valuation(d, p) + 2 * k)
    if vt < bound:
        return Fraction(p) ** (vt - k)
    step = Fraction(p) ** k
    return sum(
        (_ball_mass_so2(ctx, d, center + a * step, k + 1) for a in range(1, p)),
        _ball_mass_so2(ctx, d, center, k + 1),
    )


def integrate_so2(ctx: PrimeCtx, d, region: RegionQp) -> Fraction:
    """Exact Haar mass of a region of the SO(2)_{p,d} parameter line.

    Balls go through the constancy certificate with recursive splitting;
    a shell of index k has the constant density p^(e - 2k) with e = v_p(d),
    giving mass (1 - 1/p) p^(e - k), and a full tail from K sums to
    p^(e - K) in closed form.
    """
    so2_form(ctx, d)
    d = Fraction(d)
    if not isinstance(region, RegionQp):
        raise RegionError("expected a RegionQp")
    p = ctx.p
    if region.p != p:
        raise RegionError(f"region is {region.p}-adic, context is {p}-adic")
    e = valuation(d, p)
    total = Fraction(0)
    if region.include_zp:
        total += _ball_mass_so2(ctx, d, Fraction(0), 0)
    for b in region.balls:
        total += _ball_mass_so2(ctx, d, b.center, b.k)
    for s in region.shells:
        total += (1 - Fraction(1, p)) * Fraction(p) ** (e - s.k)
    if region.tail_from is not None:
        total += Fraction(p) ** (e - region.tail_from)
    return total


_AXIS_TAGS = {"so2:-v": "z", "so2:p": "y", "so2:-p/v": "x"}


def _axis_d(ctx: PrimeCtx, axis: str) -> Fraction:
    return {"z": ctx.d_z, "y": ctx.d_y, "x": ctx.d_x}[axis]


def total_mass(ctx: PrimeCtx, tag: str) -> Fraction:
    """Full-group mass: (p+1)/p, 2, 2 for the axis SO(2)s, 4(p+1)/p for SO(3).

    Computed by the integrator over the full parameter line, not tabulated.
    """
    if tag == "so3":
        return (
            total_mass(ctx, "so2:-v") * total_mass(ctx, "so2:p") * total_mass(ctx, "so2:-p/v")
        )
    if tag not in _AXIS_TAGS:
        raise ValueError(f"unknown group tag: {tag!r}")
    d = _axis_d(ctx, _AXIS_TAGS[tag])
    return integrate_so2(ctx, d, RegionQp.full(ctx.p))


def integrate_so3(ctx: PrimeCtx, box, normalized: bool = False) -> Fraction:
    """Haar mass of a product region (alpha, beta, gamma box) in SO(3)_p."""
    box = tuple(box)
    if len(box) != 3:
        raise RegionError("box must give one region per angle")
    mass = Fraction(1)
    for axis, region in zip("zyx", box):
        mass *= integrate_so2(ctx, _axis_d(ctx, axis), region)
    if normalized:
        mass /= total_mass(ctx, "so3")
    return mass


def axis_integral(ctx: PrimeCtx, axis: str, steps) -> Fraction:
    """Normalized Haar integral over one axis subgroup of a step function.

    The function is a finite list of (region, value) pairs with pairwise
    disjoint regions; the normalization constant is the full mass of the
    axis, (1+1/p) for z and 2 for y and x.
    """
    if axis not in ("z", "y", "x"):
        raise ValueError(f"axis must be z, y or x, not {axis!r}")
    steps = [(region, Fraction(value)) for region, value in steps]
    pieces = []
    for region, _ in steps:
        if not isinstance(region, RegionQp):
            raise RegionError("each step needs a RegionQp")
        pieces.extend(region._pieces())
    for i, x in enumerate(pieces):
        for y in pieces[i + 1 :]:
            if _intersects(ctx.p, x, y):
                raise RegionError(f"step regions overlap: {x} and {y}")
    d = _axis_d(ctx, axis)
    acc = Fraction(0)
    for region, value in steps:
        acc += value * integrate_so2(ctx, d, region)
    tag = {"z": "so2:-v", "y": "so2:p", "x": "so2:-p/v"}[axis]
    return acc / total_mass(ctx, tag)


class JacobianReport(NamedTuple):
    """Four mutually consistent readings of the chart's measure weight."""

    direct: Fraction  # |det J|_p from the nine entries
    closed: Fraction  # |det J|_p from the factored closed form
    quotient: Fraction  # direct / |nrd(1, x1, x2, x3)|_p^2
    weight: Fraction  # the factorized density in the three angles


def _finite_triple(angles) -> tuple:
    out = []
    for x in angles:
        if isinstance(x, Infinity):
            raise ValueError("Jacobian needs finite angles")
        out.append(Fraction(x))
    return tuple(out)


def jacobian_matrix(ctx: PrimeCtx, angles) -> Mat:
    """Jacobian of (alpha, beta, gamma) -> (x1, x2, x3), the q0 = 1 chart.

    Rows differentiate x1 = ((p/v) b g - a) / (1 - p a b g),
    x2 = (b - a g) / (1 - p a b g), x3 = (g/v - a b) / (1 - p a b g).
    """
    a, b, g = _finite_triple(angles)
    p, v = ctx.p, ctx.v
    m1 = p * a * b * g - 1
    if m1 == 0:
        raise ZeroDivisionError("singular locus 1 - p*alpha*beta*gamma = 0")
    w1 = v * a - p * b * g
    w2 = b - a * g
    w3 = v * a * b - g
    return Mat(
        (
            (
                -p * b * g * w1 / (v * m1 * m1) + 1 / m1,
                -p * a * g * w1 / (v * m1 * m1) - p * g / (v * m1),
                -p * a * b * w1 / (v * m1 * m1) - p * b / (v * m1),
            ),
            (
                p * b * g * w2 / (m1 * m1) + g / m1,
                p * a * g * w2 / (m1 * m1) - 1 / m1,
                p * a * b * w2 / (m1 * m1) + a / m1,
            ),
            (
                -p * b * w3 * g / (v * m1 * m1) + b / m1,
                -p * a * w3 * g / (v * m1 * m1) + a / m1,
                -p * a * b * w3 / (v * m1 * m1) - 1 / (v * m1),
            ),
        )
    )


def jacobian_weight(ctx: PrimeCtx, angles) -> JacobianReport:
    """Check the change-of-variables weight four independent ways.

    `direct` evaluates the nine Jacobian entries and takes |det|_p;
    `closed` is the factored determinant; `quotient` divides by the squared
    quaternion-norm weight at the chart point; `weight` is the factorized
    angle density.  All four agree on the chart domain: direct equals
    closed, and quotient equals weight.
    """
    a, b, g = _finite_triple(angles)
    p, v = ctx.p, ctx.v
    jac = jacobian_matrix(ctx, angles)
    direct = abs_p(jac.det(), p)
    m1 = p * a * b * g - 1
    closed = abs_p(
        -((p * b * b - 1) * (v * a * a - 1) * (v - p * g * g)) / (v * v * m1**4), p
    )
    x1 = (Fraction(p, v) * b * g - a) / (1 - p * a * b * g)
    x2 = (b - a * g) / (1 - p * a * b * g)
    x3 = (g / v - a * b) / (1 - p * a * b * g)
    nrd = Quat(ctx, Fraction(1), x1, x2, x3).nrd()
    quotient = direct / abs_p(nrd, p) ** 2
    weight = so3_density(ctx, Angles(a, b, g))
    return JacobianReport(direct=direct, closed=closed, quotient=quotient, weight=weight)


def sample_so2_param(ctx: PrimeCtx, d, rng, digits: int = 32) -> Fraction:
    """One draw from the normalized Haar measure of SO(2)_{p,d}.

    The piece is chosen first with its exact probability, Z_p getting
    1/total and shell k getting (1 - 1/p) p^(e-k)/total; within the piece
    the value is `digits` uniform base-p digits.  Infinity has probability
    zero and is never returned.  Any explicitly seeded generator with a
    `randrange` method works.
    """
    so2_form(ctx, d)
    p = ctx.p
    e = valuation(Fraction(d), p)
    # P(Z_p) is p/(p+1) when e = 0 and 1/2 when e = 1.
    if e == 0:
        in_zp = rng.randrange(p + 1) != 0
    else:
        in_zp = rng.randrange(2) == 0
    if in_zp:
        acc = 0
        for i in range(digits):
            acc += rng.randrange(p) * p**i
        return Fraction(acc)
    k = 1
    while rng.randrange(p) == 0:
        k += 1
    acc = rng.randrange(1, p)
    for i in range(1, digits):
        acc += rng.randrange(p) * p**i
    return Fraction(acc, p**k)


def sample_so3(ctx: PrimeCtx, rng, digits: int = 32) -> tuple:
    """A Haar-random rotation: three independent axis draws, certified."""
    alpha = sample_so2_param(ctx, ctx.d_z, rng, digits)
    beta = sample_so2_param(ctx, ctx.d_y, rng, digits)
    gamma = sample_so2_param(ctx, ctx.d_x, rng, digits)
    angles = Angles(alpha, beta, gamma)
    return angles, cardano_matrix(ctx, angles)


_BATCH_CHUNK = 64


def _stream_rng(seed, index: int) -> random.Random:
    key = hashlib.sha256(f"so3p.haar:{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(key[:16], "big"))


def sample_so3_batch(ctx: PrimeCtx, seed, count: int, digits: int = 32, threads: int = 1):
    """A deterministic batch of Haar draws, independent of thread count.

    The batch is cut into fixed-size chunks, each with its own generator
    derived by hashing (seed, chunk index); workers own whole chunks and
    results concatenate in chunk order, so the output depends only on the
    seed, the count and the digit depth.
    """
    chunks = range((count + _BATCH_CHUNK - 1) // _BATCH_CHUNK)

    def run(idx: int):
        rng = _stream_rng(seed, idx)
        take = min(_BATCH_CHUNK, count - idx * _BATCH_CHUNK)
        return [sample_so3(ctx, rng, digits) for _ in range(take)]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(i) for i in chunks]
    return [draw for part in parts for draw in part]


def complement_region(ctx: PrimeCtx, ball: BallQp) -> RegionQp:
    """Q_p minus a ball: sibling balls level by level plus a full tail.

    Points outside B(c, k) split by the valuation t of sigma - c; each
    t below k contributes the p - 1 sibling balls at level t + 1, and
    once t drops below both v_p(c) and 0 those siblings collapse into
    whole shells, which the tail flag captures in one stroke.
    """
    p = ctx.p
    center = Fraction(ball.center)
    k0 = min(ball.k, valuation(center, p), 0)
    siblings = []
    for t in range(k0, ball.k):
        step = Fraction(p) ** t
        for a in range(1, p):
            siblings.append(BallQp(center + a * step, t + 1))
    return RegionQp(p, balls=tuple(siblings), tail_from=1 - k0)


def mobius_image(ctx: PrimeCtx, d, alpha0, ball: BallQp) -> RegionQp:
    """Exact image of a parameter ball under left translation by alpha0.

    The translation acts as sigma -> (alpha0 + sigma)/(1 - d alpha0 sigma).
    A Mobius map scales ultrametric balls by |derivative|_p, so when the
    pole 1/(d alpha0) lies outside the ball the image is again a ball;
    when the pole lies inside, the image is the whole line outside a ball
    around the image of infinity (plus infinity itself, which carries no
    mass).  alpha0 = INF composes with -I and maps sigma to -1/(d sigma).
    """
    so2_form(ctx, d)
    d = Fraction(d)
    if isinstance(alpha0, Infinity):
        coeffs = (Fraction(-1), Fraction(0), Fraction(0), d)
    else:
        alpha0 = Fraction(alpha0)
        if alpha0 == 0:
            return RegionQp(ctx.p, balls=(ball,))
        coeffs = (alpha0, Fraction(1), Fraction(1), -d * alpha0)
    a, b, c, e = coeffs
    p = ctx.p
    delta = b * c - a * e  # 1 + d alpha0^2 for a translation, never zero
    pole = -c / e
    vpc = valuation(pole - ball.center, p)
    if vpc >= ball.k:
        inner_level = valuation(delta, p) - 2 * valuation(e, p) - ball.k + 1
        return complement_region(ctx, BallQp(b / e, inner_level))
    level = ball.k + valuation(delta, p) - 2 * valuation(e, p) - 2 * vpc
    image_center = (a + b * ball.center) / (c + e * ball.center)
    return RegionQp(p, balls=(BallQp(image_center, level),))


class InvarianceReport(NamedTuple):
    """Comparison of entry residues between a sample batch R and g R.

    statistic sums (a-b)^2/(a+b) over the residue categories that enter
    the test, dof counts the independent squared-difference modes, and
    buckets counts the categories kept.
    """

    statistic: float
    dof: int
    pvalue: float
    n: int
    buckets: int


def _residues_mod_p(m: Mat, p: int) -> tuple:
    # Rotation entries lie in Z_p, so reduction mod p is exact.
    return tuple(
        e.numerator * pow(e.denominator, -1, p) % p for row in m.rows for e in row
    )


def _residue_product(gbar, cat: tuple, p: int) -> tuple:
    # Reduction commutes with the product, so translating a category means
    # multiplying by g's residue matrix in F_p.
    return tuple(
        sum(gbar[i][k] * cat[3 * k + j] for k in range(3)) % p
        for i in range(3)
        for j in range(3)
    )


def _weighted_chi2_tail(x: float, weights: list) -> float:
    """P(sum w_k Z_k^2 > x) for independent standard normal Z_k.

    Imhof's inversion integral for a positive quadratic form in normals;
    exact in the limit, evaluated by quadrature.  A single mode uses the
    closed normal-tail form instead.
    """
    from scipy.integrate import quad  # deferred: only this reporter needs scipy

    if x <= 0.0:
        return 1.0
    if len(weights) == 1:
        return math.erfc(math.sqrt(x / (2.0 * weights[0])))

    def phase(u: float) -> float:
        return 0.5 * sum(math.atan(w * u) for w in weights)

    def envelope(u: float) -> float:
        return math.exp(-0.25 * sum(math.log1p((w * u) ** 2) for w in weights))

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.5 * (sum(weights) - x)
        return math.sin(phase(u) - 0.5 * x * u) * envelope(u) / u

    # head covers one oscillation; past it sin(phi - xu/2) splits into
    # sin(phi)cos(xu/2) - cos(phi)sin(xu/2) with smooth decaying factors,
    # which the Fourier rule integrates over the slowly dying tail
    head = 4.0 * math.pi / x
    val, _ = quad(integrand, 0.0, head, limit=200)
    vc, _ = quad(
        lambda u: math.sin(phase(u)) * envelope(u) / u,
        head, math.inf, weight="cos", wvar=0.5 * x,
    )
    vs, _ = quad(
        lambda u: math.cos(phase(u)) * envelope(u) / u,
        head, math.inf, weight="sin", wvar=0.5 * x,
    )
    return min(1.0, max(0.0, 0.5 + (val + vc - vs) / math.pi))


def invariance_report(g: Rot3, n: int, rng, digits: int = 16) -> InvarianceReport:
    """Statistical check that left translation by g preserves the measure.

    Draws n Haar rotations R and reduces all nine entries of R and of
    g R mod p.  Because reduction commutes with the product, the second
    count vector is the first one relabeled by left multiplication with
    g's residue matrix, a permutation of categories.  Under invariance
    the category probabilities are constant along each permutation
    cycle, and the summed (a-b)^2/(a+b) statistic converges to a sum of
    chi-square modes weighted by 1 - cos(2 pi k/L) per cycle of length
    L; the p-value integrates that law's tail.  Fixed categories carry
    no signal and cycles containing a category with combined count
    below 10 are too sparse for the normal limit; both are left out.
    Translation by the identity fixes every category, so it reproduces
    identical counts, a zero statistic, and p-value one.
    """
    ctx = g.ctx
    p = ctx.p
    counts_a: dict = {}
    counts_b: dict = {}
    gbar = tuple(
        tuple(e.numerator * pow(e.denominator, -1, p) % p for e in row)
        for row in g.mat.rows
    )
    for _ in range(n):
        _, r = sample_so3(ctx, rng, digits)
        ka = _residues_mod_p(r.mat, p)
        # reduce first, multiply in F_p: same residues as reducing g r
        kb = _residue_product(gbar, ka, p)
        counts_a[ka] = counts_a.get(ka, 0) + 1
        counts_b[kb] = counts_b.get(kb, 0) + 1
    statistic = Fraction(0)
    weights: list = []
    kept = 0
    seen: set = set()
    for start in sorted(set(counts_a) | set(counts_b)):
        if start in seen:
            continue
        cycle = [start]
        cur = _residue_product(gbar, start, p)
        while cur != start:
            cycle.append(cur)
            cur = _residue_product(gbar, cur, p)
        seen.update(cycle)
        if len(cycle) == 1:
            continue
        tallies = [(counts_a.get(c, 0), counts_b.get(c, 0)) for c in cycle]
        if any(ca + cb < 10 for ca, cb in tallies):
            continue
        kept += len(cycle)
        statistic += sum(Fraction((ca - cb) ** 2, ca + cb) for ca, cb in tallies)
        length = len(cycle)
        weights.extend(
            1.0 - math.cos(2.0 * math.pi * k / length) for k in range(1, length)
        )
    stat = float(statistic)
    dof = len(weights)
    pvalue = 1.0 if dof == 0 else _weighted_chi2_tail(stat, weights)
    return InvarianceReport(statistic=stat, dof=dof, pvalue=pvalue, n=n, buckets=kept)
