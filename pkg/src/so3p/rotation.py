r"""Rotation groups over Q_p: SO(2) blocks, the Cardano chart, quaternions.

Conventions fixed here once and used everywhere else:

* An SO(2)_{p,d} element is [[c, -d*s], [s, c]] with c = (1-d*a^2)/(1+d*a^2)
  and s = 2a/(1+d*a^2); the parameter a = infinity names -I.  All catalog d
  are positive rationals (v < 0 always), so 1 + d*a^2 never vanishes over Q.
* The reference axes carry d_z = -v, d_y = p, d_x = -p/v and embed into
  rows/columns (0,1), (0,2), (1,2) of the 3x3 identity.  A Cardano triple
  (alpha, beta, gamma) names R_z(alpha) R_y(beta) R_x(gamma).
* SO(3)_p is the special isometry group of diag(1, -v, p); every Rot3
  certifies membership on construction.
* A rotation in the Cardano chart generically has exactly two triples:
  (a, b, g) and (1/(v*a), 1/(p*b), v/(p*g)) give the same matrix.
  decompose_cardano returns the branch whose c_beta is 1 mod p, which is
  the branch with beta in Z_p (or beta = 0 in place of infinity).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import AmbiguityError, CertificateError
from .linalg import Mat, aplus, is_special_isometry, lambda_inverse, lambda_matrix, so2_form
from .padic import (
    INF,
    Infinity,
    PadicApprox,
    PrimeCtx,
    hensel_sqrt,
    rational_sqrt,
    unit_residue,
    values_agree,
)
from .quaternion import Quat, conj_action_matrix

__all__ = [
    "Angles",
    "Rot3",
    "So2Elem",
    "angles_to_quat",
    "axis_rotation",
    "cardano_matrix",
    "identity_rotation",
    "decompose_cardano",
    "is_involution",
    "quat_to_rotation",
    "rotation_to_quat",
    "so2_compose",
    "so2_make",
    "so2_param",
]

AXIS_SLOTS = {"z": (0, 1), "y": (0, 2), "x": (1, 2)}


class Angles(NamedTuple):
    """Nautical-angle triple; each slot is a rational, an approx, or INF."""

    alpha: object
    beta: object
    gamma: object


def _as_param(x):
    if isinstance(x, (Infinity, PadicApprox)):
        return x
    return Fraction(x)


def _is_zero(x) -> bool:
    # An approx that is zero to its stated precision counts as zero.
    if isinstance(x, PadicApprox):
        return x.is_zero
    return x == 0


@dataclass(frozen=True)
class So2Elem:
    ctx: PrimeCtx
    d: Fraction
    param: object
    mat: Mat


def so2_make(ctx: PrimeCtx, d, alpha) -> So2Elem:
    """Build the SO(2)_{p,d} element of parameter alpha (INF gives -I)."""
    so2_form(ctx, d)
    d = Fraction(d)
    alpha = _as_param(alpha)
    if isinstance(alpha, Infinity):
        m = Mat.identity(2).scale(Fraction(-1))
    else:
        den = 1 + d * alpha * alpha
        c = (1 - d * alpha * alpha) / den
        s = 2 * alpha / den
        m = Mat(((c, -d * s), (s, c)))
    return So2Elem(ctx, d, alpha, m)


def so2_compose(ctx: PrimeCtx, d, a, b):
    """Parameter of the product R_d(a) R_d(b).

    Finite case (a+b)/(1-d*a*b) with a vanishing denominator giving INF;
    INF absorbs as INF o b = -1/(d*b), INF o 0 = INF, INF o INF = 0.
    """
    so2_form(ctx, d)
    d = Fraction(d)
    a, b = _as_param(a), _as_param(b)
    if isinstance(a, Infinity) and isinstance(b, Infinity):
        return Fraction(0)
    if isinstance(a, Infinity) or isinstance(b, Infinity):
        t = b if isinstance(a, Infinity) else a
        if _is_zero(t):
            return INF
        return -1 / (d * t)
    den = 1 - d * a * b
    if _is_zero(den):
        return INF
    return (a + b) / den


def so2_param(m: Mat, ctx: PrimeCtx, d):
    """Parameter of a certified SO(2)_{p,d} matrix; -I maps to INF."""
    form = so2_form(ctx, d)
    if not is_special_isometry(m, form):
        raise CertificateError(f"not an SO(2) element for d={d}")
    c, s = m.rows[0][0], m.rows[1][0]
    if _is_zero(1 + c):
        return INF
    return s / (1 + c)


def _embed(block: Mat, slots: tuple) -> Mat:
    r1, r2 = slots
    rows = [list(r) for r in Mat.identity(3).rows]
    for bi, mi in enumerate(slots):
        for bj, mj in enumerate(slots):
            rows[mi][mj] = block.rows[bi][bj]
    return Mat(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class Rot3:
    """A certified element of SO(3)_p.

    Construction checks M^T diag(1,-v,p) M = diag(1,-v,p) and det M = 1
    and raises CertificateError otherwise.  Entries of genuine elements
    always lie in Z_p; that is a theorem about the group, not a check.
    """

    ctx: PrimeCtx
    mat: Mat

    def __post_init__(self):
        if not is_special_isometry(self.mat, aplus(self.ctx)):
            raise CertificateError("matrix is not a p-adic rotation")

    def __mul__(self, other: "Rot3") -> "Rot3":
        if self.ctx != other.ctx:
            raise ValueError("mixed prime contexts")
        return Rot3(self.ctx, self.mat * other.mat)

    def inverse(self) -> "Rot3":
        # For an isometry of G, the inverse is G^-1 M^T G: cheaper and
        # exactly rational, no general matrix inversion involved.
        g = aplus(self.ctx).diag
        ginv = Mat.diagonal(1 / e for e in g)
        return Rot3(self.ctx, ginv * self.mat.transpose() * Mat.diagonal(g))

    def trace(self):
        return self.mat.trace()


def identity_rotation(ctx: PrimeCtx) -> Rot3:
    return Rot3(ctx, Mat.identity(3))


def cardano_matrix(ctx: PrimeCtx, angles) -> Rot3:
    """R_z(alpha) R_y(beta) R_x(gamma) as a certified rotation."""
    alpha, beta, gamma = (_as_param(x) for x in angles)
    blocks = (
        _embed(so2_make(ctx, ctx.d_z, alpha).mat, AXIS_SLOTS["z"]),
        _embed(so2_make(ctx, ctx.d_y, beta).mat, AXIS_SLOTS["y"]),
        _embed(so2_make(ctx, ctx.d_x, gamma).mat, AXIS_SLOTS["x"]),
    )
    return Rot3(ctx, blocks[0] * blocks[1] * blocks[2])


def axis_rotation(ctx: PrimeCtx, axis: str, param) -> Rot3:
    """Rotation about one reference axis: z, y or x."""
    d = {"z": ctx.d_z, "y": ctx.d_y, "x": ctx.d_x}[axis]
    return Rot3(ctx, _embed(so2_make(ctx, d, param).mat, AXIS_SLOTS[axis]))


def quat_to_rotation(x: Quat) -> Rot3:
    """The isomorphism from projective quaternions onto SO(3)_p.

    Conjugation by x acts on pure quaternions; rewriting that action in
    the coordinates where the preserved form becomes diag(1,-v,p) gives
    the rotation.  Proportional quaternions map to the same element.
    """
    k = conj_action_matrix(x)
    ctx = x.ctx
    return Rot3(ctx, lambda_matrix(ctx) * k * lambda_inverse(ctx))


def angles_to_quat(ctx: PrimeCtx, angles) -> Quat:
    """Projective quaternion of a Cardano triple.

    Finite triples use the homogeneous quadruple
    [1 - p*a*b*g : (p/v)*b*g - a : b - a*g : g/v - a*b], which is never
    the zero class.  An infinite coordinate replaces the corresponding
    factor of (1 - a i)(1 + b j)(1 + (g/v) k) by the bare unit i, j or k.
    """
    alpha, beta, gamma = (_as_param(x) for x in angles)
    v, p = ctx.v, ctx.p
    if not any(isinstance(t, Infinity) for t in (alpha, beta, gamma)):
        return Quat(
            ctx,
            1 - p * alpha * beta * gamma,
            Fraction(p, v) * beta * gamma - alpha,
            beta - alpha * gamma,
            gamma / v - alpha * beta,
        )
    one = Quat(ctx, Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    i = Quat(ctx, Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    j = Quat(ctx, Fraction(0), Fraction(0), Fraction(1), Fraction(0))
    kq = Quat(ctx, Fraction(0), Fraction(0), Fraction(0), Fraction(1))
    f1 = i if isinstance(alpha, Infinity) else one - i.scale(alpha)
    f2 = j if isinstance(beta, Infinity) else one + j.scale(beta)
    f3 = kq if isinstance(gamma, Infinity) else one + kq.scale(Fraction(gamma, v))
    return f1 * f2 * f3


def rotation_to_quat(r: Rot3) -> Quat:
    """Projective quaternion of a rotation, inverse to quat_to_rotation.

    Normalized so q0 = 1, or the first nonzero coordinate is 1 when the
    scalar part vanishes (involutions).
    """
    ctx = r.ctx
    v, p = ctx.v, ctx.p
    k = lambda_inverse(ctx) * r.mat * lambda_matrix(ctx)
    e = k.rows
    # trace(K) + 1 = 4 q0^2 / nrd; the antisymmetric combinations below
    # recover q0*q1, q0*q2, q0*q3 over the same denominator.
    w = (e[0][0] + e[1][1] + e[2][2] + 1) / 4
    if not _is_zero(w):
        a1 = (v * e[2][1] + e[1][2]) / (4 * v)
        a2 = (e[0][2] - p * e[2][0]) / (4 * p)
        a3 = -(v * e[0][1] + p * e[1][0]) / (4 * p * v)
        return Quat(ctx, Fraction(1), a1 / w, a2 / w, a3 / w)
    # q0 = 0: diagonal entries give squares, off-diagonal give products.
    b1 = -(e[0][0] + 1) / (2 * v)
    b2 = (e[1][1] + 1) / (2 * p)
    b3 = -(e[2][2] + 1) / (2 * v * p)
    c12 = e[0][1] / (2 * p)
    c13 = -e[0][2] / (2 * p * v)
    c23 = -e[1][2] / (2 * v * p)
    zero = Fraction(0)
    if not _is_zero(b1):
        return Quat(ctx, zero, Fraction(1), c12 / b1, c13 / b1)
    if not _is_zero(b2):
        return Quat(ctx, zero, zero, Fraction(1), c23 / b2)
    if _is_zero(b3):
        raise CertificateError("degenerate rotation: no quaternion preimage")
    return Quat(ctx, zero, zero, zero, Fraction(1))


def is_involution(r: Rot3) -> bool:
    """True for R != I with R^2 = I; exactly the trace = -1 locus."""
    return values_agree(r.trace(), Fraction(-1))


def _canonical_cos(ctx: PrimeCtx, radicand, precision: int):
    """Square root of 1 - p*s^2 on the branch that is 1 mod p."""
    if isinstance(radicand, Fraction):
        root = rational_sqrt(radicand)
        if root is not None:
            return root if unit_residue(root, ctx.p) == 1 else -root
    return hensel_sqrt(radicand, ctx, precision)


def _pair_param(ctx: PrimeCtx, d, c, s):
    block = Mat(((c, -Fraction(d) * s), (s, c)))
    return so2_param(block, ctx, d)


def decompose_cardano(r: Rot3, precision: int = 32) -> Angles:
    """Cardano triple of a rotation, canonical branch.

    The sine of beta is the (3,1) entry; its cosine is a square root of
    1 - p*R31^2, a unit that is 1 mod p, so both roots exist and each
    yields a consistent triple (the two are the flip of one another).
    The root that is itself 1 mod p is taken, making the returned beta a
    p-adic integer.  Rationally constructed rotations resolve exactly;
    otherwise the cosine comes from a Hensel lift at `precision` digits.
    """
    ctx = r.ctx
    m = r.mat.rows
    s_b = m[2][0]
    radicand = 1 - ctx.p * s_b * s_b
    c_b = _canonical_cos(ctx, radicand, precision)
    for cand in (c_b, -c_b):
        try:
            angles = _extract_triple(ctx, m, s_b, cand)
        except CertificateError:
            continue
        if cardano_matrix(ctx, angles).mat.agrees(r.mat):
            return angles
    raise AmbiguityError("no consistent sign branch in Cardano extraction")


def _extract_triple(ctx: PrimeCtx, m, s_b, c_b) -> Angles:
    if values_agree(c_b, Fraction(-1)):
        beta = INF
    else:
        beta = s_b / (1 + c_b)
    alpha = _pair_param(ctx, ctx.d_z, m[0][0] / c_b, m[1][0] / c_b)
    gamma = _pair_param(ctx, ctx.d_x, m[2][2] / c_b, m[2][1] / c_b)
    return Angles(alpha, beta, gamma)
