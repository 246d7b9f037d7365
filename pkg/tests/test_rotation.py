"""SO(2) blocks, the Cardano chart, and the quaternion isomorphism."""

import random
from fractions import Fraction

import pytest

from so3p.errors import CertificateError
from so3p.linalg import Mat, so2_form, is_special_isometry
from so3p.padic import INF, Infinity, canonical_units, valuation, values_agree
from so3p.quaternion import Quat, quat
from so3p.rotation import (
    Angles,
    Rot3,
    angles_to_quat,
    axis_rotation,
    cardano_matrix,
    decompose_cardano,
    identity_rotation,
    is_involution,
    quat_to_rotation,
    rotation_to_quat,
    so2_compose,
    so2_make,
    so2_param,
)

from conftest import rand_rational


def entry_oracle(ctx, a, b, g):
    """The nine closed-form entries of R_z(a) R_y(b) R_x(g), transcribed
    independently of the implementation's block product."""
    v, p = ctx.v, ctx.p
    pv = Fraction(p, v)
    za = 1 - v * a * a
    yb = 1 + p * b * b
    xg = 1 - pv * g * g
    return (
        (
            (1 + v * a * a) / za * (1 - p * b * b) / yb,
            2 * v * a * (1 + pv * g * g) / (za * xg) - 4 * p * (1 + v * a * a) * b * g / (za * yb * xg),
            4 * p * a * g / (za * xg) - 2 * p * (1 + v * a * a) * b * (1 + pv * g * g) / (za * yb * xg),
        ),
        (
            2 * a * (1 - p * b * b) / (za * yb),
            (1 + v * a * a) / za * (1 + pv * g * g) / xg - 8 * p * a * b * g / (za * yb * xg),
            2 * p * (1 + v * a * a) * g / (v * za * xg) - 4 * p * a * b * (1 + pv * g * g) / (za * yb * xg),
        ),
        (
            2 * b / yb,
            2 * (1 - p * b * b) * g / (yb * xg),
            (1 - p * b * b) / yb * (1 + pv * g * g) / xg,
        ),
    )


def iso_oracle(x):
    """Closed-form matrix of the quaternion isomorphism, transcribed entry
    by entry rather than computed through the conjugation action."""
    v, p = x.ctx.v, x.ctx.p
    q0, q1, q2, q3 = x.coords
    n = x.nrd()
    rows = (
        (
            q0**2 + v * q1**2 - p * q2**2 - v * p * q3**2,
            -2 * v * (q0 * q1 + p * q2 * q3),
            -2 * p * (q0 * q2 + v * q1 * q3),
        ),
        (
            2 * (p * q2 * q3 - q0 * q1),
            q0**2 + v * q1**2 + p * q2**2 + v * p * q3**2,
            2 * p * (q1 * q2 + q0 * q3),
        ),
        (
            2 * (q0 * q2 - v * q1 * q3),
            2 * v * (q0 * q3 - q1 * q2),
            q0**2 - v * q1**2 - p * q2**2 + v * p * q3**2,
        ),
    )
    return Mat(tuple(tuple(e / n for e in r) for r in rows))


def rand_quat(rng, ctx):
    while True:
        x = quat(ctx, *(rand_rational(rng, ctx.p) if rng.random() < 0.85 else 0 for _ in range(4)))
        if not x.is_zero:
            return x


def rand_triple(rng, ctx, inf_rate=0.0, beta_in_zp=False):
    def slot(zp):
        if inf_rate and rng.random() < inf_rate:
            return INF
        if rng.random() < 0.15:
            return Fraction(0)
        return rand_rational(rng, ctx.p, 0, 3) if zp else rand_rational(rng, ctx.p)

    return Angles(slot(False), slot(beta_in_zp), slot(False))


def flip(ctx, angles):
    """The other Cardano triple of the same rotation."""
    v, p = ctx.v, ctx.p

    def inv(t, c):
        if isinstance(t, Infinity):
            return Fraction(0)
        if t == 0:
            return INF
        return c / t

    return Angles(
        inv(angles.alpha, Fraction(1, v)),
        inv(angles.beta, Fraction(1, p)),
        inv(angles.gamma, Fraction(v, p)),
    )


class TestSo2:
    def test_zero_is_identity(self, ctx):
        for d in ctx.so2_catalog().values():
            assert so2_make(ctx, d, 0).mat == Mat.identity(2)

    def test_infinity_is_minus_identity(self, ctx):
        for d in ctx.so2_catalog().values():
            assert so2_make(ctx, d, INF).mat == Mat.identity(2).scale(Fraction(-1))

    def test_frozen_quarter_turn(self):
        ctx = canonical_units(3)
        assert so2_make(ctx, 1, 1).mat.rows == ((0, -1), (1, 0))

    def test_blocks_are_special_isometries(self, ctx):
        rng = random.Random(11 + ctx.p)
        for d in ctx.so2_catalog().values():
            form = so2_form(ctx, d)
            for _ in range(15):
                m = so2_make(ctx, d, rand_rational(rng, ctx.p)).mat
                assert is_special_isometry(m, form)

    def test_compose_against_matrix_product(self, ctx):
        rng = random.Random(13 + ctx.p)
        params = [rand_rational(rng, ctx.p) for _ in range(8)] + [Fraction(0), INF]
        for d in ctx.so2_catalog().values():
            for a in params:
                for b in params:
                    prod = so2_make(ctx, d, a).mat * so2_make(ctx, d, b).mat
                    assert so2_make(ctx, d, so2_compose(ctx, d, a, b)).mat == prod

    def test_compose_conventions(self, ctx):
        d = ctx.d_z
        assert so2_compose(ctx, d, Fraction(5, 7), 0) == Fraction(5, 7)
        assert so2_compose(ctx, d, INF, 0) is INF
        assert so2_compose(ctx, d, INF, INF) == 0
        b = Fraction(2)
        assert so2_compose(ctx, d, INF, b) == -1 / (d * b)

    def test_compose_frozen_pole(self):
        ctx = canonical_units(3)
        assert so2_compose(ctx, 1, 1, 1) is INF

    def test_param_round_trip(self, ctx):
        rng = random.Random(17 + ctx.p)
        for d in ctx.so2_catalog().values():
            for a in [rand_rational(rng, ctx.p) for _ in range(10)] + [Fraction(0), INF]:
                assert so2_param(so2_make(ctx, d, a).mat, ctx, d) == a

    def test_param_certificate(self, ctx):
        bad = Mat(((Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))))
        with pytest.raises(CertificateError):
            so2_param(bad, ctx, ctx.d_z)

    def test_catalog_is_enforced(self, ctx):
        with pytest.raises(ValueError):
            so2_make(ctx, Fraction(5 if ctx.p != 5 else 7), 1)


class TestCardano:
    def test_identity_triple(self, ctx):
        assert cardano_matrix(ctx, (0, 0, 0)) == identity_rotation(ctx)

    def test_single_axis_triples(self, ctx):
        rng = random.Random(19 + ctx.p)
        a = rand_rational(rng, ctx.p)
        assert cardano_matrix(ctx, (a, 0, 0)) == axis_rotation(ctx, "z", a)
        assert cardano_matrix(ctx, (0, a, 0)) == axis_rotation(ctx, "y", a)
        assert cardano_matrix(ctx, (0, 0, a)) == axis_rotation(ctx, "x", a)

    def test_entries_against_transcribed_formulas(self, ctx):
        rng = random.Random(23 + ctx.p)
        for _ in range(60):
            t = rand_triple(rng, ctx)
            assert cardano_matrix(ctx, t).mat.rows == entry_oracle(ctx, *t)

    def test_sine_of_beta_entry(self, ctx):
        rng = random.Random(29 + ctx.p)
        for _ in range(100):
            t = rand_triple(rng, ctx)
            b = t.beta
            assert cardano_matrix(ctx, t).mat.rows[2][0] == 2 * b / (1 + ctx.p * b * b)

    def test_entries_lie_in_zp(self, ctx):
        rng = random.Random(31 + ctx.p)
        for _ in range(25):
            r = cardano_matrix(ctx, rand_triple(rng, ctx, inf_rate=0.2))
            assert all(valuation(e, ctx.p) >= 0 for row in r.mat.rows for e in row)

    def test_certificate_rejects(self, ctx):
        with pytest.raises(CertificateError):
            Rot3(ctx, Mat.diagonal((Fraction(1), Fraction(1), Fraction(2))))
        good = cardano_matrix(ctx, (1, ctx.p, 2)).mat
        with pytest.raises(CertificateError):
            Rot3(ctx, good.scale(Fraction(2)))

    def test_group_operations(self, ctx):
        rng = random.Random(37 + ctx.p)
        r = cardano_matrix(ctx, rand_triple(rng, ctx))
        s = cardano_matrix(ctx, rand_triple(rng, ctx, inf_rate=0.3))
        assert (r * s).mat == r.mat * s.mat
        assert r * r.inverse() == identity_rotation(ctx)
        assert r.inverse() * r == identity_rotation(ctx)


class TestQuatIso:
    def test_scalar_maps_to_identity(self, ctx):
        assert quat_to_rotation(quat(ctx, 7)) == identity_rotation(ctx)

    def test_frozen_value(self):
        # Worked longhand: conjugation by 1 + i sends i -> i, j -> k,
        # k -> -j at p = 3, then the basis change permutes slots.
        ctx = canonical_units(3)
        r = quat_to_rotation(quat(ctx, 1, 1))
        assert r.mat.rows == ((0, 1, 0), (-1, 0, 0), (0, 0, 1))

    def test_against_transcribed_formulas(self, ctx):
        rng = random.Random(41 + ctx.p)
        for _ in range(40):
            x = rand_quat(rng, ctx)
            assert quat_to_rotation(x).mat == iso_oracle(x)

    def test_homomorphism(self, ctx):
        rng = random.Random(43 + ctx.p)
        for _ in range(25):
            x, y = rand_quat(rng, ctx), rand_quat(rng, ctx)
            assert quat_to_rotation(x * y) == quat_to_rotation(x) * quat_to_rotation(y)

    def test_kernel_is_scalars(self, ctx):
        rng = random.Random(47 + ctx.p)
        x = rand_quat(rng, ctx)
        assert quat_to_rotation(x.scale(Fraction(-3, 5))) == quat_to_rotation(x)

    def test_axis_quaternions(self, ctx):
        rng = random.Random(53 + ctx.p)
        a = rand_rational(rng, ctx.p)
        assert quat_to_rotation(quat(ctx, 1, -a)) == cardano_matrix(ctx, (a, 0, 0))
        assert quat_to_rotation(quat(ctx, 1, 0, a)) == cardano_matrix(ctx, (0, a, 0))
        g_over_v = Fraction(a, ctx.v)
        assert quat_to_rotation(quat(ctx, 1, 0, 0, g_over_v)) == cardano_matrix(ctx, (0, 0, a))

    def test_zero_rejected(self, ctx):
        with pytest.raises(ZeroDivisionError):
            quat_to_rotation(quat(ctx))


class TestAnglesToQuat:
    def test_identity_triple(self, ctx):
        assert angles_to_quat(ctx, (0, 0, 0)) == quat(ctx, 1)

    def test_axis_triples(self, ctx):
        b = Fraction(4, 5)
        assert angles_to_quat(ctx, (b, 0, 0)) == quat(ctx, 1, -b)
        assert angles_to_quat(ctx, (0, b, 0)) == quat(ctx, 1, 0, b)
        assert angles_to_quat(ctx, (0, 0, b)) == quat(ctx, 1, 0, 0, Fraction(b, ctx.v))

    def test_factored_product_oracle(self, ctx):
        rng = random.Random(59 + ctx.p)
        one, i, j, k = (quat(ctx, 1), quat(ctx, 0, 1), quat(ctx, 0, 0, 1), quat(ctx, 0, 0, 0, 1))
        for _ in range(50):
            t = rand_triple(rng, ctx)
            direct = (one - i.scale(t.alpha)) * (one + j.scale(t.beta)) * (one + k.scale(Fraction(t.gamma, ctx.v)))
            assert angles_to_quat(ctx, t) == direct

    def test_never_the_zero_class(self, ctx):
        # On the involution locus 1 - p*a*b*g = 0 the quadruple stays nonzero.
        a, b = Fraction(1), Fraction(1)
        g = Fraction(1, ctx.p)
        x = angles_to_quat(ctx, (a, b, g))
        assert x.q0 == 0 and not x.is_zero

    def test_grand_consistency(self, ctx):
        rng = random.Random(61 + ctx.p)
        for _ in range(30):
            t = rand_triple(rng, ctx, inf_rate=0.25)
            assert quat_to_rotation(angles_to_quat(ctx, t)) == cardano_matrix(ctx, t)

    def test_grand_consistency_on_involutions(self, ctx):
        rng = random.Random(67 + ctx.p)
        for _ in range(10):
            a, b = rand_rational(rng, ctx.p), rand_rational(rng, ctx.p)
            g = 1 / (ctx.p * a * b)
            t = Angles(a, b, g)
            assert angles_to_quat(ctx, t).q0 == 0
            assert quat_to_rotation(angles_to_quat(ctx, t)) == cardano_matrix(ctx, t)


class TestRotationToQuat:
    def test_identity(self, ctx):
        assert rotation_to_quat(identity_rotation(ctx)) == quat(ctx, 1)

    def test_z_rotation(self, ctx):
        a = Fraction(3, 7)
        assert rotation_to_quat(axis_rotation(ctx, "z", a)) == quat(ctx, 1, -a)

    def test_round_trip_from_quat(self, ctx):
        rng = random.Random(71 + ctx.p)
        for _ in range(40):
            x = rand_quat(rng, ctx)
            assert rotation_to_quat(quat_to_rotation(x)).proportional(x)

    def test_round_trip_pure_quats(self, ctx):
        rng = random.Random(73 + ctx.p)
        pures = [quat(ctx, 0, 1), quat(ctx, 0, 0, 1), quat(ctx, 0, 0, 0, 1)]
        for _ in range(20):
            x = quat(ctx, 0, *(rand_rational(rng, ctx.p) for _ in range(3)))
            if not x.is_zero:
                pures.append(x)
        for x in pures:
            y = rotation_to_quat(quat_to_rotation(x))
            assert y.q0 == 0 and y.proportional(x)

    def test_round_trip_from_rotation(self, ctx):
        rng = random.Random(79 + ctx.p)
        for _ in range(25):
            r = cardano_matrix(ctx, rand_triple(rng, ctx, inf_rate=0.2))
            assert quat_to_rotation(rotation_to_quat(r)) == r


class TestInvolution:
    def test_conjugation_by_i(self, ctx):
        r = quat_to_rotation(quat(ctx, 0, 1))
        assert r.mat == Mat.diagonal((Fraction(-1), Fraction(-1), Fraction(1)))
        assert is_involution(r)
        assert r * r == identity_rotation(ctx)

    def test_identity_is_not(self, ctx):
        assert not is_involution(identity_rotation(ctx))

    def test_generic_rotation_is_not(self):
        ctx = canonical_units(3)
        assert not is_involution(cardano_matrix(ctx, (1, 0, 0)))

    def test_involution_locus(self, ctx):
        t = Angles(Fraction(1), Fraction(1), Fraction(1, ctx.p))
        r = cardano_matrix(ctx, t)
        assert is_involution(r)
        assert r * r == identity_rotation(ctx)
        assert rotation_to_quat(r).q0 == 0


class TestDecompose:
    def test_identity(self, ctx):
        assert decompose_cardano(identity_rotation(ctx)) == Angles(0, 0, 0)

    def test_frozen_round_trip_p5(self):
        ctx = canonical_units(5)
        t = Angles(Fraction(1), Fraction(1), Fraction(1))
        assert decompose_cardano(cardano_matrix(ctx, t)) == t

    def test_round_trip_on_canonical_triples(self, ctx):
        rng = random.Random(83 + ctx.p)
        for _ in range(40):
            t = rand_triple(rng, ctx, beta_in_zp=True)
            assert decompose_cardano(cardano_matrix(ctx, t)) == t

    def test_round_trip_with_infinities(self, ctx):
        rng = random.Random(89 + ctx.p)
        for _ in range(10):
            t = Angles(INF, rand_rational(rng, ctx.p, 0, 2), rand_rational(rng, ctx.p))
            assert decompose_cardano(cardano_matrix(ctx, t)) == t

    def test_flip_branch_for_beta_outside_zp(self, ctx):
        rng = random.Random(97 + ctx.p)
        for _ in range(25):
            t = Angles(
                rand_rational(rng, ctx.p),
                rand_rational(rng, ctx.p, -4, -1),
                rand_rational(rng, ctx.p),
            )
            got = decompose_cardano(cardano_matrix(ctx, t))
            assert got == flip(ctx, t)
            assert cardano_matrix(ctx, got) == cardano_matrix(ctx, t)

    def test_infinite_beta_flips_to_zero(self, ctx):
        rng = random.Random(101 + ctx.p)
        a, g = rand_rational(rng, ctx.p), rand_rational(rng, ctx.p)
        t = Angles(a, INF, g)
        got = decompose_cardano(cardano_matrix(ctx, t))
        assert got == flip(ctx, t)
        assert got.beta == 0

    def test_frozen_flip_p3(self):
        ctx = canonical_units(3)
        got = decompose_cardano(cardano_matrix(ctx, (0, Fraction(1, 3), 0)))
        assert got == Angles(INF, Fraction(1), INF)
        assert cardano_matrix(ctx, got) == cardano_matrix(ctx, (0, Fraction(1, 3), 0))

    def test_involution_decomposes(self, ctx):
        t = Angles(Fraction(1), Fraction(1), Fraction(1, ctx.p))
        assert decompose_cardano(cardano_matrix(ctx, t)) == t

    def test_hensel_path(self):
        # 1 + i + j at p = 3 has a (3,1) entry of 2/5; the cosine of beta
        # is then a square root of 13/25, irrational, so the extraction
        # runs through the Hensel lift and lands on approx angles.
        ctx = canonical_units(3)
        r = quat_to_rotation(quat(ctx, 1, 1, 1))
        assert r.mat.rows[2][0] == Fraction(2, 5)
        t = decompose_cardano(r, precision=24)
        assert cardano_matrix(ctx, t).mat.agrees(r.mat)
        assert valuation(t.beta, 3) >= 0

    def test_hensel_path_random(self, ctx):
        rng = random.Random(103 + ctx.p)
        hit = 0
        for _ in range(12):
            r = quat_to_rotation(rand_quat(rng, ctx))
            t = decompose_cardano(r, precision=20)
            hit += any(not isinstance(x, (Fraction, Infinity)) for x in t)
            assert cardano_matrix(ctx, t).mat.agrees(r.mat)
        assert hit > 0
