"""Star products, star inverses, evaluation, Wiener-Grassmann invertibility."""
import numpy as np
import pytest

from grasschur import SuperMatrix, classify, dagger, invert, mul
from grasschur.errors import ConstantTermSingular, NotInvertible, ShapeMismatch
from grasschur.sampling import random_soul, random_supermatrix, random_supernumber
from grasschur.series import (
    LaurentSeries,
    SeriesMatrix,
    backward_shift,
    evaluate,
    evaluate_right,
    evaluation_tail_bound,
    hermitian_form,
    laurent_star_mul,
    project_minus,
    project_plus,
    resolvent,
    star_inverse,
    star_mul,
    star_mul_right,
    weak_plus_invertibility,
    wiener_invert,
    wiener_is_invertible,
)


def scalar_series(ctx, bodies, exact=False):
    return SeriesMatrix(tuple(SuperMatrix.from_body(ctx, [[b]]) for b in bodies), exact=exact)


def random_series(ctx, rng, p, q, degree, **kwargs):
    return SeriesMatrix(
        tuple(random_supermatrix(ctx, rng, p, q, **kwargs) for _ in range(degree + 1))
    )


def series_dist(f, g):
    through = min(f.degree, g.degree)
    return sum((f.coeffs[n] - g.coeffs[n]).norm1() for n in range(through + 1))


class TestStarMul:
    def test_unit_neutral(self, ctx, rng):
        f = random_series(ctx, rng, 2, 2, 5)
        one = SeriesMatrix.identity(ctx, 2)
        assert series_dist(star_mul(f, one), f) == 0
        assert star_mul(f, one).degree == f.degree

    def test_monomials_multiply_exactly(self, ctx, rng):
        a = random_supernumber(ctx, rng)
        b = random_supernumber(ctx, rng)
        za = SeriesMatrix.from_coeffs(
            [SuperMatrix.zeros(ctx, 1, 1), SuperMatrix.from_scalar(a)], exact=True)
        zb = SeriesMatrix.from_coeffs(
            [SuperMatrix.zeros(ctx, 1, 1), SuperMatrix.from_scalar(b)], exact=True)
        prod = star_mul(za, zb)
        assert prod.exact and prod.degree == 2
        assert prod.coeffs[0].is_zero() and prod.coeffs[1].is_zero()
        assert prod.coeffs[2][0, 0] == mul(a, b)

    def test_scalar_complex_cauchy_product(self, ctx, rng):
        a = rng.normal(size=6) + 1j * rng.normal(size=6)
        b = rng.normal(size=6) + 1j * rng.normal(size=6)
        f = scalar_series(ctx, a)
        g = scalar_series(ctx, b)
        prod = star_mul(f, g)
        expected = np.convolve(a, b)[:6]
        got = np.array([c[0, 0].body for c in prod.coeffs])
        assert np.allclose(got, expected, atol=1e-12)

    def test_associative(self, ctx, rng):
        f = random_series(ctx, rng, 2, 2, 6, terms=3)
        g = random_series(ctx, rng, 2, 2, 6, terms=3)
        h = random_series(ctx, rng, 2, 2, 6, terms=3)
        lhs = star_mul(star_mul(f, g), h)
        rhs = star_mul(f, star_mul(g, h))
        assert series_dist(lhs, rhs) <= 1e-10 * f.norm1() * g.norm1() * h.norm1()

    def test_right_product_same_coefficients(self, ctx, rng):
        f = random_series(ctx, rng, 1, 1, 4)
        g = random_series(ctx, rng, 1, 1, 4)
        assert series_dist(star_mul_right(f, g), star_mul(f, g)) == 0

    def test_even_coefficients_make_sides_agree_on_eval(self, ctx, rng):
        f = random_series(ctx, rng, 1, 1, 4, parity="even")
        z0 = ctx.scalar(0.3) + random_soul(ctx, rng, parity="even", scale=0.1)
        left = evaluate(f, z0)
        right = evaluate_right(f, z0)
        assert (left - right).norm1() <= 1e-10 * max(1.0, f.norm1())


class TestStarInverse:
    def test_geometric_series(self, ctx):
        a = SuperMatrix.from_body(ctx, [[0.5]])
        one_minus = SeriesMatrix.from_coeffs([SuperMatrix.identity(ctx, 1), -a], exact=True)
        inv = star_inverse(one_minus)
        for n, c in enumerate(inv.coeffs):
            assert c[0, 0].body == pytest.approx(0.5**n)

    def test_two_sided_residual(self, ctx, rng):
        f = SeriesMatrix.from_coeffs(
            [SuperMatrix.identity(ctx, 2)]
            + [random_supermatrix(ctx, rng, 2, 2, scale=0.3) for _ in range(6)]
        )
        g = star_inverse(f)
        eye = SeriesMatrix.identity(ctx, 2)
        left = star_mul(f, g)
        right = star_mul(g, f)
        assert series_dist(left, eye) <= 1e-9 * max(1.0, f.norm1() * g.norm1())
        assert series_dist(right, eye) <= 1e-9 * max(1.0, f.norm1() * g.norm1())

    def test_nilpotent_first_coefficient(self, ctx, rng):
        f = SeriesMatrix.from_coeffs(
            [SuperMatrix.identity(ctx, 2),
             random_supermatrix(ctx, rng, 2, 2, body=0.0, scale=0.5)]
        , exact=True)
        g = star_inverse(f)
        assert series_dist(star_mul(f, g), SeriesMatrix.identity(ctx, 2)) <= 1e-10

    def test_singular_constant_term(self, ctx):
        f = SeriesMatrix.from_coeffs([SuperMatrix.zeros(ctx, 1, 1), SuperMatrix.identity(ctx, 1)], exact=True)
        with pytest.raises(ConstantTermSingular):
            star_inverse(f)


class TestResolvent:
    def test_zero_matrix(self, ctx):
        r = resolvent(SuperMatrix.zeros(ctx, 2, 2), degree=4)
        assert r.coeffs[0] == SuperMatrix.identity(ctx, 2)
        assert all(c.is_zero() for c in r.coeffs[1:])

    def test_nilpotent_jordan_block(self, ctx):
        a = SuperMatrix.from_body(ctx, [[0.0, 1.0], [0.0, 0.0]])
        r = resolvent(a, degree=5)
        assert not r.coeffs[1].is_zero()
        assert all(c.is_zero() for c in r.coeffs[2:])

    def test_body_matches_neumann(self, ctx, rng):
        a_body = 0.4 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        a = SuperMatrix.from_body(ctx, a_body)
        r = resolvent(a, degree=8)
        for n, c in enumerate(r.coeffs):
            assert np.allclose(c.body(), np.linalg.matrix_power(a_body, n), atol=1e-12)


class TestEvaluate:
    def test_at_zero(self, ctx, rng):
        f = random_series(ctx, rng, 2, 2, 4)
        assert (evaluate(f, ctx.zero()) - f.coeffs[0]).norm1() == 0

    def test_geometric_at_half(self, ctx):
        f = scalar_series(ctx, [1.0] * 33)
        got = evaluate(f, ctx.scalar(0.5))
        assert got[0, 0].body == pytest.approx(2.0, abs=1e-9)

    def test_soul_evaluation_matches_analytic_apply(self, ctx, rng):
        from grasschur import analytic_apply

        z0 = ctx.scalar(0.4) + random_soul(ctx, rng, scale=0.1, parity="even")
        f = scalar_series(ctx, [1.0] * 33)  # the (1-z)^{-1} series
        got = evaluate(f, z0)[0, 0]

        def geom(c, n):
            import math

            return math.factorial(n) / (1 - c) ** (n + 1)

        expected = analytic_apply(geom, z0)
        assert (got - expected).norm1() <= 1e-8 * expected.norm1()

    def test_tail_bound_reporting(self, ctx):
        f = scalar_series(ctx, [1.0] * 5)
        assert evaluation_tail_bound(f, ctx.scalar(0.5)) > 0
        exact = scalar_series(ctx, [1.0, 2.0], exact=True)
        assert evaluation_tail_bound(exact, ctx.scalar(0.5)) == 0.0

    def test_strict_mode_rejects_fat_tail(self, ctx):
        from grasschur.errors import TailTooLarge

        f = scalar_series(ctx, [1.0] * 5)
        with pytest.raises(TailTooLarge):
            evaluate(f, ctx.scalar(0.9), strict=True)
        exact = scalar_series(ctx, [1.0, 2.0], exact=True)
        assert evaluate(exact, ctx.scalar(0.9), strict=True)[0, 0].body == pytest.approx(2.8)

    def test_resolvent_side_validation(self, ctx):
        from grasschur import SuperMatrix as SM

        with pytest.raises(ValueError):
            resolvent(SM.zeros(ctx, 2, 2), degree=2, side="middle")
        left = resolvent(SM.from_body(ctx, [[0.5]]), degree=3, side="left")
        right = resolvent(SM.from_body(ctx, [[0.5]]), degree=3, side="right")
        assert series_dist(left, right) == 0


class TestHermitianForm:
    def test_constant_one(self, ctx):
        f = SeriesMatrix.identity(ctx, 1)
        assert hermitian_form(f, f)[0, 0] == ctx.one()

    def test_body_reduces_to_hardy_inner_product(self, ctx, rng):
        a = rng.normal(size=5) + 1j * rng.normal(size=5)
        b = rng.normal(size=5) + 1j * rng.normal(size=5)
        f = scalar_series(ctx, a)
        g = scalar_series(ctx, b)
        got = hermitian_form(f, g)[0, 0].body
        assert got == pytest.approx(np.sum(np.conj(b) * a))

    def test_kernel_self_form(self, ctx, rng):
        # [K(.,w)xi, K(.,w)xi] at small degree equals sum_n w^n (xi* xi) (w†)^n
        w = ctx.scalar(0.5) + random_soul(ctx, rng, scale=0.1)
        xi = ctx.scalar(1.0)
        coeffs = []
        wp = ctx.one()
        for n in range(6):
            coeffs.append(SuperMatrix.from_scalar(mul(dagger(wp), xi)))
            wp = mul(wp, w)  # (w†)^n built by daggering the power below
        k = SeriesMatrix.from_coeffs(coeffs)
        form = hermitian_form(k, k)[0, 0]
        expected = ctx.zero()
        for n in range(6):
            t1 = dagger(k.coeffs[n][0, 0])
            expected = expected + mul(t1, k.coeffs[n][0, 0])
        assert (form - expected).norm1() <= 1e-12 * max(1.0, expected.norm1())


class TestBackwardShift:
    def test_constant_dies(self, ctx, rng):
        f = SeriesMatrix.constant(random_supermatrix(ctx, rng, 2, 2))
        assert backward_shift(f).coeffs[0].is_zero()

    def test_monomial(self, ctx, rng):
        a = random_supermatrix(ctx, rng, 1, 1)
        f = SeriesMatrix.from_coeffs([SuperMatrix.zeros(ctx, 1, 1), a], exact=True)
        assert backward_shift(f).coeffs[0] == a

    def test_difference_quotient_at_complex_point(self, ctx, rng):
        f = random_series(ctx, rng, 1, 1, 6)
        lam = 0.37 + 0.21j
        shifted = evaluate(backward_shift(f), ctx.scalar(lam))
        direct = (evaluate(f, ctx.scalar(lam)) - f.coeffs[0]) * (1.0 / lam)
        assert (shifted - direct).norm1() <= 1e-10 * max(1.0, f.norm1())


class TestLaurent:
    def make_laurent(self, ctx, mapping):
        return LaurentSeries(
            max(abs(n) for n in mapping) if mapping else 0,
            {n: SuperMatrix.from_scalar(v) if hasattr(v, "context") else SuperMatrix.from_body(ctx, [[v]])
             for n, v in mapping.items()},
        )

    def test_projections_partition(self, ctx, rng):
        f = self.make_laurent(ctx, {-2: 1.0 + 0j, -1: 2.0, 0: 0.5, 1: -1.0, 2: 3.0})
        plus, minus = project_plus(f), project_minus(f)
        recombined = plus + minus - self.make_laurent(ctx, {0: 0.5})
        assert (recombined - f).norm1() == 0

    def test_plus_of_one_sided_is_identity(self, ctx):
        f = self.make_laurent(ctx, {0: 1.0, 1: 0.5, 3: 0.25})
        assert (project_plus(f) - f).norm1() == 0

    def test_body_riesz_projection(self, ctx, rng):
        coeffs = {n: complex(rng.normal(), rng.normal()) for n in range(-3, 4)}
        f = self.make_laurent(ctx, coeffs)
        plus = project_plus(f)
        for n, c in coeffs.items():
            if n >= 0:
                assert plus.coefficient(n)[0, 0].body == pytest.approx(c)
            else:
                assert plus.coefficient(n).is_zero()


class TestWiener:
    def make_scalar(self, ctx, mapping):
        return LaurentSeries(
            max((abs(n) for n in mapping), default=0),
            {n: SuperMatrix.from_scalar(v if hasattr(v, "context") else ctx.scalar(v))
             for n, v in mapping.items()},
        )

    def test_constant_invertible(self, ctx):
        assert wiener_is_invertible(self.make_scalar(ctx, {0: 1.0}))

    def test_vanishing_at_t0(self, ctx):
        f = self.make_scalar(ctx, {0: -1.0, 1: 1.0})  # e^{it} - 1
        assert not wiener_is_invertible(f)

    def test_soul_irrelevant(self, ctx):
        f = self.make_scalar(ctx, {0: ctx.scalar(2.0) + ctx.generator(1)})
        assert wiener_is_invertible(f)

    def test_constant_inverse(self, ctx):
        g = wiener_invert(self.make_scalar(ctx, {0: 2.0}))
        assert (g.coefficient(0)[0, 0] - ctx.scalar(0.5)).norm1() <= 1e-12

    def test_odd_soul_inverse(self, ctx):
        # f = 1 + i1 e^{it}: inverse 1 - i1 e^{it} since (i1 e^{it})^2 = 0
        f = self.make_scalar(ctx, {0: ctx.one(), 1: ctx.generator(1)})
        g = wiener_invert(f)
        residual = laurent_star_mul(f, g) - LaurentSeries.constant(SuperMatrix.identity(ctx, 1))
        assert max((c.norm1() for c in residual.coeffs.values()), default=0.0) <= 1e-9

    def test_geometric_inverse(self, ctx):
        f = self.make_scalar(ctx, {0: 1.0, 1: -0.5})  # 1 - e^{it}/2
        g = wiener_invert(f)
        for n in range(4):
            assert g.coefficient(n)[0, 0].body == pytest.approx(0.5**n, abs=1e-9)
        assert g.coefficient(-1).norm1() <= 1e-9

    def test_matrix_case_residual(self, ctx4, rng):
        ctx = ctx4
        eye = SuperMatrix.identity(ctx, 2)
        f = LaurentSeries(1, {
            -1: random_supermatrix(ctx, rng, 2, 2, scale=0.1, terms=2, max_grade=2),
            0: eye * 2 + random_supermatrix(ctx, rng, 2, 2, scale=0.2, body=0.0, terms=2, max_grade=2),
            1: random_supermatrix(ctx, rng, 2, 2, scale=0.1, terms=2, max_grade=2),
        })
        g = wiener_invert(f)
        residual = laurent_star_mul(f, g) - LaurentSeries.constant(eye)
        inside = [c.norm1() for n, c in residual.coeffs.items() if abs(n) <= f.window]
        assert max(inside, default=0.0) <= 1e-9

    def test_not_invertible_raises(self, ctx):
        with pytest.raises(NotInvertible):
            wiener_invert(self.make_scalar(ctx, {0: -1.0, 1: 1.0}))


class TestWeakInvertibility:
    def test_small_slope(self, ctx):
        f = scalar_series(ctx, [1.0, -0.25], exact=True)
        assert weak_plus_invertibility(f)

    def test_vanishes_on_boundary(self, ctx):
        f = scalar_series(ctx, [1.0, -1.0], exact=True)
        assert not weak_plus_invertibility(f)

    def test_soul_invariant(self, ctx, rng):
        base = [1.0, -0.25, 0.1]
        f = scalar_series(ctx, base, exact=True)
        soulful = SeriesMatrix.from_coeffs(
            [SuperMatrix.from_scalar(ctx.scalar(b) + random_soul(ctx, rng, scale=0.5)) for b in base],
            exact=True,
        )
        assert weak_plus_invertibility(f) == weak_plus_invertibility(soulful) is True
        g = scalar_series(ctx, [1.0, -1.0], exact=True)
        soulful_g = SeriesMatrix.from_coeffs(
            [SuperMatrix.from_scalar(ctx.scalar(b) + random_soul(ctx, rng, scale=0.5)) for b in (1.0, -1.0)],
            exact=True,
        )
        assert weak_plus_invertibility(g) == weak_plus_invertibility(soulful_g) is False
