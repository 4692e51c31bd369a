"""Theta functions, Nevanlinna-Pick, the Schur algorithm, Blaschke and Brune."""
import numpy as np
import pytest

from grasschur import SuperMatrix, adjoint, classify, dagger, invert, kth_root, mat_mul, mul
from grasschur.errors import (
    GrasschurError,
    HNotNegative,
    IsotropyViolated,
    NodeOutsideSuperdisk,
    NotUnimodular,
    RhoNotContractive,
    SteinViolated,
)
from grasschur.oracle import classical_np_solution, classical_pick_matrix, classical_schur
from grasschur.realization import Realization
from grasschur.sampling import random_even_unit, random_soul, random_supermatrix, random_supernumber
from grasschur.schur import (
    BlaschkeFactor,
    InterpolationData,
    ThetaFunction,
    adjoint_state_evaluation,
    blaschke_factor,
    brune_section,
    build_theta,
    geometric_sandwich_sum,
    h_theta_kernel,
    is_schur_grassmann,
    kernel_decomposition_residual,
    kernel_eval,
    kernel_identity_residual,
    kyp_check,
    lft_apply,
    module_interpolate,
    np_interpolation_check,
    np_node_residuals,
    np_solve,
    pick_matrix,
    schur_algorithm,
    schur_section,
    schur_step,
    section_step,
    stein_residual,
    stein_solve,
)
from grasschur.series import SeriesMatrix, evaluate, hermitian_form, star_mul


def scalar_series(ctx, bodies, exact=False):
    return SeriesMatrix(tuple(SuperMatrix.from_body(ctx, [[b]]) for b in bodies), exact=exact)


def series_dist(f, g):
    through = min(f.degree, g.degree)
    return sum((f.coeffs[n] - g.coeffs[n]).norm1() for n in range(through + 1))


def random_stein_data(ctx, rng, q=2, p=2, spectral=0.5, soul_scale=0.15):
    """Stein-consistent (C, A, P, J) with mixed-signature J."""
    a_body = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
    a_body *= spectral / max(abs(np.linalg.eigvals(a_body)).max(), 1e-9)
    a = SuperMatrix.from_body(ctx, a_body) + random_supermatrix(
        ctx, rng, q, q, body=0.0, scale=soul_scale, terms=2, max_grade=2)
    c = random_supermatrix(ctx, rng, p, q, scale=0.5, terms=2, max_grade=2)
    signs = [1.0] * (p // 2 + p % 2) + [-1.0] * (p // 2)
    j = SuperMatrix.from_body(ctx, np.diag(signs))
    pmat = stein_solve(c, a, j)
    return c, a, pmat, j


def make_np_data(ctx, rng, n_nodes, node_radius=0.45, souls=True):
    """Interpolation data sampled from a strictly contractive generator."""
    c0 = ctx.scalar(complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3)))
    c1 = ctx.scalar(complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)))
    if souls:
        c0 = c0 + random_soul(ctx, rng, terms=2, scale=0.1)
        c1 = c1 + random_soul(ctx, rng, terms=2, scale=0.1)
    generator = SeriesMatrix.from_coeffs(
        [SuperMatrix.from_scalar(c0), SuperMatrix.from_scalar(c1)], exact=True)
    nodes, values = [], []
    for k in range(n_nodes):
        angle = 2 * np.pi * (k + rng.uniform(0.1, 0.9)) / n_nodes
        body = rng.uniform(0.2, node_radius) * complex(np.cos(angle), np.sin(angle))
        z = ctx.scalar(body)
        if souls:
            z = z + random_soul(ctx, rng, terms=2, scale=0.05)
        nodes.append(z)
        values.append(evaluate(generator, z)[0, 0])
    return InterpolationData(tuple(nodes), tuple(values))


class TestIsSchurGrassmann:
    def test_constant_half(self, ctx):
        assert is_schur_grassmann(scalar_series(ctx, [0.5] + [0.0] * 4))

    def test_constant_two(self, ctx):
        assert not is_schur_grassmann(scalar_series(ctx, [2.0] + [0.0] * 4))

    def test_soul_perturbation_keeps_verdict(self, ctx, rng):
        coeffs = [
            SuperMatrix.from_scalar(ctx.scalar(0.5) + random_soul(ctx, rng, scale=0.4)),
            SuperMatrix.from_scalar(random_soul(ctx, rng, scale=0.4)),
        ]
        assert is_schur_grassmann(SeriesMatrix.from_coeffs(coeffs, exact=True))

    def test_tight_contraction_with_tail(self, ctx):
        assert is_schur_grassmann(scalar_series(ctx, [0.6, 0.3, 0.05]))
        assert not is_schur_grassmann(scalar_series(ctx, [0.8, 0.7]))


class TestKYP:
    def test_constant_half(self, ctx):
        r = Realization(
            a=SuperMatrix.zeros(ctx, 1, 1), b=SuperMatrix.zeros(ctx, 1, 1),
            c=SuperMatrix.zeros(ctx, 1, 1), d=SuperMatrix.from_body(ctx, [[0.5]]))
        assert kyp_check(r, SuperMatrix.from_body(ctx, [[-1.0]]))

    def test_shift_function(self, ctx):
        # the realization of z: A=0, B=1, C=1, D=0
        one = SuperMatrix.identity(ctx, 1)
        r = Realization(a=SuperMatrix.zeros(ctx, 1, 1), b=one, c=one, d=SuperMatrix.zeros(ctx, 1, 1))
        assert kyp_check(r, SuperMatrix.from_body(ctx, [[-1.0]]))

    def test_expansion_fails(self, ctx):
        r = Realization(
            a=SuperMatrix.zeros(ctx, 1, 1), b=SuperMatrix.zeros(ctx, 1, 1),
            c=SuperMatrix.zeros(ctx, 1, 1), d=SuperMatrix.from_body(ctx, [[2.0]]))
        assert not kyp_check(r, SuperMatrix.from_body(ctx, [[-1.0]]))

    def test_h_validation(self, ctx):
        r = Realization.constant(SuperMatrix.from_body(ctx, [[0.5]]))
        with pytest.raises(HNotNegative):
            kyp_check(r, SuperMatrix.from_body(ctx, [[1.0]]))


class TestStein:
    def test_zero_state(self, ctx, rng):
        c = random_supermatrix(ctx, rng, 2, 2, terms=2)
        a = SuperMatrix.zeros(ctx, 2, 2)
        j = SuperMatrix.identity(ctx, 2)
        p = stein_solve(c, a, j)
        assert (p - mat_mul(adjoint(c), c)).norm1() <= 1e-10 * max(1.0, p.norm1())

    def test_scalar_geometric(self, ctx):
        c = SuperMatrix.from_body(ctx, [[1.0]])
        a = SuperMatrix.from_body(ctx, [[0.5]])
        p = stein_solve(c, a, SuperMatrix.identity(ctx, 1))
        assert p[0, 0].body == pytest.approx(4.0 / 3.0, abs=1e-9)

    def test_two_summation_orders_agree(self, ctx, rng):
        c, a, p, j = random_stein_data(ctx, rng)
        # direct term-by-term summation of sum (A*)^n C*JC A^n
        cjc = mat_mul(adjoint(c), mat_mul(j, c))
        total = cjc
        left = adjoint(a)
        term = cjc
        for _ in range(200):
            term = mat_mul(left, mat_mul(term, a))
            total = total + term
            if term.norm1() < 1e-14:
                break
        assert (p - total).norm1() <= 1e-8 * max(1.0, p.norm1())
        assert stein_residual(p, c, a, j) <= 1e-9 * max(1.0, p.norm1())
        assert (p - adjoint(p)).norm1() <= 1e-10 * max(1.0, p.norm1())


class TestBuildTheta:
    def test_zero_c_gives_identity(self, ctx):
        # C = 0 forces P = A*PA; unimodular a keeps P invertible
        c = SuperMatrix.zeros(ctx, 2, 1)
        a = SuperMatrix.from_body(ctx, [[1j]])
        p = SuperMatrix.identity(ctx, 1)
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        theta = build_theta(c, a, p, j, degree=6, verify_samples=0)
        assert (theta.series.coeffs[0] - SuperMatrix.identity(ctx, 2)).norm1() <= 1e-12
        assert all(co.is_zero() for co in theta.series.coeffs[1:])

    def test_kernel_identity_random_data(self, ctx, rng):
        for _ in range(3):
            c, a, p, j = random_stein_data(ctx, rng)
            theta = build_theta(c, a, p, j, degree=8, rng=rng)
            for _ in range(4):
                z = random_even_unit(ctx, rng, body_modulus=0.4, soul_scale=0.05)
                w = random_even_unit(ctx, rng, body_modulus=0.4, soul_scale=0.05)
                assert kernel_identity_residual(theta, z, w) <= 1e-8 * max(1.0, p.norm1() ** 2)

    def test_stein_violation_rejected(self, ctx, rng):
        c, a, p, j = random_stein_data(ctx, rng)
        bad = p + SuperMatrix.identity(ctx, p.rows)
        with pytest.raises(SteinViolated):
            build_theta(c, a, bad, j)

    def test_series_matches_rational_evaluation(self, ctx, rng):
        c, a, p, j = random_stein_data(ctx, rng)
        theta = build_theta(c, a, p, j, degree=32, verify_samples=0)
        lam = ctx.scalar(0.3 + 0.2j)
        via_series = evaluate(theta.series, lam)
        exact = theta.eval_at(lam)
        assert (via_series - exact).norm1() <= 1e-7 * max(1.0, exact.norm1())


class TestPickMatrix:
    def test_single_node_at_zero(self, ctx, rng):
        s = random_supernumber(ctx, rng, scale=0.3, body=0.25)
        data = InterpolationData((ctx.zero(),), (s,))
        p = pick_matrix(data)
        expected = ctx.one() - mul(s, dagger(s))
        assert (p[0, 0] - expected).norm1() <= 1e-10

    def test_classical_bodies(self, ctx, rng):
        data = make_np_data(ctx, rng, 3, souls=False)
        p = pick_matrix(data)
        classical = classical_pick_matrix(
            [z.body for z in data.nodes], [s.body for s in data.values])
        assert np.allclose(p.body(), classical, atol=1e-9)

    def test_stein_cross_check_with_souls(self, ctx, rng):
        data = make_np_data(ctx, rng, 3, souls=True)
        p = pick_matrix(data)
        res = stein_residual(p, data.output_matrix(), data.state_matrix(), data.signature())
        assert res <= 1e-8 * max(1.0, p.norm1())

    def test_node_outside_superdisk(self, ctx):
        with pytest.raises(NodeOutsideSuperdisk):
            InterpolationData((ctx.scalar(1.0),), (ctx.scalar(0.0),))


class TestNPInterpolationCheck:
    def test_single_node_at_zero(self, ctx, rng):
        s = ctx.scalar(0.3) + random_soul(ctx, rng, scale=0.1)
        data = InterpolationData((ctx.zero(),), (s,))
        theta = build_theta(data.output_matrix(), data.state_matrix(), pick_matrix(data),
                            data.signature(), degree=8, verify_samples=0)
        residuals = np_node_residuals(data, theta)
        assert max(residuals) <= 1e-10

    def test_random_superdisk_data(self, ctx, rng):
        data = make_np_data(ctx, rng, 3, souls=True)
        theta = build_theta(data.output_matrix(), data.state_matrix(), pick_matrix(data),
                            data.signature(), degree=8, verify_samples=0)
        assert np_interpolation_check(data, theta)
        assert max(np_node_residuals(data, theta)) <= 1e-8

    def test_perturbed_value_fails(self, ctx, rng):
        data = make_np_data(ctx, rng, 2, souls=True)
        theta = build_theta(data.output_matrix(), data.state_matrix(), pick_matrix(data),
                            data.signature(), degree=8, verify_samples=0)
        wrong = InterpolationData(data.nodes, (data.values[0] + ctx.scalar(0.25), data.values[1]))
        assert max(np_node_residuals(wrong, theta)) > 1e-4


class TestLFT:
    def test_identity_theta(self, ctx, rng):
        sigma = scalar_series(ctx, [0.4, 0.2, 0.1])
        eye = SeriesMatrix.identity(ctx, 2)
        got = lft_apply(eye, sigma)
        assert series_dist(got, sigma) <= 1e-12

    def test_zero_sigma(self, ctx, rng):
        data = make_np_data(ctx, rng, 2)
        theta = build_theta(data.output_matrix(), data.state_matrix(), pick_matrix(data),
                            data.signature(), degree=10, verify_samples=0)
        zero = SeriesMatrix.zero(ctx, 1, 1)
        got = lft_apply(theta, zero)
        b = theta.series.block(0, 1, 1, 2)
        d = theta.series.block(1, 2, 1, 2)
        from grasschur.series import star_inverse

        assert series_dist(got, star_mul(b, star_inverse(d))) <= 1e-10

    def test_schur_in_schur_out(self, ctx, rng):
        data = make_np_data(ctx, rng, 2)
        theta = build_theta(data.output_matrix(), data.state_matrix(), pick_matrix(data),
                            data.signature(), degree=10, verify_samples=0)
        sigma = scalar_series(ctx, [0.5, 0.2])
        assert is_schur_grassmann(sigma)
        out = lft_apply(theta, sigma)
        assert is_schur_grassmann(out, depth=6)


class TestNPSolve:
    def test_rejects_non_schur_sigma(self, ctx, rng):
        data = make_np_data(ctx, rng, 2)
        with pytest.raises(GrasschurError):
            np_solve(data, scalar_series(ctx, [2.0, 0.0]))

    def test_denominator_singularity_detected(self, ctx):
        from grasschur.errors import DenominatorSingular

        # force d + c*sigma to vanish at order zero: theta = [[1,0],[0,0]]-style block
        bad = SeriesMatrix.from_coeffs([SuperMatrix.from_body(ctx, [[1.0, 0.0], [0.0, 0.0]])], exact=True)
        with pytest.raises(DenominatorSingular):
            lft_apply(bad, SeriesMatrix.zero(ctx, 1, 1))

    def test_central_solution_interpolates(self, ctx, rng):
        data = make_np_data(ctx, rng, 3, souls=True)
        solution = np_solve(data)
        assert max(solution.node_residuals) <= 1e-8
        assert np_interpolation_check(data, solution.theta)

    def test_classical_body_agreement(self, ctx, rng):
        data = make_np_data(ctx, rng, 3, souls=False)
        solution = np_solve(data)
        oracle, _, pick_cl = classical_np_solution(
            [z.body for z in data.nodes], [s.body for s in data.values])
        assert np.allclose(solution.pick.body(), pick_cl, atol=1e-9)
        for lam in (0.1 + 0.2j, -0.25, 0.3j):
            got = evaluate(solution.series, ctx.scalar(lam))[0, 0].body
            assert got == pytest.approx(oracle(lam), abs=1e-9)

    def test_unimodular_constant_sigma(self, ctx, rng):
        data = make_np_data(ctx, rng, 2, souls=True)
        sigma = SeriesMatrix.constant(SuperMatrix.from_body(ctx, [[np.exp(0.7j)]]))
        solution = np_solve(data, sigma)
        assert max(solution.node_residuals) <= 1e-8

    def test_souls_on_sigma(self, ctx, rng):
        data = make_np_data(ctx, rng, 2, souls=True)
        sigma = SeriesMatrix.constant(
            SuperMatrix.from_scalar(ctx.scalar(0.4) + random_soul(ctx, rng, scale=0.2)))
        solution = np_solve(data, sigma)
        assert max(solution.node_residuals) <= 1e-8


class TestSchurStep:
    def test_constant_input_continues_with_zero(self, ctx):
        sigma = scalar_series(ctx, [0.5] + [0.0] * 6)
        rho, nxt, section = schur_step(sigma)
        assert rho.body == pytest.approx(0.5)
        assert all(c.norm1() <= 1e-12 for c in nxt.coeffs)

    def test_body_matches_classical_two_steps(self, ctx):
        sigma = scalar_series(ctx, [0.5, 0.25] + [0.0] * 8)
        rho0, sigma1, _ = schur_step(sigma)
        rho1, _, _ = schur_step(sigma1, 1)
        assert rho0.body == pytest.approx(0.5)
        assert rho1.body == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_boundary_raises(self, ctx):
        sigma = scalar_series(ctx, [1.0, 0.0])
        with pytest.raises(RhoNotContractive):
            schur_step(sigma)

    def test_section_vanishing_identities(self, ctx, rng):
        rho = ctx.scalar(0.4 + 0.2j) + random_soul(ctx, rng, scale=0.1)
        section = schur_section(rho)
        # M(0) has vanishing "determinant" structure: both solve identities at 0
        sigma = SeriesMatrix.constant(SuperMatrix.from_scalar(rho))
        s0 = sigma.coeffs[0][0, 0]
        a0, b0 = section.coeffs[0][0, 0], section.coeffs[0][0, 1]
        c0, d0 = section.coeffs[0][1, 0], section.coeffs[0][1, 1]
        assert (b0 - mul(s0, d0)).norm1() <= 1e-10
        assert (mul(s0, c0) - a0).norm1() <= 1e-10


class TestSectionStep:
    def test_round_trip_through_section(self, ctx, rng):
        sigma = scalar_series(ctx, [0.5, 0.25, 0.1, 0.05, 0.02, 0.0, 0.0, 0.0])
        rho, nxt, section = section_step(sigma)
        recovered = lft_apply(section, nxt)
        assert series_dist(recovered.truncated(4), sigma.truncated(4)) <= 1e-9

    def test_modified_chain_differs_from_classical(self, ctx):
        # the section parametrization rotates the next iterate: constant 1/2
        # maps to constant 1/2 (not 0), and 1/2 + lambda/4 gives rho1 = 5/7
        sigma = scalar_series(ctx, [0.5] + [0.0] * 6)
        _, nxt, _ = section_step(sigma)
        assert nxt.coeffs[0][0, 0].body == pytest.approx(0.5)
        sigma2 = scalar_series(ctx, [0.5, 0.25] + [0.0] * 8)
        _, nxt2, _ = section_step(sigma2)
        assert nxt2.coeffs[0][0, 0].body == pytest.approx(5.0 / 7.0, abs=1e-12)


class TestSchurAlgorithm:
    def test_zero_chain(self, ctx):
        chain = schur_algorithm(scalar_series(ctx, [0.0] * 8), max_steps=4)
        assert chain.steps == 4
        assert all(r.is_zero() for r in chain.rhos)
        assert chain.termination == "max_steps"

    def test_complex_body_matches_oracle(self, ctx, rng):
        for _ in range(5):
            coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
            coeffs *= 0.9 / np.sum(np.abs(coeffs))
            chain = schur_algorithm(scalar_series(ctx, list(coeffs)), max_steps=6)
            expected, boundary = classical_schur(list(coeffs), steps=6)
            assert not boundary and chain.steps == 6
            for got, want in zip(chain.rhos, expected):
                assert abs(got.body - want) <= 1e-9

    def test_soul_perturbation_keeps_body_chain(self, ctx, rng):
        coeffs = rng.normal(size=8) + 1j * rng.normal(size=8)
        coeffs *= 0.8 / np.sum(np.abs(coeffs))
        plain = scalar_series(ctx, list(coeffs))
        soulful = SeriesMatrix.from_coeffs([
            SuperMatrix.from_scalar(ctx.scalar(c) + random_soul(ctx, rng, terms=2, scale=0.1))
            for c in coeffs
        ])
        chain_a = schur_algorithm(plain, max_steps=5)
        chain_b = schur_algorithm(soulful, max_steps=5)
        for ra, rb in zip(chain_a.rhos, chain_b.rhos):
            assert abs(ra.body - rb.body) <= 1e-9

    def test_blaschke_boundary_halt(self, ctx):
        # s(lambda) = lambda: the classical chain hits |rho| = 1 at step 1
        chain = schur_algorithm(scalar_series(ctx, [0.0, 1.0, 0.0, 0.0, 0.0]), max_steps=5)
        assert chain.termination == "rho_boundary"
        assert chain.steps == 1
        _, cl_boundary = classical_schur([0j, 1.0 + 0j, 0j, 0j, 0j], steps=5)
        assert cl_boundary

    def test_rejects_non_schur(self, ctx):
        with pytest.raises(GrasschurError):
            schur_algorithm(scalar_series(ctx, [2.0, 0.0]), max_steps=2)


class TestBlaschke:
    def test_classical_at_origin(self, ctx):
        b = blaschke_factor(ctx.zero(), ctx.one(), ctx.one(), degree=6)
        # b(z) = z exactly
        assert b.series.coeffs[0].norm1() <= 1e-12
        assert (b.series.coeffs[1][0, 0] - ctx.one()).norm1() <= 1e-12
        assert all(c.norm1() <= 1e-12 for c in b.series.coeffs[2:])
        assert b.omega.is_zero()

    def test_classical_complex_body(self, ctx):
        a_val, p_val = 0.5, 1.3
        c_val = np.sqrt(p_val * (1 - a_val**2))
        b = blaschke_factor(ctx.scalar(a_val), ctx.scalar(c_val), ctx.scalar(p_val), degree=12)
        # body is (1-a)(z - a̅)/((1-za)(1-a̅)) — a unimodular multiple of the
        # classical Blaschke factor; check pointwise
        for lam in (0.2, -0.3 + 0.1j, 0.4j):
            got = b.eval_at(ctx.scalar(lam)).body
            expected = (1 - a_val) * (lam - a_val) / ((1 - lam * a_val) * (1 - a_val))
            assert got == pytest.approx(expected, abs=1e-9)

    def test_zero_residual_with_souls(self, ctx, rng):
        for _ in range(10):
            a = ctx.scalar(complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.4, 0.4)))
            a = a + random_soul(ctx, rng, terms=2, scale=0.1)
            p = ctx.scalar(1.0 + rng.random())
            s = random_soul(ctx, rng, terms=2, scale=0.1)
            p = p + s + dagger(s)
            target = p - mul(dagger(a), mul(p, a))
            c = kth_root(target, 2)
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            c = c * phase
            b = blaschke_factor(a, c, p)
            assert (b.eval_at(b.omega)).norm1() <= 1e-8

    def test_factorized_form_matches_series(self, ctx, rng):
        a = ctx.scalar(0.4 + 0.1j) + random_soul(ctx, rng, terms=2, scale=0.1)
        p = ctx.scalar(1.5)
        target = p - mul(dagger(a), mul(p, a))
        c = kth_root(target, 2)
        b = blaschke_factor(a, c, p, degree=12)
        fact = b.factorized_series(degree=12)
        assert series_dist(b.series, fact) <= 1e-8


class TestBrune:
    def make_isotropic(self, ctx):
        return SuperMatrix.column([ctx.one(), ctx.one()])

    def test_zero_c_gives_identity(self, ctx):
        c = SuperMatrix.zeros(ctx, 2, 1)
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        out = brune_section(c, ctx.scalar(1j), ctx.one(), j, degree=5)
        assert (out.coeffs[0] - SuperMatrix.identity(ctx, 2)).norm1() <= 1e-12
        assert all(co.is_zero() for co in out.coeffs[1:])

    def test_closed_form(self, ctx):
        # theta_BP = I - u/2 - sum_{n>=1} z^n a^n u with u = c p^{-1} c* J
        c = self.make_isotropic(ctx)
        a = ctx.scalar(1j)
        p = ctx.scalar(2.0)
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        got = brune_section(c, a, p, j, degree=6)
        u = mat_mul(mat_mul(c, adjoint(c)), j).scale_left(invert(p))
        expected0 = SuperMatrix.identity(ctx, 2) - u * 0.5
        assert (got.coeffs[0] - expected0).norm1() <= 1e-10
        apow = a
        for n in range(1, 7):
            assert (got.coeffs[n] + u.scale_left(apow)).norm1() <= 1e-10
            apow = mul(apow, a)

    def test_scaling_p_consistent(self, ctx):
        c = self.make_isotropic(ctx)
        a = ctx.scalar(-1.0)
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        one = brune_section(c, a, ctx.scalar(1.0), j, degree=4)
        two = brune_section(c, a, ctx.scalar(2.0), j, degree=4)
        # doubling p halves the correction away from the identity
        eye = SuperMatrix.identity(ctx, 2)
        for n in range(5):
            base = one.coeffs[n] - (eye if n == 0 else SuperMatrix.zeros(ctx, 2, 2))
            scaled = two.coeffs[n] - (eye if n == 0 else SuperMatrix.zeros(ctx, 2, 2))
            assert (scaled - base * 0.5).norm1() <= 1e-10

    def test_unimodular_soul_case(self, ctx, rng):
        # a = exp(i theta)(1 + superreal odd soul correction) with a†a = 1:
        # build from a superreal odd v via a = phase*(1+v)/sqrt((1+v)†(1+v)) —
        # here (1+v)†(1+v) = 1 + 2v + v² = 1+2v, and a†a = 1 follows
        v = ctx.generator(1) * 0.3
        base = ctx.one() + v
        norm = kth_root(mul(dagger(base), base), 2)
        phase = np.exp(0.7j)
        a = mul(base, invert(norm)) * phase
        assert (mul(dagger(a), a) - ctx.one()).norm1() <= 1e-10
        p = ctx.scalar(1.5)
        assert (p - mul(dagger(a), mul(p, a))).norm1() <= 1e-9
        c = self.make_isotropic(ctx)
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        out = brune_section(c, a, p, j, degree=4)
        assert out.shape == (2, 2)

    def test_isotropy_violation(self, ctx):
        c = SuperMatrix.column([ctx.one(), ctx.scalar(0.5)])
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        with pytest.raises(IsotropyViolated):
            brune_section(c, ctx.scalar(1j), ctx.one(), j)

    def test_unimodularity_enforced(self, ctx):
        j = SuperMatrix.from_body(ctx, np.diag([1.0, -1.0]))
        with pytest.raises(NotUnimodular):
            brune_section(self.make_isotropic(ctx), ctx.scalar(0.5), ctx.one(), j)


class TestKernels:
    def test_kernel_at_zero(self, ctx, rng):
        xi = random_supermatrix(ctx, rng, 2, 1)
        k = kernel_eval(ctx.zero(), xi, degree=5)
        assert (k.coeffs[0] - xi).norm1() == 0
        assert all(c.is_zero() for c in k.coeffs[1:])

    def test_reproducing_property_polynomial(self, ctx, rng):
        w = ctx.scalar(0.4 + 0.1j) + random_soul(ctx, rng, terms=2, scale=0.1)
        xi = SuperMatrix.column([ctx.one(), ctx.scalar(0.5)])
        f = SeriesMatrix.from_coeffs(
            [random_supermatrix(ctx, rng, 2, 1, terms=2) for _ in range(4)], exact=True)
        k = kernel_eval(w, xi, degree=8)
        form = hermitian_form(f, k)
        expected = mat_mul(adjoint(xi), evaluate(f, w))
        assert (form - expected).norm1() <= 1e-10 * max(1.0, f.norm1())

    def test_decomposition_residual(self, ctx, rng):
        # scalar J = I theta data: Blaschke-style
        a = ctx.scalar(0.4)
        p = ctx.scalar(1.0)
        c_val = kth_root(p - mul(dagger(a), mul(p, a)), 2)
        theta = build_theta(
            SuperMatrix.from_scalar(c_val), SuperMatrix.from_scalar(a),
            SuperMatrix.from_scalar(p), SuperMatrix.identity(ctx, 1),
            degree=16, verify_samples=0)
        w = random_even_unit(ctx, rng, body_modulus=0.3, soul_scale=0.05)
        xi = SuperMatrix.from_scalar(ctx.one())
        assert kernel_decomposition_residual(theta, w, xi, through=6) <= 1e-8


class TestModuleInterpolation:
    def make_data(self, ctx, rng, q=2, p=2):
        a_body = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        a_body *= 0.45 / max(abs(np.linalg.eigvals(a_body)).max(), 1e-9)
        a = SuperMatrix.from_body(ctx, a_body) + random_supermatrix(
            ctx, rng, q, q, body=0.0, scale=0.1, terms=2, max_grade=2)
        c = random_supermatrix(ctx, rng, p, q, scale=0.4, terms=2, max_grade=2)
        return c, a

    def test_minimal_solution_residual(self, ctx, rng):
        c, a = self.make_data(ctx, rng)
        x = random_supermatrix(ctx, rng, 2, 1, terms=2)
        sol = module_interpolate(c, a, x, degree=32)
        got = adjoint_state_evaluation(c, a, sol.series)
        assert (got - x).norm1() <= 1e-8 * max(1.0, x.norm1())

    def test_homogeneous_orthogonality(self, ctx, rng):
        c, a = self.make_data(ctx, rng)
        x = SuperMatrix.zeros(ctx, 2, 1)
        h = SeriesMatrix.from_coeffs(
            [random_supermatrix(ctx, rng, 2, 1, terms=2, scale=0.3) for _ in range(3)], exact=True)
        sol = module_interpolate(c, a, x, h, degree=32)
        # (C* ⋆ G)(A*) = 0 for G in Theta W+
        got = adjoint_state_evaluation(c, a, sol.series)
        assert got.norm1() <= 1e-7 * max(1.0, sol.series.norm1())
        # sampled orthogonality against C(I - zA)^{-star} xi
        for _ in range(4):
            xi = random_supermatrix(ctx, rng, 2, 1, terms=1)
            coeffs = []
            state = xi
            for _ in range(sol.series.degree + 1):
                coeffs.append(mat_mul(c, state))
                state = mat_mul(a, state)
            probe = SeriesMatrix.from_coeffs(coeffs)
            form = hermitian_form(sol.series, probe)
            assert form.norm1() <= 1e-7 * max(1.0, sol.series.norm1())

    def test_classical_body_case(self, ctx, rng):
        c, a = self.make_data(ctx, rng)
        # strip souls: classical Wiener-algebra interpolation on bodies
        c_body = SuperMatrix.from_body(ctx, c.body())
        a_body = SuperMatrix.from_body(ctx, a.body())
        x = SuperMatrix.from_body(ctx, rng.normal(size=(2, 1)) + 1j * rng.normal(size=(2, 1)))
        sol = module_interpolate(c_body, a_body, x, degree=32)
        cb, ab, xb = c_body.body(), a_body.body(), x.body()
        pb = np.zeros((2, 2), dtype=complex)
        for n in range(500):
            pb += np.linalg.matrix_power(ab.conj().T, n) @ cb.conj().T @ cb @ np.linalg.matrix_power(ab, n)
        fmin0 = cb @ np.linalg.solve(pb, xb)
        assert np.allclose(sol.minimal.coeffs[0].body(), fmin0, atol=1e-8)


class TestContractivityForm:
    def test_multiplication_operator_contracts(self, ctx, rng):
        # [M_S F, M_S F] ⪯ [F, F] for Schur S, sampled
        data = make_np_data(ctx, rng, 2, souls=True)
        solution = np_solve(data)
        s = solution.series
        f = SeriesMatrix.from_coeffs(
            [SuperMatrix.from_scalar(random_supernumber(ctx, rng, terms=2, scale=0.4))
             for _ in range(6)], exact=True)
        msf = star_mul(s, f)
        from grasschur.matrix import is_supernonnegative

        diff = hermitian_form(f, f) - hermitian_form(msf.truncated(s.degree), msf.truncated(s.degree))
        assert is_supernonnegative(SuperMatrix.from_scalar(diff[0, 0]))
