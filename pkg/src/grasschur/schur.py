"""Schur-Grassmann functions, theta functions, Nevanlinna-Pick interpolation,
the Schur algorithm, and Blaschke/Brune factors.

The organizing object is

    Theta(z) = I - (1-z) C ⋆ (I - zA)^{-star} P^{-1} (I-A)^{-*} C* J

for Stein-consistent data P - A*PA = C*JC; its kernel identity

    sum_n z^n (J - Theta(z) J Theta(w)*) (w†)^n
        = C ⋆ (I-zA)^{-star} P^{-1} [(I-wA)*]^{-star_r} ⋆_r C*

holds iff the Stein identity does, and everything else (interpolation,
the algorithm's elementary sections, Blaschke factors) specializes it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraContext, Supernumber, classify, dagger, invert, mul
from .errors import (
    DenominatorSingular,
    GrasschurError,
    HNotNegative,
    ISubASingular,
    NodeOutsideSuperdisk,
    NotConvergent,
    RhoNotContractive,
    ShapeMismatch,
    SteinViolated,
    StepSingular,
)
from .matrix import SuperMatrix, adjoint, is_supernonnegative, is_superpositive, mat_invert, mat_mul
from .realization import Realization, _check_signature
from .series import SeriesMatrix, backward_shift, evaluate, star_inverse, star_mul

_SELFADJOINT_TOL = 1e-12


# ---------------------------------------------------------------------------
# convergent geometric sums
# ---------------------------------------------------------------------------


def geometric_sandwich_sum(x: Supernumber, u, y: Supernumber, *, tol: float | None = None,
                           max_terms: int = 5000):
    """sum_n x^n u y^n for a supernumber or supermatrix middle factor.

    Converges when |x_B||y_B| < 1 (soul corrections are polynomial-in-n times
    geometric); iteration stops once several consecutive terms fall below the
    tolerance envelope.
    """
    context = x.context
    tol = context.tol_eq * 1e-2 if tol is None else tol
    ratio = abs(x.body) * abs(y.body)
    if ratio >= 1.0:
        raise NotConvergent(f"|x_B||y_B| = {ratio:.6f} >= 1")
    stop = tol * (1.0 - ratio)
    term = u
    total = u
    quiet = 0
    for _ in range(max_terms):
        if isinstance(term, SuperMatrix):
            term = term.scale_left(x).scale_right(y)
        else:
            term = mul(mul(x, term), y)
        total = total + term
        if term.norm1() <= stop:
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NotConvergent(f"geometric sum did not settle in {max_terms} terms")


# ---------------------------------------------------------------------------
# Schur-Grassmann membership
# ---------------------------------------------------------------------------


def lower_toeplitz_block(s: SeriesMatrix, depth: int) -> SuperMatrix:
    """L_N: block lower-triangular Toeplitz of the first depth+1 coefficients."""
    context = s.context
    p, q = s.shape
    zero = SuperMatrix.zeros(context, p, q)
    rows = []
    for i in range(depth + 1):
        rows.append([s.coefficient(i - j) if i >= j else zero for j in range(depth + 1)])
    return SuperMatrix.block(rows)


def is_schur_grassmann(s: SeriesMatrix, depth: int | None = None) -> bool:
    """Contractivity test: I - L_N* L_N supernonnegative for all N <= depth.

    The verdict depends only on the body (body Schur <=> Schur-Grassmann);
    self-adjointness of I - L_N*L_N over the algebra is asserted alongside.
    """
    depth = min(s.degree, 8) if depth is None else min(depth, s.degree)
    for n in range(depth + 1):
        l = lower_toeplitz_block(s, n)
        gram = SuperMatrix.identity(s.context, l.cols) - mat_mul(adjoint(l), l)
        if not is_supernonnegative(gram):
            return False
    return True


def kyp_check(r: Realization, h: SuperMatrix) -> bool:
    """Dissipation inequality for an origin-centered realization.

    H must be self-adjoint with -H superpositive; the test is
    diag(-H, I) - M* diag(-H, I) M ⪰ 0 for M = [[A,B],[C,D]]
    (matrix ordering taken form-wise, i.e. is_supernonnegative).
    """
    if (h - adjoint(h)).norm1() > _SELFADJOINT_TOL * max(1.0, h.norm1()):
        raise HNotNegative("H is not self-adjoint")
    if not is_superpositive(-h):
        raise HNotNegative("-H is not superpositive")
    if h.rows != r.state_dim:
        raise ShapeMismatch("H must match the state dimension")
    context = r.context
    p, q = r.shape
    m = SuperMatrix.block([[r.a, r.b], [r.c, r.d]])
    zero_nq = SuperMatrix.zeros(context, r.state_dim, q)
    weight = SuperMatrix.block([
        [-h, zero_nq],
        [SuperMatrix.zeros(context, q, r.state_dim), SuperMatrix.identity(context, q)],
    ])
    diff = weight - mat_mul(adjoint(m), mat_mul(weight, m))
    return bool(is_supernonnegative(diff))


# ---------------------------------------------------------------------------
# Stein equation and Theta
# ---------------------------------------------------------------------------


def stein_solve(c: SuperMatrix, a: SuperMatrix, j: SuperMatrix, *, max_iterations: int = 5000) -> SuperMatrix:
    """Fixed point of P = C*JC + A*PA (needs body spectral radius of A below 1).

    The returned P is self-adjoint with Stein residual below tol_eq.
    """
    context = a.context
    radius = float(np.abs(np.linalg.eigvals(a.body())).max()) if a.rows else 0.0
    if radius >= 1.0 - context.tol_body:
        raise NotConvergent(f"body spectral radius {radius:.6f} not below 1")
    cjc = mat_mul(adjoint(c), mat_mul(j, c))
    p = cjc
    # iterate well below tol_eq: downstream identities divide by P
    tol = 2.5e-4 * context.tol_eq * max(1.0, cjc.norm1())
    for _ in range(max_iterations):
        p_next = cjc + mat_mul(adjoint(a), mat_mul(p, a))
        if (p_next - p).norm1() <= tol:
            return p_next
        p = p_next
    raise NotConvergent("Stein fixed point did not converge")


def stein_residual(p: SuperMatrix, c: SuperMatrix, a: SuperMatrix, j: SuperMatrix) -> float:
    return (p - mat_mul(adjoint(a), mat_mul(p, a)) - mat_mul(adjoint(c), mat_mul(j, c))).norm1()


@dataclass(frozen=True)
class ThetaFunction:
    """Theta series plus its generating data (C, A, P, J)."""

    series: SeriesMatrix
    c: SuperMatrix
    a: SuperMatrix
    p: SuperMatrix
    j: SuperMatrix

    @property
    def context(self) -> AlgebraContext:
        return self.series.context

    def normalization(self) -> SuperMatrix:
        """K = P^{-1} (I-A)^{-*} C* J (the constant right factor of Theta)."""
        context = self.context
        eye = SuperMatrix.identity(context, self.a.rows)
        return mat_mul(
            mat_invert(self.p),
            mat_mul(mat_invert(adjoint(eye - self.a)), mat_mul(adjoint(self.c), self.j)),
        )

    def eval_at(self, z: Supernumber) -> SuperMatrix:
        """Exact rational value at a central (even) argument."""
        if not classify(z).is_even:
            raise ValueError("theta evaluation needs a central (even) argument")
        context = self.context
        eye_q = SuperMatrix.identity(context, self.a.rows)
        eye_p = SuperMatrix.identity(context, self.series.shape[0])
        core = mat_mul(self.c, mat_mul(mat_invert(eye_q - self.a.scale_left(z)), self.normalization()))
        one_minus_z = context.one() - z
        return eye_p - core.scale_left(one_minus_z)


def build_theta(
    c: SuperMatrix,
    a: SuperMatrix,
    p: SuperMatrix,
    j: SuperMatrix,
    degree: int | None = None,
    *,
    verify_samples: int = 8,
    rng=None,
) -> ThetaFunction:
    """Assemble Theta from Stein-consistent (C, A, P, J) and verify the kernel identity.

    Coefficients: Theta_0 = I - CK and Theta_n = C A^{n-1} (I-A) K, with
    K = P^{-1}(I-A)^{-*}C*J.  The kernel identity is sampled at even-soul
    (z, w) pairs where the doubly-indexed sum collapses to an exact rational
    expression.
    """
    context = c.context
    _check_signature(j)
    if (p - adjoint(p)).norm1() > _SELFADJOINT_TOL * max(1.0, p.norm1()):
        raise SteinViolated("P is not self-adjoint")
    eye_q = SuperMatrix.identity(context, a.rows)
    body = (eye_q - a).body()
    svals = np.linalg.svd(body, compute_uv=False)
    if svals[-1] <= context.tol_body * max(1.0, svals[0]):
        raise ISubASingular("(I - A) has a singular body")
    residual = stein_residual(p, c, a, j)
    if residual > context.tol_eq * max(1.0, p.norm1()):
        raise SteinViolated(f"Stein residual {residual:.3e}")
    theta = ThetaFunction(series=_theta_series(c, a, p, j, degree), c=c, a=a, p=p, j=j)
    if verify_samples:
        _verify_kernel_identity(theta, verify_samples, rng)
    return theta


def _theta_series(c, a, p, j, degree):
    context = c.context
    degree = context.max_series_degree if degree is None else degree
    eye_q = SuperMatrix.identity(context, a.rows)
    k = mat_mul(mat_invert(p), mat_mul(mat_invert(adjoint(eye_q - a)), mat_mul(adjoint(c), j)))
    eye_p = SuperMatrix.identity(context, c.rows)
    coeffs = [eye_p - mat_mul(c, k)]
    step = mat_mul(eye_q - a, k)
    power = step  # A^{n-1} (I-A) K, accumulated
    for n in range(1, degree + 1):
        coeffs.append(mat_mul(c, power))
        power = mat_mul(a, power)
    return SeriesMatrix(tuple(coeffs), exact=False)


def theta_realization(theta: ThetaFunction) -> Realization:
    """State-space form of Theta: (A, (I-A)K, C, I - CK) with K the normalization.

    Matches the series coefficient by coefficient: Theta_n = C A^{n-1} (I-A) K.
    """
    context = theta.context
    k = theta.normalization()
    eye_q = SuperMatrix.identity(context, theta.a.rows)
    eye_p = SuperMatrix.identity(context, theta.series.shape[0])
    return Realization(
        a=theta.a,
        b=mat_mul(eye_q - theta.a, k),
        c=theta.c,
        d=eye_p - mat_mul(theta.c, k),
    )


def kernel_identity_residual(theta: ThetaFunction, z: Supernumber, w: Supernumber) -> float:
    """Residual of the theta kernel identity at an even-soul sample pair."""
    context = theta.context
    eye_q = SuperMatrix.identity(context, theta.a.rows)
    tz = theta.eval_at(z)
    tw = theta.eval_at(w)
    x = theta.j - mat_mul(tz, mat_mul(theta.j, adjoint(tw)))
    lhs = x.scale_left(invert(context.one() - mul(z, dagger(w))))
    rz = mat_invert(eye_q - theta.a.scale_left(z))
    rw = mat_invert(adjoint(eye_q - theta.a.scale_left(w)))
    rhs = mat_mul(theta.c, mat_mul(rz, mat_mul(mat_invert(theta.p), mat_mul(rw, adjoint(theta.c)))))
    return (lhs - rhs).norm1()


def _verify_kernel_identity(theta: ThetaFunction, samples: int, rng) -> None:
    from .sampling import random_even_unit

    context = theta.context
    rng = np.random.default_rng(0) if rng is None else rng
    spectral = float(np.abs(np.linalg.eigvals(theta.a.body())).max()) if theta.a.rows else 0.0
    radius = 0.5 * min(1.0, 1.0 / max(spectral, 0.5))
    for _ in range(samples):
        z = random_even_unit(context, rng, body_modulus=radius * rng.uniform(0.3, 1.0), soul_scale=0.05)
        w = random_even_unit(context, rng, body_modulus=radius * rng.uniform(0.3, 1.0), soul_scale=0.05)
        residual = kernel_identity_residual(theta, z, w)
        scale = max(1.0, theta.p.norm1() ** 2)
        if residual > context.tol_eq * scale:
            raise SteinViolated(f"kernel identity residual {residual:.3e} at sampled pair")


# ---------------------------------------------------------------------------
# Nevanlinna-Pick interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterpolationData:
    """Nodes in the open unit superdisk and target values."""

    nodes: tuple[Supernumber, ...]
    values: tuple[Supernumber, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.nodes) != len(self.values) or not self.nodes:
            raise ValueError("need equally many nodes and values, at least one")
        context = self.nodes[0].context
        for z in self.nodes:
            if abs(z.body) >= 1.0 - context.tol_body:
                raise NodeOutsideSuperdisk(f"|z_B| = {abs(z.body):.6f}")

    @property
    def context(self) -> AlgebraContext:
        return self.nodes[0].context

    @property
    def size(self) -> int:
        return len(self.nodes)

    def state_matrix(self) -> SuperMatrix:
        """A = diag(z_k†)."""
        return SuperMatrix.diagonal([dagger(z) for z in self.nodes])

    def output_matrix(self) -> SuperMatrix:
        """C with first row all ones and second row s_k†."""
        context = self.context
        return SuperMatrix.from_rows([
            [context.one() for _ in self.nodes],
            [dagger(s) for s in self.values],
        ])

    def signature(self) -> SuperMatrix:
        return SuperMatrix.from_body(self.context, np.diag([1.0, -1.0]))


def pick_matrix(data: InterpolationData) -> SuperMatrix:
    """P_jk = sum_n z_j^n (1 - s_j s_k†) (z_k†)^n, cross-checked against Stein.

    The direct series and the Stein fixed point are two independent routes to
    the same matrix; disagreement raises SteinViolated.
    """
    context = data.context
    n = data.size
    entries = []
    for jj in range(n):
        row = []
        for kk in range(n):
            u = context.one() - mul(data.values[jj], dagger(data.values[kk]))
            row.append(geometric_sandwich_sum(data.nodes[jj], u, dagger(data.nodes[kk])))
        entries.append(row)
    direct = SuperMatrix.from_rows(entries)
    via_stein = stein_solve(data.output_matrix(), data.state_matrix(), data.signature())
    gap = (direct - via_stein).norm1()
    if gap > context.tol_eq * max(1.0, direct.norm1()):
        raise SteinViolated(f"pick matrix routes disagree by {gap:.3e}")
    return direct


def np_node_residuals(data: InterpolationData, theta: ThetaFunction) -> list[float]:
    """Residual norms of (1, -s_k) ⋆ Theta(z) at z = z_k, one per node.

    Evaluated through convergent row sums (the k-th Pick row), so the check is
    truncation-free.
    """
    context = data.context
    k = theta.normalization()
    residuals = []
    for idx in range(data.size):
        z = data.nodes[idx]
        s = data.values[idx]
        row_entries = []
        for m in range(data.size):
            u = context.one() - mul(s, dagger(data.values[m]))
            row_entries.append(geometric_sandwich_sum(z, u, dagger(data.nodes[m])))
        row = SuperMatrix.row(row_entries)
        target = SuperMatrix.row([context.one(), -s])
        value = target - mat_mul(row, k).scale_left(context.one() - z)
        residuals.append(value.norm1())
    return residuals


def np_interpolation_check(data: InterpolationData, theta: ThetaFunction) -> bool:
    tol = data.context.tol_eq * max(1.0, theta.p.norm1())
    return all(r <= tol for r in np_node_residuals(data, theta))


def lft_apply(theta, sigma: SeriesMatrix) -> SeriesMatrix:
    """Linear fractional map (a⋆sigma + b) ⋆ (c⋆sigma + d)^{-star}.

    ``theta`` is a ThetaFunction or a square SeriesMatrix whose blocks are
    split by sigma's shape.
    """
    block = theta.series if isinstance(theta, ThetaFunction) else theta
    p, q = sigma.shape
    if block.shape != (p + q, p + q):
        raise ShapeMismatch(f"theta {block.shape} incompatible with sigma {sigma.shape}")
    a = block.block(0, p, 0, p)
    b = block.block(0, p, p, p + q)
    c = block.block(p, p + q, 0, p)
    d = block.block(p, p + q, p, p + q)
    numerator = star_mul(a, sigma) + b
    denominator = star_mul(c, sigma) + d
    body = denominator.coeffs[0].body()
    svals = np.linalg.svd(body, compute_uv=False)
    if svals[-1] <= sigma.context.tol_body * max(1.0, svals[0]):
        raise DenominatorSingular("c ⋆ sigma + d has a singular constant-term body")
    return star_mul(numerator, star_inverse(denominator))


@dataclass(frozen=True)
class NPSolution:
    """Interpolant plus the objects used to build and check it."""

    series: SeriesMatrix
    theta: ThetaFunction
    pick: SuperMatrix
    node_residuals: tuple[float, ...]


def np_solve(data: InterpolationData, sigma: SeriesMatrix | None = None, degree: int | None = None,
             *, rng=None) -> NPSolution:
    """Solve the Nevanlinna-Pick problem: S = T_Theta(sigma) with Schur sigma.

    sigma defaults to 0 (the central solution).  Node residuals are reported,
    not asserted: they carry the series truncation tail |z_B|^degree.
    """
    context = data.context
    if sigma is None:
        sigma = SeriesMatrix.zero(context, 1, 1)
    if not is_schur_grassmann(sigma):
        raise GrasschurError("sigma is not a Schur-Grassmann function")
    p = pick_matrix(data)
    if not is_superpositive(p):
        raise SteinViolated("Pick matrix is not superpositive")
    theta = build_theta(data.output_matrix(), data.state_matrix(), p, data.signature(),
                        degree, rng=rng)
    series = lft_apply(theta, sigma)
    residuals = tuple(
        (evaluate(series, z) - SuperMatrix.from_scalar(s)).norm1()
        for z, s in zip(data.nodes, data.values)
    )
    return NPSolution(series=series, theta=theta, pick=p, node_residuals=residuals)


# ---------------------------------------------------------------------------
# The Schur algorithm
# ---------------------------------------------------------------------------


def schur_section(rho: Supernumber) -> SeriesMatrix:
    """The degree-one elementary section M(z) = I - (1-z) col(1,rho†) g row(1,-rho).

    g = (1 - rho rho†)^{-1}.  M(0) is singular by construction; both
    b - sigma⋆d and sigma⋆c - a vanish at z = 0 whenever rho = sigma(0).
    """
    context = rho.context
    one = context.one()
    g = invert(one - mul(rho, dagger(rho)))
    rho_dag = dagger(rho)
    a0, a1 = one - g, g
    b0, b1 = mul(g, rho), -mul(g, rho)
    c0, c1 = -mul(rho_dag, g), mul(rho_dag, g)
    d0, d1 = one + mul(rho_dag, mul(g, rho)), -mul(rho_dag, mul(g, rho))
    constant = SuperMatrix.from_rows([[a0, b0], [c0, d0]])
    linear = SuperMatrix.from_rows([[a1, b1], [c1, d1]])
    return SeriesMatrix((constant, linear), exact=True)


def _extract_rho(sigma: SeriesMatrix, step: int) -> Supernumber:
    if sigma.shape != (1, 1):
        raise ShapeMismatch("the Schur algorithm is scalar-valued")
    rho = sigma.coeffs[0][0, 0]
    if abs(rho.body) >= 1.0 - sigma.context.tol_body:
        raise RhoNotContractive(step, f"|rho_B| = {abs(rho.body):.6f} at step {step}")
    return rho


def _verify_section_vanishing(sigma: SeriesMatrix, section: SeriesMatrix, step: int) -> None:
    # constant terms of b - sigma⋆d and sigma⋆c - a must vanish
    context = sigma.context
    s0 = sigma.coeffs[0][0, 0]
    a0, b0 = section.coeffs[0][0, 0], section.coeffs[0][0, 1]
    c0, d0 = section.coeffs[0][1, 0], section.coeffs[0][1, 1]
    n0 = b0 - mul(s0, d0)
    m0 = mul(s0, c0) - a0
    scale = max(1.0, sigma.norm1())
    if n0.norm1() > context.tol_eq * scale or m0.norm1() > context.tol_eq * scale:
        raise GrasschurError(f"section identities fail to vanish at step {step}")


def schur_step(sigma: SeriesMatrix, step: int = 0) -> tuple[Supernumber, SeriesMatrix, SeriesMatrix]:
    """One coefficient-preserving step: rho = sigma(0) and

        sigma_next = R0(sigma - rho) ⋆ (1 - rho† ⋆ sigma)^{-star}.

    The body recursion is exactly the classical one, so body chains match the
    classical Schur coefficients.  The elementary section M(z) built from rho
    is returned alongside (its vanish-at-zero identities are checked); the
    paper-style section solve lives in section_step.  One truncation degree is
    consumed per step.
    """
    rho = _extract_rho(sigma, step)
    section = schur_section(rho)
    _verify_section_vanishing(sigma, section, step)
    context = sigma.context
    numerator = backward_shift(sigma - SeriesMatrix.scalar_constant(rho))
    denominator = SeriesMatrix.identity(context, 1) - sigma.scale_left(dagger(rho))
    sigma_next = star_mul(numerator, star_inverse(denominator))
    return rho, sigma_next, section


def section_step(sigma: SeriesMatrix, step: int = 0) -> tuple[Supernumber, SeriesMatrix, SeriesMatrix]:
    """The section solve: sigma = T_{M}(sigma_next) inverted by clearing
    denominators and shifting out the common zero at z = 0.

    With N = b - sigma⋆d and M = sigma⋆c - a (both vanish at 0),
    sigma_next = (R0 M)^{-star} ⋆ (R0 N).  M(0) itself is singular, which is
    why the shift, not a naive inversion of M, restores invertibility.
    Note: this parametrization does not preserve classical Schur coefficients
    (the chain of rho's differs from schur_step's by constant J-unitary
    rotations).
    """
    rho = _extract_rho(sigma, step)
    section = schur_section(rho)
    _verify_section_vanishing(sigma, section, step)
    b = section.block(0, 1, 1, 2)
    a = section.block(0, 1, 0, 1)
    c = section.block(1, 2, 0, 1)
    d = section.block(1, 2, 1, 2)
    n = b - star_mul(sigma, d)
    m = star_mul(sigma, c) - a
    n_shift = backward_shift(n)
    m_shift = backward_shift(m)
    pivot = m_shift.coeffs[0][0, 0]
    if abs(pivot.body) <= sigma.context.tol_body:
        raise StepSingular(step)
    return rho, star_mul(star_inverse(m_shift), n_shift), section


@dataclass(frozen=True)
class SchurChain:
    """Recorded Schur coefficients, their sections, and why the run stopped."""

    rhos: tuple[Supernumber, ...]
    sections: tuple[SeriesMatrix, ...]
    termination: str  # max_steps | rho_boundary | step_singular | degree_exhausted

    @property
    def steps(self) -> int:
        return len(self.rhos)


def schur_algorithm(s: SeriesMatrix, max_steps: int, *, use_section_solve: bool = False) -> SchurChain:
    """Iterate the Schur step, recording coefficients and sections.

    Stops at max_steps, at the contractivity boundary |rho_B| = 1, when the
    section solve hits a singular shifted denominator, or when the series
    truncation degree is exhausted (one degree is consumed per step).
    """
    if not is_schur_grassmann(s):
        raise GrasschurError("input is not a Schur-Grassmann function")
    step_fn = section_step if use_section_solve else schur_step
    sigma = s
    rhos: list[Supernumber] = []
    sections: list[SeriesMatrix] = []
    termination = "max_steps"
    for step in range(max_steps):
        if sigma.degree < 1:
            termination = "degree_exhausted"
            break
        try:
            rho, sigma, section = step_fn(sigma, step)
        except RhoNotContractive:
            termination = "rho_boundary"
            break
        except StepSingular:
            termination = "step_singular"
            break
        rhos.append(rho)
        sections.append(section)
    return SchurChain(rhos=tuple(rhos), sections=tuple(sections), termination=termination)


# ---------------------------------------------------------------------------
# Blaschke factors and Brune sections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlaschkeFactor:
    """Scalar theta specialization b_a = Theta (p = q = 1, J = 1).

    Vanishes at omega = c^{-†} a† c†.
    """

    a: Supernumber
    c: Supernumber
    p: Supernumber
    omega: Supernumber
    series: SeriesMatrix

    @property
    def context(self) -> AlgebraContext:
        return self.a.context

    def _tail_factor(self) -> Supernumber:
        one = self.context.one()
        return mul(invert(self.p), mul(invert(dagger(one - self.a)), dagger(self.c)))

    def eval_at(self, z: Supernumber) -> Supernumber:
        """Convergent evaluation (needs |z_B||a_B| < 1): 1 - (1-z) sum z^n c a^n k."""
        context = self.context
        k = self._tail_factor()
        # terms t_n = z^n (c a^n k): iterate both powers explicitly
        tol = context.tol_eq * 1e-3
        ratio = abs(z.body) * abs(self.a.body)
        if ratio >= 1.0:
            raise NotConvergent(f"|z_B||a_B| = {ratio:.6f} >= 1")
        stop = tol * (1.0 - ratio)
        zpow = context.one()
        apow = context.one()
        total = mul(self.c, k)
        quiet = 0
        for _ in range(5000):
            zpow = mul(zpow, z)
            apow = mul(apow, self.a)
            term = mul(zpow, mul(self.c, mul(apow, k)))
            total = total + term
            if term.norm1() <= stop:
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
        else:
            raise NotConvergent("Blaschke evaluation did not settle")
        one = context.one()
        return one - total + mul(z, total)

    def zero_residual(self) -> float:
        """|b_a(omega)| as a 1-norm; the defining vanishing property."""
        return self.eval_at(self.omega).norm1()

    def factorized_series(self, degree: int | None = None) -> SeriesMatrix:
        """The explicit factorization through (z - omega) as a series.

        b_a(z) = (z-omega) [1 + (omega-1) c^{-†} p c^{-1} omega†]
                 ⋆ (1 - z omega†)^{-star} c p^{-1} (1-a)^{-†} c†.
        """
        context = self.context
        degree = context.max_series_degree if degree is None else degree
        one = context.one()
        c_inv_dag = invert(dagger(self.c))
        c_inv = invert(self.c)
        u = one + mul(self.omega - one, mul(c_inv_dag, mul(self.p, mul(c_inv, dagger(self.omega)))))
        v = mul(self.c, self._tail_factor())
        omega_dag = dagger(self.omega)
        w = []
        opow = context.one()
        for n in range(degree + 2):
            w.append(mul(u, mul(opow, v)))
            opow = mul(opow, omega_dag)
        coeffs = [SuperMatrix.from_scalar(-mul(self.omega, w[0]))]
        for n in range(1, degree + 1):
            coeffs.append(SuperMatrix.from_scalar(w[n - 1] - mul(self.omega, w[n])))
        return SeriesMatrix(tuple(coeffs), exact=False)


def blaschke_factor(a: Supernumber, c: Supernumber, p: Supernumber,
                    degree: int | None = None) -> BlaschkeFactor:
    """Blaschke factor from constraint-satisfying data p - a†pa = c†c.

    p must be superreal and invertible, (1-a) body-invertible; the constraint
    residual is checked at tol_eq scale.
    """
    from .errors import ConstraintViolated

    context = a.context
    if not classify(p).is_real or abs(p.body) <= context.tol_body:
        raise ConstraintViolated("p must be superreal and invertible")
    constraint = p - mul(dagger(a), mul(p, a)) - mul(dagger(c), c)
    if constraint.norm1() > context.tol_eq * max(1.0, p.norm1()):
        raise ConstraintViolated(f"p - a†pa - c†c has norm {constraint.norm1():.3e}")
    if abs(1.0 - a.body) <= context.tol_body:
        raise ConstraintViolated("(1 - a) must have a nonzero body")
    if abs(c.body) <= context.tol_body:
        raise ConstraintViolated("c must have a nonzero body for the zero formula")
    theta = build_theta(
        SuperMatrix.from_scalar(c),
        SuperMatrix.from_scalar(a),
        SuperMatrix.from_scalar(p),
        SuperMatrix.from_body(context, [[1.0]]),
        degree,
        verify_samples=0,
    )
    omega = mul(invert(dagger(c)), mul(dagger(a), dagger(c)))
    return BlaschkeFactor(a=a, c=c, p=p, omega=omega, series=theta.series)


def brune_section(c: SuperMatrix, a: Supernumber, p: Supernumber, j: SuperMatrix,
                  degree: int | None = None) -> SeriesMatrix:
    """Degenerate (isotropic) section Theta_BP(z) = Theta(z) M^{-1}.

    Requires c*Jc = 0, a unimodular (a†a = 1, which also makes p even and
    commuting with a), p superreal even invertible, and a body different
    from 1 so that M = I - ½ c (1+a)† p^{-1} (1-a)^{-†} c* J exists.
    """
    from .errors import ConstraintViolated, IsotropyViolated, NotUnimodular

    context = a.context
    one = context.one()
    if c.cols != 1:
        raise ShapeMismatch("c must be a column")
    iso = mat_mul(adjoint(c), mat_mul(j, c))[0, 0]
    if iso.norm1() > context.tol_eq * max(1.0, c.norm1() ** 2):
        raise IsotropyViolated(f"c*Jc has norm {iso.norm1():.3e}")
    unim = mul(dagger(a), a) - one
    if unim.norm1() > context.tol_eq:
        raise NotUnimodular(f"a†a - 1 has norm {unim.norm1():.3e}")
    cp = classify(p)
    if not cp.is_real or not cp.is_even or abs(p.body) <= context.tol_body:
        raise ConstraintViolated("p must be superreal, even and invertible")
    if abs(1.0 - a.body) <= context.tol_body:
        raise ConstraintViolated("(1 - a) must have a nonzero body")
    theta = build_theta(
        c,
        SuperMatrix.from_scalar(a),
        SuperMatrix.from_scalar(p),
        j,
        degree,
        verify_samples=0,
    )
    chain = mul(dagger(one + a), mul(invert(p), invert(dagger(one - a))))
    m = SuperMatrix.identity(context, c.rows) - mat_mul(
        mat_mul(c.scale_right(chain), adjoint(c)), j) * 0.5
    m_inv = mat_invert(m)
    coeffs = tuple(mat_mul(coeff, m_inv) for coeff in theta.series.coeffs)
    return SeriesMatrix(coeffs, exact=False)


# ---------------------------------------------------------------------------
# Reproducing kernels and module interpolation
# ---------------------------------------------------------------------------


def kernel_eval(w: Supernumber, xi: SuperMatrix, degree: int | None = None) -> SeriesMatrix:
    """K(., w) xi = sum_n z^n (w†)^n xi as a column series."""
    if xi.cols != 1:
        raise ShapeMismatch("xi must be a column")
    context = w.context
    if abs(w.body) >= 1.0:
        raise NotConvergent(f"|w_B| = {abs(w.body):.6f} >= 1")
    degree = context.max_series_degree if degree is None else degree
    wd = dagger(w)
    coeffs = []
    power = context.one()
    for n in range(degree + 1):
        coeffs.append(xi.scale_left(power))
        power = mul(power, wd)
    return SeriesMatrix(tuple(coeffs), exact=False)


def h_theta_kernel(theta: ThetaFunction, w: Supernumber, xi: SuperMatrix,
                   degree: int | None = None) -> SeriesMatrix:
    """K_{H(Theta)}(., w) xi via the resolvent form of the kernel identity.

    Coefficient n is C A^n P^{-1} V with V = sum_m (A*)^m C* (w†)^m xi.
    """
    context = theta.context
    degree = context.max_series_degree if degree is None else degree
    cstar = adjoint(theta.c)
    astar = adjoint(theta.a)
    wd = dagger(w)
    ratio = abs(w.body) * float(np.abs(np.linalg.eigvals(theta.a.body())).max())
    if ratio >= 1.0:
        raise NotConvergent("the kernel sum needs |w_B| rho(A_B) < 1")
    stop = context.tol_eq * 1e-3 * (1.0 - ratio)
    v = mat_mul(cstar, xi)
    term = v
    astar_pow = astar
    wd_pow = wd
    quiet = 0
    for _ in range(5000):
        term = mat_mul(astar_pow, mat_mul(cstar, xi.scale_left(wd_pow)))
        v = v + term
        astar_pow = mat_mul(astar_pow, astar)
        wd_pow = mul(wd_pow, wd)
        if term.norm1() <= stop:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NotConvergent("kernel sum did not settle")
    pinv_v = mat_mul(mat_invert(theta.p), v)
    coeffs = []
    state = pinv_v
    for n in range(degree + 1):
        coeffs.append(mat_mul(theta.c, state))
        state = mat_mul(theta.a, state)
    return SeriesMatrix(tuple(coeffs), exact=False)


def kernel_decomposition_residual(theta: ThetaFunction, w: Supernumber, xi: SuperMatrix,
                                  through: int = 8) -> float:
    """Coefficientwise residual of K = Theta Theta*-part + K_{H(Theta)} (J = I).

    ``w`` must be even so Theta(w) is exact.
    """
    context = theta.context
    tw_star = adjoint(theta.eval_at(w))
    wd = dagger(w)
    k_full = kernel_eval(w, xi, degree=through)
    k_heta = h_theta_kernel(theta, w, xi, degree=through)
    powers = [context.one()]
    for _ in range(through):
        powers.append(mul(powers[-1], wd))
    worst = 0.0
    for m in range(through + 1):
        middle = None
        for n in range(m + 1):
            part = mat_mul(theta.series.coeffs[m - n], mat_mul(tw_star, xi.scale_left(powers[n])))
            middle = part if middle is None else middle + part
        diff = k_full.coeffs[m] - middle - k_heta.coeffs[m]
        worst = max(worst, diff.norm1())
    return worst


@dataclass(frozen=True)
class ModuleInterpolation:
    """Solution F = F_min + Theta ⋆ h of (C* ⋆ F)(A*) = X."""

    series: SeriesMatrix
    minimal: SeriesMatrix
    theta: ThetaFunction


def module_interpolate(c: SuperMatrix, a: SuperMatrix, x: SuperMatrix,
                       h: SeriesMatrix | None = None, degree: int | None = None) -> ModuleInterpolation:
    """Interpolation in the one-sided Wiener-Grassmann module with J = I.

    P solves P - A*PA = C*C; the particular solution is
    F_min = sum z^n C A^n P^{-1} X and the homogeneous freedom is Theta ⋆ h.
    """
    context = c.context
    degree = context.max_series_degree if degree is None else degree
    eye_p = SuperMatrix.identity(context, c.rows)
    p = stein_solve(c, a, eye_p)
    theta = build_theta(c, a, p, eye_p, degree, verify_samples=0)
    pinv_x = mat_mul(mat_invert(p), x)
    coeffs = []
    state = pinv_x
    for _ in range(degree + 1):
        coeffs.append(mat_mul(c, state))
        state = mat_mul(a, state)
    minimal = SeriesMatrix(tuple(coeffs), exact=False)
    series = minimal if h is None else minimal + star_mul(theta.series, h)
    return ModuleInterpolation(series=series, minimal=minimal, theta=theta)


def adjoint_state_evaluation(c: SuperMatrix, a: SuperMatrix, f: SeriesMatrix) -> SuperMatrix:
    """(C* ⋆ F)(A*) = sum_n (A*)^n C* f_n over the stored coefficients.

    Carries the truncation tail of F; pair with decaying coefficient data.
    """
    astar = adjoint(a)
    cstar = adjoint(c)
    total = mat_mul(cstar, f.coeffs[0])
    power = astar
    for n in range(1, len(f.coeffs)):
        total = total + mat_mul(power, mat_mul(cstar, f.coeffs[n]))
        power = mat_mul(power, astar)
    return total
