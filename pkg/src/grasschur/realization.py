"""State-space realizations F(z) = D + zC ⋆ (I - zA)^{-star} B and their calculus.

Taylor coefficients are f_0 = D and f_n = C A^{n-1} B.  Inverses, products,
sums and concatenations have the usual block formulas; observability,
controllability and shift-span ranks are decided on bodies with an SVD
threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraContext, Supernumber, dagger, invert
from .errors import DSingular, JInvalid, ShapeMismatch
from .matrix import SuperMatrix, adjoint, mat_invert, mat_mul
from .series import SeriesMatrix

_COMPOSE_MODES = ("product", "sum", "concat_rows", "concat_cols")


@dataclass(frozen=True)
class Realization:
    """Block data (A, B, C, D): A n x n, B n x q, C p x n, D p x q."""

    a: SuperMatrix
    b: SuperMatrix
    c: SuperMatrix
    d: SuperMatrix

    def __post_init__(self):
        n = self.a.rows
        if self.a.cols != n:
            raise ShapeMismatch("A must be square")
        p, q = self.d.shape
        if self.b.shape != (n, q) or self.c.shape != (p, n):
            raise ShapeMismatch(
                f"incompatible blocks: A {self.a.shape}, B {self.b.shape}, C {self.c.shape}, D {self.d.shape}"
            )

    @property
    def state_dim(self) -> int:
        return self.a.rows

    @property
    def shape(self) -> tuple[int, int]:
        return self.d.shape

    @property
    def context(self) -> AlgebraContext:
        return self.d.context

    @classmethod
    def constant(cls, value: SuperMatrix) -> "Realization":
        """The constant function D (state dimension 1 with zero blocks)."""
        context = value.context
        p, q = value.shape
        return cls(
            a=SuperMatrix.zeros(context, 1, 1),
            b=SuperMatrix.zeros(context, 1, q),
            c=SuperMatrix.zeros(context, p, 1),
            d=value,
        )

    @classmethod
    def monomial(cls, value: SuperMatrix) -> "Realization":
        """The function z*M: C = M, A = D = 0, B = I."""
        context = value.context
        p, q = value.shape
        return cls(
            a=SuperMatrix.zeros(context, q, q),
            b=SuperMatrix.identity(context, q),
            c=value,
            d=SuperMatrix.zeros(context, p, q),
        )


def to_series(r: Realization, degree: int | None = None) -> SeriesMatrix:
    """Taylor coefficients D, CB, CAB, CA^2B, ... through the given degree."""
    context = r.context
    degree = context.max_series_degree if degree is None else degree
    coeffs = [r.d]
    if degree >= 1:
        power = r.b  # A^{n-1} B, accumulated left-to-right
        coeffs.append(mat_mul(r.c, power))
        for _ in range(2, degree + 1):
            power = mat_mul(r.a, power)
            coeffs.append(mat_mul(r.c, power))
    return SeriesMatrix(tuple(coeffs), exact=False)


def inverse_realization(r: Realization) -> Realization:
    """Realization of F^{-star}: (A - BD⁻¹C, BD⁻¹, -D⁻¹C, D⁻¹)."""
    try:
        d_inv = mat_invert(r.d)
    except Exception as exc:
        raise DSingular(str(exc)) from exc
    b_dinv = mat_mul(r.b, d_inv)
    return Realization(
        a=r.a - mat_mul(b_dinv, r.c),
        b=b_dinv,
        c=-mat_mul(d_inv, r.c),
        d=d_inv,
    )


def compose(r1: Realization, r2: Realization, mode: str) -> Realization:
    """Block realization of F1*F2, F1+F2, [F1 F2] or [F1; F2]."""
    if mode not in _COMPOSE_MODES:
        raise ValueError(f"mode must be one of {_COMPOSE_MODES}")
    context = r1.context
    n1, n2 = r1.state_dim, r2.state_dim
    z12 = SuperMatrix.zeros(context, n1, n2)
    z21 = SuperMatrix.zeros(context, n2, n1)
    block_diag_a = SuperMatrix.block([[r1.a, z12], [z21, r2.a]])
    if mode == "product":
        if r1.shape[1] != r2.shape[0]:
            raise ShapeMismatch(f"cannot multiply {r1.shape} by {r2.shape}")
        return Realization(
            a=SuperMatrix.block([[r1.a, mat_mul(r1.b, r2.c)], [z21, r2.a]]),
            b=SuperMatrix.block([[mat_mul(r1.b, r2.d)], [r2.b]]),
            c=SuperMatrix.block([[r1.c, mat_mul(r1.d, r2.c)]]),
            d=mat_mul(r1.d, r2.d),
        )
    if mode == "sum":
        if r1.shape != r2.shape:
            raise ShapeMismatch(f"cannot add {r1.shape} and {r2.shape}")
        return Realization(
            a=block_diag_a,
            b=SuperMatrix.block([[r1.b], [r2.b]]),
            c=SuperMatrix.block([[r1.c, r2.c]]),
            d=r1.d + r2.d,
        )
    if mode == "concat_cols":  # [F1  F2]
        if r1.shape[0] != r2.shape[0]:
            raise ShapeMismatch("row counts differ")
        zb12 = SuperMatrix.zeros(context, n1, r2.shape[1])
        zb21 = SuperMatrix.zeros(context, n2, r1.shape[1])
        return Realization(
            a=block_diag_a,
            b=SuperMatrix.block([[r1.b, zb12], [zb21, r2.b]]),
            c=SuperMatrix.block([[r1.c, r2.c]]),
            d=SuperMatrix.block([[r1.d, r2.d]]),
        )
    # concat_rows: [F1; F2]
    if r1.shape[1] != r2.shape[1]:
        raise ShapeMismatch("column counts differ")
    zc12 = SuperMatrix.zeros(context, r1.shape[0], n2)
    zc21 = SuperMatrix.zeros(context, r2.shape[0], n1)
    return Realization(
        a=block_diag_a,
        b=SuperMatrix.block([[r1.b], [r2.b]]),
        c=SuperMatrix.block([[r1.c, zc12], [zc21, r2.c]]),
        d=SuperMatrix.block([[r1.d], [r2.d]]),
    )


def polynomial_realization(coefficients: list[SuperMatrix]) -> Realization:
    """Realization of M_0 + zM_1 + ... + z^k M_k by summed monomial products."""
    if not coefficients:
        raise ValueError("a polynomial needs at least one coefficient")
    shape = coefficients[0].shape
    for m in coefficients:
        if m.shape != shape:
            raise ShapeMismatch("polynomial coefficients must share one shape")
    context = coefficients[0].context
    total = Realization.constant(coefficients[0])
    for k, m in enumerate(coefficients[1:], start=1):
        term = Realization.monomial(m)  # z M_k
        for _ in range(k - 1):
            term = compose(Realization.monomial(SuperMatrix.identity(context, shape[0])), term, "product")
        total = compose(total, term, "sum")
    return total


def is_observable(c: SuperMatrix, a: SuperMatrix) -> bool:
    """Full column rank of the stacked body observability matrix."""
    if a.rows != a.cols or c.cols != a.rows:
        raise ShapeMismatch("need C p x n and A n x n")
    n = a.rows
    cb, ab = c.body(), a.body()
    blocks = []
    power = np.eye(n, dtype=complex)
    for _ in range(n):
        blocks.append(cb @ power)
        power = power @ ab
    stacked = np.vstack(blocks)
    svals = np.linalg.svd(stacked, compute_uv=False)
    tol = a.context.tol_body * max(1.0, float(svals[0]) if len(svals) else 0.0)
    return bool((svals > tol).sum() == n)


def is_controllable(a: SuperMatrix, b: SuperMatrix) -> bool:
    """Full row rank of the body controllability matrix [B, AB, ..., A^{n-1}B]."""
    if a.rows != a.cols or b.rows != a.rows:
        raise ShapeMismatch("need A n x n and B n x q")
    n = a.rows
    ab, bb = a.body(), b.body()
    blocks = []
    power = np.eye(n, dtype=complex)
    for _ in range(n):
        blocks.append(power @ bb)
        power = ab @ power
    stacked = np.hstack(blocks)
    svals = np.linalg.svd(stacked, compute_uv=False)
    tol = a.context.tol_body * max(1.0, float(svals[0]) if len(svals) else 0.0)
    return bool((svals > tol).sum() == n)


def is_minimal(r: Realization) -> bool:
    """Observable and controllable (decided on bodies)."""
    return is_observable(r.c, r.a) and is_controllable(r.a, r.b)


def backward_shift_span_dimension(f: SeriesMatrix, n_max: int) -> int:
    """Body rank of the span of truncated backward shifts applied to columns.

    Columns of the stacked matrix are vec(f_{n+m} e_j) for shifts n <= n_max
    and column probes e_j, rows m = 0..degree-n_max (uniform truncation).
    """
    if n_max >= len(f.coeffs):
        raise ValueError("n_max exceeds the stored degree")
    p, q = f.shape
    rows = len(f.coeffs) - n_max
    columns = []
    for n in range(n_max + 1):
        for j in range(q):
            col = np.concatenate([
                f.coeffs[n + m].body()[:, j] for m in range(rows)
            ])
            columns.append(col)
    stacked = np.stack(columns, axis=1)
    svals = np.linalg.svd(stacked, compute_uv=False)
    if len(svals) == 0:
        return 0
    tol = f.context.tol_body * max(1.0, float(svals[0]))
    return int((svals > tol).sum())


def _check_signature(j: SuperMatrix) -> None:
    tol = 1e-12 * max(1.0, j.norm1())
    if (j - adjoint(j)).norm1() > tol:
        raise JInvalid("J is not self-adjoint")
    eye = SuperMatrix.identity(j.context, j.rows)
    if (mat_mul(j, j) - eye).norm1() > tol:
        raise JInvalid("J*J != I")


def evaluate_rational(r: Realization, z: Supernumber) -> SuperMatrix:
    """Exact rational evaluation D + zC(I-zA)⁻¹B for a central (even) argument.

    Even supernumbers commute with everything, so the star evaluation of the
    resolvent collapses to an honest matrix inverse.
    """
    from .algebra import classify

    if not classify(z).is_even:
        raise ValueError("rational evaluation needs a central (even) argument")
    context = r.context
    if r.state_dim == 0:
        return r.d
    eye = SuperMatrix.identity(context, r.state_dim)
    core = mat_invert(eye - r.a.scale_left(z))
    return r.d + mat_mul(r.c, mat_mul(core, r.b)).scale_left(z)


def is_J_unitary(
    r: Realization,
    j: SuperMatrix,
    sample_points: int = 16,
    rng=None,
    soul_scale: float = 0.1,
) -> bool:
    """Sampled check of U(z) J U(z^{-dagger})* = J on the unit-body torus.

    Samples even-soul z with |z_B| = 1 (central, so rational evaluation is
    exact) and tests the residual at tol_eq scale.  A sampled check, not an
    algebraic prover.
    """
    from .sampling import random_even_unit

    _check_signature(j)
    if r.shape[0] != j.rows or r.shape[1] != j.rows:
        raise ShapeMismatch("U must be square of J's size")
    rng = np.random.default_rng(0) if rng is None else rng
    context = r.context
    tol = context.tol_eq * max(1.0, j.norm1())
    for _ in range(sample_points):
        z = random_even_unit(context, rng, soul_scale=soul_scale)
        w = invert(dagger(z))
        u_z = evaluate_rational(r, z)
        u_w = evaluate_rational(r, w)
        residual = mat_mul(mat_mul(u_z, j), adjoint(u_w)) - j
        if residual.norm1() > tol * max(1.0, u_z.norm1() * u_w.norm1()):
            return False
    return True
