"""One-step extension of superpositive Toeplitz supermatrices.

Given symbols r_0..r_N with r_0 superreal, the self-adjoint Toeplitz matrix
T_N has entry (j,k) = r_{k-j} above the diagonal and the dagger below.  The
admissible next symbols form a superdisk

    r_{N+1} = c_N + alpha^{-1/2} eta xi,   eta eta† ≺ 1,

with center c_N = a_N T_{N-1}⁻¹ b_N, left radius alpha^{-1/2} where
alpha = (r_0 - a_N T_{N-1}⁻¹ a_N*)⁻¹, and right radius xi the superreal square
root of r_0 - b_N* T_{N-1}⁻¹ b_N.  (The two radii are the leading and trailing
Schur complements of T_N.)
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import Supernumber, classify, dagger, invert, kth_root, mul
from .errors import EtaNotContractive, NotSuperpositive
from .matrix import SuperMatrix, adjoint, is_superpositive, mat_invert, mat_mul


@dataclass(frozen=True)
class ToeplitzSpec:
    """Symbols r_0..r_N of a self-adjoint Toeplitz supermatrix."""

    r: tuple[Supernumber, ...]

    def __post_init__(self):
        if not self.r:
            raise ValueError("a Toeplitz spec needs at least r_0")
        object.__setattr__(self, "r", tuple(self.r))
        if not classify(self.r[0]).is_real:
            raise ValueError("r_0 must be superreal")

    @property
    def order(self) -> int:
        return len(self.r) - 1

    @property
    def context(self):
        return self.r[0].context

    def extended(self, r_next: Supernumber) -> "ToeplitzSpec":
        return ToeplitzSpec(self.r + (r_next,))


@dataclass(frozen=True)
class SuperdiskParams:
    """Center and radii of the admissible one-step extensions."""

    center: Supernumber
    left_radius: Supernumber   # alpha^{-1/2}, superreal
    right_radius: Supernumber  # xi, superreal


def assemble(spec: ToeplitzSpec) -> SuperMatrix:
    """The (N+1)x(N+1) self-adjoint Toeplitz supermatrix of the spec."""
    r = spec.r
    n = len(r)
    rows = []
    for j in range(n):
        rows.append([r[k - j] if k >= j else dagger(r[j - k]) for k in range(n)])
    return SuperMatrix.from_rows(rows)


def _schur_complement_data(spec: ToeplitzSpec):
    """(c_N, alpha_inv, xi_sq): center and the two Schur complements of T_N."""
    r = spec.r
    context = spec.context
    n = spec.order
    if n == 0:
        return context.zero(), r[0], r[0]
    inner = mat_invert(assemble(ToeplitzSpec(r[:-1])))  # T_{N-1}^{-1}
    a = SuperMatrix.row(list(r[1:]))                     # (r_1 .. r_N)
    b = SuperMatrix.column(list(r[:0:-1]))               # (r_N .. r_1)^T
    alpha_inv = r[0] - mat_mul(mat_mul(a, inner), adjoint(a))[0, 0]
    center = mat_mul(mat_mul(a, inner), b)[0, 0]
    xi_sq = r[0] - mat_mul(mat_mul(adjoint(b), inner), b)[0, 0]
    return center, alpha_inv, xi_sq


def extension_params(spec: ToeplitzSpec) -> SuperdiskParams:
    """Superdisk of admissible r_{N+1}; requires a superpositive T_N."""
    report = is_superpositive(assemble(spec))
    if not report:
        raise NotSuperpositive(report.reason or "Toeplitz matrix is not superpositive")
    center, alpha_inv, xi_sq = _schur_complement_data(spec)
    return SuperdiskParams(
        center=center,
        left_radius=kth_root(alpha_inv, 2),
        right_radius=kth_root(xi_sq, 2),
    )


def extend(spec: ToeplitzSpec, eta: Supernumber, params: SuperdiskParams | None = None) -> ToeplitzSpec:
    """Append r_{N+1} = c_N + alpha^{-1/2} eta xi; eta must satisfy |eta_B| < 1."""
    if abs(eta.body) >= 1.0:
        raise EtaNotContractive(f"|eta body| = {abs(eta.body):.6f} >= 1")
    if params is None:
        params = extension_params(spec)
    r_next = params.center + mul(mul(params.left_radius, eta), params.right_radius)
    return spec.extended(r_next)


def verify_extension(spec: ToeplitzSpec) -> bool:
    """Schur-complement superpositivity test of the assembled matrix.

    True iff the leading T_{N-1} is superpositive and the trailing Schur
    complement r_0 - b_N* T_{N-1}⁻¹ b_N is a positive supernumber (for order
    0: r_0 itself).
    """
    if spec.order == 0:
        return bool(classify(spec.r[0]).is_superpositive)
    leading = ToeplitzSpec(spec.r[:-1])
    if not is_superpositive(assemble(leading)):
        return False
    _, _, xi_sq = _schur_complement_data(spec)
    return bool(classify(xi_sq).is_superpositive)


def alpha_from_params(params: SuperdiskParams) -> Supernumber:
    """alpha = (left_radius^2)^{-1}; handy for body comparisons."""
    return invert(mul(params.left_radius, params.left_radius))
