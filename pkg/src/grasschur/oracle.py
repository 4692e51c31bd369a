"""Independent brute-force references used by the test suite.

Nothing here shares code paths with the main modules: multiplication runs over
dense coefficient arrays with bubble-sort sign counting, and the classical
complex references (Schur recursion, Pick matrices, Toeplitz extension) are
plain numpy linear algebra.  Single-threaded by design.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_GENERATORS = 10  # 2**10 dense coefficients; memory guard


def _bits_to_tuple(bits: int) -> tuple[int, ...]:
    out = []
    g = 1
    while bits:
        if bits & 1:
            out.append(g)
        bits >>= 1
        g += 1
    return tuple(out)


def bubble_sort_sign(sequence: tuple[int, ...]) -> int:
    """Sign of the permutation sorting the sequence, by literal bubble sort.

    Returns 0 when the sequence has a repeated entry (the monomial vanishes).
    """
    items = list(sequence)
    sign = 1
    n = len(items)
    for i in range(n):
        for j in range(n - i - 1):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
            elif items[j] == items[j + 1]:
                return 0
    return sign


@dataclass
class DenseSupernumber:
    """Dense coefficient array over all 2**N monomials, index = bit pattern."""

    generators: int
    coeffs: np.ndarray

    @classmethod
    def zeros(cls, generators: int) -> "DenseSupernumber":
        if generators > _MAX_GENERATORS:
            raise ValueError(f"dense oracle capped at {_MAX_GENERATORS} generators")
        return cls(generators, np.zeros(1 << generators, dtype=complex))

    @classmethod
    def from_terms(cls, generators: int, terms: dict[int, complex]) -> "DenseSupernumber":
        out = cls.zeros(generators)
        for bits, value in terms.items():
            out.coeffs[bits] = value
        return out

    def to_terms(self) -> dict[int, complex]:
        return {int(i): complex(c) for i, c in enumerate(self.coeffs) if c != 0}


def _tuple_table(generators: int) -> list[tuple[int, ...]]:
    global _TUPLES
    if _TUPLES is None or len(_TUPLES) < (1 << generators):
        _TUPLES = [_bits_to_tuple(i) for i in range(1 << _MAX_GENERATORS)]
    return _TUPLES


_TUPLES: list[tuple[int, ...]] | None = None


def naive_mul(a: DenseSupernumber, b: DenseSupernumber) -> DenseSupernumber:
    """Product by explicit double loop with bubble-sort transposition counting.

    Exactly-zero coefficients are skipped: adding their (signed zero) products
    never changes a finite accumulator, and the skip keeps 1e4-pair runs fast.
    """
    if a.generators != b.generators:
        raise ValueError("generator counts differ")
    tuples = _tuple_table(a.generators)
    out = DenseSupernumber.zeros(a.generators)
    acc = out.coeffs
    bcoeffs = b.coeffs
    size = 1 << a.generators
    for i in range(size):
        za = a.coeffs[i]
        if za == 0:
            continue
        left = tuples[i]
        for j in range(size):
            wb = bcoeffs[j]
            if wb == 0:
                continue
            if i & j:
                continue
            sign = bubble_sort_sign(left + tuples[j])
            if sign == 0:
                continue
            acc[i | j] += sign * za * wb
    return out


def classical_schur(coeffs: list[complex], steps: int, boundary_tol: float = 1e-12):
    """Schur coefficients of a complex power series via the classical recursion.

    ``coeffs`` are the Taylor coefficients s_0..s_D.  Each step computes
    s_{n+1} = (s_n - s_n(0)) / (lambda (1 - s_n conj(s_n(0)))) on truncated
    series (one degree is lost per step).  Returns ``(rhos, boundary_hit)``
    where ``boundary_hit`` reports |rho| = 1 within tolerance.
    """
    s = [complex(c) for c in coeffs]
    rhos: list[complex] = []
    boundary_hit = False
    for _ in range(steps):
        if not s:
            break
        rho = s[0]
        rhos.append(rho)
        if abs(abs(rho) - 1.0) <= boundary_tol or abs(rho) > 1.0:
            boundary_hit = True
            break
        if len(s) == 1:
            s = [0j] * 1  # constant input: the tail of the chain is zero
            continue
        numerator = s[1:]  # (s - rho)/lambda
        denominator = [1.0 - rho.conjugate() * s[0]] + [-rho.conjugate() * c for c in s[1:]]
        inverse = _series_inverse(denominator, len(numerator) - 1)
        s = _cauchy_product(numerator, inverse, len(numerator) - 1)
    return rhos, boundary_hit


def _series_inverse(c: list[complex], degree: int) -> list[complex]:
    out = [1.0 / c[0]]
    for n in range(1, degree + 1):
        acc = 0j
        for u in range(1, min(n, len(c) - 1) + 1):
            acc += c[u] * out[n - u]
        out.append(-out[0] * acc)
    return out


def _cauchy_product(a: list[complex], b: list[complex], degree: int) -> list[complex]:
    out = []
    for n in range(degree + 1):
        acc = 0j
        for u in range(n + 1):
            if u < len(a) and n - u < len(b):
                acc += a[u] * b[n - u]
        out.append(acc)
    return out


def classical_pick_matrix(nodes: list[complex], values: list[complex]) -> np.ndarray:
    """Classical Pick matrix P_jk = (1 - s_j conj(s_k)) / (1 - z_j conj(z_k))."""
    z = np.asarray(nodes, dtype=complex)
    s = np.asarray(values, dtype=complex)
    return (1.0 - np.outer(s, s.conj())) / (1.0 - np.outer(z, z.conj()))


def classical_np_solution(nodes: list[complex], values: list[complex]):
    """Closure evaluating the classical Nevanlinna-Pick solution T_Theta(sigma).

    Built pointwise from Theta(lambda) = I - (1-lambda) C (I-lambda A)^{-1}
    P^{-1} (I-A)^{-*} C^* J with the diagonal-node data; fully independent of
    the series machinery.  ``sigma`` is a complex-valued callable (default 0).
    """
    z = np.asarray(nodes, dtype=complex)
    s = np.asarray(values, dtype=complex)
    n = len(nodes)
    a = np.diag(z.conj())
    c = np.vstack([np.ones(n, dtype=complex), s.conj()])
    j = np.diag([1.0, -1.0]).astype(complex)
    p = classical_pick_matrix(nodes, values)
    k = np.linalg.solve(p, np.linalg.inv(np.eye(n) - a).conj().T @ c.conj().T @ j)

    def theta(lam: complex) -> np.ndarray:
        resolvent = np.linalg.inv(np.eye(n) - lam * a)
        return np.eye(2, dtype=complex) - (1.0 - lam) * (c @ resolvent @ k)

    def solution(lam: complex, sigma=None) -> complex:
        sig = 0j if sigma is None else complex(sigma(lam))
        t = theta(lam)
        return (t[0, 0] * sig + t[0, 1]) / (t[1, 0] * sig + t[1, 1])

    return solution, theta, p


def classical_toeplitz_extension(r: list[complex]):
    """One-step central-extension quantities for a complex Toeplitz matrix.

    Returns ``(center, alpha, xi_sq)`` computed by direct linear algebra:
    alpha = (r0 - a T^{-1} a*)^{-1}, center = a T^{-1} b,
    xi_sq = r0 - b* T^{-1} b with T the leading N x N Toeplitz block,
    a = (r1..rN) and b = (rN..r1)^T.
    """
    r = [complex(c) for c in r]
    n = len(r) - 1
    if n == 0:
        return 0j, 1.0 / r[0], r[0]
    t = np.empty((n, n), dtype=complex)
    for row in range(n):
        for col in range(n):
            t[row, col] = r[col - row] if col >= row else r[row - col].conjugate()
    a = np.asarray(r[1:], dtype=complex)  # row (r1..rN)
    b = np.asarray(r[:0:-1], dtype=complex)  # column (rN..r1)
    alpha = 1.0 / (r[0] - a @ np.linalg.solve(t, a.conj()))
    center = a @ np.linalg.solve(t, b)
    xi_sq = r[0] - b.conj() @ np.linalg.solve(t, b)
    return complex(center), complex(alpha), complex(xi_sq)


def classical_toeplitz_is_pd(r: list[complex], tol: float = 0.0) -> bool:
    """Positive definiteness of the full complex Toeplitz matrix."""
    n = len(r)
    t = np.empty((n, n), dtype=complex)
    for row in range(n):
        for col in range(n):
            t[row, col] = r[col - row] if col >= row else r[row - col].conjugate()
    eigs = np.linalg.eigvalsh(t)
    return bool(eigs.min() > tol)
