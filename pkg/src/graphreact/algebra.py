"""Small dense linear algebra and polynomial arithmetic.

Everything here works on plain numpy arrays (square, float64).  The
linear solver is row-pivoted Gaussian elimination with one or two
iterative-refinement passes, which lets it guarantee a residual bound
and report the offending pivot on failure.  Matrices in this package
stay tiny (a handful of vertices or reaction sites), so no sparse or
blocked machinery is warranted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SingularSystemError

#: residual guarantee of solve_linear: ||Ax - b||_inf <= RTOL * (1 + ||b||_inf)
RTOL = 1e-10


def _factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """LU factorization with partial pivoting.

    Returns (lu, perm, sign) where lu packs L (unit diagonal, below) and
    U (on and above), perm maps factored rows to original rows, and sign
    is the permutation parity.  Raises on an exactly zero pivot.
    """
    lu = np.array(a, dtype=float)
    if lu.ndim != 2 or lu.shape[0] != lu.shape[1]:
        raise PreconditionError(f"matrix must be square, got shape {lu.shape}")
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    for k in range(n):
        r = k + int(np.argmax(np.abs(lu[k:, k])))
        if lu[r, k] == 0.0:
            raise SingularSystemError(
                f"matrix is singular to working precision at pivot column {k}"
            )
        if r != k:
            lu[[k, r]] = lu[[r, k]]
            perm[[k, r]] = perm[[r, k]]
            sign = -sign
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm, sign


def _lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float)[perm]
    n = lu.shape[0]
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]
    return x


def solve_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for a vector or a matrix of right-hand columns.

    Refines the solution until ||a x - b||_inf <= RTOL * (1 + ||b||_inf)
    per column, and raises SingularSystemError if two refinement passes
    cannot get there.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise PreconditionError(
            f"shape mismatch: matrix {a.shape} vs right-hand side {b.shape}"
        )
    lu, perm, _ = _factor(a)
    cols = b.reshape(b.shape[0], -1)
    out = np.empty_like(cols)
    for j in range(cols.shape[1]):
        rhs = cols[:, j]
        tol = RTOL * (1.0 + np.max(np.abs(rhs), initial=0.0))
        x = _lu_solve(lu, perm, rhs)
        for _ in range(2):
            r = rhs - a @ x
            if np.max(np.abs(r), initial=0.0) <= tol:
                break
            x = x + _lu_solve(lu, perm, r)
        else:
            r = rhs - a @ x
            if np.max(np.abs(r), initial=0.0) > tol:
                raise SingularSystemError(
                    "system too ill-conditioned: residual "
                    f"{np.max(np.abs(r)):.3e} exceeds {tol:.3e}"
                )
        out[:, j] = x
    return out.reshape(b.shape)


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve the square system a x = b by row-pivoted elimination."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise PreconditionError("right-hand side must be a vector")
    return solve_many(a, b)


def det(a: np.ndarray) -> float:
    """Determinant via the same pivoted elimination; 0.0 when singular."""
    try:
        lu, _, sign = _factor(a)
    except SingularSystemError:
        return 0.0
    return float(sign * np.prod(np.diag(lu)))


def row_subtracted(a: np.ndarray, j: int) -> np.ndarray:
    """Subtract row j from every row (row j of the result is zero)."""
    a = np.asarray(a, dtype=float)
    if not (0 <= j < a.shape[0]):
        raise PreconditionError(f"row index {j} out of range for {a.shape[0]} rows")
    return a - a[j][None, :]


def _trim(coeffs) -> tuple[float, ...]:
    cs = [float(c) for c in coeffs]
    while cs and cs[-1] == 0.0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients in ascending powers.

    Trailing exactly-zero coefficients are trimmed; the zero polynomial
    has an empty tuple and degree -inf.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def __call__(self, x):
        result = 0.0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def __add__(self, other: Polynomial) -> Polynomial:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self.coeffs or not other.coeffs:
                return Polynomial()
            out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, ci in enumerate(self.coeffs):
                for j, cj in enumerate(other.coeffs):
                    out[i + j] += ci * cj
            return Polynomial(tuple(out))
        return Polynomial(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__


@dataclass(frozen=True)
class RationalForm:
    """Ratio of two polynomials, normalized so denominator(0) = 1."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        d0 = self.denominator(0.0)
        if d0 == 0.0:
            raise PreconditionError("denominator must be nonzero at 0")
        if d0 != 1.0:
            object.__setattr__(self, "numerator", (1.0 / d0) * self.numerator)
            object.__setattr__(self, "denominator", (1.0 / d0) * self.denominator)

    def __call__(self, x):
        return self.numerator(x) / self.denominator(x)


def det_poly(g: np.ndarray) -> Polynomial:
    """Coefficients of det(I + t*G) as a polynomial in t.

    The coefficient of t^m is the sum of the m-by-m principal minors of
    G.  Coefficients are recovered by evaluating the determinant at the
    integer nodes t = 0..n and solving the (mild, small-n) Vandermonde
    system; the node t = 0 pins the constant term to exactly 1.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise PreconditionError(f"matrix must be square, got shape {g.shape}")
    n = g.shape[0]
    eye = np.eye(n)
    values = np.array([det(eye + t * g) - 1.0 for t in range(1, n + 1)])
    vand = np.array([[float(t**m) for m in range(1, n + 1)] for t in range(1, n + 1)])
    higher = solve_linear(vand, values)
    return Polynomial((1.0, *higher))
