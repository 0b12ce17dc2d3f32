"""Exact dense linear algebra over prime fields F_p and over Q.

Matrices are numpy arrays: ``int64`` entries reduced mod p for finite prime
fields, ``object`` entries holding :class:`fractions.Fraction` for Q.  All
eliminations are plain Gauss-Jordan with exact arithmetic; every routine is
deterministic (first nonzero pivot, free variables set to zero), so witnesses
are reproducible across runs.

Conventions:

* a matrix represents a linear map via column-action, ``y = M @ x``;
* families of vectors (spanning sets, basis rows) are stored as *rows*;
* ``kernel`` returns basis vectors as *columns*.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class LinAlgError(Exception):
    """Raised for inconsistent systems, singular inversions, bad shapes."""


class Field:
    """A coefficient field: GF(p) for prime p, or Q when ``p == 0``."""

    def __init__(self, p: int):
        if p < 0 or p == 1:
            raise ValueError(f"field characteristic must be 0 or a prime, got {p}")
        if p > 1 and any(p % q == 0 for q in range(2, min(p, 1000)) if q * q <= p):
            raise ValueError(f"field characteristic must be prime, got {p}")
        self.p = p

    # -- elementary scalar/array plumbing ------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def zeros(self, shape) -> np.ndarray:
        if self.p == 0:
            arr = np.empty(shape, dtype=object)
            arr[...] = Fraction(0)
            return arr
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = self.one
        return arr

    def asarray(self, data) -> np.ndarray:
        if self.p == 0:
            arr = np.array(data, dtype=object)
            flat = arr.reshape(-1)
            for i, v in enumerate(flat):
                if not isinstance(v, Fraction):
                    flat[i] = Fraction(v)
            return flat.reshape(arr.shape)
        arr = np.array(data, dtype=np.int64)
        return np.mod(arr, self.p)

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return arr
        return np.mod(arr, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 0:
            if a.shape[1] == 0:
                return self.zeros((a.shape[0], b.shape[1]))
            return a @ b
        return np.mod(a @ b, self.p)

    def inv_scalar(self, x):
        if self.p == 0:
            if x == 0:
                raise LinAlgError("division by zero")
            return Fraction(1) / x
        xi = int(x) % self.p
        if xi == 0:
            raise LinAlgError("division by zero")
        return pow(xi, -1, self.p)

    def scalar(self, x):
        """Coerce a python number into a field scalar."""
        if self.p == 0:
            return Fraction(x)
        return int(x) % self.p

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        if a.shape != b.shape:
            return False
        if self.p == 0:
            return bool(np.all(a == b))
        return bool(np.all(np.mod(a - b, self.p) == 0))

    def rand(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.p == 0:
            raw = rng.integers(-4, 5, size=shape)
            return self.asarray(raw)
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    # -- scalar (de)serialization -------------------------------------------

    def to_str(self, x) -> str:
        if self.p == 0:
            f = Fraction(x)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(int(x) % self.p)

    def from_str(self, s: str):
        s = s.strip()
        if self.p == 0:
            if "/" in s:
                num, den = s.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(s))
        return int(s) % self.p

    def __repr__(self) -> str:
        return "QQ" if self.p == 0 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))


QQ = Field(0)


def rref(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``."""
    r0 = field.normalize(np.array(a, copy=True))
    m, n = r0.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = r0[r:, c]
        nz = np.flatnonzero(col != field.zero) if field.p == 0 else np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            r0[[r, i], :] = r0[[i, r], :]
        inv = field.inv_scalar(r0[r, c])
        r0[r, :] = field.normalize(r0[r, :] * inv)
        coefs = np.array(r0[:, c], copy=True)
        coefs[r] = field.zero
        r0 -= np.outer(coefs, r0[r, :])
        r0 = field.normalize(r0)
        pivots.append(c)
        r += 1
    return r0, pivots


def rank(field: Field, a: np.ndarray) -> int:
    return len(rref(field, a)[1])


def kernel(field: Field, a: np.ndarray) -> np.ndarray:
    """Basis of ``{x : a @ x = 0}`` as columns of an (n, k) matrix.

    The basis is canonical: one vector per free column of the RREF, with a 1
    in the free coordinate and back-substituted pivot entries.
    """
    m, n = a.shape
    r0, pivots = rref(field, a)
    free = [c for c in range(n) if c not in pivots]
    ker = field.zeros((n, len(free)))
    for k, c in enumerate(free):
        ker[c, k] = field.one
        for i, pc in enumerate(pivots):
            ker[pc, k] = field.normalize(-r0[i, c])
    return field.normalize(ker)


def solve(field: Field, a: np.ndarray, b: np.ndarray):
    """Canonical solution of ``a @ x = b`` (free variables zero).

    ``b`` may be a vector or a matrix of right-hand columns.  Returns ``None``
    when the system is inconsistent.
    """
    vec = b.ndim == 1
    bm = b.reshape(-1, 1) if vec else b
    m, n = a.shape
    aug = np.concatenate([field.normalize(np.array(a, copy=True)), field.normalize(np.array(bm, copy=True))], axis=1)
    r0, pivots = rref(field, aug)
    for c in pivots:
        if c >= n:
            return None
    x = field.zeros((n, bm.shape[1]))
    for i, c in enumerate(pivots):
        x[c, :] = r0[i, n:]
    x = field.normalize(x)
    return x[:, 0] if vec else x


def invert(field: Field, a: np.ndarray) -> np.ndarray:
    m, n = a.shape
    if m != n:
        raise LinAlgError(f"cannot invert a {m}x{n} matrix")
    aug = np.concatenate([field.normalize(np.array(a, copy=True)), field.eye(n)], axis=1)
    r0, pivots = rref(field, aug)
    if pivots != list(range(n)):
        raise LinAlgError("matrix is singular")
    return r0[:, n:]


def is_invertible(field: Field, a: np.ndarray) -> bool:
    m, n = a.shape
    return m == n and rank(field, a) == n


def left_inverse(field: Field, a: np.ndarray) -> np.ndarray:
    """For a column-injective (m, n) matrix, a C with ``C @ a = I_n``."""
    x = solve(field, a.T.copy(), field.eye(a.shape[1]).T)
    if x is None:
        raise LinAlgError("matrix has no left inverse (columns dependent)")
    return x.T


def row_space(field: Field, rows: np.ndarray) -> np.ndarray:
    """Canonical (RREF) basis of the span of the given row vectors."""
    r0, pivots = rref(field, rows)
    return r0[: len(pivots), :]


def in_span(field: Field, rows: np.ndarray, v: np.ndarray) -> bool:
    """Whether vector ``v`` lies in the row span of ``rows``."""
    if rows.shape[0] == 0:
        return bool(np.all(field.normalize(np.array(v, copy=True)) == field.zero))
    return solve(field, rows.T.copy(), v) is not None


def coords_in_rows(field: Field, rows: np.ndarray, vecs: np.ndarray):
    """Coordinates of row-vectors ``vecs`` in the row basis ``rows``.

    Returns an array C with ``C @ rows == vecs``, or ``None`` if some vector
    lies outside the span.
    """
    if rows.shape[0] == 0:
        if np.all(field.normalize(np.array(vecs, copy=True)) == field.zero):
            return field.zeros((vecs.shape[0], 0))
        return None
    x = solve(field, rows.T.copy(), vecs.T.copy())
    return None if x is None else x.T


def complement_coords(field: Field, rows: np.ndarray, dim: int) -> list[int]:
    """Coordinate indices whose unit vectors complete ``rows`` to a basis."""
    _, pivots = rref(field, rows)
    return [c for c in range(dim) if c not in pivots]


def quotient_projection(field: Field, rows: np.ndarray, dim: int):
    """Projection onto a coordinate complement of a subspace.

    Returns ``(comp, proj, embed)``: ``comp`` lists coordinate indices whose
    unit vectors complete the row span to a basis, ``proj`` (c x dim) maps a
    vector to its quotient coordinates (kernel = row span), and ``embed``
    (dim x c) sends quotient coordinates to the chosen representatives, so
    ``proj @ embed = I``.
    """
    rows = row_space(field, rows)
    comp = complement_coords(field, rows, dim)
    erows = field.zeros((len(comp), dim))
    for t, c in enumerate(comp):
        erows[t, c] = field.one
    s = np.concatenate([rows, erows], axis=0)
    sinv = invert(field, s)
    proj = sinv.T[rows.shape[0]:, :]
    embed = erows.T.copy()
    return comp, proj, embed


def charpoly(field: Field, a: np.ndarray) -> list:
    """Characteristic polynomial coefficients ``[c_0 .. c_n]``.

    ``det(tI - a) = c_n t^n + ... + c_1 t + c_0`` with ``c_n = 1``; computed
    by Hessenberg reduction (division-safe over any exact field).
    """
    n = a.shape[0]
    if n == 0:
        return [field.one]
    h = field.normalize(np.array(a, copy=True))
    # Similarity reduction to upper Hessenberg form.
    for c in range(n - 2):
        nz = None
        for i in range(c + 1, n):
            if h[i, c] != field.zero:
                nz = i
                break
        if nz is None:
            continue
        if nz != c + 1:
            h[[c + 1, nz], :] = h[[nz, c + 1], :]
            h[:, [c + 1, nz]] = h[:, [nz, c + 1]]
        inv = field.inv_scalar(h[c + 1, c])
        for i in range(c + 2, n):
            f = field.normalize(h[i, c] * inv)
            if f == field.zero:
                continue
            h[i, :] = field.normalize(h[i, :] - f * h[c + 1, :])
            h[:, c + 1] = field.normalize(h[:, c + 1] + f * h[:, i])
    # charpoly recurrence on leading principal Hessenberg blocks.
    polys = [[field.one]]  # p_0 = 1
    for k in range(1, n + 1):
        # p_k(t) = (t - h[k-1,k-1]) p_{k-1}(t)
        #          - sum_{j=1}^{k-1} h[k-1-j, k-1] (prod of subdiagonal) p_{k-1-j}(t)
        prev = polys[k - 1]
        pk = [field.zero] * (k + 1)
        for idx, cf in enumerate(prev):
            pk[idx + 1] = field.normalize(pk[idx + 1] + cf)
            pk[idx] = field.normalize(pk[idx] - h[k - 1, k - 1] * cf)
        run = field.one
        for j in range(1, k):
            run = field.normalize(run * h[k - j, k - j - 1])
            if run == field.zero:
                break
            coef = field.normalize(h[k - 1 - j, k - 1] * run)
            if coef == field.zero:
                continue
            for idx, cf in enumerate(polys[k - 1 - j]):
                pk[idx] = field.normalize(pk[idx] - coef * cf)
        polys.append(pk)
    return polys[n]


def minpoly(field: Field, a: np.ndarray) -> list:
    """Monic minimal polynomial coefficients ``[c_0 .. c_d]`` of a matrix."""
    n = a.shape[0]
    if n == 0:
        return [field.zero, field.one]
    powers = [field.eye(n).reshape(-1)]
    cur = field.eye(n)
    for _ in range(n):
        cur = field.matmul(cur, a)
        powers.append(cur.reshape(-1))
    for d in range(1, n + 1):
        stack = np.stack(powers[:d], axis=1)
        x = solve(field, stack, field.normalize(-powers[d]))
        if x is not None:
            return [field.normalize(c) for c in x] + [field.one]
    raise LinAlgError("minimal polynomial not found (unreachable)")


def poly_eval_matrix(field: Field, coeffs: list, a: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (low-to-high coefficients) at a square matrix."""
    n = a.shape[0]
    out = field.zeros((n, n))
    for cf in reversed(coeffs):
        out = field.matmul(out, a)
        if cf != field.zero:
            out = field.normalize(out + cf * field.eye(n))
    return out


def rand_matrix(field: Field, rng: np.random.Generator, shape) -> np.ndarray:
    return field.rand(rng, shape)
