"""Exact integer linear algebra.

Matrices are lists of rows of Python ints (arbitrary precision).  Nothing in
this module touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import NamedTuple, Sequence

Matrix = list[list[int]]
Vector = tuple[int, ...]


class SNFDecomposition(NamedTuple):
    """``left @ A @ right == diag`` padded to the shape of ``A``."""

    left: Matrix
    diag: tuple[int, ...]
    right: Matrix


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def shape(A: Sequence[Sequence[int]], cols: int | None = None) -> tuple[int, int]:
    """Shape of ``A``; ``cols`` disambiguates matrices with no rows."""
    if len(A) == 0:
        return 0, cols or 0
    return len(A), len(A[0])


def transpose(A: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    m, n = shape(A, cols)
    return [[A[i][j] for i in range(m)] for j in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], inner: int | None = None) -> list[list]:
    """Product of ``A`` (m x k) and ``B`` (k x n).

    ``inner`` gives k when both factors are degenerate and it cannot be read
    off the data.
    """
    m = len(A)
    k = len(A[0]) if m else (len(B) if inner is None else inner)
    n = len(B[0]) if len(B) else 0
    if len(B) != k:
        raise ValueError(f"shape mismatch: {m}x{k} times {len(B)}x{n}")
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(n)] for i in range(m)]


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def integral_primitive(v: Sequence) -> Vector:
    """Smallest integer vector on the ray through a rational vector."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


# -- Smith and Hermite normal forms ------------------------------------------


def smith_normal_form(A: Sequence[Sequence[int]], cols: int | None = None) -> SNFDecomposition:
    """Smith normal form by elementary operations with smallest-pivot choice.

    Returns unimodular ``left`` (m x m) and ``right`` (n x n) with
    ``left @ A @ right`` diagonal.  The diagonal is nonnegative and each entry
    divides the next.

    >>> smith_normal_form([[2, 4], [6, 8]]).diag
    (2, 4)
    """
    m, n = shape(A, cols)
    D = [list(map(int, row)) for row in A]
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (D, R):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (D, L):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):
        for M in (D, R):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]
    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SNFDecomposition(L, diag, R)


def hermite_normal_form(rows: Sequence[Sequence[int]], n: int | None = None) -> list[Vector]:
    """Row-style Hermite normal form; zero rows are dropped.

    The returned rows are a canonical basis of the lattice spanned by ``rows``.
    """
    rows = [list(map(int, r)) for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0]) if n is None else n
    out: list[list[int]] = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col]]
        dead = [r for r in rows if not r[col]]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    dead.append(r)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for k, prev in enumerate(out):
            q = prev[col] // piv[col]
            if q:
                out[k] = [a - q * b for a, b in zip(prev, piv)]
        out.append(piv)
        rows = [r for r in dead if any(r)]
        col += 1
    return [tuple(r) for r in out]


# -- lattices ------------------------------------------------------------------


def kernel_basis(A: Sequence[Sequence[int]], cols: int | None = None) -> list[Vector]:
    """Basis of the integer kernel ``{x in Z^n : A x = 0}``, in Hermite form.

    The kernel of an integer matrix is a saturated sublattice, so the basis
    extends to a basis of ``Z^n``.
    """
    m, n = shape(A, cols)
    if m == 0:
        return [tuple(r) for r in identity(n)]
    snf = smith_normal_form(A, n)
    r = sum(1 for d in snf.diag if d)
    basis = [tuple(snf.right[i][j] for i in range(n)) for j in range(r, n)]
    return hermite_normal_form(basis, n)


def cokernel_invariants(A: Sequence[Sequence[int]], cols: int | None = None) -> tuple[int, tuple[int, ...]]:
    """Structure of ``Z^m / A Z^n`` as ``(free_rank, torsion invariant factors)``.

    An injection given by ``A`` is saturated exactly when the torsion is
    empty.
    """
    m, n = shape(A, cols)
    diag = smith_normal_form(A, n).diag
    nonzero = [d for d in diag if d]
    return m - len(nonzero), tuple(d for d in nonzero if d > 1)


def lattice_basis(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Canonical basis of the Z-span of ``vectors`` in ``Z^n``."""
    return hermite_normal_form(vectors, n)


def saturation_basis(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of ``span_Q(vectors) & Z^n``."""
    if not any(any(v) for v in vectors):
        return []
    perp = kernel_basis(list(vectors), n)
    return kernel_basis(perp, n) if perp else [tuple(r) for r in identity(n)]


def is_saturated_sublattice(vectors: Sequence[Sequence[int]], n: int) -> bool:
    basis = lattice_basis(vectors, n)
    if not basis:
        return True
    return not cokernel_invariants(transpose(basis, n), len(basis))[1]


def inverse_unimodular(U: Sequence[Sequence[int]]) -> Matrix:
    inv = rational_inverse(U)
    if inv is None or any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def right_inverse(A: Sequence[Sequence[int]], cols: int) -> Matrix:
    """Integer ``S`` with ``A @ S == I`` for a surjective ``A: Z^cols -> Z^m``."""
    m = len(A)
    if m == 0:
        return [[] for _ in range(cols)]
    snf = smith_normal_form(A, cols)
    if any(d != 1 for d in snf.diag) or len(snf.diag) < m:
        raise ValueError("matrix is not surjective over Z")
    head = [row[:m] for row in snf.right]
    return matmul(head, snf.left)


def quotient_map(sub: Sequence[Sequence[int]], n: int) -> tuple[Matrix, Matrix]:
    """Projection ``Z^n -> Z^n / L`` for a saturated sublattice ``L``.

    Returns ``(proj, section)`` with ``proj`` of shape (n-k) x n killing
    ``L`` and ``proj @ section == I``.  When ``L`` is zero both are the
    identity.
    """
    basis = lattice_basis(sub, n)
    k = len(basis)
    if k == 0:
        return identity(n), identity(n)
    snf = smith_normal_form(transpose(basis, n), k)
    if any(d != 1 for d in snf.diag):
        raise ValueError("sublattice is not saturated")
    proj = [list(row) for row in snf.left[k:]]
    inv = inverse_unimodular(snf.left)
    section = [row[k:] for row in inv]
    return proj, section


def complement_basis(sub: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Vectors completing a basis of a saturated sublattice to one of ``Z^n``."""
    _, section = quotient_map(sub, n)
    return [tuple(col) for col in transpose(section, n - len(lattice_basis(sub, n)))]


def coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Vector | None:
    """Integer coordinates of ``v`` in a lattice basis, or None if ``v`` is outside."""
    if not basis:
        return () if not any(v) else None
    sol = solve_rational(transpose(basis, len(v)), list(v))
    if sol is None or any(x.denominator != 1 for x in sol):
        return None
    return tuple(int(x) for x in sol)


# -- rational elimination ------------------------------------------------------


def _rref(A: Sequence[Sequence], cols: int) -> tuple[list[list[Fraction]], list[int]]:
    M = [[Fraction(x) for x in row] for row in A]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(A: Sequence[Sequence], cols: int | None = None) -> int:
    if len(A) == 0:
        return 0
    return len(_rref(A, len(A[0]) if cols is None else cols)[1])


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One rational solution of ``A x = b`` (free variables set to 0), or None."""
    m = len(A)
    if m == 0:
        return []
    n = len(A[0])
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    M, pivots = _rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(M, pivots):
        x[c] = row[n]
    return x


def rational_inverse(A: Sequence[Sequence]) -> list[list[Fraction]] | None:
    n = len(A)
    aug = [list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    M, pivots = _rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in M[:n]]


def determinant(A: Sequence[Sequence[int]]) -> int:
    n = len(A)
    if n == 0:
        return 1
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return int(det)


def orthogonal_projection(vectors: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction]:
    """Project ``v`` onto the orthogonal complement of ``span(vectors)``."""
    basis = [list(map(Fraction, b)) for b in vectors]
    ortho: list[list[Fraction]] = []
    for b in basis:
        for o in ortho:
            f = dot(b, o) / dot(o, o)
            b = [x - f * y for x, y in zip(b, o)]
        if any(b):
            ortho.append(b)
    w = list(map(Fraction, v))
    for o in ortho:
        f = dot(w, o) / dot(o, o)
        w = [x - f * y for x, y in zip(w, o)]
    return w
