"""Exact integer linear algebra on row lists of Python ints.

Everything here works on plain ``list[list[int]]`` so that intermediate
values never overflow; numpy arrays are accepted on input and converted.

>>> smith_diagonal([[2, 0], [0, 3]])
[1, 6]
>>> kernel_basis([[1, 1, 1]], 3)
[[1, 0, -1], [0, 1, -1]]
"""

from __future__ import annotations

from math import gcd

import numpy as np

# numpy products are only trusted below this bound; above it we fall back
# to object arrays (arbitrary precision).
_INT64_SAFE = 2**62


def as_rows(A, ncols: int | None = None) -> list[list[int]]:
    """Convert a matrix-like object to a list of rows of Python ints."""
    if isinstance(A, np.ndarray):
        if A.ndim == 1:
            A = A.reshape(1, -1)
        return [[int(x) for x in row] for row in A.tolist()]
    rows = [[int(x) for x in row] for row in A]
    if ncols is not None:
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
    return rows


def to_array(rows, shape=None) -> np.ndarray:
    """Rows of ints -> int64 array, or object array if entries are too big."""
    if shape is not None and (shape[0] == 0 or shape[1] == 0):
        return np.zeros(shape, dtype=np.int64)
    big = any(abs(x) >= _INT64_SAFE for row in rows for x in row)
    arr = np.array(rows, dtype=object if big else np.int64)
    if shape is not None:
        arr = arr.reshape(shape)
    return arr


def imatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an overflow guard that escalates to Python ints."""
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[-1]), dtype=np.int64)
    if a.dtype != object and b.dtype != object:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[-1]
        if bound < _INT64_SAFE:
            return a @ b
    out = a.astype(object) @ b.astype(object)
    if all(abs(x) < _INT64_SAFE for x in out.flat):
        return out.astype(np.int64)
    return out


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(rows, ncols: int) -> list[list[int]]:
    return [list(col) for col in zip(*rows)] if rows else [[] for _ in range(ncols)]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _axpy(dst: list[int], src: list[int], q: int, start: int = 0) -> None:
    # dst -= q * src, from column ``start`` on
    if q == 1:
        for j in range(start, len(dst)):
            s = src[j]
            if s:
                dst[j] -= s
    elif q == -1:
        for j in range(start, len(dst)):
            s = src[j]
            if s:
                dst[j] += s
    else:
        for j in range(start, len(dst)):
            s = src[j]
            if s:
                dst[j] -= q * s


def hnf(A, ncols: int, transform: bool = False):
    """Row-style Hermite normal form.

    Returns ``(H, pivots, U)`` where ``H`` holds only the nonzero rows,
    ``pivots`` their pivot columns and ``U`` (when requested) is a unimodular
    matrix with ``U @ A`` equal to ``H`` padded with zero rows.  Pivots are
    positive and entries above a pivot lie in ``[0, pivot)``, so the result
    depends only on the row lattice.
    """
    H = as_rows(A, ncols)
    m = len(H)
    U = identity(m) if transform else None
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == m:
            break
        piv = None
        best = None
        for i in range(r, m):
            v = H[i][c]
            if v and (best is None or abs(v) < best):
                piv, best = i, abs(v)
                if best == 1:
                    break
        if piv is None:
            continue
        if piv != r:
            H[r], H[piv] = H[piv], H[r]
            if U is not None:
                U[r], U[piv] = U[piv], U[r]
        Hr = H[r]
        for i in range(r + 1, m):
            Hi = H[i]
            b = Hi[c]
            if not b:
                continue
            a = Hr[c]
            if b % a == 0:
                q = b // a
                _axpy(Hi, Hr, q, c)
                if U is not None:
                    _axpy(U[i], U[r], q)
            else:
                g, x, y = xgcd(a, b)
                ag, bg = a // g, b // g
                new_r = [x * u + y * v for u, v in zip(Hr, Hi)]
                new_i = [ag * v - bg * u for u, v in zip(Hr, Hi)]
                H[r], H[i] = new_r, new_i
                Hr = new_r
                if U is not None:
                    Ur, Ui = U[r], U[i]
                    U[r] = [x * u + y * v for u, v in zip(Ur, Ui)]
                    U[i] = [ag * v - bg * u for u, v in zip(Ur, Ui)]
        if Hr[c] < 0:
            H[r] = Hr = [-v for v in Hr]
            if U is not None:
                U[r] = [-v for v in U[r]]
        p = Hr[c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                _axpy(H[i], Hr, q, c)
                if U is not None:
                    _axpy(U[i], U[r], q)
        pivots.append(c)
        r += 1
    return H[:r], pivots, U


def hnf_basis(A, ncols: int) -> list[list[int]]:
    """Canonical basis (HNF rows) of the lattice spanned by the rows of A."""
    return hnf(A, ncols)[0]


def smith(A, ncols: int, want_u: bool = True, want_v: bool = True):
    """Smith normal form ``U @ A @ V = D``.

    Returns ``(U, D, V)`` as row lists (``U``/``V`` are ``None`` when not
    requested).  The diagonal is nonnegative with each entry dividing the next.
    """
    D = as_rows(A, ncols)
    m, n = len(D), ncols
    U = identity(m) if want_u else None
    Vt = identity(n) if want_v else None  # rows of Vt are columns of V
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i0, j0 = best
        _swap_rows(D, U, t, i0)
        _swap_cols(D, Vt, t, j0)
        while True:
            p = D[t][t]
            dirty = False
            Dt = D[t]
            for i in range(t + 1, m):
                b = D[i][t]
                if b:
                    q = b // p
                    _axpy(D[i], Dt, q, t)
                    if U is not None:
                        _axpy(U[i], U[t], q)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                b = Dt[j]
                if b:
                    q = b // p
                    for row in D:
                        s = row[t]
                        if s:
                            row[j] -= q * s
                    if Vt is not None:
                        _axpy(Vt[j], Vt[t], q)
                    if Dt[j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, m):
                    v = D[i][t]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, t)
                for j in range(t, n):
                    v = Dt[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), t, j)
                _, i0, j0 = best
                _swap_rows(D, U, t, i0)
                _swap_cols(D, Vt, t, j0)
                continue
            bad = None
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _axpy(D[t], D[bad], -1, t)
            if U is not None:
                _axpy(U[t], U[bad], -1)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
        t += 1
    V = transpose(Vt, n) if Vt is not None else None
    return U, D, V


def _swap_rows(D, U, a, b):
    if a != b:
        D[a], D[b] = D[b], D[a]
        if U is not None:
            U[a], U[b] = U[b], U[a]


def _swap_cols(D, Vt, a, b):
    if a != b:
        for row in D:
            row[a], row[b] = row[b], row[a]
        if Vt is not None:
            Vt[a], Vt[b] = Vt[b], Vt[a]


def smith_diagonal(A, ncols: int | None = None) -> list[int]:
    """Nonzero invariant factors of A (in divisibility order)."""
    rows = as_rows(A)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    H, _, _ = hnf(rows, ncols)
    if not H:
        return []
    _, D, _ = smith(H, ncols, want_u=False, want_v=False)
    return [D[i][i] for i in range(min(len(D), ncols)) if D[i][i]]


def kernel_basis(A, ncols: int) -> list[list[int]]:
    """Canonical (HNF) basis of the saturated lattice ``{x : A x = 0}``."""
    H, piv, _ = hnf(A, ncols)
    k = len(H)
    if k == 0:
        return identity(ncols)
    pivset = set(piv)
    free = [c for c in range(ncols) if c not in pivset]
    if not free:
        return []
    if all(H[i][piv[i]] == 1 for i in range(k)):
        sparse = [[(c, v) for c, v in enumerate(row) if v and c > piv[i]] for i, row in enumerate(H)]
        basis = []
        for f in free:
            x = [0] * ncols
            x[f] = 1
            for i in range(k - 1, -1, -1):
                s = 0
                for c, v in sparse[i]:
                    xc = x[c]
                    if xc:
                        s += v * xc
                x[piv[i]] = -s
            basis.append(x)
    else:
        _, D, V = smith(H, ncols, want_u=False, want_v=True)
        r = sum(1 for i in range(min(k, ncols)) if D[i][i])
        basis = [[V[row][j] for row in range(ncols)] for j in range(r, ncols)]
    return hnf_basis(basis, ncols)


def solve_in_basis(H, pivots, v) -> list[int] | None:
    """Coefficients c with ``sum c_i H_i = v`` for an HNF basis H, or None."""
    v = list(v)
    coeffs = []
    for row, p in zip(H, pivots):
        a = v[p]
        if a % row[p]:
            return None
        c = a // row[p]
        coeffs.append(c)
        if c:
            _axpy(v, row, c, p)
    if any(v):
        return None
    return coeffs


def pivots_of(H) -> list[int]:
    out = []
    for row in H:
        for j, x in enumerate(row):
            if x:
                out.append(j)
                break
    return out


def quotient_invariants(big, small, ncols: int) -> tuple[int, list[int]]:
    """Structure of ``span(big) / span(small)``; small must lie inside big.

    Returns ``(free_rank, torsion)`` with torsion invariant factors > 1.
    """
    H, piv, _ = hnf(big, ncols)
    k = len(H)
    coords = []
    for v in small:
        c = solve_in_basis(H, piv, v)
        if c is None:
            raise ValueError("sublattice is not contained in the ambient lattice")
        if any(c):
            coords.append(c)
    if k == 0:
        return 0, []
    diag = smith_diagonal(coords, k) if coords else []
    torsion = [d for d in diag if d > 1]
    return k - len(diag), torsion


def left_inverse(K_cols) -> list[list[int]]:
    """Integer L with ``L K = I`` for a saturated full-column-rank K.

    K is given as a list of columns (each a vector in the ambient space).
    """
    cols = as_rows(K_cols)
    k = len(cols)
    if k == 0:
        return []
    n = len(cols[0])
    # rows of K (n x k); U K = [I; 0] for saturated K
    K = transpose(cols, n)
    H, piv, U = hnf(K, k, transform=True)
    if len(H) != k or any(H[i][j] != (1 if i == j else 0) for i in range(k) for j in range(k)):
        raise ValueError("columns do not span a saturated sublattice")
    return U[:k]


def inverse_unimodular(M) -> list[list[int]]:
    """Inverse of a square unimodular integer matrix (raises otherwise)."""
    rows = as_rows(M)
    n = len(rows)
    if n == 0:
        return []
    H, piv, U = hnf(rows, n, transform=True)
    if len(H) != n or any(H[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
        raise ValueError("matrix is not unimodular")
    return U


def is_saturated(K_cols) -> bool:
    cols = as_rows(K_cols)
    if not cols:
        return True
    k = len(cols[0])
    diag = smith_diagonal(cols, k)
    return len(diag) == k and all(d == 1 for d in diag)


def lattice_sum(*parts, ncols: int) -> list[list[int]]:
    rows = [list(v) for part in parts for v in part]
    return hnf_basis(rows, ncols)


def lattice_contains(H, pivots, v) -> bool:
    return solve_in_basis(H, pivots, v) is not None


def gcd_list(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g
