"""Exact rational linear algebra: echelon forms and verified nullspaces.

Vectors are tuples of ``fractions.Fraction`` (or ``int``); matrices are
sequences of such rows.  The two workhorses are

* :func:`rref` -- the unique reduced row echelon form of a matrix, and
* :func:`kernel_basis` -- the unique reduced-echelon basis of the right
  nullspace.

For large systems :func:`kernel_basis` runs a multimodular fast path
(elimination mod word-sized primes with numpy, Chinese remaindering and
rational reconstruction), but the result is accepted only after an
exact verification: the candidate rows must form a reduced echelon
matrix, must each be annihilated by the input matrix exactly, and must
be as many as the modular rank predicts.  A candidate that passes is
*the* canonical kernel basis (reduced echelon bases of a subspace are
unique), so outputs are independent of which primes were used.  Failed
candidates trigger escalation to more primes and finally to the plain
exact elimination, so no tolerance or probabilistic gap is ever
accepted.

The helper :class:`EchelonFrame` maintains an incremental reduced
echelon basis for span/membership bookkeeping in small dimensions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

QQ = Fraction

Vector = Tuple[Fraction, ...]
Matrix = Sequence[Sequence[Fraction]]

# Row*col*min(row,col) above which kernel_basis switches to the
# multimodular path.  Exact elimination is fine below this.
_MODULAR_THRESHOLD = 400_000

# Primes just under 2**30 so products of two residues fit in int64.
_PRIME_CEILING = 1 << 30


def _is_probable_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3e24
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_stream() -> Iterable[int]:
    """Fixed descending sequence of word-sized primes (reproducible)."""
    n = _PRIME_CEILING - 1
    while n > 2:
        if _is_probable_prime(n):
            yield n
        n -= 2


def _as_fraction_rows(matrix: Matrix) -> List[List[Fraction]]:
    return [[Fraction(x) for x in row] for row in matrix]


def _clear_denominators(row: Sequence[Fraction]) -> List[int]:
    lcm = 1
    for x in row:
        d = x.denominator
        if d != 1:
            g = _gcd(lcm, d)
            lcm = lcm // g * d
    return [int(x * lcm) for x in row]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rref(matrix: Matrix, ncols: Optional[int] = None) -> Tuple[List[Vector], List[int]]:
    """Reduced row echelon form over the rationals.

    Returns ``(rows, pivot_columns)`` where ``rows`` are the nonzero
    rows of the RREF (leading coefficient 1, pivot columns cleared
    elsewhere).  Deterministic: pivots are the leftmost usable columns.
    """
    rows = _as_fraction_rows(matrix)
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    for row in rows:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
    pivots: List[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][c]
        if inv != 1:
            rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [tuple(row) for row in rows[:r]], pivots


def matrix_rank(matrix: Matrix, ncols: Optional[int] = None) -> int:
    """Exact rank (via the verified kernel for large inputs)."""
    rows = [row for row in matrix if any(x != 0 for x in row)]
    if not rows:
        return 0
    n = ncols if ncols is not None else len(rows[0])
    if len(rows) * n * min(len(rows), n) <= _MODULAR_THRESHOLD:
        return len(rref(rows, n)[0])
    return n - len(kernel_basis(rows, n))


def _kernel_from_rref(rref_rows: Sequence[Vector], pivots: Sequence[int], ncols: int
                      ) -> List[List[Fraction]]:
    """Nullspace pattern vectors: one per free column (identity there)."""
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rref_rows[i][f]
        basis.append(v)
    return basis


def kernel_basis(matrix: Matrix, ncols: Optional[int] = None) -> List[Vector]:
    """The reduced-echelon basis of the right nullspace.

    The rows of the result form a reduced row echelon matrix spanning
    ``{v : matrix @ v = 0}``; this basis is unique, so the output is a
    canonical invariant of the input.  All arithmetic is exact.
    """
    rows = _as_fraction_rows(matrix)
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return [tuple(Fraction(1) if j == i else Fraction(0) for j in range(ncols))
                for i in range(ncols)]
    work = len(rows) * ncols * min(len(rows), ncols)
    if work > _MODULAR_THRESHOLD:
        result = _kernel_basis_modular(rows, ncols)
        if result is not None:
            return result
    return _kernel_basis_exact(rows, ncols)


def _kernel_basis_exact(rows: List[List[Fraction]], ncols: int) -> List[Vector]:
    rref_rows, pivots = rref(rows, ncols)
    pattern = _kernel_from_rref(rref_rows, pivots, ncols)
    if not pattern:
        return []
    canon, _ = rref(pattern, ncols)
    return canon


# ---------------------------------------------------------------------------
# multimodular path


def _int_rows(rows: List[List[Fraction]]) -> List[List[int]]:
    return [_clear_denominators(row) for row in rows]


def _mod_matrix(int_rows: List[List[int]], p: int, max_abs: int) -> np.ndarray:
    if max_abs < (1 << 62):
        return np.array(int_rows, dtype=np.int64) % p
    return np.array([[x % p for x in row] for row in int_rows], dtype=np.int64)


def _rref_mod_p(a: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    a = a % p
    nrows, ncols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        colvals = a[:, c].copy()
        colvals[r] = 0
        mask = colvals != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(colvals[mask], a[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a[:r], pivots


def _rational_reconstruct(residue: int, modulus: int) -> Optional[Fraction]:
    """Reconstruct p/q with |p|, q <= sqrt(modulus/2) from a residue."""
    bound = math.isqrt((modulus - 1) // 2)
    if bound == 0:
        return None
    r0, r1 = modulus, residue % modulus
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0:
        return None
    num, den = r1, t1
    if den < 0:
        num, den = -num, -den
    if den > bound or _gcd(abs(num), den) != 1:
        return None
    return Fraction(num, den)


def _verify_kernel(int_rows: List[List[int]], candidate: List[List[Fraction]],
                   ncols: int) -> bool:
    """Exact check that every candidate row is annihilated by the matrix.

    Uses residue arithmetic against a rigorous magnitude bound, which is
    an exact zero test (|x| < M and x = 0 mod M imply x = 0).
    """
    if not candidate:
        return True
    scaled: List[List[int]] = []
    max_w = 1
    for v in candidate:
        w = _clear_denominators(v)
        scaled.append(w)
        max_w = max(max_w, max(abs(x) for x in w) or 1)
    max_a = max(max(abs(x) for x in row) or 1 for row in int_rows)
    bound = 2 * ncols * max_a * max_w
    # verification primes ~2**20: int64-safe accumulation up to 2**(40+log2 ncols)
    vprimes: List[int] = []
    m = 1
    n = (1 << 20) - 1
    while m <= bound:
        while not _is_probable_prime(n):
            n -= 2
        vprimes.append(n)
        m *= n
        n -= 2
    wt = [[x for x in w] for w in scaled]
    for p in vprimes:
        a = _mod_matrix(int_rows, p, max_a)
        w = np.array([[x % p for x in row] for row in wt], dtype=np.int64)
        prod = (a @ w.T) % p
        if prod.any():
            return False
    return True


def _is_reduced_echelon(candidate: List[List[Fraction]], ncols: int) -> bool:
    lead_prev = -1
    leads = []
    for v in candidate:
        lead = next((j for j, x in enumerate(v) if x != 0), None)
        if lead is None or lead <= lead_prev or v[lead] != 1:
            return False
        leads.append(lead)
        lead_prev = lead
    for i, v in enumerate(candidate):
        for j, lead in enumerate(leads):
            if i != j and v[lead] != 0:
                return False
    return True


def _kernel_basis_modular(rows: List[List[Fraction]], ncols: int) -> Optional[List[Vector]]:
    int_rows = _int_rows(rows)
    max_abs = max(max(abs(x) for x in row) or 1 for row in int_rows)
    stream = _prime_stream()
    used: List[int] = []
    # per-prime canonical kernel bases (as int residue matrices)
    images: List[Tuple[int, np.ndarray, Tuple[int, ...]]] = []
    batch = 1
    while len(used) < 64:
        for _ in range(batch):
            p = next(stream)
            used.append(p)
            a = _mod_matrix(int_rows, p, max_abs)
            rref_p, pivots = _rref_mod_p(a, p)
            pattern = _kernel_from_rref(
                [tuple(int(x) for x in row) for row in rref_p], pivots, ncols)
            if pattern:
                pat = np.array([[x % p for x in v] for v in pattern], dtype=np.int64)
                canon, kernel_pivots = _rref_mod_p(pat, p)
            else:
                canon = np.zeros((0, ncols), dtype=np.int64)
                kernel_pivots = []
            images.append((p, canon, tuple(kernel_pivots)))
        batch = min(2 * batch, 16)
        # keep only primes agreeing with the largest kernel seen so far
        min_dim = min(img[1].shape[0] for img in images)
        group = [img for img in images if img[1].shape[0] == min_dim]
        shapes = {img[2] for img in group}
        best_shape = min(shapes)
        group = [img for img in group if img[2] == best_shape]
        if min_dim == 0:
            return []
        combined_py = [[0] * ncols for _ in range(min_dim)]
        modulus = 1
        for (p, canon, _shape) in group:
            if modulus == 1:
                combined_py = [[int(x) for x in row] for row in canon]
                modulus = p
            else:
                inv = pow(modulus % p, p - 2, p)
                for i in range(min_dim):
                    row = combined_py[i]
                    crow = canon[i]
                    for j in range(ncols):
                        t = ((int(crow[j]) - row[j]) * inv) % p
                        row[j] = row[j] + modulus * t
                modulus *= p
        candidate: Optional[List[List[Fraction]]] = []
        for row in combined_py:
            frac_row = []
            for x in row:
                f = _rational_reconstruct(x, modulus)
                if f is None:
                    candidate = None
                    break
                frac_row.append(f)
            if candidate is None:
                break
            candidate.append(frac_row)
        if candidate is None:
            continue
        if _is_reduced_echelon(candidate, ncols) and _verify_kernel(int_rows, candidate, ncols):
            return [tuple(v) for v in candidate]
    return None


# ---------------------------------------------------------------------------
# incremental echelon bookkeeping (small dimensions, always exact)


class EchelonFrame:
    """Incrementally maintained reduced echelon basis of a span."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: List[List[Fraction]] = []
        self.leads: List[int] = []

    def reduce(self, vector: Sequence[Fraction]) -> List[Fraction]:
        v = [Fraction(x) for x in vector]
        for row, lead in zip(self.rows, self.leads):
            f = v[lead]
            if f != 0:
                for j in range(lead, self.ncols):
                    v[j] -= f * row[j]
        return v

    def insert(self, vector: Sequence[Fraction]) -> bool:
        """Add the vector to the span; True if it was independent."""
        v = self.reduce(vector)
        lead = next((j for j, x in enumerate(v) if x != 0), None)
        if lead is None:
            return False
        inv = 1 / v[lead]
        v = [x * inv for x in v]
        for row in self.rows:
            f = row[lead]
            if f != 0:
                for j in range(lead, self.ncols):
                    row[j] -= f * v[j]
        pos = 0
        while pos < len(self.leads) and self.leads[pos] < lead:
            pos += 1
        self.rows.insert(pos, v)
        self.leads.insert(pos, lead)
        return True

    def contains(self, vector: Sequence[Fraction]) -> bool:
        return all(x == 0 for x in self.reduce(vector))

    @property
    def dim(self) -> int:
        return len(self.rows)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(matrix: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [dot(row, v) for row in matrix]


def normalize_primitive(vector: Sequence[Fraction]) -> Tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector, first
    nonzero entry positive.  Raises on the zero vector."""
    ints = _clear_denominators([Fraction(x) for x in vector])
    g = 0
    for x in ints:
        g = _gcd(g, abs(x))
    if g == 0:
        raise ValueError("cannot normalize the zero vector")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)
