"""Exact rational numerics: tensors, matrices, polynomials, recurrences.

Everything runs on fractions.Fraction.  No floats anywhere; degenerate or
irrational situations are reported, never approximated.  Matrices are dense
(flat row-major entries) but the elimination and multiplication routines skip
zero entries, which matters for the large Kronecker-product structure tensors
whose nonzero count is tiny compared to their volume.
"""
from __future__ import annotations

from fractions import Fraction
from math import prod

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x) -> Fraction:
    """Coerce an int, string like '-3/4', or Fraction to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rat_to_str(x: Fraction) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# tensors


class Tensor:
    """Dense tensor with explicit shape and flat row-major entries.

    shape == () is a scalar.  Entries are Fractions.
    """

    __slots__ = ("shape", "entries", "_nz")

    def __init__(self, shape, entries):
        self.shape = tuple(shape)
        n = prod(self.shape) if self.shape else 1
        if len(entries) != n:
            raise ValueError(f"shape {self.shape} needs {n} entries, got {len(entries)}")
        self.entries = entries
        self._nz = None

    @classmethod
    def zeros(cls, shape):
        n = prod(shape) if shape else 1
        return cls(shape, [ZERO] * n)

    def flat_index(self, idx) -> int:
        k = 0
        for i, n in zip(idx, self.shape):
            if not 0 <= i < n:
                raise IndexError(f"index {idx} out of range for shape {self.shape}")
            k = k * n + i
        return k

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.entries[self.flat_index(idx)]

    def __setitem__(self, idx, value):
        if isinstance(idx, int):
            idx = (idx,)
        self.entries[self.flat_index(idx)] = rat(value)
        self._nz = None

    @classmethod
    def from_entries(cls, shape, items):
        """Build from a {multi_index: value} dict.

        Caches the nonzero list directly, so large mostly-zero tensors never
        need a full dense scan.
        """
        t = cls.zeros(shape)
        nz = []
        for idx, v in items.items():
            v = rat(v)
            if not v:
                continue
            k = t.flat_index(idx)
            t.entries[k] = v
            nz.append((k, v))
        nz.sort()
        t._nz = nz
        return t

    def nonzeros(self):
        """Cached list of (flat_index, value) with value != 0."""
        if self._nz is None:
            self._nz = [(k, v) for k, v in enumerate(self.entries) if v]
        return self._nz

    def iter_nonzeros(self):
        """Yield (multi_index, value) for the nonzero entries."""
        for k, v in self.nonzeros():
            yield self.unflatten(k), v

    def unflatten(self, k: int):
        idx = []
        for n in reversed(self.shape):
            idx.append(k % n)
            k //= n
        return tuple(reversed(idx))

    def scale(self, c) -> "Tensor":
        c = rat(c)
        return Tensor(self.shape, [c * v if v else ZERO for v in self.entries])

    def __eq__(self, other):
        return isinstance(other, Tensor) and self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"Tensor(shape={self.shape})"


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense matrix, shape [rows, cols], flat row-major Fraction entries."""

    __slots__ = ("rows", "cols", "entries", "_nzrows")

    def __init__(self, rows: int, cols: int, entries):
        if len(entries) != rows * cols:
            raise ValueError(f"{rows}x{cols} matrix needs {rows * cols} entries")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._nzrows = None

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n):
        e = [ZERO] * (n * n)
        for i in range(n):
            e[i * n + i] = ONE
        return cls(n, n, e)

    @classmethod
    def from_rows(cls, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        flat = []
        for r in rows_list:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(rat(x) for x in r)
        return cls(rows, cols, flat)

    @classmethod
    def column(cls, vec):
        return cls(len(vec), 1, [rat(x) for x in vec])

    def to_json(self):
        n = self.cols
        return [[rat_to_str(self.entries[i * n + j]) for j in range(n)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, obj, rows=None, cols=None):
        """Rebuild from nested string lists; explicit rows/cols disambiguate
        empty shapes like 0 x n."""
        if rows is None:
            rows = len(obj)
        if cols is None:
            cols = len(obj[0]) if obj else 0
        m = cls.from_rows(obj) if obj else cls.zeros(0, cols)
        if m.rows != rows or m.cols != cols:
            raise ValueError(f"expected {rows}x{cols} matrix, got {m.rows}x{m.cols}")
        return m

    @classmethod
    def row(cls, vec):
        return cls(1, len(vec), [rat(x) for x in vec])

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r * self.cols + c]

    def __setitem__(self, rc, value):
        r, c = rc
        self.entries[r * self.cols + c] = rat(value)
        self._nzrows = None

    def to_rows(self):
        n = self.cols
        return [self.entries[i * n:(i + 1) * n] for i in range(self.rows)]

    def nonzero_rows(self):
        """Cached list, per row, of (col, value) pairs with value != 0."""
        if self._nzrows is None:
            n = self.cols
            out = []
            for i in range(self.rows):
                base = i * n
                out.append([(j, self.entries[base + j]) for j in range(n) if self.entries[base + j]])
            self._nzrows = out
        return self._nzrows

    def __add__(self, other):
        self._check_same(other)
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same(other)
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def _check_same(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def scale(self, c):
        c = rat(c)
        return Matrix(self.rows, self.cols, [c * v if v else ZERO for v in self.entries])

    def __mul__(self, other):
        """Matrix product, skipping zero entries of the left factor."""
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = [ZERO] * (self.rows * other.cols)
        bn = other.nonzero_rows()
        oc = other.cols
        for i, arow in enumerate(self.nonzero_rows()):
            base = i * oc
            for j, a in arow:
                for k, b in bn[j]:
                    out[base + k] += a * b
        return Matrix(self.rows, other.cols, out)

    def kron(self, other):
        """Kronecker product; index of (i,j) in the product is i*dim2 + j."""
        r = self.rows * other.rows
        c = self.cols * other.cols
        out = [ZERO] * (r * c)
        for i, arow in enumerate(self.nonzero_rows()):
            for k, brow in enumerate(other.nonzero_rows()):
                base_r = (i * other.rows + k) * c
                for j, a in arow:
                    off = j * other.cols
                    for l, b in brow:
                        out[base_r + off + l] = a * b
        return Matrix(r, c, out)

    def transpose(self):
        out = [ZERO] * (self.rows * self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out[j * self.rows + i] = self.entries[i * self.cols + j]
        return Matrix(self.cols, self.rows, out)

    def trace(self):
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        return sum((self.entries[i * self.cols + i] for i in range(self.rows)), ZERO)

    def is_zero(self):
        return all(not v for v in self.entries)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        if self.rows * self.cols <= 16:
            return f"Matrix({self.to_rows()})"
        return f"Matrix({self.rows}x{self.cols})"

    def rank(self):
        ech, piv = _echelon(self._dict_rows(), self.cols)
        return len(piv)

    def _dict_rows(self):
        out = []
        n = self.cols
        for i in range(self.rows):
            base = i * n
            d = {j: self.entries[base + j] for j in range(n) if self.entries[base + j]}
            if d:
                out.append(d)
        return out

    def solve(self, rhs):
        """Solve self @ x = rhs (rhs a list).  Returns a solution with free
        coordinates set to zero, or None if inconsistent."""
        return solve(self, rhs)

    def nullspace(self):
        return nullspace(self)

    def inverse(self):
        return inverse(self)


# elimination core: rows are {col: value} dicts


def _echelon(drows, ncols):
    """Reduce dict-rows to echelon form.  Returns (pivot_rows, pivot_cols)
    where pivot_rows[k] is normalized to have 1 at pivot_cols[k]."""
    pivots = []        # sorted list of pivot cols
    prows = {}         # pivot col -> row dict
    for d in drows:
        d = dict(d)
        while d:
            c = min(d)
            if c in prows:
                f = d.pop(c)
                for cc, v in prows[c].items():
                    if cc == c:
                        continue
                    w = d.get(cc, ZERO) - f * v
                    if w:
                        d[cc] = w
                    elif cc in d:
                        del d[cc]
            else:
                f = d[c]
                if f != 1:
                    d = {cc: v / f for cc, v in d.items()}
                prows[c] = d
                pivots.append(c)
                break
    pivots.sort()
    return [prows[c] for c in pivots], pivots


def rank_of_rows(rows_list) -> int:
    drows = []
    for r in rows_list:
        d = {j: v for j, v in enumerate(r) if v}
        if d:
            drows.append(d)
    return len(_echelon(drows, len(rows_list[0]) if rows_list else 0)[1])


def solve(a: Matrix, rhs):
    """Particular solution of a x = rhs (free coordinates zero), or None."""
    n = a.cols
    drows = []
    for i in range(a.rows):
        base = i * n
        d = {j: a.entries[base + j] for j in range(n) if a.entries[base + j]}
        b = rat(rhs[i])
        if b:
            d[n] = b  # row ops preserve "sum d[j] x_j = d[n]"
        if d:
            drows.append(d)
    ech, piv = _echelon(drows, n + 1)
    if piv and piv[-1] == n:
        return None  # pivot in the augmented column: inconsistent
    x = [ZERO] * n
    # each echelon row touches only its pivot and larger columns, so walking
    # pivots from the right makes every non-pivot term already known
    for k in range(len(piv) - 1, -1, -1):
        c = piv[k]
        row = ech[k]
        s = row.get(n, ZERO)
        for cc, v in row.items():
            if cc != c and cc != n:
                s -= v * x[cc]
        x[c] = s
    return x


def nullspace(a: Matrix):
    """Basis of the right nullspace as a list of length-cols vectors."""
    n = a.cols
    ech, piv = _echelon(a._dict_rows(), n)
    pivset = set(piv)
    # eliminate pivot columns from later rows completely (make RREF)
    rref = _to_rref(ech, piv)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [ZERO] * n
        v[free] = ONE
        for row, c in zip(rref, piv):
            w = row.get(free, ZERO)
            if w:
                v[c] = -w
        basis.append(v)
    return basis


def _to_rref(ech, piv):
    rref = [dict(r) for r in ech]
    for k in range(len(piv) - 1, -1, -1):
        c = piv[k]
        for j in range(k):
            f = rref[j].get(c, ZERO)
            if f:
                for cc, v in rref[k].items():
                    w = rref[j].get(cc, ZERO) - f * v
                    if w:
                        rref[j][cc] = w
                    elif cc in rref[j]:
                        del rref[j][cc]
    return rref


def inverse(a: Matrix):
    """Inverse, or None if singular."""
    if a.rows != a.cols:
        raise ValueError("inverse of a non-square matrix")
    n = a.rows
    drows = []
    for i in range(n):
        base = i * n
        d = {j: a.entries[base + j] for j in range(n) if a.entries[base + j]}
        d[n + i] = ONE
        drows.append(d)
    ech, piv = _echelon(drows, 2 * n)
    if [c for c in piv if c < n] != list(range(n)):
        return None
    rref = _to_rref(ech, piv)
    out = [ZERO] * (n * n)
    for row, c in zip(rref, piv):
        for cc, v in row.items():
            if cc >= n:
                out[c * n + (cc - n)] = v
    return Matrix(n, n, out)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Univariate polynomial over Q, coefficients lowest-degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [rat(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls):
        return cls([])

    @classmethod
    def one(cls):
        return cls([1])

    @classmethod
    def t(cls):
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots):
        p = cls.one()
        for r in roots:
            p = p * cls([-rat(r), 1])
        return p

    @property
    def degree(self):
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c):
        c = rat(c)
        return Poly([c * v for v in self.coeffs])

    def shift(self, k: int):
        """Multiply by t**k."""
        if self.is_zero():
            return self
        return Poly([ZERO] * k + list(self.coeffs))

    def __call__(self, x):
        x = rat(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        q = [ZERO] * max(0, len(rem) - d)
        while len(rem) - 1 >= d and rem:
            while rem and not rem[-1]:
                rem.pop()
            if len(rem) - 1 < d:
                break
            f = rem[-1] / lead
            k = len(rem) - 1 - d
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            rem.pop()
        return Poly(q), Poly(rem)

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(1 / self.coeffs[-1])

    def derivative(self):
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(rat_to_str(c))
            else:
                t = "t" if i == 1 else f"t^{i}"
                parts.append(t if c == 1 else f"{rat_to_str(c)}*{t}")
        return "Poly(" + " + ".join(parts) + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def is_squarefree(p: Poly) -> bool:
    if p.degree <= 0:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def minimal_polynomial(m: Matrix) -> Poly:
    """Minimal polynomial of a square matrix: lcm over basis vectors of the
    minimal annihilator of the Krylov sequence v, m v, m^2 v, ..."""
    if m.rows != m.cols:
        raise ValueError("minimal polynomial of a non-square matrix")
    n = m.rows
    result = Poly.one()
    for start in range(n):
        # skip if result already annihilates e_start
        v = [ZERO] * n
        v[start] = ONE
        if _poly_apply_kills(result, m, v):
            continue
        ann = _krylov_annihilator(m, v)
        result = _poly_lcm(result, ann)
        if result.degree == n:
            break
    return result


def _mat_apply(m: Matrix, v):
    out = [ZERO] * m.rows
    for i, row in enumerate(m.nonzero_rows()):
        s = ZERO
        for j, a in row:
            if v[j]:
                s += a * v[j]
        out[i] = s
    return out


def _poly_apply_kills(p: Poly, m: Matrix, v) -> bool:
    acc = [ZERO] * len(v)
    w = list(v)
    for c in p.coeffs:
        if c:
            acc = [x + c * y for x, y in zip(acc, w)]
        w = _mat_apply(m, w)
    return all(not x for x in acc)


def _krylov_annihilator(m: Matrix, v) -> Poly:
    n = len(v)
    chain = [list(v)]
    # grow until linearly dependent
    while True:
        rows = chain
        r = rank_of_rows(rows)
        if r < len(rows):
            break
        chain.append(_mat_apply(m, chain[-1]))
    k = len(chain) - 1  # first k vectors independent, chain[k] dependent
    a = Matrix.from_rows([[chain[i][j] for i in range(k)] for j in range(n)])
    sol = a.solve([chain[k][j] for j in range(n)])
    assert sol is not None
    return Poly([-c for c in sol] + [ONE])


def _poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly.zero()
    g = poly_gcd(a, b)
    return (a * b.divmod(g)[0]).monic()


def rational_roots(p: Poly):
    """All rational roots with multiplicities.

    Returns (roots, fully_split) where roots is a list of (root, multiplicity)
    sorted by root, and fully_split says whether the polynomial factors
    completely over Q (i.e. deflating all rational roots leaves a constant).
    """
    if p.is_zero():
        raise ValueError("rational_roots of the zero polynomial")
    roots = []
    # strip t^k
    k = 0
    cs = list(p.coeffs)
    while cs and not cs[0]:
        cs.pop(0)
        k += 1
    if k:
        roots.append((ZERO, k))
    q = Poly(cs)
    if q.degree >= 1:
        # integerize
        from math import gcd, lcm
        den = lcm(*[c.denominator for c in q.coeffs])
        ints = [int(c * den) for c in q.coeffs]
        g = gcd(*ints)
        if g > 1:
            ints = [c // g for c in ints]
        a0, ad = abs(ints[0]), abs(ints[-1])
        for num in sorted(_divisors(a0)):
            for d in sorted(_divisors(ad)):
                for s in (1, -1):
                    cand = Fraction(s * num, d)
                    mult = 0
                    while q.degree >= 1 and not q(cand):
                        q = q.divmod(Poly([-cand, 1]))[0]
                        mult += 1
                    if mult:
                        roots.append((cand, mult))
    roots.sort(key=lambda rm: rm[0])
    return roots, q.degree <= 0


def _divisors(n: int):
    if n == 0:
        return []
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return out


def recurrence_from_sequences(seqs, max_order: int):
    """Minimal monic polynomial p of degree d <= max_order with
    sum_i p_i * s[k+i] = 0 for every window of every sequence, or None.

    Every sequence must have length >= 2*max_order + 1 so that a spurious
    short-data annihilator cannot be returned.  All-zero input returns t by
    convention (so the "spectrum" is {0} rather than the empty product).
    """
    seqs = [[rat(x) for x in s] for s in seqs]
    if not seqs:
        raise ValueError("no sequences given")
    for s in seqs:
        if len(s) < 2 * max_order + 1:
            raise ValueError(
                f"sequence of length {len(s)} is too short for order {max_order}"
                f" (need at least {2 * max_order + 1})")
    if all(not x for s in seqs for x in s):
        return Poly.t()
    for d in range(1, max_order + 1):
        rows = []
        rhs = []
        for s in seqs:
            for k in range(len(s) - d):
                rows.append(s[k:k + d])
                rhs.append(-s[k + d])
        a = Matrix.from_rows(rows)
        sol = a.solve(rhs)
        if sol is not None:
            return Poly(list(sol) + [ONE])
    return None


def hadamard(a, b):
    """Pointwise product of two equal-length lists of rationals."""
    return [x * y for x, y in zip(a, b)]
