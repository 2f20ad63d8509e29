"""Finite-dimensional Frobenius algebras over the rationals.

An algebra lives on a fixed basis e_0 .. e_{n-1} and is given by four
structure tensors:

    product[c, a, b]    coefficient of e_c in e_a * e_b
    unit[a]             coordinates of the unit element
    coproduct[a, b, c]  coefficient of e_a (x) e_b in coproduct(e_c)
    counit[a]           value of the counit on e_a

check_frobenius verifies the axioms entry by entry and reports which hold.
All checks run over the nonzero entries only, so the large Kronecker-product
algebras produced by tensor_product stay cheap to verify.
"""
from __future__ import annotations

from dataclasses import dataclass

from .numkit import Matrix, Rat, Tensor, ZERO, ONE, rat, rat_to_str


class AxiomError(ValueError):
    """An algebraic axiom required by the requested operation does not hold."""


class RankError(ValueError):
    """A bilinear form that must be nondegenerate is singular."""

    def __init__(self, message, rank, dim):
        super().__init__(f"{message}: rank {rank} of {dim} (deficiency {dim - rank})")
        self.rank = rank
        self.dim = dim


class ConsistencyError(RuntimeError):
    """An internal cross-check failed.  This signals a bug or an input that
    violates a precondition the operation could not verify directly."""


def _strip(d):
    return {k: v for k, v in d.items() if v}


class FrobeniusAlgebra:
    """Structure-tensor container.  Instances are treated as immutable."""

    def __init__(self, product: Tensor, unit: Tensor, coproduct: Tensor, counit: Tensor):
        n = unit.shape[0] if unit.shape else 0
        if product.shape != (n, n, n) or coproduct.shape != (n, n, n) or counit.shape != (n,) or unit.shape != (n,):
            raise ValueError(
                f"inconsistent shapes: product {product.shape}, unit {unit.shape}, "
                f"coproduct {coproduct.shape}, counit {counit.shape}"
            )
        self.dim = n
        self.product = product
        self.unit = unit
        self.coproduct = coproduct
        self.counit = counit
        self._mult = None
        self._comult = None
        self._pairing = None
        self._pmat = None
        self._dmat = None

    def mult_table(self):
        """dict (a, b) -> [(c, coeff)] over nonzero product entries."""
        if self._mult is None:
            table = {}
            for (c, a, b), v in self.product.iter_nonzeros():
                table.setdefault((a, b), []).append((c, v))
            self._mult = table
        return self._mult

    def comult_table(self):
        """dict c -> [(a, b, coeff)] over nonzero coproduct entries."""
        if self._comult is None:
            table = {}
            for (a, b, c), v in self.coproduct.iter_nonzeros():
                table.setdefault(c, []).append((a, b, v))
            self._comult = table
        return self._comult

    def mult_dict(self, x: dict, y: dict) -> dict:
        """Multiply two vectors given as {basis_index: coeff} dicts."""
        table = self.mult_table()
        out = {}
        for a, xa in x.items():
            for b, yb in y.items():
                for c, v in table.get((a, b), ()):
                    out[c] = out.get(c, ZERO) + xa * yb * v
        return _strip(out)

    def pairing(self) -> Matrix:
        """Matrix of the form b(x, y) = counit(x * y)."""
        if self._pairing is None:
            n = self.dim
            m = Matrix.zeros(n, n)
            for (c, a, b), v in self.product.iter_nonzeros():
                e = self.counit[c]
                if e:
                    m[a, b] = m[a, b] + e * v
            self._pairing = m
        return self._pairing

    def copairing(self) -> Matrix:
        """Matrix of coproduct(unit), indexed [a, b]."""
        n = self.dim
        m = Matrix.zeros(n, n)
        for (a, b, c), v in self.coproduct.iter_nonzeros():
            u = self.unit[c]
            if u:
                m[a, b] = m[a, b] + u * v
        return m

    def product_matrix(self) -> Matrix:
        """Product as a matrix [n, n*n]; column index is a*n + b."""
        if self._pmat is None:
            n = self.dim
            m = Matrix.zeros(n, n * n)
            for (c, a, b), v in self.product.iter_nonzeros():
                m[c, a * n + b] = v
            self._pmat = m
        return self._pmat

    def coproduct_matrix(self) -> Matrix:
        """Coproduct as a matrix [n*n, n]; row index is a*n + b."""
        if self._dmat is None:
            n = self.dim
            m = Matrix.zeros(n * n, n)
            for (a, b, c), v in self.coproduct.iter_nonzeros():
                m[a * n + b, c] = v
            self._dmat = m
        return self._dmat

    def unit_matrix(self) -> Matrix:
        m = Matrix.zeros(self.dim, 1)
        for k, v in self.unit.nonzeros():
            m[k, 0] = v
        return m

    def counit_matrix(self) -> Matrix:
        m = Matrix.zeros(1, self.dim)
        for k, v in self.counit.nonzeros():
            m[0, k] = v
        return m

    def __eq__(self, other):
        return (
            isinstance(other, FrobeniusAlgebra)
            and self.product == other.product
            and self.unit == other.unit
            and self.coproduct == other.coproduct
            and self.counit == other.counit
        )

    def __repr__(self):
        return f"FrobeniusAlgebra(dim={self.dim})"

    def to_json(self):
        n = self.dim
        return {
            "dim": n,
            "product": [
                [[rat_to_str(self.product[(c, a, b)]) for b in range(n)] for a in range(n)]
                for c in range(n)
            ],
            "unit": [rat_to_str(self.unit[(a,)]) for a in range(n)],
            "coproduct": [
                [[rat_to_str(self.coproduct[(a, b, c)]) for c in range(n)] for b in range(n)]
                for a in range(n)
            ],
            "counit": [rat_to_str(self.counit[(a,)]) for a in range(n)],
        }

    @classmethod
    def from_json(cls, obj):
        n = obj["dim"]
        prod = Tensor((n, n, n), [rat(x) for plane in obj["product"] for row in plane for x in row])
        cop = Tensor((n, n, n), [rat(x) for plane in obj["coproduct"] for row in plane for x in row])
        unit = Tensor((n,), [rat(x) for x in obj["unit"]])
        counit = Tensor((n,), [rat(x) for x in obj["counit"]])
        return cls(prod, unit, cop, counit)


# ---------------------------------------------------------------------------
# axiom checks


STRUCTURAL_FLAGS = (
    "unital",
    "counital",
    "associative",
    "coassociative",
    "frobenius",
    "pairing_nondegenerate",
)

ALL_FLAGS = STRUCTURAL_FLAGS + ("commutative", "symmetric")


@dataclass
class FrobeniusReport:
    flags: dict
    first_violation: str | None
    details: dict

    @property
    def valid(self) -> bool:
        """True when every structural axiom holds (commutative and symmetric
        are descriptive, not required)."""
        return all(self.flags[name] for name in STRUCTURAL_FLAGS)

    def to_json(self):
        return {"flags": dict(self.flags), "first_violation": self.first_violation}


def _unital_violation(n, mult, unit_nz):
    for a in range(n):
        left = {}
        right = {}
        for b, ub in unit_nz:
            for c, v in mult.get((b, a), ()):
                left[c] = left.get(c, ZERO) + ub * v
            for c, v in mult.get((a, b), ()):
                right[c] = right.get(c, ZERO) + ub * v
        if _strip(left) != {a: ONE}:
            return f"unit * e_{a} != e_{a}"
        if _strip(right) != {a: ONE}:
            return f"e_{a} * unit != e_{a}"
    return None


def _counital_violation(n, cmap, counit):
    for c in range(n):
        lacc = {}
        racc = {}
        for a, b, v in cmap.get(c, ()):
            ea = counit[a]
            if ea:
                lacc[b] = lacc.get(b, ZERO) + ea * v
            eb = counit[b]
            if eb:
                racc[a] = racc.get(a, ZERO) + eb * v
        if _strip(lacc) != {c: ONE}:
            return f"(counit x id) o coproduct != id at basis {c}"
        if _strip(racc) != {c: ONE}:
            return f"(id x counit) o coproduct != id at basis {c}"
    return None


def _product_joins(product):
    by_in1 = {}
    by_in2 = {}
    for (d, x, y), v in product.iter_nonzeros():
        by_in1.setdefault(x, []).append((d, y, v))
        by_in2.setdefault(y, []).append((d, x, v))
    return by_in1, by_in2


def _associative_violation(product, by_in1, by_in2):
    diff = {}
    for (d, a, b), v1 in product.iter_nonzeros():
        for e, c, v2 in by_in1.get(d, ()):
            k = (a, b, c, e)
            diff[k] = diff.get(k, ZERO) + v1 * v2
    for (d, b, c), v1 in product.iter_nonzeros():
        for e, a, v2 in by_in2.get(d, ()):
            k = (a, b, c, e)
            diff[k] = diff.get(k, ZERO) - v1 * v2
    bad = [k for k, v in diff.items() if v]
    if bad:
        a, b, c, e = min(bad)
        return f"(e_{a} e_{b}) e_{c} and e_{a} (e_{b} e_{c}) differ in the e_{e} component"
    return None


def _coassociative_violation(cmap):
    diff = {}
    for c, terms in cmap.items():
        for x, y, v1 in terms:
            for p, q, v2 in cmap.get(x, ()):
                k = (p, q, y, c)
                diff[k] = diff.get(k, ZERO) + v1 * v2
            for p, q, v2 in cmap.get(y, ()):
                k = (x, p, q, c)
                diff[k] = diff.get(k, ZERO) - v1 * v2
    bad = [k for k, v in diff.items() if v]
    if bad:
        p, q, r, c = min(bad)
        return f"coassociativity fails on basis {c} at component ({p},{q},{r})"
    return None


def _frobenius_violation(product, cmap, by_in1, by_in2):
    m1 = {}
    for (d, a, b), v1 in product.iter_nonzeros():
        for x, y, v2 in cmap.get(d, ()):
            k = (a, b, x, y)
            m1[k] = m1.get(k, ZERO) + v1 * v2
    m2 = {}
    for b, terms in cmap.items():
        for x, y, v2 in terms:
            for d, a, v3 in by_in2.get(x, ()):
                k = (a, b, d, y)
                m2[k] = m2.get(k, ZERO) + v2 * v3
    m3 = {}
    for a, terms in cmap.items():
        for x, y, v2 in terms:
            for d, b, v3 in by_in1.get(y, ()):
                k = (a, b, x, d)
                m3[k] = m3.get(k, ZERO) + v2 * v3

    def first_diff(p, q):
        diff = dict(p)
        for k, v in q.items():
            diff[k] = diff.get(k, ZERO) - v
        bad = [k for k, v in diff.items() if v]
        return min(bad) if bad else None

    k = first_diff(m1, m2)
    if k is not None:
        a, b, x, y = k
        return f"coproduct o product and (product x id)(id x coproduct) differ at input ({a},{b}) component ({x},{y})"
    k = first_diff(m1, m3)
    if k is not None:
        a, b, x, y = k
        return f"coproduct o product and (id x product)(coproduct x id) differ at input ({a},{b}) component ({x},{y})"
    return None


def _commutative_violation(product):
    for (c, a, b), v in product.iter_nonzeros():
        if a != b and product[(c, b, a)] != v:
            return f"e_{a} e_{b} and e_{b} e_{a} differ in the e_{c} component"
    return None


def _symmetric_violation(beta):
    n = beta.rows
    for a in range(n):
        for b in range(a):
            if beta[a, b] != beta[b, a]:
                return f"pairing(e_{b}, e_{a}) != pairing(e_{a}, e_{b})"
    return None


def check_frobenius(fa: FrobeniusAlgebra) -> FrobeniusReport:
    """Check every Frobenius axiom and report per-axiom flags.

    Structural flags: unital, counital, associative, coassociative,
    frobenius, pairing_nondegenerate.  Descriptive flags: commutative
    (product equals its flip) and symmetric (counit of a product is
    flip-invariant).  first_violation names the first failed structural
    flag together with the offending entry.
    """
    n = fa.dim
    mult = fa.mult_table()
    cmap = fa.comult_table()
    unit_nz = fa.unit.nonzeros()
    by_in1, by_in2 = _product_joins(fa.product)
    beta = fa.pairing()

    details = {}

    def record(name, violation):
        if violation is not None:
            details[name] = violation
        return violation is None

    flags = {}
    flags["unital"] = record("unital", _unital_violation(n, mult, unit_nz))
    flags["counital"] = record("counital", _counital_violation(n, cmap, fa.counit))
    flags["associative"] = record("associative", _associative_violation(fa.product, by_in1, by_in2))
    flags["coassociative"] = record("coassociative", _coassociative_violation(cmap))
    flags["frobenius"] = record("frobenius", _frobenius_violation(fa.product, cmap, by_in1, by_in2))
    r = beta.rank()
    flags["pairing_nondegenerate"] = record(
        "pairing_nondegenerate", None if r == n else f"pairing has rank {r} of {n}"
    )
    flags["commutative"] = record("commutative", _commutative_violation(fa.product))
    flags["symmetric"] = record("symmetric", _symmetric_violation(beta))

    first = None
    for name in STRUCTURAL_FLAGS:
        if name in details:
            first = f"{name}: {details[name]}"
            break
    return FrobeniusReport(flags=flags, first_violation=first, details=details)


# ---------------------------------------------------------------------------
# constructors


def make_A(n: int, alpha, delta) -> FrobeniusAlgebra:
    """Commutative symmetric Frobenius algebra of dimension n + 2.

    Basis (1, a, a_1, ..., a_n) with a_i a_j = delta_ij * a and a nilpotent:
    a * a = a * a_i = 0.  Counit is (delta, alpha, 0, ..., 0); alpha must be
    nonzero for the pairing to be invertible.
    """
    alpha = rat(alpha)
    delta = rat(delta)
    if n < 0:
        raise ValueError("n must be >= 0")
    if not alpha:
        raise ValueError("alpha must be nonzero")
    dim = n + 2
    ia = ONE / alpha

    prod = {}
    for b in range(dim):
        prod[(b, 0, b)] = ONE
        if b:
            prod[(b, b, 0)] = ONE
    for i in range(2, dim):
        prod[(1, i, i)] = ONE

    cop = {(0, 1, 0): ia, (1, 0, 0): ia, (1, 1, 0): -delta / alpha**2, (1, 1, 1): ia}
    for i in range(2, dim):
        cop[(i, i, 0)] = ia
        cop[(i, 1, i)] = ia
        cop[(1, i, i)] = ia

    return FrobeniusAlgebra(
        product=Tensor.from_entries((dim, dim, dim), prod),
        unit=Tensor.from_entries((dim,), {(0,): ONE}),
        coproduct=Tensor.from_entries((dim, dim, dim), cop),
        counit=Tensor.from_entries((dim,), {(0,): delta, (1,): alpha}),
    )


def make_F(n: int, alpha) -> FrobeniusAlgebra:
    """Matrix algebra of n-by-n matrices with trace-like counit.

    Basis e_ij at index i*n + j; counit(e_ij) = alpha * delta_ij.  Symmetric
    but not commutative once n >= 2.  n = 0 gives the zero algebra.
    """
    alpha = rat(alpha)
    if n < 0:
        raise ValueError("n must be >= 0")
    if not alpha:
        raise ValueError("alpha must be nonzero")
    dim = n * n
    ia = ONE / alpha

    prod = {}
    cop = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                prod[(i * n + l, i * n + j, j * n + l)] = ONE
                cop[(i * n + l, l * n + j, i * n + j)] = ia

    return FrobeniusAlgebra(
        product=Tensor.from_entries((dim, dim, dim), prod),
        unit=Tensor.from_entries((dim,), {(i * n + i,): ONE for i in range(n)}),
        coproduct=Tensor.from_entries((dim, dim, dim), cop),
        counit=Tensor.from_entries((dim,), {(i * n + i,): alpha for i in range(n)}),
    )


def frobenius_from_form(product: Tensor, unit: Tensor, counit: Tensor) -> FrobeniusAlgebra:
    """Complete an associative unital algebra with a nondegenerate form
    counit(x * y) into a Frobenius algebra.

    The coproduct is (product x id)(id x copairing) where the copairing is
    the matrix inverse of the form.  Raises AxiomError if the input algebra
    is not associative or unital, RankError if the form is degenerate.
    """
    n = unit.shape[0] if unit.shape else 0
    if product.shape != (n, n, n) or counit.shape != (n,):
        raise ValueError("inconsistent tensor shapes")

    mult = {}
    for (c, a, b), v in product.iter_nonzeros():
        mult.setdefault((a, b), []).append((c, v))
    violation = _unital_violation(n, mult, unit.nonzeros())
    if violation is not None:
        raise AxiomError("unital: " + violation)
    by_in1, by_in2 = _product_joins(product)
    violation = _associative_violation(product, by_in1, by_in2)
    if violation is not None:
        raise AxiomError("associative: " + violation)

    beta = Matrix.zeros(n, n)
    for (c, a, b), v in product.iter_nonzeros():
        e = counit[c]
        if e:
            beta[a, b] = beta[a, b] + e * v
    gamma = beta.inverse()
    if gamma is None:
        raise RankError("form counit(x * y) is degenerate", rank=beta.rank(), dim=n)

    cop = {}
    for (x, c, a), v in product.iter_nonzeros():
        for b in range(n):
            g = gamma[a, b]
            if g:
                k = (x, b, c)
                cop[k] = cop.get(k, ZERO) + v * g

    fa = FrobeniusAlgebra(
        product=product,
        unit=unit,
        coproduct=Tensor.from_entries((n, n, n), cop),
        counit=counit,
    )
    report = check_frobenius(fa)
    if not report.valid:
        raise ConsistencyError("derived coproduct fails verification: " + report.first_violation)
    return fa


def central_transition(f_from: FrobeniusAlgebra, f_to: FrobeniusAlgebra) -> Tensor:
    """Coordinates of the central element a with
    counit_from(x) = counit_to(a * x) for all x.

    Both arguments must be symmetric Frobenius structures on the same
    underlying algebra (identical product and unit tensors).
    """
    if f_from.dim != f_to.dim or f_from.product != f_to.product or f_from.unit != f_to.unit:
        raise ValueError("both structures must share the same product and unit")
    n = f_from.dim
    beta = f_to.pairing()
    rhs = [f_from.counit[(x,)] for x in range(n)]
    sol = beta.transpose().solve(rhs)
    if sol is None:
        raise RankError("target pairing is degenerate", rank=beta.rank(), dim=n)

    avec = {i: sol[i] for i in range(n) if sol[i]}
    mult = f_to.mult_table()
    for x in range(n):
        acc = ZERO
        for c, av in avec.items():
            for d, v in mult.get((c, x), ()):
                acc += av * v * f_to.counit[d]
        if acc != f_from.counit[x]:
            raise ConsistencyError("transition element does not reproduce the source counit")
    for b in range(n):
        left = {}
        right = {}
        for c, av in avec.items():
            for d, v in mult.get((c, b), ()):
                left[d] = left.get(d, ZERO) + av * v
            for d, v in mult.get((b, c), ()):
                right[d] = right.get(d, ZERO) + av * v
        if _strip(left) != _strip(right):
            raise ConsistencyError(
                "transition element is not central; both counits must be symmetric"
            )
    return Tensor((n,), [sol[i] for i in range(n)])


# ---------------------------------------------------------------------------
# combinations


def direct_sum(f: FrobeniusAlgebra, g: FrobeniusAlgebra) -> FrobeniusAlgebra:
    """Product algebra on the concatenated basis; unit is the sum of units."""
    n1 = f.dim
    dim = n1 + g.dim

    def shift(entries, offsets):
        out = {}
        for idx, v in entries:
            out[tuple(i + o for i, o in zip(idx, offsets))] = v
        return out

    prod = {idx: v for idx, v in f.product.iter_nonzeros()}
    prod.update(shift(g.product.iter_nonzeros(), (n1, n1, n1)))
    cop = {idx: v for idx, v in f.coproduct.iter_nonzeros()}
    cop.update(shift(g.coproduct.iter_nonzeros(), (n1, n1, n1)))
    unit = {idx: v for idx, v in f.unit.iter_nonzeros()}
    unit.update(shift(g.unit.iter_nonzeros(), (n1,)))
    counit = {idx: v for idx, v in f.counit.iter_nonzeros()}
    counit.update(shift(g.counit.iter_nonzeros(), (n1,)))

    return FrobeniusAlgebra(
        product=Tensor.from_entries((dim, dim, dim), prod),
        unit=Tensor.from_entries((dim,), unit),
        coproduct=Tensor.from_entries((dim, dim, dim), cop),
        counit=Tensor.from_entries((dim,), counit),
    )


def tensor_product(f: FrobeniusAlgebra, g: FrobeniusAlgebra) -> FrobeniusAlgebra:
    """Tensor-product algebra on the paired basis (a1, a2) -> a1*dim(g) + a2."""
    n2 = g.dim
    dim = f.dim * n2

    prod = {}
    for (c1, a1, b1), v1 in f.product.iter_nonzeros():
        for (c2, a2, b2), v2 in g.product.iter_nonzeros():
            prod[(c1 * n2 + c2, a1 * n2 + a2, b1 * n2 + b2)] = v1 * v2
    cop = {}
    for (a1, b1, c1), v1 in f.coproduct.iter_nonzeros():
        for (a2, b2, c2), v2 in g.coproduct.iter_nonzeros():
            cop[(a1 * n2 + a2, b1 * n2 + b2, c1 * n2 + c2)] = v1 * v2
    unit = {}
    for (a1,), v1 in f.unit.iter_nonzeros():
        for (a2,), v2 in g.unit.iter_nonzeros():
            unit[(a1 * n2 + a2,)] = v1 * v2
    counit = {}
    for (a1,), v1 in f.counit.iter_nonzeros():
        for (a2,), v2 in g.counit.iter_nonzeros():
            counit[(a1 * n2 + a2,)] = v1 * v2

    return FrobeniusAlgebra(
        product=Tensor.from_entries((dim, dim, dim), prod),
        unit=Tensor.from_entries((dim,), unit),
        coproduct=Tensor.from_entries((dim, dim, dim), cop),
        counit=Tensor.from_entries((dim,), counit),
    )
