"""Open-closed pairs of Frobenius algebras joined by a zipper.

A structure here is a quadruple: an open sector (symmetric Frobenius algebra),
a closed sector (commutative Frobenius algebra), a zipper map from closed to
open whose image is central, and a cozipper map going back.  check_kfa
verifies the whole axiom list; the remaining operations build the standard
families, combine them, and extract the surface invariants

    invariant(g, w) = counit_closed(window^w handle^g unit_closed)

for surfaces of genus g with w windows, together with their generating
function in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

from .numkit import Matrix, Tensor, ZERO, ONE, rat
from .frobenius import (
    AxiomError,
    ConsistencyError,
    FrobeniusAlgebra,
    _commutative_violation,
    _strip,
    _symmetric_violation,
    check_frobenius,
    direct_sum,
    make_A,
    make_F,
    tensor_product,
)
from .character import CharacterForm, Good, Indeterminate, SequenceTable, classify_table


class UnsupportedCaseError(NotImplementedError):
    """The operation applies to a different structural family than the input."""


class IrrationalSpectrumError(RuntimeError):
    """The invariant table has a minimal recurrence that does not split over
    the rationals, so no rational closed form exists."""


class KFA:
    """Quadruple (open, closed, zipper, cozipper); treated as immutable.

    zipper is a matrix from the closed to the open sector, cozipper the other
    way around.
    """

    def __init__(self, open_: FrobeniusAlgebra, closed: FrobeniusAlgebra, zipper: Matrix, cozipper: Matrix):
        if zipper.rows != open_.dim or zipper.cols != closed.dim:
            raise ValueError(
                f"zipper must be {open_.dim}x{closed.dim}, got {zipper.rows}x{zipper.cols}"
            )
        if cozipper.rows != closed.dim or cozipper.cols != open_.dim:
            raise ValueError(
                f"cozipper must be {closed.dim}x{open_.dim}, got {cozipper.rows}x{cozipper.cols}"
            )
        self.open = open_
        self.closed = closed
        self.zipper = zipper
        self.cozipper = cozipper

    def zipper_columns(self):
        """Images of the closed basis under the zipper, as index->coeff dicts."""
        cols = []
        for s in range(self.closed.dim):
            col = {}
            for i in range(self.open.dim):
                v = self.zipper[i, s]
                if v:
                    col[i] = v
            cols.append(col)
        return cols

    def __eq__(self, other):
        return (
            isinstance(other, KFA)
            and self.open == other.open
            and self.closed == other.closed
            and self.zipper == other.zipper
            and self.cozipper == other.cozipper
        )

    def __repr__(self):
        return f"KFA(open_dim={self.open.dim}, closed_dim={self.closed.dim})"

    def to_json(self):
        return {
            "open": self.open.to_json(),
            "closed": self.closed.to_json(),
            "zipper": self.zipper.to_json(),
            "cozipper": self.cozipper.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        open_ = FrobeniusAlgebra.from_json(obj["open"])
        closed = FrobeniusAlgebra.from_json(obj["closed"])
        zipper = Matrix.from_json(obj["zipper"], rows=open_.dim, cols=closed.dim)
        cozipper = Matrix.from_json(obj["cozipper"], rows=closed.dim, cols=open_.dim)
        return cls(open_, closed, zipper, cozipper)


# ---------------------------------------------------------------------------
# axiom checking


KFA_FLAGS = (
    "open_frobenius",
    "closed_frobenius",
    "closed_commutative",
    "closed_cocommutative",
    "open_symmetric",
    "open_cosymmetric",
    "zipper_unital",
    "zipper_homomorphism",
    "zipper_central",
    "duality",
    "cardy",
)


@dataclass
class KfaReport:
    flags: dict
    first_violation: str | None
    details: dict

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    def to_json(self):
        return {"flags": dict(self.flags), "first_violation": self.first_violation}


def _cocommutative_violation(coproduct):
    for (a, b, c), v in coproduct.iter_nonzeros():
        if a != b and coproduct[(b, a, c)] != v:
            return f"coproduct of basis {c} is not swap-invariant at component ({a},{b})"
    return None


def _copairing_symmetric_violation(fa):
    gamma = fa.copairing()
    n = gamma.rows
    for a in range(n):
        for b in range(a):
            if gamma[a, b] != gamma[b, a]:
                return f"copairing component ({b},{a}) != ({a},{b})"
    return None


def _first_matrix_diff(m1, m2):
    for i, row in enumerate((m1 - m2).nonzero_rows()):
        if row:
            return i, row[0][0]
    return None


def check_kfa(k: KFA) -> KfaReport:
    """Verify every axiom of the quadruple; one flag per axiom family.

    first_violation names the first failed flag together with the offending
    entry position.
    """
    flags = {}
    details = {}

    def record(name, violation):
        flags[name] = violation is None
        if violation is not None:
            details[name] = violation

    open_report = check_frobenius(k.open)
    record("open_frobenius", open_report.first_violation)
    closed_report = check_frobenius(k.closed)
    record("closed_frobenius", closed_report.first_violation)
    record("closed_commutative", _commutative_violation(k.closed.product))
    record("closed_cocommutative", _cocommutative_violation(k.closed.coproduct))
    record("open_symmetric", _symmetric_violation(k.open.pairing()))
    record("open_cosymmetric", _copairing_symmetric_violation(k.open))

    # zipper sends the closed unit to the open unit
    if k.zipper * k.closed.unit_matrix() == k.open.unit_matrix():
        record("zipper_unital", None)
    else:
        record("zipper_unital", "zipper(closed unit) != open unit")

    # zipper is multiplicative
    zcols = k.zipper_columns()
    r = k.closed.dim
    cmult = k.closed.mult_table()
    violation = None
    for s in range(r):
        if violation:
            break
        for t in range(r):
            lhs = {}
            for c, v in cmult.get((s, t), ()):
                for i, zv in zcols[c].items():
                    lhs[i] = lhs.get(i, ZERO) + v * zv
            rhs = k.open.mult_dict(zcols[s], zcols[t])
            if _strip(lhs) != rhs:
                violation = f"zipper(e_{s} e_{t}) != zipper(e_{s}) zipper(e_{t})"
                break
    record("zipper_homomorphism", violation)

    # zipper image is central in the open sector
    violation = None
    n_open = k.open.dim
    for s in range(r):
        if violation:
            break
        x = zcols[s]
        for b in range(n_open):
            eb = {b: ONE}
            if k.open.mult_dict(x, eb) != k.open.mult_dict(eb, x):
                violation = f"zipper(e_{s}) does not commute with open basis {b}"
                break
    record("zipper_central", violation)

    # pairing duality between zipper and cozipper
    lhs = k.closed.pairing() * k.cozipper
    rhs = k.zipper.transpose() * k.open.pairing()
    pos = _first_matrix_diff(lhs, rhs)
    record(
        "duality",
        None if pos is None else f"pairing duality fails at closed {pos[0]}, open {pos[1]}",
    )

    # Cardy: zipper o cozipper equals product o swap o coproduct on the open sector
    twisted = {}
    omult = k.open.mult_table()
    for (a, b, c), v in k.open.coproduct.iter_nonzeros():
        for d, v2 in omult.get((b, a), ()):
            key = (d, c)
            twisted[key] = twisted.get(key, ZERO) + v * v2
    diff = dict(twisted)
    zz = k.zipper * k.cozipper
    for i, row in enumerate(zz.nonzero_rows()):
        for j, v in row:
            key = (i, j)
            diff[key] = diff.get(key, ZERO) - v
    bad = sorted(key for key, v in diff.items() if v)
    record(
        "cardy",
        None if not bad else f"Cardy relation fails at open entry ({bad[0][0]},{bad[0][1]})",
    )

    first = None
    for name in KFA_FLAGS:
        if name in details:
            first = f"{name}: {details[name]}"
            break
    return KfaReport(flags=flags, first_violation=first, details=details)


# ---------------------------------------------------------------------------
# constructor families


def make_semisimple_kfa(n: int, alpha) -> KFA:
    """Matrix algebra open sector with one-dimensional closed sector.

    Open is the n-by-n matrix algebra with counit alpha * trace, closed is the
    ground field with counit alpha^2; the zipper sends 1 to the identity
    matrix and the cozipper reads off (1/alpha) * trace.
    """
    alpha = rat(alpha)
    if n < 0:
        raise ValueError("n must be >= 0")
    if not alpha:
        raise ValueError("alpha must be nonzero")
    open_ = make_F(n, alpha)
    closed = make_F(1, alpha * alpha)
    zipper = Matrix.zeros(n * n, 1)
    cozipper = Matrix.zeros(1, n * n)
    for i in range(n):
        zipper[i * n + i, 0] = ONE
        cozipper[0, i * n + i] = ONE / alpha
    return KFA(open_, closed, zipper, cozipper)


def make_nonsemisimple_kfa(p: int, q: int, alpha, delta, sigma) -> KFA:
    """Nilpotent family: open A_{alpha,delta}(p), closed A_{beta,sigma}(q)
    with beta = alpha^2 / (p + 2).

    The zipper sends the closed unit to the open unit and the last closed
    nilpotent generator b_q to the open socle element a; everything else goes
    to zero.  The cozipper is its pairing dual.
    """
    alpha = rat(alpha)
    delta = rat(delta)
    sigma = rat(sigma)
    if p < 0:
        raise ValueError("p must be >= 0")
    if q < 1:
        raise ValueError("q must be >= 1")
    if not alpha:
        raise ValueError("alpha must be nonzero")
    beta = alpha * alpha / (p + 2)
    open_ = make_A(p, alpha, delta)
    closed = make_A(q, beta, sigma)
    n_open = p + 2
    n_closed = q + 2
    zipper = Matrix.zeros(n_open, n_closed)
    zipper[0, 0] = ONE
    zipper[1, q + 1] = ONE
    cozipper = Matrix.zeros(n_closed, n_open)
    cozipper[1, 0] = delta / beta
    cozipper[q + 1, 0] = alpha / beta
    cozipper[1, 1] = alpha / beta
    return KFA(open_, closed, zipper, cozipper)


def make_closed_only(f: FrobeniusAlgebra) -> KFA:
    """Upgrade a commutative Frobenius algebra to a quadruple with empty
    open sector and zero zipper maps."""
    violation = _commutative_violation(f.product)
    if violation is not None:
        raise AxiomError("closed-only upgrade needs a commutative algebra: " + violation)
    open_ = FrobeniusAlgebra(
        product=Tensor.zeros((0, 0, 0)),
        unit=Tensor.zeros((0,)),
        coproduct=Tensor.zeros((0, 0, 0)),
        counit=Tensor.zeros((0,)),
    )
    return KFA(open_, f, Matrix.zeros(0, f.dim), Matrix.zeros(f.dim, 0))


def _block_diag(m1: Matrix, m2: Matrix) -> Matrix:
    out = Matrix.zeros(m1.rows + m2.rows, m1.cols + m2.cols)
    for i, row in enumerate(m1.nonzero_rows()):
        for j, v in row:
            out[i, j] = v
    for i, row in enumerate(m2.nonzero_rows()):
        for j, v in row:
            out[m1.rows + i, m1.cols + j] = v
    return out


def kfa_sum(k1: KFA, k2: KFA) -> KFA:
    return KFA(
        direct_sum(k1.open, k2.open),
        direct_sum(k1.closed, k2.closed),
        _block_diag(k1.zipper, k2.zipper),
        _block_diag(k1.cozipper, k2.cozipper),
    )


def kfa_product(k1: KFA, k2: KFA) -> KFA:
    return KFA(
        tensor_product(k1.open, k2.open),
        tensor_product(k1.closed, k2.closed),
        k1.zipper.kron(k2.zipper),
        k1.cozipper.kron(k2.cozipper),
    )


def scale_kfa(k: KFA, s) -> KFA:
    """Rescale by s: closed cap/cup pick up s^-2, closed pants s^2, open
    cap/cup s^-1, open pants s, zipper and cozipper s.

    The exponent of each generator is -2e + l where e is its Euler
    characteristic and l its number of interval boundary marks; the resulting
    invariants obey invariant'(g, w) = s^(-2(2-2g-w)) invariant(g, w).
    """
    s = rat(s)
    if not s:
        raise ValueError("scale factor must be nonzero")
    inv = ONE / s
    closed = FrobeniusAlgebra(
        product=k.closed.product.scale(s * s),
        unit=k.closed.unit.scale(inv * inv),
        coproduct=k.closed.coproduct.scale(s * s),
        counit=k.closed.counit.scale(inv * inv),
    )
    open_ = FrobeniusAlgebra(
        product=k.open.product.scale(s),
        unit=k.open.unit.scale(inv),
        coproduct=k.open.coproduct.scale(s),
        counit=k.open.counit.scale(inv),
    )
    return KFA(open_, closed, k.zipper.scale(s), k.cozipper.scale(s))


# ---------------------------------------------------------------------------
# invariants


@dataclass
class StructuralEndos:
    handle: Matrix
    window: Matrix
    hole: Matrix


def _loop_endo(fa: FrobeniusAlgebra) -> Matrix:
    """product o coproduct as a matrix, via the sparse tables."""
    n = fa.dim
    m = Matrix.zeros(n, n)
    mult = fa.mult_table()
    for (a, b, c), v in fa.coproduct.iter_nonzeros():
        for d, v2 in mult.get((a, b), ()):
            m[d, c] = m[d, c] + v * v2
    return m


def structural_endos(k: KFA) -> StructuralEndos:
    """Handle (closed loop), window (cozipper o zipper) and hole (open loop)
    endomorphisms, with their commutation identities verified."""
    handle = _loop_endo(k.closed)
    window = k.cozipper * k.zipper
    hole = _loop_endo(k.open)
    if handle * window != window * handle:
        raise ConsistencyError("handle and window endomorphisms do not commute")
    if k.zipper * window != hole * k.zipper:
        raise ConsistencyError("zipper does not intertwine window with hole")
    if window * k.cozipper != k.cozipper * hole:
        raise ConsistencyError("cozipper does not intertwine hole with window")
    return StructuralEndos(handle=handle, window=window, hole=hole)


def _trace_of_product(a: Matrix, b: Matrix):
    total = ZERO
    for i, row in enumerate(a.nonzero_rows()):
        for j, v in row:
            w = b[j, i]
            if w:
                total += v * w
    return total


def invariant_table(k: KFA, g_max: int, w_max: int) -> SequenceTable:
    """Exact table of invariant(g, w) for g <= g_max, w <= w_max.

    Cross-checks the trace identities: invariant(g+1, w) equals the closed
    trace of handle^g window^w, invariant(0, w+2) equals the open trace of
    hole^w, and invariant(0, 1) equals the open counit of the open unit.
    Any mismatch raises ConsistencyError.
    """
    if g_max < 0 or w_max < 0:
        raise ValueError("bounds must be >= 0")
    endos = structural_endos(k)
    handle, window, hole = endos.handle, endos.window, endos.hole
    r = k.closed.dim
    eps = k.closed.counit_matrix()

    rows = []
    gvec = k.closed.unit_matrix()
    for g in range(g_max + 1):
        if g:
            gvec = handle * gvec
        vec = gvec
        row = []
        for w in range(w_max + 1):
            if w:
                vec = window * vec
            row.append((eps * vec)[0, 0])
        rows.append(row)

    # closed-trace identity
    if g_max >= 1:
        wpow = [Matrix.identity(r)]
        for _ in range(w_max):
            wpow.append(window * wpow[-1])
        gpow = Matrix.identity(r)
        for g in range(1, g_max + 1):
            for w in range(w_max + 1):
                if _trace_of_product(gpow, wpow[w]) != rows[g][w]:
                    raise ConsistencyError(
                        f"closed trace identity fails at genus {g}, windows {w}"
                    )
            if g < g_max:
                gpow = handle * gpow
    # open-trace identity
    hpow = Matrix.identity(k.open.dim)
    for w in range(w_max - 1):
        if hpow.trace() != rows[0][w + 2]:
            raise ConsistencyError(f"open trace identity fails at {w} holes")
        if w + 3 <= w_max:
            hpow = hole * hpow
    # the strip invariant equals the open counit of the open unit
    if w_max >= 1:
        strip = (k.open.counit_matrix() * k.open.unit_matrix())[0, 0]
        if strip != rows[0][1]:
            raise ConsistencyError("strip invariant differs from the open counit of the unit")
    return SequenceTable.from_rows(rows)


def character_of(k: KFA) -> CharacterForm:
    """Closed form of the invariant table.

    Computes the table up to (2r+4, 2r+4) with r the closed dimension, which
    is always enough to pin down the at-most-r geometric terms, and runs the
    table classifier.  A structure that passes check_kfa always admits a good
    closed form over some extension field; a rational one may still have an
    irrational spectrum, reported as IrrationalSpectrumError.
    """
    r = k.closed.dim
    size = 2 * r + 4
    table = invariant_table(k, size, size)
    result = classify_table(table, r)
    if isinstance(result, Good):
        return result.form
    if isinstance(result, Indeterminate):
        raise IrrationalSpectrumError(result.reason)
    raise ConsistencyError(f"verified structure produced a non-good table: {result.reason}")


def interpolated_gl_character(d, alpha) -> CharacterForm:
    """Character of the interpolated general-linear family at rank d.

    Valid for any rational d, including non-integers; at integer d = n it
    agrees with character_of(make_semisimple_kfa(n, alpha)).
    """
    alpha = rat(alpha)
    d = rat(d)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    lam = ONE / (alpha * alpha)
    return CharacterForm.make(exp_terms=[(lam, d / alpha, alpha * alpha)])


# ---------------------------------------------------------------------------
# projectors for the nilpotent family


PROJECTOR_NAMES = ("P_UI", "P_NI", "P_V", "P_US", "P_NS", "P_1", "P_W")


@dataclass
class ProjectorSet:
    projectors: dict
    ranks: dict

    def to_json(self):
        return {
            "ranks": dict(self.ranks),
            "projectors": {name: m.to_json() for name, m in self.projectors.items()},
        }


def open_closed_projectors(k: KFA) -> ProjectorSet:
    """The seven sector projectors for structures whose character is purely
    polynomial with a nonzero window-squared coefficient.

    Verifies idempotency and pairwise orthogonality within each sector
    exactly; reports the rank of each projector.
    """
    form = character_of(k)
    if form.exp_terms:
        raise UnsupportedCaseError(
            "projector formulas require a character with no exponential part; "
            "structures with geometric spectrum split through the Gram-side "
            "spectral idempotents instead"
        )
    if not form.alpha_Y2:
        raise UnsupportedCaseError(
            "projector formulas require a nonzero window-squared coefficient; "
            "the degenerate polynomial case has no two-window normalization"
        )
    a1, ay, ay2 = form.alpha_1, form.alpha_Y, form.alpha_Y2
    endos = structural_endos(k)
    window, hole = endos.window, endos.hole

    n = k.open.dim
    r = k.closed.dim
    id_open = Matrix.identity(n)
    id_closed = Matrix.identity(r)
    ui_ei = k.open.unit_matrix() * k.open.counit_matrix()
    us_es = k.closed.unit_matrix() * k.closed.counit_matrix()
    w2 = window * window
    inv = ONE / ay2

    p_ui = (ui_ei * hole).scale(inv)
    p_ni = (hole * (ui_ei - id_open.scale(ay))).scale(inv)
    p_v = id_open - p_ui - p_ni
    p_us = (us_es * w2).scale(inv)
    p_ns = (w2 * (us_es - id_closed.scale(a1))).scale(inv)
    p_1 = (window * (us_es * window - id_closed.scale(ay))).scale(inv)
    p_w = id_closed - p_us - p_ns - p_1

    projectors = {
        "P_UI": p_ui,
        "P_NI": p_ni,
        "P_V": p_v,
        "P_US": p_us,
        "P_NS": p_ns,
        "P_1": p_1,
        "P_W": p_w,
    }
    for name, p in projectors.items():
        if p * p != p:
            raise ConsistencyError(f"{name} is not idempotent")
    for family in (("P_UI", "P_NI", "P_V"), ("P_US", "P_NS", "P_1", "P_W")):
        for a in family:
            for b in family:
                if a != b and not (projectors[a] * projectors[b]).is_zero():
                    raise ConsistencyError(f"{a} and {b} are not orthogonal")
    ranks = {name: p.rank() for name, p in projectors.items()}
    return ProjectorSet(projectors=projectors, ranks=ranks)
