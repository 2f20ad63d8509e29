"""Invariant generating functions in two formal variables and their classification.

A character assigns a rational value to every pair (genus g, window count w).
The "good" ones are exactly the functions

    f = a1 + aX*X + aY*Y + aY2*Y^2 + sum_i  c_i / ((1 - lam_i X)(1 - mu_i Y))

with lam_i != 0, i.e. a four-coefficient polynomial part plus finitely many
geometric terms c * lam^g * mu^w.  mu = 0 is allowed and contributes only in
the w = 0 column (0^0 = 1 by convention).  classify_table decides from a
finite table of values whether such a closed form exists, and reconstructs it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .numkit import (
    ONE, ZERO, Matrix, Poly, is_squarefree, rat, rat_to_str, rational_roots,
    recurrence_from_sequences,
)

POLY_SUPPORT = ((0, 0), (1, 0), (0, 1), (0, 2))


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class SequenceTable:
    """Rectangular table of values, rows indexed by g, columns by w."""

    g_max: int
    w_max: int
    values: tuple  # values[g][w], tuple of tuples of Fraction

    @classmethod
    def from_rows(cls, rows):
        g_max = len(rows) - 1
        w_max = len(rows[0]) - 1
        vals = tuple(tuple(rat(x) for x in row) for row in rows)
        for row in vals:
            if len(row) != w_max + 1:
                raise ValueError("ragged table")
        return cls(g_max, w_max, vals)

    def value(self, g: int, w: int) -> Fraction:
        return self.values[g][w]

    def to_json(self):
        return {"values": [[rat_to_str(x) for x in row] for row in self.values]}

    @classmethod
    def from_json(cls, obj):
        return cls.from_rows([[rat(x) for x in row] for row in obj["values"]])


# ---------------------------------------------------------------------------
# character forms


@dataclass(frozen=True)
class CharacterForm:
    """Canonical closed form of a good character.

    exp_terms is a sorted tuple of (lam, mu, coeff) with lam != 0, coeff != 0
    and pairwise distinct (lam, mu).
    """

    alpha_1: Fraction = ZERO
    alpha_X: Fraction = ZERO
    alpha_Y: Fraction = ZERO
    alpha_Y2: Fraction = ZERO
    exp_terms: tuple = ()

    def __post_init__(self):
        for lam, mu, c in self.exp_terms:
            if not lam:
                raise ValueError("exponential term with lam = 0")
            if not c:
                raise ValueError("exponential term with zero coefficient")
        keys = [(lam, mu) for lam, mu, _ in self.exp_terms]
        if sorted(keys) != keys or len(set(keys)) != len(keys):
            raise ValueError("exponential terms must be sorted and distinct")

    @classmethod
    def make(cls, alpha_1=0, alpha_X=0, alpha_Y=0, alpha_Y2=0, exp_terms=()):
        """Canonicalizing constructor: merges duplicate (lam, mu) pairs,
        drops zero coefficients, sorts."""
        acc = {}
        for lam, mu, c in exp_terms:
            lam, mu, c = rat(lam), rat(mu), rat(c)
            if not lam:
                raise ValueError("exponential term with lam = 0")
            acc[(lam, mu)] = acc.get((lam, mu), ZERO) + c
        terms = tuple((lam, mu, c) for (lam, mu), c in sorted(acc.items()) if c)
        return cls(rat(alpha_1), rat(alpha_X), rat(alpha_Y), rat(alpha_Y2), terms)

    def poly_value(self, g: int, w: int) -> Fraction:
        if (g, w) == (0, 0):
            return self.alpha_1
        if (g, w) == (1, 0):
            return self.alpha_X
        if (g, w) == (0, 1):
            return self.alpha_Y
        if (g, w) == (0, 2):
            return self.alpha_Y2
        return ZERO

    def to_json(self):
        return {
            "poly": {
                "1": rat_to_str(self.alpha_1),
                "X": rat_to_str(self.alpha_X),
                "Y": rat_to_str(self.alpha_Y),
                "Y2": rat_to_str(self.alpha_Y2),
            },
            "exp": [
                {"lambda": rat_to_str(lam), "mu": rat_to_str(mu), "coeff": rat_to_str(c)}
                for lam, mu, c in self.exp_terms
            ],
        }

    @classmethod
    def from_json(cls, obj):
        poly = obj.get("poly", {})
        return cls.make(
            alpha_1=rat(poly.get("1", 0)),
            alpha_X=rat(poly.get("X", 0)),
            alpha_Y=rat(poly.get("Y", 0)),
            alpha_Y2=rat(poly.get("Y2", 0)),
            exp_terms=[(rat(t["lambda"]), rat(t["mu"]), rat(t["coeff"])) for t in obj.get("exp", [])],
        )


def _pow0(base: Fraction, e: int) -> Fraction:
    # 0^0 = 1: a mu = 0 term contributes exactly in the w = 0 column
    if e == 0:
        return ONE
    return base ** e


def eval_character(form: CharacterForm, g: int, w: int) -> Fraction:
    if g < 0 or w < 0:
        raise ValueError("genus and window count must be nonnegative")
    total = form.poly_value(g, w)
    for lam, mu, c in form.exp_terms:
        total += c * _pow0(lam, g) * _pow0(mu, w)
    return total


def to_table(form: CharacterForm, g_max: int, w_max: int) -> SequenceTable:
    rows = [[eval_character(form, g, w) for w in range(w_max + 1)] for g in range(g_max + 1)]
    return SequenceTable.from_rows(rows)


def char_add(a: CharacterForm, b: CharacterForm) -> CharacterForm:
    return CharacterForm.make(
        a.alpha_1 + b.alpha_1, a.alpha_X + b.alpha_X,
        a.alpha_Y + b.alpha_Y, a.alpha_Y2 + b.alpha_Y2,
        list(a.exp_terms) + list(b.exp_terms),
    )


def char_scale(a: CharacterForm, c) -> CharacterForm:
    c = rat(c)
    return CharacterForm.make(
        c * a.alpha_1, c * a.alpha_X, c * a.alpha_Y, c * a.alpha_Y2,
        [(lam, mu, c * v) for lam, mu, v in a.exp_terms] if c else [],
    )


def _exp_value(form: CharacterForm, g: int, w: int) -> Fraction:
    return sum((c * _pow0(lam, g) * _pow0(mu, w) for lam, mu, c in form.exp_terms), ZERO)


def char_mul(a: CharacterForm, b: CharacterForm) -> CharacterForm:
    """Pointwise product.  Good characters are closed under this: geometric
    terms multiply pairwise, and products involving a polynomial part stay
    supported on the four polynomial positions."""
    terms = [
        (la * lb, ma * mb, ca * cb)
        for la, ma, ca in a.exp_terms
        for lb, mb, cb in b.exp_terms
    ]
    poly = []
    for g, w in POLY_SUPPORT:
        pa, pb = a.poly_value(g, w), b.poly_value(g, w)
        poly.append(pa * pb + pa * _exp_value(b, g, w) + _exp_value(a, g, w) * pb)
    return CharacterForm.make(poly[0], poly[1], poly[2], poly[3], terms)


def scale_transform(form: CharacterForm, s) -> CharacterForm:
    """Closed-form image of a character under rescaling the theory by s.

    The table transforms by chi'[g][w] = s^(-2(2-2g-w)) chi[g][w]; with
    alpha = s^2 this sends a geometric term (lam, mu, c) to
    (alpha^2 lam, alpha mu, c/alpha^2) and fixes alpha_X and alpha_Y2."""
    s = rat(s)
    if not s:
        raise ValueError("scale factor must be nonzero")
    al = s * s
    return CharacterForm.make(
        form.alpha_1 / al ** 2, form.alpha_X, form.alpha_Y / al, form.alpha_Y2,
        [(al ** 2 * lam, al * mu, c / al ** 2) for lam, mu, c in form.exp_terms],
    )


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Good:
    form: CharacterForm

    def to_json(self):
        out = {"status": "good"}
        out.update(self.form.to_json())
        return out


@dataclass(frozen=True)
class NotGood:
    reason: str
    witness: tuple | None = None

    def to_json(self):
        return {
            "status": "not_good",
            "reason": self.reason,
            "witness": list(self.witness) if self.witness is not None else None,
        }


@dataclass(frozen=True)
class Indeterminate:
    reason: str

    def to_json(self):
        return {"status": "indeterminate", "reason": self.reason}


def classify_table(table: SequenceTable, rank_bound: int):
    """Decide whether the table extends to a good character with at most
    rank_bound geometric lam-values (and per-lam mu-values).

    Needs g_max and w_max >= 2*rank_bound + 4.  Returns Good, NotGood (with a
    machine-readable reason and, for a support violation, the first offending
    (g, w) position) or Indeterminate when a minimal recurrence exists but its
    spectrum does not split over Q.
    """
    r = rank_bound
    if r < 0:
        raise ValueError("rank bound must be nonnegative")
    if table.g_max < 2 * r + 4 or table.w_max < 2 * r + 4:
        raise ValueError(
            f"table must extend to g,w = {2 * r + 4} for rank bound {r}, "
            f"got g_max={table.g_max} w_max={table.w_max}")

    deep_rows = [table.values[g] for g in range(2, table.g_max + 1)]
    exp_terms = []
    if any(x for row in deep_rows for x in row):
        # columns, restricted to g >= 2, share one minimal X-recurrence
        cols = [[row[w] for row in deep_rows] for w in range(table.w_max + 1)]
        q_x = recurrence_from_sequences(cols, r)
        if q_x is None:
            return NotGood(f"no common recurrence in the X direction of order <= {r}")
        if q_x(ZERO) == 0 or not is_squarefree(q_x):
            return NotGood("X-direction recurrence has a zero or repeated root")
        lams, split = rational_roots(q_x)
        if not split:
            return Indeterminate("X-direction spectrum does not split over the rationals")
        lams = [lam for lam, _ in lams]
        # per column, coefficients of each lam^g via a (shifted) Vandermonde solve
        vand = Matrix.from_rows([[lam ** (2 + i) for lam in lams] for i in range(len(lams))])
        coef_rows = []  # coef_rows[w][j] = c_{lam_j}(w)
        for w in range(table.w_max + 1):
            sol = vand.solve([cols[w][i] for i in range(len(lams))])
            assert sol is not None  # Vandermonde with distinct nonzero nodes
            coef_rows.append(sol)
        for j, lam in enumerate(lams):
            c_seq = [coef_rows[w][j] for w in range(table.w_max + 1)]
            tail = c_seq[1:]
            if any(tail):
                q_y = recurrence_from_sequences([tail], r)
                if q_y is None:
                    return NotGood(
                        f"no recurrence in the Y direction of order <= {r} for lam = {rat_to_str(lam)}")
                if q_y(ZERO) == 0 or not is_squarefree(q_y):
                    return NotGood(
                        f"Y-direction recurrence has a zero or repeated root for lam = {rat_to_str(lam)}")
                mus, split = rational_roots(q_y)
                if not split:
                    return Indeterminate(
                        f"Y-direction spectrum does not split over the rationals for lam = {rat_to_str(lam)}")
                mus = [mu for mu, _ in mus]
                mvand = Matrix.from_rows([[mu ** (1 + i) for mu in mus] for i in range(len(mus))])
                alphas = mvand.solve([tail[i] for i in range(len(mus))])
                assert alphas is not None
            else:
                mus, alphas = [], []
            for mu, c in zip(mus, alphas):
                if c:
                    exp_terms.append((lam, mu, c))
            # whatever is left in the w = 0 slot is a mu = 0 term
            residue = c_seq[0] - sum(alphas, ZERO)
            if residue:
                exp_terms.append((lam, ZERO, residue))

    exp_form = CharacterForm.make(exp_terms=exp_terms)
    poly = {}
    for g in range(table.g_max + 1):
        for w in range(table.w_max + 1):
            rem = table.value(g, w) - _exp_value(exp_form, g, w)
            if not rem:
                continue
            if (g, w) in POLY_SUPPORT:
                poly[(g, w)] = rem
            else:
                return NotGood(
                    "remainder after removing geometric terms is not supported on 1, X, Y, Y^2",
                    witness=(g, w))
    form = CharacterForm.make(
        poly.get((0, 0), ZERO), poly.get((1, 0), ZERO),
        poly.get((0, 1), ZERO), poly.get((0, 2), ZERO), exp_terms)
    # safety net: the reconstruction must reproduce the table exactly
    for g in range(table.g_max + 1):
        for w in range(table.w_max + 1):
            if eval_character(form, g, w) != table.value(g, w):
                return NotGood("reconstructed form does not reproduce the table", witness=(g, w))
    return Good(form)


# ---------------------------------------------------------------------------
# rational generating functions


def bipoly_deg_x(p: dict) -> int:
    return max((i for (i, j) in p), default=0)


def bipoly_deg_y(p: dict) -> int:
    return max((j for (i, j) in p), default=0)


def bipoly_total_deg(p: dict) -> int:
    return max((i + j for (i, j) in p), default=0)


def classify_rational(num: dict, den: dict):
    """Classify the power-series expansion of num/den, where num and den are
    bivariate polynomials as {(x_deg, y_deg): coefficient} dicts.

    The denominator must be invertible as a power series: den[(0,0)] != 0.
    """
    num = {k: rat(v) for k, v in num.items() if v}
    den = {k: rat(v) for k, v in den.items() if v}
    d00 = den.get((0, 0), ZERO)
    if not d00:
        raise ValueError("denominator must have a nonzero constant term")
    dx, dy = bipoly_deg_x(den), bipoly_deg_y(den)
    # dx*dy bounds the joint spectrum only when both degrees are positive; the
    # extra dx + dy keeps single-variable denominators like 1/(1-2X) in budget
    r = dx * dy + dx + dy + bipoly_total_deg(num)
    size = 2 * r + 4
    rows = [[ZERO] * (size + 1) for _ in range(size + 1)]
    den_rest = [(k, v) for k, v in den.items() if k != (0, 0)]
    for g in range(size + 1):
        for w in range(size + 1):
            s = num.get((g, w), ZERO)
            for (i, j), v in den_rest:
                if i <= g and j <= w:
                    s -= v * rows[g - i][w - j]
            rows[g][w] = s / d00
    return classify_table(SequenceTable.from_rows(rows), r)


class ExprError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


def parse_rational_expr(text: str):
    """Parse an expression in X, Y, integers, + - * / and parentheses into a
    (num, den) pair of bivariate polynomial dicts.  No simplification beyond
    dropping zero terms; division by an identically-zero expression fails."""
    toks = _tokenize(text)
    pos = [0]

    def peek():
        return toks[pos[0]][0] if pos[0] < len(toks) else None

    def take():
        t = toks[pos[0]]
        pos[0] += 1
        return t

    def expr():
        node = term()
        while peek() in ("+", "-"):
            op, _ = take()
            rhs = term()
            node = _rf_add(node, rhs) if op == "+" else _rf_add(node, _rf_neg(rhs))
        return node

    def term():
        node = unary()
        while True:
            nxt = peek()
            if nxt in ("*", "/"):
                op, at = take()
                rhs = unary()
                if op == "*":
                    node = _rf_mul(node, rhs)
                else:
                    if not rhs[0]:
                        raise ExprError("division by zero expression", at)
                    node = _rf_mul(node, (rhs[1], rhs[0]))
            elif nxt == "(" or nxt == "X" or nxt == "Y" or (nxt is not None and nxt.isdigit()):
                # adjacency is multiplication: 2X, (1-2X)(1-3Y)
                node = _rf_mul(node, atom())
            else:
                return node

    def unary():
        if peek() == "-":
            take()
            return _rf_neg(unary())
        return atom()

    def atom():
        if peek() is None:
            raise ExprError("unexpected end of expression", len(text))
        tok, at = take()
        if tok == "(":
            node = expr()
            if peek() != ")":
                raise ExprError("expected ')'", toks[pos[0]][1] if pos[0] < len(toks) else len(text))
            take()
            return node
        if tok == "X":
            return ({(1, 0): ONE}, {(0, 0): ONE})
        if tok == "Y":
            return ({(0, 1): ONE}, {(0, 0): ONE})
        if tok.isdigit():
            return ({(0, 0): Fraction(tok)} if tok != "0" else {}, {(0, 0): ONE})
        raise ExprError(f"unexpected token {tok!r}", at)

    result = expr()
    if pos[0] != len(toks):
        raise ExprError(f"unexpected token {toks[pos[0]][0]!r}", toks[pos[0]][1])
    return result


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/()XY":
            toks.append((ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append((text[i:j], i))
            i = j
            continue
        raise ExprError(f"unexpected character {ch!r}", i)
    return toks


def _bp_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, ZERO) + v
        if w:
            out[k] = w
        elif k in out:
            del out[k]
    return out


def _bp_mul(a: dict, b: dict) -> dict:
    out = {}
    for (i, j), v in a.items():
        for (k, l), w in b.items():
            key = (i + k, j + l)
            s = out.get(key, ZERO) + v * w
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def _bp_neg(a: dict) -> dict:
    return {k: -v for k, v in a.items()}


def _rf_add(a, b):
    return (_bp_add(_bp_mul(a[0], b[1]), _bp_mul(b[0], a[1])), _bp_mul(a[1], b[1]))


def _rf_mul(a, b):
    return (_bp_mul(a[0], b[0]), _bp_mul(a[1], b[1]))


def _rf_neg(a):
    return (_bp_neg(a[0]), a[1])
