"""Exact arithmetic in cyclotomic fields and sparse linear algebra over them.

The scalar domain is Q(zeta_N) for a fixed N >= 2, represented in the power
basis 1, zeta, ..., zeta^(phi(N)-1) with rational coefficients, always
reduced modulo the N-th cyclotomic polynomial.  Matrices are sparse and
column-major.  Eliminations are fraction-free (no division during row
updates, rational content stripped after each update) with deterministic
first-nonzero pivoting, so every rank, kernel and image is exact and
reproducible regardless of dict iteration order.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import SubquotientError, ValidationError

_F0 = Fraction(0)
_F1 = Fraction(1)


# ---------------------------------------------------------------------------
# Rational polynomial helpers (coefficients ascending)

def _poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(num, den):
    """Exact division with remainder over Q."""
    num = [Fraction(c) for c in num]
    den = _poly_trim([Fraction(c) for c in den])
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    qlen = max(0, len(num) - len(den) + 1)
    quo = [_F0] * max(1, qlen)
    inv_lead = _F1 / den[-1]
    for k in range(qlen - 1, -1, -1):
        c = num[k + len(den) - 1] * inv_lead
        quo[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    return quo, _poly_trim(num)


def _poly_mulmod(a, b, mod):
    deg = len(mod) - 1
    conv = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
    _, rem = _poly_divmod(conv, mod)
    rem += [_F0] * (deg - len(rem))
    return rem[:deg]


def cyclotomic_polynomial(n: int) -> list[Fraction]:
    """Coefficients of the n-th cyclotomic polynomial, ascending degree.

    Computed by exact division: x^n - 1 divided by the cyclotomic
    polynomials of all proper divisors of n.
    """
    if n < 1:
        raise ValidationError(f"cyclotomic polynomial undefined for n={n}")
    memo: dict[int, list[Fraction]] = {}
    for m in sorted(d for d in range(1, n + 1) if n % d == 0):
        num = [Fraction(-1)] + [_F0] * (m - 1) + [_F1]
        for d in range(1, m):
            if m % d == 0:
                num, rem = _poly_divmod(num, memo[d])
                if rem:
                    raise ValidationError(f"cyclotomic division left a remainder at n={m}")
        memo[m] = num
    return memo[n]


# ---------------------------------------------------------------------------
# Field context and scalars

class FieldContext:
    """Arithmetic context for Q(zeta_N): modulus, degree and reduction tables."""

    __slots__ = ("order", "phi", "degree", "_red", "zero", "one", "zeta")

    def __init__(self, order: int):
        if not isinstance(order, int) or order < 2:
            raise ValidationError(f"field order must be an integer >= 2, got {order!r}")
        self.order = order
        self.phi = tuple(cyclotomic_polynomial(order))
        deg = len(self.phi) - 1
        self.degree = deg
        # zeta^(deg + e) reduced, for e = 0 .. deg - 2
        red = []
        if deg >= 1:
            base = tuple(-c for c in self.phi[:deg])
            red.append(base)
            for _ in range(deg - 2):
                prev = red[-1]
                top = prev[deg - 1]
                nxt = [_F0] + [c for c in prev[: deg - 1]]
                if top:
                    for j, bj in enumerate(base):
                        if bj:
                            nxt[j] += top * bj
                red.append(tuple(nxt))
        self._red = tuple(red)
        self.zero = Scalar(self, (_F0,) * deg)
        self.one = Scalar(self, (_F1,) + (_F0,) * (deg - 1))
        if deg >= 2:
            self.zeta = Scalar(self, (_F0, _F1) + (_F0,) * (deg - 2))
        else:
            # phi(N) = 1 happens only for N = 2, where zeta = -1
            self.zeta = Scalar(self, (Fraction(-1),))

    def scalar(self, value) -> "Scalar":
        """Embed an int or Fraction (or pass a Scalar through)."""
        if isinstance(value, Scalar):
            if value.ctx is not self:
                raise ValidationError("scalar belongs to a different field context")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise ValidationError(f"cannot embed {value!r} into Q(zeta_{self.order})")
        f = Fraction(value)
        if not f:
            return self.zero
        return Scalar(self, (f,) + (_F0,) * (self.degree - 1))

    def from_coeffs(self, coeffs) -> "Scalar":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            raise ValidationError(
                f"coefficient vector longer than field degree {self.degree}")
        cs += [_F0] * (self.degree - len(cs))
        return Scalar(self, tuple(cs))

    def __repr__(self):
        return f"FieldContext(Q(zeta_{self.order}), degree {self.degree})"

    def __eq__(self, other):
        return isinstance(other, FieldContext) and other.order == self.order

    def __hash__(self):
        return hash(("FieldContext", self.order))


def field_new(order: int) -> FieldContext:
    """Build the arithmetic context for Q(zeta_N)."""
    return FieldContext(order)


class Scalar:
    """An element of Q(zeta_N), reduced coefficient vector of length phi(N)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldContext, coeffs: tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    def __bool__(self):
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValidationError("scalar is not rational")
        return self.coeffs[0]

    def __add__(self, other):
        other = self.ctx.scalar(other)
        return Scalar(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self.ctx.scalar(other)
        return Scalar(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self.ctx.scalar(other) - self

    def __neg__(self):
        return Scalar(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return self.ctx.zero
            if other == 1:
                return self
            return Scalar(self.ctx, tuple(a * other for a in self.coeffs))
        if not isinstance(other, Scalar):
            return NotImplemented
        ctx = self.ctx
        a, b = self.coeffs, other.coeffs
        deg = ctx.degree
        if deg == 1:
            return Scalar(ctx, (a[0] * b[0],))
        if not any(a[1:]):
            return other * a[0]
        if not any(b[1:]):
            return self * b[0]
        conv = [_F0] * (2 * deg - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        out = conv[:deg]
        red = ctx._red
        for e in range(deg, 2 * deg - 1):
            ce = conv[e]
            if ce:
                row = red[e - deg]
                for j, rj in enumerate(row):
                    if rj:
                        out[j] += ce * rj
        return Scalar(ctx, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        ctx = self.ctx
        # extended Euclid in Q[x]: s*self + t*phi = gcd (a nonzero constant)
        r0 = _poly_trim(list(self.coeffs))
        r1 = list(ctx.phi)
        s0, s1 = [_F1], [_F0]
        while len(r1) > 1 or (r1 and r1[0]):
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            # s_new = s0 - q*s1
            prod = [_F0] * (len(q) + len(s1) - 1) if s1 else []
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        if sj:
                            prod[i + j] += qi * sj
            new = list(s0) + [_F0] * max(0, len(prod) - len(s0))
            for i, p in enumerate(prod):
                new[i] -= p
            s0, s1 = s1, _poly_trim(new)
            if not r1:
                break
        # r0 is now the gcd, a nonzero constant since phi is irreducible
        g = r0[0]
        inv = [c / g for c in s0]
        _, rem = _poly_divmod(inv, list(ctx.phi))
        rem += [_F0] * (ctx.degree - len(rem))
        return Scalar(ctx, tuple(rem[: ctx.degree]))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, Scalar):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self
        if n < 0:
            base = self.inverse()
            n = -n
        out = self.ctx.one
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ctx.order == other.ctx.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Scalar({scalar_to_str(self)})"


def q_root(ctx: FieldContext, a: int = 1) -> Scalar:
    """The primitive N-th root zeta^a; requires gcd(a, N) = 1."""
    if math.gcd(a, ctx.order) != 1:
        raise ValidationError(
            f"zeta^{a} is not a primitive root of unity of order {ctx.order}")
    return ctx.zeta ** (a % ctx.order)


def q_integer(ctx: FieldContext, q: Scalar, n: int) -> Scalar:
    """The q-integer [n]_q = 1 + q + ... + q^(n-1)."""
    if n < 0:
        raise ValidationError("q-integer defined for n >= 0")
    acc = ctx.zero
    p = ctx.one
    for _ in range(n):
        acc = acc + p
        p = p * q
    return acc


# ---------------------------------------------------------------------------
# Canonical scalar strings ("p", "p/q" or "(c0, c1, ...)")

def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def scalar_to_str(s: Scalar) -> str:
    if s.is_rational():
        return _frac_str(s.coeffs[0])
    return "(" + ", ".join(_frac_str(c) for c in s.coeffs) + ")"


def scalar_from_str(ctx: FieldContext, text: str) -> Scalar:
    text = text.strip()
    try:
        if text.startswith("(") and text.endswith(")"):
            parts = [p.strip() for p in text[1:-1].split(",") if p.strip()]
            return ctx.from_coeffs([Fraction(p) for p in parts])
        return ctx.scalar(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse scalar {text!r}: {exc}") from exc


def scalar_from_json(ctx: FieldContext, obj) -> Scalar:
    """Accept ints, canonical strings, or coefficient lists; floats are banned."""
    if isinstance(obj, bool):
        raise ValidationError("booleans are not scalars")
    if isinstance(obj, int):
        return ctx.scalar(obj)
    if isinstance(obj, float):
        raise ValidationError("floating point input is not accepted; use exact strings")
    if isinstance(obj, str):
        return scalar_from_str(ctx, obj)
    if isinstance(obj, (list, tuple)):
        return ctx.from_coeffs([Fraction(str(c)) if isinstance(c, str) else Fraction(c) for c in obj])
    raise ValidationError(f"cannot interpret {obj!r} as a scalar")


# ---------------------------------------------------------------------------
# Sparse matrices

class QMatrix:
    """Sparse matrix over Q(zeta_N), column-major, no stored zeros."""

    __slots__ = ("ctx", "rows", "cols", "_coldata")

    def __init__(self, ctx: FieldContext, rows: int, cols: int, coldata):
        self.ctx = ctx
        self.rows = rows
        self.cols = cols
        self._coldata = coldata  # tuple of dict row -> Scalar

    # construction -----------------------------------------------------

    @staticmethod
    def zeros(ctx, rows, cols) -> "QMatrix":
        return QMatrix(ctx, rows, cols, tuple({} for _ in range(cols)))

    @staticmethod
    def identity(ctx, n) -> "QMatrix":
        one = ctx.one
        return QMatrix(ctx, n, n, tuple({i: one} for i in range(n)))

    @staticmethod
    def from_entries(ctx, rows, cols, entries) -> "QMatrix":
        cd = [dict() for _ in range(cols)]
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValidationError(f"matrix entry ({r}, {c}) out of bounds")
            v = ctx.scalar(v) if not isinstance(v, Scalar) else v
            if v:
                cur = cd[c].get(r)
                nv = cur + v if cur is not None else v
                if nv:
                    cd[c][r] = nv
                elif cur is not None:
                    del cd[c][r]
        return QMatrix(ctx, rows, cols, tuple(cd))

    @staticmethod
    def from_cols(ctx, rows, coldicts) -> "QMatrix":
        cd = []
        for col in coldicts:
            cd.append({r: v for r, v in col.items() if v})
        return QMatrix(ctx, rows, len(cd), tuple(cd))

    @staticmethod
    def from_dense(ctx, rows_list) -> "QMatrix":
        nrows = len(rows_list)
        ncols = len(rows_list[0]) if nrows else 0
        cd = [dict() for _ in range(ncols)]
        for r, row in enumerate(rows_list):
            if len(row) != ncols:
                raise ValidationError("ragged dense matrix")
            for c, v in enumerate(row):
                s = v if isinstance(v, Scalar) else ctx.scalar(v)
                if s:
                    cd[c][r] = s
        return QMatrix(ctx, nrows, ncols, tuple(cd))

    # access -----------------------------------------------------------

    def col(self, c: int) -> dict:
        return self._coldata[c]

    def entry(self, r: int, c: int) -> Scalar:
        return self._coldata[c].get(r, self.ctx.zero)

    def iter_entries(self):
        for c, col in enumerate(self._coldata):
            for r, v in col.items():
                yield r, c, v

    def nnz(self) -> int:
        return sum(len(col) for col in self._coldata)

    def is_zero(self) -> bool:
        return all(not col for col in self._coldata)

    def to_dense(self):
        z = self.ctx.zero
        out = [[z] * self.cols for _ in range(self.rows)]
        for r, c, v in self.iter_entries():
            out[r][c] = v
        return out

    # arithmetic -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self._coldata == other._coldata

    def __add__(self, other):
        self._shape_match(other)
        cd = []
        for a, b in zip(self._coldata, other._coldata):
            col = dict(a)
            for r, v in b.items():
                nv = col.get(r)
                nv = v if nv is None else nv + v
                if nv:
                    col[r] = nv
                elif r in col:
                    del col[r]
            cd.append(col)
        return QMatrix(self.ctx, self.rows, self.cols, tuple(cd))

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s) -> "QMatrix":
        s = s if isinstance(s, Scalar) else self.ctx.scalar(s)
        if not s:
            return QMatrix.zeros(self.ctx, self.rows, self.cols)
        cd = tuple({r: v * s for r, v in col.items()} for col in self._coldata)
        return QMatrix(self.ctx, self.rows, self.cols, cd)

    def _shape_match(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValidationError(
                f"shape mismatch ({self.rows}x{self.cols} vs {other.rows}x{other.cols})")

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValidationError(
                f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        scols = self._coldata
        out = []
        for ocol in other._coldata:
            acc: dict = {}
            for k, vb in ocol.items():
                for r, va in scols[k].items():
                    cur = acc.get(r)
                    nv = va * vb if cur is None else cur + va * vb
                    if nv:
                        acc[r] = nv
                    elif cur is not None:
                        del acc[r]
            out.append(acc)
        return QMatrix(self.ctx, self.rows, other.cols, tuple(out))

    def apply_to_col(self, col: dict) -> dict:
        """Sparse matrix times sparse column vector."""
        acc: dict = {}
        scols = self._coldata
        for k, vb in col.items():
            for r, va in scols[k].items():
                cur = acc.get(r)
                nv = va * vb if cur is None else cur + va * vb
                if nv:
                    acc[r] = nv
                elif cur is not None:
                    del acc[r]
        return acc

    def transpose(self) -> "QMatrix":
        cd = [dict() for _ in range(self.rows)]
        for r, c, v in self.iter_entries():
            cd[r][c] = v
        return QMatrix(self.ctx, self.cols, self.rows, tuple(cd))

    def permute_cols(self, perm) -> "QMatrix":
        cd = tuple(dict(self._coldata[p]) for p in perm)
        return QMatrix(self.ctx, self.rows, len(perm), cd)

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# Fraction-free elimination

def _row_content_normalize(row: dict) -> None:
    """Divide a row by its rational content and fix the sign, in place.

    Keeps coefficients integral and primitive, which is what controls
    growth during fraction-free elimination.
    """
    if not row:
        return
    g = 0
    l = 1
    for s in row.values():
        for c in s.coeffs:
            if c:
                g = math.gcd(g, abs(c.numerator))
                l = l * c.denominator // math.gcd(l, c.denominator)
    if g == 0:
        return
    factor = Fraction(l, g)
    lead = row[min(row)]
    for c in lead.coeffs:
        if c:
            if c < 0:
                factor = -factor
            break
    if factor != 1:
        for r in list(row):
            row[r] = row[r] * factor


def _echelon(ctx, row_dicts, ncols, pivot_limit=None):
    """Fraction-free row echelon with first-nonzero pivoting.

    row_dicts is consumed.  Returns (pivots, residual_rows) where pivots is
    a list of (pivot_col, row_dict) in increasing pivot_col order and
    residual_rows are the fully eliminated leftovers (nonzero only beyond
    pivot_limit, when one is given).
    """
    limit = ncols if pivot_limit is None else pivot_limit
    occupancy: dict[int, set] = {}
    for idx, row in enumerate(row_dicts):
        _row_content_normalize(row)
        for c in row:
            occupancy.setdefault(c, set()).add(idx)
    active = set(range(len(row_dicts)))
    pivots = []
    for col in range(limit):
        cand = occupancy.get(col)
        if not cand:
            continue
        piv_idx = min(cand)
        piv_row = row_dicts[piv_idx]
        active.discard(piv_idx)
        for c in piv_row:
            occupancy[c].discard(piv_idx)
        pv = piv_row[col]
        for idx in sorted(cand & active):
            row = row_dicts[idx]
            cv = row.pop(col)
            occupancy[col].discard(idx)
            # row <- pv*row - cv*piv_row  (fraction-free update)
            for c, v in row.items():
                row[c] = v * pv
            for c, v in piv_row.items():
                if c == col:
                    continue
                cur = row.get(c)
                nv = -(cv * v) if cur is None else cur - cv * v
                if nv:
                    if cur is None:
                        occupancy.setdefault(c, set()).add(idx)
                    row[c] = nv
                else:
                    if cur is not None:
                        del row[c]
                        occupancy[c].discard(idx)
            _row_content_normalize(row)
        pivots.append((col, piv_row))
    residual = [row_dicts[i] for i in sorted(active) if row_dicts[i]]
    return pivots, residual


def _rows_of(M: QMatrix):
    rows: dict[int, dict] = {}
    for r, c, v in M.iter_entries():
        rows.setdefault(r, {})[c] = v
    return [rows[r] for r in sorted(rows)]


def rank(M: QMatrix) -> int:
    """Exact rank over Q(zeta_N)."""
    pivots, _ = _echelon(M.ctx, _rows_of(M), M.cols)
    return len(pivots)


def nullspace(M: QMatrix) -> list[dict]:
    """Basis of the right kernel; one sparse column per free column of M.

    Deterministic: the vector for free column f has a 1 in position f and
    back-substituted pivot entries, ordered by increasing f.
    """
    pivots, _ = _echelon(M.ctx, _rows_of(M), M.cols)
    pivot_cols = {c for c, _ in pivots}
    one = M.ctx.one
    basis = []
    for f in range(M.cols):
        if f in pivot_cols:
            continue
        vec = {f: one}
        for pc, prow in reversed(pivots):
            s = None
            for c, v in prow.items():
                if c == pc:
                    continue
                xv = vec.get(c)
                if xv is not None:
                    t = v * xv
                    s = t if s is None else s + t
            if s is not None and s:
                vec[pc] = -s / prow[pc]
        basis.append(vec)
    return basis


def image(M: QMatrix) -> list[dict]:
    """Basis of the column space: the original columns at pivot positions."""
    pivots, _ = _echelon(M.ctx, _rows_of(M), M.cols)
    return [dict(M.col(c)) for c, _ in pivots]


def columns_to_matrix(ctx, dim, cols) -> QMatrix:
    return QMatrix.from_cols(ctx, dim, cols)


def solve_in_span(ctx, dim, basis_cols, targets):
    """Coordinates of each target in the span of basis_cols, or None.

    basis_cols must be linearly independent.  Returns a list aligned with
    targets; each element is a coordinate list (Scalars) or None when the
    target is outside the span.
    """
    k = len(basis_cols)
    rows: dict[int, dict] = {}
    for j, colv in enumerate(basis_cols):
        for r, v in colv.items():
            rows.setdefault(r, {})[j] = v
    for t, tv in enumerate(targets):
        for r, v in tv.items():
            rows.setdefault(r, {})[k + t] = v
    row_list = [rows[r] for r in sorted(rows)]
    pivots, residual = _echelon(ctx, row_list, k + len(targets), pivot_limit=k)
    if len(pivots) != k:
        raise ValidationError("solve_in_span requires an independent basis")
    bad = set()
    for row in residual:
        for c in row:
            bad.add(c - k)
    out = []
    zero = ctx.zero
    for t in range(len(targets)):
        if t in bad:
            out.append(None)
            continue
        coords = [zero] * k
        tc = k + t
        for pc, prow in reversed(pivots):
            s = prow.get(tc)
            s = zero if s is None else s
            acc = None
            for c, v in prow.items():
                if c == pc or c >= k:
                    continue
                xv = coords[c]
                if xv:
                    term = v * xv
                    acc = term if acc is None else acc + term
            rhs = s if acc is None else s - acc
            coords[pc] = rhs / prow[pc] if rhs else zero
        out.append(coords)
    return out


def quotient_dim(ker_basis, im_basis, ctx=None, dim=None) -> int:
    """Dimension of span(ker_basis) / span(im_basis) for im inside ker."""
    if not im_basis:
        return len(ker_basis)
    rows: dict[int, dict] = {}
    for j, colv in enumerate(im_basis):
        for r, v in colv.items():
            rows.setdefault(r, {})[j] = v
    ctx = ctx or _ctx_of_cols(im_basis)
    pivots, _ = _echelon(ctx, [rows[r] for r in sorted(rows)], len(im_basis))
    return len(ker_basis) - len(pivots)


def _ctx_of_cols(cols):
    for col in cols:
        for v in col.values():
            return v.ctx
    raise ValidationError("cannot infer field context from empty columns")


def complement_indices(ctx, ker_basis, im_basis) -> list[int]:
    """Indices into ker_basis spanning a complement of span(im_basis).

    Chosen by pivoting the stacked columns [im | ker]; deterministic given
    the basis order.
    """
    rows: dict[int, dict] = {}
    nim = len(im_basis)
    for j, colv in enumerate(list(im_basis) + list(ker_basis)):
        for r, v in colv.items():
            rows.setdefault(r, {})[j] = v
    pivots, _ = _echelon(ctx, [rows[r] for r in sorted(rows)], nim + len(ker_basis))
    return [c - nim for c, _ in pivots if c >= nim]


def induced_on_quotient(ctx, op: QMatrix, ker_basis, im_basis) -> QMatrix:
    """Matrix of op on span(ker_basis)/span(im_basis) over the chosen complement.

    Requires span(im) inside span(ker) and op to preserve both spans;
    otherwise raises SubquotientError.
    """
    if im_basis:
        inside = solve_in_span(ctx, op.rows, list(ker_basis), list(im_basis))
        if any(c is None for c in inside):
            raise SubquotientError("not a subquotient operator: image escapes kernel span")
        op_im = [op.apply_to_col(w) for w in im_basis]
        keep = [ow for ow in op_im if ow]
        if keep:
            sols = solve_in_span(ctx, op.rows, list(im_basis), keep)
            if any(c is None for c in sols):
                raise SubquotientError("not a subquotient operator: op does not preserve the image")
    comp_idx = complement_indices(ctx, ker_basis, im_basis)
    comp = [ker_basis[j] for j in comp_idx]
    q = len(comp)
    if q == 0:
        return QMatrix.zeros(ctx, 0, 0)
    mixed = list(im_basis) + comp
    images = [op.apply_to_col(v) for v in comp]
    sols = solve_in_span(ctx, op.rows, mixed, images)
    if any(c is None for c in sols):
        raise SubquotientError("not a subquotient operator: op does not preserve the kernel span")
    nim = len(im_basis)
    entries = []
    for j, coords in enumerate(sols):
        for r in range(q):
            v = coords[nim + r]
            if v:
                entries.append((r, j, v))
    return QMatrix.from_entries(ctx, q, q, entries)
