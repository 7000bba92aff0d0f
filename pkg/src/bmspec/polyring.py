"""Exact multivariate polynomials, fraction-free determinants, Cramer solves.

Coefficients are ``int`` or ``fractions.Fraction`` for exact work.  Floats are
accepted too (semi-symbolic assembly keeps numeric coefficients), in which case
arithmetic is ordinary floating point.
"""

from fractions import Fraction
from numbers import Number

import numpy as np

from .errors import DimensionError, SingularSystemError

DET_RTOL = 1e-12


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def _grlex_key(e):
    return (sum(e), e)


class MultiPoly:
    """Polynomial over an ordered tuple of variable names.

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(self.vars):
                raise DimensionError(f"exponent {e} does not match {len(self.vars)} variables")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: _norm_coeff(c) for e, c in clean.items() if c != 0}

    # construction helpers
    @classmethod
    def const(cls, vars, c):
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars, name, power=1):
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = power
        return cls(vars, {tuple(e): 1})

    @classmethod
    def gens(cls, vars):
        vars = tuple(vars)
        return [cls.var(vars, v) for v in vars]

    @classmethod
    def monomial(cls, vars, exps, coeff=1):
        return cls(vars, {tuple(exps): coeff})

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise DimensionError(f"variable sets differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, Number):
            return MultiPoly.const(self.vars, other)
        return NotImplemented

    # ring operations
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, m):
        if int(m) != m or m < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = MultiPoly.const(self.vars, 1)
        base = self
        m = int(m)
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # queries
    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(not any(e) for e in self.terms)

    def const_value(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        """Leading (exponent, coefficient) under graded lex."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def evaluate(self, point):
        """Evaluate at a mapping name -> value or a sequence in variable order."""
        if isinstance(point, dict):
            vals = [point[v] for v in self.vars]
        else:
            vals = list(point)
            if len(vals) != len(self.vars):
                raise DimensionError("point length does not match variables")
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def substitute(self, mapping):
        """Replace some variables by polynomials (over the target ring) or numbers."""
        target = None
        for val in mapping.values():
            if isinstance(val, MultiPoly):
                target = val.vars
                break
        if target is None:
            target = self.vars
        acc = MultiPoly(target)
        for e, c in self.terms.items():
            t = MultiPoly.const(target, c)
            for v, k in zip(self.vars, e):
                if not k:
                    continue
                if v in mapping:
                    t = t * (mapping[v] ** k)
                else:
                    t = t * MultiPoly.var(target, v, k)
            acc = acc + t
        return acc

    def map_coeffs(self, f):
        return MultiPoly(self.vars, {e: f(c) for e, c in self.terms.items()})

    def divexact(self, other):
        """Exact division; raises ValueError when a remainder is left."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_const():
            c = other.const_value()
            return MultiPoly(self.vars, {e: _div(v, c) for e, v in self.terms.items()})
        lead_e, lead_c = other.leading()
        rem = self
        quot = {}
        while not rem.is_zero():
            e, c = rem.leading()
            diff = tuple(a - b for a, b in zip(e, lead_e))
            if any(d < 0 for d in diff):
                raise ValueError("polynomial division is not exact")
            q = _div(c, lead_c)
            quot[diff] = quot.get(diff, 0) + q
            rem = rem - MultiPoly(self.vars, {diff: q}) * other
        return MultiPoly(self.vars, quot)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            mag = -c if neg else c
            factors = [_fmt_coeff(mag)]
            for v, k in zip(self.vars, e):
                if k == 1:
                    factors.append(v)
                elif k:
                    factors.append(f"{v}^{k}")
            body = " * ".join(factors)
            if idx == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.vars!r}, {str(self)!r})"


def _div(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return _norm_coeff(Fraction(a) / Fraction(b))


def _fmt_coeff(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
    if isinstance(c, float) and c.is_integer():
        return str(int(c))
    return str(c)


class RationalFunction:
    """num / den with den's graded-lex leading coefficient made positive."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if not isinstance(den, MultiPoly):
            den = MultiPoly.const(num.vars, den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if den.leading()[1] < 0:
            num, den = -num, -den
        self.num, self.den = num, den

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at this point")
        n = self.num.evaluate(point)
        if isinstance(n, float) or isinstance(d, float):
            return n / d
        return _norm_coeff(Fraction(n) / Fraction(d))

    def __str__(self):
        return f"({self.num}) / ({self.den})"

    __repr__ = __str__


def _is_poly_matrix(M):
    return any(isinstance(x, MultiPoly) for row in M for x in row)


def _is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def bareiss_det(M):
    """Fraction-free determinant over any exact domain with ``divexact``-style division.

    Entries may be ints, Fractions or MultiPoly; row swaps handle zero pivots.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionError("determinant needs a square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if _iszero(a[k][k]):
            for p in range(k + 1, n):
                if not _iszero(a[p][k]):
                    a[k], a[p] = a[p], a[k]
                    sign = -sign
                    break
            else:
                return _zero_like(a[0][0])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = _exact_div(num, prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def _iszero(x):
    return x.is_zero() if isinstance(x, MultiPoly) else x == 0


def _zero_like(x):
    return MultiPoly(x.vars) if isinstance(x, MultiPoly) else 0


def _exact_div(num, den):
    if isinstance(num, MultiPoly):
        return num.divexact(den)
    if isinstance(den, MultiPoly):
        return MultiPoly.const(den.vars, num).divexact(den)
    return _div(num, den)


def _lift(M):
    """Promote every entry of a matrix that contains polynomials to MultiPoly."""
    vars = next(x.vars for row in M for x in row if isinstance(x, MultiPoly))
    return [[x if isinstance(x, MultiPoly) else MultiPoly.const(vars, x) for x in row] for row in M]


def fraction_free_det(M):
    """Exact determinant of a square matrix of MultiPoly (or exact numbers)."""
    M = [list(row) for row in M]
    if M and _is_poly_matrix(M):
        M = _lift(M)
    return bareiss_det(M)


def _numeric_singular(M, det):
    scale = float(np.prod(np.maximum(np.linalg.norm(M, axis=1), np.finfo(float).tiny)))
    return abs(det) <= DET_RTOL * scale


def cramer_solve(M, b):
    """Solve ``M x = b`` by Cramer's rule.

    * MultiPoly entries: returns RationalFunction list sharing denominator det(M).
    * int/Fraction entries: exact Fraction results.
    * floats: numeric solution, with a scale-relative singularity test.
    """
    n = len(M)
    if any(len(row) != n for row in M) or len(b) != n:
        raise DimensionError("Cramer's rule needs a square system with matching rhs")
    rows = [list(row) for row in M]
    b = list(b)
    if _is_poly_matrix(rows) or any(isinstance(x, MultiPoly) for x in b):
        vars = next(x.vars for x in [*(y for r in rows for y in r), *b] if isinstance(x, MultiPoly))
        lift = lambda x: x if isinstance(x, MultiPoly) else MultiPoly.const(vars, x)
        rows = [[lift(x) for x in r] for r in rows]
        b = [lift(x) for x in b]
        det = bareiss_det(rows)
        if det.is_zero():
            raise SingularSystemError("coefficient determinant vanishes identically")
        out = []
        for i in range(n):
            Mi = [r[:i] + [b[k]] + r[i + 1:] for k, r in enumerate(rows)]
            out.append(RationalFunction(bareiss_det(Mi), det))
        return out
    if all(_is_exact(x) for r in rows for x in r) and all(_is_exact(x) for x in b):
        det = bareiss_det(rows)
        if det == 0:
            raise SingularSystemError("coefficient determinant is zero")
        return [_div(bareiss_det([r[:i] + [b[k]] + r[i + 1:] for k, r in enumerate(rows)]), det)
                for i in range(n)]
    A = np.array(rows, dtype=float)
    bb = np.array(b, dtype=float)
    det = np.linalg.det(A)
    if not np.isfinite(det) or _numeric_singular(A, det):
        raise SingularSystemError(f"coefficient matrix is numerically singular (det={det:.3g})")
    # LU-based solve; equal to the determinant ratios but better conditioned.
    return np.linalg.solve(A, bb)


def vandermonde(x):
    """Matrix with entry (i, j) equal to x_j ** i."""
    x = list(x)
    n = len(x)
    if n < 1:
        raise DimensionError("vandermonde needs at least one node")
    if any(isinstance(v, MultiPoly) for v in x):
        return [[v ** i for v in x] for i in range(n)]
    if all(_is_exact(v) for v in x):
        return [[v ** i for v in x] for i in range(n)]
    xv = np.asarray(x, dtype=float)
    return np.vander(xv, n, increasing=True).T

