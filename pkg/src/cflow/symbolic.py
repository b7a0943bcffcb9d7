"""Exact symbolic integer arithmetic for sizes, ranges, volumes, work and depth.

Expressions are sympy trees restricted to: integer constants, named integer
symbols, sums, products, exact rational coefficients, ``log2`` applied to a
subexpression, and ``Min``/``Max`` of two subexpressions.  The normal form is
the expanded polynomial form (sympy ``expand``), which is canonical for
polynomials of the degrees we care about: two expressions equal as functions
over the integers expand to the identical tree.

Comparison is a *sound* decision procedure, not a complete one: a definite
answer holds for every integer assignment satisfying the declared assumptions,
and anything the bound propagation cannot settle is reported as UNKNOWN.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

import sympy
from sympy.parsing.sympy_parser import (parse_expr, standard_transformations,
                                        convert_xor)

SymExpr = sympy.Expr

# log2 is kept as an uninterpreted function in formulas; numeric evaluation
# substitutes the real-valued log2.
_log2f = sympy.Function("log2")

_symcache: dict[str, sympy.Symbol] = {}


class DegreeTooHigh(Exception):
    """Raised by range_sum for polynomials of degree > 3 in the sum variable."""


def sym(name: str) -> sympy.Symbol:
    """Integer symbol with interned identity."""
    s = _symcache.get(name)
    if s is None:
        s = sympy.Symbol(name, integer=True)
        _symcache[name] = s
    return s


def const(value: int) -> SymExpr:
    return sympy.Integer(value)


def is_number(e: SymExpr) -> bool:
    return isinstance(e, (int, float)) or e.is_number


def as_expr(e: Union[SymExpr, int, str]) -> SymExpr:
    if isinstance(e, str):
        return parse(e)
    return sympy.sympify(e)


def log2(e: Union[SymExpr, int]) -> SymExpr:
    """Symbolic base-2 log.

    Products and integer powers are expanded eagerly (arguments are volumes,
    which are positive under the declared assumptions), and exact powers of
    two fold to integers.
    """
    e = as_expr(e)
    if e.is_Integer:
        v = int(e)
        if v >= 1 and (v & (v - 1)) == 0:
            return sympy.Integer(v.bit_length() - 1)
        return _log2f(e)
    if e.is_Mul:
        return sympy.Add(*[log2(f) for f in e.args])
    if e.is_Pow and e.exp.is_Integer:
        return int(e.exp) * log2(e.base)
    return _log2f(e)


def simplify(e: Union[SymExpr, int]) -> SymExpr:
    """Canonical normal form: constants folded, like terms merged, expanded."""
    return sympy.expand(as_expr(e))


def substitute(e: Union[SymExpr, int], bindings: Mapping) -> SymExpr:
    """Simultaneous substitution followed by simplify."""
    e = as_expr(e)
    subs = {sym(k) if isinstance(k, str) else k: as_expr(v)
            for k, v in bindings.items()}
    return simplify(e.subs(subs, simultaneous=True))


def evaluate(e: Union[SymExpr, int], bindings: Mapping) -> float:
    """Numeric evaluation; log2 becomes the real-valued base-2 logarithm."""
    r = substitute(e, bindings)
    r = r.replace(_log2f, lambda a: sympy.log(a) / sympy.log(2))
    v = r.evalf()
    if not v.is_number:
        raise ValueError(f"expression did not evaluate to a number: {r}")
    return float(v)


def free_symbols(e: Union[SymExpr, int]) -> set[str]:
    return {s.name for s in as_expr(e).free_symbols}


def contains_log(e: SymExpr) -> bool:
    return bool(as_expr(e).atoms(_log2f))


def is_polynomial(e: SymExpr) -> bool:
    e = as_expr(e)
    return not (e.atoms(_log2f) or e.atoms(sympy.Min) or e.atoms(sympy.Max))


def smin(a, b) -> SymExpr:
    return sympy.Min(as_expr(a), as_expr(b))


def smax(a, b) -> SymExpr:
    return sympy.Max(as_expr(a), as_expr(b))


# ---------------------------------------------------------------------------
# Assumptions and comparison
# ---------------------------------------------------------------------------

@dataclass
class Bounds:
    """Inclusive bounds for a symbol; either side may be None (unbounded).

    Bounds may reference other symbols (e.g. a loop variable bounded by
    ``N - 1``); `opaque` marks data-dependent symbols whose value is only
    fixed within one state execution.
    """
    lo: Optional[SymExpr] = None
    hi: Optional[SymExpr] = None
    opaque: bool = False


class Assumptions:
    """Symbol environment for sound comparisons.

    Size symbols default to a lower bound of 1.  `distinct` holds unordered
    symbol pairs known to be unequal (used by disjointness queries).
    """

    def __init__(self, bounds: Optional[Mapping[str, Bounds]] = None,
                 distinct: Iterable[tuple[str, str]] = ()):
        self._bounds: dict[str, Bounds] = dict(bounds or {})
        self.distinct: set[frozenset[str]] = {frozenset(p) for p in distinct}

    def copy(self) -> "Assumptions":
        a = Assumptions(dict(self._bounds))
        a.distinct = set(self.distinct)
        return a

    def set(self, name: str, lo=None, hi=None, opaque: bool = False) -> "Assumptions":
        self._bounds[name] = Bounds(
            None if lo is None else as_expr(lo),
            None if hi is None else as_expr(hi),
            opaque)
        return self

    def with_range(self, name: str, lo, hi) -> "Assumptions":
        return self.copy().set(name, lo, hi)

    def bounds(self, name: str) -> Bounds:
        b = self._bounds.get(name)
        if b is None:
            # Unlisted symbols are size symbols: integers >= 1.
            return Bounds(sympy.Integer(1), None)
        return b

    def is_opaque(self, name: str) -> bool:
        b = self._bounds.get(name)
        return bool(b and b.opaque)

    def are_distinct(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.distinct

    def mark_distinct(self, a: str, b: str) -> "Assumptions":
        self.distinct.add(frozenset((a, b)))
        return self

    def names(self):
        return self._bounds.keys()

    def __repr__(self):
        items = ", ".join(f"{k}:[{b.lo},{b.hi}]" for k, b in self._bounds.items())
        return f"Assumptions({items})"


class Cmp(enum.Enum):
    LT = "LT"
    LE = "LE"
    EQ = "EQ"
    GE = "GE"
    GT = "GT"
    UNKNOWN = "UNKNOWN"


_SHIFT_DEPTH = 8


def _coeff_sign_check(d: SymExpr, strict: bool) -> bool:
    """d >= 0 (or > 0) given every remaining symbol is a nonnegative integer.

    Holds when every monomial coefficient is nonnegative (so the value is at
    least the constant term).
    """
    d = sympy.expand(d)
    terms = d.as_ordered_terms() if d.is_Add else [d]
    constant = sympy.Integer(0)
    for t in terms:
        c, m = t.as_coeff_Mul()
        if m == 1:
            constant += c
        elif c < 0:
            return False
    return constant > 0 if strict else constant >= 0


def _prove_nonneg(d: SymExpr, assume: Assumptions, strict: bool,
                  depth: int, budget: list[int]) -> bool:
    """Sound search for a proof of d >= 0 (or d > 0 when strict).

    Each step anchors one symbol at a declared bound, replacing it with a
    fresh nonnegative shift (s = lo + u or s = hi - u); bounds may reference
    other symbols, which later steps then anchor in turn.  All anchor orders
    are explored under a node budget.
    """
    d = sympy.expand(d)
    if d.is_number:
        return d > 0 if strict else d >= 0
    if _coeff_sign_check_mixed(d, strict):
        return True
    if depth <= 0 or budget[0] <= 0:
        return False
    budget[0] -= 1
    unanchored = [s for s in sorted(d.free_symbols, key=lambda s: s.name)
                  if not s.name.startswith("_shift")]
    if not unanchored:
        return False
    for s in unanchored:
        b = assume.bounds(s.name)
        if b.opaque:
            continue
        budget[0] -= 1
        u = sympy.Symbol(f"_shift{budget[0]}", integer=True, nonnegative=True)
        if b.lo is not None and _prove_nonneg(
                d.subs(s, as_expr(b.lo) + u), assume, strict, depth - 1, budget):
            return True
        if b.hi is not None and _prove_nonneg(
                d.subs(s, as_expr(b.hi) - u), assume, strict, depth - 1, budget):
            return True
    return False


def _coeff_sign_check_mixed(d: SymExpr, strict: bool) -> bool:
    """Early success: nonnegative-coefficient form over shift symbols only."""
    if any(not s.name.startswith("_shift") for s in d.free_symbols):
        return False
    return _coeff_sign_check(d, strict)


def prove(e: SymExpr, rel: Cmp, f: SymExpr,
          assume: Optional[Assumptions] = None) -> bool:
    """Soundly prove `e rel f`; False means "could not prove"."""
    assume = assume or Assumptions()
    d = simplify(as_expr(e) - as_expr(f))
    if not is_polynomial(d):
        return rel in (Cmp.EQ, Cmp.LE, Cmp.GE) and d == 0
    if rel == Cmp.EQ:
        return d == 0
    if rel in (Cmp.GE, Cmp.GT):
        return _prove_nonneg(d, assume, rel == Cmp.GT, _SHIFT_DEPTH, [0])
    return _prove_nonneg(-d, assume, rel == Cmp.LT, _SHIFT_DEPTH, [0])


def compare(e: Union[SymExpr, int], f: Union[SymExpr, int],
            assume: Optional[Assumptions] = None) -> Cmp:
    """Sound comparison of e and f under assumptions."""
    assume = assume or Assumptions()
    d = simplify(as_expr(e) - as_expr(f))
    if d == 0:
        return Cmp.EQ
    if d.is_number:
        return Cmp.GT if d > 0 else Cmp.LT
    if not is_polynomial(d):
        return Cmp.UNKNOWN
    if prove(e, Cmp.GT, f, assume):
        return Cmp.GT
    if prove(e, Cmp.LT, f, assume):
        return Cmp.LT
    if prove(e, Cmp.GE, f, assume):
        return Cmp.GE
    if prove(e, Cmp.LE, f, assume):
        return Cmp.LE
    return Cmp.UNKNOWN


def definitely(rel: Cmp, result: Cmp) -> bool:
    """Whether `result` establishes `rel` (LE accepts LT/LE/EQ, etc.)."""
    table = {
        Cmp.LT: {Cmp.LT},
        Cmp.LE: {Cmp.LT, Cmp.LE, Cmp.EQ},
        Cmp.EQ: {Cmp.EQ},
        Cmp.GE: {Cmp.GT, Cmp.GE, Cmp.EQ},
        Cmp.GT: {Cmp.GT},
    }
    return result in table[rel]


# ---------------------------------------------------------------------------
# Range sums (Faulhaber, degree <= 3)
# ---------------------------------------------------------------------------

# Sum_{x=0}^{n} x^k for k = 0..3.
def _faulhaber(k: int, n: SymExpr) -> SymExpr:
    if k == 0:
        return n + 1
    if k == 1:
        return n * (n + 1) / 2
    if k == 2:
        return n * (n + 1) * (2 * n + 1) / 6
    return n ** 2 * (n + 1) ** 2 / 4


def range_sum(e: Union[SymExpr, int], var: Union[str, sympy.Symbol],
              lo: Union[SymExpr, int], hi: Union[SymExpr, int],
              assume: Optional[Assumptions] = None) -> SymExpr:
    """Closed form of sum_{var=lo}^{hi} e for e polynomial in var, degree <= 3.

    Returns 0 when hi < lo is provable.  The closed form itself evaluates to 0
    at hi == lo - 1, so empty ranges that are not provably empty still come
    out right on substitution.
    """
    v = sym(var) if isinstance(var, str) else var
    e, lo, hi = as_expr(e), as_expr(lo), as_expr(hi)
    if compare(hi, lo, assume) == Cmp.LT:
        return sympy.Integer(0)
    poly = sympy.Poly(simplify(e), v) if v in e.free_symbols else None
    if poly is None:
        return simplify(e * (hi - lo + 1))
    if poly.degree() > 3:
        raise DegreeTooHigh(f"degree {poly.degree()} > 3 in {v}")
    total = sympy.Integer(0)
    for k in range(poly.degree() + 1):
        c = poly.nth(k)
        if c == 0:
            continue
        total += c * (_faulhaber(k, hi) - _faulhaber(k, lo - 1))
    return simplify(total)


# ---------------------------------------------------------------------------
# Rendering and parsing
# ---------------------------------------------------------------------------

class _Printer(sympy.printing.str.StrPrinter):
    """Canonical rendering: caret for powers, log2(...) as written."""

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational).replace("**", "^")


_printer = _Printer()


def render(e: Union[SymExpr, int], factor: bool = True) -> str:
    """Canonical string form, e.g. ``N^2*(N + 1)`` or ``2*log2(N) + 2``.

    Polynomials are shown factored when that is strictly more compact;
    anything containing log2/Min/Max is shown in expanded normal form.
    """
    e = simplify(e)
    if factor and is_polynomial(e) and not e.is_number:
        f = sympy.factor(e)
        if f != e and sympy.count_ops(f) <= sympy.count_ops(e):
            e = f
    return _printer.doprint(e)


_parse_locals = {"log2": _log2f, "Min": sympy.Min, "Max": sympy.Max,
                 "min": sympy.Min, "max": sympy.Max}
_parse_tf = standard_transformations + (convert_xor,)
_ident_re = __import__("re").compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse(text: str) -> SymExpr:
    """Parse the canonical expression grammar back into a SymExpr."""
    # Bind every identifier to an interned integer symbol up front; sympy's
    # default namespace would otherwise capture names like N or E.
    local = dict(_parse_locals)
    for name in _ident_re.findall(text):
        if name not in local:
            local[name] = sym(name)
    return parse_expr(text, local_dict=local, transformations=_parse_tf,
                      evaluate=True)
