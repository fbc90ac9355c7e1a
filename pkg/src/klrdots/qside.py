"""Quantum-side oracle: Laurent polynomials, Verma pairings, Gram ranks.

Everything here is exact arithmetic over ``fractions.Fraction``.  A Laurent
polynomial is a dict mapping integer exponent tuples to nonzero Fractions; a
rational function is a (numerator, denominator) pair of such dicts compared by
cross-multiplication, never reduced.

The exponent tuple convention for a rank-n Cartan datum is

    (q, L_0, ..., L_{n-1})

where ``L_i`` tracks the highest-weight parameter attached to label ``i``.
Graded dimensions coming from the diagram side add a trailing homological
marker ``h``; the helpers here never see it unless told the tuple length.

The pairing on a universal Verma module is computed by commuting one lowering
operator at a time through the others:

    E_i F_{j_1} ... F_{j_k} v  =  sum_{s : j_s = i} gamma_i(mu_s) F_(drop s) v,

with ``mu_s`` the weight lowered below position ``s`` and

    gamma_i(mu) = (L_i q^{-(a_i|mu)} - L_i^{-1} q^{(a_i|mu)}) / (q_i - q_i^{-1}).

Example (one strand): (Fv, Fv) = q^{-1} L (L - L^{-1}) / (q - q^{-1}), which
cross-multiplies to (1 - L^2)/(1 - q^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import cartan

__all__ = [
    "lp_zero",
    "lp_monomial",
    "lp_add",
    "lp_sub",
    "lp_neg",
    "lp_mul",
    "lp_scale",
    "lp_eq",
    "RationalFunction",
    "rf_const",
    "rf_monomial",
    "rf_add",
    "rf_sub",
    "rf_neg",
    "rf_mul",
    "rf_div",
    "rf_is_zero",
    "rf_eq",
    "quantum_integer",
    "expand_inverse",
    "expand_series",
    "truncate_terms",
    "specialize_finite_weights",
    "GradedSeries",
    "series_eq",
    "VermaWeightSpace",
    "sequences_of_weight",
    "shapovalov",
    "gram_matrix",
    "verma_weight_dim",
]


# ---------------------------------------------------------------------------
# Laurent polynomials: dict[tuple[int, ...] -> Fraction], zeros stripped.


def lp_zero():
    return {}


def lp_monomial(exps, coeff=Fraction(1)):
    coeff = Fraction(coeff)
    if coeff == 0:
        return {}
    return {tuple(exps): coeff}


def lp_add(p, q):
    out = dict(p)
    for e, c in q.items():
        nc = out.get(e, Fraction(0)) + c
        if nc:
            out[e] = nc
        else:
            out.pop(e, None)
    return out


def lp_neg(p):
    return {e: -c for e, c in p.items()}


def lp_sub(p, q):
    return lp_add(p, lp_neg(q))


def lp_scale(p, c):
    c = Fraction(c)
    if c == 0:
        return {}
    return {e: c * v for e, v in p.items()}


def lp_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            nc = out.get(e, Fraction(0)) + c1 * c2
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
    return out


def lp_eq(p, q):
    return p == q


def lp_shift(p, exps):
    """Multiply by the monomial with exponent tuple ``exps``."""
    return {tuple(a + b for a, b in zip(e, exps)): c for e, c in p.items()}


# ---------------------------------------------------------------------------
# Rational functions.


@dataclass
class RationalFunction:
    num: dict
    den: dict

    def __post_init__(self):
        assert self.den, "denominator must be nonzero"


def rf_const(c, nvars):
    return RationalFunction(lp_monomial((0,) * nvars, c), lp_monomial((0,) * nvars))


def rf_monomial(exps, coeff=Fraction(1)):
    n = len(tuple(exps))
    return RationalFunction(lp_monomial(exps, coeff), lp_monomial((0,) * n))


def rf_add(a, b):
    if a.den == b.den:
        return RationalFunction(lp_add(a.num, b.num), a.den)
    return RationalFunction(
        lp_add(lp_mul(a.num, b.den), lp_mul(b.num, a.den)), lp_mul(a.den, b.den)
    )


def rf_neg(a):
    return RationalFunction(lp_neg(a.num), a.den)


def rf_sub(a, b):
    return rf_add(a, rf_neg(b))


def rf_mul(a, b):
    return RationalFunction(lp_mul(a.num, b.num), lp_mul(a.den, b.den))


def rf_div(a, b):
    assert b.num, "division by zero rational function"
    return RationalFunction(lp_mul(a.num, b.den), lp_mul(a.den, b.num))


def rf_is_zero(a):
    return not a.num


def rf_eq(a, b):
    return lp_eq(lp_mul(a.num, b.den), lp_mul(b.num, a.den))


# ---------------------------------------------------------------------------
# Quantum integers and series expansion.


def quantum_integer(n, d=1, nvars=1):
    """[n] in the variable q^d, as a Laurent dict over ``nvars`` variables.

    [n] = q^{d(n-1)} + q^{d(n-3)} + ... + q^{-d(n-1)}; [-n] = -[n]; [0] = 0.
    """
    if n < 0:
        return lp_neg(quantum_integer(-n, d, nvars))
    out = {}
    for k in range(n):
        e = [0] * nvars
        e[0] = d * (n - 1 - 2 * k)
        out = lp_add(out, lp_monomial(tuple(e)))
    return out


def _q_only(p):
    return all(all(x == 0 for x in e[1:]) for e in p)


def expand_inverse(den, qbound):
    """Series of 1/den up to q-exponent ``qbound``.

    ``den`` must involve only the first variable (q); its support must have a
    unique minimal q-exponent.  Returns a Laurent dict.
    """
    assert den, "cannot invert zero"
    assert _q_only(den), "series inversion only supports q-only denominators"
    e0 = min(e[0] for e in den)
    c0 = den[tuple([e0] + [0] * (len(next(iter(den))) - 1))]
    nvars = len(next(iter(den)))
    # den = c0 q^{e0} (1 + u), all u-terms with positive q-exponent
    shift = tuple([-e0] + [0] * (nvars - 1))
    u = lp_sub(lp_scale(lp_shift(den, shift), Fraction(1, 1) / c0), lp_monomial((0,) * nvars))
    assert all(e[0] > 0 for e in u), "denominator minimal term is not unique"
    inv = lp_monomial((0,) * nvars)
    power = lp_monomial((0,) * nvars)
    # geometric series sum (-u)^k, truncated in the q-exponent
    step = min((e[0] for e in u), default=qbound + 1)
    k = 0
    while k * step <= qbound + abs(e0):
        k += 1
        power = truncate_terms(lp_mul(power, lp_neg(u)), qbound + abs(e0))
        if not power:
            break
        inv = lp_add(inv, power)
    out = lp_scale(lp_shift(inv, shift), Fraction(1, 1) / c0)
    return truncate_terms(out, qbound)


def truncate_terms(p, qbound):
    """Drop monomials whose q-exponent exceeds ``qbound``."""
    return {e: c for e, c in p.items() if e[0] <= qbound}


def expand_series(rf, qbound):
    """Truncated series of a rational function with q-only denominator."""
    inv = expand_inverse(rf.den, qbound + _num_qslack(rf.num))
    return truncate_terms(lp_mul(rf.num, inv), qbound)


def _num_qslack(num):
    # If the numerator has terms of negative q-degree, the inverse must be
    # expanded further for the product to be correct up to the bound.
    if not num:
        return 0
    return max(0, -min(e[0] for e in num))


def specialize_finite_weights(p, datum, parab):
    """Substitute L_j -> q^{d_j n_j} for each finite label j; keep others.

    Input and output are Laurent dicts over (q, L_0..L_{n-1}) or longer tuples
    (trailing variables ride along untouched).
    """
    out = {}
    for e, c in p.items():
        q_extra = 0
        newe = list(e)
        for j in parab.finite:
            q_extra += datum.d[j] * parab.n[j] * e[1 + j]
            newe[1 + j] = 0
        newe[0] += q_extra
        key = tuple(newe)
        nc = out.get(key, Fraction(0)) + c
        if nc:
            out[key] = nc
        else:
            out.pop(key, None)
    return out


@dataclass
class GradedSeries:
    """Either an exact rational function or a truncated term dict."""

    kind: str  # "exact" | "truncated"
    nvars: int
    rf: RationalFunction = None
    terms: dict = None
    qbound: int = None


def series_eq(a, b):
    """Equality of graded series; truncated comparisons use the tighter bound."""
    if a.kind == "exact" and b.kind == "exact":
        return rf_eq(a.rf, b.rf)
    bound = min(x.qbound for x in (a, b) if x.kind == "truncated")
    ta = expand_series(a.rf, bound) if a.kind == "exact" else truncate_terms(a.terms, bound)
    tb = expand_series(b.rf, bound) if b.kind == "exact" else truncate_terms(b.terms, bound)
    return ta == tb


# ---------------------------------------------------------------------------
# Verma pairings.


def sequences_of_weight(datum, nu):
    """All label sequences with content ``nu``, sorted lexicographically."""
    n = datum.rank
    assert len(nu) == n and all(k >= 0 for k in nu)
    out = []

    def rec(prefix, remaining):
        if sum(remaining) == 0:
            out.append(tuple(prefix))
            return
        for i in range(n):
            if remaining[i] > 0:
                remaining[i] -= 1
                prefix.append(i)
                rec(prefix, remaining)
                prefix.pop()
                remaining[i] += 1

    rec([], list(nu))
    return tuple(sorted(out))


def _weight_of(datum, seq):
    nu = [0] * datum.rank
    for i in seq:
        nu[i] += 1
    return tuple(nu)


def _gamma(datum, i, mu):
    """(L_i q^{-(a_i|mu)} - L_i^{-1} q^{(a_i|mu)}) / (q_i - q_i^{-1})."""
    n = datum.rank
    pairing = sum(cartan.bilinear(datum, i, j) * mu[j] for j in range(n))
    num = {}
    e_plus = [0] * (n + 1)
    e_plus[0] = -pairing
    e_plus[1 + i] = 1
    num = lp_add(num, lp_monomial(tuple(e_plus)))
    e_minus = [0] * (n + 1)
    e_minus[0] = pairing
    e_minus[1 + i] = -1
    num = lp_add(num, lp_neg(lp_monomial(tuple(e_minus))))
    d = datum.d[i]
    den = lp_sub(
        lp_monomial(tuple([d] + [0] * n)), lp_monomial(tuple([-d] + [0] * n))
    )
    return RationalFunction(num, den)


_PAIR_CACHE = {}


def _pair(datum, iseq, jseq):
    n = datum.rank
    key = (datum, iseq, jseq)
    cached = _PAIR_CACHE.get(key)
    if cached is not None:
        return cached
    if len(iseq) != len(jseq) or _weight_of(datum, iseq) != _weight_of(datum, jseq):
        result = rf_const(0, n + 1)
        _PAIR_CACHE[key] = result
        return result
    if not iseq:
        result = rf_const(1, n + 1)
        _PAIR_CACHE[key] = result
        return result
    i1 = iseq[0]
    nu = _weight_of(datum, iseq)
    nu_rest = list(nu)
    nu_rest[i1] -= 1
    pairing = sum(cartan.bilinear(datum, i1, j) * nu_rest[j] for j in range(n))
    # prefactor q_{i1}^{-1} L_{i1} q^{-(a_{i1} | nu - a_{i1})}
    e = [0] * (n + 1)
    e[0] = -datum.d[i1] - pairing
    e[1 + i1] = 1
    prefactor = rf_monomial(tuple(e))
    total = RationalFunction({}, lp_monomial((0,) * (n + 1)))
    for s in range(len(jseq)):
        if jseq[s] != i1:
            continue
        mu = _weight_of(datum, jseq[s + 1 :])
        sub = _pair(datum, iseq[1:], jseq[:s] + jseq[s + 1 :])
        if rf_is_zero(sub):
            continue
        total = rf_add(total, rf_mul(_gamma(datum, i1, mu), sub))
    result = rf_mul(prefactor, total)
    _PAIR_CACHE[key] = result
    return result


def shapovalov(datum, iseq, jseq, parab=None):
    """Pairing (F_iseq v, F_jseq v) as a rational function in (q, L_*).

    With ``parab`` the finite-label parameters are specialized L_j = q^{d_j n_j}.
    """
    rf = _pair(datum, tuple(iseq), tuple(jseq))
    if parab is None:
        return rf
    return RationalFunction(
        specialize_finite_weights(rf.num, datum, parab),
        specialize_finite_weights(rf.den, datum, parab),
    )


@dataclass
class VermaWeightSpace:
    """Basis sequences and Gram matrix of a Verma weight space."""

    datum: object
    nu: tuple
    basis: tuple
    gram: tuple


def gram_matrix(datum, nu, parab=None):
    basis = sequences_of_weight(datum, nu)
    gram = tuple(
        tuple(shapovalov(datum, iseq, jseq, parab) for jseq in basis) for iseq in basis
    )
    return VermaWeightSpace(datum=datum, nu=tuple(nu), basis=basis, gram=gram)


def verma_weight_dim(datum, nu, parab=None):
    """Rank of the weight-space Gram matrix over the rational-function field."""
    space = gram_matrix(datum, nu, parab)
    rows = [list(row) for row in space.gram]
    ncols = len(space.basis)
    rank = 0
    for col in range(ncols):
        pivot = None
        for rr in range(rank, len(rows)):
            if not rf_is_zero(rows[rr][col]):
                pivot = rr
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pivot_val = rows[rank][col]
        for rr in range(len(rows)):
            if rr == rank or rf_is_zero(rows[rr][col]):
                continue
            factor = rf_div(rows[rr][col], pivot_val)
            rows[rr] = [
                rf_sub(rows[rr][c], rf_mul(factor, rows[rank][c])) for c in range(ncols)
            ]
        rank += 1
    return rank
