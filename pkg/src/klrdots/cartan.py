"""Symmetrizable Cartan data, deformation scalars, and parabolic weight data.

A Cartan datum is a generalized Cartan matrix ``a`` together with positive
symmetrizers ``d`` such that ``d[i]*a[i][j] == d[j]*a[j][i]``.  The symmetric
bilinear form on simple roots is ``(alpha_i | alpha_j) = d[i]*a[i][j]`` and the
coroot pairing against a nonnegative root vector ``nu`` is
``alpha_i^vee(nu) = sum_j a[i][j]*nu[j]``.

The deformation scalars attached to a datum are

* ``t[i][j]``, invertible, with ``t[i][i] == 1`` and ``t[i][j] == t[j][i]``
  whenever ``(alpha_i|alpha_j) == 0``;
* ``r[i]``, invertible;
* interior coefficients ``s_ij^{tv}`` supported on pairs ``(t, v)`` with
  ``t*(alpha_i|alpha_i) + v*(alpha_j|alpha_j) == -2*(alpha_i|alpha_j)``,
  ``0 <= t < d_ij`` and ``0 <= v < d_ji`` where ``d_ij = -a[i][j]``, subject to
  ``s_ij^{tv} == s_ji^{vt}``.  The boundary values ``s_ij^{d_ij, 0}`` and
  ``s_ij^{0, d_ji}`` are identified with ``t[i][j]`` and ``t[j][i]``.

Example: for the rank-two datum with ``a = [[2, -1], [-2, 2]]`` and
``d = (2, 1)`` the support of ``s_12`` is just the two boundary points, so the
double-crossing multiplier is ``t_12 * x_1 + t_21 * x_2^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "CartanDatum",
    "ScalarChoice",
    "ParabolicDatum",
    "PositiveRootVector",
    "validate_cartan",
    "bilinear",
    "coroot_pairing",
    "d_off",
    "default_scalars",
    "random_scalars",
    "validate_scalars",
    "validate_parabolic",
    "s_value",
    "s_pairs",
    "sl2",
    "a1xa1",
    "a2",
    "b2",
]

# A nonnegative integer vector in the root lattice, indexed like the labels.
PositiveRootVector = tuple


@dataclass(frozen=True)
class CartanDatum:
    """Labels, generalized Cartan matrix, and symmetrizers."""

    labels: tuple
    matrix: tuple
    d: tuple

    @property
    def rank(self):
        return len(self.labels)

    def index(self, label):
        """Dense index of a user-facing label."""
        return self.labels.index(label)


@dataclass(frozen=True)
class ScalarChoice:
    """Invertible parameters (t, r) and interior s-coefficients.

    ``t`` and ``r`` are tuples of Fractions; ``s`` is a sorted tuple of
    ``((i, j, t_exp, v_exp), value)`` entries with ``i < j`` covering the
    interior support points (missing points count as zero).
    """

    t: tuple
    r: tuple
    s: tuple = ()

    def s_dict(self):
        return dict(self.s)


@dataclass(frozen=True)
class ParabolicDatum:
    """A subset of finite labels with their weights.

    ``finite`` holds the sorted dense indices of the finite part; ``n`` is a
    full-length tuple whose entries outside ``finite`` must be zero.
    """

    finite: tuple
    n: tuple

    def is_finite(self, i):
        return i in self.finite


def validate_cartan(datum):
    """Raise ValueError unless ``datum`` is a symmetrizable Cartan datum."""
    n = len(datum.labels)
    if len(set(datum.labels)) != n:
        raise ValueError("labels must be distinct")
    if len(datum.matrix) != n or any(len(row) != n for row in datum.matrix):
        raise ValueError("matrix must be square and match the label count")
    if len(datum.d) != n:
        raise ValueError("symmetrizer length must match the label count")
    for i in range(n):
        if not isinstance(datum.d[i], int) or datum.d[i] <= 0:
            raise ValueError("symmetrizers must be positive integers")
        for j in range(n):
            a = datum.matrix[i][j]
            if not isinstance(a, int):
                raise ValueError("matrix entries must be integers")
            if i == j and a != 2:
                raise ValueError("diagonal entries must equal 2")
            if i != j and a > 0:
                raise ValueError("off-diagonal entries must be <= 0")
            if (a == 0) != (datum.matrix[j][i] == 0):
                raise ValueError("zero pattern must be symmetric")
            if datum.d[i] * a != datum.d[j] * datum.matrix[j][i]:
                raise ValueError("matrix is not symmetrized by d")


def bilinear(datum, i, j):
    """(alpha_i | alpha_j) as an integer."""
    return datum.d[i] * datum.matrix[i][j]


def coroot_pairing(datum, i, nu):
    """alpha_i^vee(nu) = sum_j a[i][j] * nu[j]."""
    return sum(datum.matrix[i][j] * nu[j] for j in range(datum.rank))


def d_off(datum, i, j):
    """d_ij = -a[i][j] for i != j (number of dot powers at a mixed crossing)."""
    assert i != j
    return -datum.matrix[i][j]


def _interior_support(datum, i, j):
    """Interior (t, v) support points for s_ij, with i != j."""
    dij = d_off(datum, i, j)
    dji = d_off(datum, j, i)
    aii = bilinear(datum, i, i)
    ajj = bilinear(datum, j, j)
    target = -2 * bilinear(datum, i, j)
    points = []
    for t in range(dij):
        for v in range(dji):
            if t * aii + v * ajj == target:
                points.append((t, v))
    return points


def default_scalars(datum):
    """The all-ones admissible choice: t = r = 1, every interior s = 1."""
    n = datum.rank
    one = Fraction(1)
    t = tuple(tuple(one for _ in range(n)) for _ in range(n))
    r = tuple(one for _ in range(n))
    s = []
    for i in range(n):
        for j in range(i + 1, n):
            for (te, ve) in _interior_support(datum, i, j):
                s.append(((i, j, te, ve), one))
    return ScalarChoice(t=t, r=r, s=tuple(sorted(s)))


def random_scalars(datum, seed):
    """A seeded admissible scalar choice with small nonzero entries.

    Entries are drawn from nonzero integers in [-9, 9]; ``t`` is forced
    symmetric on orthogonal pairs and one on the diagonal, and interior
    ``s`` values (possibly zero) are drawn on the admissible support.
    """
    import random as _random

    rng = _random.Random(seed)
    n = datum.rank

    def nonzero():
        value = 0
        while value == 0:
            value = rng.randint(-9, 9)
        return Fraction(value)

    t = [[Fraction(1)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if bilinear(datum, i, j) == 0 and j < i:
                t[i][j] = t[j][i]
            else:
                t[i][j] = nonzero()
    r = tuple(nonzero() for _ in range(n))
    s = []
    for i in range(n):
        for j in range(i + 1, n):
            for (te, ve) in _interior_support(datum, i, j):
                s.append(((i, j, te, ve), Fraction(rng.randint(-9, 9))))
    choice = ScalarChoice(
        t=tuple(tuple(row) for row in t), r=r, s=tuple(sorted(s))
    )
    validate_scalars(datum, choice)
    return choice


def validate_scalars(datum, scalars):
    """Raise ValueError unless ``scalars`` is admissible for ``datum``."""
    n = datum.rank
    if len(scalars.t) != n or any(len(row) != n for row in scalars.t):
        raise ValueError("t must be an n-by-n table")
    if len(scalars.r) != n:
        raise ValueError("r must have one entry per label")
    for i in range(n):
        if scalars.r[i] == 0:
            raise ValueError("r entries must be invertible")
        if scalars.t[i][i] != 1:
            raise ValueError("t[i][i] must equal 1")
        for j in range(n):
            if scalars.t[i][j] == 0:
                raise ValueError("t entries must be invertible")
            if i != j and bilinear(datum, i, j) == 0:
                if scalars.t[i][j] != scalars.t[j][i]:
                    raise ValueError("t must be symmetric on orthogonal pairs")
    seen = set()
    for (key, _value) in scalars.s:
        (i, j, te, ve) = key
        if key in seen:
            raise ValueError("duplicate s entry")
        seen.add(key)
        if not (0 <= i < n and 0 <= j < n and i < j):
            raise ValueError("s keys must have i < j")
        if (te, ve) not in _interior_support(datum, i, j):
            raise ValueError("s entry off the admissible interior support")


def validate_parabolic(datum, parab):
    """Raise ValueError unless ``parab`` is a parabolic datum for ``datum``."""
    n = datum.rank
    if tuple(sorted(set(parab.finite))) != parab.finite:
        raise ValueError("finite part must be sorted and duplicate-free")
    if any(not (0 <= i < n) for i in parab.finite):
        raise ValueError("finite part indices out of range")
    if len(parab.n) != n:
        raise ValueError("weight tuple must have one entry per label")
    for i in range(n):
        if not isinstance(parab.n[i], int) or parab.n[i] < 0:
            raise ValueError("weights must be nonnegative integers")
        if i not in parab.finite and parab.n[i] != 0:
            raise ValueError("weights outside the finite part must be zero")


def s_value(datum, scalars, i, j, t, v):
    """s_ij^{tv} including boundary identifications; 0 off the support."""
    if i == j:
        raise ValueError("s is defined for distinct labels only")
    if t < 0 or v < 0:
        return Fraction(0)
    dij = d_off(datum, i, j)
    dji = d_off(datum, j, i)
    if t > dij or v > dji:
        return Fraction(0)
    if t * bilinear(datum, i, i) + v * bilinear(datum, j, j) != -2 * bilinear(datum, i, j):
        return Fraction(0)
    if (t, v) == (dij, 0):
        return scalars.t[i][j]
    if (t, v) == (0, dji):
        return scalars.t[j][i]
    if i < j:
        return scalars.s_dict().get((i, j, t, v), Fraction(0))
    return scalars.s_dict().get((j, i, v, t), Fraction(0))


def s_pairs(datum, scalars, i, j):
    """All (t, v, value) with s_ij^{tv} nonzero, sorted by (t, v)."""
    out = []
    for t in range(d_off(datum, i, j) + 1):
        for v in range(d_off(datum, j, i) + 1):
            val = s_value(datum, scalars, i, j, t, v)
            if val != 0:
                out.append((t, v, val))
    return tuple(out)


def sl2():
    return CartanDatum(labels=("1",), matrix=((2,),), d=(1,))


def a1xa1():
    return CartanDatum(labels=("1", "2"), matrix=((2, 0), (0, 2)), d=(1, 1))


def a2():
    return CartanDatum(labels=("1", "2"), matrix=((2, -1), (-1, 2)), d=(1, 1))


def b2():
    """Rank two with a long first root: d = (2, 1), a = [[2,-1],[-2,2]]."""
    return CartanDatum(labels=("1", "2"), matrix=((2, -1), (-2, 2)), d=(2, 1))
