"""Diagram words: strand sequences, local generators, degrees, composition.

A word is a bottom label sequence plus a list of local generators read bottom
to top.  Generators are written multiplicatively, so the algebra product a*b
stacks a above b, and the generator list of a*b is b's list followed by a's.

Local generators (positions are 1-based):

* ``Dot(a)``: a dot on the strand currently at position ``a``;
* ``Crossing(a)``: the strands at positions ``a`` and ``a+1`` cross;
* ``FloatingDot(j, p, a)``: a floating dot with subscript label ``j`` and
  superscript ``p`` placed in the region directly right of position ``a``
  (``a == 0`` is the region left of every strand, where any floating dot is
  zero).  ``j is None`` resolves to the label of the strand at position ``a``.

Only floating dots with ``a == 1``, ``p == 0`` and matching subscript are
primitive for the normal form ("tight"); everything else is rewritten into
tight configurations by the engine.  The three-part degree of a word tracks
the quantum degree, one even weight-degree per label, and the homological
count of floating dots.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cartan

__all__ = [
    "Dot",
    "Crossing",
    "FloatingDot",
    "TightFloatingDot",
    "DiagramWord",
    "TriDegree",
    "all_sequences",
    "content_of",
    "sequence_after",
    "top_sequence",
    "resolve_subscript",
    "validate_word",
    "degree",
    "compose",
    "tightened_theta",
    "parse_word",
    "format_word",
]


@dataclass(frozen=True)
class Dot:
    a: int


@dataclass(frozen=True)
class Crossing:
    a: int


@dataclass(frozen=True)
class FloatingDot:
    j: object = None
    p: int = 0
    a: int = 1


# The primitive generator after rewriting is the tight configuration of the
# same record type.
TightFloatingDot = FloatingDot


@dataclass(frozen=True)
class DiagramWord:
    bottom: tuple
    gens: tuple = ()


@dataclass(frozen=True)
class TriDegree:
    q: int
    lam: tuple
    h: int

    def __add__(self, other):
        return TriDegree(
            self.q + other.q,
            tuple(a + b for a, b in zip(self.lam, other.lam)),
            self.h + other.h,
        )


def all_sequences(datum, nu):
    """All label-index sequences with content ``nu``, sorted lexicographically."""
    n = datum.rank
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


def content_of(datum, seq):
    nu = [0] * datum.rank
    for i in seq:
        nu[i] += 1
    return tuple(nu)


def _apply_gen_to_seq(seq, gen):
    if isinstance(gen, Crossing):
        a = gen.a
        seq = list(seq)
        seq[a - 1], seq[a] = seq[a], seq[a - 1]
        return tuple(seq)
    return seq


def sequence_after(word, k):
    """The label sequence after the first ``k`` generators."""
    seq = word.bottom
    for gen in word.gens[:k]:
        seq = _apply_gen_to_seq(seq, gen)
    return seq


def top_sequence(word):
    return sequence_after(word, len(word.gens))


def resolve_subscript(word_bottom_seq, gen):
    """Resolve a ``None`` subscript to the label left of the region."""
    if gen.j is not None:
        return gen.j
    assert gen.a >= 1, "a floating dot in the leftmost region needs a subscript"
    return word_bottom_seq[gen.a - 1]


def validate_word(datum, word):
    """Raise ValueError on malformed positions or labels."""
    m = len(word.bottom)
    for i in word.bottom:
        if not (0 <= i < datum.rank):
            raise ValueError("bottom label out of range")
    seq = word.bottom
    for gen in word.gens:
        if isinstance(gen, Dot):
            if not (1 <= gen.a <= m):
                raise ValueError("dot position out of range")
        elif isinstance(gen, Crossing):
            if not (1 <= gen.a <= m - 1):
                raise ValueError("crossing position out of range")
        elif isinstance(gen, FloatingDot):
            if not (0 <= gen.a <= m):
                raise ValueError("floating dot region out of range")
            if gen.p < 0:
                raise ValueError("floating dot superscript must be nonnegative")
            if gen.j is None and gen.a == 0:
                raise ValueError("leftmost floating dot needs an explicit subscript")
            if gen.j is not None and not (0 <= gen.j < datum.rank):
                raise ValueError("floating dot subscript out of range")
        else:
            raise ValueError("unknown generator %r" % (gen,))
        seq = _apply_gen_to_seq(seq, gen)


def degree(datum, word):
    """Three-part degree (q, per-label even weight, homological)."""
    n = datum.rank
    q = 0
    lam = [0] * n
    h = 0
    seq = word.bottom
    for gen in word.gens:
        if isinstance(gen, Dot):
            i = seq[gen.a - 1]
            q += cartan.bilinear(datum, i, i)
        elif isinstance(gen, Crossing):
            i = seq[gen.a - 1]
            j = seq[gen.a]
            q -= cartan.bilinear(datum, i, j)
        elif isinstance(gen, FloatingDot):
            j = resolve_subscript(seq, gen)
            region = content_of(datum, seq[: gen.a])
            q += (1 + gen.p - cartan.coroot_pairing(datum, j, region) + region[j]) * (
                cartan.bilinear(datum, j, j)
            )
            lam[j] += 2
            h += 1
        seq = _apply_gen_to_seq(seq, gen)
    return TriDegree(q=q, lam=tuple(lam), h=h)


def compose(w1, w2):
    """Stack ``w2`` under ``w1``; requires top(w2) == bottom(w1)."""
    if top_sequence(w2) != w1.bottom:
        raise ValueError("words do not compose: top/bottom sequences differ")
    return DiagramWord(bottom=w2.bottom, gens=w2.gens + w1.gens)


def tightened_theta(m, a, ell, j=None):
    """Generator list of the hooked floating dot on width-``m`` diagrams.

    The strand at position ``a`` detours to the far left, picks up a tight
    floating dot (subscript ``j``, resolved from context when None) with
    ``ell`` dots at position 1 directly above it, and returns.  ``ell == -1``
    means no insertion at all (the identity block).
    """
    assert 1 <= a <= m
    if ell == -1:
        return ()
    assert ell >= 0
    down = tuple(Crossing(b) for b in range(a - 1, 0, -1))
    up = tuple(Crossing(b) for b in range(1, a))
    return down + (FloatingDot(j=j, p=0, a=1),) + tuple(Dot(1) for _ in range(ell)) + up


# ---------------------------------------------------------------------------
# Text syntax.


def parse_word(datum, text):
    """Parse ``idem(1,2,1); x(2); tau(1); fdot(3)`` into a DiagramWord.

    The first item fixes the bottom labels (user label strings); the rest are
    generators: ``x(a)`` a dot, ``tau(a)`` a crossing, ``fdot(a)`` a floating
    dot right of position ``a`` with the adjacent strand's label, and
    ``fdot(a, j)`` / ``fdot(a, j, p)`` for explicit subscript and superscript.
    """
    items = [part.strip() for part in text.split(";") if part.strip()]
    if not items:
        raise ValueError("empty word text")
    head, head_args = _parse_call(items[0])
    if head != "idem":
        raise ValueError("word text must start with idem(...)")
    bottom = tuple(datum.index(arg) for arg in head_args)
    gens = []
    for item in items[1:]:
        name, args = _parse_call(item)
        if name == "x":
            (a,) = args
            gens.append(Dot(int(a)))
        elif name == "tau":
            (a,) = args
            gens.append(Crossing(int(a)))
        elif name == "fdot":
            if len(args) == 1:
                gens.append(FloatingDot(j=None, p=0, a=int(args[0])))
            elif len(args) == 2:
                gens.append(FloatingDot(j=datum.index(args[1]), p=0, a=int(args[0])))
            elif len(args) == 3:
                gens.append(
                    FloatingDot(j=datum.index(args[1]), p=int(args[2]), a=int(args[0]))
                )
            else:
                raise ValueError("fdot takes 1 to 3 arguments")
        else:
            raise ValueError("unknown generator %r" % name)
    word = DiagramWord(bottom=bottom, gens=tuple(gens))
    validate_word(datum, word)
    return word


def _parse_call(text):
    text = text.strip()
    open_idx = text.find("(")
    if open_idx < 0 or not text.endswith(")"):
        raise ValueError("malformed item %r" % text)
    name = text[:open_idx].strip()
    inner = text[open_idx + 1 : -1].strip()
    args = tuple(a.strip() for a in inner.split(",")) if inner else ()
    return name, args


def format_word(datum, word):
    parts = ["idem(%s)" % ",".join(str(datum.labels[i]) for i in word.bottom)]
    seq = word.bottom
    for gen in word.gens:
        if isinstance(gen, Dot):
            parts.append("x(%d)" % gen.a)
        elif isinstance(gen, Crossing):
            parts.append("tau(%d)" % gen.a)
        else:
            if gen.j is None and gen.p == 0:
                parts.append("fdot(%d)" % gen.a)
            else:
                j = resolve_subscript(seq, gen)
                if gen.p == 0:
                    parts.append("fdot(%d,%s)" % (gen.a, datum.labels[j]))
                else:
                    parts.append(
                        "fdot(%d,%s,%d)" % (gen.a, datum.labels[j], gen.p)
                    )
        seq = _apply_gen_to_seq(seq, gen)
    return "; ".join(parts)
