"""Deterministic command-line front end for the diagram calculus.

Every command reads a JSON config file naming the Cartan datum, the scalar
choice, an optional parabolic structure, and engine limits, then emits a
single JSON report on stdout with the fields ``command``, ``inputs``, and
``results``.  Reports are byte-identical across repeated runs: iteration
orders are fixed, rational numbers are printed exactly as ``p/q`` strings,
and wall-clock timing goes to stderr only.

Exit codes: 0 on success, 1 when a verification command finds a violation,
2 on input errors (bad config, malformed words, exceeded resource limits).

Config shape::

    {
      "cartan": {"labels": ["1","2"], "matrix": [[2,-1],[-1,2]], "d": [1,1]},
      "scalars": {"t": [["1","1"],["1","1"]], "r": ["1","1"],
                   "s": [{"i":"1","j":"2","t":1,"v":1,"value":"1"}]},
      "parabolic": {"I_f": ["1"], "N": {"1": 2}},
      "engine": {"oracle_degree": 6, "truncation": 20,
                  "step_budget": 500000, "parallelism": 1}
    }

``scalars`` is optional (defaults to the all-ones choice), as are
``parabolic`` (defaults to an empty finite part) and ``engine``.  Series
are printed as sorted lists of ``{q, lam, h, coeff}`` records where ``lam``
maps label names to weight exponents; rational functions are printed as
strings like ``(1-l1^2)/(1-q^2)`` over the variables ``q``, ``l1``,
``l2``, ... (one per label, in label order) and ``h``.

Word syntax: ``idem(1,2,1); x(2); tau(1); fdot(3)`` with the bottom labels
first; ``x(a)`` is a dot on strand ``a``, ``tau(a)`` crosses strands ``a``
and ``a+1``, and ``fdot(a)``, ``fdot(a, j)``, ``fdot(a, j, p)`` place a
floating dot right of strand ``a`` with optional subscript label ``j`` and
superscript ``p``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import basisrewrite, cartan, dgstruct, diagram, polyrep, qside

__all__ = ["main", "run", "load_config", "CliError"]


class CliError(Exception):
    """An error with a process exit code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Rational and text helpers.


def _rat(value, where):
    if isinstance(value, bool):
        raise CliError(2, "%s: expected a rational, got a boolean" % where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise CliError(2, "%s: cannot parse rational %r" % (where, value))
    raise CliError(2, "%s: expected an integer or 'p/q' string" % where)


def _rat_str(fr):
    fr = Fraction(fr)
    if fr.denominator == 1:
        return str(fr.numerator)
    return "%d/%d" % (fr.numerator, fr.denominator)


def _label_index(datum, name, where):
    name = str(name)
    if name not in datum.labels:
        raise CliError(
            2, "%s: unknown label %r (have %s)" % (where, name, list(datum.labels))
        )
    return datum.labels.index(name)


def _parse_nu(datum, text):
    """Parse a weight like ``1:1,2:3`` into a tuple over the labels."""
    nu = [0] * datum.rank
    text = (text or "").strip()
    if not text or text == "0":
        return tuple(nu)
    for part in text.split(","):
        part = part.strip()
        if ":" not in part:
            raise CliError(2, "--nu: expected label:multiplicity, got %r" % part)
        name, mult = part.split(":", 1)
        idx = _label_index(datum, name.strip(), "--nu")
        try:
            m = int(mult)
        except ValueError:
            raise CliError(2, "--nu: bad multiplicity %r" % mult)
        if m < 0:
            raise CliError(2, "--nu: multiplicity must be nonnegative")
        nu[idx] += m
    return tuple(nu)


def _parse_seq(datum, text, flag):
    """Parse a sequence like ``1,2,1`` into a tuple of label indices."""
    text = (text or "").strip()
    if not text:
        return ()
    return tuple(
        _label_index(datum, part.strip(), flag) for part in text.split(",")
    )


def _seq_str(datum, seq):
    return ",".join(datum.labels[i] for i in seq)


def _nu_str(datum, nu):
    parts = [
        "%s:%d" % (datum.labels[i], nu[i]) for i in range(len(nu)) if nu[i]
    ]
    return ",".join(parts) if parts else "0"


def _weights_upto(datum, max_total, include_zero=True):
    out = []

    def rec(pos, left, cur):
        if pos == datum.rank:
            out.append(tuple(cur))
            return
        for m in range(left + 1):
            cur.append(m)
            rec(pos + 1, left - m, cur)
            cur.pop()

    for total in range(0 if include_zero else 1, max_total + 1):
        start = len(out)
        rec(0, total, [])
        out[start:] = sorted(t for t in out[start:] if sum(t) == total)
    return out


def _parse_word_checked(datum, text):
    """Parse a word, reporting the column of the failing item."""
    try:
        return diagram.parse_word(datum, text)
    except ValueError as exc:
        # Locate the first item whose inclusion makes the parse fail.
        items = text.split(";")
        offset = 0
        for k in range(len(items)):
            prefix = ";".join(items[: k + 1])
            try:
                diagram.parse_word(datum, prefix)
            except ValueError:
                col = offset + len(items[k]) - len(items[k].lstrip()) + 1
                raise CliError(
                    2, "word parse error at line 1, column %d: %s" % (col, exc)
                )
            offset += len(items[k]) + 1
        raise CliError(2, "word parse error: %s" % exc)


# ---------------------------------------------------------------------------
# Rendering.


def _var_names(datum, with_h=False):
    names = ["q"] + ["l%d" % (k + 1) for k in range(datum.rank)]
    if with_h:
        names.append("h")
    return names


def _poly_str(p, names):
    if not p:
        return "0"
    parts = []
    for exps, coeff in sorted(p.items()):
        factors = []
        for e, name in zip(exps, names):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append("%s^%d" % (name, e))
        mono = "*".join(factors)
        c = Fraction(coeff)
        mag = -c if c < 0 else c
        if not mono:
            body = _rat_str(mag)
        elif mag == 1:
            body = mono
        else:
            body = "%s*%s" % (_rat_str(mag), mono)
        sign = "-" if c < 0 else ("+" if parts else "")
        parts.append(sign + body)
    return "".join(parts)


def _is_one(p):
    return len(p) == 1 and all(
        not any(e) and c == 1 for e, c in p.items()
    )


def _rf_str(rf, names):
    num = _poly_str(rf.num, names)
    if _is_one(rf.den):
        return num
    return "(%s)/(%s)" % (num, _poly_str(rf.den, names))


def _lam_map(datum, exps):
    return {
        datum.labels[k]: exps[k] for k in range(datum.rank) if exps[k]
    }


def _series_records(datum, terms, h_last=False):
    """Render a Laurent term dict over (q, lam..., [h]) as sorted records."""
    records = []
    for exps, coeff in sorted(terms.items()):
        h = exps[-1] if h_last else 0
        lam = exps[1 : 1 + datum.rank]
        records.append(
            {
                "q": exps[0],
                "lam": _lam_map(datum, lam),
                "h": h,
                "coeff": _rat_str(coeff),
            }
        )
    return records


def _element_json(datum, elt):
    terms = []
    for key in sorted(elt.as_dict()):
        word = basisrewrite.element_word(elt.bottom, key)
        terms.append(
            {
                "word": diagram.format_word(datum, word),
                "coeff": _rat_str(elt.as_dict()[key]),
            }
        )
    return {
        "bottom": [datum.labels[i] for i in elt.bottom],
        "terms": terms,
    }


def _degree_json(datum, tri):
    return {"q": tri.q, "lam": _lam_map(datum, tri.lam), "h": tri.h}


# ---------------------------------------------------------------------------
# Config.


@dataclass(frozen=True)
class LoadedConfig:
    datum: object
    scalars: object
    parab: object
    oracle_degree: int
    truncation: int
    step_budget: object
    parallelism: int
    raw: dict


def load_config(path):
    """Load and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(2, "cannot read config %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise CliError(
            2,
            "config parse error at line %d, column %d: %s"
            % (exc.lineno, exc.colno, exc.msg),
        )
    if not isinstance(raw, dict) or "cartan" not in raw:
        raise CliError(2, "config must be an object with a 'cartan' section")

    cc = raw["cartan"]
    try:
        labels = tuple(str(x) for x in cc["labels"])
        matrix = tuple(tuple(int(v) for v in row) for row in cc["matrix"])
        dvec = tuple(int(v) for v in cc["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(2, "cartan section malformed: %s" % exc)
    datum = cartan.CartanDatum(labels=labels, matrix=matrix, d=dvec)
    try:
        cartan.validate_cartan(datum)
    except ValueError as exc:
        raise CliError(2, "invalid Cartan datum: %s" % exc)

    sc = raw.get("scalars")
    if sc is None:
        scalars = cartan.default_scalars(datum)
    else:
        base = cartan.default_scalars(datum)
        if "t" in sc:
            t = tuple(
                tuple(
                    _rat(v, "scalars.t[%d][%d]" % (i, j))
                    for j, v in enumerate(row)
                )
                for i, row in enumerate(sc["t"])
            )
        else:
            t = base.t
        if "r" in sc:
            r = tuple(
                _rat(v, "scalars.r[%d]" % i) for i, v in enumerate(sc["r"])
            )
        else:
            r = base.r
        if "s" in sc:
            entries = []
            for ent in sc["s"]:
                i = _label_index(datum, ent["i"], "scalars.s.i")
                j = _label_index(datum, ent["j"], "scalars.s.j")
                te, ve = int(ent["t"]), int(ent["v"])
                val = _rat(ent["value"], "scalars.s.value")
                if i > j:
                    i, j, te, ve = j, i, ve, te
                entries.append(((i, j, te, ve), val))
            s = tuple(sorted(entries))
        else:
            s = base.s
        scalars = cartan.ScalarChoice(t=t, r=r, s=s)
    try:
        cartan.validate_scalars(datum, scalars)
    except ValueError as exc:
        raise CliError(2, "invalid scalars: %s" % exc)

    pc = raw.get("parabolic") or {}
    finite = tuple(
        sorted(
            _label_index(datum, name, "parabolic.I_f")
            for name in pc.get("I_f", [])
        )
    )
    nmap = pc.get("N", {})
    nvec = [0] * datum.rank
    for name, value in nmap.items():
        idx = _label_index(datum, name, "parabolic.N")
        if idx not in finite:
            raise CliError(
                2, "parabolic.N names label %r outside I_f" % name
            )
        if int(value) < 0:
            raise CliError(2, "parabolic.N values must be nonnegative")
        nvec[idx] = int(value)
    parab = cartan.ParabolicDatum(finite=finite, n=tuple(nvec))

    eng = raw.get("engine") or {}
    env_par = os.environ.get("KLRDOTS_PARALLELISM")
    if env_par is not None:
        parallelism = int(env_par)
    elif "parallelism" in eng:
        parallelism = int(eng["parallelism"])
    else:
        parallelism = os.cpu_count() or 1
    return LoadedConfig(
        datum=datum,
        scalars=scalars,
        parab=parab,
        oracle_degree=int(eng.get("oracle_degree", 6)),
        truncation=int(eng.get("truncation", 20)),
        step_budget=eng.get("step_budget"),
        parallelism=parallelism,
        raw=raw,
    )


# ---------------------------------------------------------------------------
# Command handlers.  Each returns (results, ok).


def _cmd_validate(cfg, args):
    datum = cfg.datum
    results = {
        "ok": True,
        "labels": list(datum.labels),
        "rank": datum.rank,
        "d": list(datum.d),
        "finite_part": [datum.labels[i] for i in cfg.parab.finite],
        "weights": {
            datum.labels[i]: cfg.parab.n[i] for i in cfg.parab.finite
        },
    }
    return results, True


def _cmd_basis(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    iseq = _parse_seq(datum, args.i, "--i")
    jseq = _parse_seq(datum, args.j, "--j")
    bound = args.degree_bound if args.degree_bound is not None else 10
    elements = basisrewrite.enumerate_basis(datum, nu, iseq, jseq, bound)
    records = []
    for element in elements:
        word = basisrewrite.basis_word(element)
        tri = diagram.degree(datum, word)
        records.append(
            {
                "word": diagram.format_word(datum, word),
                "degree": _degree_json(datum, tri),
            }
        )
    records.sort(key=lambda r: (r["degree"]["q"], r["word"]))
    return {"count": len(records), "elements": records}, True


def _cmd_gdim(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    iseq = _parse_seq(datum, args.i, "--i")
    jseq = _parse_seq(datum, args.j, "--j")
    mode = "signed" if args.signed else "unsigned"
    truncation = args.truncate if args.truncate is not None else cfg.truncation
    series = basisrewrite.graded_dimension(
        datum, nu, iseq, jseq, mode=mode, truncation=truncation
    )
    names = _var_names(datum, with_h=(mode == "unsigned"))
    terms = qside.expand_series(series.rf, truncation)
    return {
        "kind": series.kind,
        "mode": mode,
        "rational": _rf_str(series.rf, names),
        "qbound": truncation,
        "series": _series_records(datum, terms, h_last=(mode == "unsigned")),
    }, True


def _cmd_normal_form(cfg, args):
    datum = cfg.datum
    word = _parse_word_checked(datum, args.word)
    elt = basisrewrite.normal_form(
        datum, cfg.scalars, word, step_budget=cfg.step_budget
    )
    return {"element": _element_json(datum, elt)}, True


def _cmd_multiply(cfg, args):
    datum = cfg.datum
    wa = _parse_word_checked(datum, args.a)
    wb = _parse_word_checked(datum, args.b)
    ea = basisrewrite.normal_form(
        datum, cfg.scalars, wa, step_budget=cfg.step_budget
    )
    eb = basisrewrite.normal_form(
        datum, cfg.scalars, wb, step_budget=cfg.step_budget
    )
    try:
        prod = basisrewrite.multiply(
            datum, cfg.scalars, ea, eb, step_budget=cfg.step_budget
        )
    except ValueError as exc:
        raise CliError(2, "cannot multiply: %s" % exc)
    return {"element": _element_json(datum, prod)}, True


def _vector_from_json(datum, bottom, text):
    if not text:
        return polyrep.sp_term(bottom)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            2,
            "--vector parse error at line %d, column %d: %s"
            % (exc.lineno, exc.colno, exc.msg),
        )
    vec = polyrep.sp_zero()
    for term in data.get("terms", []):
        xmono = []
        for entry in term.get("x", []):
            name, occ, exp = entry
            xmono.append(((_label_index(datum, name, "--vector"), int(occ)), int(exp)))
        ext = []
        for entry in term.get("w", []):
            name, occ = entry
            ext.append((_label_index(datum, name, "--vector"), int(occ)))
        coeff = _rat(term.get("coeff", 1), "--vector coeff")
        vec = polyrep.sp_add(
            vec,
            polyrep.sp_term(
                bottom, tuple(sorted(xmono)), tuple(sorted(ext)), coeff
            ),
        )
    return vec


def _cmd_act(cfg, args):
    datum = cfg.datum
    word = _parse_word_checked(datum, args.word)
    vec = _vector_from_json(datum, word.bottom, args.vector)
    out = polyrep.act_word(datum, cfg.scalars, word, vec)
    records = []
    for (seq, xm, ext) in sorted(out):
        coeff = out[(seq, xm, ext)]
        records.append(
            {
                "seq": [datum.labels[i] for i in seq],
                "x": [
                    [datum.labels[lab], occ, exp] for (lab, occ), exp in xm
                ],
                "w": [[datum.labels[lab], occ] for (lab, occ) in ext],
                "coeff": _rat_str(coeff),
            }
        )
    return {"terms": records}, True


def _cmd_verify_relations(cfg, args):
    datum = cfg.datum
    degree = (
        args.degree_bound
        if args.degree_bound is not None
        else cfg.oracle_degree
    )
    rep = polyrep.relation_report(
        datum, cfg.scalars, max_strands=args.strands, max_degree=degree
    )
    results = {
        "ok": rep["ok"],
        "relations_checked": rep["families"],
        "family_names": list(rep["family_names"]),
        "instances": rep["instances"],
        "applications": rep["applications"],
        "failures": [
            [family, _seq_str(datum, seq), descr]
            for family, seq, descr in rep["failures"]
        ],
    }
    return results, rep["ok"]


def _cmd_d(cfg, args):
    datum = cfg.datum
    word = _parse_word_checked(datum, args.word)
    elt = basisrewrite.normal_form(
        datum, cfg.scalars, word, step_budget=cfg.step_budget
    )
    out = dgstruct.differential(
        datum, cfg.scalars, cfg.parab, elt, step_budget=cfg.step_budget
    )
    return {"element": _element_json(datum, out)}, True


def _cmd_d_squared(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    bound = args.degree_bound if args.degree_bound is not None else 12
    rep = dgstruct.check_d_squared(
        datum,
        cfg.scalars,
        cfg.parab,
        nu,
        bound,
        random_count=args.random_count,
        seed=0,
    )
    results = {"ok": rep["ok"], "checked": rep["checked"]}
    if not rep["ok"] and rep.get("counterexample") is not None:
        results["counterexample"] = str(rep["counterexample"])
    return results, rep["ok"]


def _cmd_homology(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    iseq = _parse_seq(datum, args.i, "--i")
    jseq = _parse_seq(datum, args.j, "--j")
    qbound = args.truncate if args.truncate is not None else cfg.truncation
    window = dgstruct.observed_window(
        datum, cfg.parab, nu, iseq, jseq, qbound
    )
    dims = dgstruct.homology_dims(
        datum,
        cfg.scalars,
        cfg.parab,
        nu,
        iseq,
        jseq,
        window,
        cfg.step_budget,
    )
    free = [k for k in range(datum.rank) if k not in cfg.parab.finite]
    records = []
    for cd in sorted(dims, key=lambda c: (c.qprime, c.lam_r, c.h)):
        lam = {
            datum.labels[free[pos]]: cd.lam_r[pos]
            for pos in range(len(free))
            if cd.lam_r[pos]
        }
        records.append(
            {"q": cd.qprime, "lam": lam, "h": cd.h, "dim": dims[cd]}
        )
    return {"qbound": qbound, "dims": records}, True


def _cmd_cyclotomic_gdim(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    iseq = _parse_seq(datum, args.i, "--i")
    jseq = _parse_seq(datum, args.j, "--j")
    truncation = args.truncate if args.truncate is not None else cfg.truncation
    mode = "signed" if args.signed else "unsigned"
    series = dgstruct.cyclotomic_gdim(
        datum,
        cfg.scalars,
        cfg.parab,
        nu,
        iseq,
        jseq,
        truncation,
        mode=mode,
        step_budget=cfg.step_budget,
    )
    return {
        "kind": series.kind,
        "mode": mode,
        "qbound": series.qbound,
        "series": _series_records(datum, series.terms),
    }, True


def _cmd_shapovalov(cfg, args):
    datum = cfg.datum
    iseq = _parse_seq(datum, args.i, "--i")
    jseq = _parse_seq(datum, args.j, "--j")
    parab = None if args.universal else (cfg.parab if cfg.parab.finite else None)
    rf = qside.shapovalov(datum, iseq, jseq, parab)
    names = _var_names(datum)
    results = {
        "rational": _rf_str(rf, names),
        "specialized": parab is not None,
    }
    truncation = args.truncate if args.truncate is not None else cfg.truncation
    try:
        terms = qside.expand_series(rf, truncation)
    except (AssertionError, ValueError):
        terms = None
    if terms is not None:
        results["qbound"] = truncation
        results["series"] = _series_records(datum, terms)
    return results, True


def _cmd_gram(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    parab = None if args.universal else (cfg.parab if cfg.parab.finite else None)
    space = qside.gram_matrix(datum, nu, parab)
    names = _var_names(datum)
    return {
        "basis": [_seq_str(datum, seq) for seq in space.basis],
        "matrix": [[_rf_str(rf, names) for rf in row] for row in space.gram],
        "rank": qside.verma_weight_dim(datum, nu, parab),
    }, True


def _cmd_verma_dim(cfg, args):
    datum = cfg.datum
    nu = _parse_nu(datum, args.nu)
    parab = None if args.universal else (cfg.parab if cfg.parab.finite else None)
    return {"dim": qside.verma_weight_dim(datum, nu, parab)}, True


def _cmd_qint(cfg, args):
    datum = cfg.datum
    idx = _label_index(datum, args.i, "--i")
    terms = qside.quantum_integer(args.n, d=datum.d[idx], nvars=1)
    pairs = [[e[0], int(c)] for e, c in sorted(terms.items())]
    return {"terms": pairs}, True


def _cmd_verify_shapovalov(cfg, args):
    datum = cfg.datum
    qbound = args.truncate if args.truncate is not None else cfg.truncation
    pairs = 0
    mismatches = []
    weights = _weights_upto(datum, args.max_weight)
    for nu in weights:
        rep = dgstruct.shapovalov_comparison_report(datum, nu, qbound=qbound)
        pairs += rep["pairs"]
        for mm in rep["mismatches"]:
            mismatches.append({"nu": _nu_str(datum, nu), "detail": str(mm)})
    ok = not mismatches
    return {
        "ok": ok,
        "weights_checked": len(weights),
        "pairs": pairs,
        "mismatches": mismatches,
    }, ok


def _cmd_verify_ses(cfg, args):
    datum = cfg.datum
    cases = []
    ok = True
    for nubar in _weights_upto(datum, args.max_weight):
        for i in range(datum.rank):
            rep = dgstruct.ses_diagonal_report(datum, nubar, i)
            ok = ok and rep["ok"]
            cases.append(
                {
                    "kind": "diagonal",
                    "nubar": _nu_str(datum, nubar),
                    "i": datum.labels[i],
                    "ok": rep["ok"],
                }
            )
            for j in range(datum.rank):
                if j == i:
                    continue
                rep = dgstruct.ses_offdiagonal_report(datum, nubar, i, j)
                ok = ok and rep["ok"]
                cases.append(
                    {
                        "kind": "off-diagonal",
                        "nubar": _nu_str(datum, nubar),
                        "i": datum.labels[i],
                        "j": datum.labels[j],
                        "ok": rep["ok"],
                    }
                )
    if cfg.parab.finite:
        qbound = args.truncate if args.truncate is not None else cfg.truncation
        for nu in _weights_upto(datum, args.max_weight):
            for i in range(datum.rank):
                rep = dgstruct.commutator_defect_report(
                    datum,
                    cfg.scalars,
                    cfg.parab,
                    nu,
                    i,
                    qbound=qbound,
                    step_budget=cfg.step_budget,
                )
                ok = ok and rep["ok"]
                cases.append(
                    {
                        "kind": "defect",
                        "nu": _nu_str(datum, nu),
                        "i": datum.labels[i],
                        "ok": rep["ok"],
                    }
                )
    return {"ok": ok, "cases": cases}, ok


def _cmd_verify_formality(cfg, args):
    datum = cfg.datum
    qbound = (
        args.degree_bound if args.degree_bound is not None else 8
    )
    cases = []
    ok = True
    for nu in _weights_upto(datum, args.max_weight):
        rep = dgstruct.formality_report(
            datum,
            cfg.scalars,
            cfg.parab,
            nu,
            qbound,
            step_budget=cfg.step_budget,
        )
        ok = ok and rep["ok"]
        cases.append(
            {
                "nu": _nu_str(datum, nu),
                "fires": rep["fires"],
                "checked_slices": rep["checked_slices"],
                "ok": rep["ok"],
                "violations": len(rep["violations"]),
            }
        )
    return {"ok": ok, "cases": cases}, ok


_HANDLERS = {
    "validate": _cmd_validate,
    "basis": _cmd_basis,
    "gdim": _cmd_gdim,
    "normal-form": _cmd_normal_form,
    "multiply": _cmd_multiply,
    "act": _cmd_act,
    "verify-relations": _cmd_verify_relations,
    "d": _cmd_d,
    "d-squared": _cmd_d_squared,
    "homology": _cmd_homology,
    "cyclotomic-gdim": _cmd_cyclotomic_gdim,
    "shapovalov": _cmd_shapovalov,
    "gram": _cmd_gram,
    "verma-dim": _cmd_verma_dim,
    "qint": _cmd_qint,
    "verify-shapovalov": _cmd_verify_shapovalov,
    "verify-ses": _cmd_verify_ses,
    "verify-formality": _cmd_verify_formality,
}


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", required=True, help="path to the JSON config file"
    )
    common.add_argument(
        "--truncate",
        type=int,
        default=None,
        help="override the engine truncation / q-bound",
    )
    common.add_argument(
        "--degree-bound",
        dest="degree_bound",
        type=int,
        default=None,
        help="override the degree bound for enumeration or oracles",
    )

    parser = argparse.ArgumentParser(
        prog="klrdots",
        description="Exact diagram calculus with floating dots: "
        "basis enumeration, graded dimensions, differentials, homology, "
        "and quantum-side verification oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common])

    p = sub.add_parser("basis", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)

    p = sub.add_parser("gdim", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--signed", action="store_true")

    p = sub.add_parser("normal-form", parents=[common])
    p.add_argument("--word", required=True)

    p = sub.add_parser("multiply", parents=[common])
    p.add_argument("--a", required=True, help="upper word")
    p.add_argument("--b", required=True, help="lower word")

    p = sub.add_parser("act", parents=[common])
    p.add_argument("--word", required=True)
    p.add_argument("--vector", default=None, help="JSON vector; default 1")

    p = sub.add_parser("verify-relations", parents=[common])
    p.add_argument("--strands", type=int, default=3)

    p = sub.add_parser("d", parents=[common])
    p.add_argument("--word", required=True)

    p = sub.add_parser("d-squared", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--random-count", type=int, default=100)

    p = sub.add_parser("homology", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)

    p = sub.add_parser("cyclotomic-gdim", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--signed", action="store_true")

    p = sub.add_parser("shapovalov", parents=[common])
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--universal", action="store_true")

    p = sub.add_parser("gram", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--universal", action="store_true")

    p = sub.add_parser("verma-dim", parents=[common])
    p.add_argument("--nu", required=True)
    p.add_argument("--universal", action="store_true")

    p = sub.add_parser("qint", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", required=True)

    p = sub.add_parser("verify-shapovalov", parents=[common])
    p.add_argument("--max-weight", type=int, default=2)

    p = sub.add_parser("verify-ses", parents=[common])
    p.add_argument("--max-weight", type=int, default=1)

    p = sub.add_parser("verify-formality", parents=[common])
    p.add_argument("--max-weight", type=int, default=2)

    return parser


def _inputs_echo(cfg, args):
    skip = {"command", "config"}
    echo = {"labels": list(cfg.datum.labels)}
    if cfg.parab.finite:
        echo["finite_part"] = [
            cfg.datum.labels[i] for i in cfg.parab.finite
        ]
        echo["weights"] = {
            cfg.datum.labels[i]: cfg.parab.n[i] for i in cfg.parab.finite
        }
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        echo[key] = value
    return echo


def run(command, cfg, args):
    """Dispatch one command; returns (report dict, exit code)."""
    handler = _HANDLERS[command]
    try:
        results, ok = handler(cfg, args)
    except CliError:
        raise
    except RuntimeError as exc:
        # Resource guards surface as runtime errors naming the limit.
        raise CliError(2, str(exc))
    report = {
        "command": command,
        "inputs": _inputs_echo(cfg, args),
        "results": results,
    }
    return report, (0 if ok else 1)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_config(args.config)
        report, code = run(args.command, cfg, args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.code
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elapsed = time.perf_counter() - started
    print("elapsed_s %.3f" % elapsed, file=sys.stderr)
    return 0 if code == 0 else code


if __name__ == "__main__":
    raise SystemExit(main())
