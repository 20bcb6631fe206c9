"""Report assembly and rendering (table / CSV / JSON).

Every subcommand builds a plain dict whose key order is the documented
order; ``rows`` (when present) is the tabular part and fixes the CSV
columns.  Reports never contain timestamps, so a cached run renders byte for
byte like a cold one.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from . import dsl
from ._arith import valuation
from .errors import DomainError
from .families import FamilySpec
from .harness import evaluate_family, prufer_check
from .matrix_group import enumerate_group, gl2_order
from .sylow import conjugacy_witness, find_sylow, sylow_order, sylow_report
from .volvachev import classify_conjugacy, volvachev_finite

CSV_COLUMNS = {
    "families": ["p", "v2_p_minus_1", "v2_p_plus_1"],
    "sylow": [
        "p", "ell", "group_order", "sylow_order", "enumerated", "seed",
        "subgroup_order", "n_ell", "maximality_checked", "conjugacy_verified",
    ],
    "volvachev": [
        "p", "v1", "v1_witness_a", "v1_witness_b", "v2", "v3",
        "v3_witness_a", "v3_witness_b", "v3_witness_order", "v3_witness_norm",
    ],
    "evidence": ["p", "value", "error"],
    "conjugacy": [
        "p", "v2_p_minus_1", "v2_p_plus_1", "v2_p2_minus_1", "sylow2_order", "V1", "V2", "V3",
    ],
    "prufer": ["i", "j", "count", "expected"],
}

_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}
_STR = {"type": "string"}


def _nullable(t):
    return {"anyOf": [t, {"type": "null"}]}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(required if required is not None else props),
        "additionalProperties": False,
    }


SCHEMAS = {
    "families": _obj({
        "command": {"const": "families"},
        "family": _STR,
        "limit": _INT,
        "rows": {"type": "array", "items": _obj({"p": _INT, "v2_p_minus_1": _INT, "v2_p_plus_1": _INT})},
        "warnings": {"type": "array", "items": _STR},
    }),
    "sylow": _obj({
        "command": {"const": "sylow"},
        "p": _INT,
        "ell": _INT,
        "group_order": _INT,
        "sylow_order": _INT,
        "enumerated": _BOOL,
        "seed": _INT,
        "subgroup_order": _nullable(_INT),
        "n_ell": _nullable(_INT),
        "maximality_checked": _BOOL,
        "conjugacy_verified": _nullable(_BOOL),
        "seeds_checked": {"type": "array", "items": _INT},
    }),
    "volvachev": _obj({
        "command": {"const": "volvachev"},
        "p": _INT,
        "context": _STR,
        "v1": _BOOL,
        "v1_witness": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2},
        "v2": _BOOL,
        "v3": _nullable(_BOOL),
        "v3_witness": _nullable(_obj({"a": _INT, "b": _INT, "order": _INT, "norm": _INT})),
    }),
    "evidence": _obj({
        "command": {"const": "evidence"},
        "family": _STR,
        "statement": _STR,
        "property_id": _STR,
        "limit": _INT,
        "seed": _INT,
        "rows": {"type": "array", "items": _obj({
            "p": _INT, "value": _nullable(_BOOL), "error": _nullable(_STR)})},
        "holds": _INT,
        "fails": _INT,
        "errors": _INT,
        "verdict": {"enum": ["TRUE_COFINITE", "FALSE_COFINITE", "MIXED", "INCONCLUSIVE"]},
        "exceptions": {"type": "array", "items": _INT},
        "threshold_index": _INT,
    }),
    "conjugacy": _obj({
        "command": {"const": "conjugacy"},
        "family": _STR,
        "limit": _INT,
        "seed": _INT,
        "classification": _STR,
        "sylow_order": _nullable(_INT),
        "rows": {"type": "array", "items": _obj({
            "p": _INT, "v2_p_minus_1": _INT, "v2_p_plus_1": _INT, "v2_p2_minus_1": _INT,
            "sylow2_order": _INT, "V1": _nullable(_BOOL), "V2": _nullable(_BOOL), "V3": _nullable(_BOOL)})},
        "v3_limit": _nullable(_obj({
            "status": {"enum": ["HOLDS", "FAILS", "INCONCLUSIVE"]},
            "level": _nullable(_INT),
            "profile": {"type": "array", "items": {"type": "array", "items": _INT}},
        })),
        "note": _STR,
    }),
    "prufer": _obj({
        "command": {"const": "prufer"},
        "p": _INT,
        "levels": _INT,
        "rows": {"type": "array", "items": _obj({"i": _INT, "j": _INT, "count": _INT, "expected": _INT})},
        "counts_ok": _BOOL,
        "embeddings_ok": _BOOL,
    }),
}


# -- builders -----------------------------------------------------------------

def families_report(family: FamilySpec, limit: int) -> dict:
    warnings = []
    try:
        primes = family.members(limit)
    except DomainError as e:
        if not family.staircase:
            raise
        primes, warnings = [], [str(e)]
    if not primes and not warnings:
        warnings.append(f"no primes in family {family.label} up to {limit}")
    rows = [
        {"p": p, "v2_p_minus_1": valuation(p - 1, 2), "v2_p_plus_1": valuation(p + 1, 2)}
        for p in primes
    ]
    return {"command": "families", "family": family.label, "limit": limit, "rows": rows, "warnings": warnings}


def sylow_cmd_report(p: int, ell: int, enumerate: bool, seed: int, seeds: int = 5) -> dict:
    order = gl2_order(p)
    rep = {
        "command": "sylow",
        "p": p,
        "ell": ell,
        "group_order": order,
        "sylow_order": sylow_order(order, ell),
        "enumerated": enumerate,
        "seed": seed,
        "subgroup_order": None,
        "n_ell": None,
        "maximality_checked": False,
        "conjugacy_verified": None,
        "seeds_checked": [],
    }
    if enumerate:
        sr = sylow_report(p, ell, enumerate=True, seed=seed)
        G = enumerate_group(p)
        others = [find_sylow(ell, G, seed=s) for s in range(seed + 1, seed + seeds)]
        rep["subgroup_order"] = sr.subgroup.order
        rep["n_ell"] = sr.n_p
        rep["maximality_checked"] = sr.maximality_checked
        rep["conjugacy_verified"] = all(conjugacy_witness(sr.subgroup, Q, G) is not None for Q in others)
        rep["seeds_checked"] = list(range(seed, seed + seeds))
    return rep


def volvachev_report(p: int) -> dict:
    v = volvachev_finite(p)
    w = v.v3_witness
    return {
        "command": "volvachev",
        "p": p,
        "context": v.context,
        "v1": v.v1,
        "v1_witness": list(v.v1_witness),
        "v2": v.v2,
        "v3": v.v3,
        "v3_witness": None if w is None else {
            "a": w.element.a, "b": w.element.b, "order": w.order, "norm": w.norm},
    }


def evidence_report(family: FamilySpec, text: str, limit: int, seed: int, cache=None,
                    budget: Optional[dsl.Budget] = None) -> dict:
    stmt = dsl.parse(text)
    rep = evaluate_family(family, dsl.as_property(stmt, budget or dsl.Budget()), limit, cache=cache)
    errors = dict(rep.errors)
    verdict = rep.verdict
    return {
        "command": "evidence",
        "family": family.label,
        "statement": dsl.to_text(stmt),
        "property_id": rep.property_id,
        "limit": limit,
        "seed": seed,
        "rows": [{"p": p, "value": v, "error": errors.get(p)} for p, v in rep.per_index],
        "holds": rep.holds_count,
        "fails": rep.fails_count,
        "errors": len(rep.errors),
        "verdict": verdict.kind.value if verdict else "INCONCLUSIVE",
        "exceptions": list(verdict.exceptions) if verdict else [],
        "threshold_index": verdict.threshold_index if verdict else 0,
    }


def conjugacy_report(family: FamilySpec, limit: int, seed: int, cache=None) -> dict:
    c = classify_conjugacy(family, limit, cache=cache)
    lim = c.v3_limit
    return {
        "command": "conjugacy",
        "family": family.label,
        "limit": limit,
        "seed": seed,
        "classification": c.label,
        "sylow_order": c.sylow_order,
        "rows": [dict(r) for r in c.rows],
        "v3_limit": None if lim is None else {
            "status": lim.status.value,
            "level": lim.level,
            "profile": [list(x) for x in lim.profile],
        },
        "note": c.note,
    }


def prufer_report(p: int, levels: int) -> dict:
    r = prufer_check(p, levels)
    return {
        "command": "prufer",
        "p": p,
        "levels": levels,
        "rows": [{"i": i, "j": j, "count": c, "expected": e} for i, j, c, e in r.rows],
        "counts_ok": r.counts_ok,
        "embeddings_ok": r.embeddings_ok,
    }


# -- rendering ----------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_cell(x)}" for k, x in v.items()) + "}"
    return str(v)


def _flat_row(report: dict) -> dict:
    cmd = report["command"]
    if cmd == "volvachev":
        w = report["v3_witness"] or {}
        return {
            "p": report["p"], "v1": report["v1"],
            "v1_witness_a": report["v1_witness"][0], "v1_witness_b": report["v1_witness"][1],
            "v2": report["v2"], "v3": report["v3"],
            "v3_witness_a": w.get("a"), "v3_witness_b": w.get("b"),
            "v3_witness_order": w.get("order"), "v3_witness_norm": w.get("norm"),
        }
    return {k: report[k] for k in CSV_COLUMNS[cmd]}


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_csv(report: dict) -> str:
    cols = CSV_COLUMNS[report["command"]]
    rows = report["rows"] if "rows" in report else [_flat_row(report)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r[c] is None else _cell(r[c]) for c in cols])
    return buf.getvalue()


def render_table(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if k in ("rows", "command"):
            continue
        if k == "v3_limit" and v is not None:
            lines.append(f"v3_limit: {v['status']}" + (f" (level 2^{v['level']})" if v["level"] is not None else ""))
            continue
        lines.append(f"{k}: {_cell(v)}")
    rows = report.get("rows")
    if rows is not None:
        cols = CSV_COLUMNS[report["command"]]
        cells = [[_cell(r[c]) for c in cols] for r in rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
        lines.append("")
        lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)).rstrip())
        lines.append("  ".join("-" * w for w in widths))
        for row in cells:
            lines.append("  ".join(x.rjust(w) for x, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}
