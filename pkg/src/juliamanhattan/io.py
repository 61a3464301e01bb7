"""Persistence: the JSONL orbit database and CSV/JSON reports.

Reals are written with 17 significant digits, so every double survives a
round trip exactly. Complex numbers are ``[re, im]`` pairs, and infinities
are the strings ``"inf"``/``"-inf"``.
"""
import json
import math
from dataclasses import asdict

import numpy as np

from .errors import DatabaseFormatError
from .maps import HyperbolicityEvidence
from .orbits import (FORMAT_VERSION, ExcludedOrbit, Marking, OrbitDatabase,
                     PeriodBlock)


def fmt_real(x):
    """17-significant-digit text for a real number."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt_real(obj)
        return s if math.isfinite(float(obj)) else json.dumps(s)
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + _encode(obj.real) + ", " + _encode(obj.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(str(k)) + ": " + _encode(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj):
    """Compact JSON with full-precision reals."""
    return _encode(obj)


def _real(v):
    # accepts numbers and the "inf"/"nan" strings
    return float(v)


def _complex(v):
    return complex(_real(v[0]), _real(v[1]))


def _evidence_to_dict(ev):
    out = asdict(ev)
    if out["attracting_cycle_period"] == math.inf:
        out["attracting_cycle_period"] = "inf"
    return out


def _evidence_from_dict(obj):
    period = obj["attracting_cycle_period"]
    if period == "inf":
        period = math.inf
    return HyperbolicityEvidence(
        attracting_cycle_period=period,
        critical_orbit_iterations_used=int(obj["critical_orbit_iterations_used"]),
        min_expansion_rate=_real(obj["min_expansion_rate"]),
        verdict=obj["verdict"],
        critical_behaviour=obj["critical_behaviour"],
        expansion_margin=_real(obj["expansion_margin"]),
    )


def header_record(db):
    return {
        "record": "header",
        "format_version": db.format_version,
        "d": db.d,
        "c1": db.c1,
        "c2": db.c2,
        "path1": list(db.path1),
        "path2": list(db.path2),
        "max_period": db.max_period,
        "newton_tol": db.newton_tol,
        "point_merge_tol": db.point_merge_tol,
        "evidence1": _evidence_to_dict(db.evidence1),
        "evidence2": _evidence_to_dict(db.evidence2),
        "counts": [len(db.block(p)) for p in range(1, db.max_period + 1)],
        "excluded": [{"marking": [e.marking.period, e.marking.seed_index],
                      "lambda1": e.lambda1, "lambda2": e.lambda2} for e in db.excluded],
    }


def orbit_record(o):
    return {
        "primitive_period": o.primitive_period,
        "marking": [o.marking.period, o.marking.seed_index],
        "z1": o.z1,
        "z2": o.z2,
        "lambda1": o.lambda1,
        "lambda2": o.lambda2,
        "residual1": o.residual1,
        "residual2": o.residual2,
    }


def save_database(db, path):
    """Write the header line and one line per primitive orbit."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(header_record(db)) + "\n")
        for o in db.orbits():
            fh.write(dumps(orbit_record(o)) + "\n")


def load_database(path):
    """Read a database written by :func:`save_database`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise DatabaseFormatError(f"{path}: empty file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatabaseFormatError(f"{path}: header is not JSON ({exc})") from None
    if head.get("record") != "header":
        raise DatabaseFormatError(f"{path}: first record is not a header")
    if head.get("format_version") != FORMAT_VERSION:
        raise DatabaseFormatError(f"{path}: unsupported format_version "
                                  f"{head.get('format_version')!r}")
    max_period = int(head["max_period"])
    rows = {p: [] for p in range(1, max_period + 1)}
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            r = json.loads(ln)
            p = int(r["primitive_period"])
            rows[p].append((int(r["marking"][1]), _complex(r["z1"]), _complex(r["z2"]),
                            _real(r["lambda1"]), _real(r["lambda2"]),
                            _real(r["residual1"]), _real(r["residual2"])))
        except (json.JSONDecodeError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise DatabaseFormatError(f"{path}:{lineno}: malformed orbit record ({exc})") from None
    blocks = {}
    for p, recs in rows.items():
        if not recs:
            blocks[p] = PeriodBlock.empty(p)
            continue
        cols = list(zip(*recs))
        blocks[p] = PeriodBlock(p, np.array(cols[0], dtype=np.int64),
                                np.array(cols[1], dtype=np.complex128),
                                np.array(cols[2], dtype=np.complex128),
                                *(np.array(c, dtype=np.float64) for c in cols[3:]))
    excluded = [ExcludedOrbit(Marking(int(e["marking"][0]), int(e["marking"][1])),
                              _real(e["lambda1"]), _real(e["lambda2"]))
                for e in head.get("excluded", [])]
    return OrbitDatabase(
        d=int(head["d"]), c1=_complex(head["c1"]), c2=_complex(head["c2"]),
        path1=[_complex(z) for z in head["path1"]],
        path2=[_complex(z) for z in head["path2"]],
        max_period=max_period, blocks=blocks,
        newton_tol=_real(head["newton_tol"]),
        point_merge_tol=_real(head["point_merge_tol"]),
        evidence1=_evidence_from_dict(head["evidence1"]),
        evidence2=_evidence_from_dict(head["evidence2"]),
        excluded=excluded, format_version=int(head["format_version"]))


# ---------------------------------------------------------------- reports

def write_csv(path, header, rows):
    """CSV with reals at 17 significant digits; booleans as true/false."""
    def cell(v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return fmt_real(v)
    text = ",".join(header) + "\n" + "".join(",".join(cell(v) for v in r) + "\n" for r in rows)
    if path is None:
        return text
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def write_curve_csv(path, samples):
    return write_csv(path, ("a", "b", "slope", "pressure_residual"),
                     [(s.a, s.b, s.slope, s.pressure_residual) for s in samples])


def write_count_csv(path, records):
    return write_csv(path, ("T", "N_T", "li", "ratio", "certified"),
                     [(r.T, r.N_T, r.li_value, r.ratio, r.certified) for r in records])


def write_bins_csv(path, bins):
    return write_csv(path, ("T", "epsilon", "count"), [(b.T, b.epsilon, b.count) for b in bins])


def write_json(path, obj):
    text = dumps(obj) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
