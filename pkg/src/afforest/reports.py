"""Table, JSON and CSV rendering of results.

Numbers are written in the shortest form that reads back to the same double,
with integral values printed without a fractional part ("1", not "1.0").
"""

from __future__ import annotations

import csv
import io
import json
import math

from .forests import COUNT_SATURATION, is_saturated
from .measures import AFReport
from .sensitivity import SensitivityReport


def number(x) -> int | float | None:
    """JSON-ready value: ints for integral floats, ``None`` for NaN."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


def fmt(x) -> str:
    v = number(x)
    if v is None:
        return ""
    return repr(v)


def _count(count: int):
    return (COUNT_SATURATION, True) if is_saturated(count) else (count, False)


def af_report_to_dict(report: AFReport) -> dict:
    count, saturated = _count(report.forest_count)
    se = report.std_error
    nodes = [
        {"node": lab, "af": number(report.af[i]), "std_error": None if se is None else number(se[i])}
        for i, lab in enumerate(report.labels)
    ]
    out = {
        "method": report.method,
        "nodes": nodes,
        "productivity": number(report.productivity),
        "forest_count": count,
        "forest_count_saturated": saturated,
    }
    if report.method != "exact":
        ci = report.confidence_intervals()
        for row, (lo, hi) in zip(nodes, ci):
            row["ci"] = [number(lo), number(hi)]
        out.update(samples=report.samples, seed=report.seed, alpha=number(report.alpha),
                   plan={k: number(v) if isinstance(v, float) else v for k, v in report.plan.items()})
    return out


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def af_report_to_csv(report: AFReport) -> str:
    se = report.std_error
    rows = [[lab, fmt(report.af[i]), "" if se is None else fmt(se[i])] for i, lab in enumerate(report.labels)]
    return _rows_to_csv(["node", "af", "std_error"], rows)


def render_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def af_report_to_table(report: AFReport) -> str:
    se = report.std_error
    if se is None:
        body = render_table(["node", "af"], [[lab, fmt(report.af[i])] for i, lab in enumerate(report.labels)])
    else:
        body = render_table(["node", "af", "std_error"],
                            [[lab, fmt(report.af[i]), fmt(se[i])] for i, lab in enumerate(report.labels)])
    count, saturated = _count(report.forest_count)
    tail = [f"productivity: {fmt(report.productivity)}",
            f"forests: {'>= ' if saturated else ''}{count}",
            f"method: {report.method}"]
    if report.method != "exact":
        tail.append(f"samples: {report.samples}  seed: {report.seed}  alpha: {fmt(report.alpha)}")
    return body + "\n".join(tail) + "\n"


def sensitivity_to_dict(rep: SensitivityReport) -> dict:
    return {
        "edit": {"kind": rep.edit.kind, "arc": list(rep.edit_labels)},
        "method": rep.before.method,
        "nodes": [
            {"node": e.label, "tag": e.tag, "required_class": e.required_class, "predicted": e.predicted,
             "af_before": number(rep.before.af[k]), "af_after": number(rep.after.af[k]),
             "delta": number(e.delta),
             "consistent": "not_applicable" if e.consistent is None else e.consistent}
            for k, e in enumerate(rep.nodes)
        ],
        "productivity_before": number(rep.before.productivity),
        "productivity_after": number(rep.after.productivity),
    }


def _consistency(c) -> str:
    return "n/a" if c is None else ("yes" if c else "NO")


def _sensitivity_rows(rep: SensitivityReport):
    return [[e.label, e.tag, e.predicted, fmt(rep.before.af[k]), fmt(rep.after.af[k]), fmt(e.delta),
             _consistency(e.consistent)] for k, e in enumerate(rep.nodes)]


_SENS_HEADER = ["node", "tag", "predicted", "af_before", "af_after", "delta", "consistent"]


def sensitivity_to_table(rep: SensitivityReport) -> str:
    i, j = rep.edit_labels
    head = f"{rep.edit.kind} arc ({i}, {j})\n"
    return head + render_table(_SENS_HEADER, _sensitivity_rows(rep))


def sensitivity_to_csv(rep: SensitivityReport) -> str:
    return _rows_to_csv(_SENS_HEADER, _sensitivity_rows(rep))


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
