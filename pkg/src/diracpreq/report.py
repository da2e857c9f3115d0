"""Report rendering: text for people, JSON for machines."""

import json


def _entry_dict(e, timing):
    out = {
        "id": e.id,
        "op": e.op,
        "verdict": e.verdict,
        "expected": e.expected,
        "outcome": e.outcome,
        "witness": e.witness,
    }
    if timing:
        out["seconds"] = round(e.seconds, 4)
    return out


def summary_line(r):
    return f"{r.passed}/{r.total} checks passed"


def to_json(r, timing=False):
    counts = {"passed": r.passed, "failed": 0, "no_certificate": 0, "total": r.total}
    for e in r.entries:
        if e.verdict == "fail":
            counts["failed"] += 1
        elif e.verdict == "no-certificate":
            counts["no_certificate"] += 1
    doc = {
        "manifest": r.name,
        "seed": r.seed,
        "checks": [_entry_dict(e, timing) for e in r.entries],
        "summary": counts,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _pretty(v, indent):
    pad = " " * indent
    if isinstance(v, dict):
        if not v:
            return [pad + "{}"]
        lines = []
        for k, x in v.items():
            if isinstance(x, (dict, list)) and x:
                lines.append(f"{pad}{k}:")
                lines.extend(_pretty(x, indent + 2))
            else:
                lines.append(f"{pad}{k}: {_scalar(x)}")
        return lines
    if isinstance(v, list):
        lines = []
        for x in v:
            if isinstance(x, (dict, list)) and x:
                lines.append(f"{pad}-")
                lines.extend(_pretty(x, indent + 2))
            else:
                lines.append(f"{pad}- {_scalar(x)}")
        return lines
    return [pad + _scalar(v)]


def _scalar(x):
    if isinstance(x, (dict, list)):
        return "[]" if isinstance(x, list) else "{}"
    if isinstance(x, bool):
        return "true" if x else "false"
    return "null" if x is None else str(x)


def to_text(r, timing=False):
    tags = {"pass": "PASS", "fail": "FAIL", "no-certificate": "NOCERT"}
    lines = [f"manifest {r.name or '(unnamed)'}  seed {r.seed}"]
    for e in r.entries:
        head = f"{tags.get(e.verdict, e.verdict.upper()):6} {e.id}  [{e.op}]"
        if timing:
            head += f"  {e.seconds:.3f}s"
        lines.append(head)
        if e.verdict != "pass" or e.outcome != "pass":
            lines.append(f"         outcome: {_scalar(e.outcome)}   expected: {_scalar(e.expected)}")
        if e.witness:
            lines.extend(_pretty(e.witness, 9))
    lines.append(summary_line(r))
    return "\n".join(lines) + "\n"


def emit_report(r, fmt="text", timing=False):
    if fmt == "json":
        return to_json(r, timing)
    if fmt == "text":
        return to_text(r, timing)
    raise ValueError(f"unknown format {fmt!r}")
