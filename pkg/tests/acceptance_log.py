"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

LINES = []


def record(name: str, ok: bool, detail: str = "") -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    LINES.append(line)
    print(line)
    return ok
