"""Collects one PASS/FAIL line per acceptance criterion for the end-of-run summary."""

LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line
