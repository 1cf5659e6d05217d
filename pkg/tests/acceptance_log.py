"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES: dict[int, str] = {}


def report(criterion: int, checks: list[tuple[str, bool]]) -> bool:
    ok = all(passed for _, passed in checks)
    detail = "; ".join(f"{'ok' if passed else 'FAILED'}: {text}" for text, passed in checks)
    LINES[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(LINES[criterion])
    return ok
