import pytest

# criterion label -> list of (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


def record(criterion: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.setdefault(criterion, []).append((bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_RESULTS):
        parts = ACCEPTANCE_RESULTS[crit]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {crit}  {detail}")
