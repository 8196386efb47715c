"""Collects per-criterion verdicts from the acceptance suite and prints them."""

from collections import OrderedDict

import pytest

_VERDICTS: "OrderedDict[int, list]" = OrderedDict()


@pytest.fixture
def verdict():
    """``verdict(criterion, ok, detail)`` records one check; all checks of a criterion must pass."""

    def record(criterion: int, ok: bool, detail: str) -> bool:
        _VERDICTS.setdefault(criterion, []).append((bool(ok), detail))
        print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_VERDICTS):
        checks = _VERDICTS[criterion]
        ok = all(c for c, _ in checks)
        detail = "; ".join(d if c or len(checks) == 1 else f"{d} [FAIL]" for c, d in checks)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion:>2}: {detail}")
