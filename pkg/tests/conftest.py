import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one part of an acceptance criterion: ``acceptance(k, ok, detail)``."""
    store = request.config.stash.setdefault(_RESULTS, {})

    def record(criterion: int, ok: bool, detail: str) -> None:
        store.setdefault(criterion, []).append((ok, detail))

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(store):
        parts = store[k]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict} | " + "; ".join(d for _, d in parts))
