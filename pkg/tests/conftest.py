import contextlib
import time

import pytest

_RESULTS: list[tuple[str, str, str]] = []


class _Criterion:
    def __init__(self, label):
        self.label = label
        self.detail = ""


@pytest.fixture
def criterion():
    """Context manager recording one acceptance line: PASS when the block finishes, FAIL otherwise."""

    @contextlib.contextmanager
    def record(label):
        c = _Criterion(label)
        t0 = time.perf_counter()
        try:
            yield c
        except pytest.skip.Exception as exc:
            _RESULTS.append(("SKIP", label, str(exc)))
            raise
        except BaseException as exc:
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            _RESULTS.append(("FAIL", label, f"{c.detail} {msg}".strip()))
            raise
        else:
            _RESULTS.append(("PASS", label, f"{c.detail} [{time.perf_counter() - t0:.1f}s]".strip()))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, detail in sorted(_RESULTS, key=lambda r: r[1]):
        terminalreporter.write_line(f"{status:4}  {label}  {detail}")
