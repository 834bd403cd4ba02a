import pytest

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def record_criterion():
    """Store a one-line verdict for the acceptance summary."""

    def _record(key: str, passed: bool, text: str) -> None:
        _ACCEPTANCE[key] = f"{'PASS' if passed else 'FAIL'}  criterion {key}: {text}"

    return _record


def _order(key: str):
    digits = "".join(ch for ch in key if ch.isdigit())
    return int(digits), key


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=_order):
        terminalreporter.write_line(_ACCEPTANCE[key])
