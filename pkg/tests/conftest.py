import pytest

from photonsub import ExperimentConfig


@pytest.fixture
def ideal():
    def make(lam=0.4, scheme="single", T=0.9):
        return ExperimentConfig.create(lam, T=T, scheme=scheme)

    return make


@pytest.fixture
def practical():
    def make(lam=0.4, scheme="single", T=0.9):
        return ExperimentConfig.practical(lam, T=T, scheme=scheme)

    return make


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record a measured outcome for the acceptance summary.

    Returns:
        ``record(n, ok, detail)``, which prints the line immediately and
        keeps it for the end-of-run summary.
    """

    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        print(line)
        request.config.stash[_ACCEPTANCE].append((n, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    entries = config.stash.get(_ACCEPTANCE, [])
    if not entries:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted({e[0] for e in entries}):
        rows = [e for e in entries if e[0] == n]
        ok = all(e[1] for e in rows)
        detail = "; ".join(e[2] for e in rows)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
