import pytest

from h8verify import cache


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    """One scratch cache for the whole session; nothing lands in the repo."""
    root = tmp_path_factory.mktemp("h8cache")
    cache.set_cache_dir(root)
    yield root
    cache.set_cache_dir(None)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
