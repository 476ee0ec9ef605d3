from functools import lru_cache

import pytest

from cfactions.schema import build_theorem01, build_theorem02, build_theorem03, toy_schema


@lru_cache(maxsize=None)
def thm01(k=1, d=1, depth=5):
    return build_theorem01(k, d, depth)


@lru_cache(maxsize=None)
def thm02(k=1, d=1, depth=5):
    return build_theorem02(k, d, depth)


@lru_cache(maxsize=None)
def thm03(d=1, depth=3, N=(20, 40, 80)):
    return build_theorem03(d, depth, N)


@pytest.fixture(scope="session")
def toy():
    return toy_schema()


@pytest.fixture(scope="session")
def s01():
    return thm01()


@pytest.fixture(scope="session")
def s02():
    return thm02()


@pytest.fixture(scope="session")
def s03():
    return thm03()


ACCEPTANCE = []  # (criterion, verdict, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {num}: {verdict}  {detail}")
