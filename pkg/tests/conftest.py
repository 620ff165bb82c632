import pytest

from doctrines import fixtures
from doctrines.completions import build_erp, build_qp, build_tp
from doctrines.structure import discover_elementary, discover_existential


@pytest.fixture(scope="session")
def triv():
    return fixtures.triv()


@pytest.fixture(scope="session")
def chain():
    return fixtures.chain_fixture()


@pytest.fixture(scope="session")
def fs2():
    return fixtures.fs2()


@pytest.fixture(scope="session")
def nochoice():
    return fixtures.nochoice()


@pytest.fixture(scope="session")
def witnesses(triv, chain, fs2, nochoice):
    out = {}
    for name, P in (("triv", triv), ("chain", chain), ("fs2", fs2),
                    ("nochoice", nochoice)):
        out[name] = (P, discover_elementary(P), discover_existential(P))
    return out


@pytest.fixture(scope="session")
def completions(witnesses):
    out = {}
    for name in ("triv", "chain", "fs2"):
        P, E, X = witnesses[name]
        tp = build_tp(P, E, X)
        er = build_erp(P, E, tp)
        q = build_qp(P, E, X)
        out[name] = (P, E, X, tp, er, q)
    return out
