"""Shared session-scoped fixtures: the poset corpus and its certificates."""

from __future__ import annotations

import pytest

from cdposet import zoo
from cdposet.partition import search_s_certificate


@pytest.fixture(scope="session")
def q_poset():
    return zoo.gen("q-polytope")


@pytest.fixture(scope="session")
def q_cert():
    return zoo.fixture_certificate("q-polytope")


@pytest.fixture(scope="session")
def torus6():
    return zoo.gen("torus-fig6")


@pytest.fixture(scope="session")
def torus6_cert():
    return zoo.fixture_certificate("torus-fig6")


@pytest.fixture(scope="session")
def torus12():
    return zoo.gen("torus-fig12")


@pytest.fixture(scope="session")
def torus12_cert():
    return zoo.fixture_certificate("torus-fig12")


@pytest.fixture(scope="session")
def polygon3_cert():
    return search_s_certificate(zoo.gen("polygon", (3,)))
