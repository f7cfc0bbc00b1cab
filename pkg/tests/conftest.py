"""Shared strategies and calculus fixtures."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from ncdiffop import library as L
from ncdiffop.scalar import I, Scalar

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

VARS = ("q", "r", "mu_p")

small_fracs = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@st.composite
def gaussians(draw) -> Scalar:
    re_, im = draw(small_fracs), draw(st.sampled_from([Fraction(0), Fraction(0), draw(small_fracs)]))
    return Scalar.gaussian(re_, im)


@st.composite
def polys(draw, names=VARS, max_terms: int = 3, max_deg: int = 3) -> Scalar:
    out = Scalar(0)
    for _ in range(draw(st.integers(0, max_terms))):
        t = draw(gaussians())
        for x in names:
            t = t * Scalar.var(x) ** draw(st.integers(0, max_deg))
        out = out + t
    return out


@st.composite
def scalars(draw, names=VARS) -> Scalar:
    """Rational functions p/q with a nonzero denominator."""
    num = draw(polys(names))
    den = draw(polys(names, max_terms=2, max_deg=2).filter(lambda s: not s.is_zero()))
    return num / den


@pytest.fixture(scope="session")
def plane():
    return L.classical_plane()


@pytest.fixture(scope="session")
def cplane():
    return L.classical_complex_plane()


@pytest.fixture(scope="session")
def su2q():
    return L.su2q_3d()


@pytest.fixture(scope="session")
def podles():
    return L.podles_sphere()


@pytest.fixture(scope="session")
def podles0():
    return L.podles_base()


__all__ = ["gaussians", "polys", "scalars", "I"]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split("(")[0])):
            terminalreporter.write_line(line)
