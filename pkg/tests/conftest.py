import pytest

from ontoplot import build_snapshot


@pytest.fixture
def toy_a():
    """Balanced two-level tree, one association between leaf cousins."""
    return build_snapshot(
        classes=list("ABCDEFG"),
        properties=["p"],
        edges=[("B", "A"), ("C", "A"), ("D", "B"), ("E", "B"), ("F", "C"), ("G", "C")],
        associations=[("D", "p", "F")],
    )


@pytest.fixture
def toy_b():
    """Root with two interesting leaves and one barren three-node path."""
    return build_snapshot(
        classes=["R", "M1", "M2", "M3", "X", "Y"],
        properties=["p"],
        edges=[("M1", "R"), ("M2", "M1"), ("M3", "M2"), ("X", "R"), ("Y", "R")],
        associations=[("X", "p", "Y")],
    )


@pytest.fixture
def toy_c():
    """Two branches with associations across them; L1 and Z1 tie at count 2."""
    return build_snapshot(
        classes=["T", "P", "Q", "L1", "L2", "L3", "L4", "Z1", "Z2"],
        properties=["r"],
        edges=[
            ("P", "T"),
            ("Q", "T"),
            ("L1", "P"),
            ("L2", "P"),
            ("L3", "P"),
            ("L4", "P"),
            ("Z1", "Q"),
            ("Z2", "Q"),
        ],
        associations=[("L1", "r", "Z1"), ("L4", "r", "Z1"), ("L1", "r", "Z2")],
    )
