import pytest

from cartanlab.generators import eqrel_monoid, rook_monoid
from cartanlab.semigroup_core import (
    PartialBijection,
    identity_map,
    partial_identity,
    singleton,
    zero_map,
)


@pytest.fixture(scope="session")
def i2():
    return rook_monoid(2)


@pytest.fixture(scope="session")
def i3():
    return rook_monoid(3)


@pytest.fixture(scope="session")
def twoblock():
    return eqrel_monoid([(0, 1), (2,)])


@pytest.fixture(scope="session")
def named2():
    """The seven elements of the rook monoid on two atoms, by name."""
    return {
        "zero": zero_map(2),
        "e0": partial_identity(2, 0b01),
        "e1": partial_identity(2, 0b10),
        "t01": singleton(2, 0, 1),
        "t10": singleton(2, 1, 0),
        "one": identity_map(2),
        "swap": PartialBijection(2, 0b11, (1, 0)),
    }
