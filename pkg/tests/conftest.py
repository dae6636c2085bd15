from fractions import Fraction

import pytest

from wildmap import ExpansionConfig, FullBranchMap, ProportionSchedule


@pytest.fixture(scope="session")
def default_map() -> FullBranchMap:
    """c = 3/2, p_n = 1 - 2^-(n+1): the figure configuration, strict."""
    config = ExpansionConfig(
        c=Fraction(3, 2),
        schedule=ProportionSchedule.geometric_to_one(Fraction(1, 2)),
        strict=True,
    )
    return FullBranchMap(config)


@pytest.fixture(scope="session")
def boundary_map() -> FullBranchMap:
    """c = 2: expansion floor exactly 1, the degenerating regime."""
    config = ExpansionConfig(
        c=Fraction(2),
        schedule=ProportionSchedule.geometric_to_one(Fraction(1, 2)),
    )
    return FullBranchMap(config)


@pytest.fixture(scope="session")
def constant_map() -> FullBranchMap:
    """Constant proportions 4/5; never certifies the infinite product."""
    config = ExpansionConfig(
        c=Fraction(3, 2),
        schedule=ProportionSchedule.constant(Fraction(4, 5)),
    )
    return FullBranchMap(config)
