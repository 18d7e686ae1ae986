import pytest

from bidopt.generate import GenParams, scale_suite
from bidopt.model import BidLevelData, Business, Campaign, Instance


def make_t1() -> Instance:
    """One business, one campaign, two bid levels plus the slack.

    Hand-solvable: the LP relaxation is max 50x + 120y subject to
    50x + 160y <= 100 and x + y <= 1, optimum 900/11 at x = 6/11,
    y = 5/11.
    """
    levels = (
        BidLevelData(0, 0.0, 0.0, 0.0),
        BidLevelData(1, 50.0, 0.5, 100.0, bid=0.40),
        BidLevelData(2, 120.0, 0.8, 200.0, bid=0.70),
    )
    return Instance(
        businesses=(Business("k1", 100.0, 2.0, ("c1",)),),
        campaigns=(Campaign("c1", "k1", 0.4, levels),),
        impression_budget=1000.0,
    )


def make_rollback_instance() -> Instance:
    """Strategy 2 rounding makes the LP infeasible here.

    The LP optimum needs a 5e-7 sliver of campaign cb's level to keep
    the click row balanced while ca runs at level 1.  The sliver is
    below zero_tol, so strategy 2 rounds both sets; the rounded LP then
    violates the click row and the fixes must be withdrawn.
    """
    lev_a = (BidLevelData(0, 0.0, 0.0, 0.0), BidLevelData(1, 100.0, 0.1, 100.0))
    lev_b = (BidLevelData(0, 0.0, 0.0, 0.0), BidLevelData(1, 1.0, 1.0, 1e7))
    return Instance(
        businesses=(Business("k1", 15.0, 1.2, ("ca", "cb")),),
        campaigns=(
            Campaign("ca", "k1", 0.075, lev_a),
            Campaign("cb", "k1", 1.0, lev_b),
        ),
        impression_budget=1e9,
    )


def make_nonadjacent_instance() -> Instance:
    """LP optimum mixes levels 1 and 3 (return curve dips at level 2).

    Returns (0, 12, 13, 30) against spends (0, 10, 20, 30): level 2
    sits below the concave envelope, so with budget 20 the unique LP
    optimum splits half-half between levels 1 and 3 (objective 21).
    The best SOS2 point is all of level 2, objective 13.
    """
    levels = (
        BidLevelData(0, 0.0, 0.0, 0.0),
        BidLevelData(1, 12.0, 0.1, 100.0),
        BidLevelData(2, 13.0, 0.2, 100.0),
        BidLevelData(3, 30.0, 0.3, 100.0),
    )
    return Instance(
        businesses=(Business("k1", 20.0, 1.0, ("c1",)),),
        campaigns=(Campaign("c1", "k1", 0.5, levels),),
        impression_budget=1e6,
    )


def build_suite():
    """Small-instance sweep shared by the acceptance tests: totals of
    2..8 campaigns split over 1..3 businesses, 2..5 bid levels,
    tightness in {0.3, 0.7, 1.5}."""
    out = []
    n = 0
    for bus in (1, 2, 3):
        for total in range(2, 9):
            for levels in range(2, 6):
                for tight in (0.3, 0.7, 1.5):
                    base = GenParams(
                        businesses=min(bus, total),
                        campaigns_per_business=1,
                        levels_per_campaign=levels,
                        budget_tightness=tight,
                        impression_tightness=1.2,
                        seed=1000 + n,
                    )
                    out.append(scale_suite(base, [total])[0])
                    n += 1
    return out


@pytest.fixture
def t1_instance():
    return make_t1()


@pytest.fixture
def t1_model(t1_instance):
    from bidopt.model import build_model

    return build_model(t1_instance)


@pytest.fixture
def rollback_instance():
    return make_rollback_instance()


@pytest.fixture
def nonadjacent_instance():
    return make_nonadjacent_instance()


@pytest.fixture(scope="session")
def suite1():
    return build_suite()
