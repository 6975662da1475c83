import pytest

from regret_manager.location_game import make_example, make_location_game


@pytest.fixture(scope="session")
def example1():
    return make_example("example1")


@pytest.fixture(scope="session")
def example2():
    return make_example("example2")


@pytest.fixture(scope="session")
def example3():
    return make_example("example3")


@pytest.fixture
def two_by_two_game():
    """Two players, two locations, both free to pick either."""
    return make_location_game(2, [[1, 2], [1, 2]], [[1], [2]], [10.0, 10.0])


@pytest.fixture
def forced_game():
    """Singleton action sets: the manager has no freedom at all."""
    return make_location_game(2, [[1], [2]], [[1], [2]], [10.0, 10.0])


def make_game(allowed, known, caps=None, num_locations=None):
    m = num_locations or max(max(a) for a in allowed + known)
    caps = caps or [10.0] * len(allowed)
    return make_location_game(m, allowed, known, caps)
