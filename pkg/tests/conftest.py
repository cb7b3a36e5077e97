import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_table():
    from threerank.rank3 import rank_table_interval

    return rank_table_interval(-20000, 20000)
