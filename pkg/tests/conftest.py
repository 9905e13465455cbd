import pytest

from src.field.field_core import make_field


@pytest.fixture
def f3():
    return make_field(3)


@pytest.fixture
def f5():
    return make_field(5)


@pytest.fixture
def f7():
    return make_field(7)


@pytest.fixture
def f9():
    return make_field(3, 2)
