import pytest

from src.config.settings import get_env_variable, get_int_variable


def test_int_variable(monkeypatch):
    monkeypatch.setenv("SIL_TEST_THREADS", "4")
    assert get_int_variable("SIL_TEST_THREADS", 1) == 4
    monkeypatch.delenv("SIL_TEST_THREADS")
    assert get_int_variable("SIL_TEST_THREADS", 2) == 2


@pytest.mark.parametrize("raw", ["cuatro", "0"])
def test_int_variable_rejects(monkeypatch, raw):
    monkeypatch.setenv("SIL_TEST_THREADS", raw)
    with pytest.raises(ValueError):
        get_int_variable("SIL_TEST_THREADS", 1)


def test_required_variable(monkeypatch):
    monkeypatch.delenv("SIL_TEST_MISSING", raising=False)
    with pytest.raises(ValueError):
        get_env_variable("SIL_TEST_MISSING")
    assert get_env_variable("SIL_TEST_MISSING", required=False, default="x") == "x"
