import pytest

from core.exceptions import ConfigError
from utils.validators import InputValidator as V


def test_numbers():
    assert V.validate_number(3, "x") == 3.0
    with pytest.raises(ConfigError):
        V.validate_number(True, "x")
    with pytest.raises(ConfigError):
        V.validate_number("1", "x")
    with pytest.raises(ConfigError):
        V.validate_number(float("inf"), "x")
    with pytest.raises(ConfigError, match="must be > 0"):
        V.validate_positive(0, "x")
    with pytest.raises(ConfigError):
        V.validate_positive_int(2.0, "n")


def test_window():
    assert V.validate_window([0, 1], "w") == (0.0, 1.0)
    with pytest.raises(ConfigError):
        V.validate_window([1, 0], "w")
    with pytest.raises(ConfigError):
        V.validate_window([1], "w")


def test_grid_forms():
    assert V.parse_grid("0.01, 1,100", "rho") == [0.01, 1.0, 100.0]
    assert V.parse_grid("lin:0:1:5", "e") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert V.parse_grid("log:1:1000:4", "k") == pytest.approx([1.0, 10.0, 100.0, 1000.0])
    symlog = V.parse_grid("symlog:1e-3:10:25", "e")
    assert len(symlog) == 50
    assert symlog == sorted(symlog)
    assert symlog[0] == pytest.approx(-10.0)
    assert symlog[24] == pytest.approx(-1e-3)
    assert 0.0 not in symlog


@pytest.mark.parametrize("text", ["", "a,b", "log:0:1:3", "cube:1:2:3", "lin:0:1", "lin:0:1:0", "1,nan"])
def test_grid_errors(text):
    with pytest.raises(ConfigError):
        V.parse_grid(text, "grid")


def test_positive_grid():
    with pytest.raises(ConfigError, match="rho"):
        V.parse_grid("1,0", "rho", positive=True)


def test_sanitize_filename():
    assert V.sanitize_filename("sd run/1:x") == "sd_run_1_x"
