import math

import pytest

from irs_circuit.units import UnitError, parse_quantity


@pytest.mark.parametrize(
    "text, kind, expected",
    [
        ("2.3nH", "inductance", 2.3e-9),
        ("2.3 NH", "inductance", 2.3e-9),
        ("1.6pF", "capacitance", 1.6e-12),
        ("2.4GHz", "frequency", 2.4e9),
        ("2.4ghz", "frequency", 2.4e9),
        ("900MHz", "frequency", 9e8),
        ("4", "resistance", 4.0),
        ("377ohm", "resistance", 377.0),
        ("-80deg", "angle", math.radians(-80)),
        ("1.2rad", "angle", 1.2),
        ("1e-12", "capacitance", 1e-12),
        (".5", "dimensionless", 0.5),
    ],
)
def test_parse(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text, kind", [("2.3nF", "inductance"), ("abc", "capacitance"), ("1.0x", "dimensionless")])
def test_reject(text, kind):
    with pytest.raises(UnitError):
        parse_quantity(text, kind)
