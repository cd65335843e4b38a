import numpy as np
import pandas as pd
import pytest

from src.analysis.rates import fit_rate, fit_rates


def test_linear_error_has_unit_slope():
    eps = [0.1, 0.05, 0.025]
    fit = fit_rate(eps, eps, "lineal")
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.points == 3


def test_needs_three_positive_points():
    assert fit_rate([0.1, 0.05], [1.0, 0.5]) is None
    assert fit_rate([0.1, 0.05, 0.025], [1.0, 0.0, 0.5]) is None
    assert fit_rate([0.1, 0.05, 0.025], [1.0, np.nan, 0.5]) is None


def test_fit_rates_table():
    df = pd.DataFrame({"eps": [0.1, 0.05, 0.025], "E": [0.01, 0.0025, 0.000625], "B": [1.0, -1.0, 1.0]})
    table = fit_rates(df)
    assert list(table.columns) == ["metrica", "pendiente", "error_std", "puntos"]
    assert list(table["metrica"]) == ["E", "B"]
    assert table.loc[0, "pendiente"] == pytest.approx(2.0, abs=1e-12)
    assert np.isnan(table.loc[1, "pendiente"])
