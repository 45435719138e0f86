from datetime import date

import numpy as np
import pytest

from leadlag.timeseries import TimeSeries

START = date(2021, 10, 1)


def ts(values, start=START, **kwargs) -> TimeSeries:
    return TimeSeries(start, np.asarray(values, dtype=float), **kwargs)


@pytest.fixture
def make_ts():
    return ts
