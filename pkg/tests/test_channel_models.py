import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crelay.channel_models import (
    ChannelConfig,
    ItuRParams,
    LogDistanceParams,
    WinnerParams,
    db_to_linear,
    itu_r_pl,
    linear_to_db,
    log_distance_pl,
    mean_snr_from_budget,
    winner2_pl,
)
from crelay.errors import DomainError

INDOOR = LogDistanceParams(pl_d0=44.19, d0=1.0, n=3.46)


def test_log_distance_reference_and_decade():
    assert log_distance_pl(INDOOR, 1.0) == pytest.approx(44.19, abs=1e-12)
    assert log_distance_pl(INDOOR, 10.0) == pytest.approx(78.79, abs=1e-9)


@given(st.floats(0.01, 1e4))
def test_log_distance_gains_ten_n_per_decade(d):
    gain = log_distance_pl(INDOOR, 10.0 * d) - log_distance_pl(INDOOR, d)
    assert gain == pytest.approx(10.0 * INDOOR.n, abs=1e-9)


def test_itu_r_hand_value():
    assert itu_r_pl(ItuRParams(f_mhz=2400.0, n=3.0), 10.0) == pytest.approx(69.60422, abs=1e-4)
    assert itu_r_pl(ItuRParams(f_mhz=2400.0, n=3.0), 1.0) == pytest.approx(39.604, abs=1e-3)


def test_winner_hand_value():
    assert winner2_pl(WinnerParams(f_ghz=2.4, l_w=5.0, n_w=2.0), 10.0) == pytest.approx(84.22482, abs=1e-4)
    assert winner2_pl(WinnerParams(f_ghz=2.4, l_w=5.0, n_w=2.1), 10.0) == pytest.approx(84.73, abs=0.01)
    assert winner2_pl(WinnerParams(f_ghz=2.4, l_w=15.0, n_w=2.1), 10.0) == pytest.approx(105.73, abs=0.01)


@pytest.mark.parametrize(
    "model",
    [
        lambda d: log_distance_pl(INDOOR, d),
        lambda d: itu_r_pl(ItuRParams(f_mhz=2400.0, n=3.0), d),
        lambda d: winner2_pl(WinnerParams(f_ghz=2.4, l_w=5.0, n_w=2.1), d),
    ],
    ids=["log_distance", "itu_r", "winner2"],
)
@given(st.floats(0.01, 1e3), st.floats(1.0001, 100.0))
def test_path_loss_grows_with_distance(model, d, factor):
    assert model(d * factor) > model(d)


@given(st.floats(0.0, 10.0), st.sampled_from([5.0, 15.0, 7.5]), st.floats(0.5, 100.0))
def test_each_wall_adds_its_loss(n_w, l_w, d):
    one_more = winner2_pl(WinnerParams(l_w=l_w, n_w=n_w + 1.0), d)
    assert one_more - winner2_pl(WinnerParams(l_w=l_w, n_w=n_w), d) == pytest.approx(l_w, abs=1e-9)


@pytest.mark.parametrize(
    "predict",
    [
        lambda d: log_distance_pl(INDOOR, d),
        lambda d: itu_r_pl(ItuRParams(), d),
        lambda d: winner2_pl(WinnerParams(), d),
    ],
)
@pytest.mark.parametrize("d", [0.0, -3.0])
def test_non_positive_distance(predict, d):
    with pytest.raises(DomainError):
        predict(d)


@pytest.mark.parametrize(
    "build",
    [
        lambda: LogDistanceParams(pl_d0=40.0, n=0.0),
        lambda: LogDistanceParams(pl_d0=40.0, d0=0.0),
        lambda: ItuRParams(f_mhz=0.0),
        lambda: ItuRParams(l_floors=-1.0),
        lambda: WinnerParams(l_w=-5.0),
        lambda: WinnerParams(n_w=-1.0),
        lambda: ChannelConfig(n_w=-2.0),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(DomainError):
        build()


def test_mean_snr_from_budget():
    assert mean_snr_from_budget(10.0, 44.19, -100.0) == pytest.approx(10**6.581, rel=1e-12)
    with pytest.raises(DomainError):
        mean_snr_from_budget(10.0, math.inf, -100.0)


@given(st.floats(-150.0, 150.0))
def test_db_linear_inverse(x_db):
    assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, abs=1e-9)


def test_linear_to_db_rejects_zero():
    with pytest.raises(DomainError):
        linear_to_db(0.0)
