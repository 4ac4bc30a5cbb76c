import math

import numpy as np
import pytest

from crelay.channel_models import LogDistanceParams
from crelay.config import PRESETS, campaign_config
from crelay.constraints import ConstraintConfig, check_cc
from crelay.errors import DomainError, IncompleteConfigError
from crelay.estimation import SnrSampleSet, fit_fading
from crelay.fading import NormalParams, SnrDist, sample_snr
from crelay.scenario import (
    CampaignConfig,
    Geometry,
    draw_node,
    generate_snapshot,
    monte_carlo_probability,
    run_campaign,
)

INDOOR = LogDistanceParams(pl_d0=44.19, d0=1.0, n=3.46)
DESIGN = ConstraintConfig(i_th=-90.0, eps_i_out=0.1, c_th=7.5, eps_c_out=0.1, noise_power=-119.5)


def campaign(**overrides) -> CampaignConfig:
    settings = dict(
        geometry=Geometry(cr_pos=(0.0, 0.0), pr_positions=[(10.0, 0.0)], id_positions=[(0.0, 10.0)]),
        path_loss=INDOOR,
        constraints=DESIGN,
        p_tx=10.0,
        noise_power=-100.0,
        samples_per_snapshot=1000,
        seed=3,
        oracle_samples=10_000,
    )
    settings.update(overrides)
    return CampaignConfig(**settings)


def test_snapshot_mean_snr_from_budget():
    snapshot = generate_snapshot(campaign(), 0, 0)
    expected = 10 ** ((10.0 - 78.79 + 100.0) / 10.0)
    assert snapshot.gamma_bars["pr"] == pytest.approx(expected, rel=1e-9)
    assert snapshot.drawn_exponents == {"pr": 3.46, "id": 3.46}
    assert len(snapshot.pr_samples) == len(snapshot.id_samples) == 1000


def test_snapshots_are_reproducible():
    cfg = campaign(shadowing=NormalParams(3.58, 1.0))
    a, b = generate_snapshot(cfg, 0, 0), generate_snapshot(cfg, 0, 0)
    assert np.array_equal(a.pr_samples.samples, b.pr_samples.samples)
    assert np.array_equal(a.id_samples.samples, b.id_samples.samples)
    assert a.drawn_exponents == b.drawn_exponents
    other = generate_snapshot(campaign(shadowing=NormalParams(3.58, 1.0), seed=4), 0, 0)
    assert not np.array_equal(a.pr_samples.samples, other.pr_samples.samples)


def test_pr_draws_are_shared_across_its_pairings():
    geometry = Geometry(cr_pos=(0.0, 0.0), pr_positions=[(10.0, 0.0)], id_positions=[(0.0, 10.0)] * 4)
    cfg = campaign(geometry=geometry, shadowing=NormalParams(3.58, 1.0))
    a, b = generate_snapshot(cfg, 0, 0), generate_snapshot(cfg, 0, 3)
    assert a.drawn_exponents["pr"] == b.drawn_exponents["pr"]
    assert np.array_equal(a.pr_samples.samples, b.pr_samples.samples)
    assert a.drawn_exponents["id"] != b.drawn_exponents["id"]


@pytest.mark.slow
def test_rayleigh_snapshot_mean():
    cfg = campaign(small_scale_kind="rayleigh", samples_per_snapshot=1_000_000)
    draw = draw_node(cfg, "id", 0)
    assert draw.samples.samples.mean() == pytest.approx(draw.gamma_bar, rel=0.01)


def test_invalid_indices_and_geometry():
    with pytest.raises(DomainError):
        generate_snapshot(campaign(), 1, 0)
    with pytest.raises(DomainError):
        draw_node(campaign(), "cr", 0)
    with pytest.raises(DomainError, match="coincides"):
        Geometry(cr_pos=(1.0, 1.0), pr_positions=[(1.0, 1.0)], id_positions=[(0.0, 3.0)])
    with pytest.raises(DomainError):
        Geometry(cr_pos=(0.0, 0.0), pr_positions=[(1.0, 1.0)], id_positions=[(0.0, 3.0)], wavelength=0.0)


@pytest.mark.parametrize("kwargs", [{"samples_per_snapshot": 1}, {"oracle_samples": 999}, {"workers": 0}])
def test_campaign_validation(kwargs):
    with pytest.raises(DomainError):
        campaign(**kwargs)


@pytest.mark.slow
def test_monte_carlo_rayleigh():
    estimate = monte_carlo_probability(SnrDist.rayleigh(2.0), 2.0, "lower", 1_000_000, 1)
    assert estimate.probability == pytest.approx(1.0 - math.exp(-1.0), abs=0.002)
    assert estimate.stderr == pytest.approx(4.8e-4, rel=0.05)


def test_monte_carlo_tails():
    d = SnrDist.nakagami(1.2, 50.0)
    assert monte_carlo_probability(d, 0.0, "lower", 10_000, 2).probability == 0.0
    lower = monte_carlo_probability(d, 40.0, "lower", 10_000, 2).probability
    upper = monte_carlo_probability(d, 40.0, "upper", 10_000, 2).probability
    assert round(lower * 10_000) + round(upper * 10_000) == 10_000
    with pytest.raises(DomainError):
        monte_carlo_probability(d, 40.0, "lower", 100, 2)
    with pytest.raises(DomainError):
        monte_carlo_probability(d, 40.0, "both", 10_000, 2)


def paper_shape(**overrides) -> CampaignConfig:
    flat = dict(PRESETS["paper-shape"])
    flat["oracle_samples"] = 10_000
    flat.update(overrides)
    return campaign_config(flat)


def test_paper_shape_campaign():
    result = run_campaign(paper_shape())
    assert result.snapshot_count == 20
    assert result.matrix.shape == (4, 5)
    assert result.matrix.id_ids == ("ID1", "ID2", "ID3", "ID4", "ID5")
    assert result.errors == {}
    pr_report, id_report = result.snapshot_fits(1, 2)
    assert pr_report.node_id == "PR2" and id_report.node_id == "ID3"
    for outcome in result.outcomes:
        assert 0.0 <= outcome.probability <= 1.0
        assert outcome.oracle.n == 10_000


def test_campaign_independent_of_workers():
    serial = run_campaign(paper_shape(workers=1))
    parallel = run_campaign(paper_shape(workers=4))
    assert serial.matrix == parallel.matrix
    assert [o.oracle for o in serial.outcomes] == [o.oracle for o in parallel.outcomes]


def test_unreachable_devices_are_disabled():
    far = [(1e5, 0.0), (0.0, 1e5), (-1e5, 0.0)]
    result = run_campaign(paper_shape(**{"geometry.id_positions": far}))
    assert result.matrix.cc_bits == (False, False, False)
    assert not any(any(row) for row in result.matrix.grid)


def test_campaign_needs_noise_power():
    flat = dict(PRESETS["paper-shape"])
    del flat["constraints.noise_power"]
    with pytest.raises(IncompleteConfigError):
        run_campaign(campaign_config(flat))


@pytest.mark.slow
def test_unshadowed_campaign_matches_oracle():
    result = run_campaign(paper_shape(**{"large_scale.sigma_n": 0.0, "oracle_samples": 1_000_000}))
    for outcome in result.outcomes:
        assert outcome.exponent == 3.46
        assert outcome.oracle_gap < 3e-3


def test_fitted_decision_agrees_with_truth():
    cfg = ConstraintConfig(c_th=7.5, eps_c_out=0.1)
    # F_C is about 0.27 and 0.02 for these means, far from the outage allowance
    for gamma_bar in (500.0, 5000.0):
        truth = SnrDist.nakagami(1.2, gamma_bar)
        expected = check_cc(truth, cfg)
        agree = 0
        for seed in range(100):
            s = SnrSampleSet("ID1", sample_snr(truth, 1000, seed))
            agree += check_cc(fit_fading(s).nakagami.dist, cfg) == expected
        assert agree >= 95


def test_farther_device_has_lower_fitted_snr():
    near_far = Geometry(cr_pos=(0.0, 0.0), pr_positions=[(10.0, 0.0)], id_positions=[(5.0, 0.0), (10.0, 0.0)])
    fitted = {0: [], 1: []}
    for seed in range(50):
        cfg = campaign(geometry=near_far, seed=seed, samples_per_snapshot=200)
        for index in (0, 1):
            fitted[index].append(fit_fading(draw_node(cfg, "id", index).samples).nakagami.dist.gamma_bar)
    assert np.median(fitted[0]) > np.median(fitted[1])
