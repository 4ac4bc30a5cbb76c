"""Synthetic deployments and the Monte Carlo oracle.

A campaign places a relay (CR), primary receivers (PRs) and indoor devices
(IDs) in the plane. Each node position gets a shadowed path-loss exponent
and a mean SNR from the link budget; small movements around the position are
represented by drawing SNR samples from the small-scale law directly.

Random streams are addressed by (seed, role, node index) through
:func:`crelay.seeding.stream_rng`, so a node draws the same samples in every
snapshot it takes part in and results do not depend on scheduling.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel_models import LogDistanceParams, log_distance_pl, mean_snr_from_budget
from .constraints import (
    ConstraintConfig,
    DecisionMatrix,
    capacity_snr_threshold,
    interference_snr_threshold,
    node_probabilities,
)
from .errors import CrelayError, DomainError, require
from .estimation import FadingReport, SnrSampleSet, fit_fading
from .fading import FadingKind, NormalParams, SnrDist, sample_snr
from .seeding import stream_rng

__all__ = (
    "Geometry",
    "CampaignConfig",
    "NodeDraw",
    "Snapshot",
    "McEstimate",
    "NodeOutcome",
    "CampaignResult",
    "ROLES",
    "node_id",
    "draw_node",
    "generate_snapshot",
    "monte_carlo_probability",
    "run_campaign",
)

logger = logging.getLogger(__name__)

ROLES = ("pr", "id")
MIN_ORACLE_SAMPLES = 10_000
# shadowing draws of the exponent are floored here to keep path loss increasing
_MIN_EXPONENT = 1e-3

Point = tuple[float, float]


@dataclass(frozen=True)
class Geometry:
    """Node positions in meters. The wavelength documents the 10-lambda snapshot
    region and lambda/2 sample spacing; it enters no computation.
    """

    cr_pos: Point
    pr_positions: tuple[Point, ...]
    id_positions: tuple[Point, ...]
    wavelength: float = 0.125

    def __post_init__(self):
        object.__setattr__(self, "cr_pos", _point(self.cr_pos))
        object.__setattr__(self, "pr_positions", tuple(_point(p) for p in self.pr_positions))
        object.__setattr__(self, "id_positions", tuple(_point(p) for p in self.id_positions))
        require(self.wavelength > 0, f"wavelength must be positive, got {self.wavelength}")
        require(len(self.pr_positions) > 0 and len(self.id_positions) > 0, "need at least one PR and one ID")
        for role in ROLES:
            for index in range(self.count(role)):
                require(self.distance(role, index) > 0, f"{node_id(role, index)} coincides with the relay")

    def positions(self, role: str) -> tuple[Point, ...]:
        require(role in ROLES, f"unknown node role {role!r}")
        return self.pr_positions if role == "pr" else self.id_positions

    def count(self, role: str) -> int:
        return len(self.positions(role))

    def distance(self, role: str, index: int) -> float:
        x, y = self.positions(role)[index]
        return math.hypot(x - self.cr_pos[0], y - self.cr_pos[1])


def _point(p: Sequence[float]) -> Point:
    require(len(p) == 2, f"position must be (x, y), got {p!r}")
    return float(p[0]), float(p[1])


def node_id(role: str, index: int) -> str:
    return f"{role.upper()}{index + 1}"


@dataclass(frozen=True)
class CampaignConfig:
    """Everything needed to run a campaign.

    The exponent of each link is Normal(shadowing.mu, shadowing.sigma); with
    ``shadowing`` None it is fixed at ``path_loss.n``.
    """

    geometry: Geometry
    path_loss: LogDistanceParams
    constraints: ConstraintConfig
    shadowing: NormalParams | None = None
    small_scale_kind: FadingKind = FadingKind.NAKAGAMI
    small_scale_m: float = 1.2
    p_tx: float = 10.0
    noise_power: float = -100.0
    samples_per_snapshot: int = 1000
    seed: int = 0
    oracle_samples: int = 100_000
    model: str = "nakagami"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "small_scale_kind", FadingKind.parse(self.small_scale_kind))
        require(
            self.samples_per_snapshot >= 2,
            f"samples_per_snapshot must be at least 2, got {self.samples_per_snapshot}",
        )
        require(
            self.oracle_samples >= MIN_ORACLE_SAMPLES,
            f"oracle_samples must be at least {MIN_ORACLE_SAMPLES}, got {self.oracle_samples}",
        )
        require(self.workers >= 1, f"workers must be at least 1, got {self.workers}")
        require(self.model in ("rayleigh", "nakagami", "best"), f"unknown decision model {self.model!r}")
        # validates the small-scale shape once, up front
        SnrDist(self.small_scale_kind, 1.0, self.small_scale_m)

    @property
    def mean_exponent(self) -> float:
        return self.shadowing.mu if self.shadowing is not None else self.path_loss.n

    def true_dist(self, gamma_bar: float) -> SnrDist:
        return SnrDist(self.small_scale_kind, gamma_bar, self.small_scale_m)


@dataclass(frozen=True)
class NodeDraw:
    node_id: str
    exponent: float
    gamma_bar: float
    samples: SnrSampleSet


@dataclass(frozen=True)
class Snapshot:
    """One PR and one ID drawn for a single (pr_index, id_index) pairing

    Draws are made per node, not per pair: a node's drawn exponent and
    samples are the same in every snapshot it takes part in.
    """

    pr_index: int
    id_index: int
    pr_samples: SnrSampleSet
    id_samples: SnrSampleSet
    drawn_exponents: dict[str, float] = field(default_factory=dict)
    gamma_bars: dict[str, float] = field(default_factory=dict)


def draw_node(cfg: CampaignConfig, role: str, index: int) -> NodeDraw:
    """Shadowed exponent, mean SNR and small-scale samples for one node position"""
    require(
        role in ROLES and 0 <= index < cfg.geometry.count(role),
        f"no {role} node with index {index}",
    )
    rng = stream_rng(cfg.seed, role, index)
    if cfg.shadowing is not None:
        exponent = max(float(rng.normal(cfg.shadowing.mu, cfg.shadowing.sigma)), _MIN_EXPONENT)
    else:
        exponent = cfg.path_loss.n
    params = LogDistanceParams(pl_d0=cfg.path_loss.pl_d0, d0=cfg.path_loss.d0, n=exponent)
    pl = log_distance_pl(params, cfg.geometry.distance(role, index))
    gamma_bar = mean_snr_from_budget(cfg.p_tx, pl, cfg.noise_power)
    samples = sample_snr(cfg.true_dist(gamma_bar), cfg.samples_per_snapshot, rng)
    ident = node_id(role, index)
    return NodeDraw(ident, exponent, gamma_bar, SnrSampleSet(ident, samples))


def generate_snapshot(cfg: CampaignConfig, pr_index: int, id_index: int) -> Snapshot:
    """Pair the draws of PR ``pr_index`` and ID ``id_index``, each shared with the node's other pairings"""
    pr = draw_node(cfg, "pr", pr_index)
    id_ = draw_node(cfg, "id", id_index)
    return Snapshot(
        pr_index=pr_index,
        id_index=id_index,
        pr_samples=pr.samples,
        id_samples=id_.samples,
        drawn_exponents={"pr": pr.exponent, "id": id_.exponent},
        gamma_bars={"pr": pr.gamma_bar, "id": id_.gamma_bar},
    )


@dataclass(frozen=True)
class McEstimate:
    probability: float
    stderr: float
    n: int


def monte_carlo_probability(
    d: SnrDist,
    threshold: float,
    tail: str = "lower",
    n: int = 1_000_000,
    seed: "int | np.random.Generator" = 0,
) -> McEstimate:
    """Fraction of draws with gamma <= threshold (``lower``) or > threshold (``upper``)"""
    require(tail in ("lower", "upper"), f"tail must be 'lower' or 'upper', got {tail!r}")
    require(n >= MIN_ORACLE_SAMPLES, f"need at least {MIN_ORACLE_SAMPLES} draws, got {n}")
    below = int(np.count_nonzero(sample_snr(d, n, seed) <= threshold))
    hits = below if tail == "lower" else n - below
    p = hits / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


@dataclass(frozen=True)
class NodeOutcome:
    """Fits, constraint probability and oracle check for one node.

    On a failed fit, ``report`` is None and ``error`` holds the message.
    """

    role: str
    index: int
    node_id: str
    gamma_bar: float
    exponent: float
    report: FadingReport | None = None
    probability: float = math.nan
    passed: bool = False
    oracle: McEstimate | None = None
    empirical: float = math.nan
    error: str | None = None

    @property
    def oracle_gap(self) -> float:
        return math.nan if self.oracle is None else abs(self.probability - self.oracle.probability)


@dataclass(frozen=True)
class CampaignResult:
    config: CampaignConfig
    outcomes: tuple[NodeOutcome, ...]
    matrix: DecisionMatrix

    def nodes(self, role: str) -> tuple[NodeOutcome, ...]:
        return tuple(o for o in self.outcomes if o.role == role)

    @property
    def snapshot_count(self) -> int:
        return len(self.nodes("pr")) * len(self.nodes("id"))

    def snapshot_fits(self, pr_index: int, id_index: int) -> tuple[FadingReport | None, FadingReport | None]:
        return self.nodes("pr")[pr_index].report, self.nodes("id")[id_index].report

    @property
    def errors(self) -> dict[str, str]:
        return {o.node_id: o.error for o in self.outcomes if o.error is not None}


def _constraint_threshold(role: str, cfg: ConstraintConfig) -> float:
    if role == "pr":
        return interference_snr_threshold(cfg.i_th, cfg.require_noise_power())
    return capacity_snr_threshold(cfg.c_th)


def _node_passes(role: str, probability: float, cfg: ConstraintConfig) -> bool:
    if role == "pr":
        return 1.0 - probability <= cfg.eps_i_out
    return probability <= cfg.eps_c_out


def _process_node(cfg: CampaignConfig, role: str, index: int) -> NodeOutcome:
    ident = node_id(role, index)
    try:
        draw = draw_node(cfg, role, index)
    except DomainError as e:
        logger.warning("%s: no usable samples: %s", ident, e)
        return NodeOutcome(role, index, ident, math.nan, math.nan, error=str(e))
    try:
        report = fit_fading(draw.samples)
    except CrelayError as e:
        logger.warning("%s: fit failed, node disabled: %s", ident, e)
        return NodeOutcome(role, index, ident, draw.gamma_bar, draw.exponent, error=str(e))

    dist = report.select(cfg.model).dist
    probability = node_probabilities(dist, cfg.constraints, role)
    threshold = _constraint_threshold(role, cfg.constraints)
    oracle = monte_carlo_probability(
        dist, threshold, "lower", cfg.oracle_samples, stream_rng(cfg.seed, "oracle", role, index)
    )
    empirical = float(np.mean(draw.samples.samples <= threshold))
    return NodeOutcome(
        role=role,
        index=index,
        node_id=ident,
        gamma_bar=draw.gamma_bar,
        exponent=draw.exponent,
        report=report,
        probability=probability,
        passed=_node_passes(role, probability, cfg.constraints),
        oracle=oracle,
        empirical=empirical,
    )


def run_campaign(cfg: CampaignConfig) -> CampaignResult:
    """Fit every node, decide every PR x ID snapshot and check each closed form by simulation"""
    cfg.constraints.require_noise_power()
    units = [(role, index) for role in ROLES for index in range(cfg.geometry.count(role))]
    logger.info(
        "campaign: %d PR x %d ID snapshots, seed %d, %d worker(s)",
        cfg.geometry.count("pr"),
        cfg.geometry.count("id"),
        cfg.seed,
        cfg.workers,
    )
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        outcomes = tuple(pool.map(lambda unit: _process_node(cfg, *unit), units))

    prs = [o for o in outcomes if o.role == "pr"]
    ids = [o for o in outcomes if o.role == "id"]
    matrix = DecisionMatrix(
        pr_ids=tuple(o.node_id for o in prs),
        id_ids=tuple(o.node_id for o in ids),
        ic_bits=tuple(o.passed for o in prs),
        cc_bits=tuple(o.passed for o in ids),
        pr_probabilities=tuple(o.probability for o in prs),
        id_probabilities=tuple(o.probability for o in ids),
    )
    result = CampaignResult(cfg, outcomes, matrix)
    for ident, message in result.errors.items():
        logger.warning("%s excluded from access: %s", ident, message)
    return result
