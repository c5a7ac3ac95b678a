"""Scenario configuration: presets, JSON loading and validation.

Two presets mirror the evaluated deployments: scenario 1 has equal mean
loads, 10 dB internal walls and per-room UE placement (low inter-operator
interference); scenario 2 has asymmetric block loads (8/2 swapped at
half-horizon), no internal walls and whole-building placement.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import (
    Layout,
    Position,
    PropagationParams,
    Rect,
    four_room_layout,
    open_layout,
)
from .ran import BaseStation, CarrierPlan, Operator

MODES = ("no-sharing", "one-shot-only", "combined", "full-cooperation")
LOAD_PATTERNS = ("constant", "block", "interleaved")


class ConfigError(ValueError):
    def __init__(self, fieldname: str, detail: str):
        self.fieldname = fieldname
        super().__init__(f"config field '{fieldname}': {detail}")


@dataclass
class StrategyParams:
    """Threshold-strategy knobs.

    ``credit_limit_units`` of None resolves to half the stage horizon:
    operators are patient enough to carry a whole load-block of one-unit
    favors before reciprocity must catch up. The quantiles, nudge and
    limit are tunable; the defaults reproduce the reported scenario
    behavior.
    """

    q_gain: float = 0.5
    q_loss: float = 0.7
    credit_limit_units: int | None = None
    warmup_stages: int = 50
    nudge_coeff: float = 0.1
    adaptive: bool = True
    calibration: str = "prepass"  # prepass | online
    theta_g_init: float = math.inf
    theta_l_init: float = 0.0
    favor_duration_stages: int = 1
    include_joint_use: bool = False
    favors_after_fallback: bool = True
    propose: str = "utility"
    ask: str = "threshold"
    grant: str = "threshold"

    def resolved_credit_limit(self, n_stages: int) -> int:
        if self.credit_limit_units is not None:
            return self.credit_limit_units
        return max(1, n_stages // 2)

    def validate(self) -> None:
        if not (0.0 <= self.q_gain <= 1.0):
            raise ConfigError("strategy.q_gain", "must be in [0, 1]")
        if not (0.0 <= self.q_loss <= 1.0):
            raise ConfigError("strategy.q_loss", "must be in [0, 1]")
        if self.credit_limit_units is not None and self.credit_limit_units < 0:
            raise ConfigError("strategy.credit_limit_units", "must be >= 0 or null")
        if self.warmup_stages < 1:
            raise ConfigError("strategy.warmup_stages", "must be >= 1")
        if self.calibration not in ("prepass", "online"):
            raise ConfigError("strategy.calibration", "must be 'prepass' or 'online'")
        if self.theta_l_init < 0:
            raise ConfigError("strategy.theta_l_init", "must be >= 0")
        if self.favor_duration_stages < 1:
            raise ConfigError("strategy.favor_duration_stages", "must be >= 1")
        if self.propose not in ("utility", "always", "never"):
            raise ConfigError("strategy.propose", "must be utility|always|never")
        if self.ask not in ("threshold", "never"):
            raise ConfigError("strategy.ask", "must be threshold|never")
        if self.grant not in ("threshold", "always", "never"):
            raise ConfigError("strategy.grant", "must be threshold|always|never")


@dataclass
class ScenarioConfig:
    name: str = "custom"
    n_stages: int = 4000
    seed: int = 1
    mode: str = "combined"
    lambda_a: float = 5.0
    lambda_b: float = 5.0
    load_pattern: str = "constant"
    building_side_m: float = 50.0
    wall_loss_db: float | None = 10.0  # None removes the internal walls
    ue_region: str = "rooms"  # rooms | building
    carrier_freq_ghz: float = 5.0
    shadowing: bool = False
    tx_power_per_cc_dbm: float = 20.0
    noise_per_cc_dbm: float = -80.0
    n_cc: int = 4
    cc_bandwidth_hz: float = 20e6
    bs_positions: dict[str, list[tuple[float, float]]] | None = None
    balance_window_stages: int | None = None
    strategy: StrategyParams = field(default_factory=StrategyParams)

    def validate(self) -> None:
        if self.n_stages < 1:
            raise ConfigError("n_stages", "must be >= 1")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}")
        if self.lambda_a < 0 or self.lambda_b < 0:
            raise ConfigError("lambda_a/lambda_b", "mean loads must be >= 0")
        if self.load_pattern not in LOAD_PATTERNS:
            raise ConfigError("load_pattern", f"must be one of {LOAD_PATTERNS}")
        if self.building_side_m <= 0:
            raise ConfigError("building_side_m", "must be positive")
        if self.wall_loss_db is not None and self.wall_loss_db < 0:
            raise ConfigError("wall_loss_db", "must be >= 0 (or null for no walls)")
        if self.ue_region not in ("rooms", "building"):
            raise ConfigError("ue_region", "must be 'rooms' or 'building'")
        if self.ue_region == "rooms" and self.wall_loss_db is None:
            raise ConfigError("ue_region", "'rooms' placement needs the four-room layout")
        if self.n_cc != 4:
            raise ConfigError("n_cc", "only the default 4-CC plan is supported")
        if self.cc_bandwidth_hz <= 0:
            raise ConfigError("cc_bandwidth_hz", "must be positive")
        if self.balance_window_stages is not None and self.balance_window_stages < 1:
            raise ConfigError("balance_window_stages", "must be >= 1 or null")
        self.strategy.validate()
        for op, positions in self.bs_layout().items():
            if not positions:
                raise ConfigError("bs_positions", f"operator {op.value} needs >= 1 BS")
            for p in positions:
                if not (0 <= p.x <= self.building_side_m and 0 <= p.y <= self.building_side_m):
                    raise ConfigError("bs_positions", f"{p} outside the building")

    def layout(self) -> Layout:
        if self.wall_loss_db is None:
            return open_layout(self.building_side_m)
        return four_room_layout(self.building_side_m, self.wall_loss_db)

    def propagation(self) -> PropagationParams:
        return PropagationParams(
            carrier_freq_ghz=self.carrier_freq_ghz,
            shadowing_enabled=self.shadowing,
        )

    def bs_layout(self) -> dict[Operator, list[Position]]:
        """Default: one BS per room centroid, own rooms on a diagonal."""
        if self.bs_positions is not None:
            return {
                Operator(op): [Position(x, y) for x, y in pts]
                for op, pts in self.bs_positions.items()
            }
        q = self.building_side_m / 4.0
        return {
            Operator.A: [Position(q, q), Position(3 * q, 3 * q)],
            Operator.B: [Position(3 * q, q), Position(q, 3 * q)],
        }

    def base_stations(self) -> tuple[BaseStation, ...]:
        bss = []
        for op in (Operator.A, Operator.B):
            for p in self.bs_layout()[op]:
                bss.append(BaseStation(op, p, self.tx_power_per_cc_dbm))
        return tuple(bss)

    def plan(self) -> CarrierPlan:
        return CarrierPlan(n_cc=self.n_cc, cc_bandwidth_hz=self.cc_bandwidth_hz)

    def ue_regions(self) -> dict[Operator, tuple[Rect, ...]]:
        layout = self.layout()
        if self.ue_region == "building":
            whole = (Rect(0.0, 0.0, self.building_side_m, self.building_side_m),)
            return {Operator.A: whole, Operator.B: whole}
        regions: dict[Operator, tuple[Rect, ...]] = {}
        for op, positions in self.bs_layout().items():
            rooms = []
            for room in layout.rooms:
                if any(room.contains(p) for p in positions):
                    rooms.append(room)
            regions[op] = tuple(rooms)
        return regions

    def mean_loads(self, stage: int) -> tuple[float, float]:
        """Per-stage Poisson means; block mode swaps them at half horizon."""
        if self.load_pattern == "block" and stage >= self.n_stages // 2:
            return self.lambda_b, self.lambda_a
        return self.lambda_a, self.lambda_b

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["strategy"] = dataclasses.asdict(self.strategy)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        strat = data.pop("strategy", {})
        if isinstance(strat, dict):
            strat_known = {f.name for f in dataclasses.fields(StrategyParams)}
            strat_unknown = set(strat) - strat_known
            if strat_unknown:
                raise ConfigError(f"strategy.{sorted(strat_unknown)[0]}", "unknown field")
            if "theta_g_init" in strat and strat["theta_g_init"] is None:
                strat["theta_g_init"] = math.inf
            strat = StrategyParams(**strat)
        if "bs_positions" in data and data["bs_positions"] is not None:
            data["bs_positions"] = {
                op: [tuple(p) for p in pts] for op, pts in data["bs_positions"].items()
            }
        cfg = cls(strategy=strat, **data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str | Path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_json(self, path: str | Path) -> None:
        d = self.to_dict()
        if math.isinf(d["strategy"]["theta_g_init"]):
            d["strategy"]["theta_g_init"] = None
        with open(path, "w", encoding="utf-8") as f:
            json.dump(d, f, indent=2, sort_keys=True)
            f.write("\n")


def scenario1(seed: int = 1, mode: str = "combined", n_stages: int = 4000) -> ScenarioConfig:
    """Equal mean loads (5/5), 10 dB walls, per-room UEs."""
    cfg = ScenarioConfig(
        name="equal-load-low-interf",
        n_stages=n_stages,
        seed=seed,
        mode=mode,
        lambda_a=5.0,
        lambda_b=5.0,
        load_pattern="constant",
        wall_loss_db=10.0,
        ue_region="rooms",
    )
    cfg.validate()
    return cfg


def scenario2(
    seed: int = 1,
    mode: str = "combined",
    n_stages: int = 4000,
    load_pattern: str = "block",
) -> ScenarioConfig:
    """Asymmetric loads (8/2 swapped at half horizon), no walls, whole building."""
    cfg = ScenarioConfig(
        name="asym-load-high-interf",
        n_stages=n_stages,
        seed=seed,
        mode=mode,
        lambda_a=8.0,
        lambda_b=2.0,
        load_pattern=load_pattern,
        wall_loss_db=None,
        ue_region="building",
    )
    cfg.validate()
    return cfg
