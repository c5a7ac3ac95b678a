"""Stage-game orchestration over a finite horizon.

Every stage draws Poisson loads and uniform UE placements from a substream
keyed by (seed, stage index), so repeated runs and different protocol
modes see bit-identical worlds (common random numbers); mode differences
are attributable to the protocol alone.

Stage sequence: draw loads, place UEs, associate, exchange one-shot
proposals, resolve by the minimum rule, run one favor ask/grant round,
expire due favors, evaluate rates and utilities under the final outcome,
log. The four modes differ only in which phases act:

    no-sharing        fallback outcome every stage, NOOP messages only
    one-shot-only     proposal game, no favor round
    combined          proposal game plus threshold favor exchange
    full-cooperation  genie argmax of summed utility over the outcome set

For the combined mode the default "prepass" calibration first replays the
horizon under one-shot dynamics to collect each operator's hypothetical
favor gain/loss samples. That seeds the empirical distributions the
thresholds are quantiles of, playing the role of the gain/loss PDFs the
operators are assumed to know.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .geometry import place_ues
from .protocol import (
    FavorDescriptor,
    FavorLedger,
    FavorType,
    GameOutcomeRecord,
    MessageKind,
    ProtocolMessage,
    apply_active_favors,
    apply_favor,
    expire_favors,
    favor_is_legal,
    resolve_favor_round,
    resolve_minimum_rule,
)
from .ran import (
    CarrierPlan,
    Operator,
    OPERATORS,
    SpectrumOutcome,
    StageSnapshot,
    evaluate_rates,
    fallback_outcome,
    joint_outcome,
    make_snapshot,
    outcome_label,
    utility_from_rates,
)
from .strategy import (
    OperatorStrategy,
    OperatorView,
    StrategyConfig,
    ThresholdPolicy,
    grant_loss,
)


@dataclass
class StageResult:
    stage_index: int
    n_ues: dict[Operator, int]
    proposals: tuple[int, int]
    one_shot_label: str
    final_label: str
    rates: dict[Operator, np.ndarray]
    utilities: dict[Operator, float]
    messages: tuple[ProtocolMessage, ...]
    asks: dict[Operator, FavorDescriptor | None]
    granted_by: Operator | None
    favor_units: int
    balance: int  # signed units from A's perspective, after this stage

    def record(self) -> GameOutcomeRecord:
        return GameOutcomeRecord(
            self.stage_index, self.one_shot_label, self.final_label, self.messages
        )


@dataclass
class SimulationResult:
    config: ScenarioConfig
    mode: str
    stage_results: list[StageResult]

    def rate_samples(self, op: Operator) -> np.ndarray:
        chunks = [r.rates[op] for r in self.stage_results if len(r.rates[op])]
        if not chunks:
            return np.zeros(0)
        return np.concatenate(chunks)

    def mean_utility(self, op: Operator) -> float:
        return float(np.mean([r.utilities[op] for r in self.stage_results]))


class StageDraws:
    """Common-random-numbers source: world state per stage, cached.

    All randomness of a stage comes from ``default_rng([seed, stage])`` in
    a fixed draw order (swap coin if interleaved, loads, placements,
    shadowing), so every mode replays identical worlds.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.layout = config.layout()
        self.params = config.propagation()
        self.bss = config.base_stations()
        self.regions = config.ue_regions()
        self.plan = config.plan()
        self._cache: dict[int, StageSnapshot] = {}

    def snapshot(self, stage: int) -> StageSnapshot:
        snap = self._cache.get(stage)
        if snap is None:
            rng = np.random.default_rng([self.config.seed, stage])
            lam_a, lam_b = self.config.mean_loads(stage)
            if self.config.load_pattern == "interleaved":
                if rng.random() < 0.5:
                    lam_a, lam_b = lam_b, lam_a
            n = {Operator.A: int(rng.poisson(lam_a)), Operator.B: int(rng.poisson(lam_b))}
            ues = {op: place_ues(n[op], self.regions[op], rng) for op in OPERATORS}
            snap = make_snapshot(
                self.layout, self.params, self.bss, ues, self.config.noise_per_cc_dbm, rng
            )
            self._cache[stage] = snap
        return snap


def build_view(
    op: Operator,
    snapshot: StageSnapshot,
    prev_tx: dict[Operator, dict[int, tuple[int, ...]]] | None,
    plan: CarrierPlan,
) -> OperatorView:
    """Operator-local view: own gains plus measured external interference.

    The external estimate per CC is the power the previous stage's opponent
    transmitters put onto this stage's own UE positions; the first stage
    uses the optimistic zero prior.
    """
    own_bs = snapshot.bs_indices(op)
    local_index = {g: i for i, g in enumerate(own_bs)}
    cols = np.asarray(snapshot.ue_columns(op), dtype=int)
    own_rx = snapshot.rx_mw[np.asarray(own_bs)[:, None], cols[None, :]]
    serving = np.array([local_index[int(g)] for g in snapshot.serving[op]], dtype=int)
    measured = np.zeros((len(cols), plan.n_cc))
    if prev_tx is not None:
        opp_tx = prev_tx.get(op.opponent, {})
        for cc, bss in opp_tx.items():
            for bs in bss:
                measured[:, cc] += snapshot.rx_mw[bs, cols]
    return OperatorView(
        op=op,
        serving=serving,
        own_rx_mw=own_rx,
        measured_ext_mw=measured,
        noise_mw=snapshot.noise_mw,
        plan=plan,
    )


def transmissions_under(
    outcome: SpectrumOutcome, snapshot: StageSnapshot, plan: CarrierPlan
) -> dict[Operator, dict[int, tuple[int, ...]]]:
    """Per operator: which active BSs transmitted on which CC."""
    active = snapshot.active_bs()
    out: dict[Operator, dict[int, tuple[int, ...]]] = {}
    for op in OPERATORS:
        own_active = tuple(i for i in sorted(active) if snapshot.bss[i].owner is op)
        out[op] = {cc: own_active for cc in outcome.usable[op]}
    return out


def oracle_candidates(plan: CarrierPlan) -> list[tuple[str, SpectrumOutcome]]:
    """Joint-optimization outcome set in least-sharing-first order."""
    o2 = joint_outcome(plan)
    pool = frozenset(plan.shared_pool())
    o2b = apply_favor(o2, Operator.B, FavorDescriptor(FavorType.EXCLUSIVE_USE, pool), plan)
    o2c = apply_favor(o2, Operator.A, FavorDescriptor(FavorType.EXCLUSIVE_USE, pool), plan)
    return [
        ("O1", fallback_outcome(plan)),
        ("O2b", o2b),
        ("O2c", o2c),
        ("O2", o2),
    ]


def full_cooperation_oracle(
    snapshot: StageSnapshot, plan: CarrierPlan
) -> tuple[str, SpectrumOutcome]:
    """Argmax of U_A + U_B over the outcome set, ties toward less sharing.

    Candidates are ordered by ascending carrier sharing and the argmax is
    strict, so equal-sum ties keep the earlier (less shared) outcome.
    """
    best_label, best_outcome, best_sum = None, None, -math.inf
    for label, outcome in oracle_candidates(plan):
        rates = evaluate_rates(outcome, snapshot, plan)
        total = utility_from_rates(rates[Operator.A]) + utility_from_rates(rates[Operator.B])
        if best_outcome is None or total > best_sum:
            best_label, best_outcome, best_sum = label, outcome, total
    return best_label, best_outcome


def _policy_from_config(cfg: ScenarioConfig) -> ThresholdPolicy:
    s = cfg.strategy
    return ThresholdPolicy(
        q_gain=s.q_gain,
        q_loss=s.q_loss,
        credit_limit_units=s.resolved_credit_limit(cfg.n_stages),
        warmup_stages=s.warmup_stages,
        nudge_coeff=s.nudge_coeff,
        adaptive=s.adaptive,
        theta_g=s.theta_g_init,
        theta_l=s.theta_l_init,
    )


def _strategies_from_config(cfg: ScenarioConfig) -> dict[Operator, OperatorStrategy]:
    s = cfg.strategy
    sc = StrategyConfig(
        propose=s.propose,
        ask=s.ask,
        grant=s.grant,
        favor_duration_stages=s.favor_duration_stages,
        include_joint_use=s.include_joint_use,
        favors_after_fallback=s.favors_after_fallback,
    )
    return {op: OperatorStrategy(op, _policy_from_config(cfg), sc) for op in OPERATORS}


def hypothetical_incoming_favor(
    base: SpectrumOutcome, granter: Operator, plan: CarrierPlan, duration: int
) -> FavorDescriptor | None:
    """Largest favor the opponent could legally ask of ``granter`` now."""
    pool = sorted(plan.shared_pool())
    cands = [FavorDescriptor(FavorType.EXCLUSIVE_USE, frozenset(pool), duration)] + [
        FavorDescriptor(FavorType.EXCLUSIVE_USE, frozenset({cc}), duration) for cc in pool
    ]
    for cand in cands:
        if favor_is_legal(base, granter.opponent, cand, plan):
            return cand
    return None


class _ModeRunner:
    """Single-mode pass over the stage horizon.

    ``record_only`` turns the pass into the calibration sweep: one-shot
    dynamics, hypothetical gain/loss recording into the given strategies'
    policies, and no favor exchange.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        mode: str,
        draws: StageDraws,
        strategies: dict[Operator, OperatorStrategy] | None = None,
        record_only: bool = False,
    ):
        self.config = config
        self.mode = mode
        self.draws = draws
        self.plan = draws.plan
        self.strategies = strategies or _strategies_from_config(config)
        self.record_only = record_only
        self.ledger = FavorLedger(window_stages=config.balance_window_stages)
        self.prev_tx: dict[Operator, dict[int, tuple[int, ...]]] | None = None

    def _favor_eligible(self, base: SpectrumOutcome) -> bool:
        if base.shared_count() > 0:
            return True
        return self.config.strategy.favors_after_fallback

    def run(self) -> SimulationResult:
        results = []
        for stage in range(self.config.n_stages):
            results.append(self._run_stage(stage))
        return SimulationResult(self.config, self.mode, results)

    def _run_stage(self, stage: int) -> StageResult:
        snapshot = self.draws.snapshot(stage)
        plan = self.plan
        messages: list[ProtocolMessage] = []
        asks: dict[Operator, FavorDescriptor | None] = {Operator.A: None, Operator.B: None}
        granted_by: Operator | None = None
        favor_units = 0

        if self.mode == "no-sharing":
            proposals = (0, 0)
            final = fallback_outcome(plan)
            one_shot_label = "O1"
            for op in OPERATORS:
                messages.append(ProtocolMessage(stage, op, MessageKind.NOOP))
        elif self.mode == "full-cooperation":
            proposals = (0, 0)
            label, final = full_cooperation_oracle(snapshot, plan)
            one_shot_label = label
        else:
            views = {op: build_view(op, snapshot, self.prev_tx, plan) for op in OPERATORS}
            proposals = (
                self.strategies[Operator.A].propose(views[Operator.A], plan),
                self.strategies[Operator.B].propose(views[Operator.B], plan),
            )
            for op, share in zip(OPERATORS, proposals):
                messages.append(
                    ProtocolMessage(stage, op, MessageKind.PROPOSE, share_count=share)
                )
            _, base = resolve_minimum_rule(proposals[0], proposals[1], plan)
            one_shot_label = outcome_label(base, plan)
            base = apply_active_favors(base, self.ledger, stage, plan)
            final = base

            run_favors = self.mode == "combined" and not self.record_only
            if self.record_only and self._favor_eligible(base):
                # calibration sweep: collect the would-be gain and loss samples
                for op in OPERATORS:
                    self.strategies[op].record_hypothetical_gain(views[op], base, plan)
                    self._record_hypothetical_loss(op, views[op], base, plan)
            if run_favors and self._favor_eligible(base):
                final, granted_by, favor_units = self._favor_round(
                    stage, base, views, messages, asks
                )
            elif self.mode == "combined":
                for op in OPERATORS:
                    messages.append(ProtocolMessage(stage, op, MessageKind.NOOP))
            elif self.mode == "one-shot-only":
                for op in OPERATORS:
                    messages.append(ProtocolMessage(stage, op, MessageKind.NOOP))

            expire_favors(self.ledger, stage)
            if self.mode == "combined" and not self.record_only:
                for op in OPERATORS:
                    self.strategies[op].end_stage(self.ledger, stage)

        rates = evaluate_rates(final, snapshot, plan)
        utilities = {op: utility_from_rates(rates[op]) for op in OPERATORS}
        if self.mode in ("one-shot-only", "combined"):
            self.prev_tx = transmissions_under(final, snapshot, plan)
        final_label = outcome_label(final, plan)

        return StageResult(
            stage_index=stage,
            n_ues={op: snapshot.n_ues(op) for op in OPERATORS},
            proposals=proposals,
            one_shot_label=one_shot_label,
            final_label=final_label,
            rates=rates,
            utilities=utilities,
            messages=tuple(messages),
            asks=asks,
            granted_by=granted_by,
            favor_units=favor_units,
            balance=self.ledger.balance(stage),
        )

    def _record_hypothetical_loss(
        self, op: Operator, view: OperatorView, base: SpectrumOutcome, plan: CarrierPlan
    ) -> None:
        favor = hypothetical_incoming_favor(
            base, op, plan, self.config.strategy.favor_duration_stages
        )
        if favor is not None:
            self.strategies[op].policy.record_loss(grant_loss(view, base, favor, op.opponent, plan))

    def _favor_round(
        self,
        stage: int,
        base: SpectrumOutcome,
        views: dict[Operator, OperatorView],
        messages: list[ProtocolMessage],
        asks: dict[Operator, FavorDescriptor | None],
    ) -> tuple[SpectrumOutcome, Operator | None, int]:
        plan = self.plan
        ask_a = self.strategies[Operator.A].ask(views[Operator.A], base, self.ledger, stage, plan)
        ask_b = self.strategies[Operator.B].ask(views[Operator.B], base, self.ledger, stage, plan)
        asks[Operator.A], asks[Operator.B] = ask_a, ask_b
        for op, ask in ((Operator.A, ask_a), (Operator.B, ask_b)):
            if ask is None:
                messages.append(ProtocolMessage(stage, op, MessageKind.NOOP))
            else:
                messages.append(ProtocolMessage(stage, op, MessageKind.ASK_FAVOR, favor=ask))

        grant_a = grant_b = None
        evaluated_grant = {Operator.A: False, Operator.B: False}
        if ask_a is not None and ask_b is None:
            grant_b = self.strategies[Operator.B].grant(
                views[Operator.B], ask_a, Operator.A, base, self.ledger, stage, plan
            )
            evaluated_grant[Operator.B] = True
            kind = MessageKind.GRANT if grant_b else MessageKind.DENY
            messages.append(ProtocolMessage(stage, Operator.B, kind))
        elif ask_b is not None and ask_a is None:
            grant_a = self.strategies[Operator.A].grant(
                views[Operator.A], ask_b, Operator.B, base, self.ledger, stage, plan
            )
            evaluated_grant[Operator.A] = True
            kind = MessageKind.GRANT if grant_a else MessageKind.DENY
            messages.append(ProtocolMessage(stage, Operator.A, kind))

        # keep one loss sample per eligible stage even without a real ask,
        # so the empirical loss distribution fills at a fixed cadence
        for op in OPERATORS:
            if not evaluated_grant[op] and self.strategies[op].config.grant == "threshold":
                self._record_hypothetical_loss(op, views[op], base, plan)

        final, _, granter = resolve_favor_round(
            ask_a, ask_b, grant_a, grant_b, base, self.ledger, stage, plan
        )
        units = 0
        if granter is not None:
            units = asks[granter.opponent].units
        return final, granter, units


def run_paired(
    config: ScenarioConfig, modes: list[str] | tuple[str, ...]
) -> dict[str, SimulationResult]:
    """Run several modes against identical per-stage worlds."""
    draws = StageDraws(config)
    out: dict[str, SimulationResult] = {}
    for mode in modes:
        out[mode] = _run_mode(config, mode, draws)
    return out


def _run_mode(config: ScenarioConfig, mode: str, draws: StageDraws) -> SimulationResult:
    strategies = _strategies_from_config(config)
    if (
        mode == "combined"
        and config.strategy.calibration == "prepass"
        and config.strategy.adaptive
        and config.strategy.ask == "threshold"
    ):
        _ModeRunner(config, "one-shot-only", draws, strategies, record_only=True).run()
        # the collected horizon-wide samples now stand in for the gain and
        # loss PDFs the operators are assumed to know; keep them fixed
        for op in OPERATORS:
            strategies[op].policy.freeze()
    return _ModeRunner(config, mode, draws, strategies).run()


def run_simulation(config: ScenarioConfig) -> SimulationResult:
    config.validate()
    return run_paired(config, [config.mode])[config.mode]
