"""Operator-side decision logic built only on own-network state.

Each operator sees its own UEs, association, own-cell path gains and a
per-CC external interference estimate equal to the previous stage's
realized opponent transmissions measured at its current UEs (first stage:
optimistic zero prior). Nothing opponent-private enters a decision.

One-shot proposals compare the estimated proportional-fair utility of the
fallback and joint-use outcomes. Repeated-game asks and grants are
threshold decisions on the estimated utility gain/loss of a favor:

    ask   iff gain > theta_g and own debt stays within the credit limit
    grant iff loss < theta_l and the asker's debt stays within the limit

Thresholds derive from empirical gain/loss distributions. theta_g is an
upper quantile of the gain distribution; theta_l is the loss-distribution
quantile capped by the mean gain, so a favor is only granted when it costs
less than the reciprocal favor is expected to return. Both thresholds are
then nudged proportionally to the ledger balance: a debtor asks less and
grants more, a creditor the reverse, which keeps units given and taken in
long-run balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .protocol import (
    FavorDescriptor,
    FavorLedger,
    FavorType,
    favor_is_legal,
)
from .ran import CarrierPlan, DEFAULT_PLAN, Operator, SpectrumOutcome, fallback_outcome, joint_outcome
from .protocol import apply_favor


@dataclass(frozen=True)
class OperatorView:
    """Own-measurable slice of the world; contains no opponent-private state.

    ``own_rx_mw[i, j]`` is received power at own UE j from own BS i.
    ``measured_ext_mw[j, cc]`` is the external (opponent) interference
    power measured at own UE j on each CC, carried over from the previous
    stage's transmissions.
    """

    op: Operator
    serving: np.ndarray  # per own UE, row index into own_rx_mw
    own_rx_mw: np.ndarray  # (n_own_bs, n_own_ue)
    measured_ext_mw: np.ndarray  # (n_own_ue, n_cc)
    noise_mw: float
    plan: CarrierPlan = DEFAULT_PLAN

    @property
    def n_ues(self) -> int:
        return self.own_rx_mw.shape[1]

    def loads(self) -> np.ndarray:
        """UEs per own BS; only loaded BSs transmit."""
        counts = np.zeros(self.own_rx_mw.shape[0], dtype=int)
        for s in self.serving:
            counts[int(s)] += 1
        return counts


def estimate_utility(
    view: OperatorView,
    own_ccs: frozenset[int],
    opponent_ccs: frozenset[int],
) -> float:
    """Estimated PF utility under hypothetical usable sets.

    Own-cell interference is exact (the operator knows its own network).
    Opponent interference is predicted from the measured per-CC powers:
    since transmit power per CC is constant, the opponent's interference
    fingerprint at a UE is the same on every carrier it uses, so the
    strongest measured CC predicts any CC the candidate outcome lets the
    opponent transmit on; CCs the rules deny it contribute nothing.
    """
    n = view.n_ues
    if n == 0:
        return 0.0
    if not own_ccs:
        return float("-inf")
    loads = view.loads()
    active = loads > 0
    rates = np.zeros(n)
    cols = np.arange(n)
    p_serve = view.own_rx_mw[view.serving, cols]
    own_total = view.own_rx_mw[active, :].sum(axis=0)
    intra = own_total - p_serve
    ext_fingerprint = view.measured_ext_mw.max(axis=1)
    w = view.plan.cc_bandwidth_hz
    for cc in sorted(own_ccs):
        ext = ext_fingerprint if cc in opponent_ccs else 0.0
        sinr = p_serve / (view.noise_mw + intra + ext)
        rates += w * np.log2(1.0 + sinr)
    rates /= loads[view.serving]
    if np.any(rates <= 0.0):
        return float("-inf")
    return float(np.sum(np.log(rates)))


def one_shot_proposal(view: OperatorView, plan: CarrierPlan = DEFAULT_PLAN) -> int:
    """Share own contributed CC iff the joint outcome looks better than fallback.

    With no own UEs sharing costs nothing, so propose it.
    """
    if view.n_ues == 0:
        return 1
    o1 = fallback_outcome(plan)
    o2 = joint_outcome(plan)
    op = view.op
    u1 = estimate_utility(view, o1.usable[op], o1.usable[op.opponent])
    u2 = estimate_utility(view, o2.usable[op], o2.usable[op.opponent])
    return 1 if u2 > u1 else 0


def candidate_favors(
    view: OperatorView,
    base: SpectrumOutcome,
    plan: CarrierPlan = DEFAULT_PLAN,
    duration_stages: int = 1,
    include_joint_use: bool = False,
) -> list[FavorDescriptor]:
    """Exclusive-use candidates over the pooled CCs, largest favor first.

    The full-pool favor leads so that exact gain ties resolve toward it;
    single-CC variants follow in ascending CC order.
    """
    pool = sorted(plan.shared_pool())
    cands = []
    if len(pool) > 1:
        cands.append(FavorDescriptor(FavorType.EXCLUSIVE_USE, frozenset(pool), duration_stages))
    for cc in pool:
        cands.append(FavorDescriptor(FavorType.EXCLUSIVE_USE, frozenset({cc}), duration_stages))
        if include_joint_use:
            cands.append(FavorDescriptor(FavorType.JOINT_USE, frozenset({cc}), duration_stages))
    return [c for c in cands if favor_is_legal(base, view.op, c, plan)]


def favor_gain(
    view: OperatorView,
    base: SpectrumOutcome,
    favor: FavorDescriptor,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    """Asker-side utility gain with the opponent off the requested CCs."""
    after = apply_favor(base, view.op, favor, plan)
    op = view.op
    u_base = estimate_utility(view, base.usable[op], base.usable[op.opponent])
    u_after = estimate_utility(view, after.usable[op], after.usable[op.opponent])
    if u_base == u_after:
        return 0.0
    return u_after - u_base


def grant_loss(
    view: OperatorView,
    base: SpectrumOutcome,
    favor: FavorDescriptor,
    asker: Operator,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    """Granter-side utility loss (positive magnitude) from giving the favor."""
    after = apply_favor(base, asker, favor, plan)
    op = view.op
    u_base = estimate_utility(view, base.usable[op], base.usable[op.opponent])
    u_after = estimate_utility(view, after.usable[op], after.usable[op.opponent])
    if u_base == u_after:
        return 0.0
    return u_base - u_after


@dataclass
class ThresholdPolicy:
    """Ask/grant thresholds with empirical gain/loss accumulators.

    ``theta_g`` starts at +inf and ``theta_l`` at 0 (observe-only), so no
    favor moves until enough samples exist; with ``adaptive`` off they stay
    frozen, which degenerates to the one-shot-only behavior.
    """

    q_gain: float = 0.5
    q_loss: float = 0.7
    credit_limit_units: int = 64
    warmup_stages: int = 50
    nudge_coeff: float = 0.1
    adaptive: bool = True
    theta_g: float = float("inf")
    theta_l: float = 0.0
    gain_samples: list[float] = field(default_factory=list)
    loss_samples: list[float] = field(default_factory=list)
    frozen: bool = False  # set once the distributions represent known PDFs

    def __post_init__(self):
        if self.theta_l < 0:
            raise ValueError("theta_l must be >= 0")
        if self.credit_limit_units < 0:
            raise ValueError("credit limit must be >= 0")

    def record_gain(self, gain: float) -> None:
        if not self.frozen:
            self.gain_samples.append(gain)

    def record_loss(self, loss: float) -> None:
        if not self.frozen:
            self.loss_samples.append(loss)

    def freeze(self) -> None:
        self.frozen = True


def _finite(samples: list[float]) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    return arr[np.isfinite(arr)]


def update_thresholds(
    policy: ThresholdPolicy, ledger: FavorLedger, op: Operator, stage: int
) -> ThresholdPolicy:
    """Re-derive thresholds from the sample history plus a balance nudge.

    Deterministic given the recorded samples and ledger. No adaptation
    happens before the warmup sample count is reached.
    """
    if not policy.adaptive:
        return policy
    gains = _finite(policy.gain_samples)
    losses = _finite(policy.loss_samples)
    if len(gains) < policy.warmup_stages or len(losses) < policy.warmup_stages:
        return policy
    theta_g = float(np.quantile(gains, policy.q_gain))
    # a granted favor is repaid by one the operator itself will claim,
    # and it only claims favors gaining more than theta_g, so the
    # reciprocal value is the mean gain above the ask threshold
    claimable = gains[gains > theta_g]
    reciprocal_value = float(claimable.mean()) if claimable.size else float(gains.mean())
    theta_l = min(float(np.quantile(losses, policy.q_loss)), reciprocal_value)

    debt = ledger.debt(op, stage)
    if policy.credit_limit_units > 0:
        pressure = max(-1.0, min(1.0, debt / policy.credit_limit_units))
    else:
        pressure = 0.0
    nudge = policy.nudge_coeff * pressure * reciprocal_value
    policy.theta_g = max(0.0, theta_g + nudge)
    policy.theta_l = max(0.0, theta_l + nudge)
    return policy


def decide_ask(
    view: OperatorView,
    base: SpectrumOutcome,
    candidates: list[FavorDescriptor],
    policy: ThresholdPolicy,
    ledger: FavorLedger,
    stage: int,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> FavorDescriptor | None:
    """Pick the max-gain candidate; ask only past the gain threshold and
    while own debt stays within the credit limit. The best gain is recorded
    whether or not an ask goes out."""
    if not candidates:
        return None
    best, best_gain = None, float("-inf")
    for cand in candidates:
        g = favor_gain(view, base, cand, plan)
        if g > best_gain:
            best, best_gain = cand, g
    policy.record_gain(best_gain)
    if best_gain <= policy.theta_g:
        return None
    if ledger.debt(view.op, stage) + best.units > policy.credit_limit_units:
        return None
    return best


def decide_grant(
    view: OperatorView,
    ask: FavorDescriptor,
    asker: Operator,
    base: SpectrumOutcome,
    policy: ThresholdPolicy,
    ledger: FavorLedger,
    stage: int,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> bool:
    """Grant iff the estimated loss stays strictly below theta_l and the
    asker's debt would not exceed the credit limit."""
    loss = grant_loss(view, base, ask, asker, plan)
    policy.record_loss(loss)
    if not (loss < policy.theta_l):
        return False
    if ledger.debt(asker, stage) + ask.units > policy.credit_limit_units:
        return False
    return True


@dataclass
class StrategyConfig:
    """Behavior switches; the scripted variants exist for baselines and tests."""

    propose: str = "utility"  # utility | always | never
    ask: str = "threshold"  # threshold | never
    grant: str = "threshold"  # threshold | always | never
    favor_duration_stages: int = 1
    include_joint_use: bool = False
    favors_after_fallback: bool = False  # allow asks when the one-shot result is O1


class OperatorStrategy:
    """One operator's decision endpoint: proposals, asks, grants, adaptation."""

    def __init__(self, op: Operator, policy: ThresholdPolicy, config: StrategyConfig | None = None):
        self.op = op
        self.policy = policy
        self.config = config or StrategyConfig()

    def propose(self, view: OperatorView, plan: CarrierPlan = DEFAULT_PLAN) -> int:
        mode = self.config.propose
        if mode == "always":
            return 1
        if mode == "never":
            return 0
        return one_shot_proposal(view, plan)

    def ask(
        self,
        view: OperatorView,
        base: SpectrumOutcome,
        ledger: FavorLedger,
        stage: int,
        plan: CarrierPlan = DEFAULT_PLAN,
    ) -> FavorDescriptor | None:
        if self.config.ask == "never":
            return None
        if base.shared_count() == 0 and not self.config.favors_after_fallback:
            return None
        cands = candidate_favors(
            view, base, plan, self.config.favor_duration_stages, self.config.include_joint_use
        )
        return decide_ask(view, base, cands, self.policy, ledger, stage, plan)

    def grant(
        self,
        view: OperatorView,
        ask: FavorDescriptor,
        asker: Operator,
        base: SpectrumOutcome,
        ledger: FavorLedger,
        stage: int,
        plan: CarrierPlan = DEFAULT_PLAN,
    ) -> bool:
        if self.config.grant == "never":
            return False
        if self.config.grant == "always":
            return True
        return decide_grant(view, ask, asker, base, self.policy, ledger, stage, plan)

    def record_hypothetical_gain(
        self,
        view: OperatorView,
        base: SpectrumOutcome,
        plan: CarrierPlan = DEFAULT_PLAN,
    ) -> None:
        """Store the would-be best favor gain without acting on it."""
        cands = candidate_favors(
            view, base, plan, self.config.favor_duration_stages, self.config.include_joint_use
        )
        if cands:
            self.policy.record_gain(max(favor_gain(view, base, c, plan) for c in cands))

    def end_stage(self, ledger: FavorLedger, stage: int) -> None:
        update_thresholds(self.policy, ledger, self.op, stage)
