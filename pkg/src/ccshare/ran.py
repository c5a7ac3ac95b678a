"""Two-operator RAN model: carriers, association, SINR, rates, utility.

Power per component carrier is constant (no power pooling across CCs), so
received power per CC is tx_power + path gain. A base station transmits on
every CC its operator may use, but only while it serves at least one UE;
empty cells are silent and cause no interference. With a proportional-fair
scheduler, full-buffer traffic and a flat per-CC channel, every UE served
by a BS gets an equal time share 1/N_b on each carrier.

Utilities are proportional-fair: sum over an operator's UEs of ln(rate).
A zero-rate UE drives the utility to -inf, which orders below every finite
utility, and an operator with no UEs has utility 0 by the empty-sum
convention.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Layout, Position, PropagationParams, path_gain_db, wall_count


class Operator(str, enum.Enum):
    A = "A"
    B = "B"

    @property
    def opponent(self) -> "Operator":
        return Operator.B if self is Operator.A else Operator.A


OPERATORS = (Operator.A, Operator.B)


@dataclass(frozen=True)
class BaseStation:
    owner: Operator
    position: Position
    tx_power_per_cc_dbm: float = 20.0


@dataclass(frozen=True)
class CarrierPlan:
    """Component carrier ownership and which CCs are contributed to sharing."""

    n_cc: int = 4
    cc_bandwidth_hz: float = 20e6
    owner_of: tuple[Operator, ...] = (Operator.A, Operator.A, Operator.B, Operator.B)
    contributed: tuple[bool, ...] = (False, True, True, False)

    def __post_init__(self):
        if len(self.owner_of) != self.n_cc or len(self.contributed) != self.n_cc:
            raise ValueError("owner_of and contributed must have n_cc entries")
        for op in OPERATORS:
            owned = self.owned_by(op)
            if len(owned) != self.n_cc // 2:
                raise ValueError(f"operator {op.value} must own exactly n_cc/2 CCs")
            if len([c for c in owned if self.contributed[c]]) != 1:
                raise ValueError(f"operator {op.value} must contribute exactly one CC")

    def owned_by(self, op: Operator) -> tuple[int, ...]:
        return tuple(c for c in range(self.n_cc) if self.owner_of[c] is op)

    def reserved_by(self, op: Operator) -> tuple[int, ...]:
        return tuple(c for c in self.owned_by(op) if not self.contributed[c])

    def contributed_by(self, op: Operator) -> tuple[int, ...]:
        return tuple(c for c in self.owned_by(op) if self.contributed[c])

    def shared_pool(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.n_cc) if self.contributed[c])


DEFAULT_PLAN = CarrierPlan()


@dataclass(frozen=True)
class SpectrumOutcome:
    """Which operator may transmit on which CC, with exclusivity marks.

    ``usable`` already encodes exclusivity: a CC exclusive to one operator
    is absent from the other's usable set. ``exclusive`` records which CCs
    are held by favor rather than by the base resolution.
    """

    usable: dict[Operator, frozenset[int]]
    exclusive: dict[int, Operator] = field(default_factory=dict)

    def validate(self, plan: CarrierPlan) -> None:
        for cc, op in self.exclusive.items():
            if cc in self.usable[op.opponent]:
                raise ValueError(f"CC {cc} exclusive to {op.value} but usable by opponent")
            if cc not in self.usable[op]:
                raise ValueError(f"CC {cc} exclusive to {op.value} but not usable by it")
        for op in OPERATORS:
            for cc in plan.reserved_by(op):
                if cc not in self.usable[op]:
                    raise ValueError(f"reserved CC {cc} missing from {op.value}'s usable set")

    def shared_count(self) -> int:
        return len(self.usable[Operator.A] & self.usable[Operator.B])


def fallback_outcome(plan: CarrierPlan = DEFAULT_PLAN) -> SpectrumOutcome:
    """O1: each operator uses exactly its own CCs (orthogonal fallback)."""
    return SpectrumOutcome(
        usable={op: frozenset(plan.owned_by(op)) for op in OPERATORS}
    )


def joint_outcome(plan: CarrierPlan = DEFAULT_PLAN, shared: int | None = None) -> SpectrumOutcome:
    """O2/O2a: each operator's contributed CCs (up to ``shared`` per op) pooled."""
    usable = {}
    for op in OPERATORS:
        extra = plan.contributed_by(op.opponent)
        if shared is not None:
            extra = extra[:shared]
        usable[op] = frozenset(plan.owned_by(op)) | frozenset(extra)
    return SpectrumOutcome(usable=usable)


def outcome_label(outcome: SpectrumOutcome, plan: CarrierPlan = DEFAULT_PLAN) -> str:
    """Canonical label for the default plan: O1, O2, O2b, O2c or O2x(...).

    O2 is the full joint-use outcome (called 2a once the favor phase has
    confirmed it); O2c marks operator A holding every pooled CC
    exclusively, O2b the mirror image, and O2x(...) any partial
    exclusivity pattern.
    """
    pool = set(plan.shared_pool())
    excl = {cc: op for cc, op in outcome.exclusive.items() if cc in pool}
    jointly = outcome.usable[Operator.A] & outcome.usable[Operator.B]
    if not excl:
        if not jointly:
            return "O1"
        if jointly == pool:
            return "O2"
        return "O2x(partial-pool)"
    if set(excl) == pool:
        holders = set(excl.values())
        if holders == {Operator.A}:
            return "O2c"
        if holders == {Operator.B}:
            return "O2b"
    marks = ",".join(f"{op.value}{cc}" for cc, op in sorted(excl.items()))
    return f"O2x({marks})"


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


@dataclass
class StageSnapshot:
    """One stage's frozen world: placements, association and cached gains.

    ``rx_mw[i, j]`` is the received power in mW at UE column j from BS i,
    i.e. tx power plus path gain, cached once per stage. UE columns are the
    concatenation of operator A's UEs then operator B's.
    """

    bss: tuple[BaseStation, ...]
    ue_positions: dict[Operator, list[Position]]
    serving: dict[Operator, np.ndarray]  # per-UE global BS index
    gains_db: np.ndarray  # (n_bs, n_ue_total)
    rx_mw: np.ndarray  # (n_bs, n_ue_total)
    noise_per_cc_dbm: float = -80.0

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_per_cc_dbm)

    def ue_columns(self, op: Operator) -> range:
        n_a = len(self.ue_positions[Operator.A])
        if op is Operator.A:
            return range(0, n_a)
        return range(n_a, n_a + len(self.ue_positions[Operator.B]))

    def n_ues(self, op: Operator) -> int:
        return len(self.ue_positions[op])

    def bs_indices(self, op: Operator) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.bss) if b.owner is op)

    def active_bs(self) -> frozenset[int]:
        """BS indices serving at least one UE; only these transmit."""
        active = set()
        for op in OPERATORS:
            active.update(int(i) for i in self.serving[op])
        return frozenset(active)

    def load_of_bs(self, bs_index: int) -> int:
        n = 0
        for op in OPERATORS:
            n += int(np.sum(self.serving[op] == bs_index))
        return n


def associate(
    ue_positions: list[Position],
    own_bs_indices: tuple[int, ...],
    rx_mw_cols: np.ndarray,
) -> np.ndarray:
    """Map UEs to own-operator BS with max received power, ties to lowest index.

    ``rx_mw_cols`` has one row per BS (global indexing) and one column per
    UE in ``ue_positions``.
    """
    if not own_bs_indices:
        raise ValueError("operator has no base stations")
    out = np.empty(len(ue_positions), dtype=int)
    own = np.asarray(own_bs_indices)
    sub = rx_mw_cols[own, :]
    # argmax returns the first maximum, and own_bs_indices is ascending,
    # so equal-power ties resolve to the lowest BS index
    out[:] = own[np.argmax(sub, axis=0)] if len(ue_positions) else own[:0]
    return out


def make_snapshot(
    layout: Layout,
    params: PropagationParams,
    bss: tuple[BaseStation, ...],
    ue_positions: dict[Operator, list[Position]],
    noise_per_cc_dbm: float = -80.0,
    rng: np.random.Generator | None = None,
) -> StageSnapshot:
    """Build gains, received powers and association for one stage.

    If shadowing is enabled in ``params`` an rng must be supplied; one
    normal sample is drawn per BS-UE link in (bs, then ue) order so the
    draw sequence is reproducible.
    """
    all_ues = list(ue_positions[Operator.A]) + list(ue_positions[Operator.B])
    n_bs, n_ue = len(bss), len(all_ues)
    gains = np.zeros((n_bs, n_ue))
    shadow = np.zeros((n_bs, n_ue))
    if params.shadowing_enabled:
        if rng is None:
            raise ValueError("shadowing requires an rng")
        raw = rng.normal(size=(n_bs, n_ue))
    for i, bs in enumerate(bss):
        for j, ue in enumerate(all_ues):
            if params.shadowing_enabled:
                sigma = (
                    params.shadowing_sigma_los_db
                    if wall_count(bs.position, ue, layout) == 0
                    else params.shadowing_sigma_nlos_db
                )
                shadow[i, j] = raw[i, j] * sigma
            gains[i, j] = path_gain_db(bs.position, ue, layout, params, shadow[i, j])
    tx_dbm = np.array([b.tx_power_per_cc_dbm for b in bss])
    rx_mw = 10.0 ** ((tx_dbm[:, None] + gains) / 10.0)

    serving = {}
    off = 0
    for op in OPERATORS:
        ues = ue_positions[op]
        cols = rx_mw[:, off : off + len(ues)]
        serving[op] = associate(ues, tuple(i for i, b in enumerate(bss) if b.owner is op), cols)
        off += len(ues)
    return StageSnapshot(bss, ue_positions, serving, gains, rx_mw, noise_per_cc_dbm)


def _transmitters_per_cc(
    outcome: SpectrumOutcome, snapshot: StageSnapshot, n_cc: int
) -> list[list[int]]:
    active = snapshot.active_bs()
    tx = [[] for _ in range(n_cc)]
    for i in sorted(active):
        for cc in outcome.usable[snapshot.bss[i].owner]:
            tx[cc].append(i)
    return tx


def sinr_linear(
    op: Operator,
    ue_index: int,
    cc: int,
    outcome: SpectrumOutcome,
    snapshot: StageSnapshot,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    """Linear downlink SINR of one UE on one CC under an outcome.

    Interference sums every other active BS, own-operator and opponent
    alike, whose operator may use the CC. Querying a CC outside the
    serving operator's usable set is a contract violation.
    """
    if cc not in outcome.usable[op]:
        raise ValueError(f"CC {cc} is not usable by operator {op.value} under this outcome")
    col = snapshot.ue_columns(op)[ue_index]
    serving = int(snapshot.serving[op][ue_index])
    interference = 0.0
    for bs in _transmitters_per_cc(outcome, snapshot, plan.n_cc)[cc]:
        if bs != serving:
            interference += snapshot.rx_mw[bs, col]
    return snapshot.rx_mw[serving, col] / (snapshot.noise_mw + interference)


def ue_rate(
    op: Operator,
    ue_index: int,
    outcome: SpectrumOutcome,
    snapshot: StageSnapshot,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    """Shannon rate in bit/s with equal time share 1/N_b per carrier."""
    serving = int(snapshot.serving[op][ue_index])
    n_b = snapshot.load_of_bs(serving)
    rate = 0.0
    for cc in sorted(outcome.usable[op]):
        s = sinr_linear(op, ue_index, cc, outcome, snapshot, plan)
        rate += plan.cc_bandwidth_hz / n_b * math.log2(1.0 + s)
    return rate


def evaluate_rates(
    outcome: SpectrumOutcome,
    snapshot: StageSnapshot,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> dict[Operator, np.ndarray]:
    """Vectorized per-UE rates for both operators under one outcome.

    Matches :func:`ue_rate` exactly; this is the fast path used by the
    harness, the scalar functions are the readable reference.
    """
    tx = _transmitters_per_cc(outcome, snapshot, plan.n_cc)
    noise = snapshot.noise_mw
    rates: dict[Operator, np.ndarray] = {}
    for op in OPERATORS:
        n = snapshot.n_ues(op)
        if n == 0:
            rates[op] = np.zeros(0)
            continue
        cols = np.asarray(snapshot.ue_columns(op))
        serving = snapshot.serving[op]
        p_serve = snapshot.rx_mw[serving, cols]
        loads = np.array([snapshot.load_of_bs(int(s)) for s in serving], dtype=float)
        total = np.zeros(n)
        for cc in sorted(outcome.usable[op]):
            if tx[cc]:
                power = snapshot.rx_mw[np.asarray(tx[cc])[:, None], cols[None, :]].sum(axis=0)
            else:
                power = np.zeros(n)
            on_cc = np.isin(serving, tx[cc])
            interference = power - np.where(on_cc, p_serve, 0.0)
            sinr = p_serve / (noise + interference)
            total += plan.cc_bandwidth_hz * np.log2(1.0 + sinr)
        rates[op] = total / loads
    return rates


def utility_from_rates(rates: np.ndarray) -> float:
    """Proportional-fair utility in nats; 0 for no UEs, -inf on a zero rate."""
    if len(rates) == 0:
        return 0.0
    if np.any(rates <= 0.0):
        return float("-inf")
    return float(np.sum(np.log(rates)))


def operator_utility(
    op: Operator,
    outcome: SpectrumOutcome,
    snapshot: StageSnapshot,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    return utility_from_rates(evaluate_rates(outcome, snapshot, plan)[op])


def utility_delta(
    op: Operator,
    from_outcome: SpectrumOutcome,
    to_outcome: SpectrumOutcome,
    snapshot: StageSnapshot,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> float:
    """Reward U(to) - U(from); equal utilities (including -inf) give 0."""
    u_from = operator_utility(op, from_outcome, snapshot, plan)
    u_to = operator_utility(op, to_outcome, snapshot, plan)
    if u_from == u_to:
        return 0.0
    return u_to - u_from
