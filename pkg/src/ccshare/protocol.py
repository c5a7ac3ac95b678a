"""Inter-operator coordination protocol: messages, minimum rule, favors.

Wire format (canonical, little-endian):

    header:  stage_index u32 | sender u8 (A=0, B=1) | kind u8 | payload_len u16
    PROPOSE payload:   share_count u8
    ASK_FAVOR payload: favor_type u8 (JOINT_USE=0, EXCLUSIVE_USE=1)
                       | n_ccs u8 | cc indices u8 each, strictly ascending
                       | duration_stages u16
    GRANT / DENY / NOOP payload: empty

Every valid message has exactly one encoding; the decoder rejects
non-canonical CC ordering, trailing bytes and truncation with an error
naming the offending field. A golden corpus of encoded messages lives in
tests/data/golden_messages.json.

The favor ledger keeps a signed balance in favor units (one unit = one CC
for one stage) from operator A's perspective: positive means A owes B.
Spectrum-state expiry of a favor does not erase its units; debts persist
until repaid in kind, unless a finite reciprocity window is configured.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

from .ran import (
    CarrierPlan,
    DEFAULT_PLAN,
    Operator,
    OPERATORS,
    SpectrumOutcome,
    fallback_outcome,
    joint_outcome,
)


class ProtocolViolation(Exception):
    pass


class MessageDecodeError(Exception):
    def __init__(self, fieldname: str, detail: str):
        self.fieldname = fieldname
        super().__init__(f"invalid message field '{fieldname}': {detail}")


class MessageKind(enum.IntEnum):
    NOOP = 0
    PROPOSE = 1
    ASK_FAVOR = 2
    GRANT = 3
    DENY = 4


class FavorType(enum.IntEnum):
    JOINT_USE = 0
    EXCLUSIVE_USE = 1


_SENDER_CODE = {Operator.A: 0, Operator.B: 1}
_CODE_SENDER = {0: Operator.A, 1: Operator.B}
_HEADER = struct.Struct("<IBBH")


@dataclass(frozen=True)
class FavorDescriptor:
    favor_type: FavorType
    ccs: frozenset[int]
    duration_stages: int = 1

    def __post_init__(self):
        if self.duration_stages < 1:
            raise ValueError("favor duration must be >= 1 stage")
        if not self.ccs:
            raise ValueError("favor must name at least one CC")

    @property
    def units(self) -> int:
        """Favor value in CC-stages."""
        return len(self.ccs) * self.duration_stages

    def compact(self) -> str:
        kind = "EXCL" if self.favor_type is FavorType.EXCLUSIVE_USE else "JOINT"
        return f"{kind}:{'+'.join(str(c) for c in sorted(self.ccs))}@{self.duration_stages}"


@dataclass(frozen=True)
class ProtocolMessage:
    stage_index: int
    sender: Operator
    kind: MessageKind
    share_count: int | None = None
    favor: FavorDescriptor | None = None

    def __post_init__(self):
        if self.kind is MessageKind.PROPOSE and self.share_count is None:
            raise ValueError("PROPOSE requires share_count")
        if self.kind is MessageKind.ASK_FAVOR and self.favor is None:
            raise ValueError("ASK_FAVOR requires a favor descriptor")


def encode(msg: ProtocolMessage) -> bytes:
    if msg.kind is MessageKind.PROPOSE:
        payload = struct.pack("<B", msg.share_count)
    elif msg.kind is MessageKind.ASK_FAVOR:
        ccs = sorted(msg.favor.ccs)
        payload = struct.pack("<BB", int(msg.favor.favor_type), len(ccs))
        payload += bytes(ccs)
        payload += struct.pack("<H", msg.favor.duration_stages)
    else:
        payload = b""
    header = _HEADER.pack(msg.stage_index, _SENDER_CODE[msg.sender], int(msg.kind), len(payload))
    return header + payload


def decode(data: bytes) -> ProtocolMessage:
    if len(data) < _HEADER.size:
        raise MessageDecodeError("header", f"need {_HEADER.size} bytes, got {len(data)}")
    stage, sender_code, kind_code, payload_len = _HEADER.unpack_from(data)
    if sender_code not in _CODE_SENDER:
        raise MessageDecodeError("sender", f"unknown sender code {sender_code}")
    try:
        kind = MessageKind(kind_code)
    except ValueError:
        raise MessageDecodeError("kind", f"unknown kind code {kind_code}") from None
    payload = data[_HEADER.size :]
    if len(payload) != payload_len:
        raise MessageDecodeError(
            "payload_len", f"declares {payload_len} bytes, got {len(payload)}"
        )
    sender = _CODE_SENDER[sender_code]

    if kind is MessageKind.PROPOSE:
        if payload_len != 1:
            raise MessageDecodeError("share_count", "PROPOSE payload must be 1 byte")
        return ProtocolMessage(stage, sender, kind, share_count=payload[0])
    if kind is MessageKind.ASK_FAVOR:
        if payload_len < 4:
            raise MessageDecodeError("favor", "ASK_FAVOR payload truncated")
        try:
            favor_type = FavorType(payload[0])
        except ValueError:
            raise MessageDecodeError("favor_type", f"unknown favor type {payload[0]}") from None
        n_ccs = payload[1]
        if payload_len != 2 + n_ccs + 2:
            raise MessageDecodeError("cc_set", f"expected {n_ccs} CC bytes plus duration")
        ccs = list(payload[2 : 2 + n_ccs])
        if any(b >= a for a, b in zip(ccs[1:], ccs)):
            raise MessageDecodeError("cc_set", "CC indices must be strictly ascending")
        if n_ccs == 0:
            raise MessageDecodeError("cc_set", "favor must name at least one CC")
        (duration,) = struct.unpack_from("<H", payload, 2 + n_ccs)
        if duration < 1:
            raise MessageDecodeError("duration_stages", "must be >= 1")
        favor = FavorDescriptor(favor_type, frozenset(ccs), duration)
        return ProtocolMessage(stage, sender, kind, favor=favor)
    if payload_len != 0:
        raise MessageDecodeError("payload_len", f"{kind.name} carries no payload")
    return ProtocolMessage(stage, sender, kind)


@dataclass(frozen=True)
class ActiveFavor:
    beneficiary: Operator
    favor: FavorDescriptor
    granted_stage: int
    expiry_stage: int  # first stage at which the favor no longer applies

    def active_at(self, stage: int) -> bool:
        return self.granted_stage <= stage < self.expiry_stage


@dataclass
class FavorLedger:
    """Signed running favor-unit balance plus active-favor bookkeeping.

    ``window_stages`` limits how far back granted favors count toward the
    balance (None means infinitely patient operators, the default).
    """

    window_stages: int | None = None
    active_favors: list[ActiveFavor] = field(default_factory=list)
    history: list[tuple[int, Operator, int]] = field(default_factory=list)  # stage, beneficiary, units

    def record_grant(self, stage: int, beneficiary: Operator, favor: FavorDescriptor) -> None:
        self.active_favors.append(
            ActiveFavor(beneficiary, favor, stage, stage + favor.duration_stages)
        )
        self.history.append((stage, beneficiary, favor.units))

    def balance(self, at_stage: int | None = None) -> int:
        """Net units from A's perspective: positive means A owes B."""
        total = 0
        for stage, beneficiary, units in self.history:
            if (
                self.window_stages is not None
                and at_stage is not None
                and stage <= at_stage - self.window_stages
            ):
                continue
            total += units if beneficiary is Operator.A else -units
        return total

    def balance_for(self, op: Operator, at_stage: int | None = None) -> int:
        b = self.balance(at_stage)
        return b if op is Operator.A else -b

    def debt(self, op: Operator, at_stage: int | None = None) -> int:
        """Signed debt of ``op``; positive when op owes its opponent."""
        return self.balance_for(op, at_stage)

    def favors_active_at(self, stage: int) -> list[ActiveFavor]:
        return [f for f in self.active_favors if f.active_at(stage)]


def expire_favors(ledger: FavorLedger, current_stage: int) -> tuple[FavorLedger, bool]:
    """Drop favors whose validity ended; report whether spectrum must revert.

    Removal happens exactly at expiry: a favor granted at stage t with
    duration d is gone once current_stage reaches t + d. The unit balance
    is untouched; reciprocity accounting outlives the spectrum state.
    """
    due = [f for f in ledger.active_favors if f.expiry_stage <= current_stage]
    ledger.active_favors = [f for f in ledger.active_favors if f.expiry_stage > current_stage]
    return ledger, bool(due)


def has_exclusively(outcome: SpectrumOutcome, op: Operator, cc: int) -> bool:
    return cc in outcome.usable[op] and cc not in outcome.usable[op.opponent]


def favor_is_legal(
    outcome: SpectrumOutcome,
    asker: Operator,
    favor: FavorDescriptor,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> bool:
    """Favors may touch only contributed CCs the asker does not already hold."""
    pool = set(plan.shared_pool())
    for cc in favor.ccs:
        if cc not in pool:
            return False
        if has_exclusively(outcome, asker, cc):
            return False
        if favor.favor_type is FavorType.JOINT_USE and cc in outcome.usable[asker]:
            return False
    return True


def apply_favor(
    outcome: SpectrumOutcome,
    beneficiary: Operator,
    favor: FavorDescriptor,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> SpectrumOutcome:
    """Transform an outcome by one granted favor."""
    if not favor_is_legal(outcome, beneficiary, favor, plan):
        raise ProtocolViolation(f"illegal favor {favor.compact()} for {beneficiary.value}")
    usable = {op: set(outcome.usable[op]) for op in OPERATORS}
    exclusive = dict(outcome.exclusive)
    granter = beneficiary.opponent
    usable[beneficiary].update(favor.ccs)
    if favor.favor_type is FavorType.EXCLUSIVE_USE:
        usable[granter].difference_update(favor.ccs)
        for cc in favor.ccs:
            exclusive[cc] = beneficiary
    out = SpectrumOutcome(
        usable={op: frozenset(s) for op, s in usable.items()}, exclusive=exclusive
    )
    out.validate(plan)
    return out


def apply_active_favors(
    outcome: SpectrumOutcome,
    ledger: FavorLedger,
    stage: int,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> SpectrumOutcome:
    """Re-impose favors still valid at this stage onto a fresh base outcome."""
    for f in ledger.favors_active_at(stage):
        if favor_is_legal(outcome, f.beneficiary, f.favor, plan):
            outcome = apply_favor(outcome, f.beneficiary, f.favor, plan)
    return outcome


def resolve_minimum_rule(
    proposal_a: int,
    proposal_b: int,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> tuple[int, SpectrumOutcome]:
    """One-shot resolution: the least willing operator sets the sharing level."""
    budgets = {Operator.A: proposal_a, Operator.B: proposal_b}
    for op, p in budgets.items():
        limit = len(plan.contributed_by(op))
        if not (0 <= p <= limit):
            raise ProtocolViolation(
                f"proposal {p} of operator {op.value} outside contributed budget [0, {limit}]"
            )
    shared = min(proposal_a, proposal_b)
    if shared == 0:
        return 0, fallback_outcome(plan)
    return shared, joint_outcome(plan, shared)


def resolve_favor_round(
    ask_a: FavorDescriptor | None,
    ask_b: FavorDescriptor | None,
    grant_a: bool | None,
    grant_b: bool | None,
    base: SpectrumOutcome,
    ledger: FavorLedger,
    stage: int,
    plan: CarrierPlan = DEFAULT_PLAN,
) -> tuple[SpectrumOutcome, FavorLedger, Operator | None]:
    """Resolve one ask/grant exchange on top of a base outcome.

    When both operators ask in the same stage nothing happens. A grant
    decision without a matching ask is a protocol violation; grants are
    voluntary, so a None/False decision leaves the base outcome intact.
    Returns the final outcome, the ledger and the granter (if any).
    """
    if ask_a is None and grant_b:
        raise ProtocolViolation("grant by B without an ask from A")
    if ask_b is None and grant_a:
        raise ProtocolViolation("grant by A without an ask from B")
    if ask_a is not None and ask_b is not None:
        return base, ledger, None
    if ask_a is not None:
        if not favor_is_legal(base, Operator.A, ask_a, plan):
            raise ProtocolViolation(f"illegal ask {ask_a.compact()} by A")
        if grant_b:
            final = apply_favor(base, Operator.A, ask_a, plan)
            ledger.record_grant(stage, Operator.A, ask_a)
            return final, ledger, Operator.B
        return base, ledger, None
    if ask_b is not None:
        if not favor_is_legal(base, Operator.B, ask_b, plan):
            raise ProtocolViolation(f"illegal ask {ask_b.compact()} by B")
        if grant_a:
            final = apply_favor(base, Operator.B, ask_b, plan)
            ledger.record_grant(stage, Operator.B, ask_b)
            return final, ledger, Operator.A
        return base, ledger, None
    return base, ledger, None


@dataclass(frozen=True)
class GameOutcomeRecord:
    stage_index: int
    one_shot_label: str
    final_label: str
    messages: tuple[ProtocolMessage, ...]
