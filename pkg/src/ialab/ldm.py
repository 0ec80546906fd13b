"""Exact bit-level model of the two-cell interfering MAC / BC.

Signals are bit vectors, channel gains shift them down toward the noise
floor, and superposition is addition over GF(2).  Everything here is
integer-exact: decodability and the end-to-end check are zero-error
statements, not approximations.

Conventions
-----------
Positions count from the most significant usable level of each sender,
``p = 1`` being the top bit.  A bit sent at position ``p`` through a gain
``g`` appears at *height* ``g - p + 1`` above the receiver noise floor;
heights <= 0 are truncated away.  Two senders with equal gain into a
receiver therefore collide exactly when they use the same position, which
is what makes alignment a statement about positions alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

Message = Tuple[int, int]  # (cell, user); user 1 is the strong one
Receiver = Tuple[int, int]  # (cell, 0) for a joint MAC receiver, (cell, k) dedicated

MESSAGES: Tuple[Message, ...] = ((1, 1), (1, 2), (2, 1), (2, 2))


class Model(str, Enum):
    IMAC = "imac"
    IBC = "ibc"


class RegimeError(ValueError):
    """Channel parameters outside the supported weak-interference regime."""


@dataclass(frozen=True)
class LdmConfig:
    """Integer bit-level gains of the deterministic two-cell channel.

    ``n11 >= n12`` and ``n21 >= n22`` are the direct gains of cells 1 and 2
    (strong user first).  ``m1`` / ``m2`` are the interference gains
    *received* in cell 1 / cell 2; both interfering senders of the other
    cell arrive with the same gain.
    """

    model: Model
    n11: int
    n12: int
    n21: int
    n22: int
    m1: int
    m2: int

    @property
    def q(self) -> int:
        """Vector length: the largest direct gain."""
        return max(self.n11, self.n21)

    def direct_gain(self, cell: int, user: int) -> int:
        return {(1, 1): self.n11, (1, 2): self.n12,
                (2, 1): self.n21, (2, 2): self.n22}[(cell, user)]

    def interference_gain(self, cell: int) -> int:
        """Gain at which the other cell's signals arrive in ``cell``."""
        return self.m1 if cell == 1 else self.m2

    def structural_problems(self) -> List[str]:
        out = []
        for name in ("n11", "n12", "n21", "n22", "m1", "m2"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be nonnegative")
        if self.n11 < self.n12:
            out.append("n11 < n12: strong user of cell 1 must come first")
        if self.n21 < self.n22:
            out.append("n21 < n22: strong user of cell 2 must come first")
        if max(self.m1, self.m2) > self.q:
            out.append("interference gain exceeds the vector length q")
        return out

    def problems(self) -> List[str]:
        """Weak-interference regime violations (empty list when valid).

        Interference must stay below half the strong signal on its own
        scale and strictly below the weak direct signal it competes with;
        at equality the multi-user structure degenerates to a plain
        interference channel and is rejected.  The MAC and BC orientations
        pair the inequalities with opposite cells (they are channel
        transposes of one another).
        """
        out = self.structural_problems()
        if out:
            return out
        if self.model is Model.IMAC:
            if 2 * self.m1 > self.n21:
                out.append("2*m1 > n21: interference into cell 1 above half strength")
            if 2 * self.m2 > self.n11:
                out.append("2*m2 > n11: interference into cell 2 above half strength")
            if self.m1 >= self.n12:
                out.append("m1 >= n12: interference not below the weak user of cell 1")
            if self.m2 >= self.n22:
                out.append("m2 >= n22: interference not below the weak user of cell 2")
        else:
            if 2 * self.m1 > self.n11:
                out.append("2*m1 > n11: interference into cell 1 above half strength")
            if 2 * self.m2 > self.n21:
                out.append("2*m2 > n21: interference into cell 2 above half strength")
            if self.m1 >= self.n22:
                out.append("m1 >= n22: interference into cell 1 not below the dual weak link")
            if self.m2 >= self.n12:
                out.append("m2 >= n12: interference into cell 2 not below the dual weak link")
        return out

    def validated(self) -> "LdmConfig":
        probs = self.problems()
        if probs:
            raise RegimeError("; ".join(probs))
        return self

    def dual(self) -> "LdmConfig":
        """The transposed channel: MAC <-> BC with interference gains swapped.

        Transposing the channel matrix turns the link "cell-2 senders into
        receiver 1, gain m1" into "sender 1 into cell-2 receivers, gain m1",
        so the per-cell received-interference fields trade places.
        """
        other = Model.IBC if self.model is Model.IMAC else Model.IMAC
        return replace(self, model=other, m1=self.m2, m2=self.m1)


def receive_height(gain: int, position: int) -> int:
    """Height above the noise floor of a bit sent at ``position`` via ``gain``.

    Heights <= 0 mean the bit is truncated below the noise floor.
    """
    if gain < 0:
        raise ValueError("gain must be nonnegative")
    if position < 1:
        raise ValueError("positions start at 1")
    return gain - position + 1


def receivers(config: LdmConfig) -> Tuple[Receiver, ...]:
    if config.model is Model.IMAC:
        return ((1, 0), (2, 0))
    return ((1, 1), (1, 2), (2, 1), (2, 2))


def wanted_messages(config: LdmConfig, receiver: Receiver) -> Tuple[Message, ...]:
    cell, user = receiver
    if config.model is Model.IMAC:
        return ((cell, 1), (cell, 2))
    return ((cell, user),)


def incoming_gains(config: LdmConfig, receiver: Receiver) -> Tuple[Tuple[Message, int], ...]:
    """All (message, gain) pairs visible at a receiver, wanted or not."""
    cell, user = receiver
    other = 2 if cell == 1 else 1
    m = config.interference_gain(cell)
    if config.model is Model.IMAC:
        return (
            ((cell, 1), config.direct_gain(cell, 1)),
            ((cell, 2), config.direct_gain(cell, 2)),
            ((other, 1), m),
            ((other, 2), m),
        )
    g = config.direct_gain(cell, user)
    # Both messages of the home sender share its physical signal, so co-cell
    # bits arrive through the gain of *this* receiver's link.
    return (
        ((cell, 1), g),
        ((cell, 2), g),
        ((other, 1), m),
        ((other, 2), m),
    )


@dataclass(frozen=True)
class LdmScheme:
    """Per-message transmit-position allocations (orthogonal coding).

    Every allocated position carries one independent bit.  For the MAC
    orientation each message has its own sender; for the BC orientation the
    two messages of a cell share one sender and must use disjoint positions.
    """

    config: LdmConfig
    alloc: Mapping[Message, FrozenSet[int]]

    def __post_init__(self):
        norm = {msg: frozenset(self.alloc.get(msg, frozenset())) for msg in MESSAGES}
        object.__setattr__(self, "alloc", norm)
        for msg, positions in norm.items():
            cell, user = msg
            limit = self.config.direct_gain(cell, user)
            for p in positions:
                if p < 1:
                    raise ValueError(f"message {msg}: position {p} < 1")
                if p > limit:
                    raise ValueError(
                        f"message {msg}: position {p} below the home noise floor "
                        f"(limit {limit})"
                    )
        if self.config.model is Model.IBC:
            for cell in (1, 2):
                shared = norm[(cell, 1)] & norm[(cell, 2)]
                if shared:
                    raise ValueError(
                        f"sender {cell}: messages overlap at positions {sorted(shared)}"
                    )

    @property
    def total_bits(self) -> int:
        return sum(len(v) for v in self.alloc.values())

    def positions(self, msg: Message) -> Tuple[int, ...]:
        return tuple(sorted(self.alloc[msg]))


@dataclass(frozen=True)
class LevelVector:
    """Received bit vector; index 0 is the most significant level."""

    bits: Tuple[int, ...]

    @classmethod
    def zeros(cls, q: int) -> "LevelVector":
        return cls(tuple([0] * q))

    def __len__(self) -> int:
        return len(self.bits)

    def bit_at_height(self, height: int) -> int:
        """Bit at ``height`` above the noise floor (height 1 = last level)."""
        if not 1 <= height <= len(self.bits):
            raise IndexError(f"height {height} outside 1..{len(self.bits)}")
        return self.bits[len(self.bits) - height]

    def __xor__(self, other: "LevelVector") -> "LevelVector":
        if len(self.bits) != len(other.bits):
            raise ValueError("length mismatch")
        return LevelVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    @property
    def weight(self) -> int:
        return sum(self.bits)


Payload = Mapping[Message, Mapping[int, int]]


def random_payload(scheme: LdmScheme, rng: random.Random) -> Dict[Message, Dict[int, int]]:
    """One uniform random bit per allocated position, in deterministic order."""
    out: Dict[Message, Dict[int, int]] = {}
    for msg in MESSAGES:
        out[msg] = {p: rng.getrandbits(1) for p in scheme.positions(msg)}
    return out


def _check_payload(scheme: LdmScheme, payload: Payload) -> None:
    for msg in MESSAGES:
        got = set(payload.get(msg, {}))
        want = set(scheme.alloc[msg])
        if got != want:
            raise ValueError(f"payload for {msg} covers {sorted(got)}, allocation is {sorted(want)}")


def transmit(scheme: LdmScheme, payload: Payload) -> Dict[Receiver, LevelVector]:
    """GF(2) superposition of every visible bit at every receiver."""
    _check_payload(scheme, payload)
    cfg = scheme.config
    q = cfg.q
    out: Dict[Receiver, LevelVector] = {}
    for rx in receivers(cfg):
        acc = [0] * q
        for msg, gain in incoming_gains(cfg, rx):
            bits = payload.get(msg, {})
            for p in scheme.positions(msg):
                h = receive_height(gain, p)
                if h >= 1:
                    acc[q - h] ^= bits[p]
        out[rx] = LevelVector(tuple(acc))
    return out


@dataclass(frozen=True)
class Conflict:
    receiver: Receiver
    height: int
    members: Tuple[Tuple[Message, int], ...]  # (message, position) pairs sharing the height

    def __str__(self) -> str:
        cell, user = self.receiver
        rx = f"rx{cell}" if user == 0 else f"rx{cell}.{user}"
        who = ", ".join(f"({i},{k})@p{p}" for (i, k), p in self.members)
        return f"{rx} height {self.height}: {who}"


@dataclass(frozen=True)
class DecodabilityReport:
    ok: bool
    conflicts: Tuple[Conflict, ...]


def verify_decodable(scheme: LdmScheme) -> DecodabilityReport:
    """Check that every wanted bit arrives alone on its height.

    Collisions among interference bits are harmless (they land on heights
    that the receiver never reads); in the BC orientation the foreign
    signal may additionally collide with bits meant for the co-receiver of
    the same cell.  Any bit sharing a height with a *wanted* bit is a
    conflict, reported per (receiver, height).
    """
    cfg = scheme.config
    conflicts: List[Conflict] = []
    for rx in receivers(cfg):
        wanted = set(wanted_messages(cfg, rx))
        by_height: Dict[int, List[Tuple[Message, int]]] = {}
        for msg, gain in incoming_gains(cfg, rx):
            for p in scheme.positions(msg):
                h = receive_height(gain, p)
                if h >= 1:
                    by_height.setdefault(h, []).append((msg, p))
        for h in sorted(by_height):
            members = by_height[h]
            if len(members) < 2:
                continue
            if any(msg in wanted for msg, _ in members):
                conflicts.append(Conflict(rx, h, tuple(members)))
    return DecodabilityReport(ok=not conflicts, conflicts=tuple(conflicts))


def end_to_end_check(scheme: LdmScheme, trials: int, seed: int = 0) -> bool:
    """Randomized confirmation of zero-error decoding.

    Draws random payloads, runs the channel, and re-reads every wanted bit
    top-down with subtraction of already-decoded bits.  The model is
    noiseless, so any miss indicates a bug rather than bad luck.
    """
    report = verify_decodable(scheme)
    if not report.ok:
        raise ValueError("scheme fails verify_decodable; end-to-end check is undefined")
    cfg = scheme.config
    q = cfg.q
    rng = random.Random(seed)
    # Precompute (message, position, height) read lists per receiver.
    read_plan: Dict[Receiver, List[Tuple[Message, int, int]]] = {}
    for rx in receivers(cfg):
        plan = []
        gains = dict(incoming_gains(cfg, rx))
        for msg in wanted_messages(cfg, rx):
            for p in scheme.positions(msg):
                plan.append((msg, p, receive_height(gains[msg], p)))
        plan.sort(key=lambda t: -t[2])
        read_plan[rx] = plan
    for _ in range(max(0, trials)):
        payload = random_payload(scheme, rng)
        vectors = transmit(scheme, payload)
        for rx, plan in read_plan.items():
            work = list(vectors[rx].bits)
            for msg, p, h in plan:
                got = work[q - h]
                if got != payload[msg][p]:
                    return False
                work[q - h] ^= got
    return True
