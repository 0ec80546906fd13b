"""Exact maximization over all orthogonal coding schemes of a small config.

Depth-first search over per-message position subsets, with incremental
conflict checking and the standard optimistic bound (current bits plus
positions that could still be added).  This is the independent ground
truth against which the closed-form achievable rate and the explicit
scheme builder are judged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .ldm import (
    MESSAGES,
    LdmConfig,
    LdmScheme,
    Model,
    RegimeError,
)

# Strong users before weak, cell 1 before cell 2: strong branches prune earliest.
SEARCH_ORDER: Tuple[Tuple[int, int], ...] = ((1, 1), (2, 1), (1, 2), (2, 2))

DEFAULT_NODE_BUDGET = 20_000_000

_PRACTICAL_POSITION_LIMIT = 40


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    witness: LdmScheme
    nodes_explored: int
    exact: bool  # False only when the node budget ran out (optimum is then a lower bound)


class _Budget(Exception):
    pass


@dataclass
class _Item:
    msg: Tuple[int, int]
    position: int
    home_rx: int          # receiving cell
    home_bit: int         # 1 << home height
    foreign_rx: int       # 0 when invisible abroad
    foreign_bit: int
    foreign_h: int
    tx: int               # sending cell (BC position-disjointness)
    tx_bit: int


def _build_items(config: LdmConfig) -> List[_Item]:
    items: List[_Item] = []
    for msg in SEARCH_ORDER:
        cell, user = msg
        other = 2 if cell == 1 else 1
        limit = config.direct_gain(cell, user)
        # Interference caused by this cell lands in the other one.
        foreign_gain = config.interference_gain(other)
        for p in range(1, limit + 1):  # most significant first
            home_h = config.direct_gain(cell, user) - p + 1
            fh = foreign_gain - p + 1
            items.append(_Item(
                msg=msg,
                position=p,
                home_rx=cell,
                home_bit=1 << home_h,
                foreign_rx=other if fh >= 1 else 0,
                foreign_bit=(1 << fh) if fh >= 1 else 0,
                foreign_h=fh if fh >= 1 else 0,
                tx=cell,
                tx_bit=1 << p,
            ))
    return items


def solve(config: LdmConfig, node_budget: int = DEFAULT_NODE_BUDGET) -> OracleResult:
    """Maximum total bits over all decodable orthogonal schemes, with witness.

    Deterministic: positions are explored most-significant-first in a fixed
    message order, excluding before including, so the reported witness is
    the first optimal scheme in that canonical order.  A greedy first dive
    seeds the incumbent.  If the node budget runs out the best value found
    so far is returned with ``exact=False``.
    """
    probs = config.structural_problems()
    if probs:
        raise RegimeError("; ".join(probs))
    if node_budget < 1:
        raise ValueError("node_budget must be >= 1")
    total_positions = sum(config.direct_gain(c, u) for c, u in MESSAGES)
    if total_positions > _PRACTICAL_POSITION_LIMIT:
        raise ValueError(
            f"{total_positions} candidate positions exceed the practical "
            f"exactness bound of {_PRACTICAL_POSITION_LIMIT}"
        )

    items = _build_items(config)
    n_items = len(items)
    is_ibc = config.model is Model.IBC

    # Occupancy state, one bitmask per cell: heights carrying wanted bits,
    # heights carrying foreign bits, and (BC only) sender positions in use.
    # Foreign heights are reference-counted: aligned interference means two
    # live bits can share one foreign height, and undoing one of them must
    # not free the height for wanted use while the other remains.
    home = [0, 0, 0]
    foreign = [0, 0, 0]
    tx_used = [0, 0, 0]
    qbits = config.q + 2
    foreign_cnt = [[0] * qbits, [0] * qbits, [0] * qbits]

    def _foreign_add(rx: int, height_bit: int, height: int) -> None:
        if foreign_cnt[rx][height] == 0:
            foreign[rx] |= height_bit
        foreign_cnt[rx][height] += 1

    def _foreign_remove(rx: int, height_bit: int, height: int) -> None:
        foreign_cnt[rx][height] -= 1
        if foreign_cnt[rx][height] == 0:
            foreign[rx] &= ~height_bit

    if is_ibc:
        # Per-message wanted heights; the co-message of the same sender may
        # collide with interference, so it is not protected.
        wanted: Dict[Tuple[int, int], int] = {msg: 0 for msg in MESSAGES}

        def feasible(it: _Item) -> bool:
            if tx_used[it.tx] & it.tx_bit:
                return False
            if wanted[it.msg] & it.home_bit:
                return False
            if foreign[it.home_rx] & it.home_bit:
                return False
            if it.foreign_rx:
                # The same sent bit appears at both receivers of the other
                # cell at the same height; it must miss wanted bits at each.
                j = it.foreign_rx
                if (wanted[(j, 1)] | wanted[(j, 2)]) & it.foreign_bit:
                    return False
            return True

        def apply(it: _Item) -> None:
            tx_used[it.tx] |= it.tx_bit
            wanted[it.msg] |= it.home_bit
            if it.foreign_rx:
                _foreign_add(it.foreign_rx, it.foreign_bit, it.foreign_h)

        def undo(it: _Item) -> None:
            tx_used[it.tx] &= ~it.tx_bit
            wanted[it.msg] &= ~it.home_bit
            if it.foreign_rx:
                _foreign_remove(it.foreign_rx, it.foreign_bit, it.foreign_h)
    else:
        def feasible(it: _Item) -> bool:
            rx = it.home_rx
            if (home[rx] | foreign[rx]) & it.home_bit:
                return False
            if it.foreign_rx and home[it.foreign_rx] & it.foreign_bit:
                return False
            return True

        def apply(it: _Item) -> None:
            home[it.home_rx] |= it.home_bit
            if it.foreign_rx:
                _foreign_add(it.foreign_rx, it.foreign_bit, it.foreign_h)

        def undo(it: _Item) -> None:
            home[it.home_rx] &= ~it.home_bit
            if it.foreign_rx:
                _foreign_remove(it.foreign_rx, it.foreign_bit, it.foreign_h)

    nodes = 0
    exact = True

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _Budget

    # Greedy dive: include every feasible position in canonical order.
    dive_taken: List[_Item] = []
    try:
        for it in items:
            tick()
            if feasible(it):
                apply(it)
                dive_taken.append(it)
    except _Budget:
        exact = False
    dive_alloc = {msg: frozenset(it.position for it in dive_taken if it.msg == msg)
                  for msg in MESSAGES}
    dive_value = len(dive_taken)
    for it in reversed(dive_taken):
        undo(it)

    best_value = dive_value - 1  # lets the main walk re-find a dive-sized scheme
    best_alloc: Optional[Dict[Tuple[int, int], FrozenSet[int]]] = None
    chosen: List[_Item] = []

    def remaining_upper(idx: int) -> int:
        n = 0
        for k in range(idx, n_items):
            if feasible(items[k]):
                n += 1
        return n

    def walk(idx: int, bits: int) -> None:
        nonlocal best_value, best_alloc
        tick()
        if bits + remaining_upper(idx) <= best_value:
            return
        if idx == n_items:
            best_value = bits
            best_alloc = {msg: frozenset(it.position for it in chosen if it.msg == msg)
                          for msg in MESSAGES}
            return
        it = items[idx]
        walk(idx + 1, bits)  # exclude first: earliest positions stay out longest
        if feasible(it):
            apply(it)
            chosen.append(it)
            walk(idx + 1, bits + 1)
            chosen.pop()
            undo(it)

    if exact:
        try:
            walk(0, 0)
        except _Budget:
            exact = False

    if best_alloc is None:
        best_alloc = dive_alloc
        best_value = dive_value

    witness = LdmScheme(config, best_alloc)
    return OracleResult(optimum=best_value, witness=witness,
                        nodes_explored=nodes, exact=exact)


def valid_configs(n_max: int, model: Model = Model.IMAC) -> Iterable[LdmConfig]:
    """Every weak-interference config with all gains <= ``n_max``."""
    for n11 in range(1, n_max + 1):
        for n12 in range(1, n11 + 1):
            for n21 in range(1, n_max + 1):
                for n22 in range(1, n21 + 1):
                    for m1 in range(0, n_max + 1):
                        for m2 in range(0, n_max + 1):
                            cfg = LdmConfig(model, n11, n12, n21, n22, m1, m2)
                            if not cfg.problems():
                                yield cfg


@dataclass(frozen=True)
class GridEntry:
    config: LdmConfig
    formula: int
    oracle: int
    match: bool


def grid_compare(n_max: int, node_budget: int = DEFAULT_NODE_BUDGET) -> List[GridEntry]:
    """Formula vs exact optimum on the full grid of configs with gains <= n_max.

    The formula must never exceed the optimum (soundness); entries where it
    falls strictly below are the interesting fixtures.
    """
    from .rates import achievable_value

    if n_max > 7:
        raise ValueError("full enumeration is practical only for n_max <= 7")
    out: List[GridEntry] = []
    for cfg in valid_configs(n_max):
        formula = achievable_value(cfg)
        result = solve(cfg, node_budget)
        out.append(GridEntry(cfg, formula, result.optimum, formula == result.optimum))
    return out
