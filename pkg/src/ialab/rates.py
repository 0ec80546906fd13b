"""Closed-form sum rates for the deterministic two-cell channel.

Holds the half-interference upper bound, the alignment-gain function
``phi``, the achievable sum-rate formula, an explicit scheme builder that
realizes the formula value bit for bit, and the MAC -> BC scheme
transposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .ldm import (
    MESSAGES,
    LdmConfig,
    LdmScheme,
    Model,
    RegimeError,
    verify_decodable,
)

_FLOOR_TOL = 1e-9


class ConstructionError(RuntimeError):
    """The scheme builder missed the formula value (implementation bug)."""


class DualizationError(RuntimeError):
    """A scheme could not be transposed into the other orientation."""


def _tol_floor(x: float) -> int:
    """Floor with a small forgiveness band for float noise just below integers."""
    return math.floor(x + _FLOOR_TOL)


def phi(p, q):
    """Alignment gain of interference strength ``p`` against a gain gap ``q``.

    Piecewise in ``l = floor(p/q)`` (with ``l = 0`` when ``q = 0``): the even
    branch returns ``q + l*q/2``, the odd branch ``p - (l-1)*q/2``.  Exact on
    integers; accepts reals because the Gaussian closed form applies it to
    log-powers.
    """
    if p < 0 or q < 0:
        raise ValueError("phi is defined for nonnegative arguments")
    if isinstance(p, int) and isinstance(q, int):
        if q == 0:
            return 0
        l = p // q
        if l % 2 == 0:
            return q + (l // 2) * q
        return p - ((l - 1) // 2) * q
    p = float(p)
    q = float(q)
    if q == 0.0:
        return 0.0
    l = _tol_floor(p / q)
    if l % 2 == 0:
        return q + l * q / 2.0
    return p - (l - 1) * q / 2.0


def upper_bound(config: LdmConfig) -> float:
    """Sum-rate cap: each cell's interference footprint counts only half."""
    config.validated()
    return config.n11 + config.n21 - (config.m1 + config.m2) / 2.0


def _imac_value(config: LdmConfig) -> int:
    d1 = config.n11 - config.n12
    d2 = config.n21 - config.n22
    return (config.n12 + config.n22 - config.m1 - config.m2
            + phi(config.m2, d1) + phi(config.m1, d2))


def achievable_value(config: LdmConfig) -> int:
    """Achievable sum rate in bit levels (formula value, no scheme).

    Each cell contributes its weak gain minus its caused interference plus
    the alignment gain of that interference against the cell's own gain
    gap.  The BC orientation is the channel transpose of the MAC one, so it
    evaluates through its dual.
    """
    config.validated()
    if config.model is Model.IMAC:
        return _imac_value(config)
    return _imac_value(config.dual())


@dataclass(frozen=True)
class LdmRateReport:
    upper_bound: float
    achievable: int
    delta1: int
    delta2: int
    phi1: int
    phi2: int
    scheme: LdmScheme


def achievable_sum_rate(config: LdmConfig) -> LdmRateReport:
    """Formula value plus a concrete scheme with exactly that many bits."""
    config.validated()
    imac_cfg = config if config.model is Model.IMAC else config.dual()
    d1 = imac_cfg.n11 - imac_cfg.n12
    d2 = imac_cfg.n21 - imac_cfg.n22
    scheme = construct_scheme(imac_cfg)
    if config.model is Model.IBC:
        scheme = dualize_to_ibc(scheme)
    return LdmRateReport(
        upper_bound=upper_bound(config),
        achievable=achievable_value(config),
        delta1=d1,
        delta2=d2,
        phi1=phi(imac_cfg.m2, d1),
        phi2=phi(imac_cfg.m1, d2),
        scheme=scheme,
    )


# ---------------------------------------------------------------------------
# Scheme construction
# ---------------------------------------------------------------------------

def _aligned_layers_full(window: int, delta: int) -> FrozenSet[int]:
    """Odd width-``delta`` layers of the window, counted from the top.

    Both users transmit on these positions; skipping every other layer keeps
    the strong bits of one layer off the weak bits of the previous one.
    """
    if delta <= 0 or window <= 0:
        return frozenset()
    full = window // delta
    out: List[int] = []
    for t in range(1, full + 1):
        if t % 2 == 1:
            out.extend(range((t - 1) * delta + 1, t * delta + 1))
    return frozenset(out)


def _aligned_layers_partial(window: int, delta: int) -> FrozenSet[int]:
    """Variant for windows with a trailing partial layer.

    When the layer count is odd the final aligned block is shortened to the
    remainder width (its top), trading the full last layer for one that
    never dips below the private region.
    """
    if delta <= 0 or window <= 0:
        return frozenset()
    full = window // delta
    rem = window - full * delta
    if full % 2 == 0:
        return _aligned_layers_full(window, delta)
    out: List[int] = []
    for t in range(1, full, 2):
        out.extend(range((t - 1) * delta + 1, t * delta + 1))
    start = (full - 1) * delta
    out.extend(range(start + 1, start + rem + 1))
    return frozenset(out)


def _candidate_windows(config: LdmConfig) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    w1, w2 = config.m2, config.m1  # window of a cell = interference it causes
    d1 = config.n11 - config.n12
    d2 = config.n21 - config.n22
    v1a = _aligned_layers_full(w1, d1)
    v1b = _aligned_layers_partial(w1, d1)
    v2a = _aligned_layers_full(w2, d2)
    v2b = _aligned_layers_partial(w2, d2)
    empty: FrozenSet[int] = frozenset()
    pairs = [
        (v1a, v2a), (v1b, v2b), (v1a, v2b), (v1b, v2a),
        (v1a, empty), (empty, v2a), (v1b, empty), (empty, v2b),
        (empty, empty),
    ]
    seen = set()
    out = []
    for pair in pairs:
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return out


def _realize(config: LdmConfig, doubles1: FrozenSet[int], doubles2: FrozenSet[int],
             target: int) -> Optional[LdmScheme]:
    """Build a scheme from per-cell aligned windows plus greedy private fill.

    Aligned bits whose home height is burned by the other cell's footprint
    are dropped, to a fixpoint (dropping bits can free foreign heights, so
    the burn sets are recomputed until stable).  Remaining free heights at
    or below the private line are filled by the strong user.  Returns None
    if the result misses ``target``.
    """
    a = {1: config.n11, 2: config.n21}
    b = {1: config.n12, 2: config.n22}
    w = {1: config.m2, 2: config.m1}
    z = {1: config.m1, 2: config.m2}

    strong = {1: set(doubles1), 2: set(doubles2)}
    weak = {1: {p for p in doubles1 if p <= b[1]}, 2: {p for p in doubles2 if p <= b[2]}}

    while True:
        used = {i: strong[i] | weak[i] for i in (1, 2)}
        burned = {
            1: {z[1] - p + 1 for p in used[2]},
            2: {z[2] - p + 1 for p in used[1]},
        }
        changed = False
        for i in (1, 2):
            for p in sorted(strong[i]):
                if a[i] - p + 1 in burned[i]:
                    strong[i].discard(p)
                    changed = True
            for p in sorted(weak[i]):
                if b[i] - p + 1 in burned[i]:
                    weak[i].discard(p)
                    changed = True
        if not changed:
            break

    alloc: Dict[Tuple[int, int], Set[int]] = {msg: set() for msg in MESSAGES}
    private_order: List[Tuple[Tuple[int, int], int, int]] = []  # (msg, position, height)
    for i in (1, 2):
        occupied = {a[i] - p + 1 for p in strong[i]} | {b[i] - p + 1 for p in weak[i]}
        if len(occupied) != len(strong[i]) + len(weak[i]):
            return None  # pattern self-collision; try the next candidate
        alloc[(i, 1)] |= strong[i]
        alloc[(i, 2)] |= weak[i]
        for h in range(a[i] - w[i], 0, -1):
            if h in burned[i] or h in occupied:
                continue
            p = a[i] - h + 1
            alloc[(i, 1)].add(p)
            occupied.add(h)
            private_order.append(((i, 1), p, h))

    total = sum(len(v) for v in alloc.values())
    if total > target:
        # Trim surplus private bits, lowest heights first, for determinism.
        for msg, p, _h in sorted(private_order, key=lambda t: t[2]):
            if total == target:
                break
            alloc[msg].discard(p)
            total -= 1
    if total != target:
        return None
    scheme = LdmScheme(config, {msg: frozenset(v) for msg, v in alloc.items()})
    if not verify_decodable(scheme).ok:
        return None
    return scheme


def _from_search(config: LdmConfig, target: int) -> Optional[LdmScheme]:
    """Exact-search fallback: take an optimal witness and trim it to target."""
    from .oracle import solve

    result = solve(config)
    if not result.exact or result.optimum < target:
        return None
    alloc = {msg: set(result.witness.alloc[msg]) for msg in MESSAGES}
    total = sum(len(v) for v in alloc.values())
    for msg in reversed(MESSAGES):
        for p in sorted(alloc[msg], reverse=True):
            if total == target:
                break
            alloc[msg].discard(p)
            total -= 1
    scheme = LdmScheme(config, {msg: frozenset(v) for msg, v in alloc.items()})
    if not verify_decodable(scheme).ok:
        return None
    return scheme


def construct_scheme(config: LdmConfig) -> LdmScheme:
    """Explicit MAC scheme achieving the formula value exactly.

    Per cell, both users align on alternating gain-gap-wide blocks at the
    top of the window the other cell can see, then the strong user fills
    every interference-free home height below the window.  Cross-cell
    collisions are resolved by dropping the burned aligned bits; the count
    works out because every burned height costs exactly one bit somewhere.
    """
    config = config.validated()
    if config.model is not Model.IMAC:
        raise ValueError("construct_scheme builds MAC schemes; transpose BC configs first")
    target = _imac_value(config)
    for d1, d2 in _candidate_windows(config):
        scheme = _realize(config, d1, d2, target)
        if scheme is not None:
            return scheme
    scheme = _from_search(config, target)
    if scheme is not None:
        return scheme
    raise ConstructionError(
        f"no scheme with {target} bits found for {config}; "
        "formula value missed by every construction pattern"
    )


def dualize_to_ibc(scheme: LdmScheme) -> LdmScheme:
    """Transpose a decodable MAC scheme into the BC orientation.

    The two per-user coding vectors of a cell are inverted (position
    ``p -> gain - p + 1``) and merged onto the single BC sender; received
    heights and transmit positions trade places, and the interference
    gains swap cells along with the channel transpose.  Decodability
    carries over exactly, with the same number of bits.
    """
    cfg = scheme.config
    if cfg.model is not Model.IMAC:
        raise ValueError("dualize_to_ibc expects a MAC scheme")
    report = verify_decodable(scheme)
    if not report.ok:
        raise ValueError("dualize_to_ibc expects a decodable scheme")
    dual_cfg = cfg.dual()
    dual_alloc: Dict[Tuple[int, int], FrozenSet[int]] = {}
    for (i, k) in MESSAGES:
        gain = cfg.direct_gain(i, k)
        dual_alloc[(i, k)] = frozenset(gain - p + 1 for p in scheme.alloc[(i, k)])
    for i in (1, 2):
        shared = dual_alloc[(i, 1)] & dual_alloc[(i, 2)]
        if shared:
            raise DualizationError(
                f"sender {i}: merged allocations collide at positions {sorted(shared)}"
            )
    dual = LdmScheme(dual_cfg, dual_alloc)
    dual_report = verify_decodable(dual)
    if not dual_report.ok:
        raise DualizationError(
            "transposed scheme is not decodable: "
            + "; ".join(str(c) for c in dual_report.conflicts)
        )
    return dual
