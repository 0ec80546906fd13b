"""Gaussian-side numerics for the two-cell interference lab.

Power-level partitioning, per-level lattice decoding bounds, the layered
achievable-rate ledger with its closed-form lower bound, the worked
symmetric example, induced bit-level comparisons with constant-gap
budgets, and a seeded scalar-constellation Monte Carlo demonstrator of
signal-scale alignment.

All logarithms are base 2 and all rates are bits per channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ldm import LdmConfig, Model, RegimeError
from .rates import achievable_value, phi, upper_bound

_CEIL_TOL = 1e-9


def _tol_ceil(x: float) -> int:
    """Ceiling that forgives float noise just above integers."""
    r = round(x)
    if abs(x - r) <= _CEIL_TOL:
        return int(r)
    return math.ceil(x)


def _tol_floor(x: float) -> int:
    r = round(x)
    if abs(x - r) <= _CEIL_TOL:
        return int(r)
    return math.floor(x)


@dataclass(frozen=True)
class GaussParams:
    """Two-cell Gaussian channel description.

    Powers are linear ratios (> 1).  ``alpha_i`` is the exponent of the
    interference *received* in cell i (taken over the causing cell's
    power); ``beta_i`` is the weak-user exponent of cell i.  The weak
    interference regime needs ``alpha in [0, 1/2]`` and ``alpha < beta``;
    ``beta = 1`` is rejected (the per-cell gain collapses there).
    """

    model: Model
    p1: float
    p2: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    @property
    def u(self) -> int:
        """Effective sub-level noise multiplier: 4 for the MAC, 2 for the BC."""
        return 4 if self.model is Model.IMAC else 2

    def power(self, cell: int) -> float:
        return self.p1 if cell == 1 else self.p2

    def beta(self, cell: int) -> float:
        return self.beta1 if cell == 1 else self.beta2

    def alpha_received(self, cell: int) -> float:
        return self.alpha1 if cell == 1 else self.alpha2

    def alpha_caused(self, cell: int) -> float:
        """Exponent of the interference this cell creates in the other one."""
        return self.alpha2 if cell == 1 else self.alpha1

    def depth(self, cell: int) -> float:
        """Alignment depth of a cell: caused interference over own gap width."""
        return self.alpha_caused(cell) / (1.0 - self.beta(cell))

    def problems(self) -> List[str]:
        out = []
        for cell in (1, 2):
            p = self.power(cell)
            if not p > 1.0:
                out.append(f"P{cell} must exceed 1")
            b = self.beta(cell)
            a = self.alpha_received(cell)
            if not 0.0 <= a <= 0.5:
                out.append(f"alpha{cell} outside [0, 1/2]")
            if b >= 1.0:
                out.append(f"beta{cell} must be below 1 (gap vanishes at 1)")
            if not a < b:
                out.append(f"alpha{cell} must be strictly below beta{cell}")
        return out

    def validated(self) -> "GaussParams":
        probs = self.problems()
        if probs:
            raise RegimeError("; ".join(probs))
        return self


@dataclass(frozen=True)
class LevelPartition:
    """Descending power-level boundaries of one cell, clamped to 1 at the bottom."""

    cell: int
    boundaries: Tuple[float, ...]  # q_0 = P down to exactly 1
    widths: Tuple[float, ...]      # theta_l = q_{l-1} - q_l
    depth: float                   # alignment depth L for this cell
    floor_depth: int


def partition(params: GaussParams, cell: int) -> LevelPartition:
    """Split a cell's power into levels of exponent width (1 - beta).

    Boundaries are ``q_l = P^(1 - l(1-beta))``; the last one is clamped to
    exactly 1, so a fractional final level is allowed.  These levels play
    the role of the integer bit levels of the deterministic model.
    """
    params.validated()
    p = params.power(cell)
    beta = params.beta(cell)
    gap = 1.0 - beta
    n_levels = _tol_ceil(1.0 / gap)
    bounds = [p]
    for l in range(1, n_levels + 1):
        e = 1.0 - l * gap
        bounds.append(p ** e if e > 0 else 1.0)
    bounds[-1] = 1.0
    widths = tuple(bounds[i - 1] - bounds[i] for i in range(1, len(bounds)))
    depth = params.depth(cell)
    floor_depth = _tol_floor(depth)
    assert floor_depth <= n_levels
    return LevelPartition(cell=cell, boundaries=tuple(bounds), widths=widths,
                          depth=depth, floor_depth=floor_depth)


def decoding_bound(signal_power: float, noise_power: float) -> float:
    """Rate of a good lattice code on one level: positive part of log2(P/N)."""
    if noise_power <= 0:
        raise ValueError("noise power must be positive")
    if signal_power <= noise_power:
        return 0.0
    return math.log2(signal_power / noise_power)


def interference_margin(p: float, alpha: float, u: float, q_l: float) -> float:
    """Direct-path minus interference-path decoding bound for one level.

    Closed form ``log2((P^(1-alpha) + u q_l) / (1 + u q_l))``; nonnegative
    whenever ``alpha <= 1`` and ``P >= 1``, so the interference-path bound
    is always the binding one.
    """
    return math.log2((p ** (1.0 - alpha) + u * q_l) / (1.0 + u * q_l))


def lemma1_margin(params: GaussParams, cell: int, level: int) -> float:
    """``interference_margin`` evaluated on a level of a cell's partition."""
    part = partition(params, cell)
    if not 1 <= level <= len(part.widths):
        raise ValueError(f"level {level} outside 1..{len(part.widths)}")
    return interference_margin(params.power(cell), params.alpha_caused(cell),
                               params.u, part.boundaries[level])


@dataclass(frozen=True)
class RateLayer:
    level: int
    multiplicity: int           # 2 = two aligned sub-signals, 1 = single
    role: str                   # "common", "private_top", or "remainder"
    rate: float                 # bits, already clamped to the positive part
    signal: float               # interference-path signal power behind the rate
    noise: float                # effective noise behind the rate


@dataclass(frozen=True)
class Allocation:
    cell: int
    layers: Tuple[RateLayer, ...]

    @property
    def total(self) -> float:
        return sum(l.multiplicity * l.rate for l in self.layers)

    def common_layers(self) -> Tuple[RateLayer, ...]:
        return tuple(l for l in self.layers if l.role in ("common", "remainder"))


def build_allocation(params: GaussParams, cell: int) -> Allocation:
    """Per-level rate ledger of one cell's layered scheme.

    The top ``floor(L)`` levels form the alignment structure: odd levels
    carry two aligned sub-signals, even levels one, each at the
    interference-path decoding bound (the binding one).  Below it sits the
    private layer, present at full rate whenever the caused interference
    stays under exponent 1/2, plus a remainder layer when ``floor(L)`` is
    odd (the even case cannot reuse the partial level).
    """
    params.validated()
    p = params.power(cell)
    beta = params.beta(cell)
    gap = 1.0 - beta
    u = params.u
    a_caused = params.alpha_caused(cell)
    a_received = params.alpha_received(cell)
    p_other = params.power(2 if cell == 1 else 1)
    depth = params.depth(cell)
    fl = _tol_floor(depth)

    layers: List[RateLayer] = []
    for l in range(1, fl + 1):
        top = p ** (a_caused - (l - 1) * gap)
        bottom = p ** (a_caused - l * gap)
        noise = 1.0 + u * bottom
        layers.append(RateLayer(
            level=l,
            multiplicity=2 if l % 2 == 1 else 1,
            role="common",
            rate=decoding_bound(top - bottom, noise) if top > bottom else 0.0,
            signal=top - bottom,
            noise=noise,
        ))

    inr = p_other ** a_received  # interference floor at this cell's receiver
    private_signal = p ** (1.0 - fl * gap) - inr
    private_noise = 1.0 + u * inr
    private_rate = 0.0
    if a_caused < 0.5 and private_signal > 0:
        private_rate = decoding_bound(private_signal, private_noise)
    layers.append(RateLayer(
        level=fl + 1,
        multiplicity=1,
        role="private_top",
        rate=private_rate,
        signal=max(private_signal, 0.0),
        noise=private_noise,
    ))

    if fl % 2 == 1:
        rem_signal = p ** (a_caused - fl * gap) - 1.0
        rem_noise = 1.0 + u
        layers.append(RateLayer(
            level=fl + 1,
            multiplicity=1,
            role="remainder",
            rate=decoding_bound(rem_signal, rem_noise) if rem_signal > 0 else 0.0,
            signal=max(rem_signal, 0.0),
            noise=rem_noise,
        ))
    return Allocation(cell=cell, layers=tuple(layers))


def theorem1_lower_bound(params: GaussParams) -> float:
    """Closed-form achievable sum rate of the layered aligned scheme.

    Per cell: the weak-user log power minus the caused interference, plus
    the alignment gain ``phi`` of the caused interference against the
    cell's own gap, minus the bookkeeping constants 9 + 6 floor(L) per
    depth.  Deliberately not clamped; small powers can push it negative.
    """
    params.validated()
    total = 0.0
    penalty = 9.0
    for cell in (1, 2):
        lp = math.log2(params.power(cell))
        beta = params.beta(cell)
        a_caused = params.alpha_caused(cell)
        total += beta * lp - a_caused * lp
        total += phi(a_caused * lp, (1.0 - beta) * lp)
        penalty += 6.0 * _tol_floor(params.depth(cell))
    return total - penalty


@dataclass(frozen=True)
class Section4Record:
    p: float
    r1: float
    r2: float
    r3: float
    r4: float
    sum_rate: float
    bound_rhs: float

    @property
    def passes(self) -> bool:
        return self.sum_rate >= self.bound_rhs


SECTION4_GAP = 2.0 * (7.0 + math.log2(5.0))


def section4_example(p: float) -> Section4Record:
    """The fully symmetric worked instance (alpha 1/2, beta 3/4, u = 4).

    Evaluates the four level rates, the min-composed total, and the
    analytic floor ``1.5 log2 P`` minus the constant slack.
    """
    if not p > 1.0:
        raise ValueError("P must exceed 1")
    r1 = decoding_bound(p - p ** 0.75, 1.0 + 4.0 * p ** 0.75)
    r2 = decoding_bound(p ** 0.75 - p ** 0.5, 1.0 + 4.0 * p ** 0.5)
    r3 = decoding_bound(p ** 0.5 - p ** 0.25, 1.0 + 4.0 * p ** 0.25)
    r4 = decoding_bound(p ** 0.25 - 1.0, 5.0)
    total = 2.0 * min(r1, r3) + 2.0 * min(r2, r3) + 2.0 * r4
    return Section4Record(
        p=p, r1=r1, r2=r2, r3=r3, r4=r4,
        sum_rate=total,
        bound_rhs=1.5 * math.log2(p) - SECTION4_GAP,
    )


@dataclass(frozen=True)
class GapReport:
    params: GaussParams
    induced: LdmConfig
    gauss_lower: float
    allocation_sum: float
    ldm_upper: float
    ldm_achievable: int
    gap: float
    gap_budget: float
    gdof: Optional[float]
    allocations: Tuple[Allocation, Allocation]


def induced_config(params: GaussParams) -> LdmConfig:
    """Bit-level twin of a Gaussian instance: gains are log-power ceilings.

    The ceilings can land a hair outside the discrete regime gates (for
    example ``2 ceil(x/2) > ceil(x)`` at odd x), so the result is used for
    formula evaluation without re-validation.
    """
    lp1 = math.log2(params.p1)
    lp2 = math.log2(params.p2)
    return LdmConfig(
        model=params.model,
        n11=_tol_ceil(lp1),
        n12=_tol_ceil(params.beta1 * lp1),
        n21=_tol_ceil(lp2),
        n22=_tol_ceil(params.beta2 * lp2),
        m1=_tol_ceil(params.alpha1 * lp2),
        m2=_tol_ceil(params.alpha2 * lp1),
    )


def _ldm_upper_value(cfg: LdmConfig) -> float:
    return cfg.n11 + cfg.n21 - (cfg.m1 + cfg.m2) / 2.0


def _ldm_achievable_unchecked(cfg: LdmConfig) -> int:
    work = cfg if cfg.model is Model.IMAC else cfg.dual()
    d1 = work.n11 - work.n12
    d2 = work.n21 - work.n22
    return (work.n12 + work.n22 - work.m1 - work.m2
            + phi(work.m2, d1) + phi(work.m1, d2))


def gap_report(params: GaussParams) -> GapReport:
    """Gaussian lower bound against the induced bit-level rates, with budget.

    The budget charges the looser closed-form constant (9), six bits per
    alignment level of each cell, and two bits of ceiling slack from the
    log-power correspondence.
    """
    params.validated()
    cfg = induced_config(params)
    gauss_lower = theorem1_lower_bound(params)
    allocs = (build_allocation(params, 1), build_allocation(params, 2))
    alloc_sum = allocs[0].total + allocs[1].total
    ldm_up = _ldm_upper_value(cfg)
    ldm_ach = _ldm_achievable_unchecked(cfg)
    budget = 9.0 + 6.0 * _tol_floor(params.depth(1)) + 6.0 * _tol_floor(params.depth(2)) + 2.0
    gdof = None
    if params.p1 == params.p2:
        gdof = gauss_lower / math.log2(params.p1)
    return GapReport(
        params=params,
        induced=cfg,
        gauss_lower=gauss_lower,
        allocation_sum=alloc_sum,
        ldm_upper=ldm_up,
        ldm_achievable=ldm_ach,
        gap=ldm_ach - gauss_lower,
        gap_budget=budget,
        gdof=gdof,
        allocations=allocs,
    )


# ---------------------------------------------------------------------------
# Scalar-constellation Monte Carlo demonstrator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimLayer:
    level: int
    multiplicity: int
    rate: float       # information-rate budget of the layer
    sim_bits: float   # operating rate of the uncoded constellation
    points: int       # constellation size per sub-signal
    step: float       # distance between adjacent scaled-integer points
    error_rate: float


@dataclass(frozen=True)
class LinkSimReport:
    layers: Tuple[SimLayer, ...]
    skipped_levels: Tuple[int, ...]
    trials: int
    aligned_success_rate: float  # all aligned sums decoded exactly

    @property
    def max_error_rate(self) -> float:
        return max((l.error_rate for l in self.layers), default=0.0)


def linksim_run(params: GaussParams, allocation: Allocation, margin: float,
                trials: int, seed: int = 0, noise_scale: float = 1.0) -> LinkSimReport:
    """Successive per-layer decoding of the aligned stack, Monte Carlo.

    Each foreign-visible layer carries uniform scaled-integer symbols with
    average power equal to the layer's interference-path signal power.
    Asymptotically good codes are out of reach on a desk, so each layer
    operates at the uncoded-constellation rate ``(rate - margin) / 2``
    (half the coded budget); layers falling under 1 bit are skipped.
    Aligned layers send two independent symbols and the receiver decodes
    their integer sum, then subtracts, then moves down one layer.  Noise is
    unit-variance Gaussian (scaled by ``noise_scale``); trial t draws from
    ``seed + t`` so results are reproducible regardless of scheduling.
    """
    params.validated()
    if margin <= 0:
        raise ValueError("margin must be positive")
    if trials < 0:
        raise ValueError("trials must be nonnegative")

    chain: List[Tuple[RateLayer, int, float]] = []  # (layer, points, step)
    skipped: List[int] = []
    for layer in allocation.common_layers():
        op_bits = (layer.rate - margin) / 2.0
        if op_bits < 1.0:
            skipped.append(layer.level)
            continue
        points = int(math.floor(2.0 ** op_bits))
        step = math.sqrt(12.0 * layer.signal / (points ** 2 - 1))
        chain.append((layer, points, step))

    n_layers = len(chain)
    errors = [0] * n_layers
    aligned_ok = 0
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        symbols: List[np.ndarray] = []
        received = 0.0
        for layer, points, step in chain:
            syms = rng.integers(0, points, size=layer.multiplicity)
            symbols.append(syms)
            received += step * (float(syms.sum()) - layer.multiplicity * (points - 1) / 2.0)
        received += noise_scale * rng.standard_normal()

        all_aligned_good = True
        resid = received
        for idx, (layer, points, step) in enumerate(chain):
            mult = layer.multiplicity
            span = mult * (points - 1)
            est = int(round(resid / step + span / 2.0))
            est = min(max(est, 0), span)
            truth = int(symbols[idx].sum())
            if est != truth:
                errors[idx] += 1
                if mult == 2:
                    all_aligned_good = False
            resid -= step * (est - span / 2.0)
        if all_aligned_good:
            aligned_ok += 1

    sim_layers = tuple(
        SimLayer(
            level=layer.level,
            multiplicity=layer.multiplicity,
            rate=layer.rate,
            sim_bits=(layer.rate - margin) / 2.0,
            points=points,
            step=step,
            error_rate=(errors[idx] / trials) if trials else 0.0,
        )
        for idx, (layer, points, step) in enumerate(chain)
    )
    return LinkSimReport(
        layers=sim_layers,
        skipped_levels=tuple(skipped),
        trials=trials,
        aligned_success_rate=(aligned_ok / trials) if trials else 1.0,
    )
