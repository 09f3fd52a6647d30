"""Closed-form min-cut capacities for collaborative regeneration.

All quantities are exact rationals (``fractions.Fraction``), so bound
values and the characteristic points can be compared with zero
tolerance.  Capacities follow the information-flow cut sums

    single repair:     sum_i min(alpha, (d - i) beta)
    collaborative:     sum_i u_i min(alpha, (d - S_i) beta + (t - u_i) beta')

with S_i the prefix sum of group sizes, and their adversarial variants
where selfish live nodes remove ``L0`` download contributions, selfish
newcomers remove ``l_i`` collaboration contributions, and polluting
nodes cost twice their count (one good equation must offset each
potentially bad one).  Bandwidth coefficients are clamped at zero; cut
contributions are never negative.

All functions are pure over immutable inputs and safe to evaluate
concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

RationalLike = Union[int, str, Fraction, float]


class ParameterError(ValueError):
    """A storage-network parameter violates its constraints."""


class PartitionError(ValueError):
    """A data-collector group partition is invalid for (k, t)."""


class AllocationError(ValueError):
    """An adversary allocation is infeasible for the partition."""


class InfeasibleError(ValueError):
    """No parameter choice can satisfy the requested constraint."""


def as_fraction(x: RationalLike) -> Fraction:
    """Exact conversion; floats convert by their binary value."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def fraction_str(x: Fraction) -> str:
    """Render as 'p' or 'p/q' for stable text output."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SystemParams:
    """The storage-network tuple (n, k, d, t, B, alpha, beta, beta')."""

    n: int
    k: int
    d: int
    t: int
    B: Fraction
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    beta_prime: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("B", "alpha", "beta", "beta_prime"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.t < 1:
            raise ParameterError("t must be at least 1")
        if self.k < 1:
            raise ParameterError("k must be at least 1")
        if self.d < self.k:
            raise ParameterError(f"repair fan-in d={self.d} below k={self.k}")
        if self.k > self.n - self.t:
            raise ParameterError(f"need k <= n - t, got k={self.k}, n-t={self.n - self.t}")
        if self.d > self.n - self.t:
            raise ParameterError(f"need d <= n - t, got d={self.d}, n-t={self.n - self.t}")
        for name in ("B", "alpha", "beta", "beta_prime"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")

    @classmethod
    def for_repair_network(
        cls,
        k: int,
        d: int,
        t: int,
        B: RationalLike,
        n: Optional[int] = None,
        alpha: RationalLike = 0,
        beta: RationalLike = 0,
        beta_prime: RationalLike = 0,
    ) -> "SystemParams":
        """Build params; n defaults to the minimal d + t."""
        return cls(
            n=n if n is not None else d + t,
            k=k,
            d=d,
            t=t,
            B=as_fraction(B),
            alpha=as_fraction(alpha),
            beta=as_fraction(beta),
            beta_prime=as_fraction(beta_prime),
        )

    @property
    def unit(self) -> Fraction:
        """B/k, the normalization unit used across outputs."""
        return self.B / self.k

    def with_point(
        self, alpha: RationalLike, beta: RationalLike, beta_prime: RationalLike
    ) -> "SystemParams":
        return replace(
            self,
            alpha=as_fraction(alpha),
            beta=as_fraction(beta),
            beta_prime=as_fraction(beta_prime),
        )


@dataclass(frozen=True)
class GroupPartition:
    """Group sizes u_0..u_{g-1} of the k nodes a data collector contacts,
    one group per repair generation."""

    groups: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(int(u) for u in self.groups))
        if not self.groups:
            raise PartitionError("partition must have at least one group")
        if any(u < 1 for u in self.groups):
            raise PartitionError("group sizes must be positive")

    @property
    def g(self) -> int:
        return len(self.groups)

    def validate_for(self, k: int, t: int) -> None:
        if sum(self.groups) != k:
            raise PartitionError(f"group sizes sum to {sum(self.groups)}, expected k={k}")
        if any(u > t for u in self.groups):
            raise PartitionError(f"group sizes must be at most t={t}")

    @classmethod
    def all_ones(cls, k: int) -> "GroupPartition":
        return cls((1,) * k)

    @classmethod
    def uniform(cls, k: int, t: int) -> "GroupPartition":
        if k % t:
            raise PartitionError(f"t={t} does not divide k={k}")
        return cls((t,) * (k // t))


class AdversaryKind(str, enum.Enum):
    SELFISH = "selfish"
    POLLUTING = "polluting"


@dataclass(frozen=True)
class AdversaryProfile:
    """Counts of misbehaving nodes: ``among_live`` per generation among the
    contacted live nodes, and per-newcomer-group counts bounded by
    ``per_group_max`` summing to ``total``."""

    kind: AdversaryKind
    among_live: int = 0
    per_group: Optional[tuple[int, ...]] = None
    per_group_max: Optional[int] = None
    total: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AdversaryKind(self.kind))
        if self.among_live < 0:
            raise ParameterError("among_live count must be nonnegative")
        if self.per_group is not None:
            per = tuple(int(x) for x in self.per_group)
            object.__setattr__(self, "per_group", per)
            if any(x < 0 for x in per):
                raise AllocationError("per-group counts must be nonnegative")
            cap = self.per_group_max if self.per_group_max is not None else (max(per) if per else 0)
            object.__setattr__(self, "per_group_max", cap)
            if any(x > cap for x in per):
                raise AllocationError("per-group count exceeds per_group_max")
            tot = sum(per)
            if self.total is not None and self.total != tot:
                raise AllocationError(f"total {self.total} != sum(per_group) {tot}")
            object.__setattr__(self, "total", tot)
        else:
            if self.per_group_max is None:
                object.__setattr__(self, "per_group_max", 0)
            if self.total is None:
                object.__setattr__(self, "total", 0)
            if self.per_group_max < 0 or self.total < 0:
                raise ParameterError("per_group_max and total must be nonnegative")

    @property
    def factor(self) -> int:
        """Cut-cost multiplier: 2 for polluting (compensation), 1 for selfish."""
        return 2 if self.kind is AdversaryKind.POLLUTING else 1


def _check_among_live(p: SystemParams, adv: AdversaryProfile) -> None:
    if adv.kind is AdversaryKind.SELFISH and adv.among_live > p.d:
        raise ParameterError(f"selfish live count {adv.among_live} exceeds d={p.d}")
    if adv.kind is AdversaryKind.POLLUTING and 2 * adv.among_live > p.d:
        raise ParameterError(
            f"polluting live count {adv.among_live} needs 2*count <= d={p.d}"
        )


def _cut_sum(
    p: SystemParams,
    part: GroupPartition,
    among_live: int,
    per_group: Sequence[int],
    factor: int,
) -> Fraction:
    alpha, beta, beta_prime = p.alpha, p.beta, p.beta_prime
    total = Fraction(0)
    prefix = 0
    for u, a in zip(part.groups, per_group):
        live_coeff = max(0, p.d - factor * among_live - prefix)
        collab_coeff = max(0, p.t - factor * a - u)
        bandwidth = live_coeff * beta + collab_coeff * beta_prime
        total += u * min(alpha, bandwidth)
        prefix += u
    return total


def mincut_single(p: SystemParams) -> Fraction:
    """Cut bound for independent single-node repairs (t treated as 1)."""
    if p.d < p.k:
        raise ParameterError("requires d >= k")
    return sum(
        (min(p.alpha, (p.d - i) * p.beta) for i in range(p.k)),
        start=Fraction(0),
    )


def mincut_collab(p: SystemParams, part: GroupPartition) -> Fraction:
    """Cut bound for collaborative repair with the given collector partition."""
    part.validate_for(p.k, p.t)
    return _cut_sum(p, part, 0, [0] * part.g, 1)


def capacity_selfish(p: SystemParams, part: GroupPartition, adv: AdversaryProfile) -> Fraction:
    """Upper bound on storable data with selfish nodes present."""
    if adv.kind is not AdversaryKind.SELFISH:
        raise ParameterError("profile kind must be selfish")
    part.validate_for(p.k, p.t)
    if adv.per_group is None or len(adv.per_group) != part.g:
        raise AllocationError("need one selfish count per group")
    _check_among_live(p, adv)
    for u, l in zip(part.groups, adv.per_group):
        if u > p.t - l:
            raise AllocationError(
                f"group of size {u} infeasible with {l} selfish newcomers (t={p.t})"
            )
    return _cut_sum(p, part, adv.among_live, adv.per_group, 1)


def capacity_polluting(p: SystemParams, part: GroupPartition, adv: AdversaryProfile) -> Fraction:
    """Upper bound on storable data with polluting nodes present."""
    if adv.kind is not AdversaryKind.POLLUTING:
        raise ParameterError("profile kind must be polluting")
    part.validate_for(p.k, p.t)
    if adv.per_group is None or len(adv.per_group) != part.g:
        raise AllocationError("need one polluting count per group")
    _check_among_live(p, adv)
    for u, b in zip(part.groups, adv.per_group):
        if u > p.t - 2 * b:
            raise AllocationError(
                f"group of size {u} infeasible with {b} polluting newcomers (t={p.t})"
            )
    return _cut_sum(p, part, adv.among_live, adv.per_group, 2)


def repair_gamma(p: SystemParams) -> Fraction:
    """Total bandwidth to repair one node: d*beta + (t-1)*beta'."""
    return p.d * p.beta + (p.t - 1) * p.beta_prime


def msr_point(p: SystemParams) -> tuple[Fraction, Fraction, Fraction]:
    """Minimum-storage point: alpha = B/k, beta = beta' = (B/k)/(d-k+t)."""
    denom = p.d - p.k + p.t
    if denom <= 0:
        raise ParameterError("minimum-storage point needs d - k + t > 0")
    unit = p.unit
    b = unit / denom
    return unit, b, b


def mbr_point(p: SystemParams) -> tuple[Fraction, Fraction, Fraction]:
    """Minimum-bandwidth point of the trade-off curve."""
    denom = 2 * p.d - p.k + p.t
    if denom <= 0:
        raise ParameterError("minimum-bandwidth point needs 2d - k + t > 0")
    unit = p.unit
    alpha = unit * (2 * p.d + p.t - 1) / denom
    beta = unit * 2 / denom
    beta_prime = unit / denom
    return alpha, beta, beta_prime


@dataclass(frozen=True)
class MsrSelfishBounds:
    """Feasible download/collaboration bandwidth at minimum storage when
    selfish nodes participate.  ``beta_exact`` is available only when the
    per-group counts are concrete and (k + total)/t is an integer."""

    beta_exact: Optional[Fraction]
    beta_min: Fraction
    beta_max: Fraction
    beta_prime_min: Fraction
    beta_prime_max: Fraction
    exact_formula_applies: bool


def msr_selfish_bounds(p: SystemParams, adv: AdversaryProfile) -> MsrSelfishBounds:
    """Bandwidth ranges at alpha = B/k under a selfish adversary.

    The smallest feasible beta lies between (B/k)/((d-L0)-k+t) and
    (B/k)/((d-L0)-k+t-lmax); with concrete per-group counts and t
    dividing k + total, the exact value (B/k)/((d-L0)-k+(t-l_last))
    is returned as well.  beta' bounds follow from eliminating beta.
    Raises InfeasibleError when a denominator is nonpositive, which at
    lmax = t-1 means no collaboration information flows at all.
    """
    if adv.kind is not AdversaryKind.SELFISH:
        raise ParameterError("profile kind must be selfish")
    _check_among_live(p, adv)
    lmax = adv.per_group_max if adv.per_group_max is not None else 0
    if lmax > p.t - 1:
        raise ParameterError(f"per-group selfish count cannot exceed t-1={p.t - 1}")
    unit = p.unit
    d_eff = p.d - adv.among_live

    lo_denom = d_eff - p.k + p.t
    hi_denom = d_eff - p.k + p.t - lmax
    if lo_denom <= 0 or hi_denom <= 0:
        raise InfeasibleError(
            "no feasible download bandwidth: effective fan-in too small"
        )
    beta_min = unit / lo_denom
    beta_max = unit / hi_denom

    collab_share = p.t - lmax - 1
    if collab_share <= 0 or p.t == 1:
        # lmax = t-1 leaves no collaborative flow; a collaboration
        # bandwidth is meaningless in that regime.
        raise InfeasibleError(
            "no collaboration bandwidth is defined when every peer may be selfish"
        )
    bp_min = unit * collab_share / (hi_denom * (p.t - 1))
    bp_max = unit * (p.t - 1) / (lo_denom * collab_share)

    beta_exact = None
    applies = False
    if adv.per_group is not None and (p.k + adv.total) % p.t == 0:
        g = (p.k + adv.total) // p.t
        if len(adv.per_group) == g:
            applies = True
            last = adv.per_group[g - 1]
            exact_denom = d_eff - p.k + (p.t - last)
            if exact_denom <= 0:
                raise InfeasibleError("exact bandwidth denominator nonpositive")
            beta_exact = unit / exact_denom
    return MsrSelfishBounds(beta_exact, beta_min, beta_max, bp_min, bp_max, applies)


def polluted_collection_min_storage(p: SystemParams, polluters: int) -> Fraction:
    """Minimum per-node storage B/(k - 2*b0) when polluters may also answer
    data collectors with wrong data.  Exposed as a computed quantity only."""
    if polluters < 0 or 2 * polluters >= p.k:
        raise ParameterError("need 0 <= 2*polluters < k")
    return p.B / (p.k - 2 * polluters)
