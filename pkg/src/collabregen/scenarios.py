"""Cost-table scenarios and multi-generation repair simulation.

``run_cost_scenario`` measures the normalized repair costs of the six
canonical adversary placements on the (7,3) code over GF(8) with two
simultaneous failures; nothing is hard-coded, the numbers come out of an
actual repair run.  ``simulate_generations`` runs seeded multi-round
simulations that track how pollution spreads through repairs and what
each generation's repair costs, with or without digest verification.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from .capacity import fraction_str
from .exactcode import (
    Behavior,
    FragmentDigestTable,
    NodeBlock,
    ObjectMatrix,
    RepairFailureError,
    RepairPolicy,
    collaborative_repair,
    collect,
    encode_object,
    progressive_repair_with_digests,
)
from .gf import FieldElement, RsCode, field


@dataclass(frozen=True)
class CodeSetup:
    """Code parameters for a scenario run."""

    m: int = 3
    n: int = 7
    kappa: int = 3
    t: int = 2
    first_power: int = 1

    def build(self) -> RsCode:
        return RsCode.with_power_points(field(self.m), self.n, self.kappa, self.first_power)


def build_demo_system(seed: int = 0, setup: CodeSetup = CodeSetup()):
    """The reference system: an RS code, a seeded object, and its blocks."""
    code = setup.build()
    rng = random.Random(seed)
    obj = ObjectMatrix.random(code.field, setup.t, setup.kappa, rng)
    return code, obj, encode_object(obj, code)


@dataclass(frozen=True)
class CostRecord:
    scenario: str
    beta_av: Fraction
    beta_prime: Fraction
    gamma: Fraction
    effective_d: int

    def as_strings(self) -> tuple[str, str, str, str]:
        return (
            fraction_str(self.beta_av),
            fraction_str(self.beta_prime),
            fraction_str(self.gamma),
            str(self.effective_d),
        )


# The classic per-repair costs for the six placements (alpha = 1, t = 2,
# d = 3, normalized by B/k); the live-polluter column pays d = 5.
REFERENCE_COSTS: dict[str, CostRecord] = {
    "selfish-baseline": CostRecord("selfish-baseline", Fraction(1, 2), Fraction(1, 2), Fraction(2), 3),
    "selfish-newcomer": CostRecord("selfish-newcomer", Fraction(1), Fraction(0), Fraction(3), 3),
    "selfish-live": CostRecord("selfish-live", Fraction(3, 4), Fraction(1, 2), Fraction(2), 3),
    "polluting-baseline": CostRecord("polluting-baseline", Fraction(1, 2), Fraction(1, 2), Fraction(2), 3),
    "polluting-newcomer": CostRecord("polluting-newcomer", Fraction(1), Fraction(0), Fraction(3), 3),
    "polluting-live": CostRecord("polluting-live", Fraction(1, 2), Fraction(1, 2), Fraction(3), 5),
}

SCENARIO_NAMES = tuple(REFERENCE_COSTS)


def run_cost_scenario(name: str, seed: int = 0) -> CostRecord:
    """Measure one canonical scenario's costs from a real repair run.

    The two highest node ids fail; the misbehaving node is the first
    newcomer for the *-newcomer scenarios and the lowest live id (which
    sits in both newcomers' contact stripes) for the *-live ones.
    """
    if name not in REFERENCE_COSTS:
        raise ValueError(f"unknown scenario {name!r}; pick one of {SCENARIO_NAMES}")
    code, obj, blocks = build_demo_system(seed)
    failed = [b.node_id for b in blocks[-2:]]
    live = blocks[: len(blocks) - 2]

    behaviors: dict[int, Behavior] = {}
    if name.endswith("-newcomer"):
        kind = Behavior.SELFISH if name.startswith("selfish") else Behavior.POLLUTING
        behaviors[failed[0]] = kind
    elif name.endswith("-live"):
        kind = Behavior.SELFISH if name.startswith("selfish") else Behavior.POLLUTING
        behaviors[live[0].node_id] = kind

    new_blocks, report = collaborative_repair(
        code, live, failed, behaviors, seed=seed
    )
    truth = {b.node_id: b.payload for b in blocks}
    for nb in new_blocks:
        expected_bad = behaviors.get(nb.node_id) is Behavior.POLLUTING
        if not expected_bad and nb.payload != truth[nb.node_id]:
            raise RepairFailureError(f"scenario {name}: repaired block differs")
    return CostRecord(name, report.beta_av, report.beta_prime, report.gamma, report.effective_d)


def run_all_cost_scenarios(seed: int = 0) -> list[CostRecord]:
    return [run_cost_scenario(name, seed) for name in SCENARIO_NAMES]


class Mitigation(str, enum.Enum):
    NONE = "none"
    DIGESTS = "digests"


@dataclass
class ScenarioConfig:
    """A seeded multi-generation simulation.

    ``behaviors`` maps node ids to persistent behaviors;
    ``behavior_overrides`` maps a generation index to extra per-node
    behaviors for that generation only (e.g. a newcomer misbehaving).
    Without an explicit ``failure_schedule`` one is drawn from the seed,
    never failing a persistently misbehaving node, so adversaries persist.
    """

    code: CodeSetup = dc_field(default_factory=CodeSetup)
    generations: int = 8
    seed: int = 0
    object_id: str = "obj-0"
    mitigation: Mitigation = Mitigation.NONE
    failure_schedule: Optional[list[list[int]]] = None
    behaviors: dict[int, Behavior] = dc_field(default_factory=dict)
    behavior_overrides: dict[int, dict[int, Behavior]] = dc_field(default_factory=dict)
    pollute_collection: bool = False
    assumed_polluters: Optional[int] = 0
    policy: RepairPolicy = RepairPolicy.KEEP_RESPONDERS

    def __post_init__(self):
        self.mitigation = Mitigation(self.mitigation)
        self.policy = RepairPolicy(self.policy)
        self.behaviors = {int(k): Behavior(v) for k, v in self.behaviors.items()}
        self.behavior_overrides = {
            int(g): {int(k): Behavior(v) for k, v in m.items()}
            for g, m in self.behavior_overrides.items()
        }

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        raw = json.loads(text)
        code = CodeSetup(**raw.pop("code", {}))
        return cls(code=code, **raw)

    def to_json(self) -> str:
        doc = {
            "code": {
                "m": self.code.m,
                "n": self.code.n,
                "kappa": self.code.kappa,
                "t": self.code.t,
                "first_power": self.code.first_power,
            },
            "generations": self.generations,
            "seed": self.seed,
            "object_id": self.object_id,
            "mitigation": self.mitigation.value,
            "failure_schedule": self.failure_schedule,
            "behaviors": {str(k): v.value for k, v in self.behaviors.items()},
            "behavior_overrides": {
                str(g): {str(k): v.value for k, v in m.items()}
                for g, m in self.behavior_overrides.items()
            },
            "pollute_collection": self.pollute_collection,
            "assumed_polluters": self.assumed_polluters,
            "policy": self.policy.value,
        }
        return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    repaired: tuple[int, ...]
    polluted_block_count: int
    beta_av: float
    beta_prime: float
    gamma: float
    reconstruction_ok: bool


STATS_CSV_HEADER = (
    "generation,repaired,polluted_blocks,beta_av_norm,beta_prime_norm,"
    "gamma_norm,reconstruction_ok"
)


def stats_to_csv(stats: Sequence[GenerationStats]) -> str:
    lines = [STATS_CSV_HEADER]
    for s in stats:
        lines.append(
            ",".join(
                (
                    str(s.generation),
                    "|".join(str(i) for i in s.repaired),
                    str(s.polluted_block_count),
                    format(s.beta_av, ".9g"),
                    format(s.beta_prime, ".9g"),
                    format(s.gamma, ".9g"),
                    "true" if s.reconstruction_ok else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"


def _draw_schedule(cfg: ScenarioConfig, rng: random.Random) -> list[list[int]]:
    protected = {i for i, b in cfg.behaviors.items() if b is not Behavior.HONEST}
    pool = sorted(set(range(1, cfg.code.n + 1)) - protected)
    t = cfg.code.t
    if len(pool) < t:
        raise ValueError("not enough nodes outside the persistent adversaries")
    return [sorted(rng.sample(pool, t)) for _ in range(cfg.generations)]


def simulate_generations(cfg: ScenarioConfig) -> list[GenerationStats]:
    """Run the configured generations; fully deterministic given the seed."""
    code = cfg.code.build()
    rng = random.Random(cfg.seed)
    obj = ObjectMatrix.random(code.field, cfg.code.t, cfg.code.kappa, rng)
    truth = encode_object(obj, code)
    truth_payloads = {b.node_id: b.payload for b in truth}
    stored: dict[int, NodeBlock] = {b.node_id: b for b in truth}
    digests = FragmentDigestTable.from_blocks(cfg.object_id, truth)

    schedule = cfg.failure_schedule or _draw_schedule(cfg, rng)
    if len(schedule) < cfg.generations:
        raise ValueError("failure schedule shorter than the generation count")

    stats: list[GenerationStats] = []
    for gen in range(cfg.generations):
        failed = sorted(int(i) for i in schedule[gen])
        if len(set(failed)) != cfg.code.t or not all(1 <= i <= cfg.code.n for i in failed):
            raise ValueError(f"generation {gen}: bad failure set {failed}")
        live = [stored[i] for i in sorted(stored) if i not in failed]
        behaviors = dict(cfg.behaviors)
        behaviors.update(cfg.behavior_overrides.get(gen, {}))
        repair_seed = rng.randrange(2**32)
        try:
            if cfg.mitigation is Mitigation.DIGESTS:
                new_blocks, report = progressive_repair_with_digests(
                    code, live, failed, behaviors, digests, seed=repair_seed
                )
            else:
                new_blocks, report = collaborative_repair(
                    code,
                    live,
                    failed,
                    behaviors,
                    policy=cfg.policy,
                    assumed_polluters=cfg.assumed_polluters,
                    seed=repair_seed,
                )
        except RepairFailureError as exc:
            raise RepairFailureError(f"generation {gen}: {exc}") from exc
        for nb in new_blocks:
            stored[nb.node_id] = nb
        polluted = sum(
            1 for i, b in stored.items() if b.payload != truth_payloads[i]
        )
        stats.append(
            GenerationStats(
                generation=gen,
                repaired=tuple(failed),
                polluted_block_count=polluted,
                beta_av=float(report.beta_av),
                beta_prime=float(report.beta_prime),
                gamma=float(report.gamma),
                reconstruction_ok=_reconstruction_ok(cfg, code, obj, stored, behaviors, rng),
            )
        )
    return stats


def _reconstruction_ok(cfg, code, obj, stored, behaviors, rng) -> bool:
    """Whether a collector reading the lowest-id nodes gets the object back."""
    ids = sorted(stored)[: cfg.code.kappa]
    answers = []
    for i in ids:
        block = stored[i]
        if (
            cfg.pollute_collection
            and behaviors.get(i, Behavior.HONEST) is Behavior.POLLUTING
        ):
            f = code.field
            payload = tuple(
                FieldElement(p.value ^ rng.randrange(1, f.order), f)
                for p in block.payload
            )
            block = NodeBlock(block.node_id, block.column, payload)
        answers.append(block)
    try:
        return collect(answers).pieces == obj.pieces
    except ValueError:
        return False
