"""Exact collaborative repair at minimum storage, built on Reed-Solomon.

An object is a t x kappa matrix O over GF(2^m); node i stores the
column O @ g_i of t unit-size pieces, where g_i is the i-th generator
column.  Any kappa nodes reconstruct O.  When t nodes fail, each
newcomer downloads its own row's evaluations from kappa live nodes,
solves the row, then exchanges cross pieces with the other newcomers so
every repaired block is bit-identical to the lost one (d = k = kappa).

Byzantine behaviors adjust the flow:

* a selfish newcomer kills the collaboration phase: survivors fetch the
  whole object themselves (both pieces from each contact);
* a selfish live node makes newcomers rebalance their demand over the
  nodes that did respond (ceiling/floor per link) and route the missing
  row evaluations through their peers;
* a polluting live node forces contacting 2 extra nodes per possible
  polluter so row decoding can outvote the bad equations, or, with a
  digest table, a progressive scheme that retries growing contact sets
  until the regenerated blocks verify.

Cost conventions match the classic accounting: gamma counts download
pieces plus one collaboration piece per newcomer pair.  In the
selfish-live scenario completing both stored pieces needs one extra
cross piece per pair beyond that accounting; those transfers are logged
in a separate completion ledger so the measured (beta_av, beta', gamma)
agree with the reference cost model while blocks stay exact.

Repair is logically two-phase (download barrier, then exchange barrier);
this implementation runs newcomers sequentially between the barriers and
draws all adversarial randomness from an explicit seed, so runs are
reproducible.
"""

from __future__ import annotations

import enum
import hashlib
import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional, Sequence

from .gf import (
    DecodeError,
    FieldElement,
    FieldMatrix,
    GF,
    RsCode,
    rs_decode,
)


class Behavior(str, enum.Enum):
    HONEST = "honest"
    SELFISH = "selfish"
    POLLUTING = "polluting"


class RepairPolicy(str, enum.Enum):
    # replacement strategy when a contacted live node is selfish
    KEEP_RESPONDERS = "keep-responders"
    CONTACT_NEW_NODES = "contact-new-nodes"


class RepairFailureError(RuntimeError):
    """The repair policy could not complete with the available nodes."""


class _Ambiguous:
    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "AMBIGUOUS"


AMBIGUOUS = _Ambiguous()


@dataclass(frozen=True)
class ObjectMatrix:
    """The stored object, one row per expected simultaneous failure."""

    pieces: FieldMatrix

    @property
    def t(self) -> int:
        return self.pieces.rows

    @property
    def kappa(self) -> int:
        return self.pieces.cols

    @property
    def size_units(self) -> int:
        return self.t * self.kappa

    @classmethod
    def random(cls, field_: GF, t: int, kappa: int, rng: random.Random) -> "ObjectMatrix":
        data = [rng.randrange(field_.order) for _ in range(t * kappa)]
        return cls(FieldMatrix(field_, t, kappa, data))

    def row(self, r: int) -> tuple[FieldElement, ...]:
        return self.pieces.row(r)


@dataclass(frozen=True)
class NodeBlock:
    """One node's stored block: t pieces, the object applied to its column."""

    node_id: int
    column: tuple[FieldElement, ...]
    payload: tuple[FieldElement, ...]

    @property
    def position(self) -> int:
        """0-based codeword position for 1-based node ids."""
        return self.node_id - 1

    def to_bytes(self) -> bytes:
        """Canonical serialization: m, node id, kappa, t, then the payload
        symbols in row order, each little-endian in ceil(m/8) bytes."""
        f = self.payload[0].field
        width = (f.m + 7) // 8
        header = [f.m, self.node_id, len(self.column), len(self.payload)]
        out = bytearray()
        for v in header:
            out += v.to_bytes(width, "little")
        for sym in self.payload:
            out += sym.value.to_bytes(width, "little")
        return bytes(out)


@dataclass(frozen=True)
class FragmentDigestTable:
    """Trusted digests of every node's exact block for one object."""

    object_id: str
    digests: Mapping[int, bytes]

    @staticmethod
    def digest_of(block: NodeBlock) -> bytes:
        return hashlib.sha256(block.to_bytes()).digest()

    @classmethod
    def from_blocks(cls, object_id: str, blocks: Sequence[NodeBlock]) -> "FragmentDigestTable":
        return cls(object_id, {b.node_id: cls.digest_of(b) for b in blocks})

    def covers(self, node_ids: Sequence[int]) -> bool:
        return all(i in self.digests for i in node_ids)

    def verify(self, block: NodeBlock) -> bool:
        want = self.digests.get(block.node_id)
        return want is not None and want == self.digest_of(block)


def encode_object(obj: ObjectMatrix, code: RsCode) -> list[NodeBlock]:
    """Blocks for nodes 1..n; node i stores the object times column i."""
    if obj.kappa != code.kappa:
        raise ValueError(f"object width {obj.kappa} != code dimension {code.kappa}")
    if obj.pieces.field is not code.field:
        raise ValueError("object and code use different fields")
    f = code.field
    rows = obj.pieces.int_rows()
    blocks = []
    for pos in range(code.n):
        col = code.column(pos)
        col_vals = [c.value for c in col]
        payload = []
        for row in rows:
            acc = 0
            for coeff, cv in zip(row, col_vals):
                if coeff and cv:
                    acc ^= f.mul(coeff, cv)
            payload.append(FieldElement(acc, f))
        blocks.append(NodeBlock(pos + 1, col, tuple(payload)))
    return blocks


def _solve_object(blocks: Sequence[NodeBlock]) -> ObjectMatrix:
    f = blocks[0].payload[0].field
    kappa = len(blocks[0].column)
    cols = FieldMatrix.from_rows(f, [[c.value for c in b.column] for b in blocks]).transpose()
    rhs = FieldMatrix.from_rows(f, [[p.value for p in b.payload] for b in blocks])
    # columns^T . O^T = payload rows
    o_t = cols.transpose().solve(rhs)
    return ObjectMatrix(o_t.transpose())


def collect(blocks: Sequence[NodeBlock]) -> ObjectMatrix:
    """Recover the object from kappa honest blocks (extras are checked)."""
    if not blocks:
        raise ValueError("no blocks given")
    kappa = len(blocks[0].column)
    ids = [b.node_id for b in blocks]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    if len(blocks) < kappa:
        raise ValueError(f"{len(blocks)} blocks given, need at least {kappa}")
    obj = _solve_object(blocks[:kappa])
    for extra in blocks[kappa:]:
        if _apply_column(obj, extra.column) != extra.payload:
            raise ValueError(f"block of node {extra.node_id} inconsistent with the rest")
    return obj


def _apply_column(obj: ObjectMatrix, column: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    f = obj.pieces.field
    col_vals = [c.value for c in column]
    out = []
    for row in obj.pieces.int_rows():
        acc = 0
        for coeff, cv in zip(row, col_vals):
            if coeff and cv:
                acc ^= f.mul(coeff, cv)
        out.append(FieldElement(acc, f))
    return tuple(out)


def collect_robust(blocks: Sequence[NodeBlock], max_polluters: int):
    """Object recovery that tolerates wrong payloads by subset consensus.

    Every kappa-subset is solved; a candidate qualifies when it disagrees
    with at most ``max_polluters`` of the given blocks.  With at least
    kappa + max_polluters honest blocks the true object is the unique
    qualifying candidate; otherwise AMBIGUOUS is returned rather than a
    possibly wrong object.
    """
    if max_polluters < 0:
        raise ValueError("max_polluters must be nonnegative")
    if not blocks:
        raise ValueError("no blocks given")
    kappa = len(blocks[0].column)
    if len(blocks) < kappa:
        raise ValueError(f"{len(blocks)} blocks given, need at least {kappa}")
    ordered = sorted(blocks, key=lambda b: b.node_id)

    qualified: list[ObjectMatrix] = []
    seen: set[tuple[int, ...]] = set()
    for subset in combinations(ordered, kappa):
        candidate = _solve_object(list(subset))
        key = tuple(v.value for v in candidate.pieces.entries)
        if key in seen:
            continue
        seen.add(key)
        disagreements = sum(
            1 for b in ordered if _apply_column(candidate, b.column) != b.payload
        )
        if disagreements <= max_polluters:
            qualified.append(candidate)
    if len(qualified) == 1:
        return qualified[0]
    return AMBIGUOUS


# --- collaborative repair ---


@dataclass
class RepairReport:
    """Per-repair transfer ledgers and the derived normalized costs.

    ``exchanges`` holds the collaboration pieces the reference cost model
    counts (one per ordered newcomer pair); ``completion`` holds cross
    pieces moved beyond that accounting (only the selfish-live policy
    needs them, because its counted exchange slots carry relayed row
    evaluations instead).  ``measured`` lists the newcomers whose costs
    the headline numbers summarize (the non-Byzantine ones).
    """

    unit_pieces: Fraction
    downloads: dict[int, dict[int, int]] = dc_field(default_factory=dict)
    exchanges: dict[tuple[int, int], int] = dc_field(default_factory=dict)
    completion: dict[tuple[int, int], int] = dc_field(default_factory=dict)
    contacted: dict[int, tuple[int, ...]] = dc_field(default_factory=dict)
    measured: tuple[int, ...] = ()

    def _download_links(self) -> list[int]:
        loads = []
        for nc in self.measured:
            loads.extend(v for v in self.downloads.get(nc, {}).values() if v > 0)
        return loads

    @property
    def effective_d(self) -> int:
        if not self.measured:
            return 0
        return max(len(self.contacted.get(nc, ())) for nc in self.measured)

    @property
    def beta_av_pieces(self) -> Fraction:
        loads = self._download_links()
        if not loads:
            return Fraction(0)
        return Fraction(sum(loads), len(loads))

    @property
    def beta_prime_pieces(self) -> Fraction:
        m = len(self.measured)
        if m < 2:
            return Fraction(0)
        inside = set(self.measured)
        pieces = sum(
            v for (src, dst), v in self.exchanges.items() if src in inside and dst in inside
        )
        return Fraction(pieces, m * (m - 1))

    @property
    def gamma_pieces(self) -> Fraction:
        m = len(self.measured)
        if m == 0:
            return Fraction(0)
        inside = set(self.measured)
        downloaded = sum(sum(self.downloads.get(nc, {}).values()) for nc in self.measured)
        received = sum(v for (_, dst), v in self.exchanges.items() if dst in inside)
        return Fraction(downloaded + received, m)

    @property
    def beta_av(self) -> Fraction:
        return self.beta_av_pieces / self.unit_pieces

    @property
    def beta_prime(self) -> Fraction:
        return self.beta_prime_pieces / self.unit_pieces

    @property
    def gamma(self) -> Fraction:
        return self.gamma_pieces / self.unit_pieces

    @property
    def completion_pieces(self) -> int:
        return sum(self.completion.values())

    @property
    def total_pieces(self) -> int:
        return (
            sum(sum(d.values()) for d in self.downloads.values())
            + sum(self.exchanges.values())
            + sum(self.completion.values())
        )


def _behavior(behaviors: Mapping[int, Behavior], node_id: int) -> Behavior:
    return Behavior(behaviors.get(node_id, Behavior.HONEST))


def _wrong_symbol(true: FieldElement, rng: random.Random) -> FieldElement:
    f = true.field
    return FieldElement(true.value ^ rng.randrange(1, f.order), f)


def _stripe(live_sorted: Sequence[NodeBlock], index: int, kappa: int) -> list[NodeBlock]:
    """Deterministic contact preference: newcomer j starts after the
    kappa nodes claimed by newcomers 0..j-1, wrapping around."""
    n = len(live_sorted)
    return [live_sorted[(index * kappa + i) % n] for i in range(n)]


def _row_answer(
    block: NodeBlock,
    row: int,
    behaviors: Mapping[int, Behavior],
    rng: random.Random,
) -> Optional[FieldElement]:
    b = _behavior(behaviors, block.node_id)
    if b is Behavior.SELFISH:
        return None
    true = block.payload[row]
    if b is Behavior.POLLUTING:
        return _wrong_symbol(true, rng)
    return true


def _decode_row(code: RsCode, equations: dict[int, FieldElement]) -> tuple[FieldElement, ...]:
    """Solve one object row from (position -> evaluation) equations."""
    try:
        return rs_decode(code, sorted(equations.items()))
    except DecodeError as exc:
        raise RepairFailureError(f"row decoding failed: {exc}") from exc


def collaborative_repair(
    code: RsCode,
    live_blocks: Sequence[NodeBlock],
    failed_ids: Sequence[int],
    behaviors: Optional[Mapping[int, Behavior]] = None,
    *,
    policy: RepairPolicy = RepairPolicy.KEEP_RESPONDERS,
    assumed_polluters: Optional[int] = None,
    seed: int = 0,
) -> tuple[list[NodeBlock], RepairReport]:
    """Two-phase repair of ``failed_ids`` from the live blocks.

    ``behaviors`` maps node ids (live nodes and newcomers, keyed by the
    id they replace) to Behavior; missing ids are honest.
    ``assumed_polluters`` is the number of polluting live nodes the
    repair procedure plans for (downloads escalate by two contacts per
    assumed polluter); it defaults to the actual count in ``behaviors``,
    and 0 disables the escalation entirely (a trusting repair).
    """
    behaviors = dict(behaviors or {})
    rng = random.Random(seed)
    live = sorted(live_blocks, key=lambda b: b.node_id)
    if len({b.node_id for b in live}) != len(live):
        raise ValueError("duplicate live node ids")
    if not live:
        raise RepairFailureError("no live nodes")
    t = len(live[0].payload)
    kappa = code.kappa
    failed = sorted(int(i) for i in failed_ids)
    if len(failed) != t:
        raise ValueError(f"expected {t} failed ids, got {len(failed)}")
    if set(failed) & {b.node_id for b in live}:
        raise ValueError("failed ids overlap live nodes")
    if len(live) < kappa:
        raise RepairFailureError(f"{len(live)} live nodes, need at least {kappa}")

    polluting_live = sum(
        1 for b in live if _behavior(behaviors, b.node_id) is Behavior.POLLUTING
    )
    assumed = polluting_live if assumed_polluters is None else assumed_polluters

    report = RepairReport(unit_pieces=Fraction(t * kappa, kappa))
    byz_newcomers = [f for f in failed if _behavior(behaviors, f) is not Behavior.HONEST]
    report.measured = tuple(f for f in failed if f not in byz_newcomers)
    for f in failed:
        report.downloads[f] = {}

    if byz_newcomers:
        new_blocks = _repair_without_collaboration(
            code, live, failed, behaviors, policy, assumed, rng, report
        )
    else:
        new_blocks = _repair_with_collaboration(
            code, live, failed, behaviors, policy, assumed, rng, report
        )
    return new_blocks, report


def _pick_contacts(
    order: Sequence[NodeBlock],
    behaviors: Mapping[int, Behavior],
    kappa: int,
    responsive_target: int,
) -> tuple[list[NodeBlock], list[NodeBlock]]:
    """Walk the preference order until enough responsive nodes are hit.

    Returns (contacted, responders).  The contacted list includes
    selfish nodes discovered along the way, at least kappa entries.
    """
    contacted: list[NodeBlock] = []
    responders: list[NodeBlock] = []
    for b in order:
        if len(responders) >= responsive_target and len(contacted) >= kappa:
            break
        contacted.append(b)
        if _behavior(behaviors, b.node_id) is not Behavior.SELFISH:
            responders.append(b)
    return contacted, responders


def _repair_with_collaboration(code, live, failed, behaviors, policy, assumed, rng, report):
    t, kappa = len(live[0].payload), code.kappa
    responsive_live = [
        b for b in live if _behavior(behaviors, b.node_id) is not Behavior.SELFISH
    ]
    base_target = min(kappa + 2 * assumed, len(responsive_live)) if assumed else kappa

    contacts: dict[int, list[NodeBlock]] = {}
    responders: dict[int, list[NodeBlock]] = {}
    for j, f in enumerate(failed):
        order = _stripe(live, j, kappa)
        if policy is RepairPolicy.KEEP_RESPONDERS and not assumed:
            contacted = order[:kappa]
            resp = [
                b for b in contacted
                if _behavior(behaviors, b.node_id) is not Behavior.SELFISH
            ]
        else:
            target = base_target if assumed else kappa
            contacted, resp = _pick_contacts(order, behaviors, kappa, target)
        contacts[f], responders[f] = contacted, resp
        report.contacted[f] = tuple(b.node_id for b in contacted)

    # Phase 1: each newcomer downloads its own row from its responders.
    equations: dict[int, dict[int, FieldElement]] = {f: {} for f in failed}
    link_load: Counter = Counter()
    for j, f in enumerate(failed):
        for b in responders[f]:
            ans = _row_answer(b, j, behaviors, rng)
            assert ans is not None
            equations[f][b.position] = ans
            report.downloads[f][b.node_id] = report.downloads[f].get(b.node_id, 0) + 1
            link_load[(f, b.node_id)] += 1

    # Relay plan: rows short of kappa equations borrow evaluation points
    # through peers, spreading the extra demand evenly over links.
    relays: list[tuple[int, int, NodeBlock]] = []  # (carrier, beneficiary, source)
    for j, f in enumerate(failed):
        missing = kappa - len(equations[f])
        if missing <= 0:
            continue
        if policy is RepairPolicy.CONTACT_NEW_NODES:
            raise RepairFailureError("not enough responsive live nodes to gather a row")
        have = {b.node_id for b in responders[f]}
        for _ in range(missing):
            options = []
            for i, peer in enumerate(failed):
                if peer == f:
                    continue
                for b in responders[peer]:
                    if b.node_id in have:
                        continue
                    options.append((link_load[(peer, b.node_id)], b.node_id, peer, b))
            if not options:
                raise RepairFailureError(
                    f"responding nodes cannot span the data of node {f}"
                )
            _, _, carrier, src = min(options)
            ans = _row_answer(src, j, behaviors, rng)
            assert ans is not None
            equations[f][src.position] = ans
            have.add(src.node_id)
            report.downloads[carrier][src.node_id] = (
                report.downloads[carrier].get(src.node_id, 0) + 1
            )
            link_load[(carrier, src.node_id)] += 1
            relays.append((carrier, f, src))

    for carrier, beneficiary, _ in relays:
        key = (carrier, beneficiary)
        report.exchanges[key] = report.exchanges.get(key, 0) + 1

    rows: dict[int, tuple[FieldElement, ...]] = {}
    for j, f in enumerate(failed):
        if len(equations[f]) < kappa:
            raise RepairFailureError(f"row of node {f} has too few equations")
        rows[f] = _decode_row(code, equations[f])

    # Phase 2: cross pieces.  With relays in flight the counted exchange
    # slots are spent, so completion pieces ride in their own ledger.
    cross_ledger = report.completion if relays else report.exchanges
    payloads: dict[int, list[Optional[FieldElement]]] = {f: [None] * t for f in failed}
    for j, f in enumerate(failed):
        own_col = code.column(f - 1)
        payloads[f][j] = _eval_row(rows[f], own_col)
        for i, peer in enumerate(failed):
            if peer == f:
                continue
            piece = _eval_row(rows[f], code.column(peer - 1))
            payloads[peer][j] = piece
            if t > 1:
                key = (f, peer)
                cross_ledger[key] = cross_ledger.get(key, 0) + 1

    return [
        NodeBlock(f, code.column(f - 1), tuple(payloads[f]))  # type: ignore[arg-type]
        for f in failed
    ]


def _eval_row(row: Sequence[FieldElement], column: Sequence[FieldElement]) -> FieldElement:
    f = row[0].field
    acc = 0
    for r, c in zip(row, column):
        if r.value and c.value:
            acc ^= f.mul(r.value, c.value)
    return FieldElement(acc, f)


def _repair_without_collaboration(code, live, failed, behaviors, policy, assumed, rng, report):
    """Fallback when a newcomer is Byzantine: everyone fetches the whole
    object (every row from every contact) and repairs alone."""
    t, kappa = len(live[0].payload), code.kappa
    responsive_live = [
        b for b in live if _behavior(behaviors, b.node_id) is not Behavior.SELFISH
    ]
    target = min(kappa + 2 * assumed, len(responsive_live)) if assumed else kappa

    new_blocks = []
    for j, f in enumerate(failed):
        order = _stripe(live, j, kappa)
        if policy is RepairPolicy.KEEP_RESPONDERS and not assumed:
            contacted = order[:kappa]
            responders = [
                b for b in contacted
                if _behavior(behaviors, b.node_id) is not Behavior.SELFISH
            ]
        else:
            contacted, responders = _pick_contacts(order, behaviors, kappa, target)
        report.contacted[f] = tuple(b.node_id for b in contacted)
        if len(responders) < kappa:
            raise RepairFailureError(
                "a full reconstruction needs more responsive contacts than available"
            )
        rows = []
        for r in range(t):
            eqs: dict[int, FieldElement] = {}
            for b in responders:
                ans = _row_answer(b, r, behaviors, rng)
                assert ans is not None
                eqs[b.position] = ans
                report.downloads[f][b.node_id] = report.downloads[f].get(b.node_id, 0) + 1
            rows.append(_decode_row(code, eqs))
        column = code.column(f - 1)
        payload = tuple(_eval_row(row, column) for row in rows)
        if _behavior(behaviors, f) is Behavior.POLLUTING:
            payload = tuple(_wrong_symbol(p, rng) for p in payload)
        new_blocks.append(NodeBlock(f, column, payload))
    return new_blocks


def progressive_repair_with_digests(
    code: RsCode,
    live_blocks: Sequence[NodeBlock],
    failed_ids: Sequence[int],
    behaviors: Optional[Mapping[int, Behavior]],
    digests: FragmentDigestTable,
    *,
    seed: int = 0,
) -> tuple[list[NodeBlock], RepairReport]:
    """Repair with integrity verification instead of equation voting.

    All newcomers share a contact set that starts at the kappa
    lowest-id live nodes.  Candidate rows are solved from kappa-sized
    subsets of the downloaded equations and the assembled blocks checked
    against the digest table; on mismatch one more live node is
    contacted and the subsets retried, so good equations are never spent
    merely to outvote bad ones.  Fails only when the live set is
    exhausted without a verified assembly.
    """
    behaviors = dict(behaviors or {})
    rng = random.Random(seed)
    live = sorted(live_blocks, key=lambda b: b.node_id)
    if not live:
        raise RepairFailureError("no live nodes")
    t = len(live[0].payload)
    kappa = code.kappa
    failed = sorted(int(i) for i in failed_ids)
    if len(failed) != t:
        raise ValueError(f"expected {t} failed ids, got {len(failed)}")
    if not digests.covers(failed):
        raise ValueError("digest table does not cover the failed nodes")
    if len(live) < kappa:
        raise RepairFailureError(f"{len(live)} live nodes, need at least {kappa}")

    report = RepairReport(unit_pieces=Fraction(t * kappa, kappa))
    byz = {f for f in failed if _behavior(behaviors, f) is not Behavior.HONEST}
    report.measured = tuple(f for f in failed if f not in byz)
    for f in failed:
        report.downloads[f] = {}

    # rows each newcomer must solve itself: its own, plus rows owned by
    # Byzantine peers (their pieces will not arrive via collaboration)
    needed: dict[int, list[int]] = {}
    for j, f in enumerate(failed):
        if f in byz:
            needed[f] = list(range(t))
        else:
            needed[f] = sorted({j} | {i for i, p in enumerate(failed) if p in byz})

    equations: dict[tuple[int, int], dict[int, FieldElement]] = {
        (f, r): {} for f in failed for r in needed[f]
    }

    def download_from(block: NodeBlock) -> None:
        for f in failed:
            for r in needed[f]:
                ans = _row_answer(block, r, behaviors, rng)
                if ans is None:
                    continue
                equations[(f, r)][block.position] = ans
                report.downloads[f][block.node_id] = (
                    report.downloads[f].get(block.node_id, 0) + 1
                )

    contact_count = 0
    for b in live[:kappa]:
        download_from(b)
        contact_count += 1

    while True:
        for f in failed:
            report.contacted[f] = tuple(b.node_id for b in live[:contact_count])
        result = _try_verified_assembly(
            code, failed, byz, needed, equations, digests, kappa, t, report
        )
        if result is not None:
            # a polluting newcomer stores garbage even after a verified repair
            out = []
            for block in result:
                if _behavior(behaviors, block.node_id) is Behavior.POLLUTING:
                    out.append(
                        NodeBlock(
                            block.node_id,
                            block.column,
                            tuple(_wrong_symbol(p, rng) for p in block.payload),
                        )
                    )
                else:
                    out.append(block)
            return out, report
        if contact_count >= len(live):
            raise RepairFailureError(
                f"no verified repair with all {len(live)} live nodes contacted"
            )
        download_from(live[contact_count])
        contact_count += 1


def _try_verified_assembly(code, failed, byz, needed, equations, digests, kappa, t, report):
    position_sets = [set(eqs.keys()) for eqs in equations.values()]
    positions = sorted(set.intersection(*position_sets)) if position_sets else []
    if len(positions) < kappa:
        return None
    honest = [f for f in failed if f not in byz]
    for subset in combinations(positions, kappa):
        rows: dict[tuple[int, int], tuple[FieldElement, ...]] = {}
        ok = True
        for f in failed:
            for r in needed[f]:
                eqs = equations[(f, r)]
                try:
                    rows[(f, r)] = rs_decode(code, [(p, eqs[p]) for p in subset])
                except DecodeError:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        # candidate cross pieces travel once per attempt between honest pairs
        for src in honest:
            for dst in honest:
                if src != dst:
                    key = (src, dst)
                    report.exchanges[key] = report.exchanges.get(key, 0) + 1
        blocks = []
        verified = True
        for f in failed:
            column = code.column(f - 1)
            payload: list[Optional[FieldElement]] = [None] * t
            for i, peer in enumerate(failed):
                if (f, i) in rows:
                    payload[i] = _eval_row(rows[(f, i)], column)
                else:
                    payload[i] = _eval_row(rows[(peer, i)], column)
            block = NodeBlock(f, column, tuple(payload))  # type: ignore[arg-type]
            if not digests.verify(block):
                verified = False
                break
            blocks.append(block)
        if verified:
            return blocks
    return None
