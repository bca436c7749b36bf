"""Belief-DAG construction for one side of a team game.

Decision points are beliefs (sets of plausible nodes at one depth);
each action is a prescription assigning one move to every information
set that meets the belief, and leads to an observation point whose
candidate set — prescribed children of own nodes, all children of
everyone else's — is split back into beliefs.  Beliefs are memoized, so
shared futures are built once; observation points are never shared.

Two split policies are supported: ``"observation"`` uses connected
components of the indistinguishability graph (the finest sound split),
``"public"`` groups candidates by public state (coarser, and
exponentially larger on some games).

Postprocessing (``reduce=True``) removes redundancy without changing
the strategy polytope: terminals sharing the side's action history keep
a single representative (their realization weights are always equal),
sections left with no terminal below are dropped, and pass-through
decision points with one parent and one action are spliced out.  On a
perfect-recall side this collapses the DAG to the classic sequence
form.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass

from .analysis import (
    GameAnalysis,
    analyze,
    coordinator_view,
    split_observation,
    split_public,
)
from .dag import DagDecisionProblem, ProblemBuilder
from .game import (
    BudgetExceededError,
    ExtensiveFormGame,
    GameValidationError,
    TERMINAL,
)

SPLITS = ("observation", "public")


@dataclass(frozen=True)
class BuildStats:
    """Size accounting for one built belief DAG.

    ``n_obs`` and ``n_edges`` exclude the artificial root observation
    point and its edge, so they match hand counts on the drawn DAG.
    """

    side: str
    split: str
    reduced: bool
    n_dec: int
    n_obs: int
    n_edges: int
    max_belief: int
    max_fanout: int
    max_fanout_belief: tuple[int, ...]
    dedup_hits: int
    prescription_bound: int


@dataclass(frozen=True)
class TbDag:
    """A packed belief DAG plus the maps tying it back to the game.

    ``beliefs[d]`` is the sorted node tuple of decision point ``d``;
    ``dec_infosets[d]`` the infosets meeting it in ascending id order;
    ``prescriptions[a]`` the action index chosen at each of those
    infosets for action slot ``a``.  Payload slots stand for groups of
    terminals with equal side action history: ``slot_groups[s]`` lists
    the group's members and ``slot_of_terminal[z]`` inverts it.
    """

    game: ExtensiveFormGame
    side: str
    split: str
    reduced: bool
    problem: DagDecisionProblem
    beliefs: tuple[tuple[int, ...], ...]
    dec_infosets: tuple[tuple[int, ...], ...]
    prescriptions: tuple[tuple[int, ...], ...]
    slot_groups: tuple[tuple[int, ...], ...]
    slot_of_terminal: dict[int, int]
    stats: BuildStats

    def belief_of(self, d: int) -> tuple[int, ...]:
        return self.beliefs[d]


def _split_fn(split: str):
    if split == "observation":
        return split_observation
    if split == "public":
        return split_public
    raise GameValidationError(
        f"unknown split {split!r}; expected one of {SPLITS}"
    )


class _Workspace:
    """Mutable belief-DAG under construction (terminals as payload)."""

    def __init__(self):
        self.dec_belief: list[tuple[int, ...]] = []
        self.dec_isets: list[tuple[int, ...]] = []
        self.dec_actions: list[list[int]] = []
        self.dec_prescr: list[list[tuple[int, ...]]] = []
        self.dec_parents: list[list[int]] = []
        self.dec_alive: list[bool] = []
        self.obs_parent: list[int] = []
        self.obs_children: list[list[int]] = []
        self.obs_payload: list[list[int]] = []
        self.obs_alive: list[bool] = []
        self.dedup_hits = 0
        self.edges = 0

    def new_dec(self, belief, isets):
        self.dec_belief.append(belief)
        self.dec_isets.append(isets)
        self.dec_actions.append([])
        self.dec_prescr.append([])
        self.dec_parents.append([])
        self.dec_alive.append(True)
        return len(self.dec_belief) - 1

    def new_obs(self, parent):
        self.obs_parent.append(parent)
        self.obs_children.append([])
        self.obs_payload.append([])
        self.obs_alive.append(True)
        return len(self.obs_parent) - 1


def _expand(ws, g, analysis, split_parts, d, budget, fanout_guard, memo, queue):
    belief = ws.dec_belief[d]
    side = analysis.side
    by_iset: dict[int, list[int]] = {}
    free: list[int] = []
    for h in belief:
        if g.node_side(h) == side:
            by_iset.setdefault(g.infoset[h], []).append(h)
        else:
            free.append(h)
    isets = tuple(sorted(by_iset))
    ws.dec_isets[d] = isets
    if len(isets) > fanout_guard:
        raise BudgetExceededError(
            f"belief of {len(belief)} nodes at depth "
            f"{g.depth[belief[0]]} meets {len(isets)} infosets "
            f"(fan-out guard {fanout_guard})"
        )
    counts = [g.infosets[i].num_actions for i in isets]
    n_prescr = math.prod(counts)
    if ws.edges + n_prescr > budget:
        raise BudgetExceededError(
            f"edge budget {budget} exceeded while expanding a belief "
            f"with {n_prescr} prescriptions"
        )
    free_children = [c for h in free for c in g.children[h]]
    for prescr in itertools.product(*(range(c) for c in counts)):
        cand = list(free_children)
        for i, a in zip(isets, prescr):
            for h in by_iset[i]:
                cand.append(g.children[h][a])
        o = ws.new_obs(d)
        ws.dec_actions[d].append(o)
        ws.dec_prescr[d].append(prescr)
        ws.edges += 1
        for part in split_parts(analysis, cand):
            ws.edges += 1
            if len(part) == 1 and g.kind[part[0]] == TERMINAL:
                ws.obs_payload[o].append(part[0])
                continue
            child = memo.get(part)
            if child is None:
                child = memo[part] = ws.new_dec(part, ())
                queue.append(child)
            else:
                ws.dedup_hits += 1
            ws.obs_children[o].append(child)
            ws.dec_parents[child].append(o)
        if ws.edges > budget:
            raise BudgetExceededError(f"edge budget {budget} exceeded")


def _dedup_terminals(ws, seq_of):
    """Merge terminals that share a coordinator action history.

    All such terminals have identical realization weight under every
    coordinator strategy, so one representative per history suffices.
    Every payload occurrence of a representative is kept (a terminal is
    emitted once per prescription that produces it, and its realization
    is the sum of flow over those occurrences); occurrences of the other
    group members are dropped, which may leave whole sections without
    payoff entries — those are pruned afterwards.  Payload entries are
    rewritten from node ids to slot ids.
    """
    groups: list[list[int]] = []
    slot_by_seq: dict[int, int] = {}
    rep: dict[int, int] = {}
    for o in range(len(ws.obs_payload)):
        kept: list[int] = []
        for z in ws.obs_payload[o]:
            s = slot_by_seq.get(seq_of[z])
            if s is None:
                s = slot_by_seq[seq_of[z]] = len(groups)
                groups.append([z])
                rep[s] = z
                kept.append(s)
            else:
                if z not in groups[s]:
                    groups[s].append(z)
                if z == rep[s]:
                    kept.append(s)
        ws.obs_payload[o] = kept
    return groups


def _slots_raw(ws):
    groups: list[list[int]] = []
    slot_of: dict[int, int] = {}
    for o in range(len(ws.obs_payload)):
        row = []
        for z in ws.obs_payload[o]:
            s = slot_of.get(z)
            if s is None:
                s = slot_of[z] = len(groups)
                groups.append([z])
            row.append(s)
        ws.obs_payload[o] = row
    return groups


def _prune_dead(ws):
    """Drop observation points with nothing below, cascading upward."""
    changed = True
    while changed:
        changed = False
        for o in range(len(ws.obs_parent)):
            if not ws.obs_alive[o]:
                continue
            if ws.obs_children[o] or ws.obs_payload[o]:
                continue
            ws.obs_alive[o] = False
            changed = True
            d = ws.obs_parent[o]
            i = ws.dec_actions[d].index(o)
            del ws.dec_actions[d][i]
            del ws.dec_prescr[d][i]
            ws.edges -= 1
            if not ws.dec_actions[d]:
                ws.dec_alive[d] = False
                for po in ws.dec_parents[d]:
                    if ws.obs_alive[po]:
                        ws.obs_children[po].remove(d)
                        ws.edges -= 1


def _splice_passthrough(ws, root_dec):
    """Remove non-root decision points with one parent and one action,
    attaching the grandchildren straight to the parent observation."""
    for d in range(len(ws.dec_belief)):
        if not ws.dec_alive[d] or d == root_dec:
            continue
        if len(ws.dec_parents[d]) != 1 or len(ws.dec_actions[d]) != 1:
            continue
        po = ws.dec_parents[d][0]
        o = ws.dec_actions[d][0]
        ws.dec_alive[d] = False
        ws.obs_alive[o] = False
        ws.obs_children[po].remove(d)
        ws.edges -= 2  # the parent->d edge and d's action edge
        for child in ws.obs_children[o]:
            ws.obs_children[po].append(child)
            ws.dec_parents[child] = [
                po if x == o else x for x in ws.dec_parents[child]
            ]
        ws.obs_payload[po].extend(ws.obs_payload[o])


def build_tbdag(
    g: ExtensiveFormGame,
    side: str,
    *,
    split: str = "observation",
    reduce: bool = True,
    analysis: GameAnalysis | None = None,
    edge_budget: int = 10**8,
    fanout_guard: int = 24,
) -> TbDag:
    """Construct one side's belief DAG directly from the game tree."""
    split_parts = _split_fn(split)
    if analysis is None:
        analysis = analyze(g, side)
    elif analysis.side != side:
        raise GameValidationError(
            f"analysis is for side {analysis.side!r}, not {side!r}"
        )
    if g.kind[g.root] == TERMINAL:
        raise GameValidationError("the game is a single terminal node")

    ws = _Workspace()
    memo: dict[tuple[int, ...], int] = {}
    root_belief = (g.root,)
    root_dec = memo[root_belief] = ws.new_dec(root_belief, ())
    queue = [root_dec]
    while queue:
        _expand(
            ws, g, analysis, split_parts, queue.pop(),
            edge_budget, fanout_guard, memo, queue,
        )

    if reduce:
        groups = _dedup_terminals(ws, coordinator_view(g, side).seq_of)
        _prune_dead(ws)
        _splice_passthrough(ws, root_dec)
    else:
        groups = _slots_raw(ws)

    return _pack(g, side, split, reduce, analysis, ws, root_dec, groups)


def _pack(g, side, split, reduce, analysis, ws, root_dec, groups):
    b = ProblemBuilder(side, len(groups))
    dec_id: dict[int, int] = {}
    for d in range(len(ws.dec_belief)):
        if ws.dec_alive[d]:
            dec_id[d] = b.add_dec(meta=d)
    b.add_obs_child(0, dec_id[root_dec])
    for d, bd in dec_id.items():
        for o in ws.dec_actions[d]:
            no = b.add_obs(payload=ws.obs_payload[o])
            b.add_action(bd, no)
            for child in ws.obs_children[o]:
                b.add_obs_child(no, dec_id[child])
    problem = b.finalize()

    beliefs = tuple(ws.dec_belief[old] for old in problem.dec_meta)
    dec_isets = tuple(ws.dec_isets[old] for old in problem.dec_meta)
    prescriptions = tuple(
        prescr
        for old in problem.dec_meta
        for prescr in ws.dec_prescr[old]
    )
    slot_groups = tuple(tuple(sorted(grp)) for grp in groups)
    slot_of = {
        z: s for s, grp in enumerate(slot_groups) for z in grp
    }

    n_obs = problem.n_obs - 1
    n_edges = (
        problem.n_act
        + (len(problem.obs_children) - 1)
        + len(problem.payload)
    )
    side_b = max(
        (g.infosets[i].num_actions for i in g.side_infosets(side)),
        default=0,
    )
    counts = problem.action_counts()
    max_d = int(counts.argmax())
    stats = BuildStats(
        side=side,
        split=split,
        reduced=reduce,
        n_dec=problem.n_dec,
        n_obs=n_obs,
        n_edges=n_edges,
        max_belief=max(len(bl) for bl in beliefs),
        max_fanout=int(counts[max_d]),
        max_fanout_belief=beliefs[max_d],
        dedup_hits=ws.dedup_hits,
        prescription_bound=(side_b + 1) ** analysis.k,
    )
    return TbDag(
        game=g,
        side=side,
        split=split,
        reduced=reduce,
        problem=problem,
        beliefs=beliefs,
        dec_infosets=dec_isets,
        prescriptions=prescriptions,
        slot_groups=slot_groups,
        slot_of_terminal=slot_of,
        stats=stats,
    )


# ---------------------------------------------------------------------
# Size bounds and split comparison
# ---------------------------------------------------------------------


def check_size_bounds(dag: TbDag, analysis: GameAnalysis | None = None):
    """Verify the edge count against |H|(b+1)^(k+1); raise if violated.

    Returns a report dict with the slack.  For binary-branching games
    the per-node edge ratio is also reported against 3^(k+1).
    """
    g = dag.game
    if analysis is None:
        analysis = analyze(g, dag.side)
    b = g.branching_factor
    k = analysis.k
    bound = g.num_nodes * (b + 1) ** (k + 1)
    report = {
        "side": dag.side,
        "edges": dag.stats.n_edges,
        "bound": bound,
        "slack": bound / max(dag.stats.n_edges, 1),
        "k": k,
        "branching": b,
    }
    if b <= 2:
        report["binary_ratio"] = dag.stats.n_edges / g.num_nodes
        report["binary_cap"] = 3 ** (k + 1)
    if dag.stats.n_edges > bound:
        raise GameValidationError(
            f"edge bound violated for side {dag.side}: "
            f"{dag.stats.n_edges} > {bound}"
        )
    return report


def count_tbdag(
    g: ExtensiveFormGame,
    side: str,
    *,
    split: str = "public",
    analysis: GameAnalysis | None = None,
    edge_budget: int = 10**8,
) -> tuple[int, int, int]:
    """Count (decision points, observation points, edges) of the raw
    DAG without materializing it.

    Under the public split, candidate sets factor over next-depth
    public groups, so per-belief totals have closed forms: observation
    points count as the prescription product, and edges into one group
    count prescriptions touching it by inclusion-exclusion.  Distinct
    child beliefs come from unions of per-infoset child sets, never
    from enumerating whole prescriptions.  The observation split does
    not factor this way (components depend on the entire candidate
    set), so that path simply defers to :func:`build_tbdag`.
    """
    if analysis is None:
        analysis = analyze(g, side)
    if split != "public":
        dag = build_tbdag(
            g, side, split=split, reduce=False,
            analysis=analysis, edge_budget=edge_budget,
        )
        return dag.stats.n_dec, dag.stats.n_obs, dag.stats.n_edges

    public_id = analysis.unconditional_id
    n_dec = n_obs = edges = 0
    seen = {(g.root,)}
    queue = [(g.root,)]
    while queue:
        belief = queue.pop()
        n_dec += 1
        by_iset: dict[int, list[int]] = {}
        free: list[int] = []
        for h in belief:
            if g.node_side(h) == side:
                by_iset.setdefault(g.infoset[h], []).append(h)
            else:
                free.append(h)
        isets = sorted(by_iset)
        counts = [g.infosets[i].num_actions for i in isets]
        n_prescr = math.prod(counts)
        n_obs += n_prescr
        edges += n_prescr
        # Bucket every possible child by its public state.
        free_members: dict[int, list[int]] = {}
        for h in free:
            for c in g.children[h]:
                free_members.setdefault(public_id[c], []).append(c)
        # per_iset[j]: public state -> per-action child sets there.
        per_iset: list[dict[int, list[frozenset[int]]]] = []
        pids: set[int] = set(free_members)
        for i, c in zip(isets, counts):
            action_kids: list[dict[int, set[int]]] = []
            for a in range(c):
                kids: dict[int, set[int]] = {}
                for h in by_iset[i]:
                    ch = g.children[h][a]
                    kids.setdefault(public_id[ch], set()).add(ch)
                action_kids.append(kids)
            touched_pids = set().union(*action_kids)
            pids |= touched_pids
            per_iset.append({
                pid: [
                    frozenset(action_kids[a].get(pid, ()))
                    for a in range(c)
                ]
                for pid in touched_pids
            })
        for pid in sorted(pids):
            if pid in free_members:
                touched = n_prescr
            else:
                # A prescription misses this public state exactly when
                # every infoset picks an action with no child in it.
                miss = 1
                for c, by_action in zip(counts, per_iset):
                    sets = by_action.get(pid)
                    if sets is None:
                        miss *= c
                    else:
                        miss *= sum(1 for s in sets if not s)
                touched = n_prescr - miss
            edges += touched
            if edges > edge_budget:
                raise BudgetExceededError(
                    f"edge budget {edge_budget} exceeded while counting"
                )
            _discover(
                g, pid, free_members.get(pid, ()), per_iset,
                counts, seen, queue,
            )
    return n_dec, n_obs, edges


def _discover(g, pid, free_members, per_iset, counts, seen, queue):
    """Enqueue every distinct child belief inside one public state."""
    base = frozenset(free_members)
    options: list[list[frozenset[int]]] = []
    for c, by_action in zip(counts, per_iset):
        sets = by_action.get(pid)
        if sets is None:
            continue
        distinct = list(dict.fromkeys(sets))
        if len(distinct) > 1 or distinct[0]:
            options.append(distinct)
    combo_count = math.prod(len(o) for o in options)
    if combo_count > 1_000_000:
        raise BudgetExceededError(
            f"child-belief discovery needs {combo_count} combinations"
        )
    for combo in itertools.product(*options):
        part = base.union(*combo) if combo else base
        if not part:
            continue
        members = tuple(sorted(part))
        if len(members) == 1 and g.kind[members[0]] == TERMINAL:
            continue
        if members not in seen:
            seen.add(members)
            queue.append(members)


def compare_splits(
    g: ExtensiveFormGame,
    side: str,
    *,
    analysis: GameAnalysis | None = None,
    edge_budget: int = 10**8,
) -> tuple[int, int]:
    """Raw edge counts of the observation- and public-split DAGs."""
    if analysis is None:
        analysis = analyze(g, side)
    obs = build_tbdag(
        g, side, split="observation", reduce=False,
        analysis=analysis, edge_budget=edge_budget,
    ).stats.n_edges
    _, _, pub = count_tbdag(
        g, side, split="public",
        analysis=analysis, edge_budget=edge_budget,
    )
    return obs, pub


# ---------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------


def dag_signature(dag: TbDag) -> str:
    """Content hash invariant under decision/observation renumbering.

    Keyed on belief node sets and terminal groups, so two builds over
    the same node ids (for instance before and after inflation) hash
    equal exactly when they are the same DAG up to reordering.
    """
    records = []
    for d in range(dag.problem.n_dec):
        p = dag.problem
        obs_records = []
        for a in range(p.dec_aoff[d], p.dec_aoff[d + 1]):
            o = p.act_child_obs[a]
            kids = sorted(
                dag.beliefs[c]
                for c in p.obs_children[p.obs_coff[o]: p.obs_coff[o + 1]]
            )
            pay = sorted(
                dag.slot_groups[s] for s in p.obs_payload(o)
            )
            obs_records.append((tuple(kids), tuple(pay)))
        records.append((dag.beliefs[d], tuple(sorted(obs_records))))
    records.sort()
    blob = json.dumps(records, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def tbdag_to_doc(dag: TbDag) -> dict:
    """Plain-data serialization (stable across runs) for dumps."""
    p = dag.problem
    return {
        "side": dag.side,
        "split": dag.split,
        "reduced": dag.reduced,
        "n_dec": p.n_dec,
        "n_obs": p.n_obs,
        "dec_aoff": p.dec_aoff.tolist(),
        "act_child_obs": p.act_child_obs.tolist(),
        "obs_coff": p.obs_coff.tolist(),
        "obs_children": p.obs_children.tolist(),
        "obs_poff": p.obs_poff.tolist(),
        "payload": p.payload.tolist(),
        "beliefs": [list(bl) for bl in dag.beliefs],
        "dec_infosets": [list(t) for t in dag.dec_infosets],
        "prescriptions": [list(t) for t in dag.prescriptions],
        "slot_groups": [list(t) for t in dag.slot_groups],
        "stats": {
            "n_edges": dag.stats.n_edges,
            "max_belief": dag.stats.max_belief,
            "max_fanout": dag.stats.max_fanout,
            "dedup_hits": dag.stats.dedup_hits,
            "prescription_bound": dag.stats.prescription_bound,
        },
    }
