"""Decentralized task allocation: greedy bundles plus pairwise consensus.

Each evader keeps a private belief of the cheapest known bid (winning cost)
and its holder (winning agent) per task. A round has every agent extend its
bundle greedily with tasks it can undercut, broadcast its belief, and then
reconcile everyone else's broadcast pairwise. An agent that loses any task it
was counting on releases its whole bundle, because each leg of its path was
priced against the legs before it. Rounds repeat until every agent holds the
same winner table or the round budget runs out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .losses import INFEASIBLE, insert_at, marginal_cost
from .scenario import EvaderState, ScenarioConfig, SpatioTemporalTask, Vec2


@dataclass(slots=True)
class AgentBelief:
    """One evader's working memory across auction rounds."""

    agent_id: int
    bundle: list[int] = field(default_factory=list)  # in order of acquisition
    path: list[int] = field(default_factory=list)    # in order of execution
    winning_cost: dict[int, float] = field(default_factory=dict)
    winning_agent: dict[int, int | None] = field(default_factory=dict)

    @classmethod
    def fresh(cls, agent_id: int, task_ids: list[int]) -> "AgentBelief":
        return cls(agent_id=agent_id,
                   winning_cost={j: INFEASIBLE for j in task_ids},
                   winning_agent={j: None for j in task_ids})


@dataclass(frozen=True, slots=True)
class ConsensusMessage:
    """Snapshot of a sender's winner tables, broadcast once per round."""

    sender_id: int
    winning_cost: dict[int, float]
    winning_agent: dict[int, int | None]


@dataclass(frozen=True, slots=True)
class AllocationResult:
    paths: dict[int, list[int]]            # evader id -> ordered task ids
    assignment: dict[int, int | None]      # task id -> evader id or None
    rounds_used: int
    converged: bool


def build_bundle(belief: AgentBelief, evader: EvaderState,
                 tasks: dict[int, SpatioTemporalTask],
                 intruder_positions: dict[int, Vec2],
                 cfg: ScenarioConfig) -> None:
    """Greedily grow the agent's bundle until no task is worth outbidding.

    Each pass scores every unbundled task by its cheapest insertion into the
    current path, keeps those that strictly undercut the known winning cost,
    and commits the cheapest (smallest task id on ties) at its best slot
    (smallest slot on ties). Stops when the improving set is empty. Updates
    the belief's own winner tables in place.
    """
    task_ids = sorted(tasks)
    path = belief.path
    bundle = belief.bundle
    win_cost = belief.winning_cost
    win_agent = belief.winning_agent
    in_bundle = set(bundle)
    # Bids are floored at the previous acquisition's bid, so an agent's bid
    # sequence never decreases along its own bundle. Inserting a task can
    # genuinely cheapen a later insertion (the new point may sit right on
    # the way), and auctioning such discounts at face value lets released
    # tasks re-price upward and the fleet chase prices in circles forever.
    floor = win_cost[bundle[-1]] if bundle else -math.inf
    while True:
        best_id: int | None = None
        best_bid = INFEASIBLE
        best_slot = 0
        for j in task_ids:
            if j in in_bundle:
                continue
            cost, slot = marginal_cost(path, evader, j, tasks,
                                       intruder_positions, cfg)
            bid = cost if cost > floor else floor
            if bid < win_cost[j] and bid < best_bid:
                best_id, best_bid, best_slot = j, bid, slot
        if best_id is None:
            return
        path.insert(best_slot, best_id)
        bundle.append(best_id)
        in_bundle.add(best_id)
        win_cost[best_id] = best_bid
        win_agent[best_id] = belief.agent_id
        floor = best_bid


def consensus_step(belief: AgentBelief, msg: ConsensusMessage) -> set[int]:
    """Reconcile one incoming broadcast into the belief, in place.

    Per task, the sender's claim is either adopted (update), discarded in
    favor of no winner (reset), or left alone, following the pairwise rule
    table keyed on who each side thinks is winning. Equal-cost claims break
    toward the lower agent id. Returns the ids of bundled tasks this agent
    no longer believes it holds afterward; the caller must release them.
    """
    i = belief.agent_id
    k = msg.sender_id
    win_cost = belief.winning_cost
    win_agent = belief.winning_agent
    lost: set[int] = set()
    in_bundle = set(belief.bundle)
    for j, sender_winner in msg.winning_agent.items():
        sender_cost = msg.winning_cost[j]
        local_winner = win_agent[j]
        action = 0  # 1 adopt sender's entry, 2 reset to no winner
        if local_winner == k:
            # The sender is the very agent we credit with this task, so its
            # own word is the freshest possible information about it. Adopt
            # whatever it reports: a re-priced claim of its own, a handoff
            # to a third agent, or (on mutual confusion or a release) drop
            # the entry entirely. Without this, a credit toward an agent
            # that no longer claims the task could never be cleared.
            if sender_winner == i or sender_winner is None:
                action = 2
            else:
                action = 1
        elif sender_winner == k:
            # A competing claim by the sender itself: strictly cheaper wins,
            # equal cost breaks toward the lower agent id.
            if (sender_cost < win_cost[j]
                    or (sender_cost == win_cost[j] and k < i)):
                action = 1
        elif sender_winner is not None and sender_winner != i:
            # Hearsay crediting a third agent: only a strictly cheaper bid
            # displaces the local entry, and displacement means reopening
            # the task rather than trusting the relayed price.
            if local_winner != sender_winner and sender_cost < win_cost[j]:
                action = 2
        # Remaining cells: the sender credits this agent, or reports no
        # winner for a task this agent does not credit to the sender; the
        # local view stands.
        if action:
            if action == 1:
                win_cost[j] = sender_cost
                win_agent[j] = sender_winner
            else:
                win_cost[j] = INFEASIBLE
                win_agent[j] = None
            if local_winner == i and j in in_bundle:
                lost.add(j)
    return lost


def release_on_loss(belief: AgentBelief, lost_tasks: set[int]) -> None:
    """Drop the whole bundle once any of its tasks is lost.

    Every leg was priced against its predecessors, so losing one invalidates
    the committed costs of everything acquired after it; the cheap, safe move
    is to give the entire path back. Tasks this agent still nominally holds
    are reopened (no winner, infinite cost); tasks already re-credited to
    other agents keep the learned winner and cost.
    """
    if not lost_tasks:
        return
    i = belief.agent_id
    for j in belief.bundle:
        if belief.winning_agent[j] == i:
            belief.winning_agent[j] = None
            belief.winning_cost[j] = INFEASIBLE
    belief.bundle.clear()
    belief.path.clear()


def resolve(evaders: list[EvaderState],
            tasks: dict[int, SpatioTemporalTask],
            intruder_positions: dict[int, Vec2],
            cfg: ScenarioConfig) -> AllocationResult:
    """Run auction rounds over a synchronous all-to-all broadcast.

    Every round each agent rebuilds its bundle, all beliefs are snapshotted,
    and each agent folds in every other agent's snapshot (ascending sender
    id) before releasing whatever it lost. Convergence is every agent holding
    an identical winning-agent table; the round budget is consensus_max_rounds
    when positive, else 4 * num agents * num tasks.

    Unconverged runs still return a conflict-free best effort: each agent
    keeps the path tasks it claims, duplicate claims go to the cheaper bid
    (lower agent id on ties), and everything else is unassigned.
    """
    agents = sorted(evaders, key=lambda e: e.id)
    task_ids = sorted(tasks)
    beliefs = {e.id: AgentBelief.fresh(e.id, task_ids) for e in agents}
    if cfg.consensus_max_rounds > 0:
        max_rounds = cfg.consensus_max_rounds
    else:
        max_rounds = 4 * max(1, len(agents)) * max(1, len(task_ids))
    rounds_used = 0
    converged = False
    while rounds_used < max_rounds:
        rounds_used += 1
        for e in agents:
            build_bundle(beliefs[e.id], e, tasks, intruder_positions, cfg)
        msgs = [ConsensusMessage(e.id,
                                 dict(beliefs[e.id].winning_cost),
                                 dict(beliefs[e.id].winning_agent))
                for e in agents]
        for e in agents:
            belief = beliefs[e.id]
            lost: set[int] = set()
            for msg in msgs:
                if msg.sender_id == e.id:
                    continue
                lost |= consensus_step(belief, msg)
            release_on_loss(belief, lost)
        first = beliefs[agents[0].id].winning_agent
        if all(beliefs[e.id].winning_agent == first for e in agents[1:]):
            converged = True
            break

    if converged:
        table = beliefs[agents[0].id].winning_agent
        assignment = {j: table[j] for j in task_ids}
        paths = {e.id: list(beliefs[e.id].path) for e in agents}
        return AllocationResult(paths, assignment, rounds_used, True)

    # Best effort without agreement: honor own-path claims, cheaper bid wins
    # duplicates, losers drop the task from their path.
    claims: dict[int, tuple[float, int]] = {}
    for e in agents:
        belief = beliefs[e.id]
        for j in belief.path:
            if belief.winning_agent[j] != e.id:
                continue
            bid = (belief.winning_cost[j], e.id)
            if j not in claims or bid < claims[j]:
                claims[j] = bid
    assignment = {j: claims[j][1] if j in claims else None for j in task_ids}
    paths = {}
    for e in agents:
        paths[e.id] = [j for j in beliefs[e.id].path if assignment.get(j) == e.id]
    return AllocationResult(paths, assignment, rounds_used, False)
