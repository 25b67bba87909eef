"""The adaptive network proper: per-signal update, the eight-state unit
machine, and habituation/dishabituation of firing counters and insertion
thresholds.

One processed signal advances every difference equation by one unit time
step.  States are never latched: after each signal the stored state of
every unit equals its classification recomputed from scratch, which keeps
all transitions reversible.

The per-signal update, given signal xi:

1. receive xi;
2. find the closest unit b and second-closest s;
3. connect b and s (or refresh the edge age to 0);
4. unless b is stable, age b's edges, drop those older than the age
   limit, and drop units this isolates;
5. if b is at least habituated: insert a new unit halfway to xi when xi
   is farther than b's insertion threshold, else merge b with s when s
   is closer than the merge radius;
6. decay the firing counters of b and its neighbors;
7. reclassify the states of every unit whose neighborhood changed;
8. adapt b's insertion threshold (down while singular, back up while
   regular);
9. move b toward xi, and, unless b is stable, its neighbors too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import IntEnum

import numpy as np

from .geometry import PointIndex, as_point, distance
from .simplicial import LinkClass, SimplicialComplex, classify_link, edge_key


class UnitState(IntEnum):
    """Topology-driven unit states, from freshly created to stable."""

    ACTIVE = 0        # firing counter still above the habituation threshold
    HABITUATED = 1    # counter crossed, link not yet fully habituated
    CONNECTED = 2     # unit and all link units habituated
    HALF_DISK = 3     # link is a simple open path
    DISK = 4          # link is a simple closed cycle
    BOUNDARY = 5      # half-disk with all neighbors regular
    PATCH = 6         # disk with all neighbors regular (the stable state)
    SINGULAR = 7      # link exceeds a sphere, or is a 3-cycle in dim 2


REGULAR_STATES = frozenset(
    {UnitState.HALF_DISK, UnitState.DISK, UnitState.BOUNDARY, UnitState.PATCH}
)
STABLE_STATES = frozenset({UnitState.PATCH})

STATE_NAMES = [s.name.lower() for s in UnitState]


@dataclass(frozen=True)
class SoamParams:
    """Every constant of the algorithm.

    Defaults are the common parameter set that proved adequate across the
    reference experiments: lr_winner=0.05, lr_neighbor=0.0005,
    tau_firing_winner=3.33, tau_firing_neighbor=14.33,
    firing_threshold=0.243, tau_radius_shrink=3, tau_radius_recover=9,
    max_edge_age=30, lr_stable=0.02, radius_min=0.5 and radius_max=25
    (10% of the rescaled bounding box).  radius_alpha defaults to
    1/(radius_max - radius_min) so the shrink fixed point is radius_min.
    """

    manifold_dim: int = 2
    firing_max: float = 1.0           # initial/maximum firing counter
    firing_threshold: float = 0.243   # habituated once firing falls to here
    firing_alpha: float = 1.05        # decay shape; floor = max - 1/alpha
    tau_firing_winner: float = 3.33
    tau_firing_neighbor: float = 14.33
    radius_max: float = 25.0          # initial/maximum insertion threshold
    radius_min: float = 0.5           # merge radius and shrink fixed point
    radius_alpha: float | None = None
    tau_radius_shrink: float = 3.0    # threshold decay while singular
    tau_radius_recover: float = 9.0   # threshold regrowth while regular
    max_edge_age: int = 30
    lr_winner: float = 0.05
    lr_neighbor: float = 0.0005
    lr_stable: float = 0.02
    seed: int = 0
    max_signals: int = 2_000_000
    stability_window: int = 10_000    # consecutive all-stable signals to stop

    def __post_init__(self):
        if self.radius_alpha is None:
            object.__setattr__(
                self, "radius_alpha", 1.0 / (self.radius_max - self.radius_min)
            )
        self.validate()

    def validate(self) -> None:
        if self.manifold_dim not in (1, 2):
            raise ValueError("manifold_dim must be 1 or 2")
        if not (0 < self.firing_threshold < self.firing_max):
            raise ValueError("need 0 < firing_threshold < firing_max")
        if not (0 < self.radius_min < self.radius_max):
            raise ValueError("need 0 < radius_min < radius_max")
        for name in ("tau_firing_winner", "tau_firing_neighbor",
                     "tau_radius_shrink", "tau_radius_recover"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("lr_winner", "lr_neighbor", "lr_stable"):
            v = getattr(self, name)
            if not (0 < v <= 1):
                raise ValueError(f"{name} must be in (0, 1]")
        if self.max_edge_age < 1:
            raise ValueError("max_edge_age must be >= 1")
        if self.firing_alpha <= 0 or self.radius_alpha <= 0:
            raise ValueError("alpha parameters must be positive")
        fixed = self.firing_max - 1.0 / self.firing_alpha
        if fixed >= self.firing_threshold:
            raise ValueError(
                "firing floor firing_max - 1/firing_alpha must lie below "
                "firing_threshold, otherwise units can never habituate"
            )
        if self.max_signals < 0 or self.stability_window < 1:
            raise ValueError("max_signals >= 0 and stability_window >= 1 required")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(slots=True)
class Unit:
    """A network vertex; its position lives in the state's point index."""

    uid: int
    firing: float
    threshold: float
    state: UnitState
    habituated: bool


@dataclass(slots=True)
class StepEvents:
    """Exactly the mutations performed by one processed signal."""

    winner: int = -1
    second: int = -1
    edge_created: bool = False
    edge_refreshed: bool = False
    unit_inserted: int | None = None
    units_merged: tuple[int, int] | None = None  # (kept, removed)
    edges_pruned: int = 0
    units_pruned: int = 0
    reseeded: int | None = None
    state_changes: list[tuple[int, UnitState, UnitState]] = field(default_factory=list)


@dataclass(slots=True)
class TelemetryFrame:
    """Per-interval census of the network (one CSV row)."""

    signal_index: int
    state_counts: tuple[int, ...]  # one entry per UnitState, in enum order
    units_total: int
    edges_total: int
    triangles_total: int
    insertions_cum: int
    merges_cum: int
    prunes_cum: int

    def __post_init__(self):
        if sum(self.state_counts) != self.units_total:
            raise ValueError("state counts must sum to the unit total")


@dataclass
class RunReport:
    stop_reason: str  # "stability" | "max_signals" | "stream_end"
    signals: int
    frames: list[TelemetryFrame]
    state: "SoamState"


# -- habituation / dishabituation steps (unit time step per signal) -------


def adapt_firing(firing: float, role: str, params: SoamParams) -> float:
    """One step of the firing-counter decay for a winner or a neighbor."""
    if role == "winner":
        tau = params.tau_firing_winner
    elif role == "neighbor":
        tau = params.tau_firing_neighbor
    else:
        raise ValueError("role must be 'winner' or 'neighbor'")
    return firing + (params.firing_alpha * (params.firing_max - firing) - 1.0) / tau


def adapt_threshold(threshold: float, state: UnitState, params: SoamParams) -> float:
    """One step of the insertion-threshold dynamics for the given state.

    Singular units shrink toward radius_min; regular units recover toward
    radius_max; every other state leaves the threshold unchanged.
    """
    if state is UnitState.SINGULAR:
        return threshold + (
            params.radius_alpha * (params.radius_max - threshold) - 1.0
        ) / params.tau_radius_shrink
    if state in REGULAR_STATES:
        return threshold + (params.radius_alpha / params.tau_radius_recover) * (
            params.radius_max - threshold
        )
    return threshold


class SoamState:
    """Full algorithm state: complex, unit payloads, positions, counters."""

    def __init__(self, params: SoamParams, dim: int):
        params.validate()
        self.params = params
        self.dim = dim
        self.complex = SimplicialComplex(params.manifold_dim)
        self.index = PointIndex(dim)
        self.next_id = 0
        self.signal_count = 0
        self.stable_streak = 0
        self.insertions = 0
        self.merges = 0
        self.pruned_edges = 0
        self.pruned_units = 0
        self.reseeds = 0
        self.state_counts = [0] * len(UnitState)
        self._link_class_cache: dict[int, LinkClass] = {}
        self._step_touched: set[int] = set()

    # -- basic accessors -------------------------------------------------

    @property
    def units(self) -> dict[int, Unit]:
        return self.complex.payloads  # type: ignore[return-value]

    @property
    def n_units(self) -> int:
        return self.complex.n_vertices

    def unit(self, uid: int) -> Unit:
        return self.complex.payload(uid)  # type: ignore[return-value]

    def position(self, uid: int) -> np.ndarray:
        return self.index.get(uid)

    def all_stable(self) -> bool:
        return self.n_units > 0 and self.state_counts[UnitState.PATCH] == self.n_units

    # -- unit lifecycle ----------------------------------------------------

    def _create_unit(self, pos) -> int:
        uid = self.next_id
        self.next_id += 1
        self.index.insert(uid, pos)
        unit = Unit(uid, self.params.firing_max, self.params.radius_max,
                    UnitState.ACTIVE, False)
        self.complex.add_vertex(uid, unit)
        self.state_counts[UnitState.ACTIVE] += 1
        return uid

    def _drop_unit(self, uid: int) -> None:
        unit = self.unit(uid)
        self.state_counts[unit.state] -= 1
        self.complex.remove_vertex(uid)
        self.index.remove(uid)
        self._link_class_cache.pop(uid, None)

    # -- state classification ---------------------------------------------

    def _link_class(self, uid: int) -> LinkClass:
        lc = self._link_class_cache.get(uid)
        if lc is None:
            lc = classify_link(self.complex.link_of(uid), self.params.manifold_dim)
            self._link_class_cache[uid] = lc
        return lc

    def _touch_links(self, ids) -> None:
        pop = self._link_class_cache.pop
        for uid in ids:
            pop(uid, None)
        self._step_touched.update(ids)

    def _is_regular(self, uid: int) -> bool:
        # First-order predicate: depends only on firing flags and topology,
        # never on other stored states, so recomputation order is irrelevant.
        unit = self.unit(uid)
        if not unit.habituated:
            return False
        lc = self._link_class(uid)
        if lc is not LinkClass.PATH and lc is not LinkClass.CYCLE:
            return False
        units = self.units
        return all(units[x].habituated for x in self.complex.neighbors(uid))

    def classify_unit(self, uid: int) -> UnitState:
        """Recompute the state of `uid` from scratch."""
        unit = self.unit(uid)
        if not unit.habituated:
            return UnitState.ACTIVE
        lc = self._link_class(uid)
        if lc is LinkClass.OVERCONNECTED or lc is LinkClass.CYCLE3:
            return UnitState.SINGULAR
        units = self.units
        nbrs = self.complex.neighbors(uid)
        if any(not units[x].habituated for x in nbrs):
            return UnitState.HABITUATED
        if lc is LinkClass.CYCLE:
            if all(self._is_regular(x) for x in nbrs):
                return UnitState.PATCH
            return UnitState.DISK
        if lc is LinkClass.PATH:
            if all(self._is_regular(x) for x in nbrs):
                return UnitState.BOUNDARY
            return UnitState.HALF_DISK
        return UnitState.CONNECTED

    def _apply_state(self, uid: int, new: UnitState, events: StepEvents) -> bool:
        unit = self.unit(uid)
        old = unit.state
        if new is old:
            return False
        unit.state = new
        self.state_counts[old] -= 1
        self.state_counts[new] += 1
        events.state_changes.append((uid, old, new))
        return True

    def _refresh_states(self, seeds: set[int], hab_flipped: list[int],
                        events: StepEvents) -> None:
        """Reclassify every unit whose state ingredients may have changed.

        Seeds are the winner, its neighbors, and all units whose link was
        touched.  A habituation crossing also invalidates the neighbors of
        the crossing unit, and a regularity flip invalidates the neighbors
        of the flipped unit (their boundary/patch refinement), which cannot
        flip regularity again, so two waves suffice.
        """
        units = self.units
        wave = {u for u in seeds if u in units}
        for h in hab_flipped:
            if h in units:
                wave.update(self.complex.neighbors(h))
        regular_flipped: list[int] = []
        for uid in sorted(wave):
            old_regular = units[uid].state in REGULAR_STATES
            new = self.classify_unit(uid)
            self._apply_state(uid, new, events)
            if (new in REGULAR_STATES) != old_regular:
                regular_flipped.append(uid)
        second = set()
        for uid in regular_flipped:
            second.update(self.complex.neighbors(uid))
        for uid in sorted(second - wave):
            self._apply_state(uid, self.classify_unit(uid), events)

    # -- the per-signal update ---------------------------------------------

    def process_signal(self, xi) -> StepEvents:
        """Run one full adaptation step for the input signal `xi`."""
        p = self.params
        cx = self.complex
        xi = as_point(xi, self.dim)
        self.signal_count += 1
        events = StepEvents()
        self._step_touched = set()

        # step 2: winner and runner-up
        b, s = self.index.nearest_two(xi)
        events.winner, events.second = b, s
        bu = self.unit(b)

        # step 3: competitive Hebbian edge
        if cx.add_edge(b, s):
            events.edge_created = True
            self._touch_links({b, s} | cx.common_neighbors(b, s))
        else:
            events.edge_refreshed = True

        # step 4: aging and pruning, unless the winner is stable
        if bu.state not in STABLE_STATES:
            ages = cx.edge_ages
            stale = []
            for x in cx.neighbors(b):
                key = edge_key(b, x)
                age = ages[key] + 1
                ages[key] = age
                if age > p.max_edge_age:
                    stale.append(x)
            for x in sorted(stale):
                self._touch_links({b, x} | cx.common_neighbors(b, x))
                cx.remove_edge(b, x)
                events.edges_pruned += 1
                self.pruned_edges += 1
                if cx.degree(x) == 0:
                    self._drop_unit(x)
                    events.units_pruned += 1
                    self.pruned_units += 1
            # the edge (b, s) was refreshed in step 3, so b and s survive

        # step 5: insertion or merge, for an at-least-habituated winner
        if bu.habituated:
            pos_b = self.index.get(b)
            if distance(xi, pos_b) > bu.threshold:
                new_pos = 0.5 * (pos_b + xi)
                n = self._create_unit(new_pos)
                events.unit_inserted = n
                self.insertions += 1
                cx.add_edge(b, n)
                self._touch_links({b, n} | cx.common_neighbors(b, n))
                self._touch_links({b, s} | cx.common_neighbors(b, s))
                cx.remove_edge(b, s)
                if cx.degree(s) == 0:
                    self._drop_unit(s)
                    events.units_pruned += 1
                    self.pruned_units += 1
            elif distance(self.index.get(s), pos_b) < p.radius_min:
                self._merge(b, s, events)

        if self.n_units < 2:
            # merging the last pair leaves one unit; recover deterministically
            r = self._create_unit(xi)
            events.reseeded = r
            self.reseeds += 1

        # step 6: firing-counter decay for the winner and its neighbors
        units = self.units
        hab_flipped: list[int] = []
        nbrs_b = cx.neighbors(b) if b in units else set()
        bu_alive = b in units
        if bu_alive:
            bu.firing = adapt_firing(bu.firing, "winner", p)
            if not bu.habituated and bu.firing <= p.firing_threshold:
                bu.habituated = True
                hab_flipped.append(b)
            for x in nbrs_b:
                xu = units[x]
                xu.firing = adapt_firing(xu.firing, "neighbor", p)
                if not xu.habituated and xu.firing <= p.firing_threshold:
                    xu.habituated = True
                    hab_flipped.append(x)

        # step 7: recompute states wherever ingredients changed
        touched = self._step_touched
        if touched or hab_flipped:
            seeds = touched
            if bu_alive:
                seeds = seeds | {b} | nbrs_b
            self._refresh_states(seeds, hab_flipped, events)

        # step 8: insertion-threshold adaptation of the winner
        if bu_alive:
            bu.threshold = adapt_threshold(bu.threshold, bu.state, p)

            # step 9: position adaptation
            pos_b = self.index.get(b)
            if bu.state in STABLE_STATES:
                pos_b += p.lr_stable * bu.firing * (xi - pos_b)
            else:
                pos_b += p.lr_winner * bu.firing * (xi - pos_b)
                if nbrs_b:
                    order = sorted(nbrs_b)
                    factors = [p.lr_neighbor * units[x].firing for x in order]
                    self.index.pull_toward(order, xi, factors)

        # stability bookkeeping
        if self.all_stable():
            self.stable_streak += 1
        else:
            self.stable_streak = 0
        return events

    def _merge(self, b: int, s: int, events: StepEvents) -> None:
        """Fold unit s into the winner b: midpoint position, rewired edges.

        Rewired edges keep their age; when an edge (b, x) already exists it
        takes the larger of the two ages, biasing toward pruning.
        """
        cx = self.complex
        pos_b = self.index.get(b)
        pos_b[:] = 0.5 * (pos_b + self.index.get(s))
        for x in sorted(cx.neighbors(s)):
            if x == b:
                continue
            age = cx.age(s, x)
            if cx.has_edge(b, x):
                key = edge_key(b, x)
                cx.edge_ages[key] = max(cx.edge_ages[key], age)
            else:
                cx.add_edge(b, x)
                cx.edge_ages[edge_key(b, x)] = age
                self._touch_links({b, x} | cx.common_neighbors(b, x))
        for x in sorted(cx.neighbors(s)):
            self._touch_links({s, x} | cx.common_neighbors(s, x))
        self._drop_unit(s)
        events.units_merged = (b, s)
        self.merges += 1

    # -- telemetry and the outer loop ---------------------------------------

    def telemetry_frame(self) -> TelemetryFrame:
        return TelemetryFrame(
            signal_index=self.signal_count,
            state_counts=tuple(self.state_counts),
            units_total=self.n_units,
            edges_total=self.complex.n_edges,
            triangles_total=self.complex.n_triangles,
            insertions_cum=self.insertions,
            merges_cum=self.merges,
            prunes_cum=self.pruned_edges,
        )

    def check_state_consistency(self) -> None:
        """Raise if any stored unit state disagrees with a from-scratch
        classification (test hook)."""
        self._link_class_cache.clear()
        for uid, unit in sorted(self.units.items()):
            expected = self.classify_unit(uid)
            if unit.state is not expected:
                raise AssertionError(
                    f"stale state for unit {uid}: stored {unit.state.name}, "
                    f"recomputed {expected.name}"
                )


def init(params: SoamParams, first_two_positions) -> SoamState:
    """Fresh state with two active, unconnected units at the given
    positions (draw them from the input distribution)."""
    p0, p1 = (as_point(q) for q in first_two_positions)
    if p0.shape != p1.shape:
        raise ValueError("initial positions must share a dimension")
    state = SoamState(params, p0.shape[0])
    state._create_unit(p0)
    state._create_unit(p1)
    return state


def process_signal(state: SoamState, xi) -> StepEvents:
    return state.process_signal(xi)


def update_state(state: SoamState, uid: int) -> UnitState:
    """Recompute, store and return the state of one unit."""
    if uid not in state.units:
        raise KeyError(f"unknown unit id {uid}")
    events = StepEvents()
    state._refresh_states({uid}, [], events)
    return state.unit(uid).state


def run(
    state: SoamState,
    signal_source,
    max_signals: int | None = None,
    stability_window: int | None = None,
    telemetry_interval: int = 1000,
    on_frame=None,
) -> RunReport:
    """Feed signals until stability, the signal budget, or stream end.

    `signal_source` must provide `next_signal() -> point | None`.  The
    signal budget counts the total signals ever processed by `state`, so
    resumed runs continue where they left off.
    """
    cap = state.params.max_signals if max_signals is None else max_signals
    window = (
        state.params.stability_window if stability_window is None else stability_window
    )
    frames: list[TelemetryFrame] = []

    def emit():
        frame = state.telemetry_frame()
        frames.append(frame)
        if on_frame is not None:
            on_frame(frame)

    reason = "max_signals"
    while state.signal_count < cap:
        xi = signal_source.next_signal()
        if xi is None:
            reason = "stream_end"
            break
        state.process_signal(xi)
        if telemetry_interval and state.signal_count % telemetry_interval == 0:
            emit()
        if state.stable_streak >= window:
            reason = "stability"
            break
    if telemetry_interval and (
        not frames or frames[-1].signal_index != state.signal_count
    ):
        emit()
    return RunReport(reason, state.signal_count, frames, state)
