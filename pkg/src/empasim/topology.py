"""Interconnect topologies and routing.

Three models:

* Direct: every communicating pair has a dedicated wire; transfers on
  distinct wires overlap freely, so completion times never depend on other
  traffic.
* SharedBus: a single serial bus; at most one message occupies it at a
  time. Arbitration is FIFO on request time with ties broken by NodeId
  ascending. Optionally a multi-target send is a broadcast: one occupancy,
  all addressees delivered together.
* Empa: cores arranged in clusters on a 2D grid with 8-neighborhood
  (Chebyshev metric). Inter-core communication blocks next to each core
  forward messages over dedicated wires up to 2 hops away, even across a
  cluster boundary, at t_hop per hop and with no contention. Anything
  farther goes through the cluster head (one per cluster, fixed at the
  cluster's top-left cell), which relays within the cluster or forwards
  through its gateway onto a hierarchical bus toward the destination
  cluster's head. Cores are addressed by virtual ids that are mapped to
  physical grid cells; a virtual core can be remapped between runs, e.g.
  to route around a faulty cell.

Clusters tile the global grid side by side in a single row, so cells near
a shared cluster boundary are genuine grid neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import CapacityError, RemapError, RoutingError, UsageError

__all__ = [
    "NodeId",
    "Segment",
    "Path",
    "BusLevel",
    "Topology",
    "DirectTopology",
    "SharedBusTopology",
    "EmpaTopology",
    "build_direct",
    "build_shared_bus",
    "build_empa",
    "route",
    "remap_core",
]

# Flat index for direct/shared-bus nodes; (cluster, row, col) for Empa.
NodeId = Union[int, tuple[int, int, int]]


def node_sort_key(node: NodeId) -> tuple:
    if isinstance(node, int):
        return (node, 0, 0)
    return node


@dataclass(frozen=True)
class Segment:
    """One leg of a path: a medium and its contention-free latency."""

    medium: str  # "wire" | "iccb" | "head" | "bus"
    latency: int
    bus_id: str | None = None


@dataclass(frozen=True)
class Path:
    segments: tuple[Segment, ...]

    @property
    def total_latency(self) -> int:
        return sum(seg.latency for seg in self.segments)

    @property
    def bus_ids(self) -> tuple[str, ...]:
        return tuple(seg.bus_id for seg in self.segments if seg.medium == "bus")


class Topology:
    """Common surface: placement, naming, routing, bus lookup."""

    kind: str

    def place(self, count: int) -> list[NodeId]:
        raise NotImplementedError

    def entity_name(self, node: NodeId) -> str:
        raise NotImplementedError

    def route(self, src: NodeId, dst: NodeId) -> Path:
        raise NotImplementedError

    def bus_time(self, bus_id: str) -> int:
        raise KeyError(bus_id)

    # Multi-target sends collapse into one message only where the medium
    # supports it; everything else sends per-target messages.
    broadcast = False

    def remap(self, virtual: NodeId, new_physical: NodeId) -> None:
        raise RemapError(f"remapping is not supported on {self.kind} topologies")


class _FlatTopology(Topology):
    def __init__(self, n_nodes: int) -> None:
        if n_nodes < 1:
            raise UsageError("topology needs at least one node")
        self.n_nodes = n_nodes

    def place(self, count: int) -> list[NodeId]:
        if count > self.n_nodes:
            raise CapacityError(
                f"workload needs {count} nodes but the {self.kind} topology has {self.n_nodes}"
            )
        return list(range(count))

    def entity_name(self, node: NodeId) -> str:
        return str(node)

    def _check(self, node: NodeId) -> None:
        if not isinstance(node, int) or not (0 <= node < self.n_nodes):
            raise RoutingError(f"unknown node id {node!r} on {self.kind} topology")


class DirectTopology(_FlatTopology):
    """Fully connected dedicated wires, t_link ticks per message."""

    kind = "direct"

    def __init__(self, n_nodes: int, t_link: int) -> None:
        super().__init__(n_nodes)
        if t_link < 1:
            raise UsageError("t_link must be >= 1 tick")
        self.t_link = t_link

    def route(self, src: NodeId, dst: NodeId) -> Path:
        self._check(src)
        self._check(dst)
        if src == dst:
            return Path(())
        return Path((Segment("wire", self.t_link),))


class SharedBusTopology(_FlatTopology):
    """One serial bus shared by all nodes, t_bus ticks per message."""

    kind = "shared_bus"

    BUS_ID = "bus"

    def __init__(self, n_nodes: int, t_bus: int, broadcast: bool = True) -> None:
        super().__init__(n_nodes)
        if t_bus < 1:
            raise UsageError("t_bus must be >= 1 tick")
        self.t_bus = t_bus
        self.broadcast = broadcast

    def route(self, src: NodeId, dst: NodeId) -> Path:
        self._check(src)
        self._check(dst)
        if src == dst:
            return Path(())
        return Path((Segment("bus", self.t_bus, self.BUS_ID),))

    def bus_time(self, bus_id: str) -> int:
        if bus_id != self.BUS_ID:
            raise KeyError(bus_id)
        return self.t_bus


@dataclass(frozen=True)
class BusLevel:
    """One level of the hierarchical bus: message time and how many
    clusters one bus of this level spans."""

    t_bus: int
    cluster_group: int


class EmpaTopology(Topology):
    """Clustered grid with neighbor wiring, cluster heads, and bus levels."""

    kind = "empa"

    ICCB_REACH = 2  # direct forwarding reach in Chebyshev hops

    def __init__(
        self,
        clusters: int,
        rows: int,
        cols: int,
        t_hop: int,
        t_head: int,
        bus_levels: tuple[BusLevel, ...] | None = None,
    ) -> None:
        if clusters < 1:
            raise UsageError("need at least one cluster")
        if rows * cols < 2:
            raise UsageError("cluster geometry too small for a head plus one member")
        if t_hop < 1 or t_head < 0:
            raise UsageError("t_hop must be >= 1 and t_head >= 0")
        if bus_levels is None:
            bus_levels = (BusLevel(t_bus=1, cluster_group=clusters),)
        groups = [lvl.cluster_group for lvl in bus_levels]
        if any(g < 1 for g in groups) or sorted(groups) != groups:
            raise UsageError("bus level group sizes must be positive and ascending")
        if groups[-1] < clusters:
            raise UsageError("the top bus level must span all clusters")
        if any(lvl.t_bus < 1 for lvl in bus_levels):
            raise UsageError("bus message times must be >= 1 tick")
        self.clusters = clusters
        self.rows = rows
        self.cols = cols
        self.t_hop = t_hop
        self.t_head = t_head
        self.bus_levels = bus_levels
        # virtual id -> physical cell; populated at placement time, stable
        # during a run, adjusted only through remap() between runs.
        self._vmap: dict[tuple[int, int, int], tuple[int, int, int]] = {}

    # -- geometry ---------------------------------------------------------

    @staticmethod
    def head_slot(cluster: int) -> tuple[int, int, int]:
        return (cluster, 0, 0)

    def _valid_slot(self, slot) -> bool:
        if not (isinstance(slot, tuple) and len(slot) == 3):
            return False
        c, r, col = slot
        return 0 <= c < self.clusters and 0 <= r < self.rows and 0 <= col < self.cols

    def global_pos(self, slot: tuple[int, int, int]) -> tuple[int, int]:
        c, r, col = slot
        return (r, c * self.cols + col)

    def chebyshev(self, a: tuple[int, int, int], b: tuple[int, int, int]) -> int:
        (ra, ca), (rb, cb) = self.global_pos(a), self.global_pos(b)
        return max(abs(ra - rb), abs(ca - cb))

    def chip_of(self, cluster: int) -> int:
        # The lowest bus level defines the chip: clusters on one level-1 bus
        # share a chip. Neighbor wiring does not cross chip boundaries.
        return cluster // self.bus_levels[0].cluster_group

    def member_slots(self) -> list[tuple[int, int, int]]:
        slots = []
        for c in range(self.clusters):
            for r in range(self.rows):
                for col in range(self.cols):
                    if (c, r, col) != self.head_slot(c):
                        slots.append((c, r, col))
        return slots

    @property
    def capacity(self) -> int:
        return self.clusters * (self.rows * self.cols - 1)

    # -- placement and remapping ------------------------------------------

    def assign(self, *slots: tuple[int, int, int]) -> None:
        """Map the given member cells to themselves as virtual ids."""
        for slot in slots:
            if not self._valid_slot(slot):
                raise RoutingError(f"no such cell {slot!r}")
            if slot == self.head_slot(slot[0]):
                raise UsageError(f"{slot!r} is a cluster head, not a member cell")
            self._vmap[slot] = slot

    def place(self, count: int) -> list[NodeId]:
        """Assign the next ``count`` free member cells, cluster-major and
        row-major within a cluster."""
        if count > self.capacity:
            raise CapacityError(
                f"workload needs {count} cells but the grid offers {self.capacity} members"
            )
        taken = set(self._vmap.values())
        placed: list[NodeId] = []
        for slot in self.member_slots():
            if len(placed) == count:
                break
            if slot in taken:
                continue
            self._vmap[slot] = slot
            placed.append(slot)
        if len(placed) < count:
            raise CapacityError("not enough free member cells left")
        return placed

    def remap(self, virtual: NodeId, new_physical: NodeId) -> None:
        if virtual not in self._vmap:
            if self._valid_slot(virtual) and virtual == self.head_slot(virtual[0]):
                raise RemapError("cluster heads cannot be remapped")
            raise RemapError(f"virtual id {virtual!r} is not mapped")
        if not self._valid_slot(new_physical):
            raise RemapError(f"no such cell {new_physical!r}")
        if new_physical == self.head_slot(new_physical[0]):
            raise RemapError("cannot remap onto a cluster head cell")
        if new_physical in self._vmap.values():
            raise RemapError(f"target cell {new_physical!r} is already assigned")
        self._vmap[virtual] = new_physical

    # -- routing ----------------------------------------------------------

    def entity_name(self, node: NodeId) -> str:
        return "{}:{}:{}".format(*node)

    def _resolve(self, node: NodeId) -> tuple[int, int, int]:
        try:
            return self._vmap[node]
        except (KeyError, TypeError):
            raise RoutingError(f"unmapped virtual id {node!r}") from None

    def _bus_level_for(self, cluster_a: int, cluster_b: int) -> tuple[int, BusLevel, int]:
        for level, spec in enumerate(self.bus_levels):
            if cluster_a // spec.cluster_group == cluster_b // spec.cluster_group:
                return level, spec, cluster_a // spec.cluster_group
        raise RoutingError(f"no bus level spans clusters {cluster_a} and {cluster_b}")

    def _hops(self, a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[Segment, ...]:
        d = self.chebyshev(a, b)
        if d == 0:
            return ()
        return (Segment("iccb", d * self.t_hop),)

    def route(self, src: NodeId, dst: NodeId) -> Path:
        p_src = self._resolve(src)
        p_dst = self._resolve(dst)
        if p_src == p_dst:
            return Path(())
        d = self.chebyshev(p_src, p_dst)
        same_chip = self.chip_of(p_src[0]) == self.chip_of(p_dst[0])
        if d <= self.ICCB_REACH and same_chip:
            return Path(self._hops(p_src, p_dst))
        src_head = self.head_slot(p_src[0])
        dst_head = self.head_slot(p_dst[0])
        if p_src[0] == p_dst[0]:
            # Distant members of one cluster relay through their head.
            segs = self._hops(p_src, src_head) + (Segment("head", self.t_head),)
            return Path(segs + self._hops(src_head, p_dst))
        level, spec, group = self._bus_level_for(p_src[0], p_dst[0])
        bus_id = f"bus.l{level + 1}.g{group}"
        segs = self._hops(p_src, src_head)
        segs += (Segment("head", self.t_head),)
        segs += (Segment("bus", spec.t_bus, bus_id),)
        segs += (Segment("head", self.t_head),)
        segs += self._hops(dst_head, p_dst)
        return Path(segs)

    def bus_time(self, bus_id: str) -> int:
        level = int(bus_id.split(".")[1][1:]) - 1
        return self.bus_levels[level].t_bus


def build_direct(n_nodes: int, t_link: int) -> DirectTopology:
    return DirectTopology(n_nodes, t_link)


def build_shared_bus(n_nodes: int, t_bus: int, broadcast: bool = True) -> SharedBusTopology:
    return SharedBusTopology(n_nodes, t_bus, broadcast)


def build_empa(
    clusters: int,
    rows: int,
    cols: int,
    t_hop: int,
    t_head: int,
    bus_levels: tuple[BusLevel, ...] | None = None,
) -> EmpaTopology:
    return EmpaTopology(clusters, rows, cols, t_hop, t_head, bus_levels)


def route(topology: Topology, src: NodeId, dst: NodeId) -> Path:
    return topology.route(src, dst)


def remap_core(topology: Topology, virtual: NodeId, new_physical: NodeId) -> Topology:
    """Point a virtual core at a new physical cell; must not run mid-simulation."""
    topology.remap(virtual, new_physical)
    return topology
