"""Network graph, span structure and shortest-path routing.

Topologies are loaded from a small line-oriented text format::

    # comment
    nodes: A B C
    link: A B 100
    link: B C 250

Links are undirected fibres whose spectrum is managed per direction by
the control plane; lengths are symmetric.  Every link is divided into
amplifier spans of ``span_length_km``, rounded up so the whole length is
covered.

Routing is plain Dijkstra on link lengths.  Equal-length ties are broken
by the lexicographically smallest canonical node sequence (the smaller
of the sequence and its reverse), which makes the choice deterministic
and direction-symmetric: the route from d to s is always the reverse of
the route from s to d.  Routes are computed once per node pair and
cached; the simulator never reroutes.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "TopologyError",
    "RouteNotFoundError",
    "Link",
    "Route",
    "Topology",
    "load_topology",
    "load_topology_file",
    "nsfnet",
    "shortest_path",
]

DEFAULT_SPAN_LENGTH_KM = 100.0


class TopologyError(ValueError):
    pass


class RouteNotFoundError(TopologyError):
    """No path between the requested endpoints (a disconnected graph)."""


@dataclass(frozen=True)
class Link:
    """An undirected fibre: id, endpoints, length and amplifier spans."""

    id: str
    source: str
    destination: str
    length_km: float
    span_count: int

    def other_end(self, node: str) -> str:
        if node == self.source:
            return self.destination
        if node == self.destination:
            return self.source
        raise TopologyError(f"node {node!r} is not an endpoint of link {self.id}")


@dataclass(frozen=True)
class Route:
    """An ordered chain of links from source to destination."""

    links: tuple[Link, ...]
    source: str
    destination: str

    @property
    def link_ids(self) -> tuple[str, ...]:
        return tuple(link.id for link in self.links)

    @property
    def nodes(self) -> tuple[str, ...]:
        seq = [self.source]
        for link in self.links:
            seq.append(link.other_end(seq[-1]))
        return tuple(seq)

    @property
    def length_km(self) -> float:
        return sum(link.length_km for link in self.links)

    @property
    def total_spans(self) -> int:
        return sum(link.span_count for link in self.links)

    @property
    def directed_hops(self) -> tuple[tuple[str, str], ...]:
        """(from, to) node pairs, one per traversed link."""
        seq = self.nodes
        return tuple(zip(seq[:-1], seq[1:]))


def _validate_route(route: Route) -> None:
    nodes = route.nodes
    if nodes[-1] != route.destination:
        raise TopologyError("route links do not end at the destination")
    if len(set(nodes)) != len(nodes):
        raise TopologyError("route repeats a node")


class Topology:
    """Immutable graph of nodes and fibre links with cached routing."""

    def __init__(self, nodes, links, span_length_km: float = DEFAULT_SPAN_LENGTH_KM):
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.links: tuple[Link, ...] = tuple(links)
        self.span_length_km = span_length_km
        self._validate()
        self._adjacency: dict[str, list[Link]] = {n: [] for n in self.nodes}
        for link in self.links:
            self._adjacency[link.source].append(link)
            self._adjacency[link.destination].append(link)
        self._by_id = {link.id: link for link in self.links}
        self._route_cache: dict[tuple[str, str], Route] = {}

    def _validate(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise TopologyError("duplicate node id")
        node_set = set(self.nodes)
        seen_pairs = set()
        for link in self.links:
            if link.source not in node_set or link.destination not in node_set:
                raise TopologyError(f"link {link.id} references an undeclared node")
            if link.source == link.destination:
                raise TopologyError(f"link {link.id} is a self-loop")
            if link.length_km <= 0:
                raise TopologyError(f"link {link.id} has non-positive length")
            pair = frozenset((link.source, link.destination))
            if pair in seen_pairs:
                raise TopologyError(f"parallel link between {link.source} and {link.destination}")
            seen_pairs.add(pair)
        if len(self.nodes) > 1 and not self._connected():
            raise TopologyError("graph is not connected")

    def _connected(self) -> bool:
        edges: dict[str, set[str]] = {n: set() for n in self.nodes}
        for link in self.links:
            edges[link.source].add(link.destination)
            edges[link.destination].add(link.source)
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            for neighbour in edges[stack.pop()]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    stack.append(neighbour)
        return len(seen) == len(self.nodes)

    def link_by_id(self, link_id: str) -> Link:
        try:
            return self._by_id[link_id]
        except KeyError:
            raise TopologyError(f"unknown link id {link_id!r}") from None

    def link_between(self, a: str, b: str) -> Link:
        for link in self._adjacency[a]:
            if link.other_end(a) == b:
                return link
        raise TopologyError(f"no link between {a!r} and {b!r}")

    def shortest_path(self, source: str, destination: str) -> Route:
        """Minimum-length route, deterministic under ties, cached."""
        if source == destination:
            raise TopologyError("source and destination must differ")
        for node in (source, destination):
            if node not in self._adjacency:
                raise TopologyError(f"unknown node {node!r}")
        key = (source, destination)
        cached = self._route_cache.get(key)
        if cached is not None:
            return cached

        dist_s = self._dijkstra_distances(source)
        if destination not in dist_s:
            raise RouteNotFoundError(f"no path from {source!r} to {destination!r}")
        dist_d = self._dijkstra_distances(destination)
        best_nodes = self._best_tied_path(source, destination, dist_s, dist_d)

        links = tuple(
            self.link_between(a, b) for a, b in zip(best_nodes[:-1], best_nodes[1:])
        )
        route = Route(links=links, source=source, destination=destination)
        _validate_route(route)
        self._route_cache[key] = route
        return route

    def _dijkstra_distances(self, origin: str) -> dict[str, float]:
        dist = {origin: 0.0}
        heap = [(0.0, origin)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist.get(node, math.inf):
                continue
            for link in self._adjacency[node]:
                other = link.other_end(node)
                nd = d + link.length_km
                if nd < dist.get(other, math.inf):
                    dist[other] = nd
                    heapq.heappush(heap, (nd, other))
        return dist

    def _best_tied_path(self, source, destination, dist_s, dist_d):
        """Enumerate the shortest-path DAG, pick the canonical minimum.

        The canonical key of a node sequence is the smaller of the
        sequence and its reverse, so the winner for (d, s) is exactly the
        reverse of the winner for (s, d).
        """
        total = dist_s[destination]
        paths: list[tuple[str, ...]] = []
        stack: list[tuple[str, tuple[str, ...]]] = [(source, (source,))]
        while stack:
            node, prefix = stack.pop()
            if node == destination:
                paths.append(prefix)
                continue
            for link in self._adjacency[node]:
                other = link.other_end(node)
                if other in prefix:
                    continue
                if not math.isclose(
                    dist_s[node] + link.length_km + dist_d.get(other, math.inf),
                    total,
                    rel_tol=1e-12,
                    abs_tol=1e-9,
                ):
                    continue
                stack.append((other, prefix + (other,)))
        return min(paths, key=lambda p: min(p, tuple(reversed(p))))


def load_topology(document: str, span_length_km: float = DEFAULT_SPAN_LENGTH_KM) -> Topology:
    """Parse the line-oriented topology format into a validated graph."""
    nodes: list[str] = []
    links: list[Link] = []
    saw_nodes = False
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("nodes:"):
            if saw_nodes:
                raise TopologyError(f"line {lineno}: duplicate nodes header")
            nodes = line[len("nodes:"):].split()
            if not nodes:
                raise TopologyError(f"line {lineno}: empty node list")
            saw_nodes = True
        elif line.startswith("link:"):
            parts = line[len("link:"):].split()
            if len(parts) != 3:
                raise TopologyError(f"line {lineno}: expected 'link: <src> <dst> <length_km>'")
            src, dst, length_text = parts
            try:
                length = float(length_text)
            except ValueError:
                raise TopologyError(f"line {lineno}: bad length {length_text!r}") from None
            if length <= 0:
                raise TopologyError(f"line {lineno}: non-positive length {length}")
            link_id = f"{src}-{dst}" if src < dst else f"{dst}-{src}"
            links.append(
                Link(
                    id=link_id,
                    source=src,
                    destination=dst,
                    length_km=length,
                    span_count=max(1, math.ceil(length / span_length_km)),
                )
            )
        else:
            raise TopologyError(f"line {lineno}: unrecognised directive {line!r}")
    if not saw_nodes:
        raise TopologyError("missing 'nodes:' header")
    return Topology(nodes=nodes, links=links, span_length_km=span_length_km)


def load_topology_file(path, span_length_km: float = DEFAULT_SPAN_LENGTH_KM) -> Topology:
    with open(path, "r", encoding="ascii") as handle:
        return load_topology(handle.read(), span_length_km=span_length_km)


def nsfnet() -> Topology:
    """The bundled 14-node NSFNet with the widely used distance set."""
    text = resources.files("eonjam.data").joinpath("nsfnet.topo").read_text(encoding="ascii")
    return load_topology(text)


def shortest_path(topology: Topology, source: str, destination: str) -> Route:
    """Module-level convenience wrapper around :meth:`Topology.shortest_path`."""
    return topology.shortest_path(source, destination)
