"""Connected-component grouping of memes from a thresholded edge list.

Above-threshold pairs are edges of an undirected graph over corpus rows;
groups are the connected components (single-link semantics), computed with
a union-find structure using path compression and union by rank.  Singleton
memes keep their own group, so groups always partition the corpus.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .errors import PartitionError
from .similarity import SimilarityEdge


class DisjointSet:
    """Array-backed union-find with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def component_count(self) -> int:
        return sum(1 for i, p in enumerate(self.parent) if self.find(i) == i)


@dataclass(frozen=True)
class MemeGroup:
    group_id: int
    members: tuple  # meme ids (or row indices when no ids were given), in corpus order
    size: int


def group_edges(n: int, edges: list[SimilarityEdge],
                ids: list[str] | None = None) -> list[MemeGroup]:
    """Connected components of the edge graph over n vertices.

    Groups are numbered by their smallest member row; members are listed in
    corpus (row) order.  When ids is given, members are meme ids; otherwise
    they are the row indices themselves.
    """
    if ids is not None and len(ids) != n:
        raise PartitionError(f"got {len(ids)} ids for n={n}")
    ds = DisjointSet(n)
    for e in edges:
        if not (0 <= e.src < n and 0 <= e.dst < n):
            raise IndexError(f"edge ({e.src}, {e.dst}) out of range for n={n}")
        ds.union(e.src, e.dst)
    members_of: dict[int, list[int]] = {}
    for v in range(n):
        members_of.setdefault(ds.find(v), []).append(v)
    components = sorted(members_of.values(), key=lambda m: m[0])
    groups = []
    for gid, rows in enumerate(components):
        members = tuple(ids[r] for r in rows) if ids is not None else tuple(rows)
        groups.append(MemeGroup(group_id=gid, members=members, size=len(rows)))
    return groups


_HISTOGRAM_BUCKETS = ("1", "2", "3-5", "6-10", ">10")


def _bucket(size: int) -> str:
    if size == 1:
        return "1"
    if size == 2:
        return "2"
    if size <= 5:
        return "3-5"
    if size <= 10:
        return "6-10"
    return ">10"


@dataclass
class GroupReport:
    count: int
    total: int
    histogram: dict[str, int]
    largest: int
    singletons: int

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "total": self.total,
            "histogram": self.histogram,
            "largest": self.largest,
            "singletons": self.singletons,
        }


def group_stats(groups: list[MemeGroup]) -> GroupReport:
    """Summarize a partition: component count, size histogram, extremes."""
    seen: set = set()
    for g in groups:
        for m in g.members:
            if m in seen:
                raise PartitionError(f"member {m!r} appears in more than one group")
            seen.add(m)
    histogram = {b: 0 for b in _HISTOGRAM_BUCKETS}
    largest = 0
    singletons = 0
    total = 0
    for g in groups:
        histogram[_bucket(g.size)] += 1
        largest = max(largest, g.size)
        singletons += g.size == 1
        total += g.size
    return GroupReport(
        count=len(groups),
        total=total,
        histogram=histogram,
        largest=largest,
        singletons=singletons,
    )


def clique_fractions(groups: list[MemeGroup], edges: list[SimilarityEdge],
                     n: int) -> dict[int, float]:
    """Per group, the fraction of internal pairs that are actual edges.

    1.0 means the group is a clique at the threshold; low values flag
    chaining artifacts of single-link grouping.
    """
    edge_set = {(e.src, e.dst) for e in edges}
    fractions = {}
    for g in groups:
        rows = sorted(row_group_rows(g, n))
        gid = g.group_id
        k = len(rows)
        if k < 2:
            fractions[gid] = 1.0
            continue
        hits = 0
        for a in range(k):
            for b in range(a + 1, k):
                if (rows[a], rows[b]) in edge_set:
                    hits += 1
        fractions[gid] = hits / (k * (k - 1) // 2)
    return fractions


def row_group_rows(group: MemeGroup, n: int) -> list[int]:
    rows = []
    for m in group.members:
        if not isinstance(m, int):
            raise PartitionError("clique check needs index-based groups")
        if not (0 <= m < n):
            raise IndexError(f"member row {m} out of range for n={n}")
        rows.append(m)
    return rows


def groups_to_json(groups: list[MemeGroup]) -> str:
    return json.dumps(
        [{"group_id": g.group_id, "members": list(g.members)} for g in groups],
        indent=2,
    )


def groups_from_json(text: str) -> list[MemeGroup]:
    data = json.loads(text)
    return [
        MemeGroup(group_id=int(g["group_id"]), members=tuple(g["members"]),
                  size=len(g["members"]))
        for g in data
    ]


def write_groups_csv(groups: list[MemeGroup], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["meme_id", "group_id"])
        for g in groups:
            for m in g.members:
                writer.writerow([m, g.group_id])
