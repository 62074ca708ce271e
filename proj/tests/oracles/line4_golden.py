"""Independent brute-force goldens for tests/data/line4.json.

Enumerates every open set, every client->facility-or-penalty map and every
spanning tree over facility supersets. Writes line4_golden.json.
"""
import itertools
import json
import pathlib

here = pathlib.Path(__file__).resolve().parent.parent / "data"
inst = json.loads((here / "line4.json").read_text())
xs = [p[0] for p in inst["points"]]
n = len(xs)
dist = [[abs(xs[a] - xs[b]) for b in range(n)] for a in range(n)]
F = inst["facilities"]
C = inst["clients"]
nf, nc = len(F), len(C)


def steiner(open_set):
    if len(open_set) <= 1:
        return 0.0
    best = float("inf")
    others = [i for i in range(nf) if i not in open_set]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = sorted(set(open_set) | set(extra))
            edges = list(itertools.combinations(nodes, 2))
            for tree in itertools.combinations(edges, len(nodes) - 1):
                parent = {v: v for v in nodes}

                def find(v):
                    while parent[v] != v:
                        v = parent[v]
                    return v

                ok = True
                for a, b in tree:
                    ra, rb = find(a), find(b)
                    if ra == rb:
                        ok = False
                        break
                    parent[ra] = rb
                if ok:
                    best = min(best, sum(dist[a][b] for a, b in tree))
    return best


def optimum(capacitated, connected, penalties):
    best = float("inf")
    for r in range(0, nf + 1):
        for open_set in itertools.combinations(range(nf), r):
            if not open_set and not penalties:
                continue
            options = list(open_set) + (["P"] if penalties else [])
            for choice in itertools.product(options, repeat=nc):
                if capacitated and any(
                    choice.count(i) > F[i]["capacity"] for i in open_set
                ):
                    continue
                cost = sum(F[i]["open_cost"] for i in open_set)
                for j, c in enumerate(choice):
                    cost += C[j]["penalty"] if c == "P" else dist[c][nf + j]
                if connected:
                    cost += steiner(open_set)
                best = min(best, cost)
    return best


kinds = {
    "cfl": (True, False, False),
    "confl": (False, True, False),
    "cpfl": (True, False, True),
    "conpfl": (False, True, True),
    "concfl": (True, True, False),
    "concpfl": (True, True, True),
}
out = {"dist": dist, "optimum": {k: optimum(*v) for k, v in kinds.items()}}
(here / "line4_golden.json").write_text(json.dumps(out, indent=2) + "\n")
print(json.dumps(out["optimum"]))
