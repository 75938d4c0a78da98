#!/usr/bin/env python3
"""Generate the builtin honeycomb patches shipped in crates/core/data/geometries.

Brick-wall embedding: site (c, r) is sublattice A when c + r is even.
Horizontal bond (c, r)-(c+1, r) is x when c + r is even, y otherwise.
Vertical bond (c, r)-(c, r+1) exists when c + r is even and is a z bond.
Plaquette cells sit at (c, r) with c + r even and cover (c..c+2) x (r, r+1).

Usage: python3 tools/geomgen.py [outdir]
"""
import json
import math
import os
import sys
from collections import deque

AXES = "xyz"


def is_a(s):
    return (s[0] + s[1]) % 2 == 0


def zpart(s):
    c, r = s
    return (c, r + 1) if is_a(s) else (c, r - 1)


def flake_cells(k):
    out = set()
    for r in range(-k, k + 1):
        for c in range(-2 * k - 2, 2 * k + 3):
            if (c + r) % 2:
                continue
            q = (c - r) // 2
            if max(abs(q), abs(r), abs(q + r)) <= k:
                out.add((c, r))
    return out


def cell_sites(cell):
    c, r = cell
    return [(c + dc, r + dr) for dr in (0, 1) for dc in (0, 1, 2)]


def sites_of(cells):
    s = set()
    for cell in cells:
        s.update(cell_sites(cell))
    return s


def bonds_of(sites):
    out = []
    for s in sites:
        c, r = s
        if (c + 1, r) in sites:
            if is_a(s):
                out.append((s, (c + 1, r), "x"))
            else:
                out.append(((c + 1, r), s, "y"))
        if is_a(s) and (c, r + 1) in sites:
            out.append((s, (c, r + 1), "z"))
    return out


def with_leaves(cells):
    sites = sites_of(cells)
    miss = sorted(s for s in sites if zpart(s) not in sites)
    h = len(miss) // 2
    extra = miss[: h - 1] + miss[h : len(miss) - 1]
    free = [miss[h - 1], miss[-1]]
    return sites | {zpart(m) for m in extra}, free


def coords(s):
    c, r = s
    return (
        round(c * math.sqrt(3) / 2, 4),
        round(1.5 * r + (0.25 if is_a(s) else -0.25), 4),
    )


def neighbours(sites, bonds):
    nb = {s: {} for s in sites}
    for a, b, ax in bonds:
        nb[a][ax] = b
        nb[b][ax] = a
    return nb


def content_perm(sites, bonds):
    nb = neighbours(sites, bonds)
    p = {}
    for s in sites:
        t = s
        for ax in AXES:
            t = nb[t].get(ax, t)
        p[s] = t
    return p


def edge_orbit(sites, bonds):
    p = content_perm(sites, bonds)
    best = []
    seen = set()
    for s in sorted(sites):
        if s in seen:
            continue
        o = [s]
        seen.add(s)
        t = p[s]
        while t != s:
            o.append(t)
            seen.add(t)
            t = p[t]
        if len(o) > len(best):
            best = o
    return best


def outer_walk(sites, bonds):
    nb = neighbours(sites, bonds)
    adj = {s: list(nb[s].values()) for s in sites}
    start = min(sites, key=lambda s: (coords(s)[1], coords(s)[0]))

    def ang(v, w):
        (x0, y0), (x1, y1) = coords(v), coords(w)
        return math.atan2(y1 - y0, x1 - x0)

    def step(prev_dir, v):
        best, bestd = None, None
        for w in adj[v]:
            d = (ang(v, w) - prev_dir) % (2 * math.pi)
            if d < 1e-9:
                d = 2 * math.pi
            if bestd is None or d < bestd:
                best, bestd = w, d
        return best

    walk = [start]
    v = start
    back = -math.pi / 2
    w = step(back, v)
    first = (v, w)
    while True:
        back = ang(w, v)
        v, w = w, step(back, w)
        if (v, w) == first:
            break
        walk.append(v)
    out = []
    for s in walk:
        if s not in out:
            out.append(s)
    return out


def bfs_path(nb, a, b, avoid):
    prev = {a: None}
    dq = deque([a])
    while dq:
        v = dq.popleft()
        if v == b:
            break
        for w in sorted(nb[v].values()):
            if w in prev or w in avoid:
                continue
            prev[w] = v
            dq.append(w)
    if b not in prev:
        return None
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def row_rule(bonds, parity=1):
    ys = sorted(b for b in bonds if b[2] == "y" and b[0][1] % 2 == parity)
    xs = sorted(b for b in bonds if b[2] == "x" and b[0][1] % 2 == parity)
    return ys + xs


def run_swaps(sites, driven_bonds, swaps):
    content = {s: s for s in sites}
    for a, b, _ in swaps:
        content[a], content[b] = content[b], content[a]
    where = {v: k for k, v in content.items()}
    pairs = []
    for s in sorted(sites):
        if is_a(s) and zpart(s) in sites:
            pairs.append((where[s], where[zpart(s)]))
    return pairs


def stretch_plan(sites, bonds, s0, far):
    nb = neighbours(sites, bonds)
    lookup = {}
    for bd in bonds:
        lookup[(bd[0], bd[1])] = bd
        lookup[(bd[1], bd[0])] = bd
    best = None
    for s in sorted(sites):
        if not is_a(s) or zpart(s) not in sites:
            continue
        for u, v in ((s, zpart(s)), (zpart(s), s)):
            p1 = bfs_path(nb, u, s0, {v})
            if p1 is None:
                continue
            p2 = bfs_path(nb, v, far, {s0})
            if p2 is None:
                continue
            swaps = [lookup[(p1[i], p1[i + 1])] for i in range(len(p1) - 1)]
            swaps += [lookup[(p2[i], p2[i + 1])] for i in range(len(p2) - 1)]
            if best is None or len(swaps) < len(best):
                best = swaps
    pairs = run_swaps(sites, bonds, best)
    assert (s0, far) in pairs or (far, s0) in pairs, "stretch failed"
    return best


class Patch:
    def __init__(self, name, driven, extra_sites=(), protruding=None, ancilla=None):
        self.name = name
        self.driven = set(driven)
        self.prot = protruding
        allsites = set(driven) | set(extra_sites)
        if protruding:
            allsites.add(protruding[1])
        self.order = sorted(allsites, key=lambda s: (s[1], s[0]))
        self.ids = {s: i for i, s in enumerate(self.order)}
        self.anc = None
        if ancilla is not None:
            self.anc = len(self.order)
        self.bonds = bonds_of(allsites)
        self.bonds.sort(key=lambda b: (AXES.index(b[2]), self.ids[b[0]], self.ids[b[1]]))
        self.bid = {(a, b): i for i, (a, b, _) in enumerate(self.bonds)}
        self.driven_bonds = [b for b in self.bonds if b[0] in self.driven and b[1] in self.driven]
        self.cells = sorted(
            (c for c in cells_in(allsites)), key=lambda c: (c[1], c[0])
        )
        self.ancilla_anchor = ancilla
        self.protocol = {}
        self.meta = {}

    def bond_id(self, a, b):
        return self.bid[(a, b)] if (a, b) in self.bid else self.bid[(b, a)]

    def plaquette(self, cell):
        c, r = cell
        loop = [
            (c, r),
            (c + 1, r),
            (c + 2, r),
            (c + 2, r + 1),
            (c + 1, r + 1),
            (c, r + 1),
            (c, r),
        ]
        return [self.bond_id(loop[i], loop[i + 1]) for i in range(6)]

    def to_json(self):
        sites = []
        for s in self.order:
            x, y = coords(s)
            sites.append({"id": self.ids[s], "sublattice": "A" if is_a(s) else "B", "x": x, "y": y})
        if self.anc is not None:
            x, y = coords(self.ancilla_anchor)
            sites.append({"id": self.anc, "sublattice": "A", "x": round(x - 1.0, 4), "y": y})
        bonds = []
        for a, b, ax in self.bonds:
            bonds.append({"a": self.ids[a], "b": self.ids[b], "axis": ax})
        driven_sites = self.driven
        walk = outer_walk(set(self.order), self.bonds)
        out = {
            "name": self.name,
            "reconstructed": True,
        }
        out.update(self.meta)
        out["sites"] = sites
        out["bonds"] = bonds
        out["plaquettes"] = [self.plaquette(c) for c in self.cells]
        out["edge_cycle"] = [self.ids[s] for s in walk]
        if self.prot:
            parent, leaf = self.prot
            out["protruding"] = {"site": self.ids[leaf], "bond": self.bond_id(parent, leaf)}
        if self.anc is not None:
            out["ancilla"] = self.anc
        if self.protocol:
            out["protocol"] = self.protocol
        return out


def cells_in(sites):
    out = []
    for s in sites:
        if is_a(s) and all(t in sites for t in cell_sites(s)):
            out.append(s)
    return out


def rearranged(patch, centre_cell):
    swaps = row_rule(patch.driven_bonds)
    patch.protocol["mswap"] = [patch.bond_id(a, b) for a, b, _ in swaps]
    patch.protocol["centre"] = patch.cells.index(centre_cell)
    return run_swaps(patch.driven, patch.driven_bonds, swaps)


def exit_bonds(patch, centre_cell):
    c, r = centre_cell
    out = []
    k = 1
    while (c + 2 * k, r) in patch.driven and (c + 2 * k, r + 1) in patch.driven:
        out.append(patch.bond_id((c + 2 * k, r), (c + 2 * k, r + 1)))
        k += 1
    return out


def corner_cut(patch, centre_cell):
    # Half of the patch above the corner-to-corner line through the centre
    # plaquette that runs parallel to the x bonds' row direction.
    yc = 1.5 * centre_cell[1] + 0.75
    region = []
    for s in patch.order:
        if coords(s)[1] > yc:
            region.append(patch.ids[s])
    return sorted(region)


def braiding(name, cells, reference_qubits=None):
    driven = sites_of(cells)
    bonds = bonds_of(driven)
    orbit = edge_orbit(driven, bonds)
    s0 = min(orbit, key=lambda s: (coords(s)[0], coords(s)[1]))
    i0 = orbit.index(s0)
    far = orbit[(i0 + len(orbit) // 2) % len(orbit)]
    patch = Patch(name, driven, ancilla=s0)
    swaps = stretch_plan(driven, patch.driven_bonds, s0, far)
    patch.protocol["mswap"] = [patch.bond_id(a, b) for a, b, _ in swaps]
    patch.protocol["braid_site"] = patch.ids[s0]
    if reference_qubits:
        patch.meta["reference_qubits"] = reference_qubits
    return patch


def main(outdir):
    os.makedirs(outdir, exist_ok=True)
    patches = []

    hex1 = Patch("hex1", sites_of({(0, 0)}))
    pairs = rearranged(hex1, (0, 0))
    patches.append(hex1)

    hex2_sites = sites_of({(0, 0), (2, 0)})
    hex2 = Patch("hex2", hex2_sites)
    patches.append(hex2)
    hex2_orbit = edge_orbit(hex2_sites, bonds_of(hex2_sites))
    hparent = min(s for s in hex2_orbit if zpart(s) not in hex2_sites)
    hprobe = Patch("hex2+probe", hex2_sites, protruding=(hparent, zpart(hparent)))
    hprobe.protocol["origin"] = hprobe.ids[hparent]
    patches.append(hprobe)
    patches.append(braiding("hex2+ancilla", {(0, 0), (2, 0)}))

    row3 = Patch("row3", sites_of({(-2, 0), (0, 0), (2, 0)}))
    pairs = rearranged(row3, (0, 0))
    assert ((0, 0), (2, 1)) in pairs or ((2, 1), (0, 0)) in pairs
    row3.protocol["exit"] = exit_bonds(row3, (0, 0))
    row3.protocol["cut"] = corner_cut(row3, (0, 0))
    patches.append(row3)

    core = flake_cells(1)
    ring1_sites, free = with_leaves(core)
    ring1 = Patch("ring1", ring1_sites)
    ring1.meta["reference_qubits"] = 26
    pairs = rearranged(ring1, (0, 0))
    orbit = edge_orbit(ring1_sites, bonds_of(ring1_sites))
    centre_pair = [p for p in pairs if set(p) == {(0, 0), (2, 1)}]
    assert centre_pair, "centre diagonal pair missing"
    edge_pairs = sorted(p for p in pairs if p[0] in orbit and p[1] in orbit)
    assert edge_pairs, "no edge pair"
    ring1.protocol["tracked"] = [
        [ring1.ids[centre_pair[0][0]], ring1.ids[centre_pair[0][1]]],
        [ring1.ids[edge_pairs[0][0]], ring1.ids[edge_pairs[0][1]]],
    ]
    patches.append(ring1)

    patches.append(braiding("ring1+ancilla", core, reference_qubits=27))

    parent = [s for s in free if s in orbit][0]
    probe = Patch("ring1+probe", ring1_sites, protruding=(parent, zpart(parent)))
    probe.meta["reference_qubits"] = 27
    probe.protocol["origin"] = probe.ids[parent]
    patches.append(probe)

    for ring in range(3, 9):
        sites, _ = with_leaves(flake_cells(ring - 1))
        p = Patch("ring%d" % ring, sites)
        if ring == 3:
            p.meta["reference_qubits"] = 58
        pairs = rearranged(p, (0, 0))
        assert any(set(q) == {(0, 0), (2, 1)} for q in pairs)
        p.protocol["exit"] = exit_bonds(p, (0, 0))
        p.protocol["cut"] = corner_cut(p, (0, 0))
        patches.append(p)

    for p in patches:
        data = p.to_json()
        path = os.path.join(outdir, p.name + ".json")
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1)
            fh.write("\n")
        n = len(data["sites"])
        print("%-14s %3d sites %3d bonds %2d plaquettes edge %2d" % (
            p.name, n, len(data["bonds"]), len(data["plaquettes"]), len(data["edge_cycle"])))


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    default = os.path.join(here, "..", "crates", "core", "data", "geometries")
    main(sys.argv[1] if len(sys.argv) > 1 else default)
