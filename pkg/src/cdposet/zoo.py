"""Deterministic poset generators and transcribed fixtures.

Every generator returns a validated poset with deterministic element names.
The transcribed fixtures (the truncated-bipyramid polytope and the two torus
decompositions) assert their published invariants at build time, so any
transcription drift fails fast.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product as iproduct

from .flags import euler_characteristic, semi_cd_index
from .ncpoly import CD, NcPolynomial
from .partition import (
    FailureReport,
    SEPartitionCert,
    SPartitionCert,
    order_to_s_certificate,
    se_certificate_from_classes,
)
from .poset import (
    BOT,
    TOP,
    GradedPoset,
    PosetError,
    closure,
    connected_sum,
    is_eulerian,
    is_semi_eulerian,
    product,
    validate,
)


class UnknownFamily(PosetError):
    pass


class BadParams(PosetError):
    pass


class NoPublishedCertificate(PosetError):
    pass


@dataclass(frozen=True)
class FixtureSpec:
    family: str
    params: tuple[int, ...]
    provenance: str


def _facet_poset(name: str, rank_top: int, faces: dict[str, list[str]]) -> GradedPoset:
    """Poset from a face dictionary mapping each face to its codim-1 faces.

    Vertices list no faces and get rank 1; everything else gets rank
    1 + max over listed faces.  bot and top are adjoined.
    """
    ranks: dict[str, int] = {BOT: 0, TOP: rank_top}
    covers: list[tuple[str, str]] = []
    order: dict[str, int] = {}

    def rank_of(x: str) -> int:
        if x in order:
            return order[x]
        below = faces.get(x, [])
        order[x] = 1 if not below else 1 + max(rank_of(y) for y in below)
        return order[x]

    for x in faces:
        ranks[x] = rank_of(x)
    for x, below in faces.items():
        if not below:
            covers.append((BOT, x))
        for y in below:
            covers.append((y, x))
        if ranks[x] == rank_top - 1:
            covers.append((x, TOP))
    return GradedPoset(name, ranks, covers)


def _simplicial_poset(name: str, rank_top: int, facets: list[tuple[str, ...]]) -> GradedPoset:
    """Face poset of the simplicial complex generated by the given facets."""
    faces: set[tuple[str, ...]] = set()
    for facet in facets:
        vs = tuple(sorted(facet))
        for k in range(1, len(vs) + 1):
            faces.update(combinations(vs, k))
    ranks = {BOT: 0, TOP: rank_top}
    covers: list[tuple[str, str]] = []
    names = {face: "".join(face) for face in faces}
    for face in faces:
        ranks[names[face]] = len(face)
        if len(face) == 1:
            covers.append((BOT, names[face]))
        else:
            for sub in combinations(face, len(face) - 1):
                covers.append((names[sub], names[face]))
        if len(face) == rank_top - 1:
            covers.append((names[face], TOP))
    return GradedPoset(name, ranks, covers)


# -- generated families -----------------------------------------------------------


def polygon(n: int) -> GradedPoset:
    if n < 2:
        raise BadParams(f"polygon needs n >= 2, got {n}")
    faces: dict[str, list[str]] = {}
    for i in range(n):
        faces[f"v{i}"] = []
    for i in range(n):
        faces[f"e{i}"] = [f"v{i}", f"v{(i + 1) % n}"]
    return _facet_poset(f"polygon{n}", 3, faces)


def simplex_boundary(n: int) -> GradedPoset:
    """Boundary of the n-simplex: proper nonempty subsets of n+1 vertices."""
    if n < 1:
        raise BadParams(f"simplex-boundary needs n >= 1, got {n}")
    vs = [chr(ord("a") + i) for i in range(n + 1)]
    facets = [tuple(v for v in vs if v != skip) for skip in vs]
    return _simplicial_poset(f"simplex-boundary{n}", n + 1, facets)


def boolean_lattice(n: int) -> GradedPoset:
    """The boolean lattice of subsets of n vertices; the full set is the top."""
    if n < 1:
        raise BadParams(f"boolean needs n >= 1, got {n}")
    if n == 1:
        return GradedPoset("boolean1", {BOT: 0, TOP: 1}, [(BOT, TOP)])
    vs = [chr(ord("a") + i) for i in range(n)]
    facets = [tuple(v for v in vs if v != skip) for skip in vs]
    return _simplicial_poset(f"boolean{n}", n, facets)


def cube(n: int) -> GradedPoset:
    """Boundary of the n-cube; cells are words over 0, 1, * with at least one fixed bit."""
    if n < 1:
        raise BadParams(f"cube needs n >= 1, got {n}")
    ranks = {BOT: 0, TOP: n + 1}
    covers = []
    cells = [c for c in iproduct("01*", repeat=n) if any(x != "*" for x in c)]
    for cell in cells:
        name = "".join(cell)
        stars = name.count("*")
        ranks[name] = stars + 1
        if stars == 0:
            covers.append((BOT, name))
        if stars == n - 1:
            covers.append((name, TOP))
        for i, x in enumerate(cell):
            if x == "*":
                for bit in "01":
                    covers.append(("".join(cell[:i]) + bit + "".join(cell[i + 1 :]), name))
    return GradedPoset(f"cube{n}", ranks, covers)


def cross_polytope(n: int) -> GradedPoset:
    """Boundary of the n-dimensional cross-polytope (octahedron for n = 3)."""
    if n < 1:
        raise BadParams(f"cross-polytope needs n >= 1, got {n}")
    axes = [chr(ord("u") + i) for i in range(n)] if n <= 6 else [f"x{i}" for i in range(n)]
    facets = [tuple(f"{a}{s}" for a, s in zip(axes, signs)) for signs in iproduct("pn", repeat=n)]
    return _simplicial_poset(f"cross-polytope{n}", n + 1, facets)


def sphere_two_cells(d: int) -> GradedPoset:
    """Sphere with exactly two cells in every dimension 0..d (rank d+2 poset)."""
    if d < 0:
        raise BadParams(f"sphere2cells needs d >= 0, got {d}")
    ranks = {BOT: 0, TOP: d + 2}
    covers = []
    for i in range(d + 1):
        for s in "AB":
            ranks[f"c{i}{s}"] = i + 1
            if i == 0:
                covers.append((BOT, f"c{i}{s}"))
            else:
                covers.append((f"c{i-1}A", f"c{i}{s}"))
                covers.append((f"c{i-1}B", f"c{i}{s}"))
            if i == d:
                covers.append((f"c{i}{s}", TOP))
    return GradedPoset(f"sphere2cells{d}", ranks, covers)


def discrete_points(n: int) -> GradedPoset:
    if n < 1:
        raise BadParams(f"discrete-points needs n >= 1, got {n}")
    ranks = {BOT: 0, TOP: 2}
    covers = []
    for i in range(1, n + 1):
        ranks[f"p{i}"] = 1
        covers.append((BOT, f"p{i}"))
        covers.append((f"p{i}", TOP))
    return GradedPoset(f"discrete{n}", ranks, covers)


def point() -> GradedPoset:
    """The one-point complex, the identity-like factor for products."""
    return GradedPoset("point", {BOT: 0, "pt": 1, TOP: 2}, [(BOT, "pt"), ("pt", TOP)])


def torus_seven_vertices() -> GradedPoset:
    """The minimal 7-vertex triangulation of the torus (14 facets on K7)."""
    facets = []
    for i in range(7):
        facets.append((f"t{i}", f"t{(i + 1) % 7}", f"t{(i + 3) % 7}"))
        facets.append((f"t{i}", f"t{(i + 2) % 7}", f"t{(i + 3) % 7}"))
    p = _simplicial_poset("torus-7vertex", 4, facets)
    assert euler_characteristic(p) == 0 and is_semi_eulerian(p) and not is_eulerian(p)
    return p


def icosahedron() -> GradedPoset:
    """The icosahedron boundary: gyroelongated pentagonal bipyramid combinatorics."""
    up = [f"u{i}" for i in range(5)]
    lo = [f"l{i}" for i in range(5)]
    facets = []
    for i in range(5):
        j = (i + 1) % 5
        facets.append(("t0", up[i], up[j]))
        facets.append((up[i], up[j], lo[i]))
        facets.append((lo[i], lo[j], up[j]))
        facets.append(("m0", lo[i], lo[j]))
    p = _simplicial_poset("icosahedron", 4, facets)
    assert euler_characteristic(p) == 2 and is_eulerian(p)
    return p


# -- transcribed fixtures ------------------------------------------------------------


def q_polytope() -> GradedPoset:
    """Truncated bipyramid over a triangle: 7 vertices, 12 edges, 7 facets.

    Base triangle A B C with bottom apex D; truncating the top apex leaves the
    triangle P Q R with P over A, Q over B, R over C.  Facets s1..s7 are named
    in the shelling order whose induced classes reproduce the published
    contribution table.
    """
    faces: dict[str, list[str]] = {v: [] for v in "ABCD"} | {v: [] for v in "PQR"}

    def edge(a: str, b: str) -> str:
        name = "".join(sorted((a, b)))
        faces[name] = [a, b]
        return name

    ab, bc, ca = edge("A", "B"), edge("B", "C"), edge("C", "A")
    ap, bq, cr = edge("A", "P"), edge("B", "Q"), edge("C", "R")
    pq, qr, rp = edge("P", "Q"), edge("Q", "R"), edge("R", "P")
    ad, bd, cd_ = edge("A", "D"), edge("B", "D"), edge("C", "D")
    faces["s1"] = [ab, bq, pq, ap]
    faces["s2"] = [bc, cr, qr, bq]
    faces["s3"] = [pq, qr, rp]
    faces["s4"] = [ca, ap, rp, cr]
    faces["s5"] = [ab, bd, ad]
    faces["s6"] = [bc, cd_, bd]
    faces["s7"] = [ca, ad, cd_]
    p = _facet_poset("q-polytope", 4, faces)
    assert not validate(p) and is_eulerian(p)
    from .flags import cd_index

    assert cd_index(p) == NcPolynomial(CD, {"ccc": 1, "cd": 5, "dc": 5})
    return p


def _torus_grid() -> GradedPoset:
    """Flat-torus grid of 5 squares and 8 triangles (13 facets, 22 edges, 9 vertices).

    Squares sit at positions (col,row) on a 3x3 grid with wraparound; the four
    squares at (0,1), (1,2), (1,0), (2,1) are split into two triangles by the
    diagonal from their bottom-left to their top-right corner.
    """
    split = {(0, 1), (1, 2), (1, 0), (2, 1)}
    faces: dict[str, list[str]] = {}

    def v(i: int, j: int) -> str:
        return f"p{i % 3}{j % 3}"

    def h(i: int, j: int) -> str:
        return f"h{i % 3}{j % 3}"

    def vt(i: int, j: int) -> str:
        return f"v{i % 3}{j % 3}"

    for i in range(3):
        for j in range(3):
            faces[v(i, j)] = []
    for i in range(3):
        for j in range(3):
            faces[h(i, j)] = [v(i, j), v(i + 1, j)]
            faces[vt(i, j)] = [v(i, j), v(i, j + 1)]
    for c, r in sorted(split):
        faces[f"d{c}{r}"] = [v(c, r), v(c + 1, r + 1)]
    for c in range(3):
        for r in range(3):
            if (c, r) in split:
                faces[f"L{c}{r}"] = [h(c, r), vt(c + 1, r), f"d{c}{r}"]
                faces[f"U{c}{r}"] = [vt(c, r), h(c, r + 1), f"d{c}{r}"]
            else:
                faces[f"F{c}{r}"] = [h(c, r), h(c, r + 1), vt(c, r), vt(c + 1, r)]
    return _facet_poset("torus-fig6", 4, faces)


def torus_fig6() -> GradedPoset:
    p = _torus_grid()
    assert not validate(p)
    assert euler_characteristic(p) == 0 and is_semi_eulerian(p) and not is_eulerian(p)
    assert semi_cd_index(p) == NcPolynomial(CD, {"ccc": 1, "cd": 13, "dc": 7})
    return p


_TORUS6_CLASSES: dict[str, list[str] | None] = {
    "F02": None,  # initial: full closure
    "U12": ["h10", "d12", "p20"],
    "L12": ["h12", "v22", "p22"],
    "F22": ["h22", "h20"],
    "U01": ["v01", "d01", "p01"],
    "L01": ["h01", "v11", "p11"],
    "F11": ["h11", "v21", "p21"],
    "F20": [],
    "F00": ["v00", "v10"],
    "U10": ["d10"],
    "L10": ["v20"],
    "U21": ["d21"],
    "L21": ["h21"],
}


def _torus_fig12_complex() -> GradedPoset:
    """Torus tiled by four pentagons, four squares and one central octagon.

    13 vertices, 22 edges, 9 faces; corner pentagons have one cut edge glued
    to the octagon, edge squares are glued across the torus identifications.
    """
    vertices = "abcegh mnpqwyz".replace(" ", "")
    faces: dict[str, list[str]] = {f"v{x}": [] for x in vertices}

    def e(x: str, y: str) -> str:
        name = "e" + "".join(sorted((x, y)))
        faces[name] = [f"v{x}", f"v{y}"]
        return name

    faces["PA"] = [e("a", "b"), e("b", "c"), e("c", "g"), e("e", "g"), e("a", "e")]
    faces["QF"] = [e("b", "y"), e("n", "y"), e("c", "n"), "ebc"]
    faces["PJ"] = [e("a", "y"), "eae", e("e", "m"), e("m", "n"), "eny"]
    faces["QN"] = ["eem", e("e", "p"), e("p", "q"), e("m", "q")]
    faces["PR"] = ["epq", e("a", "p"), "eay", e("w", "y"), e("q", "w")]
    faces["QW"] = ["ewy", "eby", e("b", "z"), e("w", "z")]
    faces["PO"] = ["ebz", "eab", "eap", e("h", "p"), e("h", "z")]
    faces["QS"] = ["eeg", e("g", "h"), "ehp", "eep"]
    faces["OC"] = ["ecn", "emn", "emq", "eqw", "ewz", "ehz", "egh", "ecg"]
    return _facet_poset("torus-fig12", 4, faces)


def torus_fig12() -> GradedPoset:
    p = _torus_fig12_complex()
    assert not validate(p)
    assert euler_characteristic(p) == 0 and is_semi_eulerian(p) and not is_eulerian(p)
    assert semi_cd_index(p) == NcPolynomial(CD, {"ccc": 1, "cd": 9, "dc": 11})
    return p


_TORUS12_CLASSES = {
    "OC": None,  # initial: full closure
    "PA": ["eab", "ebc", "eeg", "eae", "va", "vb", "ve"],
    "QF": [],
    "PJ": ["eny"],
    "QN": ["eem"],
    "PR": ["epq", "eay"],
    "QW": ["ewy", "eby", "vy"],
    "PO": ["ebz", "eap"],
    "QS": ["ehp", "eep", "vp"],
}


def fig13_nonsemi() -> GradedPoset:
    """Pure 2-dimensional complex on 11 vertices that is not semi-Eulerian.

    The link of the distinguished vertex g is two disjoint arcs, so the upper
    interval [g, top] fails the Möbius test while chi is still 0.
    """
    triangles = ["abc", "bcd", "cde", "def", "dfg", "ghi", "hij", "hjk", "abk", "bhk"]
    p = _simplicial_poset("fig13-nonsemi", 4, [tuple(t) for t in triangles])
    assert not validate(p)
    assert euler_characteristic(p) == 0 and not is_semi_eulerian(p)
    return p


# -- composition families ----------------------------------------------------------


def glued_simplex_spheres(n: int) -> GradedPoset:
    """Connected sum of two n-simplex boundaries along canonical first facets."""
    left = simplex_boundary(n)
    fp = left.coatoms()[0]
    iso = {x: x for x in closure(left, [fp]) - {fp}}
    return connected_sum(left, simplex_boundary(n), fp, fp, iso, name=f"sum-simplex{n}")


def random_eulerian_small(seed: int, max_rank: int = 4) -> GradedPoset:
    """Deterministic small Eulerian poset composed from Eulerian-preserving pieces."""
    if max_rank > 5:
        raise BadParams("max_rank must be at most 5")
    rng = random.Random(seed)
    rank = rng.randint(2, max(2, max_rank))
    if rank == 2:
        return sphere_two_cells(0)
    if rank == 3:
        kind = rng.choice(["polygon", "sum", "sphere2"])
        if kind == "polygon":
            return polygon(rng.randint(3, 8))
        if kind == "sphere2":
            return sphere_two_cells(1)
        return _polygon_sum(rng.randint(3, 5), rng.randint(3, 5))
    if rank == 4:
        kind = rng.choice(["simplex", "cube", "boolean", "sphere2", "q", "cross", "sum"])
        return {
            "simplex": lambda: simplex_boundary(3),
            "cube": lambda: cube(3),
            "boolean": lambda: boolean_lattice(4),
            "sphere2": lambda: sphere_two_cells(2),
            "q": q_polytope,
            "cross": lambda: cross_polytope(3),
            "sum": lambda: glued_simplex_spheres(3),
        }[kind]()
    kind = rng.choice(["simplex", "boolean", "sphere2", "cross"])
    return {
        "simplex": lambda: simplex_boundary(4),
        "boolean": lambda: boolean_lattice(5),
        "sphere2": lambda: sphere_two_cells(3),
        "cross": lambda: cross_polytope(4),
    }[kind]()


def _polygon_sum(m: int, n: int) -> GradedPoset:
    left, right = polygon(m), polygon(n)
    fp, fq = left.coatoms()[0], right.coatoms()[0]
    iso = {x: x for x in closure(left, [fp]) - {fp}}
    return connected_sum(left, right, fp, fq, iso, name=f"sum-polygon{m}-{n}")


# -- registry -------------------------------------------------------------------------


_FAMILIES: dict[str, tuple] = {
    "polygon": (polygon, 1, "generator"),
    "simplex-boundary": (simplex_boundary, 1, "generator"),
    "boolean": (boolean_lattice, 1, "generator"),
    "cube": (cube, 1, "generator"),
    "cross-polytope": (cross_polytope, 1, "generator"),
    "octahedron": (lambda: cross_polytope(3), 0, "generator"),
    "icosahedron": (icosahedron, 0, "generator"),
    "sphere2cells": (sphere_two_cells, 1, "generator"),
    "discrete-points": (discrete_points, 1, "generator"),
    "point": (point, 0, "generator"),
    "product": (lambda m, n: product(polygon(m), polygon(n)), 2, "generator"),
    "connected-sum": (glued_simplex_spheres, 1, "generator"),
    "torus-7vertex": (torus_seven_vertices, 0, "generator"),
    "q-polytope": (q_polytope, 0, "transcribed fixture: truncated bipyramid over a triangle"),
    "torus-fig6": (torus_fig6, 0, "transcribed fixture: mixed square/triangle torus grid"),
    "torus-fig12": (torus_fig12, 0, "transcribed fixture: pentagon/square/octagon torus tiling"),
    "fig13-nonsemi": (fig13_nonsemi, 0, "transcribed fixture: complex with a bad vertex link"),
}


def families() -> list[str]:
    return sorted(_FAMILIES)


def fixture_spec(family: str, params: tuple[int, ...] = ()) -> FixtureSpec:
    if family not in _FAMILIES:
        raise UnknownFamily(family)
    return FixtureSpec(family, tuple(params), _FAMILIES[family][2])


def gen(family: str, params: tuple[int, ...] | list[int] = ()) -> GradedPoset:
    """Build a validated poset of the given family; UnknownFamily/BadParams on misuse."""
    if family not in _FAMILIES:
        raise UnknownFamily(f"unknown family {family!r}; available: {', '.join(families())}")
    builder, arity, _ = _FAMILIES[family]
    params = tuple(params)
    if len(params) != arity:
        raise BadParams(f"{family} takes {arity} parameter(s), got {len(params)}")
    p = builder(*params)
    problems = validate(p)
    if problems:
        raise PosetError(f"generated poset invalid: {problems[0]}")
    return p


def _class_map(p: GradedPoset, table: dict[str, list[str] | None]) -> dict[str, frozenset[str]]:
    classes = {}
    for sigma, members in table.items():
        if members is None:
            classes[sigma] = frozenset(closure(p, [sigma]))
        else:
            classes[sigma] = frozenset(members) | {sigma}
    return classes


def fixture_certificate(
    family: str, params: tuple[int, ...] | list[int] = ()
) -> SPartitionCert | SEPartitionCert:
    """Transcribed partition certificate for fixtures that publish one."""
    if family == "q-polytope":
        cert = order_to_s_certificate(q_polytope(), [f"s{i}" for i in range(1, 8)])
        assert not isinstance(cert, FailureReport), cert
        return cert
    if family == "torus-fig6":
        p = torus_fig6()
        cert = se_certificate_from_classes(p, "F02", _class_map(p, _TORUS6_CLASSES))
        assert not isinstance(cert, FailureReport), cert
        return cert
    if family == "torus-fig12":
        p = torus_fig12()
        cert = se_certificate_from_classes(p, "OC", _class_map(p, _TORUS12_CLASSES))
        assert not isinstance(cert, FailureReport), cert
        return cert
    raise NoPublishedCertificate(f"no transcribed certificate for family {family!r}")


def shelling_restrictions(p: GradedPoset, order: list[str]) -> list[tuple[str, str]]:
    """Restriction faces of a shelling of a simplicial poset, as (R, facet) pairs.

    R is the smallest face of the facet not contained in any earlier facet;
    for a valid shelling the interval [R, facet] is exactly the set of new
    faces.  Used to feed the boolean-interval partition converter.
    """
    covered: set[str] = set()
    pairs: list[tuple[str, str]] = []
    for facet in order:
        ratoms = _restriction_atoms(p, facet, covered)
        if not ratoms:
            restriction = BOT
        else:
            restriction = min(
                (
                    x
                    for x in closure(p, [facet])
                    if p.rank(x) == len(ratoms) and all(p.leq(a, x) for a in ratoms)
                ),
                key=lambda x: x,
            )
        pairs.append((restriction, facet))
        covered |= closure(p, [facet])
    return pairs


def _restriction_atoms(p: GradedPoset, facet: str, covered: set[str]) -> set[str]:
    """Vertices v of the facet whose opposite ridge lies in the covered region."""
    atoms = [a for a in p.elements_of_rank(1) if p.leq(a, facet)]
    ridges = [x for x in closure(p, [facet]) if p.rank(x) == p.rank(facet) - 1]
    out = set()
    for a in atoms:
        opposite = [r for r in ridges if not p.leq(a, r)]
        if any(r in covered for r in opposite):
            out.add(a)
    return out
