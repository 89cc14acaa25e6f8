"""Chain enumeration, flag f/h-vectors, Dehn-Sommerville checks and cd-indices.

Rank sets are subsets of [d] for a poset of rank d+1 and are carried as
bitmasks internally (bit i-1 stands for rank i); the public dataclasses key
their counts by frozenset for readability.  Chain counts are memoized per
(element, remaining rank set) so the 2^d rank sets share suffix work.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .ncpoly import AB, NcPolynomial, NotInImage, ab_to_cd, substitute_a_minus_b
from .poset import GradedPoset


@dataclass(frozen=True)
class FlagVector:
    """Chain counts f_K by rank set K, including f_emptyset = 1."""

    d: int
    counts: dict[frozenset[int], int]

    def get(self, ranks) -> int:
        return self.counts[frozenset(ranks)]


@dataclass(frozen=True)
class FlagHVector:
    """Alternating-sum transform h_K of a flag vector."""

    d: int
    counts: dict[frozenset[int], int]

    def get(self, ranks) -> int:
        return self.counts[frozenset(ranks)]


@dataclass(frozen=True)
class ModifiedFlagVector:
    """Flag vector with the top-rank count shifted by chi(sphere) - chi(poset)."""

    base: FlagVector
    correction: int

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def counts(self) -> dict[frozenset[int], int]:
        out = dict(self.base.counts)
        if self.d >= 1:
            out[frozenset({self.d})] += self.correction
        return out

    def get(self, ranks) -> int:
        return self.counts[frozenset(ranks)]


@dataclass(frozen=True)
class DsViolation:
    """One failed generalized Dehn-Sommerville equation."""

    K: frozenset[int]
    i: int
    k: int
    lhs: int
    rhs: int

    def __str__(self) -> str:
        ks = "{" + ",".join(str(j) for j in sorted(self.K)) + "}"
        return f"K={ks} i={self.i} k={self.k}: {self.lhs} != {self.rhs}"


def _masks(d: int):
    return range(1 << d)


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _set_to_mask(K) -> int:
    return sum(1 << (i - 1) for i in K)


def _flag_masks(p: GradedPoset) -> dict[int, int]:
    """Chain counts by rank-set bitmask."""
    key = "flag_masks"
    if key in p._cache:
        return p._cache[key]
    d = p.rank_top - 1
    by_rank = {r: p.elements_of_rank(r) for r in range(1, d + 1)}
    memo: dict[tuple[str, int], int] = {}

    def suffix(x: str, mask: int) -> int:
        if not mask:
            return 1
        got = memo.get((x, mask))
        if got is not None:
            return got
        low = (mask & -mask).bit_length()  # smallest rank in the mask
        rest = mask ^ (1 << (low - 1))
        total = 0
        for y in by_rank[low]:
            if p.less(x, y):
                total += suffix(y, rest)
        memo[(x, mask)] = total
        return total

    counts: dict[int, int] = {}
    for mask in _masks(d):
        if mask == 0:
            counts[0] = 1
            continue
        low = (mask & -mask).bit_length()
        rest = mask ^ (1 << (low - 1))
        counts[mask] = sum(suffix(x, rest) for x in by_rank[low])
    p._cache[key] = counts
    return counts


def flag_f(p: GradedPoset) -> FlagVector:
    """Flag f-vector: number of chains with each rank set K in [d]."""
    d = p.rank_top - 1
    counts = _flag_masks(p)
    return FlagVector(d, {_mask_to_set(m): c for m, c in counts.items()})


def flag_h(f: FlagVector) -> FlagHVector:
    """h_K = sum over T in K of (-1)^{|K - T|} f_T."""
    d = f.d
    h: dict[frozenset[int], int] = {}
    for K, _ in f.counts.items():
        total = 0
        km = _set_to_mask(K)
        sub = km
        while True:
            T = _mask_to_set(sub)
            total += (-1) ** (len(K) - len(T)) * f.counts[T]
            if sub == 0:
                break
            sub = (sub - 1) & km
        h[K] = total
    return FlagHVector(d, h)


def flag_f_from_h(h: FlagHVector) -> FlagVector:
    """Inverse transform f_K = sum over T in K of h_T; exact round trip."""
    f: dict[frozenset[int], int] = {}
    for K in h.counts:
        km = _set_to_mask(K)
        total = 0
        sub = km
        while True:
            total += h.counts[_mask_to_set(sub)]
            if sub == 0:
                break
            sub = (sub - 1) & km
        f[K] = total
    return FlagVector(h.d, f)


def _word_for(K: frozenset[int], d: int) -> str:
    return "".join("b" if i in K else "a" for i in range(1, d + 1))


def ab_polynomial(h: FlagHVector) -> NcPolynomial:
    """The ab-polynomial: sum of h_K u_K with u_i = b exactly when i is in K."""
    return NcPolynomial(AB, {_word_for(K, h.d): c for K, c in h.counts.items()})


def chain_polynomial(f: FlagVector | ModifiedFlagVector) -> NcPolynomial:
    """The chain polynomial: sum of f_K u_K; relates to the ab-polynomial by a -> a-b."""
    d = f.d
    return NcPolynomial(AB, {_word_for(K, d): c for K, c in f.counts.items()})


def euler_characteristic(p: GradedPoset) -> int:
    """Alternating sum of the rank counts over ranks 1..d."""
    d = p.rank_top - 1
    return sum((-1) ** (i - 1) * len(p.elements_of_rank(i)) for i in range(1, d + 1))


def sphere_euler_characteristic(dim: int) -> int:
    """chi of the dim-dimensional sphere: 1 + (-1)^dim."""
    return 1 + (-1) ** dim


def check_dehn_sommerville(f: FlagVector | ModifiedFlagVector) -> list[DsViolation]:
    """Violated generalized Dehn-Sommerville equations, empty iff all hold.

    For each K in [d] and each pair i < k consecutive in K + {0, d+1} with
    k - i >= 2:  sum_{j=i+1}^{k-1} (-1)^{j-i-1} f_{K+j} = (1 - (-1)^{k-i-1}) f_K.
    """
    d = f.d
    counts = f.counts
    out: list[DsViolation] = []
    for K in sorted(counts, key=lambda s: (len(s), sorted(s))):
        anchors = sorted(K | {0, d + 1})
        for i, k in zip(anchors, anchors[1:]):
            if k - i < 2:
                continue
            lhs = sum((-1) ** (j - i - 1) * counts[K | {j}] for j in range(i + 1, k))
            rhs = (1 - (-1) ** (k - i - 1)) * counts[K]
            if lhs != rhs:
                out.append(DsViolation(K, i, k, lhs, rhs))
    return out


def _extract_cd(f: FlagVector | ModifiedFlagVector) -> NcPolynomial:
    psi = ab_polynomial(flag_h(f)) if isinstance(f, FlagVector) else substitute_a_minus_b(chain_polynomial(f))
    try:
        return ab_to_cd(psi)
    except NotInImage as exc:
        ds = check_dehn_sommerville(f)
        if ds:
            raise NotInImage(f"first failing Dehn-Sommerville equation: {ds[0]}") from exc
        raise


def cd_index(p: GradedPoset) -> NcPolynomial:
    """The cd-index via flag_f -> flag_h -> ab-polynomial -> exact extraction.

    Raises NotInImage (with the first failing Dehn-Sommerville triple when one
    exists) if the flag vector admits no cd-expression.
    """
    return _extract_cd(flag_f(p))


def modified_flag_f(p: GradedPoset) -> ModifiedFlagVector:
    """Flag vector with f_{d} shifted by chi(S^{d-1}) - chi(p).

    Meaningful for semi-Eulerian posets; computed (with a warning) otherwise.
    """
    from .poset import is_semi_eulerian

    d = p.rank_top - 1
    correction = sphere_euler_characteristic(d - 1) - euler_characteristic(p) if d >= 1 else 0
    if not is_semi_eulerian(p):
        warnings.warn(f"{p.name}: modified flag vector of a non-semi-Eulerian poset", stacklevel=2)
    return ModifiedFlagVector(flag_f(p), correction)


def semi_cd_index(p: GradedPoset) -> NcPolynomial:
    """cd-index of the modified chain polynomial; equals cd_index on Eulerian input."""
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        mf = modified_flag_f(p)
    return _extract_cd(mf)


def format_flag_vector(f: FlagVector | ModifiedFlagVector) -> str:
    """Lines ``K={1,3}: 36`` in subset-size then lexicographic order."""
    lines = []
    for K in sorted(f.counts, key=lambda s: (len(s), sorted(s))):
        ks = "{" + ",".join(str(i) for i in sorted(K)) + "}"
        lines.append(f"K={ks}: {f.counts[K]}")
    return "\n".join(lines) + "\n"
