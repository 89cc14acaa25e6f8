"""Recursive partition certificates and the per-coatom cd-index recursion.

An S-certificate partitions the elements of an Eulerian poset (minus the top)
into one class per coatom: a full initial closure, a singleton terminal class
and ordinary classes whose capped closures are near-Eulerian with recursively
certified semisuspensions.  The SE variant relaxes ordinary classes to split
into several near-Eulerian subclasses and allows any number of singleton
classes on a semi-Eulerian poset.

Verification never searches: a certificate is an explicit witness and
``verify_*`` only checks it.  The searches produce certificates: a
facet-order backtracking search (with a full per-element assignment fallback
below a size threshold) for the Eulerian case, and a greedy
adjacency-order search with backtracking for the semi-Eulerian case.

Contribution maps implement the recursion: the initial coatom contributes
the cd-index of its capped boundary times c, ordinary coatoms contribute the
boundary cd-index times d plus the ordinary contributions of their
semisuspensions times c, and terminal or singleton coatoms contribute zero.
The boundary cd-indices are computed by the direct flag pipeline and
cross-checked against the recursive totals at every level.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .flags import cd_index
from .ncpoly import CD, NcPolynomial
from .poset import (
    BOT,
    TOP,
    GradedPoset,
    PosetError,
    RankTooLow,
    Violation,
    boundary_set,
    cap,
    closure,
    is_eulerian,
    is_near_eulerian,
    is_semi_eulerian,
    pair_name,
    semisuspension,
    validate,
)


class BudgetExhausted(Exception):
    """The search node budget ran out before a verdict."""


class NegativeCoefficient(ValueError):
    pass


class NotSimplicial(PosetError):
    pass


class NotAPartition(PosetError):
    pass


class RankNotThree(PosetError):
    pass


class CertificateInvalid(PosetError):
    """A contribution computation was asked for an invalid certificate."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations[:3]))
        self.violations = violations


class CrossCheckError(PosetError):
    """Direct and recursive boundary cd-indices disagreed (data corruption)."""


class CertificateParseError(PosetError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Budget:
    """Deterministic search-node counter shared across recursive searches."""

    limit: int = 10**6
    used: int = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExhausted(f"search budget of {self.limit} nodes exhausted")


@dataclass
class SPartitionCert:
    """Witness of S-partitionability; sub-certificates are nested certs."""

    poset: GradedPoset
    classes: dict[str, frozenset[str]]
    initial: str | None
    terminal: str | None
    subcert_initial: "SPartitionCert | None"
    subcerts: dict[str, "SPartitionCert"]

    def ordinary(self) -> list[str]:
        return sorted(s for s in self.classes if s not in (self.initial, self.terminal))


@dataclass
class SEPartitionCert:
    """Witness of SE-partitionability with per-coatom subclass decompositions."""

    poset: GradedPoset
    classes: dict[str, frozenset[str]]
    initial: str | None
    singletons: frozenset[str]
    subclass_decomp: dict[str, tuple[frozenset[str], ...]]
    subcert_initial: "SPartitionCert | None"
    subcerts: dict[tuple[str, int], SPartitionCert]

    def ordinary(self) -> list[str]:
        return sorted(s for s in self.classes if s != self.initial and s not in self.singletons)


@dataclass
class ContributionMap:
    """Per-coatom cd-polynomials summing to the poset's cd-index."""

    per_coatom: dict[str, NcPolynomial]
    total: NcPolynomial


@dataclass(frozen=True)
class FailureReport:
    """Negative outcome of a conversion: the first facet whose class fails."""

    facet: str | None
    code: str
    detail: str

    def __str__(self) -> str:
        where = self.facet if self.facet is not None else "-"
        return f"FAILURE {self.code} {where} {self.detail}"


class _ClassFailure(Exception):
    def __init__(self, facet: str | None, code: str, detail: str):
        super().__init__(f"{code} at {facet}: {detail}")
        self.facet = facet
        self.code = code
        self.detail = detail

    def report(self) -> FailureReport:
        return FailureReport(self.facet, self.code, self.detail)


# -- derived sub-posets -----------------------------------------------------------


def tau_name(sigma: str, j: int | None = None) -> str:
    return f"tau@{sigma}" if j is None else f"tau@{sigma}/{j}"


def initial_boundary_poset(p: GradedPoset, sigma1: str) -> GradedPoset:
    """The capped open closure of the initial coatom, a rank-d poset."""
    d = p.rank_top - 1
    members = closure(p, [sigma1]) - {sigma1}
    return cap(p, members, d, name=f"bnd({p.name}@{sigma1})")


def gamma_poset(p: GradedPoset, sigma: str, members: set[str] | frozenset[str]) -> GradedPoset:
    """Capped closure of a class minus its coatom (or of an SE subclass)."""
    d = p.rank_top - 1
    return cap(p, closure(p, members), d, name=f"gamma({p.name}@{sigma})")


def boundary_poset(gamma: GradedPoset) -> GradedPoset:
    """The boundary of a capped near-Eulerian poset, capped one rank lower."""
    return cap(gamma, boundary_set(gamma), gamma.rank_top - 1, name=f"bnd({gamma.name})")


def _gamma_checked(p: GradedPoset, sigma: str, rest: set[str] | frozenset[str]) -> GradedPoset:
    """Build and fully check an ordinary class closure; raises _ClassFailure."""
    if not rest:
        raise _ClassFailure(sigma, "ordinary-singleton", "ordinary class has no members besides its coatom")
    try:
        gamma = gamma_poset(p, sigma, rest)
    except (RankTooLow, PosetError) as exc:
        raise _ClassFailure(sigma, "gamma-unbuildable", str(exc))
    if not is_near_eulerian(gamma):
        raise _ClassFailure(sigma, "gamma-not-near-eulerian", gamma.name)
    bdry = boundary_set(gamma)
    if set(rest) & bdry:
        raise _ClassFailure(sigma, "non-disjoint-boundary", f"{sorted(set(rest) & bdry)}")
    if set(rest) | bdry != set(gamma.elements()) - {TOP}:
        missing = (set(gamma.elements()) - {TOP}) - (set(rest) | bdry)
        raise _ClassFailure(sigma, "gamma-decomposition", f"uncovered closure part {sorted(missing)}")
    return gamma


# -- verification ------------------------------------------------------------------


def _check_partition(
    cert: SPartitionCert | SEPartitionCert, path: str, out: list[Violation]
) -> bool:
    """Shared class-map checks; returns False when deeper checks are hopeless."""
    p = cert.poset
    coatoms = set(p.coatoms())
    if set(cert.classes) != coatoms:
        out.append(
            Violation(
                "class-keys",
                path,
                f"classes for {sorted(cert.classes)} but coatoms are {sorted(coatoms)}",
            )
        )
        return False
    ground = set(p.elements()) - {p.top()}
    owner: dict[str, str] = {}
    for sigma in sorted(cert.classes):
        for m in cert.classes[sigma]:
            if m in owner:
                out.append(
                    Violation("overlapping-classes", f"{path}/class[{sigma}]", f"{m} already in class[{owner[m]}]")
                )
            owner[m] = sigma
    missing = ground - set(owner)
    stray = set(owner) - ground
    if missing:
        out.append(Violation("not-covering", path, f"unassigned elements {sorted(missing)}"))
    if stray:
        out.append(Violation("foreign-members", path, f"{sorted(stray)}"))
    for sigma in sorted(cert.classes):
        members = cert.classes[sigma]
        if sigma not in members:
            out.append(Violation("coatom-not-in-class", f"{path}/class[{sigma}]", sigma))
        allowed = closure(p, [sigma])
        if not set(members) <= allowed:
            bad = sorted(set(members) - allowed)
            out.append(Violation("class-not-in-closure", f"{path}/class[{sigma}]", f"{bad}"))
    if cert.initial not in coatoms:
        out.append(Violation("initial-missing", path, f"{cert.initial!r}"))
        return False
    if cert.classes[cert.initial] != frozenset(closure(p, [cert.initial])):
        out.append(Violation("initial-not-closure", f"{path}/class[{cert.initial}]", "must be the full closure"))
    return not out


def _verify_subcert_initial(
    cert: SPartitionCert | SEPartitionCert, path: str, out: list[Violation]
) -> None:
    expected = initial_boundary_poset(cert.poset, cert.initial)
    sub = cert.subcert_initial
    if sub is None:
        out.append(Violation("missing-initial-subcert", f"{path}/class[{cert.initial}]", "no sub-certificate"))
    elif sub.poset != expected:
        out.append(Violation("subposet-mismatch", f"{path}/class[{cert.initial}]/sub", "capped boundary differs"))
    else:
        out.extend(verify_s_partition(sub, f"{path}/class[{cert.initial}]/sub"))


def _verify_ordinary_subcert(
    poset_path: str,
    sigma: str,
    rest: frozenset[str],
    p: GradedPoset,
    sub: SPartitionCert | None,
    tau: str,
    out: list[Violation],
) -> None:
    try:
        gamma = _gamma_checked(p, sigma, rest)
    except _ClassFailure as cf:
        out.append(Violation(cf.code, poset_path, cf.detail))
        return
    expected, _ = semisuspension(gamma, tau)
    if sub is None:
        out.append(Violation("missing-subcert", poset_path, "no sub-certificate"))
    elif sub.poset != expected:
        out.append(Violation("subposet-mismatch", f"{poset_path}/sub", "semisuspension differs"))
    elif sub.initial != tau:
        out.append(Violation("initial-not-tau", f"{poset_path}/sub", f"initial is {sub.initial!r}, expected {tau!r}"))
    else:
        out.extend(verify_s_partition(sub, f"{poset_path}/sub"))


def verify_s_partition(cert: SPartitionCert, path: str = "spart") -> list[Violation]:
    """Full recursive check; empty list iff the certificate is a valid witness."""
    out: list[Violation] = []
    p = cert.poset
    bad = validate(p)
    if bad:
        return [Violation("poset-invalid", path, str(v)) for v in bad]
    d = p.rank_top - 1
    if d == 0:
        if cert.classes or cert.initial or cert.terminal or cert.subcerts or cert.subcert_initial:
            out.append(Violation("base-not-empty", path, "rank-1 certificate carries classes"))
        return out
    if not is_eulerian(p):
        return [Violation("not-eulerian", path, p.name)]
    if not _check_partition(cert, path, out):
        return out
    coatoms = set(p.coatoms())
    if cert.terminal not in coatoms:
        out.append(Violation("terminal-missing", path, f"{cert.terminal!r}"))
        return out
    if cert.terminal == cert.initial:
        out.append(Violation("initial-terminal-clash", path, cert.initial))
        return out
    if cert.classes[cert.terminal] != frozenset({cert.terminal}):
        out.append(Violation("terminal-not-singleton", f"{path}/class[{cert.terminal}]", "must be a one-element class"))
    _verify_subcert_initial(cert, path, out)
    if set(cert.subcerts) != set(cert.ordinary()):
        out.append(Violation("subcert-keys", path, f"{sorted(cert.subcerts)} vs ordinary {cert.ordinary()}"))
        return out
    for sigma in cert.ordinary():
        rest = cert.classes[sigma] - {sigma}
        _verify_ordinary_subcert(
            f"{path}/class[{sigma}]", sigma, rest, p, cert.subcerts.get(sigma), tau_name(sigma), out
        )
    return out


def verify_se_partition(cert: SEPartitionCert, path: str = "separt") -> list[Violation]:
    """Full recursive check of an SE-certificate on a semi-Eulerian poset."""
    out: list[Violation] = []
    p = cert.poset
    bad = validate(p)
    if bad:
        return [Violation("poset-invalid", path, str(v)) for v in bad]
    d = p.rank_top - 1
    if d == 0:
        if cert.classes or cert.initial or cert.subcerts or cert.subcert_initial:
            out.append(Violation("base-not-empty", path, "rank-1 certificate carries classes"))
        return out
    if not is_semi_eulerian(p):
        return [Violation("not-semi-eulerian", path, p.name)]
    if not _check_partition(cert, path, out):
        return out
    for sigma in sorted(cert.singletons):
        if sigma == cert.initial:
            out.append(Violation("initial-singleton-clash", path, sigma))
        elif cert.classes.get(sigma) != frozenset({sigma}):
            out.append(Violation("singleton-not-singleton", f"{path}/class[{sigma}]", "declared singleton has extra members"))
    for sigma in sorted(cert.classes):
        if sigma != cert.initial and sigma not in cert.singletons and cert.classes[sigma] == frozenset({sigma}):
            out.append(Violation("undeclared-singleton", f"{path}/class[{sigma}]", "one-element class not declared singleton"))
    _verify_subcert_initial(cert, path, out)
    if set(cert.subclass_decomp) != set(cert.ordinary()):
        out.append(
            Violation("subclass-keys", path, f"{sorted(cert.subclass_decomp)} vs ordinary {cert.ordinary()}")
        )
        return out
    for sigma in cert.ordinary():
        cpath = f"{path}/class[{sigma}]"
        rest = cert.classes[sigma] - {sigma}
        parts = cert.subclass_decomp[sigma]
        if not parts:
            out.append(Violation("empty-decomposition", cpath, "ordinary class with no subclasses"))
            continue
        union: set[str] = set()
        overlap_free = True
        for part in parts:
            if union & part:
                out.append(Violation("overlapping-subclasses", cpath, f"{sorted(union & part)}"))
                overlap_free = False
            union |= part
        if union != set(rest):
            out.append(Violation("subclasses-not-partition", cpath, f"union {sorted(union)} vs {sorted(rest)}"))
            overlap_free = False
        if not overlap_free:
            continue
        for j, part in enumerate(parts, start=1):
            _verify_ordinary_subcert(
                f"{cpath}/subclass[{j}]",
                sigma,
                frozenset(part),
                p,
                cert.subcerts.get((sigma, j)),
                tau_name(sigma, j),
                out,
            )
    return out


# -- contributions -----------------------------------------------------------------


def _ordinary_block(p: GradedPoset, sigma: str, rest: frozenset[str], sub: SPartitionCert, tau: str) -> NcPolynomial:
    """Phi(boundary)*d plus the ordinary contributions of the semisuspension times c."""
    gamma = gamma_poset(p, sigma, rest)
    phi_bdry = cd_index(boundary_poset(gamma))
    rec = _contributions_s(sub)
    rec_bdry = _contributions_s(sub.subcert_initial).total if sub.subcert_initial else NcPolynomial.unit(CD)
    if rec_bdry != phi_bdry:
        raise CrossCheckError(f"boundary cd-index mismatch at {sigma}: {phi_bdry} vs {rec_bdry}")
    out = phi_bdry.times_letter("d")
    for omega in sub.ordinary():
        out = out + rec.per_coatom[omega].times_letter("c")
    return out


def _initial_block(cert: SPartitionCert | SEPartitionCert) -> NcPolynomial:
    phi = cd_index(initial_boundary_poset(cert.poset, cert.initial))
    rec = _contributions_s(cert.subcert_initial)
    if rec.total != phi:
        raise CrossCheckError(f"initial boundary cd-index mismatch: {phi} vs {rec.total}")
    return phi.times_letter("c")


def _contributions_s(cert: SPartitionCert) -> ContributionMap:
    p = cert.poset
    if p.rank_top - 1 == 0:
        return ContributionMap({}, NcPolynomial.unit(CD))
    per: dict[str, NcPolynomial] = {cert.initial: _initial_block(cert)}
    per[cert.terminal] = NcPolynomial.zero(CD)
    for sigma in cert.ordinary():
        per[sigma] = _ordinary_block(
            p, sigma, cert.classes[sigma] - {sigma}, cert.subcerts[sigma], tau_name(sigma)
        )
    total = NcPolynomial.zero(CD)
    for poly in per.values():
        total = total + poly
    return ContributionMap(per, total)


def contributions_s(cert: SPartitionCert, check: bool = True) -> ContributionMap:
    """Per-coatom contributions of a verified S-certificate; total is the cd-index."""
    if check:
        violations = verify_s_partition(cert)
        if violations:
            raise CertificateInvalid(violations)
    return _contributions_s(cert)


def _contributions_se(cert: SEPartitionCert) -> ContributionMap:
    p = cert.poset
    if p.rank_top - 1 == 0:
        return ContributionMap({}, NcPolynomial.unit(CD))
    per: dict[str, NcPolynomial] = {cert.initial: _initial_block(cert)}
    for sigma in sorted(cert.singletons):
        per[sigma] = NcPolynomial.zero(CD)
    for sigma in cert.ordinary():
        acc = NcPolynomial.zero(CD)
        for j, part in enumerate(cert.subclass_decomp[sigma], start=1):
            acc = acc + _ordinary_block(p, sigma, frozenset(part), cert.subcerts[(sigma, j)], tau_name(sigma, j))
        per[sigma] = acc
    total = NcPolynomial.zero(CD)
    for poly in per.values():
        total = total + poly
    return ContributionMap(per, total)


def contributions_se(cert: SEPartitionCert, check: bool = True) -> ContributionMap:
    """Per-coatom contributions of a verified SE-certificate; total is the semi cd-index."""
    if check:
        violations = verify_se_partition(cert)
        if violations:
            raise CertificateInvalid(violations)
    return _contributions_se(cert)


def cd_word_multiset(cm: ContributionMap) -> dict[str, Counter]:
    """Explode nonnegative per-coatom polynomials into word multisets."""
    out: dict[str, Counter] = {}
    for sigma in sorted(cm.per_coatom):
        words: Counter = Counter()
        for word, coeff in cm.per_coatom[sigma].items():
            if coeff < 0:
                raise NegativeCoefficient(f"{sigma}: coefficient {coeff} at {word!r}")
            words[word] = coeff
        out[sigma] = words
    return out


# -- certificate assembly (shared by searches and converters) ------------------------


def _base_cert(p: GradedPoset) -> SPartitionCert:
    return SPartitionCert(p, {}, None, None, None, {})


def _assemble_s_cert(
    p: GradedPoset,
    initial: str,
    terminal: str,
    classes: dict[str, frozenset[str]],
    budget: Budget,
) -> SPartitionCert:
    """Build sub-certificates for given classes; raises _ClassFailure on defects."""
    sub_init = _search_s(initial_boundary_poset(p, initial), budget, first=None)
    if sub_init is None:
        raise _ClassFailure(initial, "initial-subcert", "capped boundary admits no certificate")
    subcerts: dict[str, SPartitionCert] = {}
    for sigma in sorted(classes):
        if sigma in (initial, terminal):
            continue
        gamma = _gamma_checked(p, sigma, classes[sigma] - {sigma})
        ss, tau = semisuspension(gamma, tau_name(sigma))
        sub = _search_s(ss, budget, first=tau)
        if sub is None:
            raise _ClassFailure(sigma, "subcert-search", "semisuspension admits no certificate")
        subcerts[sigma] = sub
    return SPartitionCert(p, dict(classes), initial, terminal, sub_init, subcerts)


def s_certificate_from_classes(
    p: GradedPoset,
    initial: str,
    terminal: str,
    classes: dict[str, frozenset[str]],
    budget: Budget | None = None,
) -> SPartitionCert | FailureReport:
    """Assemble an S-certificate from explicit classes, searching sub-certificates."""
    try:
        return _assemble_s_cert(p, initial, terminal, classes, budget or Budget())
    except _ClassFailure as cf:
        return cf.report()


def _components(p: GradedPoset, members: frozenset[str]) -> list[frozenset[str]]:
    """Connected components of the comparability graph restricted to members."""
    remaining = set(members)
    comps = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = [seed]
        while frontier:
            x = frontier.pop()
            for y in remaining - comp:
                if p.less(x, y) or p.less(y, x):
                    comp.add(y)
                    frontier.append(y)
        comps.append(frozenset(comp))
        remaining -= comp
    return sorted(comps, key=min)


def _assemble_se_cert(
    p: GradedPoset,
    initial: str,
    classes: dict[str, frozenset[str]],
    budget: Budget,
) -> SEPartitionCert:
    sub_init = _search_s(initial_boundary_poset(p, initial), budget, first=None)
    if sub_init is None:
        raise _ClassFailure(initial, "initial-subcert", "capped boundary admits no certificate")
    singletons = set()
    decomp: dict[str, tuple[frozenset[str], ...]] = {}
    subcerts: dict[tuple[str, int], SPartitionCert] = {}
    for sigma in sorted(classes):
        if sigma == initial:
            continue
        rest = classes[sigma] - {sigma}
        if not rest:
            singletons.add(sigma)
            continue
        parts = _components(p, rest)
        decomp[sigma] = tuple(parts)
        for j, part in enumerate(parts, start=1):
            gamma = _gamma_checked(p, sigma, part)
            ss, tau = semisuspension(gamma, tau_name(sigma, j))
            sub = _search_s(ss, budget, first=tau)
            if sub is None:
                raise _ClassFailure(sigma, "subcert-search", f"subclass {j} semisuspension admits no certificate")
            subcerts[(sigma, j)] = sub
    return SEPartitionCert(p, dict(classes), initial, frozenset(singletons), decomp, sub_init, subcerts)


def se_certificate_from_classes(
    p: GradedPoset,
    initial: str,
    classes: dict[str, frozenset[str]],
    budget: Budget | None = None,
) -> SEPartitionCert | FailureReport:
    """Assemble an SE-certificate from explicit classes (subclasses split by connectivity)."""
    try:
        return _assemble_se_cert(p, initial, classes, budget or Budget())
    except _ClassFailure as cf:
        return cf.report()


# -- searches -------------------------------------------------------------------------


def _classes_from_order(p: GradedPoset, order: list[str]) -> dict[str, frozenset[str]]:
    covered: set[str] = set()
    classes: dict[str, frozenset[str]] = {}
    for sigma in order:
        cl = closure(p, [sigma])
        classes[sigma] = frozenset(cl - covered)
        covered |= cl
    return classes


def _search_s(p: GradedPoset, budget: Budget, first: str | None) -> SPartitionCert | None:
    """Backtracking over facet orders with per-step class checks."""
    d = p.rank_top - 1
    if d == 0:
        return _base_cert(p)
    if not is_eulerian(p):
        return None
    coatoms = sorted(p.coatoms())
    if len(coatoms) < 2:
        return None
    closures = {s: closure(p, [s]) for s in coatoms}

    def extend(order: list[str], covered: set[str]) -> SPartitionCert | None:
        if len(order) == len(coatoms):
            try:
                return _assemble_s_cert(p, order[0], order[-1], _classes_from_order(p, order), budget)
            except _ClassFailure:
                return None
        last_slot = len(order) == len(coatoms) - 1
        for sigma in coatoms:
            if sigma in order:
                continue
            if not order and first is not None and sigma != first:
                continue
            budget.spend()
            members = closures[sigma] - covered
            if order:
                if last_slot:
                    if members != {sigma}:
                        continue
                else:
                    if members == {sigma}:
                        continue
                    try:
                        _gamma_checked(p, sigma, members - {sigma})
                    except _ClassFailure:
                        continue
            found = extend(order + [sigma], covered | closures[sigma])
            if found is not None:
                return found
        return None

    return extend([], set())


def _search_s_assignments(p: GradedPoset, budget: Budget, first: str | None) -> SPartitionCert | None:
    """Exhaustive per-element assignment search, for small posets only."""
    coatoms = sorted(p.coatoms())
    ground = set(p.elements()) - {p.top()}
    eligible = {
        x: [s for s in coatoms if p.less(x, s)] for x in sorted(ground) if x not in coatoms
    }
    for initial in coatoms if first is None else [first]:
        init_class = closure(p, [initial])
        for terminal in coatoms:
            if terminal == initial:
                continue
            free = sorted(x for x in eligible if x not in init_class)
            assign: dict[str, set[str]] = {s: {s} for s in coatoms if s not in (initial, terminal)}

            def place(i: int) -> SPartitionCert | None:
                if i == len(free):
                    classes = {s: frozenset(v) for s, v in assign.items()}
                    classes[initial] = frozenset(init_class)
                    classes[terminal] = frozenset({terminal})
                    try:
                        return _assemble_s_cert(p, initial, terminal, classes, budget)
                    except _ClassFailure:
                        return None
                x = free[i]
                for s in eligible[x]:
                    if s in (initial, terminal):
                        continue
                    budget.spend()
                    assign[s].add(x)
                    found = place(i + 1)
                    if found is not None:
                        return found
                    assign[s].discard(x)
                return None

            found = place(0)
            if found is not None:
                return found
    return None


def search_s_certificate(
    p: GradedPoset,
    budget: Budget | int | None = None,
    first: str | None = None,
    assignment_threshold: int = 40,
) -> SPartitionCert | None:
    """Search an S-certificate: facet orders first, assignment fallback when small.

    Returns None when the search family is exhausted; raises BudgetExhausted
    when the node budget runs out and PosetError on a non-Eulerian input.
    """
    if isinstance(budget, int) or budget is None:
        budget = Budget(budget or 10**6)
    bad = validate(p)
    if bad:
        raise PosetError(f"invalid poset: {bad[0]}")
    if not is_eulerian(p):
        raise PosetError(f"{p.name} is not Eulerian")
    cert = _search_s(p, budget, first)
    if cert is None and len(p) <= assignment_threshold and p.rank_top >= 2:
        cert = _search_s_assignments(p, budget, first)
    return cert


def _facet_adjacent(p: GradedPoset, sigma: str, covered: set[str]) -> bool:
    ridge_rank = p.rank_top - 2
    return any(x in covered and p.rank(x) == ridge_rank for x in closure(p, [sigma]))


def search_se_certificate(
    p: GradedPoset,
    budget: Budget | int | None = None,
) -> SEPartitionCert | None:
    """Search an SE-certificate by adjacency orders with backtracking.

    Facets are added one at a time, each sharing a ridge with the region
    covered so far; classes split into connected subclasses.  Returns None
    on exhaustion, raises BudgetExhausted or PosetError (non-semi-Eulerian).
    """
    if isinstance(budget, int) or budget is None:
        budget = Budget(budget or 10**6)
    bad = validate(p)
    if bad:
        raise PosetError(f"invalid poset: {bad[0]}")
    if not is_semi_eulerian(p):
        raise PosetError(f"{p.name} is not semi-Eulerian")
    d = p.rank_top - 1
    if d == 0:
        return SEPartitionCert(p, {}, None, frozenset(), {}, None, {})
    coatoms = sorted(p.coatoms())
    closures = {s: closure(p, [s]) for s in coatoms}

    def class_ok(sigma: str, members: set[str]) -> bool:
        rest = frozenset(members - {sigma})
        if not rest:
            return True
        for part in _components(p, rest):
            try:
                _gamma_checked(p, sigma, part)
            except _ClassFailure:
                return False
        return True

    def extend(order: list[str], covered: set[str]) -> SEPartitionCert | None:
        if len(order) == len(coatoms):
            try:
                return _assemble_se_cert(p, order[0], _classes_from_order(p, order), budget)
            except _ClassFailure:
                return None
        for sigma in coatoms:
            if sigma in order:
                continue
            if order and not _facet_adjacent(p, sigma, covered):
                continue
            budget.spend()
            if order and not class_ok(sigma, closures[sigma] - covered):
                continue
            found = extend(order + [sigma], covered | closures[sigma])
            if found is not None:
                return found
        return None

    return extend([], set())


# -- conversions ------------------------------------------------------------------------


def order_to_s_certificate(
    p: GradedPoset,
    facet_order: list[str],
    budget: Budget | int | None = None,
) -> SPartitionCert | FailureReport:
    """Certificate induced by a shelling-style facet order, or a failure report."""
    if isinstance(budget, int) or budget is None:
        budget = Budget(budget or 10**6)
    bad = validate(p)
    if bad:
        return FailureReport(None, "poset-invalid", str(bad[0]))
    if not is_eulerian(p):
        return FailureReport(None, "not-eulerian", p.name)
    if sorted(facet_order) != sorted(p.coatoms()):
        return FailureReport(None, "bad-order", "order must enumerate all coatoms exactly once")
    if len(facet_order) < 2:
        return FailureReport(None, "bad-order", "need at least two facets")
    classes = _classes_from_order(p, facet_order)
    terminal = facet_order[-1]
    if classes[terminal] != frozenset({terminal}):
        return FailureReport(terminal, "terminal-not-singleton", "last facet class has extra members")
    for sigma in facet_order[1:-1]:
        if classes[sigma] == frozenset({sigma}):
            return FailureReport(sigma, "ordinary-singleton", "intermediate facet already covered")
    try:
        return _assemble_s_cert(p, facet_order[0], terminal, classes, budget)
    except _ClassFailure as cf:
        return cf.report()


def _is_simplicial(p: GradedPoset) -> bool:
    atoms = set(p.elements_of_rank(1))
    for x in p.elements():
        r = p.rank(x)
        if x == p.top() or r == 0:
            continue
        below = closure(p, [x])
        if len(below & atoms) != r or len(below) != 2**r:
            return False
    return True


def simplicial_partition_to_s_certificate(
    p: GradedPoset,
    pairs: list[tuple[str, str]],
    budget: Budget | int | None = None,
) -> SPartitionCert | FailureReport:
    """Certificate from a boolean-interval partition [R_i, facet_i] of a simplicial poset.

    Raises NotSimplicial when some lower interval is not boolean and
    NotAPartition when the pairs do not form one partition class per facet
    with a unique empty restriction and a unique full restriction.
    """
    if isinstance(budget, int) or budget is None:
        budget = Budget(budget or 10**6)
    bad = validate(p)
    if bad:
        return FailureReport(None, "poset-invalid", str(bad[0]))
    if not _is_simplicial(p):
        raise NotSimplicial(f"{p.name}: a lower interval is not boolean")
    coatoms = sorted(p.coatoms())
    if sorted(facet for _, facet in pairs) != coatoms:
        raise NotAPartition("pairs must name every facet exactly once")
    for restriction, facet in pairs:
        if not p.leq(restriction, facet):
            raise NotAPartition(f"restriction {restriction!r} not below facet {facet!r}")
    initials = [facet for restriction, facet in pairs if restriction == BOT]
    terminals = [facet for restriction, facet in pairs if restriction == facet]
    if len(initials) != 1:
        raise NotAPartition(f"expected exactly one empty restriction, got {len(initials)}")
    if len(terminals) != 1:
        raise NotAPartition(f"expected exactly one full restriction, got {len(terminals)}")
    classes: dict[str, frozenset[str]] = {}
    for restriction, facet in pairs:
        interval = {y for y in closure(p, [facet]) if p.leq(restriction, y)}
        classes[facet] = frozenset(interval)
    ground = set(p.elements()) - {p.top()}
    total = [m for members in classes.values() for m in members]
    if len(total) != len(set(total)) or set(total) != ground:
        raise NotAPartition("boolean intervals do not partition the poset")
    if not is_eulerian(p):
        return FailureReport(None, "not-eulerian", p.name)
    try:
        return _assemble_s_cert(p, initials[0], terminals[0], classes, budget)
    except _ClassFailure as cf:
        return cf.report()


def product_se_partition(
    cp: SPartitionCert,
    cq: SPartitionCert,
    budget: Budget | int | None = None,
) -> SEPartitionCert:
    """SE-certificate of the product of two rank-3 S-certified posets.

    Classes are the pairwise products of the factor classes; sub-certificates
    are searched per subclass.  Raises RankNotThree on wrong ranks and
    CertificateInvalid when a factor certificate does not verify.
    """
    if isinstance(budget, int) or budget is None:
        budget = Budget(budget or 10**6)
    p, q = cp.poset, cq.poset
    if p.rank_top != 3 or q.rank_top != 3:
        raise RankNotThree(f"ranks {p.rank_top} and {q.rank_top}, both must be 3")
    for cert in (cp, cq):
        violations = verify_s_partition(cert)
        if violations:
            raise CertificateInvalid(violations)
    from .poset import product as poset_product

    prod = poset_product(p, q)
    classes: dict[str, frozenset[str]] = {}
    for s in sorted(cp.classes):
        for t in sorted(cq.classes):
            members = {
                pair_name(x, y)
                for x in cp.classes[s] - {BOT}
                for y in cq.classes[t] - {BOT}
            }
            classes[pair_name(s, t)] = frozenset(members)
    initial = pair_name(cp.initial, cq.initial)
    classes[initial] = classes[initial] | {BOT}
    try:
        return _assemble_se_cert(prod, initial, classes, budget)
    except _ClassFailure as cf:
        raise PosetError(f"product classes failed: {cf.report()}")


# -- reverse partitions ---------------------------------------------------------------


def check_reverse_partition(cert: SPartitionCert) -> tuple[bool, dict[tuple[str, ...], str] | None]:
    """Do the reverse classes (boundary minus Gamma, plus the coatom) partition too?

    When they do, also emit the explicit top-chain assignment: every chain
    avoiding rank d gets the reverse-class owner of its highest element
    appended (the terminal coatom for the empty chain).
    """
    p = cert.poset
    d = p.rank_top - 1
    ground = set(p.elements()) - {p.top()}
    reverse: dict[str, frozenset[str]] = {}
    for sigma in sorted(cert.classes):
        bdry = closure(p, [sigma]) - {sigma}
        if sigma == cert.initial:
            gamma_members = bdry
        elif sigma == cert.terminal:
            gamma_members = set()
        else:
            gamma_members = closure(p, cert.classes[sigma] - {sigma})
        reverse[sigma] = frozenset((bdry - gamma_members) | {sigma})
    owner: dict[str, str] = {}
    for sigma, members in sorted(reverse.items()):
        for m in members:
            if m in owner:
                return False, None
            owner[m] = sigma
    if set(owner) != ground:
        return False, None
    assignment: dict[tuple[str, ...], str] = {(): owner[BOT]}
    proper = [x for x in p.elements() if 0 < p.rank(x) < p.rank_top]

    def chains(prefix: tuple[str, ...], start: int) -> None:
        for i in range(start, len(proper)):
            x = proper[i]
            if p.rank(x) == d:
                continue
            if prefix and not p.less(prefix[-1], x):
                continue
            chain = prefix + (x,)
            assignment[chain] = owner[x]
            chains(chain, i + 1)

    chains((), 0)
    return True, assignment


# -- certificate file format ------------------------------------------------------------


def _members_line(members: frozenset[str], p: GradedPoset) -> str:
    ordered = sorted(members, key=lambda x: (p.rank(x), x))
    return "members " + " ".join(ordered)


def _emit_s_classes(cert: SPartitionCert, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    p = cert.poset
    for sigma in sorted(cert.classes):
        if sigma == cert.initial:
            kind = "initial"
        elif sigma == cert.terminal:
            kind = "terminal"
        else:
            kind = "ordinary"
        lines.append(f"{pad}class {sigma} kind={kind}")
        lines.append(f"{pad}  {_members_line(cert.classes[sigma], p)}")
        sub = None
        if kind == "initial":
            sub = cert.subcert_initial
        elif kind == "ordinary":
            sub = cert.subcerts[sigma]
        if sub is not None:
            lines.append(f"{pad}  sub")
            _emit_s_classes(sub, depth + 2, lines)


def format_certificate(cert: SPartitionCert | SEPartitionCert) -> str:
    lines: list[str] = []
    if isinstance(cert, SPartitionCert):
        lines.append(f"spart {cert.poset.name}")
        _emit_s_classes(cert, 1, lines)
        return "\n".join(lines) + "\n"
    lines.append(f"separt {cert.poset.name}")
    p = cert.poset
    for sigma in sorted(cert.classes):
        if sigma == cert.initial:
            lines.append(f"  class {sigma} kind=initial")
            lines.append(f"    {_members_line(cert.classes[sigma], p)}")
            if cert.subcert_initial is not None:
                lines.append("    sub")
                _emit_s_classes(cert.subcert_initial, 3, lines)
        elif sigma in cert.singletons:
            lines.append(f"  class {sigma} kind=singleton")
            lines.append(f"    members {sigma}")
        else:
            lines.append(f"  class {sigma} kind=ordinary")
            for j, part in enumerate(cert.subclass_decomp[sigma], start=1):
                lines.append(f"    subclass {j}")
                lines.append(f"      {_members_line(part, p)}")
                sub = cert.subcerts[(sigma, j)]
                lines.append("      sub")
                _emit_s_classes(sub, 4, lines)
    return "\n".join(lines) + "\n"


@dataclass
class _Line:
    indent: int
    fields: list[str]
    lineno: int


def _scan_lines(text: str) -> list[_Line]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        body = stripped.lstrip(" ")
        spaces = len(stripped) - len(body)
        if spaces % 2:
            raise CertificateParseError("odd indentation", lineno)
        out.append(_Line(spaces // 2, body.split(), lineno))
    return out


def _parse_block(lines: list[_Line], pos: int, depth: int) -> tuple[list[tuple[_Line, list]], int]:
    """Group lines at the given depth with their nested blocks."""
    out: list[tuple[_Line, list]] = []
    while pos < len(lines) and lines[pos].indent >= depth:
        line = lines[pos]
        if line.indent > depth:
            raise CertificateParseError("unexpected indentation", line.lineno)
        nested, pos = _parse_block(lines, pos + 1, depth + 1)
        out.append((line, nested))
    return out, pos


def _parse_s_classes(blocks: list, poset: GradedPoset, lineno: int) -> SPartitionCert:
    d = poset.rank_top - 1
    if d == 0:
        if blocks:
            raise CertificateParseError("rank-1 certificate must have no classes", blocks[0][0].lineno)
        return _base_cert(poset)
    classes: dict[str, frozenset[str]] = {}
    initial = terminal = None
    subcert_initial = None
    subcerts: dict[str, SPartitionCert] = {}
    for line, nested in blocks:
        if line.fields[0] != "class" or len(line.fields) != 3 or not line.fields[2].startswith("kind="):
            raise CertificateParseError("expected: class <coatom> kind=<kind>", line.lineno)
        sigma = line.fields[1]
        kind = line.fields[2].removeprefix("kind=")
        if kind not in ("initial", "ordinary", "terminal"):
            raise CertificateParseError(f"unknown kind {kind!r}", line.lineno)
        if sigma in classes:
            raise CertificateParseError(f"duplicate class {sigma!r}", line.lineno)
        members: frozenset[str] | None = None
        sub_blocks = None
        for inner, inner_nested in nested:
            if inner.fields[0] == "members":
                members = frozenset(inner.fields[1:])
            elif inner.fields == ["sub"]:
                sub_blocks = inner_nested
            else:
                raise CertificateParseError(f"unexpected {inner.fields[0]!r}", inner.lineno)
        if members is None:
            raise CertificateParseError(f"class {sigma!r} has no members line", line.lineno)
        unknown = [m for m in members if m not in poset]
        if unknown:
            raise CertificateParseError(f"unknown members {unknown}", line.lineno)
        classes[sigma] = members
        if kind == "initial":
            if initial is not None:
                raise CertificateParseError("two initial classes", line.lineno)
            initial = sigma
            try:
                sub_poset = initial_boundary_poset(poset, sigma)
            except PosetError as exc:
                raise CertificateParseError(str(exc), line.lineno)
            subcert_initial = _parse_s_classes(sub_blocks or [], sub_poset, line.lineno)
        elif kind == "terminal":
            if terminal is not None:
                raise CertificateParseError("two terminal classes", line.lineno)
            terminal = sigma
        else:
            try:
                gamma = gamma_poset(poset, sigma, members - {sigma})
                ss, _tau = semisuspension(gamma, tau_name(sigma))
            except PosetError as exc:
                raise CertificateParseError(str(exc), line.lineno)
            subcerts[sigma] = _parse_s_classes(sub_blocks or [], ss, line.lineno)
    if initial is None or terminal is None:
        raise CertificateParseError("certificate needs an initial and a terminal class", lineno)
    return SPartitionCert(poset, classes, initial, terminal, subcert_initial, subcerts)


def parse_certificate(text: str, poset: GradedPoset) -> SPartitionCert | SEPartitionCert:
    """Parse the indentation-nested certificate format against a loaded poset."""
    lines = _scan_lines(text)
    if not lines or lines[0].fields[0] not in ("spart", "separt") or len(lines[0].fields) != 2:
        raise CertificateParseError("expected header: spart|separt <poset-name>", 1)
    header = lines[0]
    if header.fields[1] != poset.name:
        raise CertificateParseError(
            f"certificate is for {header.fields[1]!r}, poset is {poset.name!r}", header.lineno
        )
    blocks, pos = _parse_block(lines, 1, 1)
    if pos != len(lines):
        raise CertificateParseError("trailing content", lines[pos].lineno)
    if header.fields[0] == "spart":
        return _parse_s_classes(blocks, poset, header.lineno)
    return _parse_se_classes(blocks, poset, header.lineno)


def _parse_se_classes(blocks: list, poset: GradedPoset, lineno: int) -> SEPartitionCert:
    d = poset.rank_top - 1
    if d == 0:
        if blocks:
            raise CertificateParseError("rank-1 certificate must have no classes", blocks[0][0].lineno)
        return SEPartitionCert(poset, {}, None, frozenset(), {}, None, {})
    classes: dict[str, frozenset[str]] = {}
    initial = None
    singletons: set[str] = set()
    decomp: dict[str, tuple[frozenset[str], ...]] = {}
    subcert_initial = None
    subcerts: dict[tuple[str, int], SPartitionCert] = {}
    for line, nested in blocks:
        if line.fields[0] != "class" or len(line.fields) != 3 or not line.fields[2].startswith("kind="):
            raise CertificateParseError("expected: class <coatom> kind=<kind>", line.lineno)
        sigma = line.fields[1]
        kind = line.fields[2].removeprefix("kind=")
        if kind not in ("initial", "ordinary", "singleton"):
            raise CertificateParseError(f"unknown kind {kind!r}", line.lineno)
        if sigma in classes:
            raise CertificateParseError(f"duplicate class {sigma!r}", line.lineno)
        if kind == "initial":
            members = None
            sub_blocks = None
            for inner, inner_nested in nested:
                if inner.fields[0] == "members":
                    members = frozenset(inner.fields[1:])
                elif inner.fields == ["sub"]:
                    sub_blocks = inner_nested
                else:
                    raise CertificateParseError(f"unexpected {inner.fields[0]!r}", inner.lineno)
            if members is None:
                raise CertificateParseError("initial class has no members", line.lineno)
            if initial is not None:
                raise CertificateParseError("two initial classes", line.lineno)
            initial = sigma
            classes[sigma] = members
            try:
                sub_poset = initial_boundary_poset(poset, sigma)
            except PosetError as exc:
                raise CertificateParseError(str(exc), line.lineno)
            subcert_initial = _parse_s_classes(sub_blocks or [], sub_poset, line.lineno)
        elif kind == "singleton":
            singletons.add(sigma)
            classes[sigma] = frozenset({sigma})
        else:
            parts: list[frozenset[str]] = []
            for j, (inner, inner_nested) in enumerate(nested, start=1):
                if inner.fields[0] != "subclass":
                    raise CertificateParseError("expected: subclass <j>", inner.lineno)
                members = None
                sub_blocks = None
                for deep, deep_nested in inner_nested:
                    if deep.fields[0] == "members":
                        members = frozenset(deep.fields[1:])
                    elif deep.fields == ["sub"]:
                        sub_blocks = deep_nested
                    else:
                        raise CertificateParseError(f"unexpected {deep.fields[0]!r}", deep.lineno)
                if members is None:
                    raise CertificateParseError("subclass has no members", inner.lineno)
                parts.append(members)
                try:
                    gamma = gamma_poset(poset, sigma, members)
                    ss, _tau = semisuspension(gamma, tau_name(sigma, j))
                except PosetError as exc:
                    raise CertificateParseError(str(exc), inner.lineno)
                subcerts[(sigma, j)] = _parse_s_classes(sub_blocks or [], ss, inner.lineno)
            if not parts:
                raise CertificateParseError(f"ordinary class {sigma!r} has no subclasses", line.lineno)
            decomp[sigma] = tuple(parts)
            classes[sigma] = frozenset({sigma}).union(*parts)
    if initial is None:
        raise CertificateParseError("certificate needs an initial class", lineno)
    return SEPartitionCert(poset, classes, initial, frozenset(singletons), decomp, subcert_initial, subcerts)
