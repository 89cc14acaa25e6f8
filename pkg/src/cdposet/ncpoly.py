"""Exact noncommutative polynomial arithmetic over the integers in two letters.

Two alphabets are supported: ``ab`` (letters ``a``, ``b``, both of degree 1)
and ``cd`` (letter ``c`` of degree 1, letter ``d`` of degree 2).  Words are
plain strings over one alphabet; the empty word is the multiplicative unit of
both alphabets.  Coefficients are arbitrary-precision Python integers, so
nothing ever overflows silently.

The module also houses the two substitution homomorphisms relating the
alphabets (``c -> a+b``, ``d -> ab+ba`` and ``a -> a-b``) and the inverse
extraction ``ab_to_cd``, implemented as an exact integer linear solve by
fraction-free Gaussian elimination over the basis of all cd-words of the
given degree.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

AB = "ab"
CD = "cd"

_LETTER_DEGREE = {"a": 1, "b": 1, "c": 1, "d": 2}
_ALPHABET_OF = {"a": AB, "b": AB, "c": CD, "d": CD}


class AlphabetMismatch(ValueError):
    """Operands live in different alphabets (or a letter is foreign)."""


class InhomogeneousInput(ValueError):
    """An operation required a homogeneous polynomial."""


class NotInImage(ValueError):
    """An ab-polynomial has no cd-expression (inconsistent or non-integral solve)."""


def word_degree(word: str) -> int:
    """Degree of a word: a, b, c count 1 and d counts 2."""
    return sum(_LETTER_DEGREE[x] for x in word)


def canonical_key(word: str) -> tuple[int, str]:
    """Sort key realizing graded-then-lexicographic order with a<b, c<d."""
    return (word_degree(word), word)


def _check_word(word: str, alphabet: str) -> None:
    for x in word:
        if _ALPHABET_OF.get(x) != alphabet:
            raise AlphabetMismatch(f"letter {x!r} is not in alphabet {alphabet!r}")


class NcPolynomial:
    """Immutable noncommutative polynomial with exact integer coefficients.

    ``terms`` maps words to nonzero coefficients; zero terms are dropped on
    construction.  All operations return fresh values, safe for concurrent use.
    """

    __slots__ = ("alphabet", "_terms")

    def __init__(self, alphabet: str, terms: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        if alphabet not in (AB, CD):
            raise AlphabetMismatch(f"unknown alphabet {alphabet!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[str, int] = {}
        for word, coeff in items:
            _check_word(word, alphabet)
            if coeff:
                clean[word] = clean.get(word, 0) + coeff
                if not clean[word]:
                    del clean[word]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("NcPolynomial is immutable")

    @classmethod
    def zero(cls, alphabet: str) -> "NcPolynomial":
        return cls(alphabet)

    @classmethod
    def unit(cls, alphabet: str) -> "NcPolynomial":
        return cls(alphabet, {"": 1})

    @classmethod
    def from_word(cls, word: str, coeff: int = 1) -> "NcPolynomial":
        """Build coeff*word; the alphabet is inferred (unit words default to cd)."""
        if not word:
            return cls(CD, {"": coeff})
        return cls(_ALPHABET_OF[word[0]], {word: coeff})

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, word: str) -> int:
        return self._terms.get(word, 0)

    def words(self) -> list[str]:
        return sorted(self._terms, key=canonical_key)

    def items(self) -> list[tuple[str, int]]:
        """Terms in canonical word order."""
        return [(w, self._terms[w]) for w in self.words()]

    def to_dict(self) -> dict[str, int]:
        return dict(self._terms)

    def degrees(self) -> set[int]:
        return {word_degree(w) for w in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Common degree of all terms (None for the zero polynomial)."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise InhomogeneousInput(f"mixed degrees {sorted(degs)}")
        return degs.pop()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "NcPolynomial") -> "NcPolynomial":
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"{self.alphabet} + {other.alphabet}")
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0) + c
        return NcPolynomial(self.alphabet, terms)

    def __neg__(self) -> "NcPolynomial":
        return NcPolynomial(self.alphabet, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "NcPolynomial") -> "NcPolynomial":
        return self + (-other)

    def __rmul__(self, scalar: int) -> "NcPolynomial":
        if not isinstance(scalar, int):
            return NotImplemented
        return NcPolynomial(self.alphabet, {w: scalar * c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"{self.alphabet} * {other.alphabet}")
        terms: dict[str, int] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                terms[w] = terms.get(w, 0) + c1 * c2
        return NcPolynomial(self.alphabet, terms)

    def times_letter(self, letter: str) -> "NcPolynomial":
        """Right-multiply every word by a single letter."""
        _check_word(letter, self.alphabet)
        if len(letter) != 1:
            raise ValueError("expected a single letter")
        return NcPolynomial(self.alphabet, {w + letter: c for w, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NcPolynomial)
            and self.alphabet == other.alphabet
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, frozenset(self._terms.items())))

    # -- text form ------------------------------------------------------------

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"NcPolynomial({self.alphabet!r}, {self!s})"


def _compress_word(word: str) -> str:
    """Exponent-compress maximal runs of a repeated letter (c^3 for ccc)."""
    if not word:
        return "1"
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        out.append(word[i] if run == 1 else f"{word[i]}^{run}")
        i = j
    return "".join(out)


def format_polynomial(p: NcPolynomial) -> str:
    """Canonical text form: terms in graded-lex order joined by ' + '/' - '."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for word, coeff in p.items():
        mag = abs(coeff)
        body = _compress_word(word)
        if word and mag == 1:
            text = body
        elif not word:
            text = str(mag)
        else:
            text = f"{mag}{body}"
        if not parts:
            parts.append(text if coeff > 0 else f"-{text}")
        else:
            parts.append(f"{' + ' if coeff > 0 else ' - '}{text}")
    return "".join(parts)


# -- named operation aliases ---------------------------------------------------


def add(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    return p + q


def multiply_right_letter(p: NcPolynomial, letter: str) -> NcPolynomial:
    return p.times_letter(letter)


# -- word enumeration ----------------------------------------------------------


def ab_words(degree: int) -> list[str]:
    """All 2^degree ab-words of the given degree, in lexicographic order."""
    return ["".join(w) for w in product("ab", repeat=degree)]


def cd_words(degree: int) -> list[str]:
    """All cd-words of the given degree, in lexicographic order.

    The count is the Fibonacci number F(degree+1) with F1 = F2 = 1.
    """
    if degree < 0:
        return []
    if degree == 0:
        return [""]
    if degree == 1:
        return ["c"]
    return ["c" + w for w in cd_words(degree - 1)] + ["d" + w for w in cd_words(degree - 2)]


# -- substitution homomorphisms -----------------------------------------------

_CD_IMAGE = {
    "c": NcPolynomial(AB, {"a": 1, "b": 1}),
    "d": NcPolynomial(AB, {"ab": 1, "ba": 1}),
}


def expand_cd_word(word: str) -> NcPolynomial:
    """Image of a single cd-word under c -> a+b, d -> ab+ba."""
    out = NcPolynomial.unit(AB)
    for x in word:
        out = out * _CD_IMAGE[x]
    return out


def expand_cd_to_ab(p: NcPolynomial) -> NcPolynomial:
    """Apply the graded substitution c -> a+b, d -> ab+ba multiplicatively."""
    if p.alphabet != CD:
        raise AlphabetMismatch("expand_cd_to_ab expects a cd-polynomial")
    out = NcPolynomial.zero(AB)
    for word, coeff in p.items():
        out = out + coeff * expand_cd_word(word)
    return out


def _substitute_a(p: NcPolynomial, image_of_a: NcPolynomial) -> NcPolynomial:
    if p.alphabet != AB:
        raise AlphabetMismatch("substitution expects an ab-polynomial")
    b = NcPolynomial(AB, {"b": 1})
    out = NcPolynomial.zero(AB)
    for word, coeff in p.items():
        term = NcPolynomial(AB, {"": coeff})
        for x in word:
            term = term * (image_of_a if x == "a" else b)
        out = out + term
    return out


def substitute_a_minus_b(p: NcPolynomial) -> NcPolynomial:
    """Replace a -> a-b (b fixed), expand and collect.

    Sends the chain polynomial of a poset to its ab-polynomial.
    """
    return _substitute_a(p, NcPolynomial(AB, {"a": 1, "b": -1}))


def substitute_a_plus_b(p: NcPolynomial) -> NcPolynomial:
    """Inverse substitution a -> a+b; exact inverse of substitute_a_minus_b."""
    return _substitute_a(p, NcPolynomial(AB, {"a": 1, "b": 1}))


# -- cd extraction by exact linear solve ---------------------------------------


def _bareiss_solve(rows: list[list[int]], ncols: int) -> list[Fraction]:
    """Solve the augmented integer system (last column is the rhs).

    Fraction-free (Bareiss) forward elimination followed by exact rational
    back-substitution.  Raises NotInImage on inconsistency or rank deficiency.
    """
    nrows = len(rows)
    prev = 1
    pivot_rows: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][col]), None)
        if pivot is None:
            raise NotInImage(f"rank-deficient system at column {col}")
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pr = rows[r]
        pc = pr[col]
        for i in range(r + 1, nrows):
            ri = rows[i]
            f = ri[col]
            if f:
                for j in range(col, ncols + 1):
                    ri[j] = (ri[j] * pc - f * pr[j]) // prev
            elif prev != 1:
                for j in range(col, ncols + 1):
                    ri[j] = (ri[j] * pc) // prev
        prev = pc
        pivot_rows.append(r)
        r += 1
    for i in range(r, nrows):
        if rows[i][ncols]:
            raise NotInImage(f"inconsistent system, residual {rows[i][ncols]}")
    sol = [Fraction(0)] * ncols
    for col in reversed(range(ncols)):
        row = rows[pivot_rows[col]]
        acc = Fraction(row[ncols])
        for j in range(col + 1, ncols):
            acc -= row[j] * sol[j]
        sol[col] = acc / row[col]
    return sol


def ab_to_cd(p: NcPolynomial) -> NcPolynomial:
    """Invert the cd expansion on its image.

    Enumerates all cd-words of the input's degree, builds the exact integer
    matrix of their ab-expansions and solves by fraction-free elimination.
    Raises NotInImage when no integral solution exists and InhomogeneousInput
    when the input mixes degrees; the round trip expand(ab_to_cd(p)) == p is
    verified before returning.
    """
    if p.alphabet != AB:
        raise AlphabetMismatch("ab_to_cd expects an ab-polynomial")
    if p.is_zero():
        return NcPolynomial.zero(CD)
    degree = p.degree()
    basis = cd_words(degree)
    columns = ab_words(degree)
    col_index = {w: i for i, w in enumerate(columns)}
    # equations indexed by ab-words: sum_w expansion[w][u] * x[w] = p[u]
    nvars = len(basis)
    rows = [[0] * (nvars + 1) for _ in columns]
    for k, word in enumerate(basis):
        for u, c in expand_cd_word(word).items():
            rows[col_index[u]][k] = c
    for u, c in p.items():
        rows[col_index[u]][nvars] = c
    sol = _bareiss_solve(rows, nvars)
    coeffs: dict[str, int] = {}
    for word, value in zip(basis, sol):
        if value.denominator != 1:
            raise NotInImage(f"non-integer coefficient {value} at word {word!r}")
        if value:
            coeffs[word] = int(value)
    result = NcPolynomial(CD, coeffs)
    if expand_cd_to_ab(result) != p:
        raise NotInImage("round-trip verification failed")
    return result
