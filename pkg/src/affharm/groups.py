"""Finitely generated group models with explicit normal forms, plus finitely
supported probability measures on them.

Words are tuples of nonzero signed integers: letter ``+i`` is the ``i``-th
generator (1-based), ``-i`` its inverse.  Each group kind fixes its own
element representation:

* free groups: freely reduced words,
* free abelian groups: exponent vectors,
* Cayley-table groups: element indices,
* relator-presented groups: freely reduced words, with equality testing
  disabled (the word problem is not decidable in general),
* wreath groups: see :mod:`affharm.wreath`.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidGroupSpec,
    NotAdapted,
    NotNormalized,
    NotSymmetric,
    ParseError,
    UnsupportedGroupKind,
)

Word = tuple  # tuple[int, ...]

_DEFAULT_FREE_NAMES = "abcdefghijklmnopqrstuvwxyz"


def inverse_word(word: Word) -> Word:
    return tuple(-letter for letter in reversed(word))


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class GroupModel:
    """Base class: generator bookkeeping and word plumbing shared by all kinds."""

    kind = "abstract"
    supports_enumeration = True
    supports_equality = True

    def __init__(self, generators: Sequence[str], relators: Iterable = ()):
        generators = list(generators)
        if not generators:
            raise InvalidGroupSpec("at least one generator is required")
        if len(set(generators)) != len(generators):
            raise InvalidGroupSpec("duplicate generator names")
        self.generators = generators
        self._index = {name: i + 1 for i, name in enumerate(generators)}
        self.relators = [self.parse_word(r) for r in relators]
        self.catalogue: tuple | None = None

    # -- word plumbing ------------------------------------------------------

    def generator_letter(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InvalidGroupSpec(f"unknown generator {name!r}") from None

    def letter_name(self, letter: int) -> str:
        return self.generators[abs(letter) - 1]

    def letters(self) -> list[int]:
        """All signed generator letters (positive then negative)."""
        k = len(self.generators)
        return list(range(1, k + 1)) + [-i for i in range(1, k + 1)]

    def parse_word(self, tokens) -> Word:
        """Accept a token sequence like ["a", "b^-1", "a^3"] or a signed-int word."""
        if isinstance(tokens, str):
            tokens = [tokens]
        word: list[int] = []
        for tok in tokens:
            if isinstance(tok, (int, np.integer)):
                letter = int(tok)
                if letter == 0 or abs(letter) > len(self.generators):
                    raise InvalidGroupSpec(f"letter {tok} out of range")
                word.append(letter)
                continue
            if not isinstance(tok, str):
                raise InvalidGroupSpec(f"bad word token {tok!r}")
            name, power = tok, 1
            if "^" in tok:
                name, raw = tok.split("^", 1)
                try:
                    power = int(raw)
                except ValueError:
                    raise InvalidGroupSpec(f"bad exponent in token {tok!r}") from None
            letter = self.generator_letter(name)
            word.extend([letter if power > 0 else -letter] * abs(power))
        return tuple(word)

    def format_word(self, word: Word) -> str:
        if not word:
            return "e"
        parts = []
        for letter in word:
            name = self.letter_name(letter)
            parts.append(name if letter > 0 else name + "^-1")
        return "*".join(parts)

    # -- group interface ----------------------------------------------------

    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def normal_form(self, word: Word):
        """Map a word to the element it represents."""
        raise NotImplementedError

    def element_to_word(self, g) -> Word:
        """A canonical word representing ``g``."""
        raise NotImplementedError

    def sort_key(self, g):
        return g

    def equal(self, g, h) -> bool:
        if not self.supports_equality:
            raise UnsupportedGroupKind(
                f"equality testing is disabled for kind {self.kind!r}")
        return g == h

    def word_length(self, g) -> int:
        raise NotImplementedError

    def ball(self, radius: int):
        """All elements of word length <= radius, deduplicated by normal form."""
        raise NotImplementedError

    def coerce_element(self, item):
        """Interpret measure-support input (a word) as an element."""
        return self.normal_form(self.parse_word(item))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(generators={self.generators!r})"


class FreeGroup(GroupModel):
    kind = "free"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        if rank < 1:
            raise InvalidGroupSpec("free rank must be >= 1")
        if names is None:
            if rank > len(_DEFAULT_FREE_NAMES):
                names = [f"x{i}" for i in range(1, rank + 1)]
            else:
                names = list(_DEFAULT_FREE_NAMES[:rank])
        if len(names) != rank:
            raise InvalidGroupSpec("name count does not match rank")
        super().__init__(names, relators=())
        self.catalogue = ("free", rank)

    def identity(self):
        return ()

    def multiply(self, g, h):
        return free_reduce(tuple(g) + tuple(h))

    def inverse(self, g):
        return inverse_word(g)

    def normal_form(self, word: Word):
        return free_reduce(word)

    def element_to_word(self, g) -> Word:
        return tuple(g)

    def sort_key(self, g):
        return (len(g), g)

    def word_length(self, g) -> int:
        return len(g)

    def ball(self, radius: int):
        out = [()]
        frontier = [()]
        for _ in range(radius):
            new = []
            for w in frontier:
                for letter in self.letters():
                    if w and w[-1] == -letter:
                        continue
                    new.append(w + (letter,))
            out.extend(new)
            frontier = new
        return out


class FreeAbelianGroup(GroupModel):
    kind = "free_abelian"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        if rank < 1:
            raise InvalidGroupSpec("free abelian rank must be >= 1")
        if names is None:
            names = [f"t{i}" for i in range(1, rank + 1)]
        if len(names) != rank:
            raise InvalidGroupSpec("name count does not match rank")
        relators = []
        for i in range(1, rank + 1):
            for j in range(i + 1, rank + 1):
                relators.append((i, j, -i, -j))
        super().__init__(names, relators=relators)
        self.rank = rank
        self.catalogue = ("free_abelian", rank)

    def identity(self):
        return (0,) * self.rank

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def normal_form(self, word: Word):
        exps = [0] * self.rank
        for letter in word:
            exps[abs(letter) - 1] += 1 if letter > 0 else -1
        return tuple(exps)

    def element_to_word(self, g) -> Word:
        word: list[int] = []
        for i, e in enumerate(g, start=1):
            word.extend([i if e > 0 else -i] * abs(e))
        return tuple(word)

    def word_length(self, g) -> int:
        return int(sum(abs(e) for e in g))

    def ball(self, radius: int):
        def rec(k: int, budget: int):
            if k == 0:
                yield ()
                return
            for e in range(-budget, budget + 1):
                for rest in rec(k - 1, budget - abs(e)):
                    yield (e,) + rest

        return sorted(rec(self.rank, radius), key=self.sort_key)

    def sort_key(self, g):
        return (self.word_length(g), g)


class TableGroup(GroupModel):
    """A finite group given by a full multiplication table.

    Elements are indices ``0 .. n-1``.  Associativity, identity, and inverses
    are checked exhaustively at construction.  If no relator list is supplied,
    a presentation is synthesized from the breadth-first spanning tree of the
    Cayley graph (the tree words form a prefix-closed transversal, so the
    words ``w_g s w_{gs}^-1`` present the group on the chosen generators).
    """

    kind = "cayley_table"

    def __init__(self, table, generator_names: Sequence[str],
                 generator_elements: Sequence[int], relators=None,
                 element_names: Sequence[str] | None = None):
        table = np.asarray(table, dtype=int)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise InvalidGroupSpec("multiplication table must be square")
        n = table.shape[0]
        if n == 0:
            raise InvalidGroupSpec("empty multiplication table")
        if table.min() < 0 or table.max() >= n:
            raise InvalidGroupSpec("table entries out of range")
        self.order = n
        self.table = table

        ident = None
        rng_n = np.arange(n)
        for e in range(n):
            if np.array_equal(table[e], rng_n) and np.array_equal(table[:, e], rng_n):
                ident = e
                break
        if ident is None:
            raise InvalidGroupSpec("table has no two-sided identity")
        self._identity = ident

        for a in range(n):
            for b in range(n):
                tab_ab = table[a, b]
                for c in range(n):
                    if table[tab_ab, c] != table[a, table[b, c]]:
                        raise InvalidGroupSpec(
                            f"table is not associative at ({a},{b},{c})")

        inv = np.full(n, -1, dtype=int)
        for a in range(n):
            hits = np.where(table[a] == ident)[0]
            if hits.size != 1 or table[hits[0], a] != ident:
                raise InvalidGroupSpec(f"element {a} has no two-sided inverse")
            inv[a] = hits[0]
        self._inv = inv

        generator_elements = [int(g) for g in generator_elements]
        if len(generator_elements) != len(generator_names):
            raise InvalidGroupSpec("generator names and elements differ in count")
        for g in generator_elements:
            if not 0 <= g < n:
                raise InvalidGroupSpec(f"generator element {g} out of range")
        self.generator_elements = generator_elements

        super().__init__(generator_names, relators=relators or [])
        self.element_names = list(element_names) if element_names else None

        self._dist, self._words = self._bfs_tree()
        if any(d < 0 for d in self._dist):
            raise InvalidGroupSpec("generators do not generate the group")

        for r in self.relators:
            if self.normal_form(r) != ident:
                raise InvalidGroupSpec(
                    f"relator {self.format_word(r)} does not hold in the table")
        if not self.relators:
            self.relators = self._schreier_relators()

    def _bfs_tree(self):
        dist = [-1] * self.order
        words: list[Word] = [()] * self.order
        dist[self._identity] = 0
        frontier = [self._identity]
        letter_elems = [(letter, self._letter_element(letter)) for letter in self.letters()]
        while frontier:
            new = []
            for g in frontier:
                for letter, s in letter_elems:
                    h = int(self.table[g, s])
                    if dist[h] < 0:
                        dist[h] = dist[g] + 1
                        words[h] = words[g] + (letter,)
                        new.append(h)
            frontier = new
        return dist, words

    def _letter_element(self, letter: int) -> int:
        g = self.generator_elements[abs(letter) - 1]
        return g if letter > 0 else int(self._inv[g])

    def _schreier_relators(self) -> list[Word]:
        relators = []
        for g in range(self.order):
            for i, s in enumerate(self.generator_elements, start=1):
                h = int(self.table[g, s])
                rel = free_reduce(self._words[g] + (i,) + inverse_word(self._words[h]))
                if rel:
                    relators.append(rel)
        return relators

    def identity(self):
        return self._identity

    def multiply(self, g, h):
        return int(self.table[g, h])

    def inverse(self, g):
        return int(self._inv[g])

    def normal_form(self, word: Word):
        g = self._identity
        for letter in word:
            g = int(self.table[g, self._letter_element(letter)])
        return g

    def element_to_word(self, g) -> Word:
        return self._words[g]

    def word_length(self, g) -> int:
        return self._dist[g]

    def ball(self, radius: int):
        return sorted((g for g in range(self.order) if self._dist[g] <= radius),
                      key=self.sort_key)

    def elements(self):
        return range(self.order)

    def sort_key(self, g):
        return (self._dist[g], g)

    def coerce_element(self, item):
        if isinstance(item, (int, np.integer)) and not isinstance(item, bool):
            g = int(item)
            if not 0 <= g < self.order:
                raise InvalidGroupSpec(f"element index {g} out of range")
            return g
        return super().coerce_element(item)


class PresentedGroup(GroupModel):
    """Relator-presented input: accepted for cocycle constraints only.

    Elements are freely reduced words; there is no normal form, so equality
    testing, word length, and ball enumeration are unavailable.
    """

    kind = "finitely_presented"
    supports_enumeration = False
    supports_equality = False

    def __init__(self, generators: Sequence[str], relators: Iterable):
        super().__init__(generators, relators=relators)

    def identity(self):
        return ()

    def multiply(self, g, h):
        return free_reduce(tuple(g) + tuple(h))

    def inverse(self, g):
        return inverse_word(g)

    def normal_form(self, word: Word):
        return free_reduce(word)

    def element_to_word(self, g) -> Word:
        return tuple(g)

    def word_length(self, g) -> int:
        raise UnsupportedGroupKind(
            "word length needs a solvable word problem; not available for "
            "relator-presented input")

    def ball(self, radius: int):
        raise UnsupportedGroupKind(
            "ball enumeration is not available for relator-presented input")


# -- catalogue constructors --------------------------------------------------

def free(rank: int, names: Sequence[str] | None = None) -> FreeGroup:
    return FreeGroup(rank, names=names)


def free_abelian(rank: int, names: Sequence[str] | None = None) -> FreeAbelianGroup:
    return FreeAbelianGroup(rank, names=names)


def cyclic(n: int, gen_name: str = "t") -> TableGroup:
    if n < 1:
        raise InvalidGroupSpec("cyclic order must be >= 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    G = TableGroup(table, [gen_name], [1 % n], relators=[(1,) * n])
    G.catalogue = ("cyclic", n)
    return G


def dihedral(n: int) -> TableGroup:
    """Dihedral group of order 2n: rotation r of order n and a reflection s."""
    if n < 2:
        raise InvalidGroupSpec("dihedral parameter must be >= 2")

    def idx(a: int, b: int) -> int:
        return a % n + n * (b % 2)

    table = [[0] * (2 * n) for _ in range(2 * n)]
    for a in range(n):
        for b in range(2):
            for c in range(n):
                for d in range(2):
                    prod = idx(a + (c if b == 0 else -c), b + d)
                    table[idx(a, b)][idx(c, d)] = prod
    relators = [(1,) * n, (2, 2), (1, 2, 1, 2)]
    G = TableGroup(table, ["r", "s"], [idx(1, 0), idx(0, 1)], relators=relators)
    G.catalogue = ("dihedral", n)
    return G


def symmetric(n: int) -> TableGroup:
    """Symmetric group; only n = 3 is in the catalogue (as the 3-cycle r and
    a transposition s, which is the dihedral group of order 6)."""
    if n != 3:
        raise InvalidGroupSpec(
            "only symmetric(3) is in the catalogue; supply a Cayley table for "
            "other symmetric groups")
    G = dihedral(3)
    G.catalogue = ("symmetric", 3)
    return G


def quaternion() -> TableGroup:
    """The quaternion group of order 8 on generators i, j."""
    # elements: index 2*axis + sign_bit with axes (1, i, j, k)
    axis_mul = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    table = [[0] * 8 for _ in range(8)]
    for a in range(4):
        for sa in (1, -1):
            for b in range(4):
                for sb in (1, -1):
                    axis, sign = axis_mul[(a, b)]
                    sign *= sa * sb
                    table[2 * a + (sa < 0)][2 * b + (sb < 0)] = 2 * axis + (sign < 0)
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    relators = [(1, 1, 1, 1), (1, 1, -2, -2), (-2, 1, 2, 1)]
    G = TableGroup(table, ["i", "j"], [2, 4], relators=relators,
                   element_names=names)
    G.catalogue = ("quaternion", 8)
    return G


def from_cayley_table(table, generator_names: Sequence[str],
                      generator_elements: Sequence[int], relators=None,
                      element_names=None) -> TableGroup:
    return TableGroup(table, generator_names, generator_elements,
                      relators=relators, element_names=element_names)


def presented(generators: Sequence[str], relators: Iterable) -> PresentedGroup:
    return PresentedGroup(generators, relators)


def make_group(spec: dict) -> GroupModel:
    """Build a group from a CLI-style description dictionary."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParseError("group spec must be a dict with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "free":
            return free(int(spec["rank"]), names=spec.get("generators"))
        if kind == "free_abelian":
            return free_abelian(int(spec["rank"]), names=spec.get("generators"))
        if kind == "cyclic":
            return cyclic(int(spec["n"]), gen_name=spec.get("generator", "t"))
        if kind == "dihedral":
            return dihedral(int(spec["n"]))
        if kind == "symmetric":
            return symmetric(int(spec["n"]))
        if kind == "quaternion":
            return quaternion()
        if kind == "cayley_table":
            return from_cayley_table(
                spec["table"], spec["generators"], spec["generator_elements"],
                relators=spec.get("relators"), element_names=spec.get("element_names"))
        if kind == "finitely_presented":
            return presented(spec["generators"], spec.get("relators", []))
        if kind == "wreath":
            from .wreath import WreathGroup
            return WreathGroup(make_group(spec["base_group"]),
                               t_name=spec.get("t_name"))
    except KeyError as exc:
        raise ParseError(f"group spec for kind {kind!r} misses field {exc}") from None
    raise ParseError(f"unknown group kind {kind!r}")


# -- measures ----------------------------------------------------------------

class FinMeasure:
    """A finitely supported symmetric adapted probability measure.

    The support is stored as a list of (element, weight) pairs in a fixed
    order; ``second_moment`` is the weighted sum of squared word lengths.
    """

    def __init__(self, group: GroupModel, support, second_moment: float,
                 length_exact: bool = True):
        self.group = group
        self.support = list(support)
        self.second_moment = float(second_moment)
        self.length_exact = length_exact

    def __len__(self) -> int:
        return len(self.support)

    def items(self):
        return list(self.support)

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.support])

    def __repr__(self) -> str:
        return f"FinMeasure(|supp|={len(self.support)}, m2={self.second_moment:.4g})"


def make_measure(group: GroupModel, entries, *, tol: float = 1e-12,
                 adapted_depth: int = 8, closure_cap: int = 20000) -> FinMeasure:
    """Validate (symmetry, normalization, adaptedness) and build a measure.

    ``entries`` is an iterable of (word, weight) pairs; words may be token
    lists, signed-letter tuples, or (for table and wreath groups) elements.
    Duplicate support points are merged after normal-form reduction.

    Adaptedness is certified by a breadth-first closure of the support: every
    declared generator must appear among products of at most ``adapted_depth``
    support elements.  The certificate is one-sided; a measure that generates
    only via longer products is reported as NotAdapted.
    """
    merged: dict = {}
    order: list = []
    for item, weight in entries:
        weight = float(weight)
        if weight <= 0:
            raise NotNormalized("measure weights must be positive")
        g = group.coerce_element(item)
        if g in merged:
            merged[g] += weight
        else:
            merged[g] = weight
            order.append(g)
    if not order:
        raise NotNormalized("measure support is empty")

    total = sum(merged.values())
    if abs(total - 1.0) > tol:
        raise NotNormalized(f"weights sum to {total!r}, not 1 within {tol}")

    for g in order:
        inv = group.inverse(g)
        w_inv = merged.get(inv)
        if w_inv is None or abs(w_inv - merged[g]) > tol:
            raise NotSymmetric(
                f"weight of {group.format_word(group.element_to_word(g))} and its "
                "inverse differ")

    _certify_adapted(group, order, adapted_depth, closure_cap)

    length_exact = group.supports_enumeration
    m2 = 0.0
    for g in order:
        if length_exact:
            length = group.word_length(g)
        else:
            length = len(group.element_to_word(g))
        m2 += merged[g] * length * length

    support = [(g, merged[g]) for g in order]
    return FinMeasure(group, support, m2, length_exact=length_exact)


def _certify_adapted(group: GroupModel, elements, depth: int, cap: int) -> None:
    if not group.supports_equality:
        # No word problem: require each generator (or its inverse) verbatim.
        seen = {free_reduce(group.element_to_word(g)) for g in elements}
        for i in range(1, len(group.generators) + 1):
            if (i,) not in seen and (-i,) not in seen:
                raise NotAdapted(
                    f"cannot certify adaptedness for kind {group.kind!r}: generator "
                    f"{group.generators[i - 1]!r} is not in the support")
        return

    targets = {group.normal_form((i,)) for i in range(1, len(group.generators) + 1)}
    reached = {group.identity()}
    reached.update(elements)
    frontier = set(reached)
    for _ in range(depth):
        if targets <= reached:
            return
        new = set()
        for a in frontier:
            for b in elements:
                c = group.multiply(a, b)
                if c not in reached:
                    new.add(c)
        if not new:
            break
        reached |= new
        frontier = new
        if len(reached) > cap:
            break
    if not targets <= reached:
        missing = [group.generators[i - 1]
                   for i in range(1, len(group.generators) + 1)
                   if group.normal_form((i,)) not in reached]
        raise NotAdapted(
            f"support closure (depth {depth}) does not reach generators {missing}")


def uniform_generator_measure(group: GroupModel) -> FinMeasure:
    """Uniform measure on the generators and their inverses.

    Letters that coincide as group elements (involutions, duplicate images in
    a table group) have their weights merged, so e.g. on the order-2 cyclic
    group this is the point mass at the involution.
    """
    k = len(group.generators)
    entries = []
    for i in range(1, k + 1):
        entries.append(((i,), 1.0 / (2 * k)))
        entries.append(((-i,), 1.0 / (2 * k)))
    return make_measure(group, entries)


# -- word sampling helpers ----------------------------------------------------

def random_word(group: GroupModel, rng: np.random.Generator, max_len: int = 6) -> Word:
    length = int(rng.integers(0, max_len + 1))
    letters = group.letters()
    return tuple(letters[int(i)] for i in rng.integers(0, len(letters), size=length))


def random_element(group: GroupModel, rng: np.random.Generator, max_len: int = 6):
    return group.normal_form(random_word(group, rng, max_len))


def equal_normal_form_pair(group: GroupModel, rng: np.random.Generator,
                           max_len: int = 6, pads: int = 3):
    """Two distinct-looking words with the same normal form, plus the element.

    The second word starts from the canonical word and gets random cancelling
    pairs (and, when relators exist, random cyclic rotations of relators)
    spliced in; every insertion fixes the represented element.
    """
    w1 = random_word(group, rng, max_len)
    g = group.normal_form(w1)
    w2 = list(group.element_to_word(g))
    for _ in range(int(rng.integers(1, pads + 1))):
        pos = int(rng.integers(0, len(w2) + 1))
        if group.relators and rng.random() < 0.5:
            rel = list(group.relators[int(rng.integers(0, len(group.relators)))])
            shift = int(rng.integers(0, len(rel)))
            rel = rel[shift:] + rel[:shift]  # cyclic rotation: a conjugate relator
            if rng.random() < 0.5:
                rel = list(inverse_word(tuple(rel)))
            w2[pos:pos] = rel
        else:
            letter = group.letters()[int(rng.integers(0, 2 * len(group.generators)))]
            w2[pos:pos] = [letter, -letter]
    return w1, tuple(w2), g
