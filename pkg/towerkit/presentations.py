"""Fundamental groups of finite 2-complexes.

Responsibilities
----------------
- Spanning-tree presentations and translation of edge loops into words.
- Todd-Coxeter coset enumeration (sympy's HLT implementation).
- A word-problem oracle chaining free reduction, coset enumeration and a
  bounded relator-insertion search. Only the first two may answer
  "nontrivial"; the search only ever proves triviality.
- Simple-connectivity and collapsibility certificates.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, Union

from sympy.combinatorics.fp_groups import FpGroup, coset_enumeration_r
from sympy.combinatorics.free_groups import free_group

from .complexes import Complex2, collapse_faces
from .models import Answer, InputError, UndecidedError, WordAnswer

logger = logging.getLogger(__name__)

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]

# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


def inverse(word: Sequence[Letter]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Sequence[Letter]) -> Word:
    stack: List[Letter] = []
    for letter in word:
        if stack and stack[-1] == (letter[0], -letter[1]):
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def cyclic_reduce(word: Sequence[Letter]) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == (w[-1][0], -w[-1][1]):
        w = w[1:-1]
    return tuple(w)


def format_word(word: Sequence[Letter]) -> str:
    if not word:
        return "1"
    return " ".join(g if e > 0 else f"{g}^-1" for g, e in word)


def parse_word(text: str) -> Word:
    """Inverse of :func:`format_word`."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    letters: List[Letter] = []
    for token in text.split():
        if token.endswith("^-1"):
            letters.append((token[:-3], -1))
        else:
            letters.append((token, 1))
    return tuple(letters)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    complex: Complex2 = field(repr=False)
    basepoint: str
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]
    relator_faces: Tuple[str, ...]
    tree: FrozenSet[str]
    parent: Mapping[str, str] = field(repr=False)

    def letter(self, dart: str) -> Optional[Letter]:
        edge = self.complex.edge_of(dart)
        if edge in self.tree:
            return None
        return (edge, 1 if dart == edge else -1)

    def letters(self, darts: Sequence[str]) -> Word:
        return tuple(x for x in (self.letter(d) for d in darts) if x is not None)

    def tree_path(self, vertex: str) -> List[str]:
        """Tree darts from the basepoint to ``vertex``."""
        path: List[str] = []
        while vertex != self.basepoint:
            d = self.parent[vertex]
            path.append(d)
            vertex = self.complex.src[d]
        return list(reversed(path))

    def dart_loop(self, dart: str) -> List[str]:
        c = self.complex
        back = [c.rev[d] for d in reversed(self.tree_path(c.dst[dart]))]
        return self.tree_path(c.src[dart]) + [dart] + back

    def word_loop(self, word: Sequence[Letter]) -> List[str]:
        """A closed dart path at the basepoint reading ``word``."""
        path: List[str] = []
        for gen, exp in word:
            path.extend(self.dart_loop(gen if exp > 0 else self.complex.rev[gen]))
        return path

    def to_dict(self) -> Dict[str, object]:
        return {
            "basepoint": self.basepoint,
            "generators": list(self.generators),
            "relators": [format_word(r) for r in self.relators],
            "tree": sorted(self.tree),
        }


def presentation(c: Complex2, base: Optional[str] = None) -> Presentation:
    """Presentation from a BFS spanning tree that scans darts in sorted order."""
    if not c.vertices:
        raise InputError("complex has no vertices")
    base = c.vertices[0] if base is None else base
    if base not in set(c.vertices):
        raise InputError(f"unknown vertex id: {base}")
    parent: Dict[str, str] = {}
    seen = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for d in c.out_darts(u):
            w = c.dst[d]
            if w not in seen:
                seen.add(w)
                parent[w] = d
                queue.append(w)
    if len(seen) != len(c.vertices):
        raise InputError("complex is disconnected")
    tree = frozenset(c.edge_of(d) for d in parent.values())
    generators = tuple(e for e in c.edges if e not in tree)
    p = Presentation(c, base, generators, (), (), tree, parent)
    relators = tuple(free_reduce(p.letters(c.faces[f])) for f in c.face_ids)
    return Presentation(c, base, generators, relators, c.face_ids, tree, parent)


def loop_word(p: Presentation, path: Sequence[str]) -> Word:
    c = p.complex
    if not path:
        return ()
    for d in path:
        if d not in c.src:
            raise InputError(f"unknown dart id: {d}")
    if c.src[path[0]] != p.basepoint or c.dst[path[-1]] != p.basepoint:
        raise InputError("path is not a loop at the basepoint")
    for first, second in zip(path, path[1:]):
        if c.dst[first] != c.src[second]:
            raise InputError(f"path is not contiguous between {first} and {second}")
    return free_reduce(p.letters(path))


# ---------------------------------------------------------------------------
# Coset enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetTable:
    """Closed coset table; column ``2i`` is generator ``i``, ``2i+1`` its inverse."""

    generators: Tuple[str, ...]
    rows: Tuple[Tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    def act(self, coset: int, letter: Letter) -> int:
        column = 2 * self.generators.index(letter[0]) + (0 if letter[1] > 0 else 1)
        return self.rows[coset][column]

    def trace(self, coset: int, word: Sequence[Letter]) -> int:
        for letter in word:
            coset = self.act(coset, letter)
        return coset

    def representatives(self) -> List[Word]:
        """Shortest words reaching each coset from coset 0, scanning columns in order."""
        reps: Dict[int, Word] = {0: ()}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for column in range(2 * len(self.generators)):
                j = self.rows[i][column]
                if j not in reps:
                    letter = (self.generators[column // 2], 1 if column % 2 == 0 else -1)
                    reps[j] = reps[i] + (letter,)
                    queue.append(j)
        return [reps[i] for i in range(self.index)]

    def to_dict(self) -> Dict[str, object]:
        return {"generators": list(self.generators), "index": self.index, "rows": [list(r) for r in self.rows]}


def coset_enumerate(p: Presentation, subgens: Sequence[Sequence[Letter]], limit: int) -> CosetTable:
    """Enumerate the cosets of the subgroup generated by ``subgens``.

    Raises UndecidedError when more than ``limit`` cosets get defined.
    """
    if limit < 1:
        raise InputError("coset limit must be >= 1")
    if not p.generators:
        return CosetTable((), ((),))
    symbols = [f"x{i}" for i in range(len(p.generators))]
    free, *gens = free_group(", ".join(symbols))
    position = {g: i for i, g in enumerate(p.generators)}

    def to_element(word: Sequence[Letter]):
        element = free.identity
        for g, e in word:
            element = element * gens[position[g]] ** e
        return element

    relators = [to_element(r) for r in p.relators if r]
    subgroup = [to_element(w) for w in subgens if free_reduce(w)]
    group = FpGroup(free, relators)
    try:
        table = coset_enumeration_r(group, subgroup, max_cosets=limit)
    except ValueError as exc:
        logger.debug("coset enumeration stopped: %s", exc)
        raise UndecidedError(f"coset enumeration exceeded {limit} cosets", "coset_limit", limit) from exc
    if not table.is_complete():
        raise UndecidedError(f"coset table did not close within {limit} cosets", "coset_limit", limit)
    table.compress()
    table.standardize()
    rows = tuple(tuple(int(x) for x in row) for row in table.table)
    logger.debug("coset enumeration closed with index %d", len(rows))
    return CosetTable(p.generators, rows)


# ---------------------------------------------------------------------------
# Word-problem oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeStrategy:
    name: str = "free"


@dataclass(frozen=True)
class ToddCoxeterStrategy:
    limit: int = 2000
    name: str = "todd-coxeter"


@dataclass(frozen=True)
class DehnSearchStrategy:
    area_limit: int = 8
    name: str = "dehn-search"


Strategy = Union[FreeStrategy, ToddCoxeterStrategy, DehnSearchStrategy]


def relator_variants(relators: Sequence[Word]) -> List[Word]:
    """All cyclic rotations of every relator and of its inverse."""
    variants: Set[Word] = set()
    for r in relators:
        r = cyclic_reduce(r)
        if not r:
            continue
        for w in (r, inverse(r)):
            for k in range(len(w)):
                variants.add(w[k:] + w[:k])
    return sorted(variants)


def _canonical(word: Word) -> Word:
    if not word:
        return word
    return min(word[k:] + word[:k] for k in range(len(word)))


def filling_area(relators: Sequence[Word], word: Sequence[Letter], max_area: int) -> Optional[int]:
    """Least number of relator insertions reducing ``word`` to the empty word, up to ``max_area``."""
    variants = relator_variants(relators)
    start = cyclic_reduce(word)
    for bound in range(max_area + 1):
        failed: Dict[Word, int] = {}
        if _insertion_search(start, bound, variants, failed):
            return bound
    return None


def _insertion_search(word: Word, budget: int, variants: List[Word], failed: Dict[Word, int]) -> bool:
    if not word:
        return True
    if budget == 0:
        return False
    key = _canonical(word)
    if failed.get(key, -1) >= budget:
        return False
    n = len(word)
    for k in range(n):
        before, after = word[k - 1], word[k]
        for u in variants:
            if u[0] != (before[0], -before[1]) and u[-1] != (after[0], -after[1]):
                continue
            reduced = cyclic_reduce(word[:k] + u + word[k:])
            if len(reduced) >= n + len(u):
                continue
            if _insertion_search(reduced, budget - 1, variants, failed):
                return True
    failed[key] = budget
    return False


class WordOracle:
    """Decides triviality of loop words through a chain of strategies."""

    def __init__(self, p: Presentation, strategies: Sequence[Strategy]) -> None:
        self._presentation = p
        self._strategies = tuple(strategies)
        self._tables: Dict[int, Optional[CosetTable]] = {}

    @property
    def presentation(self) -> Presentation:
        return self._presentation

    def decide(self, word: Sequence[Letter]) -> WordAnswer:
        for strategy in self._strategies:
            answer = self._decide_with(strategy, word)
            if answer is not WordAnswer.UNKNOWN:
                return answer
        return WordAnswer.UNKNOWN

    def equal(self, u: Sequence[Letter], v: Sequence[Letter]) -> WordAnswer:
        return self.decide(inverse(u) + tuple(v))

    def _decide_with(self, strategy: Strategy, word: Sequence[Letter]) -> WordAnswer:
        p = self._presentation
        if isinstance(strategy, FreeStrategy):
            if p.complex.faces:
                return WordAnswer.UNKNOWN
            return WordAnswer.TRIVIAL if not free_reduce(word) else WordAnswer.NONTRIVIAL
        if isinstance(strategy, ToddCoxeterStrategy):
            table = self._table(strategy.limit)
            if table is None:
                return WordAnswer.UNKNOWN
            return WordAnswer.TRIVIAL if table.trace(0, word) == 0 else WordAnswer.NONTRIVIAL
        area = filling_area(p.relators, word, strategy.area_limit)
        return WordAnswer.TRIVIAL if area is not None else WordAnswer.UNKNOWN

    def _table(self, limit: int) -> Optional[CosetTable]:
        if limit not in self._tables:
            try:
                self._tables[limit] = coset_enumerate(self._presentation, [], limit)
            except UndecidedError:
                self._tables[limit] = None
        return self._tables[limit]


def default_oracle(c: Complex2, coset_limit: int, area_limit: int, base: Optional[str] = None) -> WordOracle:
    strategies: List[Strategy] = [FreeStrategy(), ToddCoxeterStrategy(coset_limit), DehnSearchStrategy(area_limit)]
    return WordOracle(presentation(c, base), strategies)


# ---------------------------------------------------------------------------
# Simple connectivity
# ---------------------------------------------------------------------------


def collapses_to_point(c: Complex2) -> bool:
    """Free-edge collapses remove every face and the remaining graph is a tree."""
    if not c.vertices:
        return False
    if collapse_faces(c, c.face_ids):
        return False
    return c.is_connected() and c.euler_characteristic() == 1


def is_simply_connected(c: Complex2, coset_limit: int = 2000) -> Answer:
    if not c.is_connected():
        raise InputError("complex is disconnected")
    p = presentation(c)
    if not p.generators or collapses_to_point(c):
        return Answer.YES
    if not c.faces:
        return Answer.NO
    try:
        table = coset_enumerate(p, [], coset_limit)
    except UndecidedError:
        logger.info("simple connectivity undecided within %d cosets", coset_limit)
        return Answer.UNKNOWN
    return Answer.YES if table.index == 1 else Answer.NO
