"""Nondeterministic Turing machines: bounded exploration and the
decomposition into an equivalent deterministic breed.

The decomposition repeatedly picks a nondeterministic left side and
splits every machine built so far into one copy per right side, so the
output size is the product of the branching factors.  All outputs share
the source's left-side set, which is exactly the hypothesis under which
a breed and an NDTM simulate each other.

Text format, one line per left side:

    0,0 -> 1,0,R | 1,1,R
    1,0 -> 2,0,R

Symbols are 0, 1 or _ (blank); moves L, S, R.  '#' starts a comment.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Breed
from .machines import (BLANK, LEFT, MOVE_CHARS, ONE, RIGHT, STAY,
                       SYMBOL_CHARS, TuringMachine, ZERO, tape_word_of)

_SYMBOLS = {"0": ZERO, "1": ONE, "_": BLANK, "e": BLANK}
_MOVES = {"L": LEFT, "S": STAY, "R": RIGHT}


@dataclass(frozen=True)
class NDTM:
    """Finite map (state, symbol) -> non-empty set of (state, symbol, move)."""

    name: str
    rules: dict[tuple[int, int], tuple[tuple[int, int, int], ...]]
    states: frozenset[int] = field(init=False)

    def __post_init__(self):
        if not self.rules:
            raise ValueError(f"{self.name}: needs at least one left side")
        norm = {}
        for key, rights in self.rules.items():
            rights = tuple(rights)
            if not rights:
                raise ValueError(f"{self.name}: empty right-side set for {key}")
            norm[key] = rights
        object.__setattr__(self, "rules", norm)
        mentioned = {0}
        for (q, _s), rights in norm.items():
            mentioned.add(q)
            for (q2, _w, _m) in rights:
                mentioned.add(q2)
        object.__setattr__(self, "states", frozenset(mentioned))

    def branch_points(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.rules.items() if len(v) > 1)

    def is_deterministic(self) -> bool:
        return not self.branch_points()


def ndtm_from_machine(m: TuringMachine) -> NDTM:
    return NDTM(m.name, {k: (v,) for k, v in m.rules.items()})


@dataclass(frozen=True)
class BoundedRun:
    """What bounded breadth-first exploration of the computation tree found."""

    halting_leaves: frozenset[tuple[int, str]]   # (transitions, tape word)
    cycle_witnesses: tuple[tuple, ...]           # (depth, repeated config key)
    truncated: bool                              # node budget ran out
    frontier: int                                # unfinished paths at the depth cap
    leaf_paths: int = 0                          # halting paths, with multiplicity


def _config_key(state: int, tape: dict[int, int], head: int, background: int):
    """Translation-invariant configuration fingerprint."""
    support = [(p, v) for p, v in tape.items() if v != background]
    if not support:
        return (state, 0, b"")
    lo = min(p for p, _v in support)
    hi = max(p for p, _v in support)
    window = bytes(tape.get(p, background) for p in range(lo, hi + 1))
    return (state, head - lo, window)


def ndtm_bounded_run(m: NDTM, w: str = "", depth_cap: int = 12,
                     node_cap: int = 100_000) -> BoundedRun:
    """Breadth-first walk of all choice sequences up to the caps."""
    if depth_cap < 1 or node_cap < 1:
        raise ValueError("caps must be >= 1")
    background = BLANK if w else ZERO
    tape0 = {i: int(ch) for i, ch in enumerate(w)}
    root = (0, tape0, 0)
    leaves = set()
    leaf_paths = 0
    cycles = []
    truncated = False
    frontier = 0
    nodes = 0
    # queue entries: (state, tape, head, depth, ancestor keys on this path)
    queue = deque(
        [(0, tape0, 0, 0, frozenset([_config_key(0, tape0, 0, background)]))])
    while queue:
        state, tape, head, depth, seen = queue.popleft()
        nodes += 1
        if nodes > node_cap:
            truncated = True
            break
        sym = tape.get(head, background)
        rights = m.rules.get((state, sym))
        if not rights:
            leaves.add((depth, tape_word_of(tape, background)))
            leaf_paths += 1
            continue
        if depth >= depth_cap:
            frontier += 1
            continue
        for (q2, wsym, mv) in rights:
            t2 = dict(tape)
            if wsym == background:
                t2.pop(head, None)
            else:
                t2[head] = wsym
            h2 = head + mv - 1
            key = _config_key(q2, t2, h2, background)
            if key in seen:
                cycles.append((depth + 1, key))
                continue
            queue.append((q2, t2, h2, depth + 1, seen | {key}))
    return BoundedRun(frozenset(leaves), tuple(cycles), truncated, frontier,
                      leaf_paths)


def decompose_to_breed(m: NDTM) -> Breed:
    """Split every nondeterministic left side across all machines built so far.

    Left sides are processed in ascending (state, symbol) order; output
    machines are named base#k.  A deterministic input yields the singleton
    breed of itself.
    """
    tables: list[dict] = [{k: v[0] if len(v) == 1 else v for k, v in m.rules.items()}]
    # Tables hold per-left-side either one right side or the unsplit tuple.
    for key in sorted(m.rules):
        rights = m.rules[key]
        if len(rights) <= 1:
            continue
        split = []
        for tab in tables:
            for r in rights:
                t2 = dict(tab)
                t2[key] = r
                split.append(t2)
        tables = split
    members = []
    for k, tab in enumerate(tables):
        rules = {key: val for key, val in tab.items()}
        members.append(TuringMachine(name=f"{m.name}#{k}", rules=rules))
    return Breed(m.name, tuple(members))


def check_uniform_leftsides(breed: Breed) -> bool:
    """True iff every member has the identical left-side set."""
    sides = {m.left_sides() for m in breed.members}
    return len(sides) <= 1


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: str          # equivalent | not_equivalent | inconclusive
    detail: str
    ndtm_leaves: frozenset
    breed_leaves: frozenset

    def __bool__(self):
        return self.status == "equivalent"


def verify_equivalence_bounded(m: NDTM, breed: Breed, depth_cap: int = 12,
                               node_cap: int = 200_000,
                               word: str = "") -> EquivalenceVerdict:
    """Compare bounded halting outcomes (transition count, tape word) of the
    NDTM against exhaustive enumeration of the breed's choice tree.

    A breed run of N rounds performs N-1 selections, so breed leaves are
    normalized to transition counts before comparison.
    """
    from .analysis import EnumerationBounds, enumerate_computations

    if not check_uniform_leftsides(breed):
        raise ValueError("breed members must share their left-side set")
    ndtm_side = ndtm_bounded_run(m, word, depth_cap, node_cap)
    # A breed run of d transitions occupies d+1 rounds (the final empty round),
    # and either side may see outcomes just past the cap; compare the windows
    # both enumerations are guaranteed to cover completely.
    bounds = EnumerationBounds(depth_cap=depth_cap + 1, node_cap=node_cap)
    breed_side = enumerate_computations(breed, bounds,
                                        engine="om2" if word else "om1",
                                        word=word, schedule_k=None)
    ndtm_leaves = frozenset(l for l in ndtm_side.halting_leaves
                            if l[0] <= depth_cap)
    breed_leaves = frozenset((t.n - 1, t.tape_word) for t in breed_side.halting
                             if t.n - 1 <= depth_cap)
    if ndtm_side.truncated or breed_side.truncated:
        return EquivalenceVerdict("inconclusive", "node budget exhausted",
                                  ndtm_leaves, breed_leaves)
    if ndtm_leaves == breed_leaves:
        return EquivalenceVerdict("equivalent",
                                  f"{len(breed_leaves)} bounded outcomes match",
                                  ndtm_leaves, breed_leaves)
    diff = ndtm_leaves ^ breed_leaves
    return EquivalenceVerdict("not_equivalent",
                              f"differing outcomes: {sorted(diff)[:5]}",
                              ndtm_leaves, breed_leaves)


# --- text format ---------------------------------------------------------------

def parse_ndtm_text(text: str, name: str = "ndtm") -> NDTM:
    rules: dict[tuple[int, int], list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            left, right = line.split("->")
            q_tok, s_tok = left.split(",")
            key = (int(q_tok), _SYMBOLS[s_tok.strip()])
            rights = []
            for branch in right.split("|"):
                q2, w, d = branch.split(",")
                rights.append((int(q2), _SYMBOLS[w.strip()],
                               _MOVES[d.strip().upper()]))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}: {exc}") from exc
        rules.setdefault(key, []).extend(rights)
    return NDTM(name, {k: tuple(dict.fromkeys(v)) for k, v in rules.items()})


def format_ndtm_text(m: NDTM) -> str:
    lines = []
    for (q, s), rights in sorted(m.rules.items()):
        branches = " | ".join(
            f"{q2},{SYMBOL_CHARS[w]},{MOVE_CHARS[mv]}" for (q2, w, mv) in rights)
        lines.append(f"{q},{SYMBOL_CHARS[s]} -> {branches}")
    return "\n".join(lines) + "\n"


def load_ndtm(path) -> NDTM:
    p = Path(path)
    return parse_ndtm_text(p.read_text(), name=p.stem)


# --- the desk-scale instance family ---------------------------------------------

def ndtm_family(max_states: int = 3, max_branch_points: int = 2):
    """Structured grid of small NDTMs: every deterministic skeleton style x
    every placement of 1..max_branch_points binary branch points x every
    alternative style.  Used by the decomposition sweep."""
    from itertools import combinations

    instances = []
    for n_states in range(1, max_states + 1):
        sides = [(q, s) for q in range(n_states) for s in (0, 1)]
        for base_style in range(4):
            base = {}
            for (q, s) in sides:
                base[(q, s)] = _styled_right(q, s, n_states, base_style)
            base = {k: v for k, v in base.items() if v is not None}
            if not base:
                continue
            placeable = [k for k in sides if k in base]
            for n_branch in range(1, max_branch_points + 1):
                if len(placeable) < n_branch:
                    continue
                for points in combinations(placeable, n_branch):
                    for alt_style in range(2):
                        rules = {k: (v,) for k, v in base.items()}
                        for key in points:
                            alt = _styled_right(key[0], key[1], n_states,
                                                base_style + 2 + alt_style)
                            if alt is None or alt == base[key]:
                                alt = (base[key][0], 1 - base[key][1], RIGHT)
                            rules[key] = (base[key], alt)
                        label = (f"f{n_states}s{base_style}"
                                 f"b{'_'.join(f'{q}{s}' for q, s in points)}a{alt_style}")
                        instances.append(NDTM(label, rules))
    return instances


def _styled_right(q: int, s: int, n_states: int, style: int):
    """Deterministic right side for a skeleton; None leaves the side undefined
    (a halting hole) so every skeleton halts somewhere."""
    style = style % 6
    if style == 0:
        return None if (q == n_states - 1 and s == 0) else ((q + 1) % n_states, 1, RIGHT)
    if style == 1:
        return None if s == 1 else ((q + 1) % n_states, 1 - s, RIGHT)
    if style == 2:
        return ((q + 1) % n_states, 1, LEFT) if s == 0 else None
    if style == 3:
        return None if (q == 0 and s == 1) else (max(q - 1, 0), s, RIGHT)
    if style == 4:
        return ((q + 1) % n_states, 0, RIGHT) if s == 0 else None
    return None if (q == n_states - 1) else (q + 1, 1, STAY)
