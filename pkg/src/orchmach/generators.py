"""Seeded random machines and breeds for sweeps and property tests."""

from __future__ import annotations

import random

from .engine import Breed
from .machines import LEFT, RIGHT, STAY, TuringMachine


def random_machine(rng: random.Random, n_states: int, name: str,
                   rule_density: float = 0.85,
                   require_initial_rule: bool = True) -> TuringMachine:
    """Random deterministic binary machine with states 0..n_states-1."""
    rules = {}
    for q in range(n_states):
        for s in (0, 1):
            if rng.random() < rule_density:
                rules[(q, s)] = (rng.randrange(n_states), rng.randrange(2),
                                 rng.choice((LEFT, STAY, RIGHT)))
    if require_initial_rule and (0, 0) not in rules:
        rules[(0, 0)] = (rng.randrange(n_states), rng.randrange(2),
                         rng.choice((LEFT, STAY, RIGHT)))
    if not rules:
        rules[(0, 0)] = (0, 1, RIGHT)
    return TuringMachine(name=name, rules=rules)


def random_breed(rng: random.Random, n_members: int, n_states: int,
                 name: str = "rnd", **kw) -> Breed:
    members = tuple(random_machine(rng, n_states, f"{name}-m{i}", **kw)
                    for i in range(n_members))
    return Breed(name, members)


def random_uniform_breed(rng: random.Random, n_members: int, n_states: int,
                         name: str = "uni") -> Breed:
    """Members share one random left-side set and differ only in right sides
    (the shape under which a breed and a nondeterministic machine coincide)."""
    sides = [(q, s) for q in range(n_states) for s in (0, 1)]
    keep = [k for k in sides if rng.random() < 0.7]
    if (0, 0) not in keep:
        keep.append((0, 0))
    # leave at least one hole so standalone runs can halt
    if len(keep) == len(sides):
        keep.remove(rng.choice([k for k in keep if k != (0, 0)] or [keep[-1]]))
    members = []
    for i in range(n_members):
        rules = {k: (rng.randrange(n_states), rng.randrange(2),
                     rng.choice((LEFT, STAY, RIGHT)))
                 for k in keep}
        members.append(TuringMachine(name=f"{name}-m{i}", rules=rules))
    return Breed(name, tuple(members))
