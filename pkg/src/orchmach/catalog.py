"""Built-in machines and breeds.

The two rule-index codes are exact as published; the small named machines
are the standard worked examples (infinite loops, the two-step writers,
the flip pair, the (01)*/(10)* recognizers and the left-runner).  Named
states map to naturals: the trap state is 2, the left-runner's walking
state is 3.
"""

from __future__ import annotations

from .engine import Breed
from .machines import BLANK, LEFT, RIGHT, STAY, TuringMachine, decode_rule_index

# 5-state record holder and the longer-running one-rule variant of it.
CHAMPION_CODE = (9, 0, 11, 1, 15, 2, 17, 3, 11, 4, 23, 5, 24, 6, 3, 7, 21, 9, 0)
VARIANT_CODE = (9, 0, 11, 1, 15, 2, 17, 3, 1, 4, 23, 5, 24, 6, 3, 7, 21, 9, 0)


def _tm(name, rules):
    return TuringMachine(name=name, rules=rules)


MACHINE_A = _tm("A", {(0, 0): (0, 1, RIGHT)})            # rightward 1-writer, never halts
MACHINE_B = _tm("B", {(0, 0): (0, 0, LEFT)})             # leftward walker, never halts
MACHINE_C = _tm("C", {(0, 0): (1, 0, RIGHT), (1, 0): (2, 0, RIGHT)})
MACHINE_D = _tm("D", {(0, 0): (1, 1, RIGHT), (1, 0): (2, 1, RIGHT)})
MACHINE_E = _tm("E", {(0, 0): (0, 1, STAY)})             # writes one 1, then halts
MACHINE_J = _tm("J", {(0, 1): (0, 0, STAY)})             # erases a 1, then halts
MACHINE_G = _tm("G", {(3, 0): (3, 1, RIGHT)})            # only acts from state 3

_TRAP = 2    # absorbing self-loop state of the recognizers
_WALK = 3    # walking state of the left-runner

# accepts (01)^n: alternates expecting 0 then 1, traps otherwise
MACHINE_X = _tm("X", {
    (0, 0): (1, 0, RIGHT),
    (0, 1): (_TRAP, 1, STAY),
    (1, 1): (0, 1, RIGHT),
    (1, 0): (_TRAP, 1, STAY),
    (1, BLANK): (_TRAP, 1, STAY),
    (_TRAP, 1): (_TRAP, 1, STAY),
})

# accepts (10)^n
MACHINE_Y = _tm("Y", {
    (0, 1): (1, 1, RIGHT),
    (0, 0): (_TRAP, 1, STAY),
    (1, 0): (0, 0, RIGHT),
    (1, 1): (_TRAP, 1, STAY),
    (1, BLANK): (_TRAP, 1, STAY),
    (_TRAP, 1): (_TRAP, 1, STAY),
})

# from a blank cell, walks left over the word without changing it
MACHINE_XP = _tm("Xp", {
    (0, BLANK): (_WALK, BLANK, LEFT),
    (_WALK, 0): (_WALK, 0, LEFT),
    (_WALK, 1): (_WALK, 1, LEFT),
})


def champion_machine() -> TuringMachine:
    m = decode_rule_index(CHAMPION_CODE)
    return TuringMachine(name="mb-champion", rules=m.rules, state_count_hint=5)


def variant_machine() -> TuringMachine:
    m = decode_rule_index(VARIANT_CODE)
    return TuringMachine(name="mb-variant", rules=m.rules, state_count_hint=5)


def breeds() -> dict[str, Breed]:
    """All built-in breeds, keyed by catalog name."""
    return {
        "ab": Breed("ab", (MACHINE_A, MACHINE_B)),
        "cd": Breed("cd", (MACHINE_C, MACHINE_D)),
        "ej": Breed("ej", (MACHINE_E, MACHINE_J)),
        "cdg": Breed("cdg", (MACHINE_C, MACHINE_D, MACHINE_G)),
        "xy": Breed("xy", (MACHINE_X, MACHINE_Y)),
        "xxpy": Breed("xxpy", (MACHINE_X, MACHINE_XP, MACHINE_Y)),
        "champion": Breed("champion", (champion_machine(),)),
        "variant": Breed("variant", (variant_machine(),)),
    }


def get_breed(name: str) -> Breed:
    table = breeds()
    try:
        return table[name.lower()]
    except KeyError:
        raise KeyError(
            f"no catalog breed {name!r}; available: {', '.join(sorted(table))}")
