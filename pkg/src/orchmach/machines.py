"""Deterministic Turing machines, the rule-index codec, and standalone runs.

Machines are quadruple-style: a partial transition table over
(state, symbol) with natural-number states, initial state 0 and tape
alphabet {0, 1} (plus a blank symbol in input-word contexts).  A machine
halts when no rule matches the current (state, symbol) pair.

The rule-index codec packs a machine into a flat integer sequence:
rule count R followed by R (from-index, to-index) pairs, where

    from-index = 2*state + symbol
    to-index   = 6*state + 3*symbol + move      (move: 0=left, 1=stay, 2=right)
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Tape symbols.  BLANK only appears in input-word contexts; plain runs and
# the integer codec are binary.
ZERO = 0
ONE = 1
BLANK = 2

# Head moves, numbered as the codec encodes them.
LEFT = 0
STAY = 1
RIGHT = 2

SYMBOL_CHARS = {ZERO: "0", ONE: "1", BLANK: "_"}
MOVE_CHARS = {LEFT: "L", STAY: "S", RIGHT: "R"}


class MalformedCodeError(ValueError):
    """Rule-index sequence is truncated or contains invalid entries."""


class NondeterministicCodeError(ValueError):
    """Rule-index sequence repeats a from-index."""


class UnencodableError(ValueError):
    """Machine uses the blank symbol, which the binary codec cannot express."""


@dataclass(frozen=True)
class TuringMachine:
    """A deterministic machine: name plus a (state, symbol) -> (state, symbol, move) table."""

    name: str
    rules: dict[tuple[int, int], tuple[int, int, int]]
    state_count_hint: int = 0
    states: frozenset[int] = field(init=False)

    def __post_init__(self):
        for (q, s), (q2, w, m) in self.rules.items():
            if q < 0 or q2 < 0:
                raise ValueError(f"{self.name}: negative state in rule ({q},{s})")
            if s not in (ZERO, ONE, BLANK) or w not in (ZERO, ONE, BLANK):
                raise ValueError(f"{self.name}: bad symbol in rule ({q},{s})")
            if m not in (LEFT, STAY, RIGHT):
                raise ValueError(f"{self.name}: bad move in rule ({q},{s})")
        mentioned = {0}
        for (q, _s), (q2, _w, _m) in self.rules.items():
            mentioned.add(q)
            mentioned.add(q2)
        object.__setattr__(self, "states", frozenset(mentioned))

    @property
    def rule_count(self) -> int:
        return len(self.rules)

    @property
    def max_state(self) -> int:
        return max(self.states)

    def uses_blank(self) -> bool:
        return any(s == BLANK or w == BLANK
                   for (_q, s), (_q2, w, _m) in self.rules.items())

    def left_sides(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.rules)

    def rule_lines(self) -> list[str]:
        """Human-readable rule listing, ascending by (state, symbol)."""
        out = []
        for (q, s), (q2, w, m) in sorted(self.rules.items()):
            out.append(f"{q},{SYMBOL_CHARS[s]} -> {q2},{SYMBOL_CHARS[w]},{MOVE_CHARS[m]}")
        return out


def decode_rule_index(code) -> TuringMachine:
    """Build a machine from a rule-index sequence (see module docstring)."""
    code = tuple(int(x) for x in code)
    if len(code) == 0:
        raise MalformedCodeError("empty code")
    if any(x < 0 for x in code):
        raise MalformedCodeError("rule-index entries must be naturals")
    n = code[0]
    if len(code) != 1 + 2 * n:
        raise MalformedCodeError(
            f"code declares {n} rules but carries {len(code) - 1} values (need {2 * n})")
    rules = {}
    max_from_state = 0
    for i in range(n):
        f, t = code[1 + 2 * i], code[2 + 2 * i]
        frm = (f // 2, f % 2)
        if frm in rules:
            raise NondeterministicCodeError(f"duplicate from-index {f}")
        rules[frm] = (t // 6, (t % 6) // 3, t % 3)
        max_from_state = max(max_from_state, frm[0])
    return TuringMachine(name=f"tm{len(rules)}", rules=rules,
                         state_count_hint=max_from_state + 1)


def encode_rule_index(m: TuringMachine) -> tuple[int, ...]:
    """Inverse of decode_rule_index; rules emitted in ascending from-index order."""
    if m.uses_blank():
        raise UnencodableError(f"{m.name}: blank symbol has no rule-index encoding")
    pairs = []
    for (q, s), (q2, w, mv) in m.rules.items():
        pairs.append((2 * q + s, 6 * q2 + 3 * w + mv))
    pairs.sort()
    out = [len(pairs)]
    for f, t in pairs:
        out.extend((f, t))
    return tuple(out)


def parse_rule_index_text(text: str) -> tuple[int, ...]:
    """Parse the machine text format: comma/whitespace-separated naturals,
    optionally wrapped in parentheses."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    tokens = [t for t in s.replace(",", " ").split() if t]
    if not tokens:
        raise MalformedCodeError("no numbers in machine text")
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise MalformedCodeError(f"non-numeric token in machine text: {exc}") from exc


def format_rule_index(code) -> str:
    return "(" + ", ".join(str(x) for x in code) + ")"


class Halt:
    """Sentinel returned by tm_step when no rule matches."""

    def __repr__(self):
        return "Halt"


HALT = Halt()


@dataclass
class MachineConfig:
    """Mutable configuration for a standalone run: sparse tape, head, state."""

    tape: dict[int, int] = field(default_factory=dict)
    head: int = 0
    state: int = 0
    steps: int = 0
    background: int = ZERO

    def read(self, pos: int | None = None) -> int:
        return self.tape.get(self.head if pos is None else pos, self.background)

    @property
    def control(self) -> tuple[int, int]:
        """The pair F = (state, symbol under head)."""
        return (self.state, self.read())


def tm_step(m: TuringMachine, c: MachineConfig):
    """Apply one transition in place; return the config, or HALT (config untouched)."""
    rule = m.rules.get((c.state, c.read()))
    if rule is None:
        return HALT
    q2, w, mv = rule
    if w == c.background:
        c.tape.pop(c.head, None)
    else:
        c.tape[c.head] = w
    c.head += mv - 1
    c.state = q2
    c.steps += 1
    return c


@dataclass(frozen=True)
class RunResult:
    """Outcome of a standalone bounded run.

    steps/ones count executed transitions and final 1-cells ("raw").
    bb_steps/bb_ones additionally score the missing-rule halt as the
    busy-beaver convention's final transition (write 1, move right), which
    is how the literature's champion records are stated.  They are None
    for runs stopped by the cap.
    """

    halted: bool
    steps: int
    ones: int
    tape_word: str
    bb_steps: int | None = None
    bb_ones: int | None = None


def tape_word_of(tape: dict[int, int], background: int = ZERO) -> str:
    """Inclusive window between the extreme 1-cells; empty when no 1 on tape."""
    one_cells = [p for p, v in tape.items() if v == ONE]
    if not one_cells:
        return ""
    lo, hi = min(one_cells), max(one_cells)
    return "".join(SYMBOL_CHARS[tape.get(p, background)] for p in range(lo, hi + 1))


def tm_run(m: TuringMachine, cap: int) -> RunResult:
    """Run from the all-zero tape until halt or cap, via the fast backend."""
    from . import backend

    if cap < 0:
        raise ValueError("cap must be >= 0")
    return backend.tm_run(m, cap)


def tm_run_slow(m: TuringMachine, cap: int) -> RunResult:
    """Pure step-loop twin of tm_run, kept independent of the packed kernels."""
    c = MachineConfig()
    halted = False
    while c.steps < cap:
        if tm_step(m, c) is HALT:
            halted = True
            break
    ones = sum(1 for v in c.tape.values() if v == ONE)
    word = tape_word_of(c.tape)
    bb_steps = bb_ones = None
    if halted:
        bb_steps = c.steps + 1
        bb_ones = ones + (0 if c.read() == ONE else 1)
    return RunResult(halted, c.steps, ones, word, bb_steps, bb_ones)
