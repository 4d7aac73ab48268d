"""Orchestrated execution of machine breeds.

A breed is an ordered set of deterministic machines driven by one shared
control pair F = (state, symbol under head).  Each round:

  * members that cannot hold the current control state (it is outside
    their state set) have halted and are dropped for good;
  * every remaining member offering a rule for F contributes it to the
    applicable list U (member order, one entry per member);
  * if U is empty no rule can ever fire again, so the whole breed halts
    and that final round still counts toward N;
  * otherwise one U entry is chosen (the nondeterminism) and executed
    once on the shared configuration.

Members lacking a rule for the current F but still able to hold the
state simply sit out the round; another member's rule may re-enable
them.  This is what makes e.g. the two one-state flip machines run
forever by alternation while a machine stranded in a foreign state is
gone permanently.

Alive counts card(M_n) are logged per round; the reported o-sequence
follows the n = 2..N-1 indexing, while the selection log keeps every
selection from the first one.

Three flavours: no input (all-zero tape), one shared input word (blank
background), and per-member inputs with per-member tapes and controls
(the autonomous variant, where the one-tape collapse no longer applies).
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from . import backend
from ._kernel_py import (POLICY_PATH, POLICY_PREFER, POLICY_RANDOM,
                         POLICY_SCRIPTED, STOP_CAP, STOP_HALTED,
                         STOP_SCRIPT_END, PolicyError, sm64_next)
from .machines import BLANK, ONE, ZERO, TuringMachine, tape_word_of

__all__ = [
    "Breed", "RunTrace", "SharedConfig", "RandomPolicy", "ScriptedPolicy",
    "PathPolicy", "PreferPolicy", "PolicyError", "ReplayMismatchError",
    "applicable_rules", "om1_step", "om1_run", "om2_run", "om3_run",
    "reference_om1_run", "reference_om2_run", "replay",
]

# Sequences (o-values, selections) are recorded automatically below this cap.
AUTO_RECORD_CAP = 1_000_000


class ReplayMismatchError(ValueError):
    """A selection log does not fit the breed it is replayed on."""

    def __init__(self, message, round_no):
        super().__init__(message)
        self.round_no = round_no


@dataclass(frozen=True)
class Breed:
    """Ordered collection of named machines; selection indices refer to the order."""

    name: str
    members: tuple[TuringMachine, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError(f"breed {self.name!r} has no members")
        names = [m.name.lower() for m in self.members]
        if len(set(names)) != len(names):
            raise ValueError(f"breed {self.name!r} has duplicate member names")

    def member_index(self, name: str) -> int:
        low = name.lower()
        for i, m in enumerate(self.members):
            if m.name.lower() == low:
                return i
        raise KeyError(f"no member named {name!r} in breed {self.name!r}")

    def script_from_names(self, names) -> tuple[int, ...]:
        return tuple(self.member_index(n) for n in names)

    def subset(self, indices, name: str | None = None) -> "Breed":
        indices = tuple(indices)
        members = tuple(self.members[i] for i in indices)
        label = name or (self.name + "[" + ",".join(m.name for m in members) + "]")
        return Breed(label, members)

    def __len__(self):
        return len(self.members)


# --- selection policies ----------------------------------------------------

class _Cursor:
    """Per-run mutable chooser; policies themselves stay immutable."""

    exhausted = False

    def choose(self, u_members, round_no):  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class RandomPolicy:
    """Uniform choice over the applicable list, SplitMix64-seeded."""

    seed: int

    kernel_kind = POLICY_RANDOM

    def kernel_args(self, breed):
        return self.seed, None

    def cursor(self, breed):
        return _RandomCursor(self.seed)


class _RandomCursor(_Cursor):
    def __init__(self, seed):
        self.state = seed & ((1 << 64) - 1)

    def choose(self, u_members, round_no):
        self.state, val = sm64_next(self.state)
        return val % len(u_members)


@dataclass(frozen=True)
class ScriptedPolicy:
    """Select the listed members in order; exhaustion stops the run."""

    members: tuple[int, ...]

    kernel_kind = POLICY_SCRIPTED

    def kernel_args(self, breed):
        return 0, array("i", self.members)

    def cursor(self, breed):
        return _ScriptCursor(self.members, by_member=True)


@dataclass(frozen=True)
class PathPolicy:
    """Follow a choice path of positions into U (enumeration cursor)."""

    path: tuple[int, ...]

    kernel_kind = POLICY_PATH

    def kernel_args(self, breed):
        return 0, array("i", self.path)

    def cursor(self, breed):
        return _ScriptCursor(self.path, by_member=False)


class _ScriptCursor(_Cursor):
    def __init__(self, entries, by_member):
        self.entries = entries
        self.by_member = by_member
        self.pos = 0

    def choose(self, u_members, round_no):
        if self.pos >= len(self.entries):
            self.exhausted = True
            return None
        want = self.entries[self.pos]
        self.pos += 1
        if self.by_member:
            for i, m in enumerate(u_members):
                if m == want:
                    return i
            raise PolicyError(
                f"scripted member {want} offers no applicable rule at round {round_no}")
        if want < 0 or want >= len(u_members):
            raise PolicyError(
                f"choice path index {want} out of range ({len(u_members)} applicable) "
                f"at round {round_no}")
        return want


@dataclass(frozen=True)
class PreferPolicy:
    """Pick the given member whenever it is applicable, else the first entry."""

    member: int

    kernel_kind = POLICY_PREFER

    def kernel_args(self, breed):
        return 0, array("i", [self.member])

    def cursor(self, breed):
        return _PreferCursor(self.member)


class _PreferCursor(_Cursor):
    def __init__(self, member):
        self.member = member

    def choose(self, u_members, round_no):
        for i, m in enumerate(u_members):
            if m == self.member:
                return i
        return 0


# --- traces ----------------------------------------------------------------

_STOP_NAMES = {STOP_CAP: "cap", STOP_HALTED: "halted", STOP_SCRIPT_END: "script_end"}


@dataclass(frozen=True)
class RunTrace:
    """Everything one orchestrated run produced."""

    breed_name: str
    engine: str
    halted: bool
    stop: str                      # halted | cap | script_end
    n: int                         # N for halting runs, rounds executed otherwise
    selections_total: int
    ones: int
    tape_word: str
    o2: int | None
    o_sum: int
    o_len: int
    selected_counts: tuple[int, ...]
    o_seq: tuple[int, ...] | None = None
    selections: tuple[int, ...] | None = None
    final_state: int = 0
    final_head: int = 0
    word: str | None = None
    member_words: tuple[str, ...] | None = None

    @property
    def o_mean(self) -> float | None:
        return self.o_sum / self.o_len if self.o_len else None

    @property
    def o_mean_floor(self) -> int:
        return self.o_sum // self.o_len if self.o_len else 0

    @property
    def n_repr(self) -> str:
        return str(self.n) if self.halted else "inf"

    def key(self):
        """Comparison tuple for oracle-equivalence checks (engine label excluded)."""
        return (self.halted, self.stop, self.n, self.selections_total, self.ones,
                self.tape_word, self.o2, self.o_sum, self.o_len,
                self.selected_counts, self.o_seq, self.selections,
                self.final_state, self.final_head)

    def projection(self, mode: str):
        """The four classic return modes: N, T, O and o."""
        if mode == "N":
            return self.n if self.halted else None
        if mode == "T":
            return self.tape_word if self.halted else None
        if mode == "O":
            return self.selections
        if mode == "o":
            return self.o_seq
        raise ValueError(f"unknown return mode {mode!r}")


# --- shared-configuration step API ------------------------------------------

@dataclass
class SharedConfig:
    """Mutable shared configuration of an orchestrated run."""

    tape: dict[int, int] = field(default_factory=dict)
    head: int = 0
    state: int = 0
    alive: list[bool] = field(default_factory=list)
    n: int = 0
    background: int = ZERO

    @classmethod
    def initial(cls, breed: Breed, word: str = "",
                blank_background: bool = False) -> "SharedConfig":
        background = BLANK if (word or blank_background) else ZERO
        tape = {i: int(ch) for i, ch in enumerate(word)}
        return cls(tape=tape, head=0, state=0,
                   alive=[True] * len(breed), n=0, background=background)

    def read(self, pos: int | None = None) -> int:
        return self.tape.get(self.head if pos is None else pos, self.background)

    @property
    def control(self) -> tuple[int, int]:
        return (self.state, self.read())

    @property
    def alive_count(self) -> int:
        return sum(self.alive)


def applicable_rules(breed: Breed, cfg: SharedConfig):
    """One (member index, rule) entry per alive member matching F, in member order."""
    f = cfg.control
    out = []
    for i, m in enumerate(breed.members):
        if cfg.alive[i] and f in m.rules:
            out.append((i, (f, m.rules[f])))
    return out


def om1_step(breed: Breed, cfg: SharedConfig, cursor):
    """One round: drop stranded members, pick from U, execute on the shared config.

    Returns (cfg, selection, removed) where selection is (member, rule) or
    None for the final empty-U round; cursor exhaustion leaves cfg untouched
    and returns (cfg, None, []) with cursor.exhausted set.
    """
    removed = []
    for i, m in enumerate(breed.members):
        if cfg.alive[i] and cfg.state not in m.states:
            cfg.alive[i] = False
            removed.append(i)
    entries = applicable_rules(breed, cfg)
    if not entries:
        for i in range(len(breed)):
            if cfg.alive[i]:
                cfg.alive[i] = False
                removed.append(i)
        cfg.n += 1
        return cfg, None, removed
    pick = cursor.choose([i for i, _r in entries], cfg.n)
    if pick is None:
        return cfg, None, removed
    member, rule = entries[pick]
    (_f, (q2, w, mv)) = rule
    if w == cfg.background:
        cfg.tape.pop(cfg.head, None)
    else:
        cfg.tape[cfg.head] = w
    cfg.head += mv - 1
    cfg.state = q2
    cfg.n += 1
    return cfg, (member, rule), removed


# --- fast shared-tape runs ---------------------------------------------------

def _initial_buffer(word: str, background: int):
    size = max(1 << 12, 2 * len(word) + 16)
    tape = bytearray([background]) * size
    origin = size // 2
    for i, ch in enumerate(word):
        tape[origin + i] = int(ch)
    return tape, origin


def _run_shared(breed: Breed, word: str, background: int, policy, cap: int,
                record, engine_label: str, kernel=None) -> RunTrace:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if record is None:
        record = cap <= AUTO_RECORD_CAP
    rec_cap = cap if record else 1
    packed = backend.pack_members(breed.members)
    tape0, origin = _initial_buffer(word, background)
    seed, script = policy.kernel_args(breed)
    (stop, n, sel_total, ones, o2, o_sum, o_len, state, head, tape, t_origin,
     _alive_mask, sel_counts, sel_rec, o_rec, _rng) = backend.om_run(
        packed, tape0, origin, 0, background, cap,
        policy.kernel_kind, seed, script, record, record, rec_cap, kernel=kernel)
    stop_name = _STOP_NAMES[stop]
    return RunTrace(
        breed_name=breed.name,
        engine=engine_label,
        halted=stop == STOP_HALTED,
        stop=stop_name,
        n=n,
        selections_total=sel_total,
        ones=ones,
        tape_word=backend.tape_word_from_buffer(tape),
        o2=None if o2 < 0 else o2,
        o_sum=o_sum,
        o_len=o_len,
        selected_counts=tuple(sel_counts),
        o_seq=tuple(o_rec) if record else None,
        selections=tuple(sel_rec) if record else None,
        final_state=state,
        final_head=head,
        word=word if engine_label == "om2" else None,
    )


def om1_run(breed: Breed, policy, cap: int, record=None, kernel=None) -> RunTrace:
    """No-input orchestrated run: all-zero tape, F = (0, 0)."""
    return _run_shared(breed, "", ZERO, policy, cap, record, "om1", kernel=kernel)


def om2_run(breed: Breed, word: str, policy, cap: int, record=None,
            blank_background: bool = False, kernel=None) -> RunTrace:
    """Shared-input run: word on a blank background, head on its first letter.

    The empty word drops back to the all-zero no-input tape so that the
    no-input flavour is literally the special case; pass blank_background
    to use a fully blank tape instead.
    """
    if any(ch not in "01" for ch in word):
        raise ValueError("input word must be over {0,1}")
    background = BLANK if (word or blank_background) else ZERO
    return _run_shared(breed, word, background, policy, cap, record, "om2",
                       kernel=kernel)


# --- reference (multi-tape) oracle -------------------------------------------

@dataclass
class _MemberConfig:
    tape: dict[int, int]
    head: int
    state: int
    background: int

    def read(self):
        return self.tape.get(self.head, self.background)

    def control(self):
        return (self.state, self.read())

    def snapshot(self):
        return (tuple(sorted((p, v) for p, v in self.tape.items()
                             if v != self.background)),
                self.head, self.state)


def _reference_run(breed: Breed, word: str, background: int, policy, cap: int,
                   engine_label: str, collect_snapshots: bool):
    """Slow oracle: one tape per member, every selection executed on every
    alive member.  Alive configurations must stay pairwise equal (which is
    why one shared tape suffices); this engine checks that every round."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    members = breed.members
    configs = [_MemberConfig({i: int(ch) for i, ch in enumerate(word)}, 0, 0,
                             background) for _ in members]
    alive = [True] * len(members)
    cursor = policy.cursor(breed)
    n = 0
    sel_total = 0
    sel_counts = [0] * len(members)
    selections = []
    o_vals = []
    o2 = None
    snapshots = [] if collect_snapshots else None
    stop = STOP_CAP
    last_cfg = configs[0]

    while any(alive) and n < cap:
        alive_count = sum(alive)
        if n >= 2:
            o_vals.append(alive_count)
            if n == 2:
                o2 = alive_count
        for i, m in enumerate(members):
            if alive[i] and configs[i].state not in m.states:
                alive[i] = False
        entries = []
        for i, m in enumerate(members):
            if not alive[i]:
                continue
            rule = m.rules.get(configs[i].control())
            if rule is not None:
                entries.append((i, rule))
        if not entries:
            for i in range(len(members)):
                alive[i] = False
            n += 1
            stop = STOP_HALTED
            break
        ctrls = {configs[i].control() for i, _ in entries}
        if len(ctrls) != 1:
            raise AssertionError(f"alive controls diverged at round {n}: {ctrls}")
        pick = cursor.choose([i for i, _r in entries], n)
        if pick is None:
            stop = STOP_SCRIPT_END
            break
        member, (q2, w, mv) = entries[pick]
        sel_counts[member] += 1
        sel_total += 1
        selections.append(member)
        for i in range(len(members)):
            if not alive[i]:
                continue
            c = configs[i]
            if w == c.background:
                c.tape.pop(c.head, None)
            else:
                c.tape[c.head] = w
            c.head += mv - 1
            c.state = q2
            last_cfg = c
        n += 1
        if collect_snapshots:
            snaps = [configs[i].snapshot() for i in range(len(members)) if alive[i]]
            snapshots.append(snaps)
            if len(set(snaps)) > 1:
                raise AssertionError(f"alive tapes diverged after round {n}")

    o_sum = sum(o_vals)
    o_len = len(o_vals)
    ones = sum(1 for v in last_cfg.tape.values() if v == ONE)
    trace = RunTrace(
        breed_name=breed.name,
        engine=engine_label,
        halted=stop == STOP_HALTED,
        stop=_STOP_NAMES[stop],
        n=n,
        selections_total=sel_total,
        ones=ones,
        tape_word=tape_word_of(last_cfg.tape, last_cfg.background),
        o2=o2,
        o_sum=o_sum,
        o_len=o_len,
        selected_counts=tuple(sel_counts),
        o_seq=tuple(o_vals),
        selections=tuple(selections),
        final_state=last_cfg.state,
        final_head=last_cfg.head,
        word=word if engine_label.startswith("om2") else None,
    )
    return trace, snapshots


def reference_om1_run(breed: Breed, policy, cap: int, collect_snapshots=True):
    return _reference_run(breed, "", ZERO, policy, cap, "om1-ref", collect_snapshots)


def reference_om2_run(breed: Breed, word: str, policy, cap: int,
                      collect_snapshots=True, blank_background=False):
    if any(ch not in "01" for ch in word):
        raise ValueError("input word must be over {0,1}")
    background = BLANK if (word or blank_background) else ZERO
    return _reference_run(breed, word, background, policy, cap, "om2-ref",
                          collect_snapshots)


# --- autonomous (per-member input) runs --------------------------------------

def om3_run(breed: Breed, inputs, policy, cap: int) -> RunTrace:
    """Per-member tapes and controls; the selected right side is executed on
    every alive member against its own configuration."""
    trace, _configs = om3_configs(breed, inputs, policy, cap)
    return trace


def om3_configs(breed: Breed, inputs, policy, cap: int):
    """om3_run plus the final per-member configurations (for tape inspection)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if len(inputs) != len(breed):
        raise ValueError("need exactly one input word per member")
    for w in inputs:
        if any(ch not in "01" for ch in w):
            raise ValueError("input words must be over {0,1}")
    configs = [
        _MemberConfig({i: int(ch) for i, ch in enumerate(w)}, 0, 0,
                      BLANK if w else ZERO)
        for w in inputs
    ]
    trace = _om3_drive(breed, configs, policy, cap)
    return trace, configs


def _om3_drive(breed, configs, policy, cap):
    members = breed.members
    alive = [True] * len(members)
    cursor = policy.cursor(breed)
    n = 0
    sel_counts = [0] * len(members)
    selections = []
    o_vals = []
    o2 = None
    stop = STOP_CAP
    last_alive = 0
    while any(alive) and n < cap:
        alive_count = sum(alive)
        if n >= 2:
            o_vals.append(alive_count)
            if n == 2:
                o2 = alive_count
        for i, m in enumerate(members):
            if alive[i] and configs[i].state not in m.states:
                alive[i] = False
        entries = []
        for i, m in enumerate(members):
            if alive[i]:
                rule = m.rules.get(configs[i].control())
                if rule is not None:
                    entries.append((i, rule))
        if not entries:
            alive = [False] * len(members)
            n += 1
            stop = STOP_HALTED
            break
        pick = cursor.choose([i for i, _r in entries], n)
        if pick is None:
            stop = STOP_SCRIPT_END
            break
        member, (q2, w, mv) = entries[pick]
        sel_counts[member] += 1
        selections.append(member)
        last_alive = member
        for i in range(len(members)):
            if not alive[i]:
                continue
            c = configs[i]
            if w == c.background:
                c.tape.pop(c.head, None)
            else:
                c.tape[c.head] = w
            c.head += mv - 1
            c.state = q2
        n += 1
    final = configs[last_alive]
    return RunTrace(
        breed_name=breed.name, engine="om3", halted=stop == STOP_HALTED,
        stop=_STOP_NAMES[stop], n=n, selections_total=len(selections),
        ones=sum(1 for v in final.tape.values() if v == ONE),
        tape_word=tape_word_of(final.tape, final.background),
        o2=o2, o_sum=sum(o_vals), o_len=len(o_vals),
        selected_counts=tuple(sel_counts), o_seq=tuple(o_vals),
        selections=tuple(selections), final_state=final.state,
        final_head=final.head,
        member_words=tuple(tape_word_of(c.tape, c.background) for c in configs),
    )


# --- replay -------------------------------------------------------------------

def replay(breed: Breed, selections, cap: int | None = None, engine: str = "om1",
           word: str = "", blank_background: bool = False) -> RunTrace:
    """Re-execute a logged selection sequence deterministically.

    Selections may be member indices or member names (matched by name, so a
    permuted copy of the breed replays to the same trace).  A log that does
    not fit the breed raises ReplayMismatchError; a truncated log yields the
    prefix trace with stop='script_end'.
    """
    script = []
    for s in selections:
        script.append(s if isinstance(s, int) else breed.member_index(s))
    policy = ScriptedPolicy(tuple(script))
    run_cap = cap if cap is not None else len(script) + 1
    try:
        if engine == "om1":
            return om1_run(breed, policy, run_cap)
        if engine == "om2":
            return om2_run(breed, word, policy, run_cap,
                           blank_background=blank_background)
        raise ValueError(f"replay supports om1/om2, not {engine!r}")
    except PolicyError as exc:
        raise ReplayMismatchError(str(exc), _fault_round(exc)) from exc


def _fault_round(exc: PolicyError) -> int:
    text = str(exc)
    try:
        return int(text.rsplit("round", 1)[1].strip())
    except (IndexError, ValueError):
        return -1
