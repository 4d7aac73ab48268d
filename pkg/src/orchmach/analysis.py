"""Bounded analysis of breeds: exhaustive choice-tree enumeration,
convergence/divergence verdicts, purebred checks, and the intelligence
quantities.

Whether a breed's computations all terminate is undecidable in general,
so every verdict here is bound-qualified and tri-state: certification
requires the whole tree to have been walked, divergence requires a
witness (a configuration cycle, or a scripted schedule that actually ran
to the demanded length), and anything else is reported unknown.

Cycle detection works on translation-invariant configuration
fingerprints (control pair, alive set, tape window relative to the
head), so a walker drifting over unchanged background is caught; a hit
is an exact repeat because fingerprints are compared by value, and it
witnesses an infinite computation since the dynamics are translation
invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .engine import (Breed, PathPolicy, PolicyError, RunTrace, ScriptedPolicy,
                     om1_run, om2_run)
from .machines import BLANK, ONE, ZERO, tape_word_of

__all__ = [
    "EnumerationBounds", "ConvergenceVerdict", "EnumeratedTrace",
    "EnumerationResult", "IqEqReport", "PurebredVerdict",
    "enumerate_computations", "divergence_by_schedule", "breed_iq_eq",
    "purebred_check_om1", "purebred_check_om2", "replay_path",
    "recognized_language_bounded", "accepted_words", "w_iq_eq",
    "machine_iq_eq", "empirical_intelligence_tables", "is_quasi_trivial",
    "label_quasi_trivial",
]


@dataclass(frozen=True)
class EnumerationBounds:
    depth_cap: int = 64
    node_cap: int = 100_000
    word_length_cap: int = 4

    def __post_init__(self):
        if self.depth_cap < 1 or self.node_cap < 1 or self.word_length_cap < 0:
            raise ValueError("bounds must be positive")


@dataclass(frozen=True)
class ConvergenceVerdict:
    kind: str                 # certified_convergent | divergent | unknown
    witness: tuple = ()
    detail: str = ""


@dataclass(frozen=True)
class EnumeratedTrace:
    """One halting computation found by enumeration."""

    n: int
    tape_word: str
    ones: int
    o2: int | None
    o_sum: int
    o_len: int
    path: tuple[int, ...]     # positions chosen in U, round by round

    @property
    def o_mean(self) -> float | None:
        return self.o_sum / self.o_len if self.o_len else None

    @property
    def o_mean_floor(self) -> int:
        return self.o_sum // self.o_len if self.o_len else 0


@dataclass(frozen=True)
class EnumerationResult:
    halting: tuple[EnumeratedTrace, ...]
    verdict: ConvergenceVerdict
    cycles: tuple[tuple, ...]
    truncated: bool
    frontier: int
    nodes: int

    @property
    def outputs(self) -> frozenset[str]:
        return frozenset(t.tape_word for t in self.halting)

    @property
    def outputs_complete(self) -> bool:
        """True when no unfinished path remains: the halting output set is
        exact even if cycles (divergent paths) were found."""
        return not self.truncated and self.frontier == 0


def _config_key(state, tape, head, alive, background):
    support = [(p, v) for p, v in tape.items() if v != background]
    if not support:
        return (state, alive, 0, b"")
    lo = min(p for p, _v in support)
    hi = max(p for p, _v in support)
    window = bytes(tape.get(p, background) for p in range(lo, hi + 1))
    return (state, alive, head - lo, window)


def enumerate_computations(breed: Breed, bounds: EnumerationBounds,
                           engine: str = "om1", word: str = "",
                           schedule_k: int | None = 10_000,
                           blank_background: bool = False) -> EnumerationResult:
    """Walk the whole nondeterministic choice tree up to the bounds.

    Every round with a non-empty applicable list branches once per entry.
    Paths closing a configuration cycle are divergence witnesses; paths
    still alive at depth_cap count as frontier.  When the tree could not be
    finished and no cycle was found, scripted single-member schedules are
    tried as a cheaper divergence witness (schedule_k rounds).
    """
    if engine not in ("om1", "om2"):
        raise ValueError("enumeration supports om1 and om2")
    if engine == "om1":
        word = ""
        blank_background = False
    background = BLANK if (word or blank_background) else ZERO
    members = breed.members
    all_alive = (1 << len(members)) - 1

    tape0 = {i: int(ch) for i, ch in enumerate(word)}
    root_key = _config_key(0, tape0, 0, all_alive, background)
    # node: (state, tape, head, alive_mask, n, o2, o_sum, o_len, path, seen)
    stack = [(0, tape0, 0, all_alive, 0, None, 0, 0, (), frozenset([root_key]))]
    halting = []
    cycles = []
    truncated = False
    frontier = 0
    nodes = 0

    while stack:
        (state, tape, head, alive, n, o2, o_sum, o_len, path, seen) = stack.pop()
        nodes += 1
        if nodes > bounds.node_cap:
            truncated = True
            break
        if n >= 2:
            count = bin(alive).count("1")
            o_sum += count
            o_len += 1
            if n == 2:
                o2 = count
        for i, m in enumerate(members):
            if alive & (1 << i) and state not in m.states:
                alive &= ~(1 << i)
        sym = tape.get(head, background)
        entries = []
        for i, m in enumerate(members):
            if alive & (1 << i):
                rule = m.rules.get((state, sym))
                if rule is not None:
                    entries.append((i, rule))
        if not entries:
            halting.append(EnumeratedTrace(
                n=n + 1, tape_word=tape_word_of(tape, background),
                ones=sum(1 for v in tape.values() if v == ONE),
                o2=o2, o_sum=o_sum, o_len=o_len, path=path))
            continue
        if n >= bounds.depth_cap:
            frontier += 1
            continue
        sibling_keys = set()
        for pos, (i, (q2, w, mv)) in enumerate(entries):
            t2 = dict(tape)
            if w == background:
                t2.pop(head, None)
            else:
                t2[head] = w
            h2 = head + mv - 1
            key = _config_key(q2, t2, h2, alive, background)
            if key in sibling_keys:
                # different selected entries, same resulting configuration:
                # identical subtree, walk it once
                continue
            sibling_keys.add(key)
            if key in seen:
                cycles.append((n + 1, key))
                continue
            stack.append((q2, t2, h2, alive, n + 1, o2, o_sum, o_len,
                          path + (pos,), seen | {key}))

    if cycles:
        verdict = ConvergenceVerdict(
            "divergent", witness=("cycle", cycles[0]),
            detail=f"configuration cycle closed at depth {cycles[0][0]}")
    elif truncated:
        verdict = ConvergenceVerdict("unknown", detail="node budget exhausted")
    elif frontier:
        sched = (divergence_by_schedule(breed, schedule_k, engine, word)
                 if schedule_k else None)
        if sched is not None:
            verdict = ConvergenceVerdict(
                "divergent", witness=("schedule",) + sched,
                detail=f"member {sched[0]} selected alone runs {sched[1]} rounds")
        else:
            verdict = ConvergenceVerdict(
                "unknown", detail=f"{frontier} paths alive at depth cap")
    else:
        verdict = ConvergenceVerdict(
            "certified_convergent",
            detail=f"all {len(halting)} computations halt within bounds")
    return EnumerationResult(tuple(halting), verdict, tuple(cycles),
                             truncated, frontier, nodes)


def divergence_by_schedule(breed: Breed, k: int, engine: str = "om1",
                           word: str = "") -> tuple | None:
    """Try the always-this-member schedule for each member; a run that is
    still going after k rounds is a divergence witness (member, k)."""
    for i in range(len(breed)):
        policy = ScriptedPolicy((i,) * k)
        try:
            if engine == "om1":
                trace = om1_run(breed, policy, k, record=False)
            else:
                trace = om2_run(breed, word, policy, k, record=False)
        except PolicyError:
            continue
        if not trace.halted and trace.stop == "cap":
            return (i, k)
    return None


def replay_path(breed: Breed, path, engine: str = "om1", word: str = "",
                cap: int | None = None) -> RunTrace:
    """Re-run one enumerated choice path on the fast engine."""
    policy = PathPolicy(tuple(path))
    run_cap = cap if cap is not None else len(path) + 1
    if engine == "om1":
        return om1_run(breed, policy, run_cap)
    return om2_run(breed, word, policy, run_cap)


# --- intelligence quantities ---------------------------------------------------

@dataclass(frozen=True)
class IqEqReport:
    iq_lower: int
    eq_lower: int
    exact: bool
    found_halting: bool
    witnesses: tuple[EnumeratedTrace, ...] = ()
    raw_o_mean: float | None = None


def breed_iq_eq(breed: Breed, bounds: EnumerationBounds, engine: str = "om1",
                word: str = "") -> IqEqReport:
    """Maxima of N and of the floored o-mean over enumerated halting
    computations; exact only under full enumeration."""
    enum = enumerate_computations(breed, bounds, engine, word)
    if not enum.halting:
        return IqEqReport(0, 0, False, False)
    best_n = max(enum.halting, key=lambda t: t.n)
    best_e = max(enum.halting, key=lambda t: t.o_mean_floor)
    exact = enum.verdict.kind == "certified_convergent"
    return IqEqReport(
        iq_lower=best_n.n,
        eq_lower=best_e.o_mean_floor,
        exact=exact,
        found_halting=True,
        witnesses=(best_n, best_e),
        raw_o_mean=best_e.o_mean,
    )


def w_iq_eq(breed: Breed, word: str, bounds: EnumerationBounds) -> IqEqReport:
    return breed_iq_eq(breed, bounds, engine="om2", word=word)


def machine_iq_eq(machine_name: str, pool, bounds: EnumerationBounds) -> IqEqReport:
    """Lower bounds for one machine over a caller-supplied pool of candidate
    breeds containing it (the true maxima over all breeds are intractable)."""
    best_iq = 0
    best_eq = 0
    found = False
    witnesses = []
    for breed in pool:
        if not any(m.name == machine_name for m in breed.members):
            continue
        rep = breed_iq_eq(breed, bounds)
        if rep.found_halting:
            found = True
            if rep.iq_lower > best_iq:
                best_iq = rep.iq_lower
                witnesses = list(rep.witnesses[:1])
            best_eq = max(best_eq, rep.eq_lower)
    return IqEqReport(best_iq, best_eq, False, found, tuple(witnesses))


# --- purebred checks -----------------------------------------------------------

@dataclass(frozen=True)
class PurebredVerdict:
    kind: str                       # purebred | not_purebred | unknown
    witness: tuple[str, ...] = ()   # member names of the witnessing subset
    detail: str = ""


def _proper_subsets(breed: Breed):
    idx = range(len(breed))
    for size in range(1, len(breed)):
        for combo in combinations(idx, size):
            yield combo


def purebred_check_om1(breed: Breed, bounds: EnumerationBounds) -> PurebredVerdict:
    """A proper non-empty subset reproducing the breed's full set of halting
    tape outputs makes the breed not purebred.  Subsets whose trees could not
    be finished leave the verdict unknown (their output set can only grow)."""
    if len(breed) == 1:
        return PurebredVerdict("purebred", detail="no proper non-empty subset")
    full = enumerate_computations(breed, bounds, schedule_k=None)
    if full.verdict.kind != "certified_convergent":
        return PurebredVerdict(
            "unknown", detail=f"breed not certified convergent ({full.verdict.kind})")
    target = full.outputs
    incomplete = []
    for combo in _proper_subsets(breed):
        sub = breed.subset(combo)
        se = enumerate_computations(sub, bounds, schedule_k=None)
        if se.outputs_complete:
            if se.outputs == target:
                names = tuple(breed.members[i].name for i in combo)
                return PurebredVerdict("not_purebred", witness=names,
                                       detail=f"subset reproduces outputs {sorted(target)}")
        else:
            incomplete.append(combo)
    if incomplete:
        return PurebredVerdict("unknown",
                               detail=f"{len(incomplete)} subsets hit bounds")
    return PurebredVerdict("purebred",
                           detail=f"no subset reproduces outputs {sorted(target)}")


def recognized_language_bounded(breed: Breed, bounds: EnumerationBounds,
                                blank_background: bool = False) -> dict:
    """Per-word acceptance over all binary words up to the length cap.

    accepted: some computation halts within depth_cap (minimum N attached);
    rejected: the tree finished with no halting leaf (all paths cycle);
    undetermined: bounds were hit first.  Acceptance of the empty word
    follows the configured empty-word convention.
    """
    out = {}
    for length in range(bounds.word_length_cap + 1):
        for letters in product("01", repeat=length):
            w = "".join(letters)
            enum = enumerate_computations(
                breed, bounds, engine="om2", word=w, schedule_k=None,
                blank_background=blank_background)
            if enum.halting:
                out[w] = ("accepted", min(t.n for t in enum.halting))
            elif enum.outputs_complete:
                out[w] = ("rejected", "all computations diverge")
            else:
                out[w] = ("undetermined", "bounds hit")
    return out


def accepted_words(language: dict) -> frozenset[str]:
    return frozenset(w for w, (status, _x) in language.items()
                     if status == "accepted")


def purebred_check_om2(breed: Breed, bounds: EnumerationBounds) -> PurebredVerdict:
    """Like the no-input check but comparing bounded recognized languages."""
    if len(breed) == 1:
        return PurebredVerdict("purebred", detail="no proper non-empty subset")
    full = recognized_language_bounded(breed, bounds)
    if any(status == "undetermined" for status, _x in full.values()):
        return PurebredVerdict("unknown", detail="breed language hit bounds")
    target = accepted_words(full)
    incomplete = []
    for combo in _proper_subsets(breed):
        sub = breed.subset(combo)
        lang = recognized_language_bounded(sub, bounds)
        if any(status == "undetermined" for status, _x in lang.values()):
            incomplete.append(combo)
            continue
        if accepted_words(lang) == target:
            names = tuple(breed.members[i].name for i in combo)
            return PurebredVerdict("not_purebred", witness=names,
                                   detail=f"subset recognizes the same {len(target)} words")
    if incomplete:
        return PurebredVerdict("unknown",
                               detail=f"{len(incomplete)} subsets hit bounds")
    return PurebredVerdict("purebred", detail="no subset matches the language")


# --- intelligence tables ---------------------------------------------------------

def is_quasi_trivial(o2: int | None, breed_nontrivial: bool) -> bool:
    """A halting run of a non-trivial breed whose alive count at index 2 is 1."""
    return breed_nontrivial and o2 == 1


def label_quasi_trivial(traces) -> list[bool]:
    """Label each halting trace of one breed; the breed counts as non-trivial
    when any of its observed computations averages two or more alive members."""
    nontrivial = any(t.o_mean is not None and t.o_mean >= 2 for t in traces)
    return [is_quasi_trivial(t.o2, nontrivial) for t in traces]


def empirical_intelligence_tables(observations) -> dict:
    """Threshold-form tables from (iq, eq, exact) observations per breed.

    EQ(x) is the best floored o-mean among breeds whose longest observed
    computation reaches at least x rounds; IQ(z) the longest computation
    among breeds averaging at least z alive members.  The threshold form is
    what makes EQ(x) >= y and IQ(y) >= x equivalent on a fixed observation
    set.  Values are lower bounds unless every contributing observation was
    exact.
    """
    obs = [(int(iq), int(eq), bool(exact)) for iq, eq, exact in observations]
    eq_table = {}
    iq_table = {}
    for x in sorted({iq for iq, _eq, _x in obs}):
        hits = [(eq, exact) for iq, eq, exact in obs if iq >= x]
        best = max(e for e, _x in hits)
        eq_table[x] = {"value": best,
                       "exact": any(x2 for e, x2 in hits if e == best)}
    for z in sorted({eq for _iq, eq, _x in obs}):
        hits = [(iq, exact) for iq, eq, exact in obs if eq >= z]
        best = max(i for i, _x in hits)
        iq_table[z] = {"value": best,
                       "exact": any(x2 for i, x2 in hits if i == best)}
    return {"EQ": eq_table, "IQ": iq_table}
