"""On-disk formats: breed JSON, trace JSONL, selection dumps, experiment config.

Breed files carry each machine either as a rule-index code

    {"name": "cd", "machines": [{"name": "C", "code": [2, 0, 8, 2, 14]}, ...]}

or, for machines whose rules touch the blank symbol (which the binary
codec cannot express), as an explicit rule list

    {"name": "X", "rules": [[0, "0", 1, "0", "R"], ...]}

with symbols "0" / "1" / "_" and moves "L" / "S" / "R".
"""

from __future__ import annotations

import json
from pathlib import Path

from .engine import Breed, RandomPolicy, RunTrace, ScriptedPolicy
from .machines import (BLANK, LEFT, MOVE_CHARS, ONE, RIGHT, STAY,
                       SYMBOL_CHARS, TuringMachine, ZERO,
                       decode_rule_index, encode_rule_index)

_SYMBOLS = {"0": ZERO, "1": ONE, "_": BLANK, "e": BLANK}
_MOVES = {"L": LEFT, "S": STAY, "R": RIGHT}


def machine_to_obj(m: TuringMachine) -> dict:
    if m.uses_blank():
        rules = [[q, SYMBOL_CHARS[s], q2, SYMBOL_CHARS[w], MOVE_CHARS[mv]]
                 for (q, s), (q2, w, mv) in sorted(m.rules.items())]
        return {"name": m.name, "rules": rules}
    return {"name": m.name, "code": list(encode_rule_index(m))}


def machine_from_obj(obj: dict) -> TuringMachine:
    name = obj.get("name")
    if not name:
        raise ValueError("machine entry lacks a name")
    if ("code" in obj) == ("rules" in obj):
        raise ValueError(f"machine {name!r} needs exactly one of 'code' or 'rules'")
    if "code" in obj:
        m = decode_rule_index(obj["code"])
        return TuringMachine(name=name, rules=m.rules,
                             state_count_hint=m.state_count_hint)
    rules = {}
    for entry in obj["rules"]:
        q, s, q2, w, mv = entry
        key = (int(q), _symbol(s))
        if key in rules:
            raise ValueError(f"machine {name!r}: duplicate rule for {key}")
        rules[key] = (int(q2), _symbol(w), _move(mv))
    return TuringMachine(name=name, rules=rules)


def _symbol(tok) -> int:
    if isinstance(tok, int):
        if tok in (ZERO, ONE):
            return tok
        raise ValueError(f"bad symbol {tok!r}")
    try:
        return _SYMBOLS[str(tok).strip()]
    except KeyError:
        raise ValueError(f"bad symbol {tok!r}") from None


def _move(tok) -> int:
    try:
        return _MOVES[str(tok).strip().upper()]
    except KeyError:
        raise ValueError(f"bad move {tok!r} (want L, S or R)") from None


def breed_to_obj(breed: Breed) -> dict:
    return {"name": breed.name,
            "machines": [machine_to_obj(m) for m in breed.members]}


def breed_from_obj(obj: dict) -> Breed:
    if "machines" not in obj or not obj["machines"]:
        raise ValueError("breed file needs a non-empty 'machines' list")
    members = tuple(machine_from_obj(mo) for mo in obj["machines"])
    return Breed(obj.get("name", "breed"), members)


def save_breed(breed: Breed, path) -> None:
    Path(path).write_text(json.dumps(breed_to_obj(breed), indent=2) + "\n")


def load_breed(path) -> Breed:
    """Load a breed from a JSON file, or from the catalog via '@name'."""
    text = str(path)
    if text.startswith("@"):
        from . import catalog
        return catalog.get_breed(text[1:])
    return breed_from_obj(json.loads(Path(path).read_text()))


# --- trace records -----------------------------------------------------------

def trace_record(trace: RunTrace, policy) -> dict:
    """One JSONL record summarising a run."""
    if isinstance(policy, RandomPolicy):
        pol = {"kind": "seeded_random", "seed": policy.seed}
    elif isinstance(policy, ScriptedPolicy):
        pol = {"kind": "scripted", "script": list(policy.members)}
    else:
        pol = {"kind": type(policy).__name__}
    return {
        "breed": trace.breed_name,
        "policy": pol,
        "N": trace.n if trace.halted else None,
        "halted": trace.halted,
        "o2": trace.o2,
        "o_mean_floor": trace.o_mean_floor,
        "ones": trace.ones,
        "selections_total": trace.selections_total,
        "per_member_selected_counts": list(trace.selected_counts),
    }


def append_jsonl(record: dict, path) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(record) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def dump_selections(trace: RunTrace, breed: Breed, path) -> None:
    """Full selection log: one '(step, member, from-index, to-index)' row per
    selection.  Rules touching the blank symbol have no integer indices and
    are written as -1,-1."""
    if trace.selections is None:
        raise ValueError("trace was run without selection recording")
    with open(path, "w") as fh:
        fh.write("step,member,from_index,to_index\n")
        cfgs = _replay_rules(breed, trace)
        for step, (member, rule) in enumerate(zip(trace.selections, cfgs)):
            if rule is None:
                fh.write(f"{step},{member},-1,-1\n")
            else:
                (q, s), (q2, w, mv) = rule
                fh.write(f"{step},{member},{2 * q + s},{6 * q2 + 3 * w + mv}\n")


def _replay_rules(breed: Breed, trace: RunTrace):
    """Recover the rule fired at each logged selection by re-walking the run."""
    from .engine import SharedConfig

    word = trace.word or ""
    cfg = SharedConfig.initial(breed, word)
    out = []
    for member in trace.selections:
        entries = applicable_rules_after_removals(breed, cfg)
        rule = None
        for i, r in entries:
            if i == member:
                rule = r
                break
        out.append(rule if rule is None or not _uses_blank_rule(rule) else None)
        _exec_entry(breed, cfg, member)
    return out


def applicable_rules_after_removals(breed: Breed, cfg):
    from .engine import applicable_rules

    for i, m in enumerate(breed.members):
        if cfg.alive[i] and cfg.state not in m.states:
            cfg.alive[i] = False
    return applicable_rules(breed, cfg)


def _uses_blank_rule(rule) -> bool:
    (q, s), (q2, w, mv) = rule
    return s == BLANK or w == BLANK


def _exec_entry(breed: Breed, cfg, member: int) -> None:
    f = cfg.control
    q2, w, mv = breed.members[member].rules[f]
    if w == cfg.background:
        cfg.tape.pop(cfg.head, None)
    else:
        cfg.tape[cfg.head] = w
    cfg.head += mv - 1
    cfg.state = q2
    cfg.n += 1
