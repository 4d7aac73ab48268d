"""Backend selection and the packed-table bridge to the kernels.

The compiled extension (orchmach._kernel, Cython) is preferred; the pure
Python twin (orchmach._kernel_py) is used when the extension is missing
or when ORCHMACH_PURE=1 is set.  Both expose the same kernel functions
and produce bitwise-identical results.
"""

from __future__ import annotations

import os
from array import array

from . import _kernel_py
from .machines import ONE, RunResult, SYMBOL_CHARS, TuringMachine

PolicyError = _kernel_py.PolicyError


def _load():
    if os.environ.get("ORCHMACH_PURE", "") not in ("", "0"):
        return _kernel_py
    try:
        from . import _kernel  # compiled extension
        return _kernel
    except ImportError:
        return _kernel_py


_impl = _load()
BACKEND_NAME = _impl.BACKEND_NAME


def get_kernel(name: str | None = None):
    """Return a kernel module by name ('compiled'/'pure'), default the active one."""
    if name is None:
        return _impl
    if name == "pure":
        return _kernel_py
    if name == "compiled":
        from . import _kernel
        return _kernel
    raise ValueError(f"unknown backend {name!r}")


ENGINE_MAX_STATE = 63


def pack_machine(m: TuringMachine):
    """Dense (state, symbol) tables for one machine: (targets, writes, moves, n_states)."""
    n_states = m.max_state + 1
    targets = array("i", [-1]) * (n_states * 3)
    writes = array("b", [0]) * (n_states * 3)
    moves = array("b", [0]) * (n_states * 3)
    for (q, s), (q2, w, mv) in m.rules.items():
        targets[q * 3 + s] = q2
        writes[q * 3 + s] = w
        moves[q * 3 + s] = mv
    return targets, writes, moves, n_states


def pack_members(members) -> dict:
    """Concatenated dense tables plus per-member state masks for om_run."""
    offsets = array("i", [0])
    targets = array("i")
    writes = array("b")
    moves = array("b")
    masks = array("Q")
    for m in members:
        if m.max_state > ENGINE_MAX_STATE:
            raise ValueError(
                f"{m.name}: engine supports states 0..{ENGINE_MAX_STATE} "
                f"(machine reaches {m.max_state})")
        t, w, mv, _n = pack_machine(m)
        targets.extend(t)
        writes.extend(w)
        moves.extend(mv)
        offsets.append(len(targets))
        mask = 0
        for q in m.states:
            mask |= 1 << q
        masks.append(mask)
    return {
        "n_members": len(members),
        "offsets": offsets,
        "targets": targets,
        "writes": writes,
        "moves": moves,
        "state_masks": masks,
    }


def tm_run(m: TuringMachine, cap: int, kernel=None) -> RunResult:
    """Standalone bounded run of one machine on the fast path."""
    impl = kernel or _impl
    targets, writes, moves, n_states = pack_machine(m)
    halted, steps, ones, _state, head, tape, origin = impl.tm_run_kernel(
        targets, writes, moves, n_states, cap)
    word = tape_word_from_buffer(tape)
    bb_steps = bb_ones = None
    if halted:
        bb_steps = steps + 1
        bb_ones = ones + (0 if tape[origin + head] == ONE else 1)
    return RunResult(halted, steps, ones, word, bb_steps, bb_ones)


def tape_word_from_buffer(tape: bytearray) -> str:
    lo = tape.find(1)
    if lo < 0:
        return ""
    hi = tape.rfind(1)
    return "".join(SYMBOL_CHARS[b] for b in tape[lo:hi + 1])


def om_run(packed: dict, tape0: bytearray, origin: int, head0: int,
           background: int, cap: int, policy_kind: int, seed: int,
           script, record_sel: bool, record_o: bool, rec_cap: int,
           kernel=None, **resume):
    impl = kernel or _impl
    return impl.om_run_kernel(
        packed["n_members"], packed["offsets"], packed["targets"],
        packed["writes"], packed["moves"], packed["state_masks"],
        tape0, origin, head0, background, cap,
        policy_kind, seed, script if script is not None else array("i"),
        record_sel, record_o, rec_cap, **resume)
