"""Pure-Python hot kernels.

Same packed-table contract as the compiled module (orchmach._kernel);
either can serve as the engine backend.  Keep the two in lockstep: the
test suite asserts bitwise-identical traces between them.

Packed machine tables are dense over (state, symbol): index q*3+s holds
the target state in `targets` (-1 = no rule) with parallel `writes` and
`moves` entries.  Moves are 0/1/2 for left/stay/right, so the head delta
is move-1.

The selection RNG is SplitMix64 with selection index = value % len(U);
the compiled kernel implements the identical sequence in C, which is why
neither backend uses the stdlib random module here.
"""

from __future__ import annotations

from array import array

_M64 = (1 << 64) - 1

# om_run stop codes
STOP_CAP = 0
STOP_HALTED = 1
STOP_SCRIPT_END = 2

# policy kinds
POLICY_RANDOM = 0
POLICY_SCRIPTED = 1
POLICY_PATH = 2
POLICY_PREFER = 3

BACKEND_NAME = "pure"


class PolicyError(ValueError):
    """Scripted selection asked for a member or branch not offered in U."""


def sm64_next(state: int) -> tuple[int, int]:
    """One SplitMix64 draw: returns (new_state, value)."""
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    z ^= z >> 31
    return state, z


def tm_run_kernel(targets, writes, moves, n_states, cap):
    """Standalone bounded run on the all-zero tape.

    Returns (halted, steps, ones, state, head_abs, tape, origin) with the
    final tape as a bytearray and `origin` the buffer index of position 0.
    """
    size = 1 << 12
    tape = bytearray(size)
    head = size >> 1
    origin = head
    state = 0
    steps = 0
    ones = 0
    sym = 0
    while steps < cap:
        if state >= n_states:
            break
        idx = state * 3 + sym
        tgt = targets[idx]
        if tgt < 0:
            break
        w = writes[idx]
        if w != sym:
            if w == 1:
                ones += 1
            elif sym == 1:
                ones -= 1
            tape[head] = w
        head += moves[idx] - 1
        state = tgt
        steps += 1
        if head <= 0 or head >= len(tape) - 1:
            grow = len(tape)
            tape = bytearray(grow >> 1) + tape + bytearray(grow >> 1)
            head += grow >> 1
            origin += grow >> 1
        sym = tape[head]
    halted = steps < cap
    return halted, steps, ones, state, head - origin, tape, origin


def om_run_kernel(n_members, offsets, targets, writes, moves, state_masks,
                  tape0, origin, head0, background, cap,
                  policy_kind, seed, script,
                  record_sel, record_o, rec_cap,
                  alive0=-1, state0=0, n0=0, o2_0=-1, o_sum0=0, o_len0=0):
    """Shared-control orchestrated run (no-input and same-input flavours).

    Round semantics: members whose state set cannot hold the current
    control state are dropped; members merely lacking a rule for the
    current (state, symbol) stay and idle; one applicable rule is chosen
    and executed once on the shared configuration; if no member offers a
    rule the whole breed halts (the final round still counts).

    Returns (stop, n, sel_total, ones, o2, o_sum, o_len, state, head_abs,
    tape, origin, alive_mask, sel_counts, sel_rec, o_rec).
    """
    tape = bytearray(tape0)
    head = origin + head0
    state = state0
    n = n0
    sel_total = 0
    ones = tape.count(1)
    o2 = o2_0
    o_sum = o_sum0
    o_len = o_len0
    alive = bytearray(
        1 if (alive0 < 0 or (alive0 >> m) & 1) else 0 for m in range(n_members))
    alive_count = sum(alive)
    sel_counts = array("q", [0]) * n_members
    sel_rec = array("i") if record_sel else None
    o_rec = array("i") if record_o else None
    u_members = array("i", [0]) * n_members
    rng = seed & _M64
    script_pos = 0
    stop = STOP_CAP
    sym = tape[head]

    while alive_count > 0 and n < cap:
        if n >= 2:
            o_sum += alive_count
            o_len += 1
            if n == 2:
                o2 = alive_count
            if record_o and o_len <= rec_cap:
                o_rec.append(alive_count)
        # drop members that cannot hold the control state, then collect U
        u_n = 0
        for m in range(n_members):
            if not alive[m]:
                continue
            if state > 63 or not (state_masks[m] >> state) & 1:
                alive[m] = 0
                alive_count -= 1
                continue
            base = offsets[m]
            if targets[base + state * 3 + sym] >= 0:
                u_members[u_n] = m
                u_n += 1
        if u_n == 0:
            # nobody can move: every remaining member halts, round still counts
            for m in range(n_members):
                alive[m] = 0
            alive_count = 0
            n += 1
            stop = STOP_HALTED
            break
        if policy_kind == POLICY_RANDOM:
            rng, val = sm64_next(rng)
            pick = val % u_n
        elif policy_kind == POLICY_SCRIPTED:
            if script_pos >= len(script):
                stop = STOP_SCRIPT_END
                break
            want = script[script_pos]
            script_pos += 1
            pick = -1
            for i in range(u_n):
                if u_members[i] == want:
                    pick = i
                    break
            if pick < 0:
                raise PolicyError(
                    f"scripted member {want} offers no applicable rule at round {n}")
        elif policy_kind == POLICY_PATH:
            if script_pos >= len(script):
                stop = STOP_SCRIPT_END
                break
            pick = script[script_pos]
            script_pos += 1
            if pick < 0 or pick >= u_n:
                raise PolicyError(
                    f"choice path index {pick} out of range ({u_n} applicable) at round {n}")
        else:  # POLICY_PREFER
            want = script[0]
            pick = 0
            for i in range(u_n):
                if u_members[i] == want:
                    pick = i
                    break
        chosen = u_members[pick]
        sel_counts[chosen] += 1
        sel_total += 1
        if record_sel and sel_total <= rec_cap:
            sel_rec.append(chosen)
        base = offsets[chosen]
        idx = base + state * 3 + sym
        w = writes[idx]
        if w != sym:
            if w == 1:
                ones += 1
            elif sym == 1:
                ones -= 1
            tape[head] = w
        head += moves[idx] - 1
        state = targets[idx]
        n += 1
        if head <= 0 or head >= len(tape) - 1:
            grow = len(tape)
            pad = bytes([background]) * (grow >> 1)
            tape = bytearray(pad) + tape + bytearray(pad)
            head += grow >> 1
            origin += grow >> 1
        sym = tape[head]

    alive_mask = 0
    for m in range(n_members):
        if alive[m]:
            alive_mask |= 1 << m
    return (stop, n, sel_total, ones, o2, o_sum, o_len, state, head - origin,
            tape, origin, alive_mask, sel_counts, sel_rec, o_rec, rng)
