# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: the bitwise twin of orchmach._kernel_py.

Any semantic change here must land in _kernel_py too; the parity tests
compare full traces between the two backends.
"""

from array import array

from orchmach._kernel_py import PolicyError

ctypedef unsigned long long u64

BACKEND_NAME = "compiled"

STOP_CAP = 0
STOP_HALTED = 1
STOP_SCRIPT_END = 2

POLICY_RANDOM = 0
POLICY_SCRIPTED = 1
POLICY_PATH = 2
POLICY_PREFER = 3

cdef int _STOP_CAP = 0
cdef int _STOP_HALTED = 1
cdef int _STOP_SCRIPT_END = 2
cdef int _POLICY_RANDOM = 0
cdef int _POLICY_SCRIPTED = 1
cdef int _POLICY_PATH = 2
cdef int _POLICY_PREFER = 3


cdef inline u64 _sm64(u64* state) nogil:
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


def sm64_next(state):
    """Python-visible single draw, for cross-checking the stream."""
    cdef u64 s = state
    cdef u64 v = _sm64(&s)
    return s, v


def tm_run_kernel(targets, writes, moves, int n_states, long long cap):
    cdef int[::1] tg = targets
    cdef signed char[::1] wr = writes
    cdef signed char[::1] mv = moves
    cdef Py_ssize_t size = 1 << 12
    tape = bytearray(size)
    cdef unsigned char[::1] tp = tape
    cdef Py_ssize_t head = size >> 1
    cdef Py_ssize_t origin = head
    cdef long long steps = 0, ones = 0
    cdef int state = 0, sym = 0, idx, tgt, w
    cdef bint running = True
    cdef Py_ssize_t half

    while running:
        with nogil:
            while steps < cap:
                if state >= n_states:
                    running = False
                    break
                idx = state * 3 + sym
                tgt = tg[idx]
                if tgt < 0:
                    running = False
                    break
                w = wr[idx]
                if w != sym:
                    if w == 1:
                        ones += 1
                    elif sym == 1:
                        ones -= 1
                    tp[head] = <unsigned char>w
                head += mv[idx] - 1
                state = tgt
                steps += 1
                if head <= 0 or head >= size - 1:
                    break
                sym = tp[head]
            else:
                running = False
        if running:
            half = size
            tape = bytearray(half >> 1) + tape + bytearray(half >> 1)
            tp = tape
            size = len(tape)
            head += half >> 1
            origin += half >> 1
            sym = tp[head]
    halted = steps < cap
    return halted, steps, ones, state, head - origin, tape, origin


def om_run_kernel(int n_members, offsets, targets, writes, moves, state_masks,
                  tape0, long long origin_in, long long head0, int background,
                  long long cap, int policy_kind, seed, script,
                  bint record_sel, bint record_o, long long rec_cap,
                  long long alive0=-1, int state0=0, long long n0=0,
                  int o2_0=-1, long long o_sum0=0, long long o_len0=0):
    cdef int[::1] offs = offsets
    cdef int[::1] tg = targets
    cdef signed char[::1] wr = writes
    cdef signed char[::1] mv = moves
    cdef u64[::1] masks = state_masks
    cdef int[::1] scr
    if len(script) > 0:
        scr = script
    else:
        scr = array("i", [0])
    cdef Py_ssize_t script_len = len(script)

    tape = bytearray(tape0)
    cdef unsigned char[::1] tp = tape
    cdef Py_ssize_t size = len(tape)
    cdef Py_ssize_t origin = origin_in
    cdef Py_ssize_t head = origin + head0

    cdef long long n = n0, sel_total = 0, o_sum = o_sum0, o_len = o_len0
    cdef long long ones = tape.count(1)
    cdef int o2 = o2_0
    cdef int state = state0, sym = tp[head]
    alive_arr = bytearray(n_members)
    for m_init in range(n_members):
        alive_arr[m_init] = 1 if (alive0 < 0 or (alive0 >> m_init) & 1) else 0
    cdef int alive_count = sum(alive_arr)
    cdef unsigned char[::1] alive = alive_arr
    sel_counts = array("q", [0]) * n_members
    cdef long long[::1] scnt = sel_counts

    sel_rec = array("i", [0]) * (rec_cap if record_sel else 1)
    o_rec = array("i", [0]) * (rec_cap if record_o else 1)
    cdef int[::1] srec = sel_rec
    cdef int[::1] orec = o_rec

    u_arr = array("i", [0]) * n_members
    cdef int[::1] u_members = u_arr
    cdef int u_n, m, i, pick, want, idx, w, base
    cdef u64 rng = <u64>seed
    cdef u64 val
    cdef Py_ssize_t script_pos = 0
    cdef int stop = _STOP_CAP
    cdef bint running = True
    cdef int policy_fault = -1
    cdef long long fault_round = 0, fault_val = 0
    cdef Py_ssize_t half

    while running:
        with nogil:
            while alive_count > 0 and n < cap:
                if n >= 2:
                    o_sum += alive_count
                    o_len += 1
                    if n == 2:
                        o2 = alive_count
                    if record_o and o_len <= rec_cap:
                        orec[o_len - 1] = alive_count
                u_n = 0
                for m in range(n_members):
                    if not alive[m]:
                        continue
                    if state > 63 or not (masks[m] >> state) & 1:
                        alive[m] = 0
                        alive_count -= 1
                        continue
                    if tg[offs[m] + state * 3 + sym] >= 0:
                        u_members[u_n] = m
                        u_n += 1
                if u_n == 0:
                    for m in range(n_members):
                        alive[m] = 0
                    alive_count = 0
                    n += 1
                    stop = _STOP_HALTED
                    running = False
                    break
                if policy_kind == _POLICY_RANDOM:
                    val = _sm64(&rng)
                    pick = <int>(val % <u64>u_n)
                elif policy_kind == _POLICY_SCRIPTED:
                    if script_pos >= script_len:
                        stop = _STOP_SCRIPT_END
                        running = False
                        break
                    want = scr[script_pos]
                    script_pos += 1
                    pick = -1
                    for i in range(u_n):
                        if u_members[i] == want:
                            pick = i
                            break
                    if pick < 0:
                        policy_fault = 0
                        fault_round = n
                        fault_val = want
                        running = False
                        break
                elif policy_kind == _POLICY_PATH:
                    if script_pos >= script_len:
                        stop = _STOP_SCRIPT_END
                        running = False
                        break
                    pick = scr[script_pos]
                    script_pos += 1
                    if pick < 0 or pick >= u_n:
                        policy_fault = 1
                        fault_round = n
                        fault_val = pick
                        running = False
                        break
                else:
                    want = scr[0]
                    pick = 0
                    for i in range(u_n):
                        if u_members[i] == want:
                            pick = i
                            break
                m = u_members[pick]
                scnt[m] += 1
                sel_total += 1
                if record_sel and sel_total <= rec_cap:
                    srec[sel_total - 1] = m
                base = offs[m]
                idx = base + state * 3 + sym
                w = wr[idx]
                if w != sym:
                    if w == 1:
                        ones += 1
                    elif sym == 1:
                        ones -= 1
                    tp[head] = <unsigned char>w
                head += mv[idx] - 1
                state = tg[idx]
                n += 1
                if head <= 0 or head >= size - 1:
                    break
                sym = tp[head]
            else:
                running = False
        if policy_fault == 0:
            raise PolicyError(
                f"scripted member {fault_val} offers no applicable rule at round {fault_round}")
        if policy_fault == 1:
            raise PolicyError(
                f"choice path index {fault_val} out of range ({u_n} applicable) at round {fault_round}")
        if running:
            half = size
            pad = bytes([background]) * (half >> 1)
            tape = bytearray(pad) + tape + bytearray(pad)
            tp = tape
            size = len(tape)
            head += half >> 1
            origin += half >> 1
            sym = tp[head]

    alive_mask = 0
    for m in range(n_members):
        if alive[m]:
            alive_mask |= 1 << m
    out_sel = sel_rec[:min(sel_total, rec_cap)] if record_sel else None
    out_o = o_rec[:min(o_len, rec_cap)] if record_o else None
    return (stop, n, sel_total, ones, o2, o_sum, o_len, state, head - origin,
            tape, origin, alive_mask, sel_counts, out_sel, out_o, rng)
