"""Machine core: codec, stepping, standalone runs, tape words."""

import random

import pytest

from orchmach import catalog
from orchmach.machines import (BLANK, HALT, LEFT, MachineConfig,
                               MalformedCodeError, NondeterministicCodeError,
                               RIGHT, STAY, TuringMachine, UnencodableError,
                               decode_rule_index, encode_rule_index,
                               format_rule_index, parse_rule_index_text,
                               tape_word_of, tm_run, tm_run_slow, tm_step)


class TestCodec:
    def test_champion_decodes_to_published_table(self):
        m = decode_rule_index(catalog.CHAMPION_CODE)
        assert m.rule_count == 9
        assert m.rules[(0, 0)] == (1, 1, RIGHT)
        assert m.rules[(2, 1)] == (4, 0, LEFT)
        assert (4, 0) not in m.rules  # the halting hole
        assert m.states == frozenset(range(5))

    def test_smallest_valid_code(self):
        # one rule recreating its own trigger: decodes fine, never halts
        m = decode_rule_index((1, 0, 1))
        assert m.rules == {(0, 0): (0, 0, STAY)}
        r = tm_run(m, 10)
        assert not r.halted and r.steps == 10

    def test_champion_roundtrip(self):
        m = decode_rule_index(catalog.CHAMPION_CODE)
        assert encode_rule_index(m) == catalog.CHAMPION_CODE

    def test_encode_single_rule_machines(self):
        assert encode_rule_index(catalog.MACHINE_A) == (1, 0, 5)
        assert encode_rule_index(catalog.MACHINE_E) == (1, 0, 4)

    def test_encode_empty_machine(self):
        assert encode_rule_index(TuringMachine("z", {})) == (0,)

    def test_duplicate_from_index_rejected(self):
        with pytest.raises(NondeterministicCodeError):
            decode_rule_index((2, 0, 1, 0, 2))

    def test_truncated_code_rejected(self):
        with pytest.raises(MalformedCodeError):
            decode_rule_index((1, 0))
        with pytest.raises(MalformedCodeError):
            decode_rule_index(())

    def test_negative_entries_rejected(self):
        with pytest.raises(MalformedCodeError):
            decode_rule_index((1, 0, -4))

    def test_blank_machine_unencodable(self):
        with pytest.raises(UnencodableError):
            encode_rule_index(catalog.MACHINE_X)

    def test_roundtrip_random_machines(self):
        rng = random.Random(2024)
        for _ in range(200):
            n_states = rng.randint(1, 6)
            rules = {}
            for q in range(n_states):
                for s in (0, 1):
                    if rng.random() < 0.7:
                        rules[(q, s)] = (rng.randrange(n_states),
                                         rng.randrange(2),
                                         rng.randrange(3))
            m = TuringMachine("r", rules)
            again = decode_rule_index(encode_rule_index(m))
            assert again.rules == m.rules
            assert encode_rule_index(again) == encode_rule_index(m)


class TestTextFormat:
    def test_published_codes_verbatim(self):
        champ = "(9, 0, 11, 1,  15, 2, 17, 3,  11, 4,  23, 5,  24, 6,  3,  7, 21, 9,  0)"
        assert parse_rule_index_text(champ) == catalog.CHAMPION_CODE
        var = "( 9, 0, 11, 1,  15, 2, 17, 3, 1, 4, 23, 5, 24, 6, 3, 7, 21, 9, 0 )"
        assert parse_rule_index_text(var) == catalog.VARIANT_CODE

    def test_plain_and_newline_separated(self):
        assert parse_rule_index_text("1,0,4") == (1, 0, 4)
        assert parse_rule_index_text("1 0\n4") == (1, 0, 4)

    def test_garbage_rejected(self):
        with pytest.raises(MalformedCodeError):
            parse_rule_index_text("one, zero")
        with pytest.raises(MalformedCodeError):
            parse_rule_index_text("")

    def test_format_roundtrip(self):
        assert parse_rule_index_text(format_rule_index((1, 0, 4))) == (1, 0, 4)


class TestStep:
    def test_e_two_step_trace(self):
        c = MachineConfig()
        out = tm_step(catalog.MACHINE_E, c)
        assert out is c
        assert (c.state, c.head, c.read(), c.steps) == (0, 0, 1, 1)
        assert tm_step(catalog.MACHINE_E, c) is HALT
        assert (c.state, c.head, c.steps) == (0, 0, 1)  # untouched by the halt

    def test_no_rules_halts_immediately(self):
        c = MachineConfig()
        assert tm_step(TuringMachine("z", {}), c) is HALT
        assert c.steps == 0

    def test_champion_first_step(self):
        m = decode_rule_index(catalog.CHAMPION_CODE)
        c = MachineConfig()
        tm_step(m, c)
        assert (c.state, c.head) == (1, 1)
        assert c.tape[0] == 1


class TestRun:
    def test_infinite_loop_reaches_cap(self):
        r = tm_run(catalog.MACHINE_A, 1000)
        assert not r.halted and r.steps == 1000
        assert r.bb_steps is None

    def test_e_run(self):
        r = tm_run(catalog.MACHINE_E, 1000)
        assert (r.halted, r.steps, r.ones, r.tape_word) == (True, 1, 1, "1")
        # the halt pair reads a 1, so the scored halt write adds nothing
        assert (r.bb_steps, r.bb_ones) == (2, 1)

    def test_step_count_equals_transitions(self):
        # slow twin drives tm_step directly; both agree everywhere
        rng = random.Random(7)
        for _ in range(50):
            rules = {}
            for q in range(3):
                for s in (0, 1):
                    if rng.random() < 0.8:
                        rules[(q, s)] = (rng.randrange(3), rng.randrange(2),
                                         rng.randrange(3))
            m = TuringMachine("r", rules)
            fast = tm_run(m, 300)
            slow = tm_run_slow(m, 300)
            assert fast == slow

    def test_tape_support_stays_finite(self):
        rng = random.Random(11)
        for _ in range(30):
            rules = {(q, s): (rng.randrange(4), rng.randrange(2), rng.randrange(3))
                     for q in range(4) for s in (0, 1)}
            m = TuringMachine("r", rules)
            c = MachineConfig()
            for _ in range(100):
                if tm_step(m, c) is HALT:
                    break
            assert len([v for v in c.tape.values() if v != 0]) <= c.steps

    def test_cap_zero(self):
        r = tm_run(catalog.MACHINE_E, 0)
        assert not r.halted and r.steps == 0


class TestTapeWord:
    def test_window_between_extreme_ones(self):
        assert tape_word_of({0: 1, 2: 1}) == "101"

    def test_all_zero_is_empty(self):
        assert tape_word_of({}) == ""
        assert tape_word_of({3: 0}) == ""

    def test_blank_inside_window(self):
        assert tape_word_of({0: 1, 1: BLANK, 2: 1}, background=BLANK) == "1_1"
