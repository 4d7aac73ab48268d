"""Breed analysis: enumeration vs the fast engine, verdicts, intelligence
quantities, purebred checks, bounded languages, intelligence tables."""

import random

from orchmach import catalog
from orchmach.analysis import (EnumerationBounds, accepted_words, breed_iq_eq,
                               divergence_by_schedule, empirical_intelligence_tables,
                               enumerate_computations, is_quasi_trivial,
                               label_quasi_trivial, machine_iq_eq,
                               purebred_check_om1, purebred_check_om2,
                               recognized_language_bounded, replay_path,
                               w_iq_eq)
from orchmach.engine import Breed, RandomPolicy, ScriptedPolicy, om2_run
from orchmach.generators import random_breed, random_uniform_breed
from orchmach.machines import RIGHT, TuringMachine


class TestEnumerate:
    def test_cd_four_computations_certified(self, breeds, small_bounds):
        enum = enumerate_computations(breeds["cd"], small_bounds)
        assert enum.verdict.kind == "certified_convergent"
        assert len(enum.halting) == 4
        assert all(t.n == 3 for t in enum.halting)
        assert enum.outputs == {"", "1", "11"}
        assert enum.outputs_complete

    def test_enumerated_paths_replay_on_fast_engine(self, breeds, small_bounds):
        # the slow tree walker and the kernel must tell the same story
        for breed_name in ("cd", "cdg"):
            enum = enumerate_computations(breeds[breed_name], small_bounds)
            for t in enum.halting:
                trace = replay_path(breeds[breed_name], t.path)
                assert trace.halted
                assert (trace.n, trace.tape_word, trace.ones, trace.o2) == \
                       (t.n, t.tape_word, t.ones, t.o2)

    def test_replay_cross_check_random_breeds(self, small_bounds):
        rng = random.Random(77)
        for i in range(20):
            breed = random_breed(rng, rng.randint(1, 3), 2, f"x{i}")
            enum = enumerate_computations(breed, small_bounds, schedule_k=None)
            for t in list(enum.halting)[:10]:
                trace = replay_path(breed, t.path)
                assert (trace.n, trace.tape_word, trace.o_mean_floor) == \
                       (t.n, t.tape_word, t.o_mean_floor)

    def test_ab_divergent_with_cycle(self, breeds, small_bounds):
        enum = enumerate_computations(breeds["ab"], small_bounds)
        assert enum.verdict.kind == "divergent"
        assert enum.cycles  # the leftward walker loops over fresh zeros

    def test_ej_divergent_within_few_nodes(self, breeds, small_bounds):
        enum = enumerate_computations(breeds["ej"], small_bounds)
        assert enum.verdict.kind == "divergent"
        assert enum.verdict.witness[0] == "cycle"
        assert enum.nodes <= 1000

    def test_node_cap_gives_unknown(self, breeds):
        bounds = EnumerationBounds(depth_cap=40, node_cap=2)
        enum = enumerate_computations(breeds["cd"], bounds, schedule_k=None)
        assert enum.truncated and enum.verdict.kind == "unknown"

    def test_schedule_witness_for_ab(self, breeds):
        witness = divergence_by_schedule(breeds["ab"], 10_000)
        assert witness == (0, 10_000)  # the rightward writer never halts

    def test_o_seq_non_increasing_along_paths(self, small_bounds):
        rng = random.Random(123)
        for i in range(15):
            breed = random_breed(rng, 3, rng.randint(1, 3), f"m{i}")
            enum = enumerate_computations(breed, small_bounds, schedule_k=None)
            for t in enum.halting:
                trace = replay_path(breed, t.path)
                o = trace.o_seq
                assert all(o[j] >= o[j + 1] for j in range(len(o) - 1))


class TestIqEq:
    def test_cd_exact(self, breeds, small_bounds):
        rep = breed_iq_eq(breeds["cd"], small_bounds)
        assert (rep.iq_lower, rep.eq_lower, rep.exact) == (3, 2, True)

    def test_no_rule_singleton(self, small_bounds):
        b = Breed("j", (catalog.MACHINE_J,))
        rep = breed_iq_eq(b, small_bounds)
        assert (rep.iq_lower, rep.eq_lower, rep.exact) == (1, 0, True)

    def test_divergent_breed_reports_no_halting(self, breeds, small_bounds):
        rep = breed_iq_eq(breeds["ej"], small_bounds)
        assert not rep.found_halting

    def test_witnesses_attached(self, breeds, small_bounds):
        rep = breed_iq_eq(breeds["cd"], small_bounds)
        assert rep.witnesses and rep.witnesses[0].n == 3

    def test_machine_pool_variant(self, breeds, small_bounds):
        rep = machine_iq_eq("C", [breeds["cd"], breeds["cdg"]], small_bounds)
        assert rep.found_halting and rep.iq_lower == 3 and not rep.exact
        none = machine_iq_eq("nosuch", [breeds["cd"]], small_bounds)
        assert not none.found_halting


class TestPurebredOm1:
    def test_cd_purebred_with_expected_sets(self, breeds, small_bounds):
        cd = breeds["cd"]
        assert enumerate_computations(cd, small_bounds).outputs == {"", "1", "11"}
        c_only = enumerate_computations(cd.subset([0]), small_bounds)
        d_only = enumerate_computations(cd.subset([1]), small_bounds)
        assert c_only.outputs == {""} and d_only.outputs == {"11"}
        assert purebred_check_om1(cd, small_bounds).kind == "purebred"

    def test_cdg_witness_cd(self, breeds, small_bounds):
        verdict = purebred_check_om1(breeds["cdg"], small_bounds)
        assert verdict.kind == "not_purebred"
        assert verdict.witness == ("C", "D")

    def test_singleton_purebred(self, small_bounds):
        assert purebred_check_om1(Breed("c", (catalog.MACHINE_C,)),
                                  small_bounds).kind == "purebred"

    def test_divergent_breed_unknown(self, breeds, small_bounds):
        assert purebred_check_om1(breeds["ej"], small_bounds).kind == "unknown"

    def test_tight_bounds_unknown(self, breeds):
        bounds = EnumerationBounds(depth_cap=60, node_cap=2)
        assert purebred_check_om1(breeds["cd"], bounds).kind == "unknown"


class TestLanguage:
    def test_x_accepts_alternating_words(self, small_bounds):
        x = Breed("x", (catalog.MACHINE_X,))
        lang = recognized_language_bounded(x, small_bounds)
        assert accepted_words(lang) == {"01", "0101"}
        assert lang["0110"][0] == "rejected"
        assert lang[""][0] == "rejected"  # zero-background empty-word convention

    def test_lambda_accepted_under_blank_background(self, small_bounds):
        x = Breed("x", (catalog.MACHINE_X,))
        lang = recognized_language_bounded(x, small_bounds, blank_background=True)
        assert lang[""] == ("accepted", 1)

    def test_xy_gains_0110(self, breeds, small_bounds):
        lang = recognized_language_bounded(breeds["xy"], small_bounds)
        acc = accepted_words(lang)
        assert "0110" in acc and "01" in acc and "10" in acc

    def test_union_inclusion_on_xy(self, breeds, small_bounds):
        xy = breeds["xy"]
        both = accepted_words(recognized_language_bounded(xy, small_bounds))
        x_only = accepted_words(
            recognized_language_bounded(xy.subset([0]), small_bounds))
        y_only = accepted_words(
            recognized_language_bounded(xy.subset([1]), small_bounds))
        assert x_only | y_only <= both

    def test_union_inclusion_via_scripted_member(self, small_bounds):
        """A member accepting w alone in b transitions drags the whole breed
        to a halt in b+1 rounds when every member matches the same controls."""
        rng = random.Random(2025)
        checked = 0
        for i in range(80):
            breed = random_uniform_breed(rng, rng.randint(2, 3), 2, f"u{i}")
            word = "".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
            for j in range(len(breed)):
                solo = om2_run(breed.subset([j]), word, RandomPolicy(0), 40)
                if not solo.halted:
                    continue
                b_steps = solo.selections_total
                joint = om2_run(breed, word,
                                ScriptedPolicy((j,) * b_steps), b_steps + 1)
                assert joint.halted and joint.n <= b_steps + 1
                checked += 1
        assert checked >= 50


class TestPurebredOm2:
    def test_xy_purebred(self, breeds, small_bounds):
        assert purebred_check_om2(breeds["xy"], small_bounds).kind == "purebred"

    def test_xxpy_not_purebred(self, breeds):
        bounds = EnumerationBounds(depth_cap=20, node_cap=20_000, word_length_cap=3)
        verdict = purebred_check_om2(breeds["xxpy"], bounds)
        assert verdict.kind == "not_purebred"
        assert set(verdict.witness) == {"X", "Y"}

    def test_singleton_purebred(self, small_bounds):
        x = Breed("x", (catalog.MACHINE_X,))
        assert purebred_check_om2(x, small_bounds).kind == "purebred"


class TestWIqEq:
    def test_x_on_0101(self, small_bounds):
        x = Breed("x", (catalog.MACHINE_X,))
        rep = w_iq_eq(x, "0101", small_bounds)
        assert rep.found_halting and rep.iq_lower >= 4

    def test_xy_on_01(self, breeds, small_bounds):
        rep = w_iq_eq(breeds["xy"], "01", small_bounds)
        assert rep.iq_lower >= 2


class TestTables:
    def test_cd_table(self, breeds, small_bounds):
        rep = breed_iq_eq(breeds["cd"], small_bounds)
        tables = empirical_intelligence_tables(
            [(rep.iq_lower, rep.eq_lower, rep.exact)])
        assert tables["IQ"][2]["value"] == 3
        assert tables["EQ"][3]["value"] == 2

    def test_consistency_on_random_observation_sets(self):
        rng = random.Random(4242)
        for _ in range(50):
            obs = [(rng.randint(1, 30), rng.randint(0, 8), rng.random() < 0.5)
                   for _ in range(rng.randint(1, 12))]
            tables = empirical_intelligence_tables(obs)
            eq_t = {k: v["value"] for k, v in tables["EQ"].items()}
            iq_t = {k: v["value"] for k, v in tables["IQ"].items()}

            def eq_at(x):
                vals = [v for k, v in eq_t.items() if k >= x] or \
                       [v for k, v in eq_t.items()]
                hits = [e for i, e, _x in obs if i >= x]
                return max(hits) if hits else None

            def iq_at(y):
                hits = [i for i, e, _x in obs if e >= y]
                return max(hits) if hits else None

            for x in range(0, 32):
                for y in range(0, 10):
                    lhs = eq_at(x)
                    rhs = iq_at(y)
                    assert ((lhs is not None and lhs >= y)
                            == (rhs is not None and rhs >= x))

    def test_quasi_trivial_labeling(self):
        assert is_quasi_trivial(1, True)
        assert not is_quasi_trivial(1, False)
        assert not is_quasi_trivial(2, True)
        assert not is_quasi_trivial(None, True)

    def test_quasi_trivial_fires_on_mixed_state_counts(self, small_bounds):
        """A member working in states the others lack strands them after its
        first move; runs following it have a single survivor from round two,
        while runs following the close pair keep two alive to the end."""
        loner = TuringMachine("loner", {(0, 0): (5, 1, RIGHT),
                                        (5, 0): (6, 1, RIGHT)})
        breed = Breed("mix", (loner, catalog.MACHINE_C, catalog.MACHINE_D))
        enum = enumerate_computations(breed, small_bounds, schedule_k=None)
        traces = list(enum.halting)
        labels = label_quasi_trivial(traces)
        assert {t.o2 for t in traces} == {1, 2}
        assert any(t.o_mean == 2 for t in traces)   # the breed is non-trivial
        assert [t.o2 for t, lab in zip(traces, labels) if lab] == [1]
