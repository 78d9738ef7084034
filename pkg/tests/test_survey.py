import numpy as np
import pytest

from symsep.survey import control_state, run_survey, summarize, survey_state, write_survey_csv


def test_corpus_is_seeded():
    np.testing.assert_array_equal(survey_state(3, 42).matrix, survey_state(3, 42).matrix)
    assert not np.array_equal(survey_state(3, 42).matrix, survey_state(3, 43).matrix)


def test_controls_are_classical():
    records = run_survey([3], 1, 5, controls=6)
    assert all(r.verdict == "Classical" for r in records if r.kind == "control")
    assert control_state(3, 1).n_qubits == 3


def test_summary_counts():
    records = run_survey([2], 20, 11)
    s = summarize(records)
    assert s["total"] == 20 and sum(s["verdicts"].values()) == 20
    assert s["violations"] == 0


def test_parallel_matches_serial(tmp_path):
    serial = run_survey([2, 3], 6, 99, controls=2)
    parallel = run_survey([2, 3], 6, 99, controls=2, jobs=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_survey_csv(serial, a)
    write_survey_csv(parallel, b)
    assert a.read_bytes() == b.read_bytes()


def test_rejects_empty_count():
    with pytest.raises(ValueError):
        run_survey([2], 0, 1)


def test_single_qubit_records_have_no_pair_data():
    (rec,) = run_survey([1], 1, 3)
    assert rec.trace_sum is None and rec.concurrence is None
