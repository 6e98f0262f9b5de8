import json

import pytest

from poet.cache import CompletionCache
from poet.evaluate import (
    EvalConfig,
    evaluate,
    recompute_from_traces,
    render_table,
)
from poet.gateway import MockGateway, RecordingGateway, ReplayGateway
from poet.gateway_types import SamplingConfig
from poet.pipeline import StrategyConfig
from poet.records import generate_synthetic


def fixtures(n=10, seed=0):
    problems = generate_synthetic(n, seed=seed)
    return problems, {p.id: p for p in problems}


def config(n_paths=8, **kwargs):
    defaults = dict(
        strategy=StrategyConfig("few_shot_poet"),
        sampling=SamplingConfig(n_paths=n_paths),
        routing="native_only",
    )
    defaults.update(kwargs)
    return EvalConfig(**defaults)


def test_mock_perfect_gives_full_accuracy():
    problems, by_id = fixtures(12)
    report = evaluate(problems, config(), MockGateway(by_id))
    assert report.accuracy == 1.0
    assert report.equation_prediction_accuracy == 1.0
    assert report.per_path_equation_accuracy == 1.0
    assert len(report.outcomes) == 12
    for outcome in report.outcomes:
        assert outcome.correct
        assert outcome.excluded_error_paths == 0
        assert outcome.equation_set_correct is True


def test_mock_always_error_gives_zero_accuracy_and_full_exclusion():
    problems, by_id = fixtures(6)
    report = evaluate(problems, config(), MockGateway(by_id, policy="always_error"))
    assert report.accuracy == 0.0
    for outcome in report.outcomes:
        assert outcome.excluded_error_paths == 8
        assert outcome.failure_histogram == {"ExtractionEmpty": 8}


def test_config_echo_hash_matches_inputs():
    problems, by_id = fixtures(2)
    cfg = config(n_paths=2)
    report = evaluate(problems, cfg, MockGateway(by_id))
    from poet.evaluate import config_echo

    blob, blob_hash = config_echo(cfg)
    assert report.config == blob
    assert report.config_hash == blob_hash


def test_accuracy_recomputable_from_traces(tmp_path):
    problems, by_id = fixtures(8)
    trace_path = tmp_path / "traces.jsonl"
    report = evaluate(
        problems,
        config(n_paths=4),
        MockGateway(by_id, policy="noisy", noise_rate=0.4, seed=3),
        trace_path=trace_path,
    )
    recomputed = recompute_from_traces(trace_path, tolerance=0.01)
    assert recomputed["problems"] == 8
    assert recomputed["accuracy"] == pytest.approx(report.accuracy)
    assert recomputed["equation_prediction_accuracy"] == pytest.approx(
        report.equation_prediction_accuracy
    )
    rows = [json.loads(l) for l in trace_path.read_text().splitlines()]
    assert len(rows) == 8 * 4
    assert all(r["prompt_sha256"] and r["asset_hash"] for r in rows)


def test_replay_determinism_two_eval_runs_identical(tmp_path):
    problems, by_id = fixtures(6, seed=9)
    cache_path = tmp_path / "cache.bin"
    recording = RecordingGateway(
        MockGateway(by_id, policy="noisy", noise_rate=0.3, seed=1), CompletionCache(cache_path)
    )
    cfg = config(n_paths=6)
    first = evaluate(problems, cfg, recording)

    def run_replay():
        gateway = ReplayGateway(CompletionCache(cache_path))
        return evaluate(problems, cfg, gateway)

    replay_a = run_replay()
    replay_b = run_replay()
    assert replay_a.outcomes == replay_b.outcomes
    assert replay_a.accuracy == replay_b.accuracy == first.accuracy
    assert replay_a.outcomes == first.outcomes


def test_voting_beats_single_path_under_noise():
    problems, by_id = fixtures(30, seed=21)
    noisy = dict(policy="noisy", noise_rate=0.2, seed=7)
    many = evaluate(problems, config(n_paths=20), MockGateway(by_id, **noisy))
    single = evaluate(problems, config(n_paths=1), MockGateway(by_id, **noisy))
    assert many.accuracy >= single.accuracy


def test_parallel_evaluation_matches_serial():
    problems, by_id = fixtures(8, seed=2)
    serial = evaluate(problems, config(n_paths=4), MockGateway(by_id))
    parallel = evaluate(problems, config(n_paths=4, parallelism=4), MockGateway(by_id))
    assert serial.outcomes == parallel.outcomes


def test_render_table_layout():
    problems, by_id = fixtures(4)
    report = evaluate(problems, config(n_paths=2), MockGateway(by_id))
    table = render_table([("poet", report)])
    assert "Method" in table and "Accuracy" in table
    assert "poet" in table
    assert "100.0%" in table


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        EvalConfig(strategy=StrategyConfig("few_shot_poet"), tolerance=0)
