"""
시뮬레이션 실험 하네스 단위 테스트
지표, 실험 설정, 결과 집계/출력, 반복 실행의 결정성을 검증합니다.
"""

import sys
import os
import math
import numpy as np
import pandas as pd
import pytest

# 프로젝트 루트를 Python 경로에 추가
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from core.errors import InputError, NumericalFailure, StorageError
from bench import (
    ExperimentConfig,
    MethodRecord,
    emit_results,
    format_summary,
    load_experiment_config,
    load_result_json,
    prediction_error,
    read_records_csv,
    run_experiment,
    step_mae,
    step_rmse,
    summarize,
)
from bench.metrics import fmean, fmedian
from bench.results import plot_path, records_to_frame


def _small_config(**overrides):
    values = dict(
        scenario="A",
        q=3,
        n=12,
        T=40,
        kappas=[0.5],
        replications=2,
        seed=3,
        lambda_grid=[0.1, 1.0],
        folds=2,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def _record(replication, method, pe, failed=False, D_sel=None, mise=None):
    return MethodRecord(
        setting="s",
        replication=replication,
        method=method,
        pe=pe,
        failed=failed,
        D_sel=D_sel,
        mise=mise or [],
    )


@pytest.mark.unit
class TestMetrics:
    """PE, 시점별 RMSE/MAE, 집계 평균"""

    def test_prediction_error(self):
        assert prediction_error([[1.0, 2.0]], [[0.0, 0.0]]) == pytest.approx(2.5)

    def test_step_errors(self):
        pred = np.array([[1.0, 1.0], [0.0, 2.0]])
        act = np.zeros((2, 2))
        assert np.allclose(step_rmse(pred, act), [1.0, np.sqrt(2.0)])
        assert np.allclose(step_mae(pred, act), [1.0, 1.0])

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            prediction_error(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_fmean_skips_nonfinite(self):
        assert fmean([1.0, float("nan"), None, 3.0]) == 2.0
        assert fmean([float("nan")]) is None
        assert fmedian([5.0, 1.0, float("inf"), 3.0]) == 3.0

    def test_fmean_exact_sum(self):
        assert fmean([1e16, 1.0, -1e16]) == pytest.approx(1.0 / 3.0)


@pytest.mark.unit
class TestExperimentConfig:
    """실험 설정 검증과 YAML 로드"""

    def test_defaults(self):
        config = ExperimentConfig()
        assert config.n_test == 20
        assert config.replications == 10
        assert config.tuning_D_max == 1
        assert config.anh_basis == 10

    def test_large_basis_for_q21(self):
        assert ExperimentConfig(q=21).anh_basis == 20

    def test_label(self):
        assert _small_config().label == "A_q3_n12_T40_k0.5"
        assert _small_config(setting="table-1").label == "table-1"

    def test_unknown_method(self):
        with pytest.raises(InputError):
            ExperimentConfig(methods=["rkhs", "svm"])

    def test_kappa_length(self):
        with pytest.raises(InputError):
            ExperimentConfig(D_true=2, kappas=[0.5])

    def test_unknown_scenario(self):
        with pytest.raises(InputError):
            ExperimentConfig(scenario="Q")

    def test_load_with_override(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text("scenario: B\nq: 4\nT: 50\nkappas: [0.3]\nseed: 1\n", encoding="utf-8")
        config = load_experiment_config(path, seed=9, replications=None)
        assert config.scenario == "B"
        assert config.T == 50
        assert config.seed == 9

    def test_nested_rejected(self, tmp_path):
        path = tmp_path / "nested.yaml"
        path.write_text("scenario: A\nsolver:\n  max_iter: 3\n", encoding="utf-8")
        with pytest.raises(InputError):
            load_experiment_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "extra.yaml"
        path.write_text("scenario: A\ncolour: blue\n", encoding="utf-8")
        with pytest.raises(InputError):
            load_experiment_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            load_experiment_config(tmp_path / "none.yaml")

    def test_shipped_experiments_load(self):
        directory = os.path.join(project_root, "config", "experiments")
        names = sorted(f for f in os.listdir(directory) if f.endswith(".yaml"))
        assert names
        for name in names:
            config = load_experiment_config(os.path.join(directory, name))
            assert config.replications == 100
            assert len(config.kappas) == config.D_true

    def test_shipped_order_selection(self):
        path = os.path.join(project_root, "config", "experiments", "far2_A2_q6_T100_order.yaml")
        config = load_experiment_config(path)
        assert config.tuning_D_max == 2
        assert config.kappas == [0.0, 0.5]


@pytest.mark.unit
class TestSummarize:
    """반복 집계"""

    def test_ratios_and_win_rate(self):
        records = [
            _record(0, "rkhs", 1.0, D_sel=1),
            _record(0, "anh", 2.0),
            _record(1, "rkhs", 2.0, D_sel=2),
            _record(1, "anh", 1.0, failed=True),
            _record(0, "oracle", 0.5),
            _record(1, "oracle", 0.7),
        ]
        summary = summarize(records, D_true=1)
        assert summary.R_avg == pytest.approx((100.0 - 50.0) / 2)
        assert summary.R_avg_excluded == pytest.approx(100.0)
        assert summary.R_w == pytest.approx(50.0)
        assert summary.D_T == pytest.approx(50.0)
        assert summary.oracle_pe == pytest.approx(0.6)
        anh = summary.methods["anh"]
        assert anh.failures == 1
        assert anh.pe_avg == pytest.approx(1.5)
        assert anh.pe_avg_excluded == pytest.approx(2.0)

    def test_nonfinite_pe_ignored(self):
        records = [_record(0, "bosq", float("nan"), failed=True), _record(1, "bosq", 3.0)]
        summary = summarize(records, D_true=1)
        assert summary.methods["bosq"].pe_avg == 3.0
        assert summary.methods["bosq"].failures == 1
        assert summary.R_avg is None

    def test_mise_with_undefined_lag(self):
        records = [
            _record(0, "rkhs", 1.0, mise=[float("nan"), 0.2]),
            _record(1, "rkhs", 1.0, mise=[float("nan"), 0.4]),
        ]
        summary = summarize(records, D_true=2)
        assert summary.methods["rkhs"].mise_avg[0] is None
        assert summary.methods["rkhs"].mise_avg[1] == pytest.approx(0.3)


@pytest.mark.unit
class TestRunExperiment:
    """반복 실행"""

    def test_reference_rows_always_present(self):
        result = run_experiment(_small_config(methods=["naive"]))
        methods = sorted({r.method for r in result.records})
        assert methods == ["mean_zero", "naive", "oracle"]
        assert len(result.records) == 2 * 3

    def test_all_methods(self):
        result = run_experiment(_small_config())
        assert len(result.records) == 2 * 6
        rkhs = [r for r in result.records if r.method == "rkhs"]
        assert all(r.D_sel == 1 and len(r.lambda_sel) == 1 for r in rkhs)
        assert all(len(r.mise) == 1 and math.isfinite(r.mise[0]) for r in rkhs)
        oracle = [r for r in result.records if r.method == "oracle"]
        assert all(r.mise == [0.0] for r in oracle)
        assert all(math.isfinite(r.pe) for r in result.records)

    def test_deterministic_across_threads(self):
        config = _small_config(replications=3, methods=["rkhs", "bosq", "naive"])
        one = run_experiment(config, threads=1)
        many = run_experiment(config, threads=3)
        assert records_to_frame(one.records, 1).equals(records_to_frame(many.records, 1))
        assert one.summary == many.summary

    def test_method_failure_recorded(self, monkeypatch):
        import bench.runner as runner

        def broken(*args, **kwargs):
            raise NumericalFailure("특이 행렬")

        monkeypatch.setattr(runner, "bosq_fit", broken)
        result = run_experiment(_small_config(methods=["bosq"], replications=1))
        bosq = [r for r in result.records if r.method == "bosq"][0]
        assert bosq.failed
        assert "특이 행렬" in bosq.error
        assert math.isnan(bosq.pe)
        assert result.summary.methods["bosq"].failures == 1


@pytest.mark.unit
class TestEmitResults:
    """결과 파일 출력"""

    @pytest.fixture(scope="class")
    def result(self):
        return run_experiment(_small_config(methods=["rkhs", "anh", "naive"]))

    def test_csv_round_trip_recomputes_summary(self, result, tmp_path):
        path = tmp_path / "out.csv"
        written = emit_results(result, "csv", path)
        assert written == [path, plot_path(path)]
        records = read_records_csv(path, D_true=1)
        assert len(records) == len(result.records)
        assert np.array_equal([r.pe for r in records], [r.pe for r in result.records], equal_nan=True)
        assert summarize(records, 1) == result.summary

    def test_csv_header(self, result, tmp_path):
        path = tmp_path / "out.csv"
        emit_results(result, "csv", path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "setting,replication,method,D_sel,p_sel,lambda_sel,mise_1,pe,failed"

    def test_plot_csv(self, result, tmp_path):
        path = tmp_path / "out.json"
        emit_results(result, "json", path)
        plot = pd.read_csv(plot_path(path))
        assert list(plot.columns) == ["setting", "method", "replication", "pe"]
        assert len(plot) == len(result.records)

    def test_json_round_trip(self, result, tmp_path):
        path = tmp_path / "out.json"
        emit_results(result, "json", path)
        loaded = load_result_json(path)
        assert loaded.config == result.config
        assert loaded.summary == result.summary
        assert [r.method for r in loaded.records] == [r.method for r in result.records]

    def test_bitwise_identical_reruns(self, result, tmp_path):
        again = run_experiment(result.config)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_results(result, "csv", a)
        emit_results(again, "csv", b)
        assert a.read_bytes() == b.read_bytes()

    def test_format_summary(self, result):
        text = format_summary(result, scale_pe_100=True)
        assert result.config.label in text
        assert "Oracle PE" in text
        assert "rkhs" in text

    def test_bad_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(InputError):
            read_records_csv(path, D_true=1)


@pytest.mark.unit
class TestReferenceMethods:
    """기준 방법과 빈 결과"""

    def test_mean_zero_is_second_moment(self):
        from bench.runner import _child_seed, build_truth
        from simulator import simulate

        config = _small_config(methods=["mean_zero"], replications=1)
        result = run_experiment(config)
        record = [r for r in result.records if r.method == "mean_zero"][0]

        sim_seq, _ = np.random.SeedSequence([config.seed, 0, 1]).spawn(2)
        sim = simulate(build_truth(config, 0), config.T + config.n_test, config.n, seed=_child_seed(sim_seq))
        test = sim.series.values[config.T :]
        assert record.pe == pytest.approx(float(np.mean(test ** 2)), rel=1e-12)
        assert result.summary.mean_zero_pe == record.pe

    def test_empty_records_header_only(self, tmp_path):
        result = run_experiment(_small_config(methods=["naive"], replications=1))
        empty = result.model_copy(update={"records": [], "summary": summarize([], 1)})
        path = tmp_path / "empty.csv"
        emit_results(empty, "csv", path)
        assert path.read_text(encoding="utf-8").splitlines() == [
            "setting,replication,method,D_sel,p_sel,lambda_sel,mise_1,pe,failed"
        ]
