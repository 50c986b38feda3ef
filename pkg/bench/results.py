"""
반복 실험 결과 모델, 집계, 출력
CSV는 (replication, method)당 한 행, JSON은 설정 echo를 포함한 전체 기록입니다.
"""
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field

from core.errors import InputError, StorageError
from .config import ExperimentConfig
from .metrics import fmean, fmedian

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# 항상 기록되는 기준 행
REFERENCE_METHODS = ("oracle", "mean_zero")


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class MethodRecord(BaseModel):
    """한 반복에서 한 방법의 결과"""

    setting: str
    replication: int
    method: str
    D_sel: Optional[int] = None
    p_sel: Optional[int] = None
    lambda_sel: List[float] = Field(default_factory=list)
    mise: List[float] = Field(default_factory=list, description="lag별 MISE (정의되지 않으면 NaN)")
    pe: float = float("nan")
    failed: bool = False
    error: Optional[str] = None
    diagnostics: Dict[str, float] = Field(default_factory=dict)


class MethodSummary(BaseModel):
    runs: int
    failures: int
    pe_avg: Optional[float] = Field(default=None, description="유한 PE 전체 평균")
    pe_avg_excluded: Optional[float] = Field(default=None, description="실패 표시 반복 제외 평균")
    pe_median: Optional[float] = None
    mise_avg: List[Optional[float]] = Field(default_factory=list)
    mise_median: List[Optional[float]] = Field(default_factory=list)


class ExperimentSummary(BaseModel):
    methods: Dict[str, MethodSummary]
    oracle_pe: Optional[float] = None
    mean_zero_pe: Optional[float] = None
    R_avg: Optional[float] = Field(default=None, description="mean (PE(ANH)/PE(RKHS) − 1)·100")
    R_avg_excluded: Optional[float] = None
    R_w: Optional[float] = Field(default=None, description="PE(RKHS) < PE(ANH)인 반복 비율(%)")
    D_T: Optional[float] = Field(default=None, description="RKHS가 참 차수를 고른 반복 비율(%)")


class ExperimentResult(BaseModel):
    config: ExperimentConfig
    records: List[MethodRecord]
    summary: ExperimentSummary


def summarize(records: List[MethodRecord], D_true: int) -> ExperimentSummary:
    """반복 기록으로부터 집계 - CSV에서 다시 읽은 기록으로도 같은 값을 냅니다."""
    records = sorted(records, key=lambda r: (r.replication, r.method))
    by_method: Dict[str, List[MethodRecord]] = {}
    for rec in records:
        by_method.setdefault(rec.method, []).append(rec)

    methods: Dict[str, MethodSummary] = {}
    for name, recs in by_method.items():
        mise_avg, mise_median = [], []
        for d in range(D_true):
            column = [r.mise[d] for r in recs if len(r.mise) > d]
            mise_avg.append(fmean(column))
            mise_median.append(fmedian(column))
        methods[name] = MethodSummary(
            runs=len(recs),
            failures=sum(1 for r in recs if r.failed or not math.isfinite(r.pe)),
            pe_avg=fmean(r.pe for r in recs),
            pe_avg_excluded=fmean(r.pe for r in recs if not r.failed),
            pe_median=fmedian(r.pe for r in recs),
            mise_avg=mise_avg,
            mise_median=mise_median,
        )

    summary = ExperimentSummary(methods=methods)
    if "oracle" in methods:
        summary.oracle_pe = methods["oracle"].pe_avg
    if "mean_zero" in methods:
        summary.mean_zero_pe = methods["mean_zero"].pe_avg

    if "rkhs" in by_method and "anh" in by_method:
        anh = {r.replication: r for r in by_method["anh"]}
        ratios, ratios_excluded, wins, pairs = [], [], 0, 0
        for rk in by_method["rkhs"]:
            other = anh.get(rk.replication)
            if other is None or not (math.isfinite(rk.pe) and math.isfinite(other.pe)) or rk.pe <= 0:
                continue
            ratio = (other.pe / rk.pe - 1.0) * 100.0
            ratios.append(ratio)
            if not other.failed:
                ratios_excluded.append(ratio)
            pairs += 1
            wins += int(rk.pe < other.pe)
        summary.R_avg = fmean(ratios)
        summary.R_avg_excluded = fmean(ratios_excluded)
        summary.R_w = 100.0 * wins / pairs if pairs else None

    if "rkhs" in by_method:
        selected = [r.D_sel for r in by_method["rkhs"] if r.D_sel is not None]
        if selected:
            summary.D_T = 100.0 * sum(1 for D in selected if D == D_true) / len(selected)
    return summary


def csv_columns(D_true: int) -> List[str]:
    return (
        ["setting", "replication", "method", "D_sel", "p_sel", "lambda_sel"]
        + [f"mise_{d}" for d in range(1, D_true + 1)]
        + ["pe", "failed"]
    )


def records_to_frame(records: List[MethodRecord], D_true: int) -> pd.DataFrame:
    rows = []
    for r in records:
        row: Dict[str, Any] = {
            "setting": r.setting,
            "replication": r.replication,
            "method": r.method,
            "D_sel": "" if r.D_sel is None else r.D_sel,
            "p_sel": "" if r.p_sel is None else r.p_sel,
            "lambda_sel": ";".join(format(x, ".17g") for x in r.lambda_sel),
        }
        for d in range(1, D_true + 1):
            row[f"mise_{d}"] = r.mise[d - 1] if len(r.mise) >= d else float("nan")
        row["pe"] = r.pe
        row["failed"] = r.failed
        rows.append(row)
    return pd.DataFrame(rows, columns=csv_columns(D_true))


def _optional_int(cell: str) -> Optional[int]:
    return int(cell) if cell not in ("", None) else None


def _float(cell: str) -> float:
    return float(cell) if cell not in ("", None) else float("nan")


def read_records_csv(path: PathLike, D_true: int) -> List[MethodRecord]:
    """emit_results가 쓴 기록 CSV를 다시 읽습니다."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except OSError as e:
        raise StorageError(f"결과 CSV 읽기 실패 ({e})", path=str(path))
    if list(frame.columns) != csv_columns(D_true):
        raise InputError(f"결과 CSV 열 구성이 다릅니다: {list(frame.columns)}")
    records = []
    for _, row in frame.iterrows():
        records.append(
            MethodRecord(
                setting=row["setting"],
                replication=int(row["replication"]),
                method=row["method"],
                D_sel=_optional_int(row["D_sel"]),
                p_sel=_optional_int(row["p_sel"]),
                lambda_sel=[float(x) for x in row["lambda_sel"].split(";") if x],
                mise=[_float(row[f"mise_{d}"]) for d in range(1, D_true + 1)],
                pe=_float(row["pe"]),
                failed=row["failed"] == "True",
            )
        )
    return records


def plot_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_plot.csv")


def emit_results(result: ExperimentResult, fmt: Union[str, OutputFormat], path: PathLike) -> List[Path]:
    """결과 파일과 상자그림용 plot CSV(setting, method, replication, pe)를 씁니다."""
    fmt = OutputFormat(fmt)
    path = Path(path)
    D_true = result.config.D_true
    written = [path, plot_path(path)]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == OutputFormat.CSV:
            records_to_frame(result.records, D_true).to_csv(
                path, index=False, float_format="%.17g", lineterminator="\n"
            )
        else:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(result.model_dump(mode="python"), f, indent=2, ensure_ascii=False)
        plot = pd.DataFrame(
            [
                {"setting": r.setting, "method": r.method, "replication": r.replication, "pe": r.pe}
                for r in result.records
            ],
            columns=["setting", "method", "replication", "pe"],
        )
        plot.to_csv(written[1], index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise StorageError(f"결과 저장 실패 ({e})", path=str(path))
    logger.info(f"결과 저장 완료: {', '.join(str(p) for p in written)}")
    return written


def load_result_json(path: PathLike) -> ExperimentResult:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise StorageError(f"결과 JSON 읽기 실패 ({e})", path=str(path))
    return ExperimentResult.model_validate(data)


def format_summary(result: ExperimentResult, scale_pe_100: bool = False) -> str:
    """사람이 읽는 요약 표 (×100 스케일은 표시에만 적용)"""
    scale = 100.0 if scale_pe_100 else 1.0
    s = result.summary

    def show(value: Optional[float], factor: float = 1.0) -> str:
        return "-" if value is None else f"{value * factor:.4f}"

    lines = [f"[{result.config.label}] replications={result.config.replications}"]
    for name, m in s.methods.items():
        mise = ", ".join(show(v) for v in m.mise_avg)
        lines.append(
            f"  {name:<10} PE_avg={show(m.pe_avg, scale)} PE_med={show(m.pe_median, scale)} "
            f"MISE_avg=[{mise}] failures={m.failures}/{m.runs}"
        )
    lines.append(
        f"  Oracle PE={show(s.oracle_pe, scale)} Mean-Zero PE={show(s.mean_zero_pe, scale)} "
        f"R_avg={show(s.R_avg)} R_w={show(s.R_w)} D_T={show(s.D_T)}"
    )
    return "\n".join(lines)
