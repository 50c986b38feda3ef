"""
SampledSeries CSV 입출력
헤더 = 격자 지점(증가 순), 이후 각 행 = 한 시점. 값은 17 유효숫자로 저장해 왕복 시 비트 단위로 보존됩니다.
"""
import logging
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from core.errors import ParseError, StorageError
from .models import Grid, GridKind, SampledSeries

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_LINE_PATTERN = re.compile(r"line (\d+)")


def _parse_float(cell: str, row: int, column: int) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        raise ParseError(f"숫자가 아닌 값 '{cell}'", row=row, column=column)


def _read_raw(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False, engine="python")
    except pd.errors.EmptyDataError:
        raise ParseError("빈 CSV 파일입니다", row=0)
    except pd.errors.ParserError as e:
        # python 엔진 메시지: "Expected 4 fields in line 3, saw 5"
        match = _LINE_PATTERN.search(str(e))
        row = int(match.group(1)) - 1 if match else None
        raise ParseError("행의 열 개수가 헤더와 다릅니다", row=row)
    except OSError as e:
        raise StorageError(f"CSV 읽기 실패 ({e})", path=str(path))


def load_csv(path: PathLike) -> SampledSeries:
    """CSV 파일을 SampledSeries로 읽습니다.

    행 번호는 헤더를 0으로 하는 파일 행 기준, 열 번호는 1부터 셉니다.
    """
    raw = _read_raw(path)
    if raw.shape[0] < 2:
        raise ParseError("헤더와 최소 한 개의 데이터 행이 필요합니다", row=raw.shape[0])

    header = raw.iloc[0].tolist()
    points = []
    for j, cell in enumerate(header):
        if cell == "":
            raise ParseError("헤더에 빈 칸이 있습니다", row=0, column=j + 1)
        points.append(_parse_float(cell, 0, j + 1))
    points = np.array(points)
    if np.any(points < 0.0) or np.any(points > 1.0):
        bad = int(np.argmax((points < 0.0) | (points > 1.0)))
        raise ParseError("격자 지점은 [0,1] 범위여야 합니다", row=0, column=bad + 1)
    if points.size > 1 and not np.all(np.diff(points) > 0):
        bad = int(np.argmax(np.diff(points) <= 0)) + 2
        raise ParseError("격자 헤더가 순증가하지 않습니다", row=0, column=bad)

    body = raw.iloc[1:]
    # 짧은 행은 python 엔진이 NaN/빈 문자열로 채움
    for offset, (_, record) in enumerate(body.iterrows(), start=1):
        cells = record.tolist()
        for j, cell in enumerate(cells):
            if cell is None or (isinstance(cell, float) and np.isnan(cell)) or cell == "":
                raise ParseError("행의 열 개수가 헤더보다 적습니다", row=offset, column=j + 1)

    try:
        values = body.astype(float).to_numpy()
    except (TypeError, ValueError):
        for offset, (_, record) in enumerate(body.iterrows(), start=1):
            for j, cell in enumerate(record.tolist()):
                _parse_float(cell, offset, j + 1)
        raise ParseError("숫자 변환 실패")

    if not np.all(np.isfinite(values)):
        r, c = np.argwhere(~np.isfinite(values))[0]
        raise ParseError("유한하지 않은 값", row=int(r) + 1, column=int(c) + 1)

    midpoint = (np.arange(points.size) + 0.5) / points.size
    kind = GridKind.MIDPOINT_EQUISPACED if np.array_equal(points, midpoint) else GridKind.EXPLICIT
    series = SampledSeries(grid=Grid(points=points, kind=kind), values=values)
    logger.info(f"CSV 로드 완료: {path} (T={series.T}, n={series.n})")
    return series


def save_csv(series: SampledSeries, path: PathLike) -> None:
    """SampledSeries를 CSV로 저장 (인덱스 열 없음)"""
    columns = [format(float(p), ".17g") for p in series.grid.points]
    frame = pd.DataFrame(np.asarray(series.values), columns=columns)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise StorageError(f"CSV 저장 실패 ({e})", path=str(path))
    logger.debug(f"CSV 저장 완료: {path}")
