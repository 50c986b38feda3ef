"""
이산 샘플링된 함수형 시계열 데이터 모델
모든 시점이 하나의 공통 샘플링 격자를 공유합니다.
"""
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import InputError


class GridKind(str, Enum):
    MIDPOINT_EQUISPACED = "midpoint_equispaced"
    UNIFORM_RANDOM = "uniform_random"
    EXPLICIT = "explicit"


class Grid(BaseModel):
    """[0,1] 위의 순증가 샘플링 격자 {s_i}"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(description="n개의 샘플링 지점")
    kind: GridKind = Field(default=GridKind.EXPLICIT, description="격자 종류")

    @field_validator("points", mode="before")
    @classmethod
    def _as_array(cls, v):
        arr = np.array(v, dtype=float).reshape(-1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_points(self) -> "Grid":
        p = self.points
        if p.size == 0:
            raise InputError("격자가 비어 있습니다")
        if not np.all(np.isfinite(p)) or p[0] < 0.0 or p[-1] > 1.0:
            raise InputError("격자 지점은 [0,1] 범위여야 합니다")
        if p.size > 1 and not np.all(np.diff(p) > 0):
            raise InputError("격자 지점은 순증가해야 합니다")
        return self

    @classmethod
    def midpoint(cls, n: int) -> "Grid":
        """s_i = (i + 0.5)/n, i = 0..n-1"""
        if n < 1:
            raise InputError(f"격자 크기는 1 이상이어야 합니다: {n}")
        return cls(points=(np.arange(n) + 0.5) / n, kind=GridKind.MIDPOINT_EQUISPACED)

    @classmethod
    def uniform_random(cls, n: int, seed: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> "Grid":
        """U(0,1)에서 뽑은 n개 지점을 정렬 (중복 시 재추출)"""
        if n < 1:
            raise InputError(f"격자 크기는 1 이상이어야 합니다: {n}")
        rng = rng if rng is not None else np.random.default_rng(seed)
        while True:
            pts = np.sort(rng.uniform(0.0, 1.0, size=n))
            if n == 1 or np.all(np.diff(pts) > 0):
                return cls(points=pts, kind=GridKind.UNIFORM_RANDOM)

    @classmethod
    def explicit(cls, points) -> "Grid":
        return cls(points=points, kind=GridKind.EXPLICIT)

    @classmethod
    def build(cls, kind: GridKind, n: int, rng: Optional[np.random.Generator] = None) -> "Grid":
        kind = GridKind(kind)
        if kind == GridKind.MIDPOINT_EQUISPACED:
            return cls.midpoint(n)
        if kind == GridKind.UNIFORM_RANDOM:
            return cls.uniform_random(n, rng=rng)
        raise InputError("explicit 격자는 지점 목록으로 생성해야 합니다")

    @property
    def size(self) -> int:
        return int(self.points.size)

    def same_as(self, other: "Grid") -> bool:
        return self.size == other.size and bool(np.array_equal(self.points, other.points))


class SampledSeries(BaseModel):
    """T×n 관측 행렬 values[t][i] = X_t(s_i)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    values: np.ndarray = Field(description="T×n 관측값")

    @field_validator("values", mode="before")
    @classmethod
    def _as_matrix(cls, v):
        arr = np.array(v, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_values(self) -> "SampledSeries":
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.size:
            raise InputError(
                f"행 길이가 격자 크기와 다릅니다: values={self.values.shape}, n={self.grid.size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise InputError("관측값에 유한하지 않은 값이 있습니다")
        return self

    @property
    def T(self) -> int:
        return int(self.values.shape[0])

    @property
    def n(self) -> int:
        return self.grid.size

    def head(self, count: int) -> "SampledSeries":
        """앞쪽 count개 시점"""
        return SampledSeries(grid=self.grid, values=self.values[:count])

    def tail(self, start: int) -> "SampledSeries":
        """start 이후 시점"""
        return SampledSeries(grid=self.grid, values=self.values[start:])


class CosineBasis(BaseModel):
    """u_1 ≡ 1, u_i(s) = √2 cos((i−1)πs) 정규직교 코사인 기저"""
    model_config = ConfigDict(frozen=True)

    q: int = Field(description="기저 차원")

    @model_validator(mode="after")
    def _check_q(self) -> "CosineBasis":
        if self.q < 1:
            raise InputError(f"기저 차원 q는 1 이상이어야 합니다: {self.q}")
        return self

    def evaluate(self, points) -> np.ndarray:
        """len(points)×q 행렬"""
        s = np.atleast_1d(np.asarray(points, dtype=float))
        freqs = np.arange(self.q) * np.pi
        U = np.sqrt(2.0) * np.cos(s[:, None] * freqs[None, :])
        U[:, 0] = 1.0
        return U
