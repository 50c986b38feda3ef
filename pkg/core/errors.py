"""
라이브러리 전역 예외 계층
CLI는 exit_code 속성으로 종료 코드를 결정합니다. (0 성공, 1 입력, 2 수치, 3 I/O)
"""
from typing import Optional


class FarError(Exception):
    """모든 라이브러리 예외의 루트"""

    exit_code: int = 1


class InputError(FarError):
    """입력 검증 실패 (차원, 정의역, 파라미터 범위)

    ValueError를 상속하지 않으므로 pydantic 검증기 안에서 발생해도 ValidationError로 감싸지지 않습니다.
    """

    exit_code = 1


class ParseError(InputError):
    """CSV 파싱 실패 - 행/열 위치를 함께 보고"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class NonStationaryError(InputError):
    """정상성 조건을 만족하지 않는 시뮬레이터 설정 거부"""

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"비정상(nonstationary) 설정: companion spectral radius={radius:.6f} >= 1")


class NumericalFailure(FarError, ArithmeticError):
    """수치 계산 실패 (비유한 목적함수, 특이 행렬 등)"""

    exit_code = 2

    def __init__(self, message: str, iteration: Optional[int] = None):
        self.iteration = iteration
        suffix = f" (iteration {iteration})" if iteration is not None else ""
        super().__init__(f"{message}{suffix}")


class UndefinedMetricError(NumericalFailure):
    """정의되지 않는 지표 (영 노름 연산자의 MISE, 전부 0인 고유값 등)"""


class StorageError(FarError):
    """파일 입출력 실패 - 경로 정보를 포함"""

    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        suffix = f": {path}" if path else ""
        super().__init__(f"{message}{suffix}")
