from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent.parent  # На один уровень выше текущего файла
ENV_PATH = BASE_DIR / ".env"


class ToleranceSettings(BaseSettings):
    EXACT_TOL: float = 1e-9  # точные тождества над комплексными суммами
    CLOSED_FORM_TOL: float = 1e-6  # сверка замкнутых формул с прямым суммированием
    UNIT_MODULUS_TOL: float = 1e-12  # |χ(x)| = 1
    PARSEVAL_REL_TOL: float = 1e-6

    model_config = SettingsConfigDict(
        env_file=ENV_PATH, env_prefix="WARING_", populate_by_name=True, extra="allow"
    )


class Settings(BaseSettings):
    app_name: str = "Finite Field Waring Toolkit"
    tolerance: ToleranceSettings = ToleranceSettings()

    MAX_FIELD_ORDER: int = 10_000
    TABLE_LIMIT: int = 2048  # до этого q строим плотные таблицы q×q
    ORACLE_AMBIENT_LIMIT: int = 10_000_000
    SPECTRUM_MAX_Q: int = 13

    VERIFY_Q_VALUES: list[int] = [3, 5, 7, 9, 11, 13]
    SPHERE_EXTRA_Q_VALUES: list[int] = [25, 27]
    VERIFY_DIMENSIONS: list[int] = [2, 3]
    DEEP_DIMENSIONS: list[int] = [4]
    DEEP_D4_MAX_Q: int = 9  # полный перебор F_q^4 только до этого q
    ZERO_THREE_PRIME_MAX: int = 37
    ZERO_THREE_MAX_DEGREE: int = 2
    WALK_Q_MIN: int = 73
    WALK_Q_MAX: int = 200
    WALK_AUX_Q_MIN: int = 39
    DXD_SAMPLE_SIZE: int = 1000  # случайных матриц для (5, 3) и (3, 4)
    DEEP_DXD_SAMPLE_SIZE: int = 5000
    DXD_CHUNKS: int = 8  # на сколько заданий делится каждая d×d проверка

    SEED: int = 20_240_229
    PARALLEL_WIDTH: int = 4

    LOG_DIR: str = "/tmp/log"
    LOG_LEVEL: str = "INFO"
    LOG_ROTATION: str = "10 MB"

    model_config = SettingsConfigDict(
        env_file=ENV_PATH, env_prefix="WARING_", extra="allow"
    )


settings = Settings()
