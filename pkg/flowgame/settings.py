from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Observability / Logging
    LOG_JSON: bool = False
    LOG_LEVEL: str = "INFO"
    FEATURE_PROMETHEUS_METRICS: bool = True

    # Certificate search
    CERT_MAX_N: int = 65536
    CERT_MAX_EPS_EXPONENT: int = 64
    LADDER_MAX_RUNGS: int = 512

    # Match harness
    MATCH_GRACE: int = 3
    MATCH_MAX_ROUNDS: int = 10000
    DODGER_DELTA_FRACTION: str = "1/1000"  # of the smallest threshold gap

    # Proportional split property sweeps
    PROP1_MAX_HEIGHT: int = 16

    # Grid solver resource caps
    SOLVER_MAX_HEIGHT: int = 2
    SOLVER_MAX_GRAIN: int = 8
    SOLVER_MAX_PLIES: int = 6

    # Layered driver: in-subtree sum each layer targets
    LAYER_SUM: str = "1"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="FLOWGAME_", extra="ignore")


settings = Settings()
