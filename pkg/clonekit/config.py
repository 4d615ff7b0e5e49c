from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

DEFAULT_BUNDLE = Path(__file__).resolve().parent / "data" / "theories.bundle"
DEFAULT_WITNESSES = Path(__file__).resolve().parent / "data" / "witnesses.json"


def _parse_int(value: str | None, default: int) -> int:
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError:
        return default


@dataclass(frozen=True)
class Budget:
    max_context: int = 3
    max_depth: int = 4
    max_size: int = 7
    search_nodes: int = 2000
    step_ceiling: int = 10000
    max_terms: int = 400
    max_cases: int = 4000
    sort_height: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        for name, value in self.to_dict().items():
            if value < 0:
                raise ValueError(f"Budget field {name} must be non-negative, got {value}")

    def replace(self, **changes: int) -> Budget:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "max_context": self.max_context,
            "max_depth": self.max_depth,
            "max_size": self.max_size,
            "search_nodes": self.search_nodes,
            "step_ceiling": self.step_ceiling,
            "max_terms": self.max_terms,
            "max_cases": self.max_cases,
            "sort_height": self.sort_height,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Settings:
    log_level: str
    max_context: int
    max_depth: int
    max_size: int
    search_nodes: int
    step_ceiling: int
    max_terms: int
    max_cases: int
    sort_height: int
    seed: int
    model_size: int
    bundle_path: Path

    @property
    def budget(self) -> Budget:
        return Budget(
            max_context=self.max_context,
            max_depth=self.max_depth,
            max_size=self.max_size,
            search_nodes=self.search_nodes,
            step_ceiling=self.step_ceiling,
            max_terms=self.max_terms,
            max_cases=self.max_cases,
            sort_height=self.sort_height,
            seed=self.seed,
        )


_SETTINGS: Settings | None = None


def get_settings() -> Settings:
    global _SETTINGS
    if _SETTINGS is not None:
        return _SETTINGS

    defaults = Budget()
    bundle_env = os.getenv("CLONEKIT_BUNDLE")
    settings = Settings(
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        max_context=_parse_int(os.getenv("CLONEKIT_MAX_CONTEXT"), defaults.max_context),
        max_depth=_parse_int(os.getenv("CLONEKIT_MAX_DEPTH"), defaults.max_depth),
        max_size=_parse_int(os.getenv("CLONEKIT_MAX_SIZE"), defaults.max_size),
        search_nodes=_parse_int(os.getenv("CLONEKIT_SEARCH_NODES"), defaults.search_nodes),
        step_ceiling=_parse_int(os.getenv("CLONEKIT_STEP_CEILING"), defaults.step_ceiling),
        max_terms=_parse_int(os.getenv("CLONEKIT_MAX_TERMS"), defaults.max_terms),
        max_cases=_parse_int(os.getenv("CLONEKIT_MAX_CASES"), defaults.max_cases),
        sort_height=_parse_int(os.getenv("CLONEKIT_SORT_HEIGHT"), defaults.sort_height),
        seed=_parse_int(os.getenv("CLONEKIT_SEED"), defaults.seed),
        model_size=_parse_int(os.getenv("CLONEKIT_MODEL_SIZE"), 2),
        bundle_path=Path(bundle_env).resolve() if bundle_env else DEFAULT_BUNDLE,
    )
    _SETTINGS = settings
    return settings


def default_budget() -> Budget:
    return get_settings().budget
