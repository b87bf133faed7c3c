from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from fedlog.adapters import load_catalog
from fedlog.engine import EngineConfig, QueryEngine
from fedlog.ontology import load_ontology
from fedlog.rules import RuleRepository, load_mapping_dir
from fedlog.templates import load_templates

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def config() -> EngineConfig:
    return EngineConfig.load(FIXTURES / "fedlog.toml")


@pytest.fixture(scope="session")
def ontology(config):
    return load_ontology(config.ontology_path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def repo(ontology, config):
    return RuleRepository(ontology, load_mapping_dir(config.maps_dir))


@pytest.fixture(scope="session")
def catalog(config):
    return load_catalog(config.catalog_path)


@pytest.fixture(scope="session")
def templates(config):
    return load_templates(config.templates_path)


@pytest.fixture()
def engine(config, tmp_path) -> QueryEngine:
    return QueryEngine.from_config(config, run_dir=tmp_path / "runs")


def query_text(name: str) -> str:
    return (FIXTURES / "queries" / f"{name}.dlog").read_text(encoding="utf-8")
