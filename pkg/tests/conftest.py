import pathlib

import pytest

import catrep as cr

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def watermelon_path() -> pathlib.Path:
    return DATA_DIR / "watermelon.csv"


@pytest.fixture(scope="session")
def zoo_path() -> pathlib.Path:
    return DATA_DIR / "zoo.csv"


@pytest.fixture(scope="session")
def watermelon(watermelon_path) -> cr.CategoricalDataset:
    """The six-row toy table with the Sweetness column held out as labels."""
    return cr.load_csv(watermelon_path, label_column="Sweetness")


@pytest.fixture(scope="session")
def zoo(zoo_path) -> cr.CategoricalDataset:
    return cr.load_csv(zoo_path, label_column="type")
