from __future__ import annotations

import numpy as np
import pytest

from fairsearch.data import ColumnSpec, DatasetSchema, ProtectedSpec, parse_predicate


def make_schema(columns, label, favorable, protected):
    """Schema builder used across the suite: protected is {name: predicate}."""
    return DatasetSchema(
        columns=tuple(ColumnSpec(n, k) for n, k in columns),
        label=label,
        favorable=favorable,
        protected=tuple(
            ProtectedSpec(name, parse_predicate(text), text) for name, text in protected.items()
        ),
    )


@pytest.fixture
def sex_schema():
    return make_schema(
        columns=[("sex", "categorical"), ("score", "numeric"), ("hired", "categorical")],
        label="hired",
        favorable="yes",
        protected={"sex": "sex=male"},
    )


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
