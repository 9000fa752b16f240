"""Tabular binary-classification datasets with protected-attribute annotations.

Covers CSV loading against a JSON schema, privileged-group predicates,
deterministic train/test splits, one-hot + standardized encoding fitted on
the training split, protected-column exclusion, and a synthetic generator
used as a desk-scale fixture.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import LabelError, RowParseError, SchemaError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

# Missing categorical cells become their own category; missing numeric cells
# are imputed with the training mean at encode time.
MISSING_CATEGORY = "<missing>"

_ATOM_RE = re.compile(r"^\s*([^\s<>=]+)\s*(>=|<|=)\s*(.+?)\s*$")


@dataclass(frozen=True)
class Atom:
    """One conjunct of a privileged-group predicate: ``col=value``,
    ``col>=number`` or ``col<number``."""

    column: str
    op: str
    value: str | float


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class ProtectedSpec:
    """A protected attribute: its name plus the predicate that defines the
    privileged group."""

    name: str
    predicate: tuple[Atom, ...]
    text: str


def parse_predicate(text: str) -> tuple[Atom, ...]:
    """Parse a conjunction like ``"sex=male AND age>=25"`` into atoms."""
    atoms = []
    for part in text.split(" AND "):
        m = _ATOM_RE.match(part)
        if m is None:
            raise SchemaError(f"unparseable predicate atom {part!r}")
        column, op, value = m.group(1), m.group(2), m.group(3)
        if op in (">=", "<"):
            try:
                value = float(value)
            except ValueError:
                raise SchemaError(
                    f"predicate {part!r}: {op!r} needs a numeric bound"
                ) from None
        atoms.append(Atom(column, op, value))
    return tuple(atoms)


@dataclass(frozen=True)
class DatasetSchema:
    """Column descriptors, label mapping, and protected-attribute specs."""

    columns: tuple[ColumnSpec, ...]
    label: str
    favorable: str
    protected: tuple[ProtectedSpec, ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        if self.label not in names:
            raise SchemaError(f"label column {self.label!r} not declared")
        if not self.protected:
            raise SchemaError("at least one protected attribute is required")
        kinds = self.kinds
        for spec in self.protected:
            for atom in spec.predicate:
                if atom.column not in kinds:
                    raise SchemaError(
                        f"protected attribute {spec.name!r}: predicate references "
                        f"missing column {atom.column!r}"
                    )
                if atom.op in (">=", "<") and kinds[atom.column] != NUMERIC:
                    raise SchemaError(
                        f"protected attribute {spec.name!r}: {atom.op!r} requires "
                        f"a numeric column, got {atom.column!r}"
                    )

    @property
    def kinds(self) -> dict[str, str]:
        return {c.name: c.kind for c in self.columns}

    @property
    def feature_columns(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.name != self.label)

    @property
    def protected_columns(self) -> frozenset[str]:
        return frozenset(
            atom.column for spec in self.protected for atom in spec.predicate
        )

    @classmethod
    def from_json(cls, doc: dict) -> "DatasetSchema":
        try:
            columns = tuple(ColumnSpec(c["name"], c["kind"]) for c in doc["columns"])
            protected = tuple(
                ProtectedSpec(p["name"], parse_predicate(p["predicate"]), p["predicate"])
                for p in doc["protected"]
            )
            return cls(columns, doc["label"], str(doc["favorable"]), protected)
        except KeyError as exc:
            raise SchemaError(f"schema document missing key {exc}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "DatasetSchema":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {
            "columns": [{"name": c.name, "kind": c.kind} for c in self.columns],
            "label": self.label,
            "favorable": self.favorable,
            "protected": [{"name": p.name, "predicate": p.text} for p in self.protected],
        }


def evaluate_predicate(
    atoms: tuple[Atom, ...], features: dict[str, np.ndarray], kinds: dict[str, str]
) -> np.ndarray:
    """Membership vector of the privileged group: True where all atoms hold."""
    out = None
    for atom in atoms:
        col = features[atom.column]
        if atom.op == "=":
            if kinds[atom.column] == NUMERIC:
                hold = col == float(atom.value)
            else:
                hold = col == str(atom.value)
        elif atom.op == ">=":
            hold = col >= atom.value
        else:
            hold = col < atom.value
        out = hold if out is None else (out & hold)
    return np.asarray(out, dtype=bool)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature table, 0/1 labels (1 = favorable), per-attribute
    privileged-membership vectors, and nonnegative instance weights."""

    schema: DatasetSchema
    feature_names: tuple[str, ...]
    features: dict[str, np.ndarray]
    labels: np.ndarray
    groups: dict[str, np.ndarray]
    weights: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        for name in self.feature_names:
            if len(self.features[name]) != n:
                raise SchemaError(f"column {name!r} length mismatch")
        for name, vec in self.groups.items():
            if len(vec) != n:
                raise SchemaError(f"group vector {name!r} length mismatch")
        if len(self.weights) != n:
            raise SchemaError("weight vector length mismatch")
        if n and self.weights.min() < 0:
            raise SchemaError("instance weights must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.labels)

    def group(self, attribute: str | None = None) -> np.ndarray:
        """Privileged-membership vector for one protected attribute."""
        if attribute is None:
            if len(self.groups) != 1:
                raise SchemaError("attribute name required: several protected attributes")
            return next(iter(self.groups.values()))
        if attribute not in self.groups:
            raise SchemaError(f"unknown protected attribute {attribute!r}")
        return self.groups[attribute]

    def take(self, indices: np.ndarray) -> "Dataset":
        return replace(
            self,
            features={k: v[indices] for k, v in self.features.items()},
            labels=self.labels[indices],
            groups={k: v[indices] for k, v in self.groups.items()},
            weights=self.weights[indices],
        )

    def with_weights(self, weights: np.ndarray) -> "Dataset":
        return replace(self, weights=np.asarray(weights, dtype=np.float64))


def _parse_columns(
    header: list[str], rows: list[list[str]], schema: DatasetSchema
) -> dict[str, np.ndarray]:
    index = {name: header.index(name) for name in header}
    kinds = schema.kinds
    out: dict[str, np.ndarray] = {}
    for col in schema.feature_columns:
        pos = index[col]
        if kinds[col] == NUMERIC:
            vals = np.empty(len(rows), dtype=np.float64)
            for i, row in enumerate(rows):
                cell = row[pos].strip()
                if cell == "":
                    vals[i] = np.nan
                    continue
                try:
                    vals[i] = float(cell)
                except ValueError:
                    raise RowParseError(
                        f"column {col!r}: cannot parse {cell!r} as a number", i
                    ) from None
            out[col] = vals
        else:
            out[col] = np.array(
                [row[pos].strip() or MISSING_CATEGORY for row in rows], dtype=object
            )
    return out


def load_dataset(csv_path: str | Path, schema: DatasetSchema) -> Dataset:
    """Load an RFC-4180 CSV with a header row; rows with a missing label are
    dropped, group vectors are computed from the schema predicates, and all
    instance weights start at 1.0."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{csv_path}: empty file") from None
        rows = [row for row in reader if row]

    for col in [c.name for c in schema.columns]:
        if col not in header:
            raise SchemaError(f"{csv_path}: missing column {col!r}")

    label_pos = header.index(schema.label)
    kept = [row for row in rows if row[label_pos].strip() != ""]
    raw_labels = [row[label_pos].strip() for row in kept]
    observed = sorted(set(raw_labels))
    if len(observed) != 2 or schema.favorable not in observed:
        raise LabelError(
            f"label column {schema.label!r} must take exactly two values including "
            f"the favorable one {schema.favorable!r}; saw {observed}"
        )

    features = _parse_columns(header, kept, schema)
    labels = np.array([1 if v == schema.favorable else 0 for v in raw_labels], dtype=np.int64)
    groups = {
        spec.name: evaluate_predicate(spec.predicate, features, schema.kinds)
        for spec in schema.protected
    }
    return Dataset(
        schema=schema,
        feature_names=schema.feature_columns,
        features=features,
        labels=labels,
        groups=groups,
        weights=np.ones(len(kept), dtype=np.float64),
    )


def split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled partition; ``|test| = round(test_fraction * n)``."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if ds.n == 0:
        raise ValueError("cannot split an empty dataset")
    perm = np.random.default_rng(seed).permutation(ds.n)
    n_test = int(round(test_fraction * ds.n))
    return ds.take(perm[n_test:]), ds.take(perm[:n_test])


def exclude_protected(ds: Dataset) -> Dataset:
    """Drop every feature column referenced by a protected predicate.

    Group vectors and labels stay so fairness metrics remain computable.
    Idempotent.
    """
    drop = ds.schema.protected_columns
    keep = tuple(name for name in ds.feature_names if name not in drop)
    return replace(
        ds,
        feature_names=keep,
        features={k: v for k, v in ds.features.items() if k in keep},
    )


@dataclass(frozen=True)
class EncodedColumn:
    """Provenance of one encoded column: its source column, the category it
    indicates (None for numeric), and the train-set standardization stats."""

    name: str
    source: str
    category: str | None
    mean: float | None
    std: float | None


@dataclass(frozen=True, eq=False)
class EncodedMatrix:
    values: np.ndarray
    columns: tuple[EncodedColumn, ...]

    @property
    def n(self) -> int:
        return self.values.shape[0]


class Encoder:
    """One-hot + standardization encoder fitted on a training split only.

    Categorical columns expand into one indicator per category observed in
    training (unseen test categories map to all zeros). Numeric columns are
    imputed with the train mean and standardized with the train mean and
    population std; zero-variance columns encode to all zeros.
    """

    def __init__(self):
        self._fitted = None  # list of (source, kind, payload)

    def fit(self, train: Dataset) -> "Encoder":
        if train.n == 0:
            raise SchemaError("cannot fit an encoder on an empty training set")
        kinds = train.schema.kinds
        fitted = []
        for name in train.feature_names:
            col = train.features[name]
            if kinds[name] == NUMERIC:
                observed = col[np.isfinite(col)]
                impute = float(observed.mean()) if observed.size else 0.0
                filled = np.where(np.isfinite(col), col, impute)
                mean = float(filled.mean())
                std = float(filled.std())
                fitted.append((name, NUMERIC, (impute, mean, std)))
            else:
                fitted.append((name, CATEGORICAL, sorted(set(col.tolist()))))
        self._fitted = fitted
        return self

    def transform(self, ds: Dataset) -> EncodedMatrix:
        if self._fitted is None:
            raise SchemaError("encoder not fitted")
        blocks = []
        columns = []
        for name, kind, payload in self._fitted:
            col = ds.features[name]
            if kind == NUMERIC:
                impute, mean, std = payload
                filled = np.where(np.isfinite(col), col, impute)
                if std == 0.0:
                    blocks.append(np.zeros(ds.n, dtype=np.float64))
                else:
                    blocks.append((filled - mean) / std)
                columns.append(EncodedColumn(name, name, None, mean, std))
            else:
                for cat in payload:
                    blocks.append((col == cat).astype(np.float64))
                    columns.append(EncodedColumn(f"{name}={cat}", name, cat, None, None))
        values = (
            np.column_stack(blocks) if blocks else np.zeros((ds.n, 0), dtype=np.float64)
        )
        return EncodedMatrix(values=values, columns=tuple(columns))


def encode(train: Dataset, others: list[Dataset] = ()) -> list[EncodedMatrix]:
    """Fit on ``train`` and apply to it plus every dataset in ``others``."""
    enc = Encoder().fit(train)
    return [enc.transform(train)] + [enc.transform(ds) for ds in others]


SYNTHETIC_UNFAVORABLE = "no"


def synthetic_schema() -> DatasetSchema:
    return DatasetSchema(
        columns=(
            ColumnSpec("x1", NUMERIC),
            ColumnSpec("x2", NUMERIC),
            ColumnSpec("grp", CATEGORICAL),
            ColumnSpec("outcome", CATEGORICAL),
        ),
        label="outcome",
        favorable="yes",
        protected=(ProtectedSpec("grp", parse_predicate("grp=A"), "grp=A"),),
    )


def make_synthetic(n: int, bias: float, seed: int) -> Dataset:
    """Deterministic biased fixture: a 50/50 binary protected attribute, two
    label-informative numeric features, and favorable labels flipped to
    unfavorable with probability ``bias`` for the unprivileged group only."""
    if n < 10:
        raise ValueError(f"need n >= 10, got {n}")
    if not 0.0 <= bias <= 1.0:
        raise ValueError(f"bias must be in [0, 1], got {bias}")
    rng = np.random.default_rng(seed)
    privileged = np.zeros(n, dtype=bool)
    privileged[rng.choice(n, n // 2, replace=False)] = True
    x1 = rng.normal(0.0, 1.0, n)
    x2 = rng.normal(0.0, 1.0, n)
    noise = rng.normal(0.0, 0.5, n)
    labels = (x1 + x2 + noise > 0).astype(np.int64)
    flip = (~privileged) & (labels == 1) & (rng.random(n) < bias)
    labels[flip] = 0

    schema = synthetic_schema()
    features = {
        "x1": x1,
        "x2": x2,
        "grp": np.where(privileged, "A", "B").astype(object),
    }
    return Dataset(
        schema=schema,
        feature_names=schema.feature_columns,
        features=features,
        labels=labels,
        groups={"grp": privileged},
        weights=np.ones(n, dtype=np.float64),
    )


def write_dataset_csv(ds: Dataset, path: str | Path, unfavorable: str) -> None:
    """Write the raw feature table plus the label column back to CSV."""
    kinds = ds.schema.kinds
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [ds.schema.label])
        favorable = ds.schema.favorable
        for i in range(ds.n):
            row = []
            for name in ds.feature_names:
                cell = ds.features[name][i]
                row.append(repr(float(cell)) if kinds[name] == NUMERIC else str(cell))
            row.append(favorable if ds.labels[i] == 1 else unfavorable)
            writer.writerow(row)
