"""A directory of space documents, keyed by a JMESPath expression over their summary."""

import logging
from pathlib import Path

import jmespath

from .Schema import dump_space, parse_space
from .Space import SpaceDescription

log = logging.getLogger(__name__)

SUFFIX = ".json"


def summary(space: SpaceDescription) -> dict:
    """The small record catalog keys and queries are evaluated against."""
    return {
        "name": space.name,
        "n": space.n,
        "dim": space.dim,
        "rule": None if space.rule is None else space.rule.tag,
        "resolution": space.resolution,
        "ambient_complete": space.ambient_complete,
        "has_atlas": space.atlas is not None,
        "notes": dict(space.notes),
    }


class Catalog:
    """Spaces saved as documents; the file stem is `key_expr` applied to the summary."""

    def __init__(self, path: Path | str, key_expr: str = "name") -> None:
        self.path = Path(path)
        if self.path.exists() and not self.path.is_dir():
            raise NotADirectoryError(f"{self.path} is not a directory")
        self.path.mkdir(parents=True, exist_ok=True)
        self._jmespath = jmespath.compile(key_expr)

    @property
    def key_expr(self) -> str:
        return self._jmespath.expression

    def document(self, key: str) -> Path:
        """Where the space stored under `key` lives; a trailing .json is accepted."""
        key = str(key)
        if key.endswith(SUFFIX):
            key = key[: -len(SUFFIX)]
        if not key or "/" in key or key in (".", ".."):
            raise KeyError(f"{key!r} is not a catalog key")
        return self.path / f"{key}{SUFFIX}"

    def key_for(self, space: SpaceDescription) -> str:
        key = self._jmespath.search(summary(space))
        if key is None:
            raise KeyError(f"{self.key_expr!r} gives no key for {space.name!r}")
        return str(key)

    def save(self, space: SpaceDescription) -> str:
        key = self.key_for(space)
        self.document(key).write_text(dump_space(space))
        log.info("saved %s as %s", space.name, key)
        return key

    def fetch(self, key: str) -> SpaceDescription:
        path = self.document(key)
        if not path.exists():
            raise KeyError(f"no space {key!r} in {self.path}")
        return parse_space(path.read_text())

    def keys(self) -> list[str]:
        return sorted(file.stem for file in self.path.glob(f"*{SUFFIX}"))

    def all(self) -> list[SpaceDescription]:
        return [self.fetch(key) for key in self.keys()]

    def select(self, query: str) -> list[str]:
        """Keys whose summary satisfies a JMESPath filter, e.g. "n > `100`"."""
        expr = jmespath.compile(f"[?{query}]")
        keyed = []
        for key in self.keys():
            record = summary(self.fetch(key))
            record["key"] = key
            keyed.append(record)
        return [record["key"] for record in expr.search(keyed)]

    def delete(self, key: str) -> None:
        self.document(key).unlink(missing_ok=True)

    def stat(self) -> dict:
        return {
            "path": str(self.path),
            "key_expr": self.key_expr,
            "num_spaces": len(self.keys()),
        }
