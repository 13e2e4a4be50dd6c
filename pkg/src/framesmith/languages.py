"""BCP-47 language tags with a configurable primary-subtag registry.

Frames and lexical units are always tagged with the language (and thereby
the culture) they belong to, so tags are normalized aggressively: the
language subtag is lowercased, script subtags are titlecased, region
subtags are uppercased. ``pt-br``, ``PT-BR`` and ``pt-BR`` all canonicalize
to ``pt-BR``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import LanguageError

_SUBTAG = re.compile(r"[A-Za-z0-9]{1,8}\Z")
_PRIMARY = re.compile(r"[A-Za-z]{2,3}\Z")


def _canonicalize(code: str) -> str:
    code = code.strip()
    if not code:
        raise LanguageError("empty language tag")
    parts = code.split("-")
    if not _PRIMARY.match(parts[0]):
        raise LanguageError(f"bad primary language subtag in {code!r}")
    out = [parts[0].lower()]
    for part in parts[1:]:
        if not _SUBTAG.match(part):
            raise LanguageError(f"bad subtag {part!r} in {code!r}")
        if len(part) == 4 and part.isalpha():
            out.append(part.title())
        elif (len(part) == 2 and part.isalpha()) or (len(part) == 3 and part.isdigit()):
            out.append(part.upper() if part.isalpha() else part)
        else:
            out.append(part.lower())
    return "-".join(out)


@dataclass(frozen=True, order=True)
class Language:
    """A canonicalized BCP-47 tag, e.g. ``en`` or ``pt-BR``."""

    code: str

    def __post_init__(self):
        object.__setattr__(self, "code", _canonicalize(self.code))

    @property
    def primary(self) -> str:
        return self.code.split("-", 1)[0]

    def __str__(self) -> str:
        return self.code


class LanguageRegistry:
    """Set of known primary language subtags, loaded from a text file.

    The file holds one subtag per line; blank lines and ``#`` comments are
    skipped. Tags whose primary subtag is absent from the registry are
    rejected at the system boundaries (payload parsing, lexicon ingestion).
    """

    def __init__(self, subtags: set[str]):
        self._subtags = {s.lower() for s in subtags}

    @classmethod
    def from_file(cls, path: str | Path) -> "LanguageRegistry":
        subtags = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                subtags.add(line)
        return cls(subtags)

    def __contains__(self, subtag: str) -> bool:
        return subtag.lower() in self._subtags

    def __len__(self) -> int:
        return len(self._subtags)

    def parse(self, code: str) -> Language:
        lang = Language(code)
        if lang.primary not in self._subtags:
            raise LanguageError(f"unknown language subtag {lang.primary!r}")
        return lang


@lru_cache(maxsize=1)
def default_registry() -> LanguageRegistry:
    """Registry packaged with the distribution (ISO 639-1 two-letter set)."""
    ref = resources.files("framesmith").joinpath("data/languages.txt")
    with resources.as_file(ref) as path:
        return LanguageRegistry.from_file(path)
