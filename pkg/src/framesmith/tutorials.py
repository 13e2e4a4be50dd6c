"""Tutorial dialog content keyed by UI anchor.

Every interactive element in the frontend carries an anchor; clicking it
opens a dialog card whose text comes from this registry. Anchors that
warrant a longer treatment also carry a video URL, rendered as a link
inside the dialog. Content ships as a JSON file so deployments can replace
or translate it without code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import FramesmithError


@dataclass(frozen=True)
class Tutorial:
    anchor: str
    title: str
    text: str
    video_url: str | None = None


class TutorialRegistry:
    def __init__(self, tutorials: dict[str, Tutorial]):
        self._tutorials = tutorials

    @classmethod
    def from_file(cls, path: str | Path) -> "TutorialRegistry":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        tutorials = {
            anchor: Tutorial(
                anchor=anchor,
                title=entry["title"],
                text=entry["text"],
                video_url=entry.get("video_url"),
            )
            for anchor, entry in raw.items()
        }
        return cls(tutorials)

    @classmethod
    def packaged(cls) -> "TutorialRegistry":
        ref = resources.files("framesmith").joinpath("data/tutorials.json")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def get(self, anchor: str) -> Tutorial:
        tutorial = self._tutorials.get(anchor)
        if tutorial is None:
            raise FramesmithError("UNKNOWN_ANCHOR", f"no tutorial registered for {anchor!r}")
        return tutorial

    def anchors(self) -> list[str]:
        return sorted(self._tutorials)
