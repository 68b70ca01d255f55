"""Plain-text band files: one `label x y w h` line per band.

Canonical files are UTF-8, sorted by (y, x), no comments; `#` lines and
blank lines are tolerated on parse. Serializing a parsed canonical file
reproduces it byte for byte.
"""

from .band_detection import Band
from .reasoning import FormatProfile, sort_bands

GT_LABELS = ("natural", "synthetic", "text")


def format_bands(bands) -> str:
    lines = [f"{b.label} {b.x} {b.y} {b.w} {b.h}" for b in sort_bands(bands)]
    return "".join(line + "\n" for line in lines)


def parse_bands(text: str):
    bands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected `label x y w h`, got {raw!r}")
        label = parts[0]
        if label not in GT_LABELS:
            raise ValueError(f"line {lineno}: unknown label {label!r}")
        try:
            x, y, w, h = (int(p) for p in parts[1:])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer coordinates in {raw!r}")
        if x < 0 or y < 0:
            raise ValueError(f"line {lineno}: negative band origin")
        bands.append(Band(x, y, w, h, label=label))
    return sort_bands(bands)


def save_profile(path, profile: FormatProfile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_bands(profile.bands))


def load_bands(path):
    with open(path, encoding="utf-8") as fh:
        return parse_bands(fh.read())


def load_profile(path, width: int, height: int) -> FormatProfile:
    return FormatProfile(width, height, load_bands(path))
