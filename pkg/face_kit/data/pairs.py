"""Verification pair lists: `path1 path2 flag` per line."""

from pathlib import Path

from face_kit.errors import DataError


def read_pairs(path: str | Path) -> list[tuple[str, str, bool]]:
    """
    Read whitespace-separated pairs; flag 1 means same identity, 0 different.

    Blank lines and lines starting with '#' are skipped.

    Raises:
        DataError: On a malformed line (with its number) or an empty file.
    """
    path = Path(path)
    pairs = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise DataError(f"{path}:{lineno}: expected 'path1 path2 flag' with flag 0 or 1")
        pairs.append((parts[0], parts[1], parts[2] == "1"))
    if not pairs:
        raise DataError(f"{path}: no pairs")
    return pairs


def write_pairs(path: str | Path, pairs: list[tuple[str, str, bool]]) -> None:
    lines = [f"{a} {b} {int(same)}\n" for a, b, same in pairs]
    Path(path).write_text("".join(lines), encoding="utf-8")
