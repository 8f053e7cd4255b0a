import os
import sys
import tempfile
from pathlib import Path

from loguru import logger


def get_app_data_dir() -> Path:
    """Get the platform-specific application data directory for sreda.

    Returns:
        Path to the sreda application data directory:
        - Windows: %APPDATA%/sreda
        - macOS: ~/Library/Application Support/sreda
        - Linux: $XDG_CONFIG_HOME/sreda or ~/.config/sreda
    """
    if sys.platform == "win32":
        base = Path(os.environ.get("APPDATA", Path.home() / "AppData" / "Roaming"))
    elif sys.platform == "darwin":
        base = Path.home() / "Library" / "Application Support"
    else:  # Linux and other Unix-like systems
        base = Path(os.environ.get("XDG_CONFIG_HOME", Path.home() / ".config"))

    return base / "sreda"


def atomic_write_text(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` so readers never see a partial file.

    Args:
        path: Destination file; parent directories are created
        text: Content, written as UTF-8
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        logger.debug(f"Discarding partial write to {path}")
        Path(tmp_name).unlink(missing_ok=True)
        raise
