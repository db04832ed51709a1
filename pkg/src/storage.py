"""
Storage Module.

Handles the local output directory of a run: CSV tables and text files.
"""
import os
from typing import List

import pandas as pd


class OutputStore:
    """
    Output directory manager.
    Files are addressed by names relative to the base directory.
    """
    def __init__(self, base_dir: str):
        self.base_dir = base_dir
        os.makedirs(self.base_dir, exist_ok=True)
        self.written: List[str] = []

    def path(self, name: str) -> str:
        """Absolute path of a file in the store."""
        return os.path.join(self.base_dir, name)

    def write_csv(self, frame: pd.DataFrame, name: str) -> str:
        """Writes a table with a header line, '.' decimals and '\\n' line ends."""
        target = self.path(name)
        frame.to_csv(target, index=False, lineterminator="\n", encoding="utf-8")
        self.written.append(name)
        return target

    def write_text(self, content: str, name: str, encoding: str = "utf-8") -> str:
        """Writes text content."""
        target = self.path(name)
        with open(target, "w", encoding=encoding, newline="\n") as f:
            f.write(content)
        self.written.append(name)
        return target

    def read_text(self, name: str, encoding: str = "utf-8") -> str:
        """Reads a text file."""
        with open(self.path(name), "r", encoding=encoding) as f:
            return f.read()

    def read_csv(self, name: str) -> pd.DataFrame:
        """Reads a table written by write_csv."""
        return pd.read_csv(self.path(name))

    def file_exists(self, name: str) -> bool:
        """Checks if a file exists in the store."""
        return os.path.exists(self.path(name))
