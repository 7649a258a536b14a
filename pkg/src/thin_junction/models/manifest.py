"""Run manifest written next to every command's outputs."""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..utils.formatting import write_json


@dataclass
class RunManifest:
    """
    Record of one command run.

    Attributes:
        command: Subcommand name
        config_sha256: Digest of the configuration file (None if not used)
        parameters: Effective command parameters
        outputs: Paths of the files written
        version: Tool version
        exit_code: Process exit code
        started: Monotonic start time, used for the wall time
        wall_time: Seconds between start and finish
    """

    command: str
    version: str
    config_sha256: str | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    exit_code: int | None = None
    started: float = field(default_factory=time.perf_counter)
    wall_time: float | None = None

    def add_output(self, path: Path) -> None:
        self.outputs.append(str(path))

    def finish(self, exit_code: int) -> None:
        self.exit_code = int(exit_code)
        self.wall_time = time.perf_counter() - self.started

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "version": self.version,
            "config_sha256": self.config_sha256,
            "parameters": self.parameters,
            "outputs": self.outputs,
            "exit_code": self.exit_code,
            "wall_time": self.wall_time,
        }

    def save(self, path: Path) -> Path:
        return write_json(path, self.to_dict())

    @staticmethod
    def path_for(output: Path) -> Path:
        """``<output>.manifest.json``."""
        output = Path(output)
        return output.with_name(output.name + ".manifest.json")
