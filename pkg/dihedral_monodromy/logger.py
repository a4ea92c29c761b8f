import logging
import os
import traceback
from typing import Optional

PACKAGE_LOGGER = "dihedral_monodromy"


class Logger:
    """Console logger shared by every module of the package.

    Records go through the standard logging machinery, which writes to stderr, so
    certificate JSON on stdout is never interleaved with progress output.

    Attributes:
        module (str): Short name of the module creating the log messages.
        log_level (int): Messages below this level are dropped.
    """
    def __init__(self, module: Optional[str] = None):
        """Initializes the Logger from the LOG_LEVEL environment variable.

        Args:
            module (Optional[str]): The name of the module using the logger. Defaults to None.
        """
        self.module = module
        self._last_progress = {}
        raw_level = os.environ.get("LOG_LEVEL", str(logging.INFO))

        try:
            self.log_level = self.parse_level(raw_level)
        except ValueError as e:
            self.log_level = logging.INFO
            self.dump_log(
                f"Exception while parsing $LOG_LEVEL. "
                f"Expected int or level name but got {raw_level} ({str(e)}). "
                "Setting app log level to INFO."
            )
        self.configure_logger()

    @staticmethod
    def parse_level(raw_level: str) -> int:
        """Accepts either a numeric level ("10") or a level name ("DEBUG")."""
        raw_level = raw_level.strip()
        if raw_level.lstrip("-").isdigit():
            return int(raw_level)
        level = logging.getLevelName(raw_level.upper())
        if not isinstance(level, int):
            raise ValueError(f"unknown level name {raw_level}")
        return level

    def configure_logger(self):
        """Configures the root handler with the package format."""
        logging.basicConfig(
            level=self.log_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )

    def set_level(self, level: int):
        """Changes the level of this logger and of the root handler.

        Args:
            level (int): New logging level.
        """
        self.log_level = level
        logging.getLogger().setLevel(level)

    @property
    def name(self) -> str:
        return f"{PACKAGE_LOGGER}.{self.module}" if self.module else PACKAGE_LOGGER

    def dump_log(self, message: str):
        """Writes a log message to the configured logger.

        Args:
            message (str): The message to log.
        """
        logging.getLogger(self.name).log(max(self.log_level, logging.DEBUG), message)

    def info(self, message):
        """
        Logs info.

        Args:
            message (str): Info message to log
        """
        if self.log_level <= logging.INFO:
            self.dump_log(f"{message}")

    def debug(self, message):
        """
        Writes a debug message.

        Args:
            message (str): Debug message to log
        """
        if self.log_level <= logging.DEBUG:
            self.dump_log(f"🕷️ {message}")

    def progress(self, task: str, done: int, total: Optional[int] = None, every: int = 50):
        """Debug-level progress line for long loops, emitted at most once per `every` steps.

        Args:
            task (str): Name of the running computation, e.g. "lie_closure".
            done (int): Steps completed so far.
            total (Optional[int]): Expected number of steps if known.
            every (int): Minimum step distance between two emitted lines.
        """
        if self.log_level > logging.DEBUG:
            return
        last = self._last_progress.get(task)
        if last is not None and done - last < every and done != total:
            return
        self._last_progress[task] = done
        suffix = f"/{total}" if total is not None else ""
        self.dump_log(f"🕷️ {task}: {done}{suffix}")

    def warning(self, message):
        """
        Writes a warning message.

        Args:
            message (str): Warning message to log
        """
        if self.log_level <= logging.WARNING:
            self.dump_log(f"⚠️ {message}")

    def error(self, message):
        """
        Writes a error message.

        Args:
            message (str): Error message to log
        """
        if self.log_level <= logging.ERROR:
            self.dump_log(f"🔴 {message}")
            traceback.print_exc()

    def critical(self, message):
        """
        Writes a critical message.

        Args:
            message (str): Critical message to log
        """
        if self.log_level <= logging.CRITICAL:
            self.dump_log(f"💥 {message}")
            traceback.print_exc()
