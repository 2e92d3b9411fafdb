# utils/logger.py
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


class LcaLogger:
    """Centralized logging for the lca toolkit."""

    def __init__(self, name: str = "lca-toolkit", level: str = ""):
        self.logger = logging.getLogger(name)
        level_name = (level or os.getenv("LCA_LOG_LEVEL", "WARNING")).upper()
        self.logger.setLevel(getattr(logging, level_name, logging.WARNING))

        if not self.logger.handlers:
            self._setup_handlers()

    def _setup_handlers(self) -> None:
        """Setup logging handlers."""
        # stdout carries the report summary, so records go to stderr
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        self.logger.addHandler(console_handler)

        log_file = os.getenv("LCA_LOG_FILE")
        if not log_file:
            return

        try:
            log_path = Path(log_file)
            if not log_path.is_absolute():
                log_path = Path("logs") / log_path
            log_path.parent.mkdir(parents=True, exist_ok=True)

            file_handler = logging.FileHandler(log_path)
            file_handler.setFormatter(
                logging.Formatter(
                    "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
                )
            )
            self.logger.addHandler(file_handler)
            self.logger.info(f"📝 Logging to {log_path}")

        except OSError as e:
            self.logger.warning(f"Could not create file handler: {e}")

    def get_logger(self) -> logging.Logger:
        """Get the logger instance."""
        return self.logger


# Global logger instance
logger = LcaLogger().get_logger()
