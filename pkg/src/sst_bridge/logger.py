# Copyright 2025 deep-bi
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import logging
import threading

LOGGER_NAME = "sst_bridge"

_logger = None
_logger_lock = threading.Lock()


def setup_logging(level: int = logging.INFO) -> None:
    """Configure the package logger; repeated calls replace the handler."""
    global _logger
    _logger = logging.getLogger(LOGGER_NAME)
    _logger.setLevel(level)

    if _logger.handlers:
        _logger.handlers.clear()

    handler = logging.StreamHandler()

    if level == logging.DEBUG:
        formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(name)s [%(threadName)s] - %(message)s")
    else:
        formatter = logging.Formatter("%(message)s")

    handler.setFormatter(formatter)
    _logger.addHandler(handler)
    _logger.propagate = False


def _get_logger() -> logging.Logger:
    global _logger
    if _logger is None:
        with _logger_lock:
            if _logger is None:
                setup_logging()
    return _logger


def info(message: str) -> None:
    _get_logger().info(message)


def success(message: str) -> None:
    _get_logger().info(f"✓ {message}")


def warning(message: str) -> None:
    _get_logger().warning(f"⚠ {message}")


def error(message: str) -> None:
    _get_logger().error(f"Error: {message}")


def progress(message: str) -> None:
    _get_logger().info(f"⏳ {message}")


def debug(message: str) -> None:
    _get_logger().debug(message)


def metric(name: str, value: float | int | None) -> None:
    """Log a headline number as ``name = value`` with 6 significant digits."""
    if value is None:
        rendered = "n/a"
    elif isinstance(value, int):
        rendered = str(value)
    else:
        rendered = f"{value:.6g}"
    _get_logger().info(f"  {name} = {rendered}")


def table(header: list[str], rows: list[list[object]]) -> None:
    """Log a small right-aligned table; floats are shown with 4 decimals."""

    def cell(value: object) -> str:
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    rendered = [[cell(v) for v in row] for row in rows]
    widths = [
        max([len(header[i])] + [len(row[i]) for row in rendered]) for i in range(len(header))
    ]
    log = _get_logger()
    log.info("  ".join(h.rjust(w) for h, w in zip(header, widths, strict=True)))
    for row in rendered:
        log.info("  ".join(v.rjust(w) for v, w in zip(row, widths, strict=True)))
