import logging
import os

from src.utils.common import get_unique_filename

LOG_FORMAT = "[ %(asctime)s ] %(name)s:%(lineno)d - %(levelname)s - %(message)s"


def configure_logging(log_dir=None, level=logging.INFO):
    """
    Configure the package logger once for a CLI run.

    Parameters:
    - log_dir (str | None): directory for a timestamped log file; console only when None.
    - level (int): logging level for the ``src`` logger tree.

    Returns:
    - str | None: path of the log file, if one was created.
    """
    root = logging.getLogger("src")
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console)

    log_path = None
    if log_dir is not None:
        os.makedirs(log_dir, exist_ok=True)
        log_path = os.path.join(log_dir, get_unique_filename("run", "log"))
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)
    root.propagate = False
    return log_path
